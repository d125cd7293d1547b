#pragma once

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include "iterx/config.hpp"
#include "iterx/io/json.hpp"

namespace iterx {

namespace cli_detail {

using io::Json;

inline std::string read_source(const std::string& path, std::istream& in) {
  if (path.empty()) fail(ErrorCode::InvalidInput, "--map is required");
  std::stringstream ss;
  if (path == "-") {
    ss << in.rdbuf();
  } else {
    std::ifstream f(path);
    if (!f) fail(ErrorCode::InvalidInput, "cannot read " + path);
    ss << f.rdbuf();
  }
  return ss.str();
}

inline Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    fail(ErrorCode::InvalidInput, std::string("malformed JSON: ") + e.what());
  }
}

inline ProjPoint<Rat> parse_point(const std::string& s) {
  if (s == "inf" || s == "infinity") return std::nullopt;
  return parse_rat(s);
}

inline Json config_json(const RunConfig& c) {
  Json j;
  j["precision"] = c.precision;
  j["depth"] = c.depth;
  j["tolerance_scale"] = c.tolerance_scale;
  j["bound_n"] = c.bound_n;
  j["m_max"] = c.m_max;
  j["max_height"] = c.max_height.empty() ? Json("auto") : Json(c.max_height);
  return j;
}

inline OrbitBounds bounds_for(const RatMap& phi, const RunConfig& c) {
  OrbitBounds b = default_bounds(phi, c.bound_n);
  if (!c.max_height.empty()) {
    try {
      b.max_height = Int(c.max_height);
    } catch (const std::invalid_argument&) {
      fail(ErrorCode::InvalidInput, "bad --max-height");
    }
    if (b.max_height <= 0) fail(ErrorCode::InvalidInput, "max-height must be positive");
  }
  return b;
}

struct Outcome {
  Json report;
  bool pass = true;
  std::string failed;
};

inline Outcome run_analyze(const RatMap& phi, const RunConfig& c, const std::vector<std::string>& points) {
  Outcome o;
  Json& r = o.report;
  r["map"] = io::map_json(phi);
  r["degree"] = phi.degree();
  CriticalData cd = critical_polynomial(phi);
  Json crit;
  crit["finite"] = io::coeffs_json(cd.finite);
  crit["infinity_multiplicity"] = cd.infinity_mult;
  crit["total_multiplicity"] = std::max(cd.finite.degree(), 0) + cd.infinity_mult;
  r["critical"] = crit;
  OrbitBounds b = bounds_for(phi, c);
  PCFReport pcf = classify_pcf(phi, b);
  r["pcf"] = io::pcf_json(pcf, b);
  std::vector<ProjPoint<Rat>> cand{std::nullopt, Rat(0)};
  for (const auto& s : points) cand.push_back(parse_point(s));
  Json ex = Json::array();
  std::vector<std::string> seen;
  for (const auto& x : cand) {
    std::string key = to_string(x);
    if (std::find(seen.begin(), seen.end(), key) != seen.end()) continue;
    seen.push_back(key);
    ex.push_back({{"point", key}, {"exceptional", is_exceptional(phi, x)}});
  }
  r["exceptional"] = ex;
  return o;
}

inline Outcome run_verify_roots(const RatMap& phi, const RunConfig& c, const std::string& base, int m, int j) {
  Outcome o;
  Json& r = o.report;
  r["map"] = io::map_json(phi);
  ProjPoint<Rat> b = parse_point(base);
  if (!b) fail(ErrorCode::InvalidInput, "base point must be finite");
  Tolerances tol = c.tolerances();
  PowerStructureReport ps = verify_power_structure(phi, Complex(b->get_d(), 0), m, tol, false);
  r["power_structure"] = io::power_structure_json(ps);
  if (!ps.ok()) {
    o.pass = false;
    o.failed = "power structure: " + ps.failed_check;
    return o;
  }
  UnityWitness w = witness_root_of_unity(phi, b, m, j, std::nullopt, tol, bounds_for(phi, c));
  r["witness"] = io::witness_json(w);
  if (!(w.numeric_error <= tol.witness)) {
    o.pass = false;
    o.failed = "witness numeric error above tolerance";
  }
  return o;
}

inline Outcome run_chebyshev(int d, const std::string& base, int n, const RunConfig& c) {
  Outcome o;
  Json& r = o.report;
  r["d"] = d;
  if (d < 2) fail(ErrorCode::InvalidInput, "--d must be at least 2");
  RatMap T = polynomial_map(chebyshev(d));
  r["T_d"] = io::coeffs_json(chebyshev(d));
  bool semi = verify_semiconjugacy(T, v_map(), power_map(d));
  bool vid = v_product_identity_holds();
  bool comp = same_function(compose(T, polynomial_map(chebyshev(2))), polynomial_map(chebyshev(2 * d)));
  r["checks"] = {{"semiconjugacy", semi}, {"v_identity", vid}, {"composition", comp}};
  if (!semi) o.failed = "T_d o v != v o x^d";
  else if (!vid) o.failed = "v(x)v(y) != v(xy) + v(x/y)";
  else if (!comp) o.failed = "T_d o T_2 != T_2d";
  if (!o.failed.empty()) {
    o.pass = false;
    return o;
  }
  UnityWitness w = chebyshev_trace_witness(d, parse_rat(base), n, c.tolerances());
  r["trace_witness"] = io::witness_json(w);
  return o;
}

inline Outcome run_lattes(const std::string& a, const std::string& b, int d, const std::string& x0, int n, const RunConfig& c) {
  Outcome o;
  Json& r = o.report;
  Rat A = parse_rat(a), B = parse_rat(b);
  if (d < 2) fail(ErrorCode::InvalidInput, "--d must be at least 2");
  RatMap phi = lattes_multiplication_map(A, B, d);
  RatMap phi2 = lattes_multiplication_map(A, B, 2);
  r["curve"] = {{"a", A.get_str()}, {"b", B.get_str()}};
  r["map"] = io::map_json(phi);
  bool commute = same_function(compose(phi, phi2), compose(phi2, phi));
  bool product = same_function(compose(phi, phi2), lattes_multiplication_map(A, B, 2 * d));
  r["checks"] = {{"commutes_with_doubling", commute}, {"composition_is_multiplication", product}};
  if (!commute || !product) {
    o.pass = false;
    o.failed = !commute ? "phi_d o phi_2 != phi_2 o phi_d" : "phi_d o phi_2 != phi_2d";
    return o;
  }
  LattesFiberReport fr = lattes_fiber_check(A, B, d, parse_rat(x0), n, c.tolerances(), false);
  r["fiber"] = io::lattes_json(fr);
  if (!fr.ok) {
    o.pass = false;
    o.failed = "fiber does not match x(B_n + E[d^n])";
  }
  return o;
}

inline Outcome run_ramification(const std::string& cyclo, const std::string& poly, long prime) {
  Outcome o;
  Json& r = o.report;
  if (cyclo.empty() == poly.empty()) fail(ErrorCode::InvalidInput, "give exactly one of --cyclotomic P,N or --poly");
  if (!cyclo.empty()) {
    auto comma = cyclo.find(',');
    if (comma == std::string::npos) fail(ErrorCode::InvalidInput, "--cyclotomic expects P,N");
    long p = 0;
    int n = 0;
    try {
      p = std::stol(cyclo.substr(0, comma));
      n = std::stoi(cyclo.substr(comma + 1));
    } catch (const std::exception&) {
      fail(ErrorCode::InvalidInput, "--cyclotomic expects P,N");
    }
    if (p < 2 || n < 1 || n > 3 || !(p == 2 || p == 3 || p == 5)) fail(ErrorCode::InvalidInput, "cyclotomic range is p in {2,3,5}, 1 <= n <= 3");
    LevelPtr L = push_eisenstein(nullptr, shifted_cyclotomic(p, n), p, "z");
    TowerElem pi = TowerElem::generator(L), one = TowerElem::from_rat(1, p), acc = one + pi;
    long q = 1;
    for (int k = 0; k < n; ++k) q *= p;
    std::vector<TowerElem> conj;
    for (long a = 2; a < q; ++a) {
      acc = acc * (one + pi);
      if (a % p) conj.push_back(acc - one);
    }
    BreakData bd = ramification_breaks(L, conj);
    BreakData oracle = cyclotomic_oracle(p, n);
    r["field"] = "Q_" + std::to_string(p) + "(zeta_" + std::to_string(q) + ")";
    r["breaks"] = io::breaks_json(bd);
    r["oracle"] = io::breaks_json(oracle);
    r["herbrand"] = io::herbrand_json(HerbrandFn::from_breaks(bd));
    bool agree = bd.lower == oracle.lower;
    r["agrees_with_oracle"] = agree;
    if (!agree) {
      o.pass = false;
      o.failed = "polygon breaks differ from the Galois orbit breaks";
    }
    return o;
  }
  Json arr = parse_json(poly);
  Poly<Rat> g = io::coeffs_from_json(arr, "poly");
  LevelPtr L = push_eisenstein(nullptr, g, prime, "t");
  BreakData bd = ramification_breaks(L);
  r["poly"] = io::coeffs_json(g);
  r["prime"] = prime;
  r["breaks"] = io::breaks_json(bd);
  r["herbrand"] = io::herbrand_json(HerbrandFn::from_breaks(bd));
  return o;
}

inline Outcome run_apf(const RatMap& phi, long p, const RunConfig& c) {
  Outcome o;
  APFOptions opt;
  opt.depth = c.depth;
  opt.m_max = c.m_max;
  opt.precision = c.precision;
  opt.max_inert = c.max_inert;
  APFResult res = build_apf_tower(phi, p, opt);
  o.report["map"] = io::map_json(phi);
  o.report["certificate"] = io::certificate_json(res.certificate);
  o.report["tower"] = io::tower_json(res.levels);
  o.pass = res.certificate.pass();
  o.failed = res.certificate.first_failure;
  return o;
}

}  // namespace cli_detail

/// Runs one subcommand. Exit 0: all checks pass; 1: a mathematical check
/// failed or could not be completed; 2: usage or input error.
inline int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, std::istream& in = std::cin) {
  using cli_detail::Json;
  RunConfig cfg;
  CLI::App app{"Verification tools for iterated preimages and APF towers", "iterx"};
  app.require_subcommand(1);
  auto add_common = [&](CLI::App* s) {
    s->add_option("--precision", cfg.precision, "p-adic precision in digits of p");
    s->add_option("--depth", cfg.depth, "APF tower depth (0 = automatic)");
    s->add_option("--tolerance", cfg.tolerance_scale, "scale applied to every numeric tolerance, in (0, 1]");
    s->add_option("--bound-n", cfg.bound_n, "orbit length bound");
    s->add_option("--m-max", cfg.m_max, "largest iterate tried by the power-like search");
    s->add_option("--max-height", cfg.max_height, "orbit height bound");
    s->add_option("--output,-o", cfg.output, "write the report here instead of stdout");
  };
  auto* analyze = app.add_subcommand("analyze", "critical points, PCF verdict and exceptional points");
  std::vector<std::string> points;
  analyze->add_option("--map", cfg.input, "map file, - for stdin")->required();
  analyze->add_option("--point", points, "extra points to test for exceptionality");
  add_common(analyze);

  auto* roots = app.add_subcommand("verify-roots", "power structure and root-of-unity witness");
  std::string base = "2";
  int m = 2, j = 1;
  roots->add_option("--map", cfg.input, "map file, - for stdin")->required();
  roots->add_option("--base", base, "base point b");
  roots->add_option("--m", m, "power order m");
  roots->add_option("--j", j, "witness exponent j (order m^j)");
  add_common(roots);

  auto* cheb = app.add_subcommand("chebyshev", "Chebyshev identities and trace witness");
  int d = 2, n = 1;
  std::string cbase = "5";
  cheb->add_option("--d", d, "degree");
  cheb->add_option("--base", cbase, "base point for the trace witness");
  cheb->add_option("--n", n, "level");
  add_common(cheb);

  auto* lat = app.add_subcommand("lattes", "Lattes map identities and fiber structure");
  std::string la = "0", lb = "1", lx0 = "2";
  int ld = 2, ln = 1;
  lat->add_option("--a", la, "curve coefficient a in y^2 = x^3 + ax + b");
  lat->add_option("--b", lb, "curve coefficient b");
  lat->add_option("--d", ld, "multiplication degree");
  lat->add_option("--x0", lx0, "base x-coordinate");
  lat->add_option("--n", ln, "level");
  add_common(lat);

  auto* ram = app.add_subcommand("ramification", "ramification breaks and Herbrand function");
  std::string cyclo, poly;
  long rprime = 2;
  ram->add_option("--cyclotomic", cyclo, "P,N for Q_P(zeta_{P^N})");
  ram->add_option("--poly", poly, "Eisenstein polynomial as a JSON coefficient array, constant first");
  ram->add_option("--prime", rprime, "prime for --poly");
  add_common(ram);

  auto* apf = app.add_subcommand("apf", "build the norm-compatible tower and its certificate");
  long aprime = 0;
  apf->add_option("--map", cfg.input, "map file, - for stdin")->required();
  apf->add_option("--prime", aprime, "prime p (default: the map file's \"prime\", else 2)");
  apf->add_option("--max-inert", cfg.max_inert, "largest residue extension for the unit equation");
  add_common(apf);

  std::vector<const char*> argv{"iterx"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  Json report;
  CLI::App* sub = app.get_subcommands().front();
  report["command"] = sub->get_name();
  int code = 0;
  try {
    cfg.validate();
    report["config"] = cli_detail::config_json(cfg);
    cli_detail::Outcome o;
    if (sub == analyze) {
      o = cli_detail::run_analyze(io::parse_map(cli_detail::read_source(cfg.input, in)), cfg, points);
    } else if (sub == roots) {
      o = cli_detail::run_verify_roots(io::parse_map(cli_detail::read_source(cfg.input, in)), cfg, base, m, j);
    } else if (sub == cheb) {
      o = cli_detail::run_chebyshev(d, cbase, n, cfg);
    } else if (sub == lat) {
      o = cli_detail::run_lattes(la, lb, ld, lx0, ln, cfg);
    } else if (sub == ram) {
      o = cli_detail::run_ramification(cyclo, poly, rprime);
    } else {
      Json j = cli_detail::parse_json(cli_detail::read_source(cfg.input, in));
      RatMap phi = io::map_from_json(j);
      long p = aprime ? aprime : (j.contains("prime") ? j.at("prime").get<long>() : 2);
      report["prime"] = p;
      o = cli_detail::run_apf(phi, p, cfg);
    }
    report.update(o.report);
    report["verdict"] = o.pass ? "pass" : "fail";
    if (!o.pass) report["failed_check"] = o.failed;
    code = o.pass ? 0 : 1;
  } catch (const Error& e) {
    if (e.is_input_error()) {
      err << "iterx: " << e.what() << "\n";
      return 2;
    }
    report["verdict"] = "fail";
    report["error"] = {{"code", to_string(e.code())}, {"message", e.what()}};
    code = 1;
  } catch (const Json::exception& e) {
    err << "iterx: bad input: " << e.what() << "\n";
    return 2;
  }
  report["timestamp"] = io::timestamp_utc();
  std::string text = report.dump(2) + "\n";
  if (cfg.output.empty()) {
    out << text;
  } else {
    std::ofstream f(cfg.output);
    if (!f) {
      err << "iterx: cannot write " << cfg.output << "\n";
      return 2;
    }
    f << text;
  }
  return code;
}

}  // namespace iterx

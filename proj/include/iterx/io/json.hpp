#pragma once

#include <chrono>
#include <ctime>
#include <string>
#include <vector>

#include "iterx/apf.hpp"
#include "iterx/dynamics.hpp"
#include "iterx/ramification.hpp"
#include "iterx/witness.hpp"
#include <json.hpp>

namespace iterx::io {

using Json = nlohmann::ordered_json;

inline Json coeffs_json(const Poly<Rat>& p) {
  Json a = Json::array();
  for (const auto& c : p.coeffs()) a.push_back(c.get_str());
  if (p.is_zero()) a.push_back("0");
  return a;
}

inline Poly<Rat> coeffs_from_json(const Json& a, const char* what) {
  if (!a.is_array() || a.empty()) fail(ErrorCode::InvalidInput, std::string(what) + " must be a nonempty array");
  std::vector<Rat> c;
  for (const auto& x : a) {
    if (x.is_string()) c.push_back(parse_rat(x.get<std::string>()));
    else if (x.is_number_integer()) c.push_back(Rat(x.get<long>()));
    else fail(ErrorCode::InvalidInput, std::string(what) + " entries must be strings or integers");
  }
  return Poly<Rat>(c);
}

/// {"num": [...], "den": [...]} with coefficient 0 first; den defaults to ["1"].
inline Json map_json(const RatMap& phi) {
  Json j;
  j["num"] = coeffs_json(phi.num);
  j["den"] = coeffs_json(phi.den);
  return j;
}

inline RatMap map_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("num")) fail(ErrorCode::InvalidInput, "map literal needs a \"num\" array");
  Poly<Rat> num = coeffs_from_json(j.at("num"), "num");
  Poly<Rat> den = j.contains("den") ? coeffs_from_json(j.at("den"), "den") : Poly<Rat>::constant(Rat(1));
  return normalize_map(num, den);
}

inline RatMap parse_map(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    fail(ErrorCode::InvalidInput, std::string("malformed JSON: ") + e.what());
  }
  return map_from_json(j);
}

inline Json complex_json(Complex z) { return Json::array({z.real(), z.imag()}); }

inline Json point_json(const ProjPoint<Rat>& x) { return to_string(x); }

inline Json orbit_json(const OrbitReport& o) {
  Json j;
  j["point"] = o.point;
  j["preperiod"] = o.preperiod;
  j["period"] = o.period;
  j["escaped"] = o.escaped;
  if (o.escaped) {
    j["escape_step"] = o.escape_step;
    j["escape_reason"] = o.escape_reason;
  }
  j["orbit"] = o.orbit;
  return j;
}

inline Json pcf_json(const PCFReport& r, const OrbitBounds& b) {
  Json j;
  j["verdict"] = r.verdict();
  Json orbits = Json::array();
  for (const auto& o : r.orbits) orbits.push_back(orbit_json(o));
  j["orbits"] = orbits;
  j["bounds"] = {{"max_points", b.max_points}, {"max_height", b.max_height.get_str()}};
  return j;
}

inline Json root_json(const CertifiedRoot& r) {
  Json j;
  j["z"] = complex_json(r.z);
  j["radius"] = r.radius;
  j["multiplicity"] = r.multiplicity;
  return j;
}

inline Json power_structure_json(const PowerStructureReport& r) {
  Json j;
  j["m"] = r.m;
  j["d"] = r.d;
  j["alpha"] = complex_json(r.alpha);
  j["orbits_ok"] = r.orbits_ok;
  j["product_ok"] = r.product_ok;
  j["rep_product_ok"] = r.rep_product_ok;
  j["product"] = complex_json(r.product);
  j["expected_product"] = complex_json(r.expected_product);
  j["rep_product_power"] = complex_json(r.rep_product_power);
  j["expected_rep_power"] = complex_json(r.expected_rep_power);
  j["max_error"] = r.max_error;
  if (!r.failed_check.empty()) j["failed_check"] = r.failed_check;
  return j;
}

inline Json witness_json(const UnityWitness& w) {
  Json j;
  j["target"] = w.target;
  j["m"] = w.m;
  j["j"] = w.j;
  j["level"] = w.level;
  j["level_bound"] = w.level_bound;
  if (w.period_lcm) j["period_lcm"] = w.period_lcm;
  Json expr = Json::array();
  for (std::size_t k = 0; k < w.expr.size(); ++k) {
    const auto& e = w.expr[k];
    Json x;
    x["id"] = k;
    x["kind"] = to_string(e.kind);
    if (e.kind == WitnessExpr::Kind::Leaf) x["node"] = e.node;
    else x["args"] = e.args;
    if (e.kind == WitnessExpr::Kind::Power) x["exponent"] = e.exponent;
    expr.push_back(x);
  }
  j["expr"] = expr;
  j["root"] = w.root;
  Json leaves = Json::array();
  for (const auto& l : w.leaves)
    leaves.push_back({{"node", l.node}, {"level", l.level}, {"parent", l.parent}, {"z", complex_json(l.z)}});
  j["leaves"] = leaves;
  j["value"] = complex_json(w.value);
  j["target_value"] = complex_json(w.target_value);
  j["numeric_error"] = w.numeric_error;
  return j;
}

inline Json lattes_json(const LattesFiberReport& r) {
  Json j;
  j["d"] = r.d;
  j["n"] = r.n;
  j["expected_count"] = r.expected_count;
  j["matched"] = r.matched;
  j["distinct_fiber"] = r.distinct_fiber;
  j["max_distance"] = r.max_distance;
  j["ok"] = r.ok;
  return j;
}

inline Json polygon_json(const std::vector<std::pair<int, Rat>>& v) {
  Json a = Json::array();
  for (const auto& [i, y] : v) a.push_back(Json::array({i, y.get_str()}));
  return a;
}

inline Json polygon_json(const NewtonPolygon& np) {
  Json j;
  j["vertices"] = polygon_json(np.vertices);
  Json segs = Json::array();
  for (const auto& s : np.segments) segs.push_back({{"slope", s.slope.get_str()}, {"length", s.length}});
  j["segments"] = segs;
  return j;
}

inline Json breaks_json(const BreakData& bd) {
  Json j;
  j["degree"] = bd.degree;
  Json lower = Json::array();
  for (const auto& [b, c] : bd.lower) lower.push_back({{"break", b.get_str()}, {"count", c}});
  j["lower_breaks"] = lower;
  Json upper = Json::array();
  for (const auto& u : upper_breaks(bd)) upper.push_back(u.get_str());
  j["upper_breaks"] = upper;
  j["galois"] = bd.galois_verified ? "verified" : "assumed";
  j["source"] = bd.source;
  return j;
}

inline Json herbrand_json(const HerbrandFn& h) {
  Json pieces = Json::array();
  for (std::size_t k = 0; k < h.breakpoints().size(); ++k)
    pieces.push_back({{"from", h.breakpoints()[k].get_str()}, {"slope", h.slopes()[k].get_str()}});
  return pieces;
}

inline Json tower_json(const std::vector<LevelPtr>& levels) {
  Json a = Json::array();
  for (const auto& L : levels) {
    Json j;
    j["name"] = L->name;
    j["kind"] = L->kind == TowerLevel::Kind::Eisenstein ? "eisenstein" : "inert";
    j["degree"] = L->degree;
    j["e"] = L->e;
    j["f"] = L->f;
    if (L->degree <= 16) {
      Json c = Json::array();
      for (int i = 0; i <= L->degree; ++i) c.push_back(L->poly.coeff(i).str());
      j["poly"] = c;
    }
    a.push_back(j);
  }
  return a;
}

inline Json opt_rat(const std::optional<Rat>& q, const char* none) { return q ? Json(q->get_str()) : Json(none); }

inline Json certificate_json(const APFCertificate& c) {
  Json j;
  j["p"] = c.p;
  j["m"] = c.powerlike.m;
  j["r"] = c.powerlike.r;
  j["c"] = c.powerlike.c;
  j["gamma"] = c.gamma;
  j["delta"] = c.delta;
  j["u"] = c.u;
  j["base_field"] = c.base_field;
  Json levels = Json::array();
  for (const auto& l : c.levels) {
    Json x;
    x["n"] = l.n;
    x["qn"] = l.qn;
    Json vals = Json::array();
    for (std::size_t i = 0; i < l.coeff_vals.size(); ++i) {
      if (!l.coeff_vals[i]) vals.push_back("inf");
      else vals.push_back((l.coeff_is_bound[i] ? ">=" : "") + l.coeff_vals[i]->get_str());
    }
    x["coeff_vals"] = vals;
    x["polygon"] = polygon_json(l.polygon);
    x["slope"] = l.slope.get_str();
    x["norm_ok"] = l.norm_ok;
    x["norm_exact"] = l.norm_exact;
    x["replay_ok"] = l.replay_ok;
    x["conjugation_replay_ok"] = l.conjugation_replay_ok;
    x["replay_precision"] = opt_rat(l.replay_precision, "exact");
    levels.push_back(x);
  }
  j["levels"] = levels;
  j["q_constant"] = c.q_constant;
  j["coefficients_level_independent"] = c.coefficients_level_independent;
  j["epsilon"] = opt_rat(c.epsilon, "inf");
  j["epsilon_units"] = c.epsilon_units;
  j["basepoint"] = c.basepoint;
  j["h_n"] = "f1((-1)^(p+1) x) + (-1)^p pi_(n-1) g1((-1)^(p+1) x), as in the construction; the displayed minimal polynomial in the criterion's statement has index slips";
  j["verdict"] = c.verdict();
  if (!c.pass()) j["failed_check"] = c.first_failure;
  return j;
}

inline std::string timestamp_utc() {
  std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace iterx::io

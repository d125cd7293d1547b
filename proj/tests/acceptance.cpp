// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "iterx/iterx.hpp"

using namespace iterx;

namespace {

struct Outcome {
  bool ok = true;
  std::ostringstream note;

  void check(bool cond, const std::string& what) {
    if (!cond && ok) note << "first failure: " << what << "; ";
    ok = ok && cond;
  }
};

Poly<Rat> P(std::initializer_list<long> c) { return rat_poly(c); }

RatMap example43() {
  Poly<Rat> s = P({-2, 1});
  return polynomial_map(pow(s, 8) - Rat(2) * pow(s, 2) + P({3}));
}

void ac1(Outcome& o) {
  auto t0 = std::chrono::steady_clock::now();
  PowerLikeData pl = powerlike_order(example43(), 2);
  o.check(pl.m == 2 && pl.r == 6 && pl.c == 1, "powerlike (2,6,1)");
  FixedPoints fp = fixed_points(iterate(example43(), 2), 2);
  o.check(fp.gamma.is_exact() && fp.gamma.to_rat() == 2, "gamma = 2 exact");
  o.check(!fp.delta, "delta = inf");
  APFOptions opt;
  opt.depth = 3;
  opt.precision = 60;
  APFResult r = build_apf_tower(example43(), 2, opt);
  o.check(r.model.u.is_exact() && r.model.u.scalar().to_rat() == 1, "u = 1");
  o.check(r.certificate.levels.size() == 3, "three levels");
  for (const auto& l : r.certificate.levels) {
    o.check(l.single_segment && l.slope == Rat(-1, 64), "slope -1/64 at level " + std::to_string(l.n));
    o.check(l.norm_exact, "exact norm at level " + std::to_string(l.n));
  }
  o.check(r.certificate.verdict() == "pass", "verdict: " + r.certificate.first_failure);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  o.check(secs < 60, "runtime");
  o.note << "depth 3 in " << secs << " s";
}

void ac2(Outcome& o) {
  std::mt19937 rng(2024);
  std::uniform_int_distribution<long> coef(-9, 9);
  std::uniform_real_distribution<double> re(-3, 3);
  int done = 0, failures = 0;
  while (done < 200) {
    int m = done % 2 ? 3 : 2;
    int K = 1 + static_cast<int>(rng() % static_cast<unsigned>(9 / m));
    int Kg = static_cast<int>(rng() % static_cast<unsigned>(K));
    std::vector<Rat> f(static_cast<std::size_t>(m * K) + 1), g(static_cast<std::size_t>(m * Kg) + 1);
    for (int k = 1; k <= K; ++k) f[static_cast<std::size_t>(m * k)] = coef(rng);
    for (int k = 0; k <= Kg; ++k) g[static_cast<std::size_t>(m * k)] = coef(rng);
    if (f.back() == 0 || g[0] == 0 || g.back() == 0) continue;
    RatMap phi;
    try {
      phi = normalize_map(Poly<Rat>(f), Poly<Rat>(g));
    } catch (const Error&) {
      continue;
    }
    if (phi.degree() != m * K || phi.degree() < 2) continue;
    Complex alpha(re(rng), re(rng));
    if (std::abs(alpha) < 0.1) continue;
    ++done;
    try {
      if (!verify_power_structure(phi, alpha, m, {}, false).ok()) ++failures;
    } catch (const Error&) {
      ++failures;
    }
  }
  o.check(failures == 0, std::to_string(failures) + " failing maps");
  o.note << done << " maps, " << failures << " failures";
}

void ac3(Outcome& o) {
  RatMap phi = polynomial_map(P({-1, 0, 1}));
  UnityWitness w1 = witness_root_of_unity(phi, Rat(3), 2, 1);
  UnityWitness w2 = witness_root_of_unity(phi, Rat(3), 2, 2);
  o.check(w1.level <= 2 && w1.numeric_error < 1e-9, "zeta_2");
  o.check(w2.level <= 4 && w2.numeric_error < 1e-9, "zeta_4");
  o.check(w1.period_lcm == 2, "r = 2");
  o.note << "levels " << w1.level << ", " << w2.level << "; errors " << w1.numeric_error << ", " << w2.numeric_error;
}

void ac4(Outcome& o) {
  int pairs = 0;
  for (int d1 = 1; d1 <= 10; ++d1)
    for (int d2 = 1; d1 * d2 <= 10; ++d2) {
      ++pairs;
      o.check(same_function(compose(polynomial_map(chebyshev(d1)), polynomial_map(chebyshev(d2))), polynomial_map(chebyshev(d1 * d2))),
              "T_" + std::to_string(d1) + " o T_" + std::to_string(d2));
    }
  for (int d = 1; d <= 10; ++d)
    o.check(verify_semiconjugacy(polynomial_map(chebyshev(d)), v_map(), power_map(d)), "T_d(v(x)) = v(x^d) for d = " + std::to_string(d));
  double a = chebyshev_trace_witness(2, Rat(5), 1).value.real();
  double b = chebyshev_trace_witness(3, Rat(1), 1).value.real();
  double c = chebyshev_trace_witness(2, Rat(1), 2).value.real();
  o.check(std::abs(a + 2) < 1e-10, "v(zeta_2) = -2");
  o.check(std::abs(b + 1) < 1e-10, "v(zeta_3) = -1");
  o.check(std::abs(c) < 1e-10, "v(zeta_4) = 0");
  o.note << pairs << " compositions, traces " << a << ", " << b << ", " << c;
}

void ac5(Outcome& o) {
  RatMap phi = lattes_multiplication_map(Rat(0), Rat(1), 2);
  // tangent doubling on y^2 = x^3 + 1: x(2P) = ((3x^2)^2 - 8x(x^3 + 1)) / (4(x^3 + 1))
  RatMap doubling = normalize_map(P({0, -8, 0, 0, 1}), P({4, 0, 0, 4}));
  o.check(same_function(phi, doubling), "phi = x([2]P)");
  o.check(phi.degree() == 4, "deg phi = 4");
  o.check(*phi(Rat(2)) == 0, "x(2(2,3)) = 0");
  o.check(!phi(Rat(-1)).has_value(), "2-torsion maps to infinity");
  LattesFiberReport fr = lattes_fiber_check(Rat(0), Rat(1), 2, Rat(2), 1, {}, false);
  o.check(fr.ok && fr.max_distance < 1e-8, "fiber check");
  o.note << "fiber " << fr.matched << "/" << fr.expected_count << ", max distance " << fr.max_distance;
}

void ac6(Outcome& o) {
  for (long p : {2L, 3L})
    for (int n = 1; n <= 3; ++n) {
      LevelPtr L = push_eisenstein(nullptr, shifted_cyclotomic(p, n), p);
      o.check(ramification_breaks(L).lower == cyclotomic_oracle(p, n).lower, "breaks for (" + std::to_string(p) + "," + std::to_string(n) + ")");
    }
  BreakData z8 = cyclotomic_oracle(2, 3);
  o.check(z8.break_values() == std::vector<Rat>{Rat(1), Rat(3)}, "Q2(zeta_8) lower breaks {1,3}");
  auto T = cyclotomic_tower(2, 3);
  HerbrandFn whole = HerbrandFn::from_breaks(z8);
  HerbrandFn mid = HerbrandFn::from_breaks(ramification_breaks(T[1]));
  HerbrandFn top = HerbrandFn::from_breaks(ramification_breaks(T[2]));
  o.check(herbrand_compose(mid, top) == whole, "transitivity through Q2(zeta_4)");
  bool pointwise = whole.leq(top);
  for (int k = 0; k <= 400; ++k) pointwise = pointwise && whole(Rat(k, 16)) <= top(Rat(k, 16));
  o.check(pointwise, "phi_F/K <= phi_F/K'");
  o.note << "Herbrand function of Q2(zeta_8)/Q2: " << to_string(whole);
}

void ac7(Outcome& o) {
  std::mt19937 rng(77);
  std::uniform_int_distribution<long> coef(-60, 60);
  long roots = 0, polys = 0;
  int exhausted = 0, mismatches = 0;
  for (long p : {2L, 3L})
    for (int t = 0; t < 100; ++t) {
      int deg = 1 + static_cast<int>(rng() % 8);
      std::vector<Rat> c(static_cast<std::size_t>(deg) + 1);
      for (auto& x : c) x = coef(rng);
      if (c.back() == 0) c.back() = 1;
      if (c[0] == 0) c[0] = p * p;
      ++polys;
      try {
        Poly<PAdic> f = padic_poly(Poly<Rat>(c), p);
        NewtonPolygon np = newton_polygon(f);
        Poly<PAdic> df = f.derivative();
        long span = p * p * p * p;
        for (long s = 0; s < span; ++s) {
          PAdic seed = PAdic::from_int(s, p);
          PAdic fs = f.eval(seed), ds = df.eval(seed);
          if (ds.is_zero() || (!fs.is_zero() && *fs.valuation() <= 2 * *ds.valuation())) continue;
          PAdic root = hensel_root(f, seed);
          ++roots;
          if (!f.eval(root).is_zero() || !np.segment_for_root_valuation(Rat(*root.valuation())).has_value()) ++mismatches;
        }
      } catch (const Error& e) {
        if (e.code() == ErrorCode::PrecisionExhausted) ++exhausted;
        else ++mismatches;
      }
    }
  o.check(mismatches == 0, std::to_string(mismatches) + " mismatches");
  o.check(exhausted == 0, std::to_string(exhausted) + " PrecisionExhausted");
  o.note << polys << " polynomials, " << roots << " lifted roots";
}

void ac8(Outcome& o) {
  APFOptions opt;
  opt.depth = 4;
  APFResult a = build_apf_tower(polynomial_map(P({2, 0, 1})), 2, opt);
  o.check(a.certificate.levels.size() == 4, "x^2+2 depth 4");
  o.check(a.certificate.q_constant, "q_n constant");
  for (const auto& l : a.certificate.levels) o.check(l.qn == 2 && l.norm_exact, "q_n = 2 and exact norm");
  o.check(a.certificate.epsilon && *a.certificate.epsilon >= 1, "epsilon >= 1");
  o.check(a.certificate.pass(), "x^2+2: " + a.certificate.first_failure);
  opt.depth = 3;
  APFResult b = build_apf_tower(polynomial_map(P({1, 0, 1})), 2, opt);
  o.check(b.powerlike.m == 2 && b.powerlike.r == 2, "x^2+1 (m, r) = (2, 2)");
  o.check(b.certificate.levels.size() == 3 && b.certificate.pass(), "x^2+1: " + b.certificate.first_failure);
  o.note << "x^2+2 epsilon " << (a.certificate.epsilon ? a.certificate.epsilon->get_str() : "none");
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
      {"AC1 (x-2)^8 - 2(x-2)^2 + 3 over Q2 end-to-end", ac1},       {"AC2 product identities on random maps", ac2},
      {"AC3 root-of-unity witnesses", ac3},      {"AC4 Chebyshev suite", ac4},
      {"AC5 Lattes suite", ac5},                 {"AC6 ramification suite", ac6},
      {"AC7 Newton/Hensel consistency", ac7},    {"AC8 secondary APF instances", ac8}};
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      fn(o);
    } catch (const std::exception& e) {
      o.ok = false;
      o.note << "exception: " << e.what();
    }
    std::printf("%s: %s (%s)\n", name.c_str(), o.ok ? "PASS" : "FAIL", o.note.str().c_str());
    std::fflush(stdout);
    if (!o.ok) ++failed;
  }
  return failed == 0 ? 0 : 1;
}

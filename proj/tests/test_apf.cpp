#include <gtest/gtest.h>

#include "iterx/apf.hpp"

using namespace iterx;

namespace {

Poly<Rat> P(std::initializer_list<long> c) { return rat_poly(c); }

RatMap example43() {
  Poly<Rat> s = P({-2, 1});
  return polynomial_map(pow(s, 8) - Rat(2) * pow(s, 2) + P({3}));
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::InvalidInput;
}

// Composition of integer polynomials mod p on plain vectors.
using ModVec = std::vector<long>;
ModVec mulmod(const ModVec& a, const ModVec& b, long p) {
  ModVec c(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) c[i + j] = (c[i + j] + a[i] * b[j]) % p;
  return c;
}
ModVec composemod(const ModVec& f, const ModVec& g, long p) {
  ModVec acc{0};
  for (auto it = f.rbegin(); it != f.rend(); ++it) {
    acc = mulmod(acc, g, p);
    acc[0] = ((acc[0] + *it) % p + p) % p;
  }
  while (acc.size() > 1 && acc.back() == 0) acc.pop_back();
  return acc;
}
ModVec reduce(const Poly<Rat>& f, long p) {
  ModVec out;
  for (const auto& c : f.coeffs()) out.push_back((Int(Int(c.get_num()) % p).get_si() + p) % p);
  return out;
}

// μ(b) = σπ_1 with μ(x) = u(x - γ)/(1 - x/δ), cleared of denominators.
bool basepoint_maps_to_start(const APFResult& r) {
  const long p = r.model.p;
  TowerElem b = r.basepoint;
  TowerElem lhs = r.model.u * (b - TowerElem(r.fixed.gamma));
  TowerElem den = TowerElem::from_rat(1, p);
  if (r.fixed.delta) den = den - b * TowerElem(r.fixed.delta->inverse());
  TowerElem rhs = TowerElem::from_rat(apf_sign(p) * p, p) * den;
  return (lhs - rhs).is_zero();
}

}  // namespace

TEST(PowerLike, Example43) {
  PowerLikeData d = powerlike_order(example43(), 2);
  EXPECT_EQ(d.m, 2);
  EXPECT_EQ(d.r, 6);
  EXPECT_EQ(d.c, 1);
  EXPECT_EQ(d.degree, 64);
  ModVec f = reduce(example43().num, 2);
  ModVec f2 = composemod(f, f, 2);
  ModVec x64(65, 0);
  x64[64] = 1;
  EXPECT_EQ(f2, x64);
  EXPECT_NE(f, ModVec({0, 0, 0, 0, 0, 0, 0, 0, 1}));
}

TEST(PowerLike, SmallExamples) {
  PowerLikeData a = powerlike_order(polynomial_map(P({2, 0, 1})), 2);
  EXPECT_EQ(a.m, 1);
  EXPECT_EQ(a.r, 1);
  PowerLikeData b = powerlike_order(polynomial_map(P({1, 0, 1})), 2);
  EXPECT_EQ(b.m, 2);
  EXPECT_EQ(b.r, 2);
  EXPECT_EQ(composemod({1, 0, 1}, {1, 0, 1}, 2), ModVec({0, 0, 0, 0, 1}));
  PowerLikeData c = powerlike_order(normalize_map(P({3, 0, 0, 2}), P({1, 3})), 3);
  EXPECT_EQ(c.m, 1);
  EXPECT_EQ(c.c, 2);
}

TEST(PowerLike, Failures) {
  EXPECT_EQ(code_of([] { powerlike_order(polynomial_map(P({1, 1, 1})), 2); }), ErrorCode::NotPowerLikeWithin);
  // (x^2 + x)/(x + 2) reduces to x mod 2
  EXPECT_EQ(code_of([] { powerlike_order(normalize_map(P({0, 1, 1}), P({2, 1})), 2); }), ErrorCode::NotGoodReduction);
  EXPECT_EQ(code_of([] { powerlike_order(polynomial_map(P({0, 0, 2})), 2); }), ErrorCode::NotGoodReduction);
}

TEST(FixedPoints, Example43) {
  RatMap phi2 = iterate(example43(), 2);
  FixedPoints fp = fixed_points(phi2, 2);
  EXPECT_TRUE(fp.gamma.is_exact());
  EXPECT_EQ(fp.gamma.to_rat(), Rat(2));
  EXPECT_FALSE(fp.delta.has_value());
  // 2 -> 3 -> 2
  EXPECT_EQ(*example43()(Rat(2)), Rat(3));
  EXPECT_EQ(*example43()(Rat(3)), Rat(2));
}

TEST(FixedPoints, QuadraticAndRational) {
  FixedPoints fp = fixed_points(polynomial_map(P({2, 0, 1})), 2);
  Int rep = fp.gamma.unit_mod(fp.gamma.relprec()) * 2;
  EXPECT_EQ(mpz_fdiv_ui(rep.get_mpz_t(), 8), 6u);  // x^2 - x + 2 = 0 mod 8 at x = 6
  RatMap r = normalize_map(P({2, 0, 1}), P({1, 0, 2}));
  FixedPoints fr = fixed_points(r, 2);
  ASSERT_TRUE(fr.delta.has_value());
  EXPECT_EQ(*fr.delta->valuation(), -1);
  EXPECT_EQ(*fr.gamma.valuation(), 1);
  Poly<PAdic> F = padic_poly(r.num - r.den.shifted(1), 2);
  EXPECT_TRUE(F.eval(fr.gamma).is_zero());
  EXPECT_TRUE(F.eval(*fr.delta).is_zero());
  EXPECT_EQ(code_of([] { fixed_points(polynomial_map(P({1, 1, 1})), 2); }), ErrorCode::AmbiguousPolygon);
}

TEST(Model, Example43Invariants) {
  RatMap phi2 = iterate(example43(), 2);
  ConjugatedModel m = normalizing_model(phi2, fixed_points(phi2, 2), 2);
  EXPECT_TRUE(m.exact);
  EXPECT_EQ(m.base, nullptr);
  EXPECT_EQ(m.u.scalar().to_rat(), Rat(1));
  EXPECT_TRUE(m.f1.coeff(0).is_exact_zero());
  EXPECT_TRUE((m.f1.coeff(64) - TowerElem::from_rat(1, 2)).is_exact_zero());
  EXPECT_TRUE((m.g1.coeff(0) - TowerElem::from_rat(1, 2)).is_exact_zero());
  EXPECT_TRUE(m.g1.coeff(64).is_exact_zero());
  for (int i = 1; i < 64; ++i)
    if (!m.f1.coeff(i).is_exact_zero()) {
      EXPECT_GT(*m.f1.coeff(i).valuation(), 0) << i;
    }
  // μ = x - 2, so ψ(x) = φ²(x + 2) - 2 exactly
  RatMap shifted = conjugate(phi2, Mobius<Rat>::translation(Rat(-2)));
  for (int i = 0; i <= 64; ++i) EXPECT_EQ(m.f1.coeff(i).scalar().to_rat(), shifted.num.coeff(i)) << i;
}

TEST(Model, InertUnitForCubicOverQ3) {
  RatMap phi = normalize_map(P({3, 0, 0, 2}), P({1, 3}));
  ConjugatedModel m = normalizing_model(phi, fixed_points(phi, 3), 3);
  ASSERT_NE(m.base, nullptr);
  EXPECT_EQ(m.base->f, 2);
  EXPECT_EQ(*m.u.valuation(), 0);
}

TEST(Model, TowerStepSigns) {
  RatMap phi = polynomial_map(P({2, 0, 1}));
  ConjugatedModel m = normalizing_model(phi, fixed_points(phi, 2), 2);
  TowerElem pi = TowerElem::from_rat(2, 2);
  Poly<TowerElem> h = tower_step_poly(m, pi);
  // p = 2: h(x) = f1(-x) + π g1(-x), constant term π
  EXPECT_TRUE((h.coeff(0) - pi).is_zero());
  EXPECT_TRUE((h.coeff(2) - TowerElem::from_rat(1, 2)).is_exact_zero());
  EXPECT_TRUE((h.coeff(1) + m.f1.coeff(1) - pi * m.g1.coeff(1)).is_zero());

  RatMap q = normalize_map(P({3, 0, 0, 2}), P({1, 3}));
  ConjugatedModel mq = normalizing_model(q, fixed_points(q, 3), 3);
  TowerElem p3 = TowerElem::from_rat(3, 3);
  Poly<TowerElem> hq = tower_step_poly(mq, p3);
  // p odd: h(x) = f1(x) - π g1(x), constant term -π
  EXPECT_TRUE((hq.coeff(0) + p3).is_zero());
  EXPECT_TRUE((hq.coeff(1) - mq.f1.coeff(1) + p3 * mq.g1.coeff(1)).is_zero());
}

TEST(Tower, Example43DepthThree) {
  APFOptions opt;
  opt.depth = 3;
  APFResult r = build_apf_tower(example43(), 2, opt);
  const APFCertificate& c = r.certificate;
  EXPECT_TRUE(c.pass()) << c.first_failure;
  ASSERT_EQ(c.levels.size(), 3u);
  for (const auto& l : c.levels) {
    EXPECT_EQ(l.qn, 64);
    EXPECT_EQ(l.slope, Rat(-1, 64));
    EXPECT_TRUE(l.norm_exact);
    EXPECT_TRUE(l.replay_ok);
    EXPECT_TRUE(l.conjugation_replay_ok);
  }
  ASSERT_TRUE(c.epsilon.has_value());
  EXPECT_GE(*c.epsilon, 1);
  EXPECT_TRUE(c.coefficients_level_independent);
  EXPECT_EQ(ramification_index(r.levels.back()), 64 * 64 * 64);
  EXPECT_TRUE(r.basepoint.is_exact_zero() || r.basepoint.scalar().to_rat() == 0);
  EXPECT_TRUE(basepoint_maps_to_start(r));
}

TEST(Tower, XSquaredPlusTwo) {
  APFOptions opt;
  opt.depth = 4;
  APFResult r = build_apf_tower(polynomial_map(P({2, 0, 1})), 2, opt);
  const APFCertificate& c = r.certificate;
  EXPECT_TRUE(c.pass()) << c.first_failure;
  EXPECT_TRUE(c.q_constant);
  ASSERT_EQ(c.levels.size(), 4u);
  for (const auto& l : c.levels) {
    EXPECT_EQ(l.qn, 2);
    EXPECT_TRUE(l.norm_ok);
  }
  EXPECT_GE(*c.epsilon, 1);
  EXPECT_EQ(ramification_index(r.levels.back()), 16);
  for (std::size_t n = 1; n < r.uniformizers.size(); ++n)
    EXPECT_TRUE((norm_step(r.uniformizers[n], r.levels[n - 1]) - r.uniformizers[n - 1]).is_zero());
  EXPECT_TRUE(basepoint_maps_to_start(r));
}

TEST(Tower, XSquaredPlusOne) {
  APFOptions opt;
  opt.depth = 3;
  APFResult r = build_apf_tower(polynomial_map(P({1, 0, 1})), 2, opt);
  EXPECT_EQ(r.powerlike.m, 2);
  EXPECT_EQ(r.powerlike.r, 2);
  EXPECT_TRUE(r.certificate.pass()) << r.certificate.first_failure;
  EXPECT_EQ(r.certificate.levels.size(), 3u);
  EXPECT_TRUE(basepoint_maps_to_start(r));
}

TEST(Tower, RationalMapsOverQ2AndQ3) {
  APFOptions opt;
  opt.depth = 3;
  APFResult a = build_apf_tower(normalize_map(P({2, 0, 1}), P({1, 0, 2})), 2, opt);
  EXPECT_TRUE(a.certificate.pass()) << a.certificate.first_failure;
  EXPECT_TRUE(basepoint_maps_to_start(a));

  APFResult b = build_apf_tower(normalize_map(P({3, 0, 0, 2}), P({1, 3})), 3, opt);
  EXPECT_TRUE(b.certificate.pass()) << b.certificate.first_failure;
  EXPECT_NE(b.certificate.base_field.find("inert"), std::string::npos);
  EXPECT_FALSE(b.certificate.coefficients_level_independent);
  EXPECT_TRUE(basepoint_maps_to_start(b));
}

TEST(Tower, ReplayDetectsWrongSign) {
  APFOptions opt;
  opt.depth = 2;
  RatMap phi = polynomial_map(P({2, 0, 1}));
  APFResult r = build_apf_tower(phi, 2, opt);
  TowerElem pi2 = r.uniformizers[1], pi1 = r.uniformizers[0];
  TowerElem good = detail::conjugation_residual(phi, r.model, -pi2, -pi1, 60);
  TowerElem bad = detail::conjugation_residual(phi, r.model, pi2, pi1, 60);
  EXPECT_TRUE(good.is_zero());
  EXPECT_FALSE(bad.is_zero());

  ConjugatedModel tampered = r.model;
  tampered.u = TowerElem::from_rat(3, 2);
  EXPECT_FALSE(detail::conjugation_residual(phi, tampered, -pi2, -pi1, 60).is_zero());
}

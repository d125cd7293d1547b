#include <gtest/gtest.h>

#include <random>

#include "iterx/ramification.hpp"

using namespace iterx;

namespace {

Poly<Rat> P(std::initializer_list<long> c) { return rat_poly(c); }

PAdic Z(long n, long p) { return PAdic::from_int(n, p); }

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::InvalidInput;
}

long naive_val(long n, long p) {
  long v = 0;
  while (n % p == 0) {
    n /= p;
    ++v;
  }
  return v;
}

// Roots of f in Z/2^k with positive valuation, by exhaustive search.
std::vector<long> brute_roots(const std::vector<long>& f, long mod) {
  std::vector<long> out;
  for (long x = 0; x < mod; x += 2) {
    __int128 acc = 0;
    for (auto it = f.rbegin(); it != f.rend(); ++it) acc = (acc * x + *it) % mod;
    if ((acc % mod + mod) % mod == 0) out.push_back(x);
  }
  return out;
}

// Lower break of σ_a on Q_p(ζ_{p^n}): p^{v_p(a-1)} - 1, with 0 when a != 1 mod p.
std::vector<std::pair<Rat, int>> serre_breaks(long p, int n) {
  long q = 1;
  for (int k = 0; k < n; ++k) q *= p;
  std::map<long, int> count;
  for (long a = 2; a < q; ++a) {
    if (a % p == 0) continue;
    long k = 0, t = a - 1;
    while (t % p == 0 && k < n) {
      t /= p;
      ++k;
    }
    long pk = 1;
    for (long s = 0; s < k; ++s) pk *= p;
    ++count[pk - 1];
  }
  std::vector<std::pair<Rat, int>> out;
  for (auto [b, c] : count) out.emplace_back(Rat(b), c);
  return out;
}

}  // namespace

TEST(PAdic, ValuationAndArithmetic) {
  EXPECT_EQ(*Z(12, 2).valuation(), 2);
  EXPECT_EQ(*PAdic::from_rat(Rat(5, 24), 2).valuation(), -3);
  std::mt19937 rng(7);
  std::uniform_int_distribution<long> d(1, 100000);
  for (long p : {2L, 3L, 5L}) {
    for (int t = 0; t < 50; ++t) {
      long a = d(rng), b = d(rng);
      PAdic x = PAdic::from_int(a, p, 40), y = PAdic::from_int(b, p, 40);
      EXPECT_EQ(*(x * y).valuation(), naive_val(a, p) + naive_val(b, p));
      EXPECT_EQ(*(x * y).valuation(), *x.valuation() + *y.valuation());
      EXPECT_TRUE((x * y - PAdic::from_int(a * b, p)).is_zero());
      EXPECT_TRUE(((x / y) * y - x).is_zero());
    }
  }
}

TEST(PAdic, PrecisionIsTrackedPessimistically) {
  PAdic x = PAdic::from_rat(Rat(1, 3), 2, 20);
  EXPECT_EQ(x.absprec(), 20);
  PAdic y = x * Z(4, 2);
  EXPECT_EQ(*y.valuation(), 2);
  EXPECT_EQ(y.absprec(), 22);  // relative precision is kept
  PAdic s = x + PAdic::from_rat(Rat(-1, 3), 2, 30);
  EXPECT_TRUE(s.is_zero());
  EXPECT_FALSE(s.is_exact_zero());
  EXPECT_EQ(s.absprec(), 20);
  EXPECT_TRUE(Z(6, 2).is_exact());
  EXPECT_EQ(rational_reconstruction(PAdic::from_rat(Rat(5, 3), 2, 40)).value(), Rat(5, 3));
}

TEST(PAdic, DivisionByZeroToPrecision) {
  EXPECT_EQ(code_of([] { PAdic::zero(2, 10).inverse(); }), ErrorCode::DivisionByZeroToPrecision);
  EXPECT_EQ(code_of([] { (void)(Z(1, 3) / (PAdic::from_int(9, 3, 2))); }), ErrorCode::DivisionByZeroToPrecision);
}

TEST(PAdic, SquareRootOfUnit) {
  PAdic r = sqrt_unit(PAdic::from_int(17, 2, 60));
  EXPECT_TRUE((r * r - Z(17, 2)).is_zero());
  EXPECT_GE(r.absprec(), 58);
  PAdic s = sqrt_unit(PAdic::from_int(7, 3, 40));
  EXPECT_TRUE((s * s - Z(7, 3)).is_zero());
  EXPECT_EQ(sqrt_unit(PAdic::from_rat(Rat(9, 4), 5)).to_rat() * sqrt_unit(PAdic::from_rat(Rat(9, 4), 5)).to_rat(), Rat(9, 4));
  EXPECT_THROW(sqrt_unit(Z(3, 2)), Error);
  EXPECT_THROW(sqrt_unit(Z(2, 3)), Error);
}

TEST(NewtonPolygon, Examples) {
  auto a = newton_polygon(padic_poly(P({-2, 0, 1}), 2));
  ASSERT_TRUE(a.single_segment());
  EXPECT_EQ(a.segments[0].slope, Rat(-1, 2));
  EXPECT_EQ(a.vertices, (std::vector<std::pair<int, Rat>>{{0, Rat(1)}, {2, Rat(0)}}));

  auto b = newton_polygon(padic_poly(P({2, 1, 1}), 2));
  ASSERT_EQ(b.segments.size(), 2u);
  EXPECT_EQ(b.segments[0].slope, Rat(-1));
  EXPECT_EQ(b.segments[1].slope, Rat(0));
  EXPECT_EQ(b.segments[0].length + b.segments[1].length, 2);

  auto c = newton_polygon(padic_poly(P({2, 2, 0, 1}), 2));
  ASSERT_TRUE(c.single_segment());
  EXPECT_EQ(c.segments[0].slope, Rat(-1, 3));
}

TEST(NewtonPolygon, AmbiguousVertexNeedsMorePrecision) {
  // coefficient of x is O(2^1): it might sit below the hull (0,3)-(2,0)
  Poly<PAdic> f({Z(8, 2), PAdic::zero(2, 1), Z(1, 2)});
  EXPECT_EQ(code_of([&] { newton_polygon(f); }), ErrorCode::PrecisionExhausted);
  Poly<PAdic> g({Z(2, 2), PAdic::zero(2, 5), Z(1, 2)});
  EXPECT_EQ(newton_polygon(g).segments.size(), 1u);
}

TEST(Hensel, Examples) {
  EXPECT_EQ(hensel_root(padic_poly(P({-5, 1}), 3), Z(2, 3)).to_rat(), Rat(5));
  EXPECT_TRUE(hensel_root(padic_poly(P({-5, 1}), 3), Z(2, 3)).is_exact());

  PAdic r = hensel_root(padic_poly(P({-17, 0, 1}), 2), Z(1, 2));
  EXPECT_TRUE((r * r - Z(17, 2)).is_zero());
  EXPECT_EQ(*r.valuation(), 0);

  PAdic g = hensel_root(padic_poly(P({2, -1, 1}), 2), Z(2, 2));
  Int rep = g.unit_mod(g.relprec()) * 2;
  EXPECT_EQ(mpz_fdiv_ui(rep.get_mpz_t(), 8), 6u);
  // brute force: the unique root with positive valuation modulo 2^16
  auto roots = brute_roots({2, -1, 1}, 1L << 16);
  ASSERT_EQ(roots.size(), 1u);
  EXPECT_EQ(mpz_fdiv_ui(rep.get_mpz_t(), 1UL << 16), static_cast<unsigned long>(roots[0]));
}

TEST(Hensel, ConditionFailure) {
  EXPECT_EQ(code_of([] { hensel_root(padic_poly(P({-2, 0, 1}), 2), Z(0, 2)); }), ErrorCode::HenselConditionFailed);
  EXPECT_EQ(code_of([] { hensel_root(padic_poly(P({1, 0, 1}), 2), Z(1, 2)); }), ErrorCode::HenselConditionFailed);
}

TEST(Hensel, RootValuationMatchesSegment) {
  std::mt19937 rng(11);
  for (long p : {2L, 3L}) {
    std::uniform_int_distribution<long> c(-40, 40);
    for (int t = 0; t < 40; ++t) {
      std::vector<Rat> co(5);
      for (auto& x : co) x = c(rng);
      if (co[0] == 0) co[0] = p;
      co[4] = 1;
      Poly<PAdic> f = padic_poly(Poly<Rat>(co), p);
      NewtonPolygon np = newton_polygon(f);
      for (long s = 0; s < p * p * p; ++s) {
        PAdic seed = Z(s, p);
        PAdic fs = f.eval(seed), ds = f.derivative().eval(seed);
        if (ds.is_zero() || (!fs.is_zero() && *fs.valuation() <= 2 * *ds.valuation())) continue;
        PAdic root = hensel_root(f, seed);
        EXPECT_TRUE(f.eval(root).is_zero());
        if (root.is_zero()) continue;
        EXPECT_TRUE(np.segment_for_root_valuation(Rat(*root.valuation())).has_value());
      }
    }
  }
}

TEST(Tower, PushEisenstein) {
  LevelPtr L = push_eisenstein(nullptr, P({-2, 0, 1}), 2);
  EXPECT_EQ(L->e, 2);
  EXPECT_EQ(L->degree, 2);
  TowerElem pi = TowerElem::generator(L);
  EXPECT_EQ(*pi.valuation(), Rat(1, 2));
  EXPECT_TRUE((pi * pi - TowerElem::from_rat(2, 2)).is_exact_zero());
  EXPECT_EQ(code_of([] { push_eisenstein(nullptr, P({-1, 0, 1}), 2); }), ErrorCode::NotEisenstein);
  EXPECT_EQ(code_of([] { push_eisenstein(nullptr, P({4, 0, 1}), 2); }), ErrorCode::NotEisenstein);
  EXPECT_EQ(code_of([] { push_eisenstein(nullptr, P({-2, 0, 2}), 2); }), ErrorCode::NotEisenstein);
  LevelPtr M = push_eisenstein(L, Poly<TowerElem>({-pi, TowerElem::from_rat(0, 2), TowerElem::from_rat(1, 2)}));
  EXPECT_EQ(M->e, 4);
  EXPECT_EQ(*TowerElem::generator(M).valuation(), Rat(1, 4));
}

TEST(Tower, NormMatchesClosedForm) {
  LevelPtr L = push_eisenstein(nullptr, P({-2, 0, 1}), 2);
  TowerElem pi = TowerElem::generator(L);
  std::mt19937 rng(3);
  std::uniform_int_distribution<long> d(-50, 50);
  for (int t = 0; t < 20; ++t) {
    long a = d(rng), b = d(rng);
    if (a == 0 && b == 0) continue;
    TowerElem x = TowerElem::from_rat(a, 2) + TowerElem::from_rat(b, 2) * pi;
    TowerElem n = norm_step(x, L);
    ASSERT_TRUE(n.is_scalar());
    EXPECT_EQ(n.scalar().to_rat(), Rat(a * a - 2 * b * b));  // N(a + b sqrt2) = a^2 - 2b^2
  }
}

TEST(Tower, NormOfUniformizerAndUnits) {
  LevelPtr L = push_eisenstein(nullptr, P({2, 2, 0, 1}), 2);
  TowerElem pi = TowerElem::generator(L);
  EXPECT_EQ(norm_step(pi).scalar().to_rat(), Rat(-2));  // (-1)^3 g(0)
  TowerElem u = TowerElem::from_rat(1, 2) + pi;
  EXPECT_EQ(*norm_step(u).valuation(), 0);
  EXPECT_EQ(*norm_step(pi * pi + pi).valuation(), 1);  // N(pi) N(1 + pi)
}

TEST(Tower, NormIsMultiplicative) {
  auto levels = cyclotomic_tower(2, 3);
  TowerElem z1 = TowerElem::generator(levels[1]), z2 = TowerElem::generator(levels[2]);
  std::mt19937 rng(5);
  std::uniform_int_distribution<long> d(-9, 9);
  for (int t = 0; t < 10; ++t) {
    TowerElem x = TowerElem::from_rat(d(rng), 2) + TowerElem::from_rat(d(rng), 2) * z2 + z1 * TowerElem::from_rat(d(rng), 2);
    TowerElem y = TowerElem::from_rat(d(rng) | 1, 2) + z2 * z2 * TowerElem::from_rat(d(rng), 2) + z1;
    TowerElem lhs = norm_step(x * y, levels[2]);
    TowerElem rhs = norm_step(x, levels[2]) * norm_step(y, levels[2]);
    EXPECT_TRUE((lhs - rhs).is_zero());
  }
}

TEST(Tower, InverseAndInertLevel) {
  auto levels = cyclotomic_tower(3, 2);
  TowerElem z = TowerElem::generator(levels[1]);
  TowerElem x = TowerElem::from_rat(2, 3) + z + z * z;
  EXPECT_TRUE((x * tower_inverse(x) - TowerElem::from_rat(1, 3)).is_zero());
  LevelPtr W = push_inert(P({1, 0, 1}), 3);  // F_9 = F_3[i]
  EXPECT_EQ(W->f, 2);
  TowerElem w = TowerElem::generator(W);
  EXPECT_EQ(*(w + TowerElem::from_rat(3, 3)).valuation(), 0);
  EXPECT_THROW(push_inert(P({1, 0, 1}), 2), Error);
  EXPECT_EQ(code_of([] { tower_inverse(TowerElem(PAdic::zero(2, 5))); }), ErrorCode::DivisionByZeroToPrecision);
}

TEST(Ramification, QuadraticExamples) {
  auto a = ramification_breaks(push_eisenstein(nullptr, P({-2, 0, 1}), 2));
  EXPECT_EQ(a.lower, (std::vector<std::pair<Rat, int>>{{Rat(2), 1}}));
  EXPECT_TRUE(a.galois_verified);
  auto b = ramification_breaks(push_eisenstein(nullptr, P({2, 2, 1}), 2));
  EXPECT_EQ(b.lower, (std::vector<std::pair<Rat, int>>{{Rat(1), 1}}));
  auto c = ramification_breaks(push_eisenstein(nullptr, P({-2, 1}), 2));
  EXPECT_TRUE(c.lower.empty());
}

TEST(Ramification, DirectConjugateForSqrtTwo) {
  // σ(π) = -π, so i(σ) = v(-2π) = 3 and the break is 2
  LevelPtr L = push_eisenstein(nullptr, P({-2, 0, 1}), 2);
  TowerElem pi = TowerElem::generator(L);
  EXPECT_EQ(*(-pi - pi).valuation() * Rat(L->e), Rat(3));
}

TEST(Ramification, CyclotomicOracleMatchesSerre) {
  for (long p : {2L, 3L, 5L})
    for (int n = 1; n <= (p == 5 ? 2 : 3); ++n) {
      SCOPED_TRACE(std::to_string(p) + "," + std::to_string(n));
      auto o = cyclotomic_oracle(p, n);
      EXPECT_EQ(o.lower, serre_breaks(p, n));
      EXPECT_TRUE(o.galois_verified);
    }
  EXPECT_EQ(cyclotomic_oracle(2, 3).lower, (std::vector<std::pair<Rat, int>>{{Rat(1), 2}, {Rat(3), 1}}));
  EXPECT_EQ(cyclotomic_oracle(2, 2).lower, (std::vector<std::pair<Rat, int>>{{Rat(1), 1}}));
}

TEST(Ramification, Q3Zeta3IsTame) {
  // σ(π) - π = π + π^2 has valuation 1, so the only break is 0
  EXPECT_EQ(cyclotomic_oracle(3, 1).lower, (std::vector<std::pair<Rat, int>>{{Rat(0), 1}}));
}

TEST(Ramification, PolygonAgreesWithOracle) {
  for (long p : {2L, 3L})
    for (int n = 1; n <= 3; ++n) {
      LevelPtr L = push_eisenstein(nullptr, shifted_cyclotomic(p, n), p);
      EXPECT_EQ(ramification_breaks(L).lower, cyclotomic_oracle(p, n).lower) << p << "," << n;
    }
}

TEST(Herbrand, SingleJump) {
  BreakData bd;
  bd.degree = 2;
  bd.lower = {{Rat(2), 1}};
  HerbrandFn h = HerbrandFn::from_breaks(bd);
  EXPECT_EQ(h(Rat(1)), Rat(1));
  EXPECT_EQ(h(Rat(2)), Rat(2));
  EXPECT_EQ(h(Rat(6)), Rat(4));
  EXPECT_EQ(h(Rat(-3)), Rat(-3));
  BreakData trivial;
  EXPECT_EQ(HerbrandFn::from_breaks(trivial), HerbrandFn::identity());
}

TEST(Herbrand, ShapeAndInverse) {
  for (long p : {2L, 3L})
    for (int n = 1; n <= 3; ++n) {
      HerbrandFn h = HerbrandFn::from_breaks(cyclotomic_oracle(p, n));
      HerbrandFn psi = h.inverse();
      EXPECT_EQ(h(Rat(0)), Rat(0));
      EXPECT_TRUE(h.is_concave());
      for (int k = 0; k <= 40; ++k) {
        Rat x(k, 3);
        x.canonicalize();
        EXPECT_EQ(h(psi(x)), x);
        EXPECT_EQ(psi(h(x)), x);
      }
    }
  // wild case: initial slope 1
  EXPECT_EQ(HerbrandFn::from_breaks(cyclotomic_oracle(2, 3)).slopes().front(), Rat(1));
}

TEST(Herbrand, TransitivityThroughQ2Zeta4) {
  auto T = cyclotomic_tower(2, 3);
  HerbrandFn top = HerbrandFn::from_breaks(ramification_breaks(T[2]));   // Q2(ζ8)/Q2(ζ4)
  HerbrandFn mid = HerbrandFn::from_breaks(ramification_breaks(T[1]));   // Q2(ζ4)/Q2
  HerbrandFn whole = HerbrandFn::from_breaks(cyclotomic_oracle(2, 3));   // Q2(ζ8)/Q2
  EXPECT_EQ(herbrand_compose(mid, top), whole);
  EXPECT_EQ(ramification_breaks(T[2]).lower, (std::vector<std::pair<Rat, int>>{{Rat(3), 1}}));
  // upper breaks of Q2(ζ8)/Q2 are 1 and 2
  EXPECT_EQ(upper_breaks(cyclotomic_oracle(2, 3)), (std::vector<Rat>{Rat(1), Rat(2)}));
}

TEST(Herbrand, TransitionInequality) {
  auto T = cyclotomic_tower(2, 3);
  HerbrandFn over_k = HerbrandFn::from_breaks(cyclotomic_oracle(2, 3));
  HerbrandFn over_kp = HerbrandFn::from_breaks(ramification_breaks(T[2]));
  EXPECT_TRUE(over_k.leq(over_kp));
  for (int k = 0; k <= 100; ++k) EXPECT_LE(over_k(Rat(k, 7)), over_kp(Rat(k, 7)));
  EXPECT_FALSE(over_kp.leq(over_k));
}

TEST(Herbrand, InvalidBreaks) {
  BreakData bd;
  bd.degree = 3;
  bd.lower = {{Rat(1), 1}};
  EXPECT_EQ(code_of([&] { HerbrandFn::from_breaks(bd); }), ErrorCode::InvalidBreaks);
  bd.lower = {{Rat(-1), 2}};
  EXPECT_EQ(code_of([&] { HerbrandFn::from_breaks(bd); }), ErrorCode::InvalidBreaks);
  bd.lower = {{Rat(2), 1}, {Rat(1), 1}};
  EXPECT_EQ(code_of([&] { HerbrandFn::from_breaks(bd); }), ErrorCode::InvalidBreaks);
}

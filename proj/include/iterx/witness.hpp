#pragma once

#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "iterx/dynamics.hpp"
#include "iterx/preimage.hpp"

namespace iterx {

struct Tolerances {
  double residual = 1e-12;
  double check = 1e-8;
  double witness = 1e-9;
  double trace = 1e-10;

  /// All tolerances multiplied by s, s in (0, 1].
  Tolerances scaled(double s) const {
    if (!(s > 0 && s <= 1)) fail(ErrorCode::InvalidInput, "tolerance scale must lie in (0, 1]");
    return {residual * s, check * s, witness * s, trace * s};
  }
};

namespace detail {

inline double rel_dist(Complex a, Complex b) { return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b))); }

/// Splits a multiset of points into orbits {z, w z, w^2 z, ...} under
/// multiplication by w = exp(2 pi i / m). Returns empty if some orbit is incomplete.
inline std::vector<std::vector<int>> zeta_orbits(const std::vector<Complex>& pts, int m, double tol) {
  const Complex w = std::polar(1.0, 2 * M_PI / m);
  std::vector<bool> used(pts.size(), false);
  std::vector<std::vector<int>> orbits;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (used[i]) continue;
    std::vector<int> orbit{static_cast<int>(i)};
    used[i] = true;
    Complex target = pts[i];
    for (int k = 1; k < m; ++k) {
      target *= w;
      int best = -1;
      double bd = tol;
      for (std::size_t j = 0; j < pts.size(); ++j) {
        if (used[j]) continue;
        double dd = rel_dist(pts[j], target);
        if (dd <= bd) {
          bd = dd;
          best = static_cast<int>(j);
        }
      }
      if (best < 0) return {};
      used[static_cast<std::size_t>(best)] = true;
      orbit.push_back(best);
    }
    orbits.push_back(std::move(orbit));
  }
  return orbits;
}

}  // namespace detail

struct PowerStructureReport {
  int m = 0;
  int d = 0;
  Complex alpha;
  std::vector<CertifiedRoot> roots;
  std::vector<std::vector<Complex>> orbits;
  Complex product, expected_product;            // prod roots, (-1)^(d+1) c alpha
  Complex rep_product_power, expected_rep_power;  // (prod reps)^m, (-1)^((m+d)/m) c alpha
  bool orbits_ok = false, product_ok = false, rep_product_ok = false;
  double max_error = 0;
  std::string failed_check;

  bool ok() const { return orbits_ok && product_ok && rep_product_ok; }
};

/// Checks the orbit structure and the two product identities for the roots
/// of h = f - alpha g, where phi = f/g lies in K(x^m), f(0) = 0 and deg f > deg g.
inline PowerStructureReport verify_power_structure(const RatMap& phi, Complex alpha, int m, const Tolerances& tol = {},
                                                   bool throw_on_failure = true) {
  if (m < 2 || power_composite_order(phi) % m != 0)
    fail(ErrorCode::NotPowerComposite, "map is not in K(x^" + std::to_string(m) + ")");
  if (phi.num.coeff(0) != 0) fail(ErrorCode::NotPowerComposite, "phi(0) != 0");
  if (phi.num.degree() <= phi.den.degree()) fail(ErrorCode::NotPowerComposite, "phi(inf) != inf");
  if (alpha == Complex(0)) fail(ErrorCode::InvalidInput, "alpha must be nonzero");

  PowerStructureReport rep;
  rep.m = m;
  rep.d = phi.degree();
  rep.alpha = alpha;
  const Rat lc = phi.num.leading();
  auto conv = [&lc](const Rat& c) { return Complex(Rat(c / lc).get_d()); };
  Poly<Complex> f = phi.num.map<Complex>(conv), g = phi.den.map<Complex>(conv);
  const Complex c = Rat(phi.den.coeff(0) / lc).get_d();
  Poly<Complex> h = f - alpha * g;
  RootOptions ro;
  ro.residual_tol = tol.residual;
  rep.roots = roots_certified(h, ro);

  std::vector<Complex> pts;
  for (const auto& r : rep.roots)
    for (int k = 0; k < r.multiplicity; ++k) pts.push_back(r.z);
  auto orbits = detail::zeta_orbits(pts, m, tol.check);
  rep.orbits_ok = !orbits.empty() && static_cast<int>(orbits.size()) * m == rep.d;

  rep.product = 1;
  for (const auto& z : pts) rep.product *= z;
  const int d = rep.d;
  rep.expected_product = ((d + 1) % 2 == 0 ? 1.0 : -1.0) * c * alpha;
  double e1 = detail::rel_dist(rep.product, rep.expected_product);
  rep.product_ok = e1 <= tol.check;
  rep.max_error = e1;

  rep.expected_rep_power = (((m + d) / m) % 2 == 0 ? 1.0 : -1.0) * c * alpha;
  if (rep.orbits_ok) {
    Complex reps = 1;
    for (const auto& o : orbits) {
      std::vector<Complex> pts_o;
      for (int i : o) pts_o.push_back(pts[static_cast<std::size_t>(i)]);
      rep.orbits.push_back(pts_o);
      reps *= pts_o.front();
    }
    rep.rep_product_power = std::pow(reps, m);
    double e2 = detail::rel_dist(rep.rep_product_power, rep.expected_rep_power);
    rep.rep_product_ok = e2 <= tol.check;
    rep.max_error = std::max(rep.max_error, e2);
  }
  if (!rep.orbits_ok) rep.failed_check = "orbit partition";
  else if (!rep.product_ok) rep.failed_check = "product of roots";
  else if (!rep.rep_product_ok) rep.failed_check = "orbit representative product";
  if (throw_on_failure && !rep.ok()) fail(ErrorCode::ToleranceExceeded, rep.failed_check + " check failed");
  return rep;
}

/// Expression over preimage-tree nodes.
struct WitnessExpr {
  enum class Kind { Leaf, Sum, Product, Quotient, Power };
  Kind kind = Kind::Leaf;
  int node = -1;          // Leaf: preimage tree node id
  std::vector<int> args;  // indices into UnityWitness::expr
  long exponent = 1;      // Power
};

inline const char* to_string(WitnessExpr::Kind k) {
  switch (k) {
    case WitnessExpr::Kind::Leaf: return "leaf";
    case WitnessExpr::Kind::Sum: return "sum";
    case WitnessExpr::Kind::Product: return "product";
    case WitnessExpr::Kind::Quotient: return "quotient";
    case WitnessExpr::Kind::Power: return "power";
  }
  return "?";
}

struct WitnessLeaf {
  int node = 0;
  int level = 0;
  int parent = -1;
  Complex z;
};

struct UnityWitness {
  std::string target;  // e.g. "exp(2*pi*i/4)" or "2*cos(2*pi/4)"
  int m = 0;           // base of the root of unity
  int j = 0;           // exponent: order m^j
  Complex target_value;
  std::vector<WitnessExpr> expr;
  int root = -1;
  std::vector<WitnessLeaf> leaves;
  int level = 0;
  int level_bound = 0;  // r*j for root-of-unity witnesses
  int period_lcm = 0;
  Complex value;
  double numeric_error = 0;

  int add(WitnessExpr e) {
    expr.push_back(std::move(e));
    return static_cast<int>(expr.size()) - 1;
  }

  Complex leaf_value(int node) const {
    for (const auto& l : leaves)
      if (l.node == node) return l.z;
    fail(ErrorCode::InvalidInput, "witness refers to unknown node " + std::to_string(node));
  }

  /// Replays the expression from the recorded leaf approximations.
  Complex evaluate(int at = -1) const {
    const WitnessExpr& e = expr[static_cast<std::size_t>(at < 0 ? root : at)];
    switch (e.kind) {
      case WitnessExpr::Kind::Leaf: return leaf_value(e.node);
      case WitnessExpr::Kind::Sum: {
        Complex s = 0;
        for (int a : e.args) s += evaluate(a);
        return s;
      }
      case WitnessExpr::Kind::Product: {
        Complex s = 1;
        for (int a : e.args) s *= evaluate(a);
        return s;
      }
      case WitnessExpr::Kind::Quotient: return evaluate(e.args.at(0)) / evaluate(e.args.at(1));
      case WitnessExpr::Kind::Power: {
        Complex b = evaluate(e.args.at(0)), s = 1;
        for (long k = 0; k < e.exponent; ++k) s *= b;
        return s;
      }
    }
    return 0;
  }
};

namespace detail {

inline long ipow_long(long b, int e) {
  long r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

inline void record_leaf(UnityWitness& w, const PreimageTree& t, int id) {
  for (const auto& l : w.leaves)
    if (l.node == id) return;
  const auto& n = t.node(id);
  w.leaves.push_back({id, n.level, n.parent, n.z});
}

/// Leaf nodes of a Product expression, with repetition for multiplicity.
struct NodeProduct {
  std::vector<int> nodes;
};

}  // namespace detail

struct WitnessHypotheses {
  int r = 0;  // lcm of the periods of 0 and infinity
  int period0 = 0, period_inf = 0;
};

/// Checks the corollary's hypotheses for psi in K(x^m); throws HypothesisFailure.
inline WitnessHypotheses check_witness_hypotheses(const RatMap& psi, const ProjPoint<Rat>& b, int m,
                                                  const OrbitBounds& bounds) {
  if (m < 2) fail(ErrorCode::HypothesisFailure, "m must be at least 2");
  if (power_composite_order(psi) % m != 0)
    fail(ErrorCode::HypothesisFailure, "map is not in K(x^" + std::to_string(m) + ")");
  auto o0 = detect_period(psi, Rat(0), bounds);
  auto oi = detect_period(psi, std::nullopt, bounds);
  if (o0.escaped || o0.preperiod != 0) fail(ErrorCode::HypothesisFailure, "0 is not periodic");
  if (oi.escaped || oi.preperiod != 0) fail(ErrorCode::HypothesisFailure, "infinity is not periodic");
  if (is_exceptional(psi, b)) fail(ErrorCode::HypothesisFailure, "basepoint is exceptional");
  WitnessHypotheses h;
  h.period0 = o0.period;
  h.period_inf = oi.period;
  h.r = std::lcm(o0.period, oi.period);
  return h;
}

/// Builds an expression over preimages of b whose value is exp(2 pi i / m^j).
/// If mu is given, the construction runs for mu o phi o mu^-1 and mu(b).
inline UnityWitness witness_root_of_unity(const RatMap& phi, const ProjPoint<Rat>& b, int m, int j,
                                          const std::optional<Mobius<Rat>>& mu = std::nullopt,
                                          const Tolerances& tol = {}, const OrbitBounds& bounds = {}) {
  if (j < 1) fail(ErrorCode::InvalidInput, "j must be at least 1");
  RatMap psi = mu ? conjugate(phi, *mu) : phi;
  ProjPoint<Rat> base = mu ? (*mu)(b) : b;
  auto hyp = check_witness_hypotheses(psi, base, m, bounds);
  const int r = hyp.r;

  // Least level holding a node outside {0, inf}. Each level below it is {0, inf}-only,
  // and since b is not exceptional such a level exists within two steps.
  auto usable = [](const PreimageNode& n) { return !n.infinite && !(n.exact && *n.exact == 0); };
  PreimageOptions popt;
  popt.roots.residual_tol = tol.residual;
  int k = 0;
  for (int depth = 1; depth <= 3 && k == 0; ++depth) {
    PreimageTree probe(psi, base, depth, popt);
    for (int id : probe.level(depth))
      if (usable(probe.node(id))) {
        k = depth;
        break;
      }
  }
  if (k == 0) fail(ErrorCode::HypothesisFailure, "no preimage outside {0, inf} within three levels");
  const int depth = k + r * (j - 1);
  PreimageTree tree(psi, base, depth, popt);

  UnityWitness w;
  w.m = m;
  w.j = j;
  w.period_lcm = r;
  w.level_bound = r * j;
  const long order = detail::ipow_long(m, j);
  w.target = "exp(2*pi*i/" + std::to_string(order) + ")";
  w.target_value = std::polar(1.0, 2 * M_PI / static_cast<double>(order));

  // Step 1: zeta_m = (zeta alpha) / alpha with both in one fiber.
  int alpha = -1;
  for (int id : tree.level(k))
    if (usable(tree.node(id))) {
      alpha = id;
      break;
    }
  const Complex za = tree.node(alpha).z;
  const Complex want = std::polar(1.0, 2 * M_PI / m);
  int sibling = -1;
  double best = tol.check;
  for (int id : tree.children(tree.node(alpha).parent)) {
    if (tree.node(id).infinite) continue;
    double dd = std::abs(tree.node(id).z / za - want);
    if (dd <= best) {
      best = dd;
      sibling = id;
    }
  }
  if (sibling < 0) fail(ErrorCode::ToleranceExceeded, "no sibling zeta*alpha found in the fiber");

  std::vector<int> num{sibling}, den{alpha};
  w.level = k;

  // Steps 2..j: replace each node a by the orbit representatives of Phi^-1(a), Phi = psi^r.
  auto reps_of = [&](int a) {
    std::vector<int> desc = tree.descendants(a, r);
    std::vector<Complex> pts;
    std::vector<int> ids;
    for (int id : desc) {
      const auto& n = tree.node(id);
      if (n.infinite) fail(ErrorCode::ToleranceExceeded, "unexpected infinite preimage");
      long mult = n.multiplicity / tree.node(a).multiplicity;
      for (long t = 0; t < mult; ++t) {
        pts.push_back(n.z);
        ids.push_back(id);
      }
    }
    auto orbits = detail::zeta_orbits(pts, m, tol.check);
    if (orbits.empty()) fail(ErrorCode::ToleranceExceeded, "preimages do not split into zeta_m-orbits");
    std::vector<int> reps;
    for (const auto& o : orbits) {
      int pick = o.front();
      for (int i : o)
        if (detail::lex_less(pts[static_cast<std::size_t>(i)], pts[static_cast<std::size_t>(pick)])) pick = i;
      reps.push_back(ids[static_cast<std::size_t>(pick)]);
    }
    return reps;
  };
  for (int t = 2; t <= j; ++t) {
    std::vector<int> nn, dd;
    for (int a : num)
      for (int x : reps_of(a)) nn.push_back(x);
    for (int a : den)
      for (int x : reps_of(a)) dd.push_back(x);
    num = std::move(nn);
    den = std::move(dd);
    w.level += r;
  }

  auto product = [&](const std::vector<int>& ids) {
    WitnessExpr p;
    p.kind = WitnessExpr::Kind::Product;
    for (int id : ids) {
      detail::record_leaf(w, tree, id);
      WitnessExpr leaf;
      leaf.node = id;
      p.args.push_back(w.add(leaf));
    }
    return w.add(p);
  };
  WitnessExpr q;
  q.kind = WitnessExpr::Kind::Quotient;
  q.args = {product(num), product(den)};
  w.root = w.add(q);

  // The quotient is some primitive root of order m^j; a power makes it the standard one.
  Complex raw = w.evaluate();
  double turns = std::arg(raw) / (2 * M_PI);
  long kk = std::lround(turns * static_cast<double>(order));
  kk = ((kk % order) + order) % order;
  if (std::gcd(kk, order) != 1) fail(ErrorCode::ToleranceExceeded, "quotient is not a primitive root of unity");
  long e = 1;
  while ((e * kk) % order != 1) ++e;
  if (e != 1) {
    WitnessExpr pw;
    pw.kind = WitnessExpr::Kind::Power;
    pw.exponent = e;
    pw.args = {w.root};
    w.root = w.add(pw);
  }
  w.value = w.evaluate();
  w.numeric_error = std::abs(w.value - w.target_value);
  if (w.numeric_error > tol.witness)
    fail(ErrorCode::ToleranceExceeded, "witness error " + std::to_string(w.numeric_error));
  return w;
}

/// v(zeta_{d^n}) = (v(zeta gamma) + v(zeta^-1 gamma)) / v(gamma) with every term a node of T_d^-n(b).
inline UnityWitness chebyshev_trace_witness(int d, const Rat& b, int n, const Tolerances& tol = {}) {
  if (d < 2 || n < 1) fail(ErrorCode::InvalidInput, "need d >= 2 and n >= 1");
  const long N = detail::ipow_long(d, n);
  const Complex zeta = std::polar(1.0, 2 * M_PI / static_cast<double>(N));
  const double bd = b.get_d();
  const Complex bprime = (bd + std::sqrt(Complex(bd * bd - 4))) / 2.0;
  auto v = [](Complex x) { return x + 1.0 / x; };
  Complex gamma = std::pow(bprime, 1.0 / static_cast<double>(N));
  bool found = false;
  for (long k = 0; k < N; ++k) {
    Complex g = gamma * std::pow(zeta, static_cast<double>(k));
    if (std::abs(v(g)) > 1e-6) {
      gamma = g;
      found = true;
      break;
    }
  }
  if (!found) fail(ErrorCode::DegenerateLift, "v(gamma) vanishes for every lift");

  PreimageOptions popt;
  popt.roots.residual_tol = tol.residual;
  PreimageTree tree(polynomial_map(chebyshev(d)), b, n, popt);
  auto nearest = [&](Complex target) {
    int bestid = -1;
    double bestd = 1e300;
    for (int id : tree.level(n)) {
      double dd = detail::rel_dist(tree.node(id).z, target);
      if (dd < bestd) {
        bestd = dd;
        bestid = id;
      }
    }
    if (bestd > 1e-6) fail(ErrorCode::ToleranceExceeded, "no preimage node near a required trace");
    return bestid;
  };
  int na = nearest(v(zeta * gamma)), nb = nearest(v(gamma / zeta)), nc = nearest(v(gamma));

  UnityWitness w;
  w.m = d;
  w.j = n;
  w.level = n;
  w.level_bound = n;
  w.target = "2*cos(2*pi/" + std::to_string(N) + ")";
  w.target_value = 2 * std::cos(2 * M_PI / static_cast<double>(N));
  for (int id : {na, nb, nc}) detail::record_leaf(w, tree, id);
  WitnessExpr la, lb, lc;
  la.node = na;
  lb.node = nb;
  lc.node = nc;
  WitnessExpr sum;
  sum.kind = WitnessExpr::Kind::Sum;
  sum.args = {w.add(la), w.add(lb)};
  WitnessExpr q;
  q.kind = WitnessExpr::Kind::Quotient;
  q.args = {w.add(sum), w.add(lc)};
  w.root = w.add(q);
  w.value = w.evaluate();
  w.numeric_error = std::abs(w.value - w.target_value);
  if (w.numeric_error > tol.trace)
    fail(ErrorCode::ToleranceExceeded, "trace witness error " + std::to_string(w.numeric_error));
  return w;
}

/// Affine points of y^2 = x^3 + ax + b over C, with a flag for O.
struct CPoint {
  bool inf = false;
  Complex x, y;
};

class ComplexCurve {
 public:
  ComplexCurve(double a, double b) : a_(a), b_(b) {}

  CPoint add(const CPoint& P, const CPoint& Q) const {
    if (P.inf) return Q;
    if (Q.inf) return P;
    Complex lam;
    double scale = std::max({1.0, std::abs(P.x), std::abs(Q.x)});
    if (std::abs(P.x - Q.x) <= 1e-12 * scale) {
      if (std::abs(P.y + Q.y) <= 1e-9 * std::max(1.0, std::abs(P.y))) return {true, 0, 0};
      lam = (3.0 * P.x * P.x + a_) / (2.0 * P.y);
    } else {
      lam = (Q.y - P.y) / (Q.x - P.x);
    }
    Complex x3 = lam * lam - P.x - Q.x;
    return {false, x3, lam * (P.x - x3) - P.y};
  }

  CPoint mul(long n, CPoint P) const {
    CPoint acc{true, 0, 0};
    while (n > 0) {
      if (n & 1) acc = add(acc, P);
      n >>= 1;
      if (n) P = add(P, P);
    }
    return acc;
  }

  Complex rhs(Complex x) const { return x * x * x + a_ * x + b_; }

 private:
  double a_, b_;
};

struct LattesFiberReport {
  int d = 0, n = 0;
  long expected_count = 0;       // d^(2n)
  std::vector<CertifiedRoot> fiber;  // roots of the numerator of phi^n - x0
  std::vector<Complex> translates;   // x(B_n + T), T in E[d^n]
  long matched = 0;
  double max_distance = 0;
  int distinct_fiber = 0;
  bool ok = false;
};

/// Compares phi^-n(x0) with {x(B_n + T) : T in E[d^n]} where [d^n] B_n = B and x(B) = x0.
inline LattesFiberReport lattes_fiber_check(const Rat& a, const Rat& b, int d, const Rat& x0, int n,
                                            const Tolerances& tol = {}, bool throw_on_failure = true) {
  if (d < 2 || n < 0) fail(ErrorCode::InvalidInput, "need d >= 2 and n >= 0");
  LattesFiberReport rep;
  rep.d = d;
  rep.n = n;
  DivisionPolynomials dp(a, b);
  if (n == 0) {
    rep.expected_count = 1;
    rep.fiber.push_back({Complex(x0.get_d()), 0, 0, 1});
    rep.translates.push_back(Complex(x0.get_d()));
    rep.matched = 1;
    rep.distinct_fiber = 1;
    rep.ok = true;
    return rep;
  }
  const long N = detail::ipow_long(d, n);
  rep.expected_count = N * N;
  RatMap phin = iterate(lattes_multiplication_map(a, b, d), n);
  Poly<Rat> fib = phin.num - x0 * phin.den;
  RootOptions ro;
  ro.residual_tol = tol.residual;
  rep.fiber = roots_certified(fib, ro);
  rep.distinct_fiber = static_cast<int>(rep.fiber.size());

  ComplexCurve E(a.get_d(), b.get_d());
  // torsion: O, the 2-torsion when N is even, and +-y over each root of g_N
  std::vector<CPoint> torsion{{true, 0, 0}};
  if (N % 2 == 0)
    for (const auto& r : roots_certified(dp.curve_rhs(), ro)) torsion.push_back({false, r.z, 0});
  const Poly<Rat>& gN = dp.g(static_cast<int>(N));
  if (gN.degree() > 0)
    for (const auto& r : roots_certified(squarefree_part(gN), ro)) {
      Complex y = std::sqrt(E.rhs(r.z));
      torsion.push_back({false, r.z, y});
      torsion.push_back({false, r.z, -y});
    }
  if (static_cast<long>(torsion.size()) != N * N)
    fail(ErrorCode::ToleranceExceeded, "torsion enumeration found " + std::to_string(torsion.size()) + " points");

  const Complex xb = x0.get_d();
  const Complex yb = std::sqrt(E.rhs(xb));
  CPoint Bn{false, rep.fiber.front().z, std::sqrt(E.rhs(rep.fiber.front().z))};
  CPoint img = E.mul(N, Bn);
  if (img.inf || detail::rel_dist(img.x, xb) > 1e-6)
    fail(ErrorCode::ToleranceExceeded, "fiber root does not map to x0 under [d^n]");
  if (std::abs(img.y - yb) > std::abs(img.y + yb)) Bn.y = -Bn.y;

  std::vector<Complex> slots;
  for (const auto& r : rep.fiber)
    for (int k = 0; k < r.multiplicity; ++k) slots.push_back(r.z);
  std::vector<bool> used(slots.size(), false);
  for (const auto& T : torsion) {
    CPoint S = E.add(Bn, T);
    if (S.inf) continue;
    rep.translates.push_back(S.x);
    int bestid = -1;
    double bestd = 1e300;
    for (std::size_t i = 0; i < slots.size(); ++i) {
      if (used[i]) continue;
      double dd = detail::rel_dist(slots[i], S.x);
      if (dd < bestd) {
        bestd = dd;
        bestid = static_cast<int>(i);
      }
    }
    if (bestid >= 0 && bestd <= tol.check) {
      used[static_cast<std::size_t>(bestid)] = true;
      ++rep.matched;
    }
    rep.max_distance = std::max(rep.max_distance, bestd);
  }
  rep.ok = rep.matched == rep.expected_count && static_cast<long>(slots.size()) == rep.expected_count;
  if (throw_on_failure && !rep.ok)
    fail(ErrorCode::ToleranceExceeded, "fiber matched " + std::to_string(rep.matched) + " of " +
                                           std::to_string(rep.expected_count) + " points");
  return rep;
}

}  // namespace iterx

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "iterx/complex_roots.hpp"
#include "iterx/quadratic.hpp"
#include "iterx/rational_map.hpp"

namespace iterx {

struct OrbitReport {
  std::string point;
  int preperiod = 0;
  int period = 0;  // 0 when the orbit escaped before closing
  bool escaped = false;
  int escape_step = 0;
  std::string escape_reason;
  std::vector<std::string> orbit;  // forward orbit up to the first repeat or escape

  bool periodic() const { return !escaped && period > 0 && preperiod == 0; }
};

struct OrbitBounds {
  int max_points = 64;
  Int max_height = Int(1000000);
};

namespace detail {

inline Int point_height(const Rat& x) { return height(x); }
inline Int point_height(const QuadNumber& x) { return x.height(); }
inline std::string point_key(const Rat& x) { return x.get_str(); }
inline std::string point_key(const QuadNumber& x) { return x.str(); }

/// phi applied to a point of an extension S of Q.
template <class S>
ProjPoint<S> apply_over(const RatMap& phi, const ProjPoint<S>& x) {
  auto conv = [](const Rat& c) { return S(c); };
  if (!x) {
    int df = phi.num.degree(), dg = phi.den.degree();
    if (df > dg) return std::nullopt;
    if (df < dg) return S(Rat(0));
    return S(phi.num.leading() / phi.den.leading());
  }
  S g = phi.den.eval_with(*x, conv);
  S f = phi.num.eval_with(*x, conv);
  if (is_zero(g)) {
    if (is_zero(f)) fail(ErrorCode::IndeterminateValue, "0/0 in orbit; map is not in lowest terms");
    return std::nullopt;
  }
  return f / g;
}

}  // namespace detail

/// Exact forward orbit with cycle detection.
template <class S>
OrbitReport detect_period_over(const RatMap& phi, const ProjPoint<S>& start, const OrbitBounds& bounds) {
  OrbitReport rep;
  auto key = [](const ProjPoint<S>& x) { return x ? detail::point_key(*x) : std::string("inf"); };
  rep.point = key(start);
  std::map<std::string, int> seen;
  ProjPoint<S> x = start;
  for (int step = 0;; ++step) {
    std::string k = key(x);
    auto it = seen.find(k);
    if (it != seen.end()) {
      rep.preperiod = it->second;
      rep.period = step - it->second;
      return rep;
    }
    if (step >= bounds.max_points) {
      rep.escaped = true;
      rep.escape_step = step;
      rep.escape_reason = "more than " + std::to_string(bounds.max_points) + " distinct points";
      return rep;
    }
    if (x && detail::point_height(*x) > bounds.max_height) {
      rep.escaped = true;
      rep.escape_step = step;
      rep.escape_reason = "height above " + bounds.max_height.get_str();
      return rep;
    }
    seen.emplace(k, step);
    rep.orbit.push_back(k);
    x = detail::apply_over(phi, x);
  }
}

inline OrbitReport detect_period(const RatMap& phi, const ProjPoint<Rat>& point, const OrbitBounds& bounds = {}) {
  return detect_period_over<Rat>(phi, point, bounds);
}

/// Largest coefficient height of the map.
inline Int map_height(const RatMap& phi) {
  Int h = 1;
  for (const auto* p : {&phi.num, &phi.den})
    for (const auto& c : p->coeffs()) h = std::max(h, height(c));
  return h;
}

/// Default escape bounds: N = 64 points, H = max(10^6, 10 * height(phi)).
inline OrbitBounds default_bounds(const RatMap& phi, int n = 64) {
  OrbitBounds b;
  b.max_points = n;
  Int h = 10 * map_height(phi);
  b.max_height = h > Int(1000000) ? h : Int(1000000);
  return b;
}

/// Irreducible factor of the critical polynomial of degree one or two.
struct CriticalFactor {
  Poly<Rat> factor;  // monic
  int multiplicity = 1;
};

/// Splits a rational polynomial into linear and quadratic factors over Q.
/// Throws UnsupportedCriticalDegree if something of higher degree is left.
inline std::vector<CriticalFactor> small_factors(const Poly<Rat>& p) {
  std::vector<CriticalFactor> out;
  for (auto [rest, mult] : squarefree_decomposition(p)) {
    auto roots = roots_certified(rest);
    std::vector<bool> used(roots.size(), false);
    for (std::size_t i = 0; i < roots.size(); ++i) {
      auto q = recognize_rational_root(rest, roots[i].z);
      if (!q) continue;
      Poly<Rat> lin{-*q, Rat(1)};
      if (!divmod(rest, lin).second.is_zero()) continue;
      rest = divmod(rest, lin).first;
      used[i] = true;
      out.push_back({lin, mult});
    }
    Int lead = abs(primitive_part(rest).first.leading().get_num());
    for (std::size_t i = 0; i < roots.size() && rest.degree() > 0; ++i) {
      if (used[i]) continue;
      for (std::size_t j = i + 1; j < roots.size(); ++j) {
        if (used[j]) continue;
        Complex s = roots[i].z + roots[j].z, pr = roots[i].z * roots[j].z;
        if (std::abs(s.imag()) > 1e-6 * std::max(1.0, std::abs(s)) ||
            std::abs(pr.imag()) > 1e-6 * std::max(1.0, std::abs(pr)))
          continue;
        bool found = false;
        for (const auto& cs : convergents(s.real(), lead)) {
          for (const auto& cp : convergents(pr.real(), lead)) {
            Poly<Rat> quad{cp, -cs, Rat(1)};
            if (divmod(rest, quad).second.is_zero()) {
              rest = divmod(rest, quad).first;
              out.push_back({quad, mult});
              used[i] = used[j] = true;
              found = true;
              break;
            }
          }
          if (found) break;
        }
        if (found) break;
      }
    }
    if (rest.degree() > 0)
      fail(ErrorCode::UnsupportedCriticalDegree,
           "critical polynomial has a factor of degree > 2 over Q: " + to_string(make_monic(rest)));
  }
  return out;
}

/// The two roots of a monic irreducible quadratic x^2 + px + q in Q(sqrt D).
inline std::pair<QuadNumber, QuadNumber> quadratic_roots(const Poly<Rat>& quad) {
  Rat p = quad[1], q = quad[0];
  Rat disc = p * p - 4 * q;
  // sqrt(n/d) = sqrt(n d) / d
  Int D = disc.get_num() * disc.get_den();
  Rat scale = Rat(1) / (2 * Rat(disc.get_den()));
  QuadNumber r1(-p / 2, scale, D), r2(-p / 2, -scale, D);
  return {r1, r2};
}

struct PCFReport {
  std::vector<OrbitReport> orbits;
  bool pcf = false;
  int bound = 0;
  std::string verdict() const { return pcf ? "PCF" : "NotPCFWithin(" + std::to_string(bound) + ")"; }
};

inline PCFReport classify_pcf(const RatMap& phi, const OrbitBounds& bounds) {
  auto crit = critical_polynomial(phi);
  PCFReport rep;
  rep.bound = bounds.max_points;
  if (crit.infinity_critical()) rep.orbits.push_back(detect_period(phi, std::nullopt, bounds));
  if (crit.finite.degree() > 0) {
    for (const auto& cf : small_factors(crit.finite)) {
      if (cf.factor.degree() == 1) {
        rep.orbits.push_back(detect_period(phi, -cf.factor[0], bounds));
      } else {
        auto [r1, r2] = quadratic_roots(cf.factor);
        rep.orbits.push_back(detect_period_over<QuadNumber>(phi, r1, bounds));
        rep.orbits.push_back(detect_period_over<QuadNumber>(phi, r2, bounds));
      }
    }
  }
  rep.pcf = std::none_of(rep.orbits.begin(), rep.orbits.end(), [](const auto& o) { return o.escaped; });
  return rep;
}

inline PCFReport classify_pcf(const RatMap& phi, int n = 64) { return classify_pcf(phi, default_bounds(phi, n)); }

namespace detail {

/// Finite preimages of e are the roots of this polynomial.
inline Poly<Rat> fiber_poly(const RatMap& phi, const ProjPoint<Rat>& e) {
  if (!e) return phi.den;
  return phi.num - (*e) * phi.den;
}

/// Whether infinity lies over e.
inline bool fiber_has_infinity(const RatMap& phi, const ProjPoint<Rat>& e) {
  return fiber_poly(phi, e).degree() < phi.degree();
}

}  // namespace detail

/// b is exceptional iff E0 = {b} u phi^-1(b) has at most two points and
/// phi^-1(E0) is contained in E0. All preimages of an exceptional rational
/// point are rational, so everything here is exact.
inline bool is_exceptional(const RatMap& phi, const ProjPoint<Rat>& b) {
  if (phi.degree() < 2) fail(ErrorCode::ConstantMap, "exceptional points need degree >= 2");
  std::vector<ProjPoint<Rat>> E{b};
  auto add = [&E](const ProjPoint<Rat>& x) {
    if (std::find(E.begin(), E.end(), x) == E.end()) E.push_back(x);
  };
  Poly<Rat> pb = detail::fiber_poly(phi, b);
  if (detail::fiber_has_infinity(phi, b)) add(std::nullopt);
  if (pb.degree() > 0) {
    Poly<Rat> s = squarefree_part(pb);
    if (s.degree() > 2) return false;
    for (const auto& cf : small_factors(s)) {
      if (cf.factor.degree() != 1) return false;
      add(-cf.factor[0]);
    }
  }
  if (E.size() > 2) return false;
  Poly<Rat> finite_part = Poly<Rat>::constant(Rat(1));
  bool has_inf = false;
  for (const auto& e : E) {
    if (e) finite_part *= Poly<Rat>{-*e, Rat(1)};
    else has_inf = true;
  }
  for (const auto& e : E) {
    if (detail::fiber_has_infinity(phi, e) && !has_inf) return false;
    Poly<Rat> pe = detail::fiber_poly(phi, e);
    if (pe.degree() > 0 && !divmod(finite_part, squarefree_part(pe)).second.is_zero()) return false;
  }
  return true;
}

/// T_d with T_d(x + 1/x) = x^d + x^-d.
inline Poly<Rat> chebyshev(int d) {
  if (d < 0) fail(ErrorCode::InvalidInput, "chebyshev degree must be nonnegative");
  Poly<Rat> t0 = rat_poly({2}), t1 = rat_poly({0, 1});
  if (d == 0) return t0;
  Poly<Rat> x = t1;
  for (int n = 1; n < d; ++n) {
    Poly<Rat> t2 = x * t1 - t0;
    t0 = std::move(t1);
    t1 = std::move(t2);
  }
  return t1;
}

/// v(x) = x + 1/x = (x^2 + 1)/x.
inline RatMap v_map() { return normalize_map(rat_poly({1, 0, 1}), rat_poly({0, 1})); }

inline RatMap power_map(int d) { return polynomial_map(Poly<Rat>::monomial(Rat(1), d)); }

/// Checks (x^2+1)(y^2+1) = (x^2 y^2 + 1) + (x^2 + y^2), i.e. v(x)v(y) = v(xy) + v(x/y)
/// after multiplying through by xy, in Q[y][x].
inline bool v_product_identity_holds() {
  using PP = Poly<Poly<Rat>>;
  Poly<Rat> one = rat_poly({1}), y2 = rat_poly({0, 0, 1}), y2p1 = rat_poly({1, 0, 1});
  PP lhs{y2p1, Poly<Rat>{}, y2p1};
  PP rhs = PP{one, Poly<Rat>{}, y2} + PP{y2, Poly<Rat>{}, one};
  return lhs == rhs;
}

/// phi o pi == pi o psi as rational functions.
inline bool verify_semiconjugacy(const RatMap& phi, const RatMap& pi, const RatMap& psi) {
  if (phi.degree() * pi.degree() != pi.degree() * psi.degree()) return false;
  return same_function(compose(phi, pi), compose(pi, psi));
}

/// Division polynomials of y^2 = x^3 + ax + b. psi_n = g_n for odd n and
/// psi_n = y g_n for even n, with y^2 replaced by x^3 + ax + b.
class DivisionPolynomials {
 public:
  DivisionPolynomials(const Rat& a, const Rat& b) : a_(a), b_(b) {
    if (4 * a * a * a + 27 * b * b == 0) fail(ErrorCode::SingularCurve, "4a^3 + 27b^2 = 0");
    F_ = Poly<Rat>{b, a, Rat(0), Rat(1)};
    g_.push_back(Poly<Rat>{});
    g_.push_back(rat_poly({1}));
    g_.push_back(rat_poly({2}));
    g_.push_back(Poly<Rat>{-a * a, 12 * b, 6 * a, Rat(0), Rat(3)});
    g_.push_back(Rat(4) * Poly<Rat>{-8 * b * b - a * a * a, -4 * a * b, -5 * a * a, 20 * b, 5 * a, Rat(0), Rat(1)});
  }

  const Rat& a() const { return a_; }
  const Rat& b() const { return b_; }
  const Poly<Rat>& curve_rhs() const { return F_; }

  const Poly<Rat>& g(int n) {
    while (static_cast<int>(g_.size()) <= n) extend();
    return g_[static_cast<std::size_t>(n)];
  }

  /// psi_n^2 as a polynomial in x.
  Poly<Rat> psi_squared(int n) {
    Poly<Rat> s = g(n) * g(n);
    return n % 2 == 0 ? s * F_ : s;
  }

 private:
  void extend() {
    const int n = static_cast<int>(g_.size());
    const int m = n / 2;
    auto G = [this](int k) -> const Poly<Rat>& { return g_[static_cast<std::size_t>(k)]; };
    Poly<Rat> next;
    if (n % 2 == 1) {
      Poly<Rat> A = G(m + 2) * pow(G(m), 3), B = G(m - 1) * pow(G(m + 1), 3);
      Poly<Rat> F2 = F_ * F_;
      next = m % 2 == 0 ? F2 * A - B : A - F2 * B;
    } else {
      Poly<Rat> inner = G(m + 2) * G(m - 1) * G(m - 1) - G(m - 2) * G(m + 1) * G(m + 1);
      next = Rat(1, 2) * (G(m) * inner);
    }
    g_.push_back(std::move(next));
  }

  Rat a_, b_;
  Poly<Rat> F_;
  std::vector<Poly<Rat>> g_;
};

/// x([d]P) as a rational function of x(P): x - psi_{d-1} psi_{d+1} / psi_d^2.
inline RatMap lattes_multiplication_map(const Rat& a, const Rat& b, int d) {
  if (d < 1) fail(ErrorCode::InvalidInput, "lattes degree must be >= 1");
  DivisionPolynomials dp(a, b);
  Poly<Rat> x = rat_poly({0, 1});
  Poly<Rat> prod = dp.g(d - 1) * dp.g(d + 1);
  if (d % 2 == 1) prod = prod * dp.curve_rhs();  // psi_{d-1} psi_{d+1} = y^2 g g
  Poly<Rat> den = dp.psi_squared(d);
  return normalize_map(x * den - prod, den);
}

}  // namespace iterx

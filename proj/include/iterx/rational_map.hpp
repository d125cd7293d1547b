#pragma once

#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "iterx/error.hpp"
#include "iterx/modp.hpp"
#include "iterx/poly.hpp"
#include "iterx/rat.hpp"

namespace iterx {

/// A point of P^1 over R; nullopt is infinity.
template <class R>
using ProjPoint = std::optional<R>;

/// f/g with max(deg f, deg g) >= 1. Over Rat the pair is kept coprime,
/// integral, primitive and with den's leading coefficient positive.
template <class R>
struct RationalMap {
  Poly<R> num;
  Poly<R> den;

  int degree() const { return std::max(num.degree(), den.degree()); }
  bool is_polynomial() const { return den.degree() == 0; }

  /// Value at a finite point; infinity when the denominator vanishes.
  ProjPoint<R> operator()(const R& x) const {
    R g = den.eval(x);
    R f = num.eval(x);
    if (is_zero(g)) {
      if (is_zero(f)) fail(ErrorCode::IndeterminateValue, "0/0 while evaluating a rational map");
      return std::nullopt;
    }
    return f / g;
  }

  ProjPoint<R> operator()(const ProjPoint<R>& x) const {
    if (x) return (*this)(*x);
    int df = num.degree(), dg = den.degree();
    if (df > dg) return std::nullopt;
    if (df < dg) return R{};
    return num.leading() / den.leading();
  }

  friend bool operator==(const RationalMap& a, const RationalMap& b) { return a.num == b.num && a.den == b.den; }
};

using RatMap = RationalMap<Rat>;

struct ComposeLimits {
  std::size_t max_digits = 1000000;
};

namespace detail {

inline void normalize_content(Poly<Rat>& num, Poly<Rat>& den) {
  Int l = 1, g = 0;
  for (const auto* p : {&num, &den})
    for (const auto& c : p->coeffs()) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.get_den_mpz_t());
  for (const auto* p : {&num, &den})
    for (const auto& c : p->coeffs()) {
      Int n = c.get_num() * (l / c.get_den());
      mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), n.get_mpz_t());
    }
  if (g == 0) return;
  if (den.leading() < 0) g = -g;
  Rat s = make_rat(l, g);
  num = s * num;
  den = s * den;
}

template <class R>
void normalize_content(Poly<R>&, Poly<R>&) {}

/// Monic denominator over a finite field.
inline void normalize_content(Poly<ModP>& num, Poly<ModP>& den) {
  ModP s = one_like(den.leading()) / den.leading();
  num = s * num;
  den = s * den;
}

inline void check_size(const Poly<Rat>& a, const ComposeLimits& lim) {
  for (const auto& c : a.coeffs())
    if (decimal_digits(c.get_num()) > lim.max_digits || decimal_digits(c.get_den()) > lim.max_digits)
      fail(ErrorCode::Overflow, "coefficient exceeds " + std::to_string(lim.max_digits) + " decimal digits");
}

template <class R>
void check_size(const Poly<R>&, const ComposeLimits&) {}

}  // namespace detail

/// Canonical coprime form of num/den over Q.
inline RatMap normalize_map(Poly<Rat> num, Poly<Rat> den, bool allow_constant = false) {
  if (num.is_zero() && den.is_zero()) fail(ErrorCode::ZeroMap, "numerator and denominator are both zero");
  if (den.is_zero()) fail(ErrorCode::ConstantMap, "zero denominator gives the constant map infinity");
  if (num.is_zero()) {
    if (!allow_constant) fail(ErrorCode::ConstantMap, "map is constant 0");
    return {num, Poly<Rat>::constant(Rat(1))};
  }
  Poly<Rat> g = gcd(num, den);
  if (g.degree() > 0) {
    num = divmod(num, g).first;
    den = divmod(den, g).first;
  }
  detail::normalize_content(num, den);
  RatMap out{std::move(num), std::move(den)};
  if (out.degree() < 1 && !allow_constant) fail(ErrorCode::ConstantMap, "map has degree 0");
  return out;
}

inline RatMap normalize_map(const std::vector<Rat>& num, const std::vector<Rat>& den, bool allow_constant = false) {
  return normalize_map(Poly<Rat>(num), Poly<Rat>(den), allow_constant);
}

inline RatMap polynomial_map(const Poly<Rat>& f) { return normalize_map(f, Poly<Rat>::constant(Rat(1))); }

/// Reduction of a p-integral map modulo p, denominator made monic; no gcd is taken.
inline RationalMap<ModP> reduce_map(const RatMap& phi, long p) {
  RationalMap<ModP> out{reduce_mod_p(phi.num, p), reduce_mod_p(phi.den, p)};
  if (out.den.is_zero()) fail(ErrorCode::NotGoodReduction, "denominator vanishes mod " + std::to_string(p));
  detail::normalize_content(out.num, out.den);
  return out;
}

/// outer o inner. With D = deg outer, the result is
/// sum a_i F^i G^(D-i) / sum b_i F^i G^(D-i), which is coprime whenever the
/// inputs are, so only the content is normalised.
template <class R>
RationalMap<R> compose(const RationalMap<R>& outer, const RationalMap<R>& inner, const ComposeLimits& lim = {}) {
  const int D = outer.degree();
  const Poly<R>& F = inner.num;
  const Poly<R>& G = inner.den;
  std::vector<Poly<R>> fp{Poly<R>::constant(one_like(G.leading()))};
  std::vector<Poly<R>> gp{fp[0]};
  for (int i = 1; i <= D; ++i) {
    fp.push_back(fp.back() * F);
    gp.push_back(gp.back() * G);
  }
  auto homog = [&](const Poly<R>& a) {
    Poly<R> acc;
    for (int i = 0; i <= a.degree(); ++i)
      if (!is_zero(a[i])) acc += a[i] * (fp[static_cast<std::size_t>(i)] * gp[static_cast<std::size_t>(D - i)]);
    return acc;
  };
  RationalMap<R> out{homog(outer.num), homog(outer.den)};
  detail::normalize_content(out.num, out.den);
  detail::check_size(out.num, lim);
  detail::check_size(out.den, lim);
  return out;
}

/// phi^n by repeated composition.
template <class R>
RationalMap<R> iterate(const RationalMap<R>& phi, int n, const ComposeLimits& lim = {}) {
  if (n < 1) fail(ErrorCode::InvalidInput, "iterate needs n >= 1");
  RationalMap<R> acc = phi;
  for (int k = 1; k < n; ++k) acc = compose(phi, acc, lim);
  return acc;
}

/// x -> (a x + b) / (c x + d).
template <class R>
struct Mobius {
  R a, b, c, d;

  R det() const { return a * d - b * c; }
  Mobius inverse() const { return {d, -b, -c, a}; }

  RationalMap<R> as_map() const {
    if (is_zero(det())) fail(ErrorCode::SingularMobius, "ad - bc = 0");
    RationalMap<R> m{Poly<R>{b, a}, Poly<R>{d, c}};
    detail::normalize_content(m.num, m.den);
    return m;
  }

  ProjPoint<R> operator()(const ProjPoint<R>& x) const { return as_map()(x); }

  static Mobius identity(const R& like) {
    R one = one_like(like);
    return {one, R{}, R{}, one};
  }
  static Mobius translation(const R& t) {
    R one = one_like(t);
    return {one, t, R{}, one};
  }
};

/// mu o phi o mu^-1.
template <class R>
RationalMap<R> conjugate(const RationalMap<R>& phi, const Mobius<R>& mu, const ComposeLimits& lim = {}) {
  auto m = mu.as_map();
  auto mi = mu.inverse().as_map();
  return compose(m, compose(phi, mi, lim), lim);
}

struct CriticalData {
  Poly<Rat> finite;       // f'g - fg'
  int infinity_mult = 0;  // 2d - 2 - deg(finite)
  bool infinity_critical() const { return infinity_mult > 0; }
};

inline CriticalData critical_polynomial(const RatMap& phi) {
  if (phi.degree() < 2) fail(ErrorCode::ConstantMap, "critical points need degree >= 2");
  CriticalData out;
  out.finite = phi.num.derivative() * phi.den - phi.num * phi.den.derivative();
  out.infinity_mult = 2 * phi.degree() - 2 - out.finite.degree();
  return out;
}

/// Largest m with num, den in K[x^m].
template <class R>
int power_composite_order(const RationalMap<R>& phi) {
  int m = 0;
  for (const auto* p : {&phi.num, &phi.den})
    for (int i = 1; i <= p->degree(); ++i)
      if (!is_zero((*p)[i])) m = std::gcd(m, i);
  return m == 0 ? 1 : m;
}

/// Exact equality of the functions f1/g1 and f2/g2.
template <class R>
bool same_function(const RationalMap<R>& a, const RationalMap<R>& b) {
  return a.num * b.den == b.num * a.den;
}

inline std::string to_string(const RatMap& phi) {
  if (phi.is_polynomial() && phi.den[0] == 1) return to_string(phi.num);
  return "(" + to_string(phi.num) + ") / (" + to_string(phi.den) + ")";
}

inline std::string to_string(const ProjPoint<Rat>& x) { return x ? x->get_str() : std::string("inf"); }

}  // namespace iterx

#pragma once

#include <algorithm>
#include <cassert>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "iterx/rat.hpp"
#include "iterx/ring.hpp"

namespace iterx {

/// Dense univariate polynomial; coefficient i multiplies x^i.
/// The leading stored coefficient is never an exact zero.
template <class R>
class Poly {
 public:
  using value_type = R;

  Poly() = default;
  explicit Poly(std::vector<R> coeffs) : c_(std::move(coeffs)) { trim(); }
  Poly(std::initializer_list<R> coeffs) : c_(coeffs) { trim(); }

  static Poly constant(const R& a) { return Poly(std::vector<R>{a}); }
  static Poly monomial(const R& a, int k) {
    std::vector<R> c(static_cast<std::size_t>(k) + 1);
    c.back() = a;
    return Poly(std::move(c));
  }
  /// The polynomial x with coefficients in the ring of `like`.
  static Poly x(const R& like) { return monomial(one_like(like), 1); }

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  const std::vector<R>& coeffs() const { return c_; }
  R coeff(int i) const { return (i < 0 || i > degree()) ? R{} : c_[static_cast<std::size_t>(i)]; }
  const R& operator[](int i) const { return c_[static_cast<std::size_t>(i)]; }
  const R& leading() const {
    assert(!c_.empty());
    return c_.back();
  }
  /// Index of the lowest exactly-nonzero coefficient, -1 for the zero polynomial.
  int lowest_degree() const {
    for (int i = 0; i <= degree(); ++i)
      if (!iterx::is_zero(c_[static_cast<std::size_t>(i)])) return i;
    return -1;
  }

  R eval(const R& x) const {
    R acc{};
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
    return acc;
  }

  /// Evaluate at a point of another ring S; conv maps coefficients into S.
  template <class S, class Conv>
  S eval_with(const S& x, Conv conv) const {
    S acc{};
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + conv(*it);
    return acc;
  }

  template <class S, class Conv>
  Poly<S> map(Conv conv) const {
    std::vector<S> out;
    out.reserve(c_.size());
    for (const auto& a : c_) out.push_back(conv(a));
    return Poly<S>(std::move(out));
  }

  Poly derivative() const {
    if (c_.size() <= 1) return {};
    std::vector<R> d(c_.size() - 1);
    for (std::size_t i = 1; i < c_.size(); ++i) d[i - 1] = c_[i] * ring_traits<R>::from_int_like(c_[i], static_cast<long>(i));
    return Poly(std::move(d));
  }

  /// this(inner(x)).
  Poly compose(const Poly& inner) const {
    Poly acc;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * inner + constant(*it);
    return acc;
  }

  Poly shifted(int k) const {
    if (is_zero()) return {};
    std::vector<R> c(static_cast<std::size_t>(k), R{});
    c.insert(c.end(), c_.begin(), c_.end());
    return Poly(std::move(c));
  }

  Poly operator-() const {
    std::vector<R> c;
    c.reserve(c_.size());
    for (const auto& a : c_) c.push_back(-a);
    return Poly(std::move(c));
  }

  friend Poly operator+(const Poly& a, const Poly& b) {
    std::vector<R> c(std::max(a.c_.size(), b.c_.size()));
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (i < a.c_.size() && i < b.c_.size()) c[i] = a.c_[i] + b.c_[i];
      else if (i < a.c_.size()) c[i] = a.c_[i];
      else c[i] = b.c_[i];
    }
    return Poly(std::move(c));
  }
  friend Poly operator-(const Poly& a, const Poly& b) { return a + (-b); }
  friend Poly operator*(const Poly& a, const Poly& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<R> c(a.c_.size() + b.c_.size() - 1);
    for (std::size_t i = 0; i < a.c_.size(); ++i) {
      if (iterx::is_zero(a.c_[i])) continue;
      for (std::size_t j = 0; j < b.c_.size(); ++j) {
        if (iterx::is_zero(b.c_[j])) continue;
        c[i + j] = c[i + j] + a.c_[i] * b.c_[j];
      }
    }
    return Poly(std::move(c));
  }
  friend Poly operator*(const R& s, const Poly& a) {
    std::vector<R> c;
    c.reserve(a.c_.size());
    for (const auto& x : a.c_) c.push_back(s * x);
    return Poly(std::move(c));
  }
  Poly& operator+=(const Poly& o) { return *this = *this + o; }
  Poly& operator-=(const Poly& o) { return *this = *this - o; }
  Poly& operator*=(const Poly& o) { return *this = *this * o; }

  friend bool operator==(const Poly& a, const Poly& b) { return a.c_ == b.c_; }
  friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }

 private:
  void trim() {
    while (!c_.empty() && iterx::is_zero(c_.back())) c_.pop_back();
  }

  std::vector<R> c_;
};

template <class R>
struct ring_traits<Poly<R>> {
  static Poly<R> one_like(const Poly<R>& p) {
    return Poly<R>::constant(p.is_zero() ? R(1) : iterx::one_like(p.leading()));
  }
  static bool is_zero(const Poly<R>& p) { return p.is_zero(); }
  static Poly<R> from_int_like(const Poly<R>& p, long n) {
    return Poly<R>::constant(p.is_zero() ? R(n) : ring_traits<R>::from_int_like(p.leading(), n));
  }
};

template <class R>
Poly<R> pow(const Poly<R>& base, unsigned long e) {
  Poly<R> acc = Poly<R>::constant(base.is_zero() ? R(1) : one_like(base.leading()));
  Poly<R> b = base;
  while (e) {
    if (e & 1) acc = acc * b;
    e >>= 1;
    if (e) b = b * b;
  }
  return acc;
}

/// Division with remainder over a field.
template <class R>
std::pair<Poly<R>, Poly<R>> divmod(const Poly<R>& a, const Poly<R>& b) {
  if (b.is_zero()) fail(ErrorCode::InvalidInput, "polynomial division by zero");
  std::vector<R> r = a.coeffs();
  int db = b.degree();
  if (a.degree() < db) return {Poly<R>{}, a};
  std::vector<R> q(static_cast<std::size_t>(a.degree() - db + 1));
  R inv_lead = one_like(b.leading()) / b.leading();
  for (int k = a.degree() - db; k >= 0; --k) {
    R t = r[static_cast<std::size_t>(k + db)] * inv_lead;
    q[static_cast<std::size_t>(k)] = t;
    if (is_zero(t)) continue;
    for (int i = 0; i <= db; ++i) r[static_cast<std::size_t>(k + i)] = r[static_cast<std::size_t>(k + i)] - t * b[i];
    r[static_cast<std::size_t>(k + db)] = R{};
  }
  r.resize(static_cast<std::size_t>(db));
  return {Poly<R>(std::move(q)), Poly<R>(std::move(r))};
}

template <class R>
Poly<R> make_monic(const Poly<R>& a) {
  if (a.is_zero()) return a;
  return (one_like(a.leading()) / a.leading()) * a;
}

/// Euclidean gcd over an exact field, monic result.
template <class R>
Poly<R> gcd_field(Poly<R> a, Poly<R> b) {
  while (!b.is_zero()) {
    auto r = divmod(a, b).second;
    a = std::move(b);
    b = std::move(r);
  }
  return make_monic(a);
}

// ---------------------------------------------------------------------------
// Rational polynomials.

/// gcd of the numerators after clearing denominators; returns (primitive
/// integral polynomial P, scale s) with a = s * P and lead(P) > 0.
inline std::pair<Poly<Rat>, Rat> primitive_part(const Poly<Rat>& a) {
  if (a.is_zero()) return {a, Rat(0)};
  Int l = 1;
  for (const auto& c : a.coeffs()) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.get_den_mpz_t());
  Int g = 0;
  for (const auto& c : a.coeffs()) {
    Int n = c.get_num() * (l / c.get_den());
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), n.get_mpz_t());
  }
  if (a.leading() < 0) g = -g;
  Rat scale = make_rat(g, l);
  std::vector<Rat> out;
  out.reserve(a.coeffs().size());
  for (const auto& c : a.coeffs()) out.emplace_back(c / scale);
  return {Poly<Rat>(std::move(out)), scale};
}

/// Exact gcd via the primitive polynomial remainder sequence; monic result.
inline Poly<Rat> gcd(const Poly<Rat>& a0, const Poly<Rat>& b0) {
  if (a0.is_zero()) return make_monic(b0);
  if (b0.is_zero()) return make_monic(a0);
  Poly<Rat> a = primitive_part(a0).first;
  Poly<Rat> b = primitive_part(b0).first;
  if (a.degree() < b.degree()) std::swap(a, b);
  while (!b.is_zero()) {
    // pseudo-remainder of a by b, integer arithmetic throughout
    std::vector<Rat> r = a.coeffs();
    int db = b.degree();
    const Rat lb = b.leading();
    for (int k = static_cast<int>(r.size()) - 1; k >= db; --k) {
      Rat lr = r[static_cast<std::size_t>(k)];
      for (auto& x : r) x *= lb;
      if (lr != 0)
        for (int i = 0; i <= db; ++i) r[static_cast<std::size_t>(k - db + i)] -= lr * b[i];
      r[static_cast<std::size_t>(k)] = 0;
    }
    r.resize(static_cast<std::size_t>(db));
    Poly<Rat> rem(std::move(r));
    a = std::move(b);
    b = rem.is_zero() ? rem : primitive_part(rem).first;
  }
  return make_monic(a);
}

/// Yun's square-free decomposition: a = lc * prod f_i^i, f_i monic square-free.
inline std::vector<std::pair<Poly<Rat>, int>> squarefree_decomposition(const Poly<Rat>& a) {
  std::vector<std::pair<Poly<Rat>, int>> out;
  if (a.degree() < 1) return out;
  Poly<Rat> f = make_monic(a);
  Poly<Rat> df = f.derivative();
  Poly<Rat> g = gcd(f, df);
  Poly<Rat> b = divmod(f, g).first;
  Poly<Rat> c = divmod(df, g).first;
  Poly<Rat> d = c - b.derivative();
  int i = 1;
  while (b.degree() > 0) {
    Poly<Rat> h = gcd(b, d);
    b = divmod(b, h).first;
    c = divmod(d, h).first;
    if (h.degree() > 0) out.emplace_back(h, i);
    d = c - b.derivative();
    ++i;
  }
  return out;
}

inline Poly<Rat> squarefree_part(const Poly<Rat>& a) {
  if (a.degree() < 1) return a;
  return make_monic(divmod(a, gcd(a, a.derivative())).first);
}

inline Poly<Rat> rat_poly(std::initializer_list<long> coeffs) {
  std::vector<Rat> c;
  for (long v : coeffs) c.emplace_back(v);
  return Poly<Rat>(std::move(c));
}

template <class R>
std::string to_string(const Poly<R>& p, const std::string& var = "x") {
  if (p.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (int i = p.degree(); i >= 0; --i) {
    if (is_zero(p[i])) continue;
    if (!first) os << " + ";
    first = false;
    os << "(" << to_string(p[i]) << ")";
    if (i >= 1) os << "*" << var;
    if (i > 1) os << "^" << i;
  }
  return os.str();
}

}  // namespace iterx

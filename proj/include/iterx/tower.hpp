#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "iterx/error.hpp"
#include "iterx/modp.hpp"
#include "iterx/newton.hpp"
#include "iterx/padic.hpp"
#include "iterx/poly.hpp"

namespace iterx {

struct TowerLevel;
using LevelPtr = std::shared_ptr<const TowerLevel>;

inline int level_depth(const LevelPtr& L);

/// Element of a chain Q_p = E_0 ⊂ E_1 ⊂ ... ⊂ E_k. An element of E_k is a
/// sparse polynomial in the generator of E_k with coefficients in lower
/// levels; coefficients stay at the lowest level they live in, so elements
/// of small fields embedded high in the tower cost no more than before.
class TowerElem {
 public:
  TowerElem() = default;
  TowerElem(const PAdic& a) : base_(a) {}  // NOLINT: scalars embed implicitly

  static TowerElem from_rat(const Rat& q, long p) { return TowerElem(PAdic::from_rat(q, p)); }
  static TowerElem generator(const LevelPtr& L);
  /// c * gen^k for 0 <= k < deg.
  static TowerElem monomial(const LevelPtr& L, int k, const TowerElem& c);
  /// sum of coeffs[k] gen^k, k < deg.
  static TowerElem from_coeffs(const LevelPtr& L, const std::vector<TowerElem>& coeffs);

  const LevelPtr& level() const { return level_; }
  int depth() const { return level_depth(level_); }
  bool is_scalar() const { return !level_; }
  const PAdic& scalar() const { return base_; }
  const std::vector<int>& exps() const { return exps_; }
  const std::vector<TowerElem>& coefs() const { return coefs_; }
  long prime() const;

  bool is_exact_zero() const { return !level_ && base_.is_exact_zero(); }
  bool is_exact() const {
    if (!level_) return base_.is_exact();
    for (const auto& c : coefs_)
      if (!c.is_exact()) return false;
    return true;
  }
  /// Valuation in v_p units; nullopt when zero (exactly or to precision).
  std::optional<Rat> valuation() const;
  /// Absolute precision in v_p units; nullopt when exact.
  std::optional<Rat> absprec() const;
  bool is_zero() const { return !valuation(); }
  /// Valuation, or the precision bound of a zero (nullopt for exact zero).
  std::optional<Rat> valuation_bound() const {
    auto v = valuation();
    return v ? v : absprec();
  }

  /// Coefficient of gen^k viewing this as an element of level L.
  TowerElem coeff_at(const LevelPtr& L, int k) const;

  TowerElem operator-() const;
  friend TowerElem operator+(const TowerElem& a, const TowerElem& b);
  friend TowerElem operator-(const TowerElem& a, const TowerElem& b) { return a + (-b); }
  friend TowerElem operator*(const TowerElem& a, const TowerElem& b);
  TowerElem& operator+=(const TowerElem& o) { return *this = *this + o; }
  TowerElem& operator-=(const TowerElem& o) { return *this = *this - o; }
  TowerElem& operator*=(const TowerElem& o) { return *this = *this * o; }

  /// Structural equality (same representation, precision included).
  friend bool operator==(const TowerElem& a, const TowerElem& b) {
    if (a.level_ != b.level_) return false;
    if (!a.level_) return a.base_ == b.base_;
    return a.exps_ == b.exps_ && a.coefs_ == b.coefs_;
  }
  friend bool operator!=(const TowerElem& a, const TowerElem& b) { return !(a == b); }

  std::string str() const;

  /// Canonical constructor: drops exact zeros, demotes pure constants.
  static TowerElem make(const LevelPtr& L, std::vector<int> e, std::vector<TowerElem> c);

 private:
  LevelPtr level_;
  PAdic base_;
  std::vector<int> exps_;
  std::vector<TowerElem> coefs_;
};

/// One step of the tower: generator root of a monic polynomial over the parent.
struct TowerLevel {
  enum class Kind { Inert, Eisenstein };
  Kind kind = Kind::Eisenstein;
  long p = 0;
  int degree = 1;
  int depth = 1;
  long e = 1;  // ramification index over Q_p
  long f = 1;  // residue degree over Q_p
  LevelPtr parent;
  std::vector<int> poly_exps;  // nonzero non-leading coefficients of the defining polynomial
  std::vector<TowerElem> poly_coefs;
  Poly<TowerElem> poly;  // full monic defining polynomial
  Rat gen_valuation;     // v_p of the generator
  std::string name;
};

inline int level_depth(const LevelPtr& L) { return L ? L->depth : 0; }
inline long ramification_index(const LevelPtr& L) { return L ? L->e : 1; }
inline long residue_degree(const LevelPtr& L) { return L ? L->f : 1; }

namespace detail {

inline const TowerLevel* ancestor_at(const LevelPtr& L, int d) {
  const TowerLevel* cur = L.get();
  while (cur && cur->depth > d) cur = cur->parent.get();
  return cur;
}

inline void check_chain(const TowerElem& hi, const TowerElem& lo) {
  if (lo.is_scalar()) {
    if (lo.scalar().prime() && hi.prime() && lo.scalar().prime() != hi.prime())
      fail(ErrorCode::InvalidInput, "mixed primes in tower arithmetic");
    return;
  }
  if (detail::ancestor_at(hi.level(), lo.depth()) != lo.level().get())
    fail(ErrorCode::InvalidInput, "tower elements from different towers");
}

inline std::optional<Rat> min_opt(const std::optional<Rat>& a, const std::optional<Rat>& b) {
  if (!a) return b;
  if (!b) return a;
  return *a < *b ? a : b;
}

}  // namespace detail

inline long TowerElem::prime() const { return level_ ? level_->p : base_.prime(); }

inline TowerElem TowerElem::make(const LevelPtr& L, std::vector<int> e, std::vector<TowerElem> c) {
  TowerElem out;
  out.level_ = L;
  for (std::size_t k = 0; k < e.size(); ++k) {
    if (c[k].is_exact_zero()) continue;
    out.exps_.push_back(e[k]);
    out.coefs_.push_back(std::move(c[k]));
  }
  if (out.exps_.empty()) return TowerElem(PAdic::zero(L->p));
  if (out.exps_.size() == 1 && out.exps_[0] == 0) return out.coefs_[0];
  return out;
}

inline TowerElem TowerElem::generator(const LevelPtr& L) {
  if (L->degree == 1) return -L->poly.coeff(0);
  return make(L, {1}, {TowerElem::from_rat(1, L->p)});
}

inline TowerElem TowerElem::monomial(const LevelPtr& L, int k, const TowerElem& c) {
  if (k < 0 || k >= L->degree) fail(ErrorCode::InvalidInput, "monomial exponent out of range");
  return make(L, {k}, {c});
}

inline TowerElem TowerElem::from_coeffs(const LevelPtr& L, const std::vector<TowerElem>& coeffs) {
  if (static_cast<int>(coeffs.size()) > L->degree) fail(ErrorCode::InvalidInput, "too many coefficients for level");
  std::vector<int> e;
  for (std::size_t k = 0; k < coeffs.size(); ++k) e.push_back(static_cast<int>(k));
  return make(L, e, coeffs);
}

inline TowerElem TowerElem::coeff_at(const LevelPtr& L, int k) const {
  if (level_ == L) {
    for (std::size_t t = 0; t < exps_.size(); ++t)
      if (exps_[t] == k) return coefs_[t];
    return TowerElem(PAdic::zero(L->p));
  }
  if (depth() > level_depth(L)) fail(ErrorCode::InvalidInput, "element lies above the requested level");
  return k == 0 ? *this : TowerElem(PAdic::zero(L ? L->p : prime()));
}

inline std::optional<Rat> TowerElem::valuation() const {
  if (!level_) {
    auto v = base_.valuation();
    return v ? std::optional<Rat>(Rat(*v)) : std::nullopt;
  }
  std::optional<Rat> vmin;
  for (std::size_t t = 0; t < exps_.size(); ++t) {
    auto v = coefs_[t].valuation();
    if (!v) continue;
    Rat w = *v + level_->gen_valuation * exps_[t];
    if (!vmin || w < *vmin) vmin = w;
  }
  auto prec = absprec();
  if (vmin && (!prec || *vmin < *prec)) return vmin;
  return std::nullopt;
}

inline std::optional<Rat> TowerElem::absprec() const {
  if (!level_) return base_.is_exact() ? std::nullopt : std::optional<Rat>(Rat(base_.absprec()));
  std::optional<Rat> prec;
  for (std::size_t t = 0; t < exps_.size(); ++t) {
    auto a = coefs_[t].absprec();
    if (a) prec = detail::min_opt(prec, *a + level_->gen_valuation * exps_[t]);
  }
  return prec;
}

inline TowerElem TowerElem::operator-() const {
  if (!level_) return TowerElem(-base_);
  TowerElem out = *this;
  for (auto& c : out.coefs_) c = -c;
  return out;
}

inline TowerElem operator+(const TowerElem& a, const TowerElem& b) {
  if (b.is_exact_zero() && (b.scalar().prime() == 0 || a.prime())) return a;
  if (a.is_exact_zero() && (a.scalar().prime() == 0 || b.prime())) return b;
  if (a.depth() < b.depth()) return b + a;
  if (a.is_scalar()) return TowerElem(a.base_ + b.base_);
  detail::check_chain(a, b);
  if (b.depth() < a.depth()) {
    std::vector<int> e = a.exps_;
    std::vector<TowerElem> c = a.coefs_;
    if (!e.empty() && e[0] == 0) {
      c[0] = c[0] + b;
    } else {
      e.insert(e.begin(), 0);
      c.insert(c.begin(), b);
    }
    return TowerElem::make(a.level_, std::move(e), std::move(c));
  }
  std::vector<int> e;
  std::vector<TowerElem> c;
  std::size_t i = 0, j = 0;
  while (i < a.exps_.size() || j < b.exps_.size()) {
    if (j == b.exps_.size() || (i < a.exps_.size() && a.exps_[i] < b.exps_[j])) {
      e.push_back(a.exps_[i]);
      c.push_back(a.coefs_[i++]);
    } else if (i == a.exps_.size() || b.exps_[j] < a.exps_[i]) {
      e.push_back(b.exps_[j]);
      c.push_back(b.coefs_[j++]);
    } else {
      e.push_back(a.exps_[i]);
      c.push_back(a.coefs_[i++] + b.coefs_[j++]);
    }
  }
  return TowerElem::make(a.level_, std::move(e), std::move(c));
}

inline TowerElem operator*(const TowerElem& a, const TowerElem& b) {
  if (a.is_exact_zero() || b.is_exact_zero()) {
    long p = a.prime() ? a.prime() : b.prime();
    return TowerElem(p ? PAdic::zero(p) : PAdic());
  }
  if (a.depth() < b.depth()) return b * a;
  if (a.is_scalar()) return TowerElem(a.base_ * b.base_);
  detail::check_chain(a, b);
  const LevelPtr& L = a.level_;
  if (b.depth() < a.depth()) {
    std::vector<TowerElem> c;
    c.reserve(a.coefs_.size());
    for (const auto& x : a.coefs_) c.push_back(x * b);
    return TowerElem::make(L, a.exps_, std::move(c));
  }
  const int n = L->degree;
  std::map<int, TowerElem> acc;
  for (std::size_t i = 0; i < a.exps_.size(); ++i)
    for (std::size_t j = 0; j < b.exps_.size(); ++j) {
      TowerElem t = a.coefs_[i] * b.coefs_[j];
      auto [it, fresh] = acc.try_emplace(a.exps_[i] + b.exps_[j], t);
      if (!fresh) it->second = it->second + t;
    }
  // x^n = -sum g_i x^i, applied from the top down
  while (!acc.empty() && acc.rbegin()->first >= n) {
    auto top = std::prev(acc.end());
    int k = top->first;
    TowerElem c = top->second;
    acc.erase(top);
    if (c.is_exact_zero()) continue;
    for (std::size_t t = 0; t < L->poly_exps.size(); ++t) {
      TowerElem term = -(c * L->poly_coefs[t]);
      auto [it, fresh] = acc.try_emplace(k - n + L->poly_exps[t], term);
      if (!fresh) it->second = it->second + term;
    }
  }
  std::vector<int> e;
  std::vector<TowerElem> c;
  for (auto& [k, v] : acc) {
    e.push_back(k);
    c.push_back(std::move(v));
  }
  return TowerElem::make(L, std::move(e), std::move(c));
}

inline std::string TowerElem::str() const {
  if (!level_) return base_.str();
  std::string s;
  for (std::size_t t = 0; t < exps_.size(); ++t) {
    if (t) s += " + ";
    std::string c = coefs_[t].str();
    bool paren = !coefs_[t].is_scalar() || c.find(' ') != std::string::npos;
    if (exps_[t] == 0) {
      s += paren ? "(" + c + ")" : c;
      continue;
    }
    s += (paren ? "(" + c + ")" : c) + "*" + level_->name;
    if (exps_[t] > 1) s += "^" + std::to_string(exps_[t]);
  }
  return s;
}

template <>
struct ring_traits<TowerElem> {
  static TowerElem one_like(const TowerElem& x) { return TowerElem::from_rat(1, x.prime() ? x.prime() : 2); }
  static bool is_zero(const TowerElem& x) { return x.is_exact_zero(); }
  static TowerElem from_int_like(const TowerElem& x, long n) {
    return TowerElem::from_rat(n, x.prime() ? x.prime() : 2);
  }
};

inline std::string to_string(const TowerElem& x) { return x.str(); }

inline Poly<TowerElem> tower_poly(const Poly<Rat>& f, long p) {
  return f.map<TowerElem>([&](const Rat& c) { return TowerElem::from_rat(c, p); });
}

inline Poly<TowerElem> tower_poly(const Poly<PAdic>& f) {
  return f.map<TowerElem>([](const PAdic& c) { return TowerElem(c); });
}

/// Newton polygon over level L with valuations normalized so v_L(O_L) = Z.
inline NewtonPolygon newton_polygon(const Poly<TowerElem>& f, const LevelPtr& over) {
  if (f.is_zero()) fail(ErrorCode::InvalidInput, "Newton polygon of the zero polynomial");
  Rat scale(ramification_index(over));
  std::vector<PolygonPoint> pts;
  for (int i = 0; i <= f.degree(); ++i) {
    const TowerElem& c = f[i];
    if (c.is_exact_zero()) continue;
    if (c.depth() > level_depth(over)) fail(ErrorCode::InvalidInput, "coefficient above the base level");
    auto v = c.valuation();
    if (v) pts.push_back({i, *v * scale, false});
    else pts.push_back({i, *c.absprec() * scale, true});
  }
  return newton_polygon(pts);
}

namespace detail {

inline std::shared_ptr<TowerLevel> new_level(const LevelPtr& parent, const Poly<TowerElem>& g, long p) {
  auto L = std::make_shared<TowerLevel>();
  L->p = p;
  L->degree = g.degree();
  L->depth = level_depth(parent) + 1;
  L->parent = parent;
  L->poly = g;
  for (int i = 0; i < g.degree(); ++i) {
    if (g[i].is_exact_zero()) continue;
    if (g[i].depth() > level_depth(parent)) fail(ErrorCode::InvalidInput, "level polynomial coefficient above parent");
    L->poly_exps.push_back(i);
    L->poly_coefs.push_back(g[i]);
  }
  return L;
}

inline long poly_prime(const Poly<TowerElem>& g, const LevelPtr& parent) {
  if (parent) return parent->p;
  for (const auto& c : g.coeffs())
    if (c.prime()) return c.prime();
  fail(ErrorCode::InvalidInput, "cannot infer the prime of a level polynomial");
}

inline bool is_exact_one(const TowerElem& c) {
  return c.is_scalar() && c.scalar().is_exact() && !c.scalar().is_zero() && c.scalar().to_rat() == 1;
}

}  // namespace detail

/// Adjoins a root of the Eisenstein polynomial g over the top level `parent`.
inline LevelPtr push_eisenstein(const LevelPtr& parent, const Poly<TowerElem>& g, std::string name = "") {
  if (g.degree() < 1) fail(ErrorCode::NotEisenstein, "degree must be positive");
  if (!detail::is_exact_one(g.leading())) fail(ErrorCode::NotEisenstein, "polynomial is not monic");
  long p = detail::poly_prime(g, parent);
  NewtonPolygon np;
  try {
    np = newton_polygon(g, parent);
  } catch (const Error& err) {
    if (err.code() == ErrorCode::PrecisionExhausted) throw;
    fail(ErrorCode::NotEisenstein, err.what());
  }
  Rat want(-1, g.degree());
  if (!np.single_segment() || np.segments[0].slope != want || np.vertices.front() != std::make_pair(0, Rat(1)))
    fail(ErrorCode::NotEisenstein, "Newton polygon " + to_string(np) + " is not one segment of slope " + want.get_str());
  auto L = detail::new_level(parent, g, p);
  L->kind = TowerLevel::Kind::Eisenstein;
  L->e = ramification_index(parent) * g.degree();
  L->f = residue_degree(parent);
  L->gen_valuation = Rat(1, L->e);
  L->name = name.empty() ? "t" + std::to_string(L->depth) : name;
  return L;
}

inline LevelPtr push_eisenstein(const LevelPtr& parent, const Poly<Rat>& g, long p, std::string name = "") {
  return push_eisenstein(parent, tower_poly(g, p), std::move(name));
}

/// x^(p^k) mod g over F_p, used for irreducibility tests.
inline Poly<ModP> frobenius_power(const Poly<ModP>& g, long p, int k) {
  Poly<ModP> x = Poly<ModP>::x(ModP(1, p));
  Poly<ModP> cur = x;
  for (int s = 0; s < k; ++s) {
    Poly<ModP> acc = Poly<ModP>::constant(ModP(1, p)), base = cur;
    for (long e = p; e; e >>= 1) {
      if (e & 1) acc = divmod(acc * base, g).second;
      base = divmod(base * base, g).second;
    }
    cur = acc;
  }
  return cur;
}

/// Rabin's test over F_p.
inline bool irreducible_mod_p(const Poly<ModP>& g, long p) {
  int n = g.degree();
  if (n < 1) return false;
  if (n == 1) return true;
  Poly<ModP> x = Poly<ModP>::x(ModP(1, p));
  if (frobenius_power(g, p, n) != divmod(x, g).second) return false;
  for (int q = 2; q <= n; ++q) {
    if (n % q) continue;
    bool prime_q = true;
    for (int t = 2; t * t <= q; ++t)
      if (q % t == 0) prime_q = false;
    if (!prime_q) continue;
    Poly<ModP> h = frobenius_power(g, p, n / q) - x;
    if (gcd_field(g, h).degree() > 0) return false;
  }
  return true;
}

/// Unramified level Q_p[w]/(g) for g monic over Z_p and irreducible mod p.
inline LevelPtr push_inert(const Poly<Rat>& g, long p, std::string name = "w") {
  if (g.degree() < 1 || g.leading() != 1) fail(ErrorCode::InvalidInput, "inert level polynomial must be monic");
  if (!irreducible_mod_p(reduce_mod_p(g, p), p)) fail(ErrorCode::InvalidInput, "inert level polynomial is reducible mod p");
  auto L = detail::new_level(nullptr, tower_poly(g, p), p);
  L->kind = TowerLevel::Kind::Inert;
  L->f = g.degree();
  L->e = 1;
  L->gen_valuation = 0;
  L->name = std::move(name);
  return L;
}

TowerElem tower_inverse(const TowerElem& x);

namespace detail {

/// Coefficient vector of x at level L (length deg L).
inline std::vector<TowerElem> coeff_vector(const TowerElem& x, const LevelPtr& L) {
  std::vector<TowerElem> v(static_cast<std::size_t>(L->degree), TowerElem(PAdic::zero(L->p)));
  if (x.level() == L) {
    for (std::size_t t = 0; t < x.exps().size(); ++t) v[static_cast<std::size_t>(x.exps()[t])] = x.coefs()[t];
  } else {
    v[0] = x;
  }
  return v;
}

/// Matrix of multiplication by x on the basis 1, g, ..., g^(n-1); column j is x g^j.
inline std::vector<std::vector<TowerElem>> mult_matrix(const TowerElem& x, const LevelPtr& L) {
  int n = L->degree;
  std::vector<std::vector<TowerElem>> M(static_cast<std::size_t>(n), std::vector<TowerElem>(static_cast<std::size_t>(n)));
  TowerElem col = x, gen = TowerElem::generator(L);
  for (int j = 0; j < n; ++j) {
    auto v = coeff_vector(col, L);
    for (int i = 0; i < n; ++i) M[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = v[static_cast<std::size_t>(i)];
    if (j + 1 < n) col = col * gen;
  }
  return M;
}

/// Gaussian elimination with smallest-valuation pivots. Returns det and, if
/// rhs is given, overwrites it with the solution.
inline TowerElem eliminate(std::vector<std::vector<TowerElem>> M, std::vector<TowerElem>* rhs, long p) {
  std::size_t n = M.size();
  TowerElem det = TowerElem::from_rat(1, p);
  for (std::size_t k = 0; k < n; ++k) {
    std::optional<std::size_t> piv;
    Rat best;
    for (std::size_t i = k; i < n; ++i) {
      auto v = M[i][k].valuation();
      if (v && (!piv || *v < best)) {
        piv = i;
        best = *v;
      }
    }
    if (!piv) {
      bool exact = true;
      for (std::size_t i = k; i < n; ++i) exact = exact && M[i][k].is_exact_zero();
      if (exact && !rhs) return TowerElem::from_rat(0, p);
      fail(ErrorCode::PrecisionExhausted, "pivot is zero to precision");
    }
    if (*piv != k) {
      std::swap(M[*piv], M[k]);
      if (rhs) std::swap((*rhs)[*piv], (*rhs)[k]);
      det = -det;
    }
    det = det * M[k][k];
    TowerElem inv = tower_inverse(M[k][k]);
    for (std::size_t i = k + 1; i < n; ++i) {
      if (M[i][k].is_exact_zero()) continue;
      TowerElem factor = M[i][k] * inv;
      for (std::size_t j = k; j < n; ++j) M[i][j] = M[i][j] - factor * M[k][j];
      if (rhs) (*rhs)[i] = (*rhs)[i] - factor * (*rhs)[k];
    }
  }
  if (rhs) {
    for (std::size_t k = n; k-- > 0;) {
      TowerElem s = (*rhs)[k];
      for (std::size_t j = k + 1; j < n; ++j) s = s - M[k][j] * (*rhs)[j];
      (*rhs)[k] = s * tower_inverse(M[k][k]);
    }
  }
  return det;
}

inline bool is_monomial(const TowerElem& x) { return !x.is_scalar() && x.exps().size() == 1; }

}  // namespace detail

/// Norm from the level of x (or from L if given) down to its parent:
/// the resultant of the level polynomial with the representative of x.
inline TowerElem norm_step(const TowerElem& x, const LevelPtr& from) {
  if (!from) fail(ErrorCode::InvalidInput, "norm_step needs a level above Q_p");
  if (x.depth() > from->depth) fail(ErrorCode::InvalidInput, "element lies above the requested level");
  int n = from->degree;
  if (x.level() != from) return power(x, static_cast<unsigned long>(n));
  // N(c g^k) = c^n ((-1)^n g(0))^k
  TowerElem ng = from->poly.coeff(0);
  if (n % 2) ng = -ng;
  if (detail::is_monomial(x)) {
    return power(x.coefs()[0], static_cast<unsigned long>(n)) * power(ng, static_cast<unsigned long>(x.exps()[0]));
  }
  return detail::eliminate(detail::mult_matrix(x, from), nullptr, from->p);
}

inline TowerElem norm_step(const TowerElem& x) { return norm_step(x, x.level()); }

/// Multiplicative inverse; raises DivisionByZeroToPrecision for zeros.
inline TowerElem tower_inverse(const TowerElem& x) {
  if (x.is_zero()) fail(ErrorCode::DivisionByZeroToPrecision, "inverse of a tower zero");
  if (x.is_scalar()) return TowerElem(x.scalar().inverse());
  const LevelPtr& L = x.level();
  int n = L->degree;
  if (detail::is_monomial(x) && x.exps()[0] == 1) {
    // g^-1 = -(g^(n-1) + a_(n-1) g^(n-2) + ... + a_1) / a_0
    std::vector<TowerElem> c(static_cast<std::size_t>(n));
    for (int i = 1; i <= n; ++i) c[static_cast<std::size_t>(i - 1)] = L->poly.coeff(i);
    TowerElem ginv = -(TowerElem::from_coeffs(L, c) * tower_inverse(L->poly.coeff(0)));
    return ginv * tower_inverse(x.coefs()[0]);
  }
  std::vector<TowerElem> rhs(static_cast<std::size_t>(n), TowerElem(PAdic::zero(L->p)));
  rhs[0] = TowerElem::from_rat(1, L->p);
  detail::eliminate(detail::mult_matrix(x, L), &rhs, L->p);
  return TowerElem::from_coeffs(L, rhs);
}

inline TowerElem operator/(const TowerElem& a, const TowerElem& b) { return a * tower_inverse(b); }

/// Caps every scalar coefficient at absolute precision prec (v_p units of the scalar).
inline TowerElem with_absprec(const TowerElem& x, long prec) {
  if (x.is_scalar()) return TowerElem(x.scalar().with_absprec(prec));
  std::vector<TowerElem> c;
  for (std::size_t t = 0; t < x.coefs().size(); ++t) c.push_back(with_absprec(x.coefs()[t], prec));
  return TowerElem::make(x.level(), x.exps(), std::move(c));
}

}  // namespace iterx

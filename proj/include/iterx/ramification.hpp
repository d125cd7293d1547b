#pragma once

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include "iterx/error.hpp"
#include "iterx/newton.hpp"
#include "iterx/tower.hpp"

namespace iterx {

/// Lower ramification breaks with multiplicities (segment lengths, or the
/// number of conjugates with that break).
struct BreakData {
  std::vector<std::pair<Rat, int>> lower;
  int degree = 1;
  bool galois_verified = false;
  std::string source;

  std::vector<Rat> break_values() const {
    std::vector<Rat> out;
    for (const auto& [b, c] : lower) out.push_back(b);
    return out;
  }

  void validate() const {
    int total = 0;
    for (std::size_t k = 0; k < lower.size(); ++k) {
      if (lower[k].first < 0) fail(ErrorCode::InvalidBreaks, "negative break " + lower[k].first.get_str());
      if (lower[k].second <= 0) fail(ErrorCode::InvalidBreaks, "nonpositive break multiplicity");
      if (k && lower[k].first <= lower[k - 1].first) fail(ErrorCode::InvalidBreaks, "breaks not strictly increasing");
      total += lower[k].second;
    }
    if (degree < 1 || total != degree - 1)
      fail(ErrorCode::InvalidBreaks, "multiplicities must sum to degree - 1");
  }
};

inline BreakData breaks_from_multiset(std::vector<Rat> values, int degree, std::string source) {
  std::sort(values.begin(), values.end());
  BreakData bd;
  bd.degree = degree;
  bd.source = std::move(source);
  for (const auto& v : values) {
    if (!bd.lower.empty() && bd.lower.back().first == v) ++bd.lower.back().second;
    else bd.lower.emplace_back(v, 1);
  }
  return bd;
}

/// Breaks of L = parent(π') / parent with g(π') = 0, read off the Newton polygon of
/// ρ(x)/x where ρ(x) = g(π'x + π'), valuations normalized by v_L(π') = 1.
/// Conjugates, when supplied, are checked to be the other roots of g.
inline BreakData ramification_breaks(const LevelPtr& L, const std::vector<TowerElem>& conjugates = {}) {
  if (!L || L->kind != TowerLevel::Kind::Eisenstein) fail(ErrorCode::NotEisenstein, "level is not Eisenstein");
  const int n = L->degree;
  BreakData bd;
  bd.degree = n;
  bd.source = "rho-polygon";
  if (n == 1) {
    bd.galois_verified = true;
    return bd;
  }
  TowerElem pi = TowerElem::generator(L);
  std::vector<TowerElem> pw{TowerElem::from_rat(1, L->p)};
  for (int i = 1; i <= n; ++i) pw.push_back(pw.back() * pi);
  std::vector<TowerElem> rho(static_cast<std::size_t>(n));
  for (int k = 1; k <= n; ++k) {
    TowerElem acc(PAdic::zero(L->p));
    Int binom = 1;  // C(i, k), starting at i = k
    for (int i = k; i <= n; ++i) {
      if (i > k) binom = binom * i / (i - k);
      const TowerElem& gi = L->poly.coeff(i);
      if (gi.is_exact_zero()) continue;
      acc = acc + gi * pw[static_cast<std::size_t>(i)] * TowerElem::from_rat(Rat(binom), L->p);
    }
    rho[static_cast<std::size_t>(k - 1)] = acc;
  }
  NewtonPolygon np = newton_polygon(Poly<TowerElem>(rho), L);
  std::vector<Rat> values;
  for (const auto& s : np.segments)
    for (int t = 0; t < s.length; ++t) values.push_back(-s.slope);
  bd.lower = breaks_from_multiset(values, n, bd.source).lower;
  if (n == 2) {
    bd.galois_verified = true;
  } else if (static_cast<int>(conjugates.size()) == n - 1) {
    bool ok = true;
    std::vector<TowerElem> roots{pi};
    for (const auto& c : conjugates) {
      if (!L->poly.eval(c).is_zero()) ok = false;
      for (const auto& r : roots)
        if ((c - r).is_zero()) ok = false;
      roots.push_back(c);
    }
    bd.galois_verified = ok;
  }
  bd.validate();
  return bd;
}

/// Φ_{p^n}(x + 1), Eisenstein over Q_p.
inline Poly<Rat> shifted_cyclotomic(long p, int n) {
  long step = 1;
  for (int k = 1; k < n; ++k) step *= p;
  std::vector<Rat> c(static_cast<std::size_t>(step * (p - 1) + 1));
  for (long j = 0; j < p; ++j) c[static_cast<std::size_t>(j * step)] = 1;
  return Poly<Rat>(c).compose(rat_poly({1, 1}));
}

/// The tower Q_p ⊂ Q_p(ζ_p) ⊂ ... ⊂ Q_p(ζ_{p^n}) one cyclotomic step per level,
/// using (x + 1)^p - 1 - π_{k-1} over the previous level.
inline std::vector<LevelPtr> cyclotomic_tower(long p, int n) {
  std::vector<LevelPtr> levels;
  LevelPtr cur;
  for (int k = 1; k <= n; ++k) {
    Poly<TowerElem> g;
    if (k == 1) {
      g = tower_poly(shifted_cyclotomic(p, 1), p);
    } else {
      Poly<Rat> base = power(rat_poly({1, 1}), static_cast<unsigned long>(p)) - rat_poly({1});
      g = tower_poly(base, p) - Poly<TowerElem>::constant(TowerElem::generator(cur));
    }
    cur = push_eisenstein(cur, g, "z" + std::to_string(k));
    levels.push_back(cur);
  }
  return levels;
}

/// Lower breaks of Q_p(ζ_{p^n})/Q_p by brute force over the Galois group:
/// σ_a(π) = (1 + π)^a - 1 inside the tower, i(σ_a) = v(σ_a π - π).
inline BreakData cyclotomic_oracle(long p, int n) {
  if (p < 2 || n < 1) fail(ErrorCode::InvalidInput, "cyclotomic oracle needs p >= 2 and n >= 1");
  LevelPtr L = push_eisenstein(nullptr, shifted_cyclotomic(p, n), p, "z");
  TowerElem pi = TowerElem::generator(L), one = TowerElem::from_rat(1, p);
  long q = 1;
  for (int k = 0; k < n; ++k) q *= p;
  std::vector<Rat> values;
  bool galois = true;
  TowerElem acc = one + pi, base = one + pi;  // (1 + π)^a, a = 1
  for (long a = 2; a < q; ++a) {
    acc = acc * base;
    if (a % p == 0) continue;
    TowerElem sigma = acc - one;
    if (!L->poly.eval(sigma).is_zero()) galois = false;
    auto v = (sigma - pi).valuation();
    if (!v) fail(ErrorCode::PrecisionExhausted, "conjugate indistinguishable from π");
    values.push_back(*v * Rat(L->e) - 1);
  }
  BreakData bd = breaks_from_multiset(values, static_cast<int>(L->degree), "cyclotomic-oracle");
  bd.galois_verified = galois;
  bd.validate();
  return bd;
}

/// Piecewise-linear transition function φ_{L/K}: slope slopes[j] on
/// [xs[j], xs[j+1]), the last slope continuing to infinity; φ(x) = x for x < 0.
class HerbrandFn {
 public:
  HerbrandFn() : xs_{Rat(0)}, slopes_{Rat(1)} {}

  static HerbrandFn identity() { return {}; }

  static HerbrandFn from_pieces(std::vector<Rat> xs, std::vector<Rat> slopes) {
    if (xs.empty() || xs.size() != slopes.size() || xs[0] != 0 || !slopes_positive(slopes)) fail(ErrorCode::InvalidBreaks, "malformed Herbrand pieces");
    for (std::size_t k = 0; k < xs.size(); ++k) {
      if (k && xs[k] <= xs[k - 1]) fail(ErrorCode::InvalidBreaks, "Herbrand breakpoints not increasing");
    }
    for (auto& q : xs) q.canonicalize();
    for (auto& q : slopes) q.canonicalize();
    HerbrandFn h;
    h.xs_ = std::move(xs);
    h.slopes_ = std::move(slopes);
    h.canonicalize();
    return h;
  }

  /// φ(x) = ∫_0^x |G_t| / |G_0| dt for the lower filtration in bd.
  static HerbrandFn from_breaks(const BreakData& bd) {
    bd.validate();
    std::vector<Rat> xs{Rat(0)}, slopes;
    int above = bd.degree - 1;  // nontrivial elements with break >= current t
    slopes.push_back(Rat(1 + above, bd.degree));
    for (const auto& [b, c] : bd.lower) {
      above -= c;
      Rat s(1 + above, bd.degree);
      if (b == 0) {
        slopes.back() = s;
        continue;
      }
      xs.push_back(b);
      slopes.push_back(s);
    }
    return from_pieces(xs, slopes);
  }

  const std::vector<Rat>& breakpoints() const { return xs_; }
  const std::vector<Rat>& slopes() const { return slopes_; }

  Rat operator()(const Rat& x) const {
    if (x <= 0) return x;
    Rat y = 0;
    for (std::size_t k = 0; k < xs_.size(); ++k) {
      Rat end = k + 1 < xs_.size() ? xs_[k + 1] : x;
      if (x <= end) return y + slopes_[k] * (x - xs_[k]);
      y += slopes_[k] * (end - xs_[k]);
    }
    return y;
  }

  /// ψ = φ^{-1}.
  HerbrandFn inverse() const {
    std::vector<Rat> ys, inv;
    for (std::size_t k = 0; k < xs_.size(); ++k) {
      ys.push_back((*this)(xs_[k]));
      inv.push_back(1 / slopes_[k]);
    }
    return from_pieces(ys, inv);
  }

  /// this ∘ inner.
  HerbrandFn compose(const HerbrandFn& inner) const {
    std::vector<Rat> pts = inner.xs_;
    HerbrandFn ginv = inner.inverse();
    for (const auto& x : xs_) pts.push_back(ginv(x));
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    std::vector<Rat> slopes;
    for (std::size_t k = 0; k + 1 < pts.size(); ++k)
      slopes.push_back(((*this)(inner(pts[k + 1])) - (*this)(inner(pts[k]))) / (pts[k + 1] - pts[k]));
    slopes.push_back(slopes_.back() * inner.slopes_.back());
    return from_pieces(pts, slopes);
  }

  /// Pointwise this(x) <= other(x) for all x >= 0.
  bool leq(const HerbrandFn& other) const {
    std::vector<Rat> pts = xs_;
    pts.insert(pts.end(), other.xs_.begin(), other.xs_.end());
    for (const auto& x : pts)
      if ((*this)(x) > other(x)) return false;
    return slopes_.back() <= other.slopes_.back();
  }

  bool is_concave() const {
    for (std::size_t k = 1; k < slopes_.size(); ++k)
      if (slopes_[k] > slopes_[k - 1]) return false;
    return true;
  }

  friend bool operator==(const HerbrandFn& a, const HerbrandFn& b) { return a.xs_ == b.xs_ && a.slopes_ == b.slopes_; }
  friend bool operator!=(const HerbrandFn& a, const HerbrandFn& b) { return !(a == b); }

 private:
  static bool slopes_positive(const std::vector<Rat>& s) {
    return std::all_of(s.begin(), s.end(), [](const Rat& q) { return q > 0; });
  }
  void canonicalize() {
    std::vector<Rat> xs{xs_[0]}, sl{slopes_[0]};
    for (std::size_t k = 1; k < xs_.size(); ++k) {
      if (slopes_[k] == sl.back()) continue;
      xs.push_back(xs_[k]);
      sl.push_back(slopes_[k]);
    }
    xs_ = std::move(xs);
    slopes_ = std::move(sl);
  }

  std::vector<Rat> xs_;
  std::vector<Rat> slopes_;
};

inline HerbrandFn herbrand_compose(const BreakData& bd) { return HerbrandFn::from_breaks(bd); }
inline HerbrandFn herbrand_compose(const HerbrandFn& outer, const HerbrandFn& inner) { return outer.compose(inner); }

/// Upper breaks φ(b) of the lower breaks b.
inline std::vector<Rat> upper_breaks(const BreakData& bd) {
  HerbrandFn phi = HerbrandFn::from_breaks(bd);
  std::vector<Rat> out;
  for (const auto& [b, c] : bd.lower) out.push_back(phi(b));
  return out;
}

inline std::string to_string(const HerbrandFn& h) {
  std::string s;
  for (std::size_t k = 0; k < h.breakpoints().size(); ++k) {
    if (k) s += ", ";
    s += "[" + h.breakpoints()[k].get_str() + ": " + h.slopes()[k].get_str() + "]";
  }
  return s;
}

}  // namespace iterx

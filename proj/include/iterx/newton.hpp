#pragma once

#include <optional>
#include <string>
#include <vector>

#include "iterx/error.hpp"
#include "iterx/padic.hpp"
#include "iterx/poly.hpp"
#include "iterx/rat.hpp"

namespace iterx {

/// Coefficient data for a polygon: either a known valuation or, for a value
/// that is zero to precision, a lower bound.
struct PolygonPoint {
  int i = 0;
  Rat v;
  bool zero_to_precision = false;
};

struct PolygonSegment {
  Rat slope;
  int length = 0;
  int start = 0;
  int end = 0;
};

struct NewtonPolygon {
  std::vector<std::pair<int, Rat>> vertices;
  std::vector<PolygonSegment> segments;

  bool single_segment() const { return segments.size() == 1; }
  /// Segment whose slope is -v, i.e. the one holding roots of valuation v.
  std::optional<PolygonSegment> segment_for_root_valuation(const Rat& v) const {
    for (const auto& s : segments)
      if (s.slope == -v) return s;
    return std::nullopt;
  }
};

inline std::string to_string(const NewtonPolygon& np) {
  std::string s = "[";
  for (std::size_t k = 0; k < np.vertices.size(); ++k) {
    if (k) s += ", ";
    s += "(" + std::to_string(np.vertices[k].first) + ", " + np.vertices[k].second.get_str() + ")";
  }
  return s + "]";
}

/// Lower convex hull of the known points. A zero-to-precision point that
/// could lie on or under the hull makes the polygon ambiguous.
inline NewtonPolygon newton_polygon(std::vector<PolygonPoint> pts) {
  std::vector<PolygonPoint> known;
  for (const auto& q : pts)
    if (!q.zero_to_precision) known.push_back(q);
  if (known.empty()) fail(ErrorCode::PrecisionExhausted, "every coefficient is zero to precision");
  std::sort(known.begin(), known.end(), [](const auto& a, const auto& b) { return a.i < b.i; });
  std::vector<std::pair<int, Rat>> hull;
  auto cross_bad = [](const std::pair<int, Rat>& o, const std::pair<int, Rat>& a, const PolygonPoint& b) {
    // a is not strictly below segment o-b
    return (a.second - o.second) * (b.i - o.first) >= (b.v - o.second) * (a.first - o.first);
  };
  for (const auto& q : known) {
    while (hull.size() >= 2 && cross_bad(hull[hull.size() - 2], hull.back(), q)) hull.pop_back();
    hull.emplace_back(q.i, q.v);
  }
  auto height_at = [&](int i) -> std::optional<Rat> {
    if (i < hull.front().first || i > hull.back().first) return std::nullopt;
    for (std::size_t k = 0; k + 1 < hull.size(); ++k) {
      auto [x0, y0] = hull[k];
      auto [x1, y1] = hull[k + 1];
      if (i >= x0 && i <= x1) return y0 + (y1 - y0) * Rat(i - x0, x1 - x0);
    }
    return hull.front().second;
  };
  for (const auto& q : pts) {
    if (!q.zero_to_precision) continue;
    auto h = height_at(q.i);
    if (!h || q.v <= *h)
      fail(ErrorCode::PrecisionExhausted, "coefficient of x^" + std::to_string(q.i) + " is zero to precision near the hull");
  }
  NewtonPolygon np;
  np.vertices = hull;
  for (std::size_t k = 0; k + 1 < hull.size(); ++k) {
    PolygonSegment s;
    s.start = hull[k].first;
    s.end = hull[k + 1].first;
    s.length = s.end - s.start;
    s.slope = (hull[k + 1].second - hull[k].second) / Rat(s.length);
    s.slope.canonicalize();
    np.segments.push_back(s);
  }
  return np;
}

inline NewtonPolygon newton_polygon(const Poly<PAdic>& f) {
  if (f.is_zero()) fail(ErrorCode::InvalidInput, "Newton polygon of the zero polynomial");
  std::vector<PolygonPoint> pts;
  for (int i = 0; i <= f.degree(); ++i) {
    const PAdic& c = f[i];
    if (c.is_exact_zero()) continue;
    pts.push_back({i, Rat(c.valuation_bound()), c.is_zero()});
  }
  return newton_polygon(pts);
}

struct HenselResult {
  PAdic root;
  long residual_valuation = PAdic::kInf;  // v(f(root)) before truncation, or its bound
  int iterations = 0;
};

/// Newton lifting of a simple root from a seed with v(f(seed)) > 2 v(f'(seed)).
/// The returned absolute precision is v(f(x)) - v(f'(x)), capped at prec.
inline HenselResult hensel_lift(const Poly<PAdic>& f, const PAdic& seed, long prec = 60) {
  if (f.is_zero()) fail(ErrorCode::InvalidInput, "Hensel lifting of the zero polynomial");
  long p = seed.prime();
  for (const auto& c : f.coeffs())
    if (c.prime()) p = c.prime();
  Poly<PAdic> df = f.derivative();
  PAdic x = seed.lift_exact();
  if (!x.prime()) x = PAdic::zero(p);
  PAdic fx = f.eval(x), dfx = df.eval(x);
  if (dfx.is_zero()) fail(ErrorCode::HenselConditionFailed, "derivative vanishes at the seed");
  long vd = *dfx.valuation();
  if (!fx.is_zero() && *fx.valuation() <= 2 * vd)
    fail(ErrorCode::HenselConditionFailed,
         "v(f(seed)) = " + std::to_string(*fx.valuation()) + " <= 2 v(f'(seed)) = " + std::to_string(2 * vd));
  HenselResult out;
  const std::size_t max_digits = static_cast<std::size_t>(4 * prec) + 64;
  while (!fx.is_zero() && *fx.valuation() - vd < prec && out.iterations < 200) {
    x = (x - fx / dfx).lift_exact();
    if (!x.is_zero() && decimal_digits(height(x.to_rat())) > max_digits)
      x = x.with_absprec(prec + 2 * vd + 4).lift_exact();
    fx = f.eval(x);
    dfx = df.eval(x);
    ++out.iterations;
  }
  if (!fx.is_zero() && *fx.valuation() - vd < prec)
    fail(ErrorCode::PrecisionExhausted, "Hensel iteration did not reach the requested precision");
  out.residual_valuation = fx.valuation_bound();
  if (fx.is_exact_zero()) {
    out.root = x;
    return out;
  }
  out.root = x.with_absprec(std::min(prec, fx.valuation_bound() - vd));
  return out;
}

inline PAdic hensel_root(const Poly<PAdic>& f, const PAdic& seed, long prec = 60) {
  return hensel_lift(f, seed, prec).root;
}

/// Converts an exact rational polynomial to Q_p coefficients.
inline Poly<PAdic> padic_poly(const Poly<Rat>& f, long p, long absprec = PAdic::kInf) {
  return f.map<PAdic>([&](const Rat& c) { return PAdic::from_rat(c, p, absprec); });
}

}  // namespace iterx

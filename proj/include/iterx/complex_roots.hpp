#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "iterx/error.hpp"
#include "iterx/poly.hpp"
#include "iterx/rat.hpp"

namespace iterx {

struct RootOptions {
  double residual_tol = 1e-12;  // relative residual required of every root
  int max_iter = 2000;
  double cluster_tol = 1e-6;  // relative distance below which numeric roots merge
};

struct CertifiedRoot {
  Complex z;
  double residual_bound = 0;  // bound on |p(z)| including evaluation rounding
  double radius = 0;          // a root of p lies within this distance of z
  int multiplicity = 1;
};

namespace detail {

inline bool lex_less(const Complex& a, const Complex& b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

/// p(z), p'(z) and sum |a_i||z|^i by Horner.
inline void horner(const std::vector<Complex>& a, Complex z, Complex& p, Complex& dp, double& mag) {
  p = 0;
  dp = 0;
  mag = 0;
  double az = std::abs(z);
  for (auto it = a.rbegin(); it != a.rend(); ++it) {
    dp = dp * z + p;
    p = p * z + *it;
    mag = mag * az + std::abs(*it);
  }
}

/// Newton correction p/p', evaluated through the reversed polynomial when |z| > 1.
inline Complex newton_ratio(const std::vector<Complex>& a, Complex z) {
  const int n = static_cast<int>(a.size()) - 1;
  if (std::abs(z) <= 1) {
    Complex p, dp;
    double mag;
    horner(a, z, p, dp, mag);
    return p / dp;
  }
  Complex y = 1.0 / z, q = 0, dq = 0;
  for (const auto& c : a) {  // reversed coefficients: a_n + a_{n-1} y + ...
    dq = dq * y + q;
    q = q * y + c;
  }
  return z * q / (static_cast<double>(n) * q - y * dq);
}

inline double relative_residual(const std::vector<Complex>& a, Complex z, double& abs_bound) {
  Complex p, dp;
  double mag;
  horner(a, z, p, dp, mag);
  const double eps = std::numeric_limits<double>::epsilon();
  abs_bound = std::abs(p) + 2.0 * static_cast<double>(a.size()) * eps * mag;
  return mag > 0 ? std::abs(p) / mag : 0.0;
}

}  // namespace detail

/// Aberth-Ehrlich simultaneous iteration followed by Newton polishing.
/// Roots are returned unmerged and in lexicographic order.
inline std::vector<Complex> aberth(const std::vector<Complex>& coeffs, const RootOptions& opt = {}) {
  std::vector<Complex> a = coeffs;
  while (!a.empty() && a.back() == Complex(0)) a.pop_back();
  const int n = static_cast<int>(a.size()) - 1;
  if (n < 1) fail(ErrorCode::InvalidInput, "root finding needs degree >= 1");

  std::vector<Complex> z;
  int zeros = 0;
  while (a[static_cast<std::size_t>(zeros)] == Complex(0)) ++zeros;
  a.erase(a.begin(), a.begin() + zeros);
  const int m = n - zeros;
  if (m > 0) {
    double r = std::pow(std::abs(a.front()) / std::abs(a.back()), 1.0 / m);
    if (!(r > 0) || !std::isfinite(r)) r = 1;
    for (int k = 0; k < m; ++k) z.push_back(std::polar(r, 2 * M_PI * k / m + 0.4));

    const double eps = std::numeric_limits<double>::epsilon();
    bool done = false;
    for (int it = 0; it < opt.max_iter && !done; ++it) {
      done = true;
      for (int k = 0; k < m; ++k) {
        Complex ratio = detail::newton_ratio(a, z[static_cast<std::size_t>(k)]);
        if (!std::isfinite(ratio.real()) || !std::isfinite(ratio.imag())) continue;
        Complex s = 0;
        for (int j = 0; j < m; ++j)
          if (j != k) s += 1.0 / (z[static_cast<std::size_t>(k)] - z[static_cast<std::size_t>(j)]);
        Complex w = ratio / (1.0 - ratio * s);
        z[static_cast<std::size_t>(k)] -= w;
        if (std::abs(w) > 4 * eps * std::max(1.0, std::abs(z[static_cast<std::size_t>(k)]))) done = false;
      }
    }
    for (auto& x : z)
      for (int polish = 0; polish < 3; ++polish) {
        Complex w = detail::newton_ratio(a, x);
        if (std::isfinite(w.real()) && std::isfinite(w.imag()) && std::abs(w) < 1e-3 * std::max(1.0, std::abs(x)))
          x -= w;
      }
  }
  z.insert(z.end(), static_cast<std::size_t>(zeros), Complex(0));
  std::sort(z.begin(), z.end(), detail::lex_less);
  return z;
}

namespace detail {

inline CertifiedRoot certify(const std::vector<Complex>& a, Complex z, int mult, const RootOptions& opt) {
  CertifiedRoot r;
  r.z = z;
  r.multiplicity = mult;
  double rel = relative_residual(a, z, r.residual_bound);
  if (rel > opt.residual_tol)
    fail(ErrorCode::NonConvergence, "root residual " + std::to_string(rel) + " above target");
  Complex p, dp;
  double mag;
  horner(a, z, p, dp, mag);
  const int n = static_cast<int>(a.size()) - 1;
  r.radius = std::abs(dp) > 0 ? n * r.residual_bound / std::abs(dp) : std::numeric_limits<double>::infinity();
  return r;
}

}  // namespace detail

/// Roots of a rational polynomial. Multiplicities are exact (square-free
/// decomposition); each square-free factor is solved numerically.
inline std::vector<CertifiedRoot> roots_certified(const Poly<Rat>& p, const RootOptions& opt = {}) {
  if (p.degree() < 1) fail(ErrorCode::InvalidInput, "root finding needs degree >= 1");
  std::vector<CertifiedRoot> out;
  for (const auto& [factor, mult] : squarefree_decomposition(p)) {
    std::vector<Complex> a;
    Poly<Rat> prim = primitive_part(factor).first;
    for (const auto& c : prim.coeffs()) a.emplace_back(c.get_d());
    for (const auto& z : aberth(a, opt)) out.push_back(detail::certify(a, z, mult, opt));
  }
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return detail::lex_less(x.z, y.z); });
  return out;
}

/// Roots of a complex polynomial. Repeated roots show up as clusters, which are
/// merged into their centroid with the cluster size as multiplicity.
inline std::vector<CertifiedRoot> roots_certified(const Poly<Complex>& p, const RootOptions& opt = {}) {
  if (p.degree() < 1) fail(ErrorCode::InvalidInput, "root finding needs degree >= 1");
  const std::vector<Complex>& a = p.coeffs();
  std::vector<Complex> z = aberth(a, opt);
  std::vector<int> group(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) group[i] = static_cast<int>(i);
  std::function<int(int)> find = [&](int i) { return group[static_cast<std::size_t>(i)] == i ? i : group[static_cast<std::size_t>(i)] = find(group[static_cast<std::size_t>(i)]); };
  for (std::size_t i = 0; i < z.size(); ++i)
    for (std::size_t j = i + 1; j < z.size(); ++j)
      if (std::abs(z[i] - z[j]) < opt.cluster_tol * std::max(1.0, std::abs(z[i])))
        group[static_cast<std::size_t>(find(static_cast<int>(j)))] = find(static_cast<int>(i));
  std::vector<CertifiedRoot> out;
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (find(static_cast<int>(i)) != static_cast<int>(i)) continue;
    Complex sum = 0;
    int k = 0;
    double spread = 0;
    for (std::size_t j = 0; j < z.size(); ++j)
      if (find(static_cast<int>(j)) == static_cast<int>(i)) {
        sum += z[j];
        ++k;
      }
    Complex c = sum / static_cast<double>(k);
    for (std::size_t j = 0; j < z.size(); ++j)
      if (find(static_cast<int>(j)) == static_cast<int>(i)) spread = std::max(spread, std::abs(z[j] - c));
    CertifiedRoot r;
    if (k == 1) {
      r = detail::certify(a, c, 1, opt);
    } else {
      r.z = c;
      r.multiplicity = k;
      double rel = detail::relative_residual(a, c, r.residual_bound);
      if (rel > opt.residual_tol) fail(ErrorCode::NonConvergence, "clustered root residual above target");
      r.radius = 2 * spread + opt.cluster_tol;
    }
    out.push_back(r);
  }
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return detail::lex_less(x.z, y.z); });
  return out;
}

/// Continued-fraction convergents of x with denominator at most max_den.
inline std::vector<Rat> convergents(double x, const Int& max_den, int max_terms = 40) {
  std::vector<Rat> out;
  Int h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  double t = x;
  for (int i = 0; i < max_terms && std::isfinite(t); ++i) {
    double fl = std::floor(t);
    if (std::abs(fl) > 1e18) break;
    Int a(fl);
    Int h2 = a * h1 + h0, k2 = a * k1 + k0;
    if (k2 > max_den) break;
    out.push_back(make_rat(h2, k2));
    h0 = h1;
    h1 = h2;
    k0 = k1;
    k1 = k2;
    double frac = t - fl;
    if (frac < 1e-15) break;
    t = 1 / frac;
  }
  return out;
}

/// An exact rational root of p near z, if there is one.
inline std::optional<Rat> recognize_rational_root(const Poly<Rat>& p, Complex z) {
  if (std::abs(z.imag()) > 1e-6 * std::max(1.0, std::abs(z))) return std::nullopt;
  Poly<Rat> q = primitive_part(p).first;
  Int lead = abs(q.leading().get_num());
  for (const auto& cand : convergents(z.real(), lead))
    if (q.eval(cand) == 0) return cand;
  return std::nullopt;
}

}  // namespace iterx

#pragma once

#include <complex>

namespace iterx {

/// Coefficient-domain interface used by the generic polynomial code.
/// A value-initialised R{} must be an additive identity that combines with
/// any other element; one_like(x) gives the unit of the ring x lives in.
template <class R>
struct ring_traits {
  static R one_like(const R&) { return R(1); }
  static bool is_zero(const R& x) { return x == R(0); }
  static R from_int_like(const R&, long n) { return R(n); }
};

template <class R>
bool is_zero(const R& x) {
  return ring_traits<R>::is_zero(x);
}

template <class R>
R one_like(const R& x) {
  return ring_traits<R>::one_like(x);
}

template <class R>
R power(R base, unsigned long e) {
  R acc = one_like(base);
  while (e) {
    if (e & 1) acc = acc * base;
    e >>= 1;
    if (e) base = base * base;
  }
  return acc;
}

using Complex = std::complex<double>;

}  // namespace iterx

#pragma once

#include <string>

#include "iterx/error.hpp"
#include "iterx/rat.hpp"
#include "iterx/ring.hpp"

namespace iterx {

/// a + b*sqrt(D) in Q(sqrt D), D a non-square integer. Elements with b = 0
/// are plain rationals and combine with any D.
class QuadNumber {
 public:
  QuadNumber() = default;
  QuadNumber(const Rat& a) : a_(a) {}  // NOLINT(google-explicit-constructor)
  QuadNumber(long a) : a_(a) {}        // NOLINT(google-explicit-constructor)
  QuadNumber(const Rat& a, const Rat& b, const Int& d) : a_(a), b_(b), d_(b == 0 ? Int(0) : d) {}

  const Rat& rational_part() const { return a_; }
  const Rat& sqrt_coeff() const { return b_; }
  const Int& radicand() const { return d_; }
  bool is_rational() const { return b_ == 0; }

  QuadNumber conjugate() const { return QuadNumber(a_, -b_, d_); }
  Rat norm() const { return a_ * a_ - Rat(d_) * b_ * b_; }

  double real_approx() const;
  double imag_approx() const;

  friend QuadNumber operator+(const QuadNumber& x, const QuadNumber& y) {
    return QuadNumber(x.a_ + y.a_, x.b_ + y.b_, join(x, y));
  }
  friend QuadNumber operator-(const QuadNumber& x, const QuadNumber& y) {
    return QuadNumber(x.a_ - y.a_, x.b_ - y.b_, join(x, y));
  }
  QuadNumber operator-() const { return QuadNumber(-a_, -b_, d_); }
  friend QuadNumber operator*(const QuadNumber& x, const QuadNumber& y) {
    Int d = join(x, y);
    return QuadNumber(x.a_ * y.a_ + Rat(d) * x.b_ * y.b_, x.a_ * y.b_ + x.b_ * y.a_, d);
  }
  friend QuadNumber operator/(const QuadNumber& x, const QuadNumber& y) {
    Rat n = y.norm();
    if (n == 0) fail(ErrorCode::InvalidInput, "division by zero in Q(sqrt D)");
    QuadNumber t = x * y.conjugate();
    return QuadNumber(t.a_ / n, t.b_ / n, t.d_);
  }
  friend bool operator==(const QuadNumber& x, const QuadNumber& y) { return x.a_ == y.a_ && x.b_ == y.b_; }
  friend bool operator!=(const QuadNumber& x, const QuadNumber& y) { return !(x == y); }

  std::string str() const {
    if (b_ == 0) return a_.get_str();
    return a_.get_str() + (b_ < 0 ? " - " : " + ") + rat_abs(b_).get_str() + "*sqrt(" + d_.get_str() + ")";
  }

  /// max of the heights of the two rational coordinates.
  Int height() const {
    Int h1 = iterx::height(a_), h2 = iterx::height(b_);
    return h1 > h2 ? h1 : h2;
  }

 private:
  static Int join(const QuadNumber& x, const QuadNumber& y) {
    if (x.d_ != 0 && y.d_ != 0 && x.d_ != y.d_) fail(ErrorCode::InvalidInput, "mixed quadratic fields");
    return x.d_ != 0 ? x.d_ : y.d_;
  }

  Rat a_{0};
  Rat b_{0};
  Int d_{0};
};

inline double QuadNumber::real_approx() const {
  double a = a_.get_d();
  if (b_ == 0) return a;
  double d = d_.get_d();
  return d > 0 ? a + b_.get_d() * std::sqrt(d) : a;
}

inline double QuadNumber::imag_approx() const {
  if (b_ == 0) return 0.0;
  double d = d_.get_d();
  return d < 0 ? b_.get_d() * std::sqrt(-d) : 0.0;
}

template <>
struct ring_traits<QuadNumber> {
  static QuadNumber one_like(const QuadNumber&) { return QuadNumber(1); }
  static bool is_zero(const QuadNumber& x) { return x.rational_part() == 0 && x.sqrt_coeff() == 0; }
  static QuadNumber from_int_like(const QuadNumber&, long n) { return QuadNumber(n); }
};

inline std::string to_string(const QuadNumber& x) { return x.str(); }

}  // namespace iterx

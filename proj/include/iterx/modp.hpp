#pragma once

#include <string>

#include "iterx/error.hpp"
#include "iterx/poly.hpp"
#include "iterx/rat.hpp"

namespace iterx {

/// Element of F_p. A default-constructed value is zero with the prime left
/// open; it adopts the prime of whatever it is combined with.
class ModP {
 public:
  ModP() = default;
  ModP(long value, long p) : p_(p), v_(reduce(value, p)) {}

  long value() const { return v_; }
  long prime() const { return p_; }

  /// Reduction of a p-integral rational.
  static ModP from_rat(const Rat& q, long p) {
    Int den = q.get_den();
    if (mpz_divisible_ui_p(den.get_mpz_t(), static_cast<unsigned long>(p)))
      fail(ErrorCode::InvalidInput, "rational " + q.get_str() + " is not " + std::to_string(p) + "-integral");
    long n = static_cast<long>(mpz_fdiv_ui(q.get_num_mpz_t(), static_cast<unsigned long>(p)));
    long d = static_cast<long>(mpz_fdiv_ui(den.get_mpz_t(), static_cast<unsigned long>(p)));
    return ModP(n, p) / ModP(d, p);
  }

  ModP inverse() const {
    if (v_ == 0) fail(ErrorCode::InvalidInput, "inverse of zero in F_p");
    long a = v_, m = p_, x0 = 1, x1 = 0;
    while (m) {
      long q = a / m;
      long t = a - q * m;
      a = m;
      m = t;
      t = x0 - q * x1;
      x0 = x1;
      x1 = t;
    }
    return ModP(x0, p_);
  }

  friend ModP operator+(const ModP& a, const ModP& b) {
    long p = join(a, b);
    return ModP(a.v_ + b.v_, p);
  }
  friend ModP operator-(const ModP& a, const ModP& b) {
    long p = join(a, b);
    return ModP(a.v_ - b.v_, p);
  }
  ModP operator-() const { return p_ ? ModP(-v_, p_) : ModP(); }
  friend ModP operator*(const ModP& a, const ModP& b) {
    long p = join(a, b);
    return p ? ModP(static_cast<long>((static_cast<__int128>(a.v_) * b.v_) % p), p) : ModP();
  }
  friend ModP operator/(const ModP& a, const ModP& b) { return a * b.inverse(); }
  friend bool operator==(const ModP& a, const ModP& b) { return a.v_ == b.v_; }
  friend bool operator!=(const ModP& a, const ModP& b) { return !(a == b); }

 private:
  static long reduce(long x, long p) {
    if (p <= 0) return 0;
    long r = x % p;
    return r < 0 ? r + p : r;
  }
  static long join(const ModP& a, const ModP& b) {
    if (a.p_ && b.p_ && a.p_ != b.p_) fail(ErrorCode::InvalidInput, "mixed residue characteristics");
    return a.p_ ? a.p_ : b.p_;
  }

  long p_ = 0;
  long v_ = 0;
};

template <>
struct ring_traits<ModP> {
  static ModP one_like(const ModP& x) { return ModP(1, x.prime()); }
  static bool is_zero(const ModP& x) { return x.value() == 0; }
  static ModP from_int_like(const ModP& x, long n) { return ModP(n, x.prime()); }
};

inline std::string to_string(const ModP& x) { return std::to_string(x.value()); }

inline Poly<ModP> reduce_mod_p(const Poly<Rat>& a, long p) {
  return a.map<ModP>([p](const Rat& q) { return ModP::from_rat(q, p); });
}

}  // namespace iterx

#pragma once

#include <climits>
#include <map>
#include <optional>
#include <string>

#include "iterx/error.hpp"
#include "iterx/rat.hpp"
#include "iterx/ring.hpp"

namespace iterx {

/// p^k, cached per thread.
inline const Int& ppow(long p, long k) {
  thread_local std::map<std::pair<long, long>, Int> cache;
  auto key = std::make_pair(p, k);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  Int r;
  mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(k));
  return cache.emplace(key, r).first->second;
}

/// Element of Q_p. Exact values keep a rational unit part; inexact values
/// carry a unit modulo p^(absprec - val). Zero is either exact or O(p^absprec).
/// A default-constructed value is an exact zero with the prime left open.
class PAdic {
 public:
  static constexpr long kInf = LONG_MAX / 4;

  PAdic() = default;

  static PAdic zero(long p, long absprec = kInf) {
    PAdic z;
    z.p_ = p;
    z.absprec_ = absprec;
    return z;
  }

  static PAdic from_rat(const Rat& q, long p, long absprec = kInf) {
    check_prime(p);
    if (q == 0) return zero(p, absprec);
    PAdic x;
    x.p_ = p;
    x.zero_ = false;
    x.val_ = iterx::valuation(q, static_cast<unsigned long>(p));
    Rat u = q;
    if (x.val_ > 0) u /= Rat(ppow(p, x.val_));
    if (x.val_ < 0) u *= Rat(ppow(p, -x.val_));
    x.exact_unit_ = u;
    if (absprec != kInf) return x.with_absprec(absprec);
    return x;
  }

  static PAdic from_int(long n, long p, long absprec = kInf) { return from_rat(Rat(n), p, absprec); }

  long prime() const { return p_; }
  bool is_exact() const { return absprec_ == kInf; }
  /// True for exact zero and for zero to precision.
  bool is_zero() const { return zero_; }
  bool is_exact_zero() const { return zero_ && absprec_ == kInf; }
  std::optional<long> valuation() const { return zero_ ? std::nullopt : std::optional<long>(val_); }
  long absprec() const { return absprec_; }
  long relprec() const { return zero_ ? 0 : (absprec_ == kInf ? kInf : absprec_ - val_); }
  /// Lower bound for the valuation: the valuation, or absprec for a zero.
  long valuation_bound() const { return zero_ ? absprec_ : val_; }

  /// Unit part reduced mod p^k (k <= relprec).
  Int unit_mod(long k) const {
    if (zero_) fail(ErrorCode::DivisionByZeroToPrecision, "unit part of zero");
    const Int& pk = ppow(p_, k);
    Int r;
    if (absprec_ == kInf) {
      Int inv;
      if (!mpz_invert(inv.get_mpz_t(), exact_unit_.get_den_mpz_t(), pk.get_mpz_t()) && k > 0)
        fail(ErrorCode::InvalidInput, "denominator not a unit");
      r = exact_unit_.get_num() * inv;
    } else {
      r = unit_;
    }
    mpz_mod(r.get_mpz_t(), r.get_mpz_t(), pk.get_mpz_t());
    return r;
  }

  /// Residue class mod p of a unit.
  long residue() const {
    if (zero_ || val_ != 0) fail(ErrorCode::InvalidInput, "residue of a non-unit");
    return static_cast<long>(mpz_get_si(unit_mod(1).get_mpz_t()));
  }

  /// The rational p^val * unit; exact values return themselves.
  Rat to_rat() const {
    if (zero_) return Rat(0);
    Rat u = absprec_ == kInf ? exact_unit_ : Rat(unit_);
    if (val_ >= 0) return u * Rat(ppow(p_, val_));
    return u / Rat(ppow(p_, -val_));
  }

  /// Exact value equal to the stored representative.
  PAdic lift_exact() const {
    if (is_exact()) return *this;
    return zero_ ? zero(p_) : from_rat(to_rat(), p_);
  }

  PAdic with_absprec(long n) const {
    if (n >= absprec_) return *this;
    if (zero_ || n <= val_) return zero(p_, n);
    PAdic x = *this;
    x.unit_ = unit_mod(n - val_);
    x.absprec_ = n;
    x.exact_unit_ = 0;
    return x;
  }

  PAdic operator-() const {
    PAdic x = *this;
    if (zero_) return x;
    if (absprec_ == kInf) {
      x.exact_unit_ = -exact_unit_;
    } else {
      x.unit_ = ppow(p_, relprec()) - unit_;
      if (x.unit_ == ppow(p_, relprec())) x.unit_ = 0;
    }
    return x;
  }

  friend PAdic operator+(const PAdic& a, const PAdic& b) {
    long p = join(a, b);
    if (a.is_exact_zero()) return b.p_ ? b : zero(p);
    if (b.is_exact_zero()) return a;
    if (a.is_exact() && b.is_exact()) return from_rat(a.to_rat() + b.to_rat(), p);
    long n = std::min(a.absprec_, b.absprec_);
    long vmin = kInf;
    if (!a.zero_) vmin = std::min(vmin, a.val_);
    if (!b.zero_) vmin = std::min(vmin, b.val_);
    if (vmin >= n) return zero(p, n);
    long k = n - vmin;
    const Int& pk = ppow(p, k);
    Int s = 0;
    for (const PAdic* t : {&a, &b})
      if (!t->zero_ && t->val_ < n) s += t->unit_mod(n - t->val_) * ppow(p, t->val_ - vmin);
    mpz_mod(s.get_mpz_t(), s.get_mpz_t(), pk.get_mpz_t());
    if (s == 0) return zero(p, n);
    long v = static_cast<long>(mpz_scan1(s.get_mpz_t(), 0));
    if (p != 2) {
      v = 0;
      while (mpz_divisible_ui_p(s.get_mpz_t(), static_cast<unsigned long>(p))) {
        mpz_divexact_ui(s.get_mpz_t(), s.get_mpz_t(), static_cast<unsigned long>(p));
        ++v;
      }
    } else {
      mpz_tdiv_q_2exp(s.get_mpz_t(), s.get_mpz_t(), static_cast<mp_bitcnt_t>(v));
    }
    PAdic x;
    x.p_ = p;
    x.zero_ = false;
    x.val_ = vmin + v;
    x.absprec_ = n;
    x.unit_ = s;
    return x;
  }
  friend PAdic operator-(const PAdic& a, const PAdic& b) { return a + (-b); }

  friend PAdic operator*(const PAdic& a, const PAdic& b) {
    long p = join(a, b);
    if (a.is_exact_zero() || b.is_exact_zero()) return zero(p);
    if (a.zero_ && b.zero_) return zero(p, a.absprec_ + b.absprec_);
    if (a.zero_) return zero(p, a.absprec_ + b.val_);
    if (b.zero_) return zero(p, b.absprec_ + a.val_);
    PAdic x;
    x.p_ = p;
    x.zero_ = false;
    x.val_ = a.val_ + b.val_;
    if (a.is_exact() && b.is_exact()) {
      x.exact_unit_ = a.exact_unit_ * b.exact_unit_;
      return x;
    }
    long rel = std::min(a.relprec(), b.relprec());
    x.unit_ = a.unit_mod(rel) * b.unit_mod(rel);
    mpz_mod(x.unit_.get_mpz_t(), x.unit_.get_mpz_t(), ppow(p, rel).get_mpz_t());
    x.absprec_ = x.val_ + rel;
    return x;
  }

  PAdic inverse() const {
    if (zero_) fail(ErrorCode::DivisionByZeroToPrecision, "inverse of a p-adic zero");
    PAdic x;
    x.p_ = p_;
    x.zero_ = false;
    x.val_ = -val_;
    if (is_exact()) {
      x.exact_unit_ = 1 / exact_unit_;
      return x;
    }
    long rel = relprec();
    mpz_invert(x.unit_.get_mpz_t(), unit_.get_mpz_t(), ppow(p_, rel).get_mpz_t());
    x.absprec_ = x.val_ + rel;
    return x;
  }

  friend PAdic operator/(const PAdic& a, const PAdic& b) { return a * b.inverse(); }

  /// Structural equality: same exactness, precision and digits.
  friend bool operator==(const PAdic& a, const PAdic& b) {
    if (a.zero_ != b.zero_ || a.absprec_ != b.absprec_) return false;
    if (a.zero_) return true;
    if (a.val_ != b.val_) return false;
    return a.is_exact() ? a.exact_unit_ == b.exact_unit_ : a.unit_ == b.unit_;
  }
  friend bool operator!=(const PAdic& a, const PAdic& b) { return !(a == b); }

  /// a == b up to the smaller of their precisions.
  bool agrees_with(const PAdic& b) const { return (*this - b).is_zero(); }

  std::string str() const {
    if (is_exact()) return to_rat().get_str();
    std::string s = zero_ ? std::string("0") : to_rat().get_str();
    return s + " + O(" + std::to_string(p_) + "^" + std::to_string(absprec_) + ")";
  }

 private:
  static void check_prime(long p) {
    if (p < 2) fail(ErrorCode::InvalidInput, "p-adic prime must be >= 2");
  }
  static long join(const PAdic& a, const PAdic& b) {
    if (a.p_ && b.p_ && a.p_ != b.p_) fail(ErrorCode::InvalidInput, "mixed p-adic primes");
    return a.p_ ? a.p_ : b.p_;
  }

  long p_ = 0;
  bool zero_ = true;
  long val_ = 0;
  long absprec_ = kInf;
  Int unit_;
  Rat exact_unit_;
};

template <>
struct ring_traits<PAdic> {
  static PAdic one_like(const PAdic& x) { return PAdic::from_int(1, x.prime() ? x.prime() : 2); }
  /// Only exact zeros are dropped from polynomials; O(p^k) terms keep their precision.
  static bool is_zero(const PAdic& x) { return x.is_exact_zero(); }
  static PAdic from_int_like(const PAdic& x, long n) { return PAdic::from_int(n, x.prime() ? x.prime() : 2); }
};

inline std::string to_string(const PAdic& x) { return x.str(); }

/// Square root of a p-adic unit square (val even). p = 2 needs u = 1 mod 8 and loses one digit.
inline PAdic sqrt_unit(const PAdic& x, long prec = 60) {
  if (x.is_zero()) fail(ErrorCode::DivisionByZeroToPrecision, "square root of zero");
  long p = x.prime();
  long v = *x.valuation();
  if (v % 2 != 0) fail(ErrorCode::InvalidInput, "odd valuation has no square root");
  if (x.is_exact()) {
    Rat q = x.to_rat();
    Int rn, rd;
    if (q > 0 && mpz_perfect_square_p(q.get_num_mpz_t()) && mpz_perfect_square_p(q.get_den_mpz_t())) {
      mpz_sqrt(rn.get_mpz_t(), q.get_num_mpz_t());
      mpz_sqrt(rd.get_mpz_t(), q.get_den_mpz_t());
      return PAdic::from_rat(make_rat(rn, rd), p);
    }
  }
  long rel = std::min(x.relprec(), prec);
  Int u = x.unit_mod(rel);
  Int r;
  if (p == 2) {
    if (rel < 3) fail(ErrorCode::PrecisionExhausted, "2-adic square root needs 3 digits");
    if (mpz_fdiv_ui(u.get_mpz_t(), 8) != 1) fail(ErrorCode::InvalidInput, "2-adic unit is not a square");
    // r^2 = u mod 2^k lifted bit by bit: fix r odd with r = 1 mod 4
    r = 1;
    for (long k = 3; k < rel; ++k) {
      Int t = r * r - u;
      if (mpz_tstbit(t.get_mpz_t(), static_cast<mp_bitcnt_t>(k))) r += Int(1) << static_cast<unsigned long>(k - 1);
    }
    PAdic out = PAdic::from_rat(Rat(r), 2, rel - 1);
    return out * PAdic::from_rat(Rat(ppow(2, v / 2)), 2);
  }
  long res = static_cast<long>(mpz_fdiv_ui(u.get_mpz_t(), static_cast<unsigned long>(p)));
  long root = -1;
  for (long t = 1; t < p; ++t)
    if ((t * t) % p == res) {
      root = t;
      break;
    }
  if (root < 0) fail(ErrorCode::InvalidInput, "unit is not a square mod p");
  r = root;
  for (long k = 1; k < rel; k *= 2) {
    long kk = std::min(2 * k, rel);
    const Int& pk = ppow(p, kk);
    Int inv, two_r = 2 * r;
    mpz_invert(inv.get_mpz_t(), two_r.get_mpz_t(), pk.get_mpz_t());
    r = r - (r * r - u) * inv;
    mpz_mod(r.get_mpz_t(), r.get_mpz_t(), pk.get_mpz_t());
  }
  PAdic out = PAdic::from_rat(Rat(r), p, rel);
  return v >= 0 ? out * PAdic::from_rat(Rat(ppow(p, v / 2)), p) : out / PAdic::from_rat(Rat(ppow(p, -v / 2)), p);
}

/// Rational reconstruction of x mod p^n: a/b with |a|, b <= sqrt(p^n / 2).
inline std::optional<Rat> rational_reconstruction(const PAdic& x) {
  if (x.is_exact()) return x.to_rat();
  if (x.is_zero()) return Rat(0);
  long v = *x.valuation();
  long n = x.relprec();
  const Int& m = ppow(x.prime(), n);
  Int u = x.unit_mod(n);
  Int bound;
  mpz_sqrt(bound.get_mpz_t(), Int(m / 2).get_mpz_t());
  Int r0 = m, r1 = u, s0 = 0, s1 = 1;
  while (r1 > bound) {
    Int q = r0 / r1;
    Int r2 = r0 - q * r1, s2 = s0 - q * s1;
    r0 = r1;
    r1 = r2;
    s0 = s1;
    s1 = s2;
  }
  if (s1 == 0 || abs(s1) > bound) return std::nullopt;
  Rat q = make_rat(r1, s1);
  if (v >= 0) q *= Rat(ppow(x.prime(), v));
  else q /= Rat(ppow(x.prime(), -v));
  return q;
}

}  // namespace iterx

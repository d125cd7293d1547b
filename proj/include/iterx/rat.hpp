#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <cctype>
#include <string>

#include "iterx/error.hpp"
#include "iterx/ring.hpp"

namespace iterx {

/// Exact rationals; mpq_class keeps gcd(num, den) = 1 and den > 0.
using Rat = mpq_class;
using Int = mpz_class;

inline Rat make_rat(const Int& num, const Int& den = 1) {
  if (den == 0) fail(ErrorCode::InvalidInput, "zero denominator");
  Rat q(num, den);
  q.canonicalize();
  return q;
}

/// Parses "p", "-p" or "p/q".
inline Rat parse_rat(const std::string& text) {
  std::string s;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) s.push_back(ch);
  if (s.empty()) fail(ErrorCode::InvalidInput, "empty rational literal");
  auto valid_int = [](const std::string& t) {
    std::size_t i = (!t.empty() && (t[0] == '-' || t[0] == '+')) ? 1 : 0;
    if (i == t.size()) return false;
    return std::all_of(t.begin() + static_cast<long>(i), t.end(),
                       [](char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; });
  };
  auto slash = s.find('/');
  std::string num = s.substr(0, slash);
  std::string den = slash == std::string::npos ? "1" : s.substr(slash + 1);
  if (!num.empty() && num[0] == '+') num.erase(0, 1);
  if (!valid_int(num) || !valid_int(den) || den[0] == '-')
    fail(ErrorCode::InvalidInput, "bad rational literal '" + text + "'");
  return make_rat(Int(num), Int(den));
}

inline std::string to_string(const Rat& q) { return q.get_str(); }
inline std::string to_string(const Int& z) { return z.get_str(); }

/// Naive height max(|num|, den).
inline Int height(const Rat& q) {
  Int a = abs(q.get_num());
  return a > q.get_den() ? a : Int(q.get_den());
}

inline std::size_t decimal_digits(const Int& z) { return mpz_sizeinbase(z.get_mpz_t(), 10); }

inline long valuation(const Int& z, unsigned long p) {
  if (z == 0) fail(ErrorCode::InvalidInput, "valuation of zero");
  Int t = z;
  long v = 0;
  while (mpz_divisible_ui_p(t.get_mpz_t(), p)) {
    mpz_divexact_ui(t.get_mpz_t(), t.get_mpz_t(), p);
    ++v;
  }
  return v;
}

inline long valuation(const Rat& q, unsigned long p) {
  return valuation(q.get_num(), p) - valuation(q.get_den(), p);
}

inline Int ipow(const Int& base, unsigned long e) {
  Int r;
  mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
  return r;
}

inline Rat floor_rat(const Rat& q) {
  Int r;
  mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return Rat(r);
}

inline Rat rat_abs(const Rat& q) { return q < 0 ? Rat(-q) : q; }

}  // namespace iterx

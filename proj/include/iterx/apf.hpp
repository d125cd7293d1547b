#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "iterx/error.hpp"
#include "iterx/modp.hpp"
#include "iterx/newton.hpp"
#include "iterx/padic.hpp"
#include "iterx/rational_map.hpp"
#include "iterx/tower.hpp"

namespace iterx {

/// Reduction of φ^m equals c x^(p^r) with deg φ^m = p^r.
struct PowerLikeData {
  int m = 0;
  int r = 0;
  long c = 0;
  long p = 0;
  int degree = 0;  // p^r
};

namespace detail {

inline RationalMap<ModP> reduced_coprime(const RationalMap<ModP>& f) {
  Poly<ModP> g = gcd_field(f.num, f.den);
  RationalMap<ModP> out = f;
  if (g.degree() > 0) out = {divmod(f.num, g).first, divmod(f.den, g).first};
  detail::normalize_content(out.num, out.den);
  return out;
}

inline std::optional<int> log_p(long n, long p) {
  int r = 0;
  while (n > 1 && n % p == 0) {
    n /= p;
    ++r;
  }
  return n == 1 ? std::optional<int>(r) : std::nullopt;
}

}  // namespace detail

/// Least m <= m_max with the reduction of φ^m a monomial c x^(p^r).
inline PowerLikeData powerlike_order(const RatMap& phi, long p, int m_max = 8) {
  if (phi.degree() < 2) fail(ErrorCode::InvalidInput, "power-like test needs degree >= 2");
  RationalMap<ModP> red = detail::reduced_coprime(reduce_map(phi, p));
  if (red.degree() != phi.degree())
    fail(ErrorCode::NotGoodReduction, "degree drops from " + std::to_string(phi.degree()) + " to " +
                                          std::to_string(red.degree()) + " mod " + std::to_string(p));
  RationalMap<ModP> it = red;
  for (int m = 1; m <= m_max; ++m) {
    if (m > 1) it = detail::reduced_coprime(compose(red, it));
    const auto& num = it.num;
    bool monomial = it.den.degree() == 0 && num.degree() >= 1;
    for (int i = 0; monomial && i < num.degree(); ++i)
      if (!is_zero(num[i])) monomial = false;
    if (!monomial) continue;
    auto r = detail::log_p(num.degree(), p);
    if (!r || *r < 1) continue;
    PowerLikeData out;
    out.m = m;
    out.r = *r;
    out.p = p;
    out.degree = num.degree();
    out.c = (num.leading() / it.den.leading()).value();
    return out;
  }
  fail(ErrorCode::NotPowerLikeWithin, "no m <= " + std::to_string(m_max) + " with reduction c x^(p^r)");
}

/// γ with v(γ) > 0 and δ with v(δ) < 0 (nullopt for ∞).
struct FixedPoints {
  PAdic gamma;
  std::optional<PAdic> delta;
};

namespace detail {

/// The unique root of positive valuation of F, from the initial segment of its polygon.
inline PAdic small_root(const Poly<Rat>& F, long p, long prec, const char* what) {
  if (F.coeff(0) == 0) return PAdic::zero(p);
  Poly<PAdic> Fp = padic_poly(F, p);
  NewtonPolygon np = newton_polygon(Fp);
  int count = 0;
  for (const auto& s : np.segments)
    if (s.slope < 0) count += s.length;
  if (count != 1 || np.segments.empty() || np.segments[0].start != 0)
    fail(ErrorCode::AmbiguousPolygon, std::string("expected exactly one ") + what + " of the required valuation, polygon " + to_string(np));
  PAdic root;
  try {
    root = hensel_root(Fp, PAdic::zero(p), prec);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::PrecisionExhausted && e.code() != ErrorCode::HenselConditionFailed) throw;
    root = hensel_root(Fp, PAdic::zero(p), 2 * prec);
  }
  if (auto q = rational_reconstruction(root); q && F.eval(*q) == 0) return PAdic::from_rat(*q, p);
  return root;
}

}  // namespace detail

inline FixedPoints fixed_points(const RatMap& phim, long p, long prec = 60) {
  Poly<Rat> F = phim.num - phim.den.shifted(1);
  if (F.is_zero()) fail(ErrorCode::AmbiguousPolygon, "map is the identity");
  FixedPoints out;
  out.gamma = detail::small_root(F, p, prec, "fixed point");
  int top = phim.degree() + 1;
  if (F.degree() < top) return out;
  std::vector<Rat> rev(static_cast<std::size_t>(top) + 1);
  for (int i = 0; i <= top; ++i) rev[static_cast<std::size_t>(top - i)] = F.coeff(i);
  PAdic inv = detail::small_root(Poly<Rat>(rev), p, prec, "fixed point near infinity");
  if (inv.is_zero()) fail(ErrorCode::AmbiguousPolygon, "fixed point at infinity not isolated");
  out.delta = inv.inverse();
  return out;
}

/// ψ^m = μ ∘ φ^m ∘ μ^-1 = f1/g1 with s_0 = 0, t_D = 0, s_D = t_0 = 1.
struct ConjugatedModel {
  PAdic gamma;
  std::optional<PAdic> delta;
  TowerElem u;
  LevelPtr base;  // E_1: Q_p, or one inert level when u needs it
  Mobius<TowerElem> mu;
  Poly<TowerElem> f1;  // s_i
  Poly<TowerElem> g1;  // t_i
  int degree = 0;
  long p = 0;
  bool exact = false;
};

namespace detail {


/// Monic irreducible polynomials of degree f over F_p, smallest first.
inline std::optional<Poly<Rat>> first_irreducible(long p, int f) {
  long total = 1;
  for (int k = 0; k < f; ++k) total *= p;
  for (long code = 0; code < total; ++code) {
    std::vector<Rat> c(static_cast<std::size_t>(f) + 1);
    long t = code;
    for (int k = 0; k < f; ++k) {
      c[static_cast<std::size_t>(k)] = t % p;
      t /= p;
    }
    c[static_cast<std::size_t>(f)] = 1;
    Poly<Rat> g(c);
    if (irreducible_mod_p(reduce_mod_p(g, p), p)) return g;
  }
  return std::nullopt;
}

/// Newton iteration for u^k = w from a residue solution u0, capped at prec.
inline TowerElem lift_unit_root(TowerElem u, const TowerElem& w, long k, long prec) {
  long p = w.prime();
  TowerElem kk = TowerElem::from_rat(k, p);
  for (int it = 0; it < 200; ++it) {
    TowerElem diff = power(u, static_cast<unsigned long>(k)) - w;
    auto v = diff.valuation();
    if (!v || *v >= prec) return with_absprec(u, prec);
    u = with_absprec(u - diff / (kk * power(u, static_cast<unsigned long>(k - 1))), prec + 4);
  }
  fail(ErrorCode::UnitEquationUnsolvableAtPrecision, "Newton iteration for u did not converge");
}

inline bool is_one_to_precision(const TowerElem& x) { return (x - TowerElem::from_rat(1, x.prime())).is_zero(); }

inline TowerElem exact_cast(const TowerElem& x, const TowerElem& target, const char* what) {
  if (!(x - target).is_zero()) fail(ErrorCode::CertificateFailure, std::string("model invariant fails: ") + what);
  return target;
}

}  // namespace detail

/// Solves u^(D-1) = w for a unit w, adjoining an inert level of degree <= max_inert if needed.
inline std::pair<TowerElem, LevelPtr> solve_unit_equation(const TowerElem& w, int D, long p, long prec, int max_inert = 4) {
  auto vw = w.valuation();
  if (!vw || *vw != 0) fail(ErrorCode::UnitEquationUnsolvableAtPrecision, "right-hand side is not a unit");
  long k = D - 1;
  if (detail::is_one_to_precision(w) && w.is_exact()) return {TowerElem::from_rat(1, p), nullptr};
  if (w.is_scalar()) {
    long wr = w.scalar().residue();
    for (long t = 1; t < p; ++t) {
      long acc = 1;
      for (long e = 0; e < k; ++e) acc = acc * t % p;
      if (acc == wr) return {detail::lift_unit_root(TowerElem::from_rat(t, p), w, k, prec), nullptr};
    }
  }
  for (int f = 2; f <= max_inert; ++f) {
    auto g = detail::first_irreducible(p, f);
    if (!g) continue;
    LevelPtr L = push_inert(*g, p, "w");
    long total = 1;
    for (int j = 0; j < f; ++j) total *= p;
    for (long code = 1; code < total; ++code) {
      std::vector<TowerElem> c;
      long t = code;
      for (int j = 0; j < f; ++j) {
        c.push_back(TowerElem::from_rat(t % p, p));
        t /= p;
      }
      TowerElem u0 = TowerElem::from_coeffs(L, c);
      auto v = (power(u0, static_cast<unsigned long>(k)) - w).valuation();
      if (v && *v == 0) continue;
      return {detail::lift_unit_root(u0, w, k, prec), L};
    }
  }
  fail(ErrorCode::ResidueExtensionTooLarge, "u^" + std::to_string(k) + " = w needs a residue extension of degree > " +
                                                std::to_string(max_inert));
}

inline ConjugatedModel normalizing_model(const RatMap& phim, const FixedPoints& fp, long p, long prec = 60, int max_inert = 4) {
  ConjugatedModel model;
  model.p = p;
  model.gamma = fp.gamma;
  model.delta = fp.delta;
  model.degree = phim.degree();
  const int D = model.degree;
  // χ = ν ∘ φ^m ∘ ν^-1 with ν = (x - γ)/(1 - x/δ)
  Poly<TowerElem> sn, tn;
  bool exact = fp.gamma.is_exact() && (!fp.delta || fp.delta->is_exact());
  if (exact) {
    Rat g = fp.gamma.to_rat();
    Rat c = fp.delta ? Rat(-1 / fp.delta->to_rat()) : Rat(0);
    RatMap chi = conjugate(phim, Mobius<Rat>{Rat(1), Rat(-g), c, Rat(1)});
    sn = tower_poly(chi.num, p);
    tn = tower_poly(chi.den, p);
  } else {
    TowerElem one = TowerElem::from_rat(1, p), zero(PAdic::zero(p));
    TowerElem c = fp.delta ? TowerElem(-fp.delta->inverse()) : zero;
    RationalMap<TowerElem> phi_t{tower_poly(phim.num, p), tower_poly(phim.den, p)};
    RationalMap<TowerElem> chi = conjugate(phi_t, Mobius<TowerElem>{one, TowerElem(-fp.gamma), c, one});
    sn = chi.num;
    tn = chi.den;
  }
  TowerElem w = sn.coeff(D) / tn.coeff(0);
  auto [u, base] = solve_unit_equation(w, D, p, prec, max_inert);
  model.u = u;
  model.base = base;
  // ψ(x) = u χ(x/u): s_i = u s'_i u^(D-i), t_i = t'_i u^(D-i), then divide by s_D
  std::vector<TowerElem> upow{TowerElem::from_rat(1, p)};
  for (int i = 1; i <= D; ++i) upow.push_back(upow.back() * u);
  std::vector<TowerElem> s(static_cast<std::size_t>(D) + 1), t(static_cast<std::size_t>(D) + 1);
  for (int i = 0; i <= D; ++i) {
    s[static_cast<std::size_t>(i)] = u * sn.coeff(i) * upow[static_cast<std::size_t>(D - i)];
    t[static_cast<std::size_t>(i)] = tn.coeff(i) * upow[static_cast<std::size_t>(D - i)];
  }
  TowerElem scale = tower_inverse(s[static_cast<std::size_t>(D)]);
  for (auto& x : s) x = x * scale;
  for (auto& x : t) x = x * scale;
  TowerElem one = TowerElem::from_rat(1, p), zero(PAdic::zero(p));
  s[0] = detail::exact_cast(s[0], zero, "s_0 = 0");
  t[static_cast<std::size_t>(D)] = detail::exact_cast(t[static_cast<std::size_t>(D)], zero, "t_D = 0");
  s[static_cast<std::size_t>(D)] = detail::exact_cast(s[static_cast<std::size_t>(D)], one, "s_D = 1");
  t[0] = detail::exact_cast(t[0], one, "t_0 = 1");
  for (int i = 1; i <= D; ++i) {
    for (const TowerElem* x : {&s[static_cast<std::size_t>(i)], &t[static_cast<std::size_t>(i)]}) {
      if (i == D && x == &s[static_cast<std::size_t>(D)]) continue;
      auto v = x->valuation();
      if (v && *v <= 0)
        fail(ErrorCode::CertificateFailure, "model coefficient of x^" + std::to_string(i) + " is not in the maximal ideal");
    }
  }
  model.f1 = Poly<TowerElem>(s);
  model.g1 = Poly<TowerElem>(t);
  TowerElem cdelta = fp.delta ? TowerElem(-fp.delta->inverse()) : zero;
  model.mu = Mobius<TowerElem>{u, -(u * TowerElem(fp.gamma)), cdelta, one};
  model.exact = exact && u.is_exact();
  return model;
}

inline int apf_sign(long p) { return p % 2 ? 1 : -1; }  // (-1)^(p+1)

/// h_n(x) = f1(σx) + (-1)^p π_prev g1(σx), σ = (-1)^(p+1).
inline Poly<TowerElem> tower_step_poly(const ConjugatedModel& model, const TowerElem& pi_prev) {
  const long p = model.p;
  TowerElem sgn_p = TowerElem::from_rat(p % 2 ? -1 : 1, p);  // (-1)^p
  TowerElem lift = sgn_p * pi_prev;
  std::vector<TowerElem> h(static_cast<std::size_t>(model.degree) + 1);
  for (int i = 0; i <= model.degree; ++i) {
    TowerElem a = model.f1.coeff(i);
    const TowerElem& b = model.g1.coeff(i);
    if (!b.is_exact_zero()) a = a + lift * b;
    if (apf_sign(p) < 0 && i % 2) a = -a;
    h[static_cast<std::size_t>(i)] = a;
  }
  return Poly<TowerElem>(h);
}

struct APFLevelRecord {
  int n = 0;
  int qn = 0;
  std::vector<std::optional<Rat>> coeff_vals;  // middle coefficients, v_{E_1} units; nullopt = exact zero
  std::vector<bool> coeff_is_bound;             // true when only a precision bound is known
  std::vector<std::pair<int, Rat>> polygon;
  Rat slope;
  bool single_segment = false;
  bool norm_ok = false;
  bool norm_exact = false;
  bool replay_ok = false;
  bool conjugation_replay_ok = false;
  std::optional<Rat> replay_precision;  // nullopt: exact zero
};

struct APFCertificate {
  long p = 0;
  PowerLikeData powerlike;
  std::string gamma, delta, u;
  std::string base_field;
  std::vector<APFLevelRecord> levels;
  std::optional<Rat> epsilon;  // nullopt: no nonzero middle coefficient
  bool q_constant = false;
  bool coefficients_level_independent = false;
  std::string epsilon_units = "v_E1, normalized by v_E1(pi_1) = 1";
  std::string basepoint;
  std::string first_failure;

  bool pass() const { return first_failure.empty(); }
  std::string verdict() const { return pass() ? "pass" : "fail"; }
};

struct APFResult {
  PowerLikeData powerlike;
  FixedPoints fixed;
  ConjugatedModel model;
  std::vector<LevelPtr> levels;  // E_2, ..., E_{N+1}
  std::vector<TowerElem> uniformizers;  // π_1, ..., π_{N+1}
  TowerElem basepoint;
  APFCertificate certificate;
};

struct APFOptions {
  int depth = 0;  // 0: 3 when p^r > 8, else 6
  int m_max = 8;
  long precision = 60;
  int max_inert = 4;
};

namespace detail {

/// φ^m(μ^-1(σπ_n)) = μ^-1(σπ_{n-1}), cross-multiplied so no division is needed.
inline TowerElem conjugation_residual(const RatMap& phim, const ConjugatedModel& model, const TowerElem& spi_n,
                                      const TowerElem& spi_prev, long prec) {
  const long p = model.p;
  const int D = phim.degree();
  const TowerElem& u = model.u;
  TowerElem ug = u * TowerElem(model.gamma);
  TowerElem dinv = model.delta ? TowerElem(model.delta->inverse()) : TowerElem(PAdic::zero(p));
  auto inv_mu = [&](const TowerElem& y) { return std::make_pair(y + ug, u + y * dinv); };
  auto [A, B] = inv_mu(spi_n);
  auto [A1, B1] = inv_mu(spi_prev);
  std::vector<TowerElem> bpow{TowerElem::from_rat(1, p)};
  bool b_one = model.delta == std::nullopt && u.is_exact() && is_one_to_precision(u);
  for (int k = 1; k <= D; ++k) bpow.push_back(b_one ? bpow[0] : bpow.back() * B);
  auto conv = [&](const Rat& c) { return prec > 0 && !model.exact ? TowerElem(PAdic::from_rat(c, p, prec)) : TowerElem::from_rat(c, p); };
  auto homog = [&](const Poly<Rat>& f) {
    TowerElem acc(PAdic::zero(p));
    for (int i = D; i >= 0; --i) {
      acc = acc * A;
      Rat c = f.coeff(i);
      if (c != 0) acc = acc + conv(c) * bpow[static_cast<std::size_t>(D - i)];
    }
    return acc;
  };
  return homog(phim.num) * B1 - A1 * homog(phim.den);
}

inline void record_failure(APFCertificate& cert, const std::string& what) {
  if (cert.first_failure.empty()) cert.first_failure = what;
}

}  // namespace detail

inline APFResult build_apf_tower(const RatMap& phi, long p, const APFOptions& opt = {}) {
  APFResult res;
  res.powerlike = powerlike_order(phi, p, opt.m_max);
  const int D = res.powerlike.degree;
  const int depth = opt.depth > 0 ? opt.depth : (D > 8 ? 3 : 6);
  RatMap phim = iterate(phi, res.powerlike.m);
  res.fixed = fixed_points(phim, p, opt.precision);
  res.model = normalizing_model(phim, res.fixed, p, opt.precision, opt.max_inert);
  const ConjugatedModel& model = res.model;
  APFCertificate& cert = res.certificate;
  cert.p = p;
  cert.powerlike = res.powerlike;
  cert.gamma = res.fixed.gamma.str();
  cert.delta = res.fixed.delta ? res.fixed.delta->str() : "inf";
  cert.u = model.u.str();
  cert.base_field = model.base ? "Q_" + std::to_string(p) + "(w), w root of " + model.base->poly.coeff(0).str() +
                                     " + ... (inert, degree " + std::to_string(model.base->degree) + ")"
                               : "Q_" + std::to_string(p);
  const TowerElem sigma = TowerElem::from_rat(apf_sign(p), p);
  LevelPtr cur = model.base;
  TowerElem pi = TowerElem::from_rat(p, p);
  res.uniformizers.push_back(pi);
  const Rat e1(ramification_index(model.base));
  std::vector<Poly<TowerElem>> hs;
  for (int n = 2; n <= depth + 1; ++n) {
    APFLevelRecord rec;
    rec.n = n;
    Poly<TowerElem> h = tower_step_poly(model, pi);
    hs.push_back(h);
    rec.qn = h.degree();
    for (int i = 1; i < D; ++i) {
      const TowerElem& a = h.coeff(i);
      auto v = a.valuation_bound();
      rec.coeff_vals.push_back(v ? std::optional<Rat>(*v * e1) : std::nullopt);
      rec.coeff_is_bound.push_back(!a.is_exact_zero() && a.is_zero());
      if (v && (!cert.epsilon || *v * e1 < *cert.epsilon)) cert.epsilon = *v * e1;
    }
    NewtonPolygon np = newton_polygon(h, cur);
    rec.polygon = np.vertices;
    rec.single_segment = np.single_segment();
    rec.slope = np.segments.empty() ? Rat(0) : np.segments.front().slope;
    if (!rec.single_segment || rec.slope != Rat(-1, D))
      detail::record_failure(cert, "level " + std::to_string(n) + ": polygon is not a single segment of slope -1/" + std::to_string(D));
    LevelPtr next;
    try {
      next = push_eisenstein(cur, h, "pi" + std::to_string(n));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NotEisenstein) throw;
      detail::record_failure(cert, "level " + std::to_string(n) + ": h_n is not Eisenstein");
      cert.levels.push_back(rec);
      break;
    }
    TowerElem pin = TowerElem::generator(next);
    TowerElem nrm = norm_step(pin, next) - pi;
    rec.norm_exact = nrm.is_exact_zero();
    rec.norm_ok = nrm.is_zero();
    if (!rec.norm_ok) detail::record_failure(cert, "level " + std::to_string(n) + ": N(pi_n) != pi_(n-1)");
    TowerElem spin = sigma * pin, spi = sigma * pi;
    TowerElem replay = model.f1.eval(spin) - spi * model.g1.eval(spin);
    rec.replay_ok = replay.is_zero();
    rec.replay_precision = replay.absprec();
    if (!rec.replay_ok) detail::record_failure(cert, "level " + std::to_string(n) + ": psi^m(sigma pi_n) != sigma pi_(n-1)");
    TowerElem conj = detail::conjugation_residual(phim, model, spin, spi, opt.precision);
    rec.conjugation_replay_ok = conj.is_zero();
    if (!rec.conjugation_replay_ok)
      detail::record_failure(cert, "level " + std::to_string(n) + ": phi^m does not carry mu^-1(sigma pi_n) to mu^-1(sigma pi_(n-1))");
    cert.levels.push_back(rec);
    res.levels.push_back(next);
    res.uniformizers.push_back(pin);
    cur = next;
    pi = pin;
  }
  cert.q_constant = true;
  for (const auto& rec : cert.levels)
    if (rec.qn != D) cert.q_constant = false;
  if (!cert.q_constant) detail::record_failure(cert, "q_n is not constant");
  if (cert.epsilon && *cert.epsilon <= 0) detail::record_failure(cert, "a middle coefficient is not in the maximal ideal");
  cert.coefficients_level_independent = hs.size() < 2;
  if (hs.size() >= 2) {
    bool same = true;
    for (int i = 1; i < D; ++i) same = same && (hs[0].coeff(i) - hs[1].coeff(i)).is_zero();
    cert.coefficients_level_independent = same;
  }
  // b = μ^-1(σπ_1) = (σπ_1 + uγ)/(u + σπ_1/δ)
  TowerElem spi1 = sigma * res.uniformizers[0];
  TowerElem numb = spi1 + model.u * TowerElem(res.fixed.gamma);
  TowerElem denb = model.u + (res.fixed.delta ? spi1 * TowerElem(res.fixed.delta->inverse()) : TowerElem(PAdic::zero(p)));
  res.basepoint = numb / denb;
  cert.basepoint = res.basepoint.str();
  return res;
}

}  // namespace iterx

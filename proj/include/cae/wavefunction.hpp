#pragma once

// Trial wavefunctions of the confined two-electron atom, stored as exact
// polynomial-exponential term sums in Hylleraas coordinates
//
//   f(s, t, u) = sum_k c_k s^a_k t^b_k u^c_k exp(-alpha s)
//
// with s = r1 + r2, t = r2 - r1, u = r12.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace cae {

/// Nuclear charge of helium.
inline constexpr double kHeliumCharge = 2.0;

/// Radius of the impenetrable cavity; infinite radius means the free atom.
class CavityRadius {
 public:
  explicit CavityRadius(double r0) : value_(r0) {
    if (!(r0 > 0.0)) throw std::invalid_argument("CavityRadius: r0 must be positive");
  }

  static CavityRadius free_space() { return CavityRadius(std::numeric_limits<double>::infinity()); }

  bool is_free() const { return std::isinf(value_); }
  double value() const { return value_; }

  friend bool operator==(const CavityRadius&, const CavityRadius&) = default;

 private:
  double value_;
};

struct HylleraasPoint {
  double s = 0.0;
  double t = 0.0;
  double u = 0.0;
};

/// True when the point lies inside the triangle region |t| <= u <= s.
inline bool in_hylleraas_region(const HylleraasPoint& p) {
  return std::abs(p.t) <= p.u && p.u <= p.s;
}

struct Monomial {
  int a = 0;  // power of s
  int b = 0;  // power of t
  int c = 0;  // power of u

  friend auto operator<=>(const Monomial&, const Monomial&) = default;
};

struct Term {
  double coef = 0.0;
  Monomial powers;
};

/// Canonical sum of coef * s^a t^b u^c * exp(-alpha s). Terms are kept sorted
/// by monomial with no duplicates; exact zeros are dropped.
class TermSum {
 public:
  TermSum() = default;
  explicit TermSum(double alpha) : alpha_(alpha) {}
  TermSum(double alpha, std::vector<Term> terms) : alpha_(alpha), terms_(std::move(terms)) {
    canonicalize();
  }

  double alpha() const { return alpha_; }
  std::span<const Term> terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }

  /// Coefficient of a monomial, zero when absent.
  double coefficient(Monomial m) const {
    auto it = std::lower_bound(terms_.begin(), terms_.end(), m,
                               [](const Term& t, const Monomial& key) { return t.powers < key; });
    return (it != terms_.end() && it->powers == m) ? it->coef : 0.0;
  }

  int max_degree() const {
    int d = 0;
    for (const auto& t : terms_) d = std::max({d, t.powers.a, t.powers.b, t.powers.c});
    return d;
  }

  int max_total_degree() const {
    int d = 0;
    for (const auto& t : terms_) d = std::max(d, t.powers.a + t.powers.b + t.powers.c);
    return d;
  }

  TermSum& operator+=(const TermSum& other) {
    check_same_exponent(other);
    if (terms_.empty()) alpha_ = other.alpha_;
    terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
    canonicalize();
    return *this;
  }

  TermSum& operator*=(double k) {
    for (auto& t : terms_) t.coef *= k;
    canonicalize();
    return *this;
  }

  /// Multiplies every term by coef * s^a t^b u^c.
  TermSum times_monomial(double coef, Monomial m) const {
    TermSum out(alpha_);
    out.terms_.reserve(terms_.size());
    for (const auto& t : terms_)
      out.terms_.push_back({t.coef * coef, {t.powers.a + m.a, t.powers.b + m.b, t.powers.c + m.c}});
    out.canonicalize();
    return out;
  }

  friend TermSum operator+(TermSum lhs, const TermSum& rhs) { return lhs += rhs; }
  friend TermSum operator*(TermSum lhs, double k) { return lhs *= k; }
  friend TermSum operator*(double k, TermSum rhs) { return rhs *= k; }

  /// Product of two term sums; exponents add.
  friend TermSum operator*(const TermSum& f, const TermSum& g) {
    std::vector<Term> out;
    out.reserve(f.size() * g.size());
    for (const auto& x : f.terms_)
      for (const auto& y : g.terms_)
        out.push_back({x.coef * y.coef,
                       {x.powers.a + y.powers.a, x.powers.b + y.powers.b, x.powers.c + y.powers.c}});
    return TermSum(f.alpha_ + g.alpha_, std::move(out));
  }

 private:
  void check_same_exponent(const TermSum& other) const {
    if (alpha_ != other.alpha_ && !terms_.empty() && !other.terms_.empty())
      throw std::invalid_argument("TermSum: cannot add sums with different exponents");
  }

  void canonicalize() {
    std::sort(terms_.begin(), terms_.end(),
              [](const Term& x, const Term& y) { return x.powers < y.powers; });
    std::vector<Term> merged;
    merged.reserve(terms_.size());
    for (const auto& t : terms_) {
      if (!merged.empty() && merged.back().powers == t.powers)
        merged.back().coef += t.coef;
      else
        merged.push_back(t);
    }
    std::erase_if(merged, [](const Term& t) { return t.coef == 0.0; });
    terms_ = std::move(merged);
  }

  double alpha_ = 0.0;
  std::vector<Term> terms_;
};

namespace detail {

inline void fill_powers(double x, int n, std::span<double> out) {
  out[0] = 1.0;
  for (int k = 1; k <= n; ++k) out[k] = out[k - 1] * x;
}

}  // namespace detail

/// Value of f at p.
inline double evaluate(const TermSum& f, const HylleraasPoint& p) {
  if (f.empty()) return 0.0;
  constexpr int kStack = 24;
  const int deg = f.max_degree();
  std::array<double, kStack> sp_buf{}, tp_buf{}, up_buf{};
  std::vector<double> heap;
  std::span<double> sp, tp, up;
  if (deg < kStack) {
    sp = sp_buf; tp = tp_buf; up = up_buf;
  } else {
    heap.resize(3 * (deg + 1));
    sp = std::span(heap).subspan(0, deg + 1);
    tp = std::span(heap).subspan(deg + 1, deg + 1);
    up = std::span(heap).subspan(2 * (deg + 1), deg + 1);
  }
  detail::fill_powers(p.s, deg, sp);
  detail::fill_powers(p.t, deg, tp);
  detail::fill_powers(p.u, deg, up);
  double sum = 0.0;
  for (const auto& term : f.terms())
    sum += term.coef * sp[term.powers.a] * tp[term.powers.b] * up[term.powers.c];
  return sum * std::exp(-f.alpha() * p.s);
}

enum class Coordinate { s, t, u };

/// Exact partial derivative. For s the exponential factor contributes -alpha f.
inline TermSum differentiate(const TermSum& f, Coordinate var) {
  std::vector<Term> out;
  out.reserve(2 * f.size());
  for (const auto& t : f.terms()) {
    Monomial m = t.powers;
    switch (var) {
      case Coordinate::s:
        if (m.a > 0) out.push_back({t.coef * m.a, {m.a - 1, m.b, m.c}});
        out.push_back({-f.alpha() * t.coef, m});
        break;
      case Coordinate::t:
        if (m.b > 0) out.push_back({t.coef * m.b, {m.a, m.b - 1, m.c}});
        break;
      case Coordinate::u:
        if (m.c > 0) out.push_back({t.coef * m.c, {m.a, m.b, m.c - 1}});
        break;
    }
  }
  return TermSum(f.alpha(), std::move(out));
}

/// First and second partial derivatives needed by the kinetic operator.
struct DerivativeSet {
  TermSum f, fs, ft, fu, fss, ftt, fuu, fsu, ftu;

  explicit DerivativeSet(const TermSum& g)
      : f(g),
        fs(differentiate(g, Coordinate::s)),
        ft(differentiate(g, Coordinate::t)),
        fu(differentiate(g, Coordinate::u)),
        fss(differentiate(fs, Coordinate::s)),
        ftt(differentiate(ft, Coordinate::t)),
        fuu(differentiate(fu, Coordinate::u)),
        fsu(differentiate(fs, Coordinate::u)),
        ftu(differentiate(ft, Coordinate::u)) {}
};

/// (H f)(p) for the two-electron Hamiltonian with nuclear charge Z. The point
/// must be strictly interior: u > 0, s > |t|.
inline double apply_hamiltonian(const DerivativeSet& d, const HylleraasPoint& p, double Z) {
  const double s = p.s, t = p.t, u = p.u;
  if (!(u > 0.0) || !(s > std::abs(t)))
    throw std::domain_error("apply_hamiltonian: singular point (u = 0 or |t| = s)");
  const double st = s * s - t * t;
  const double su_coef = 2.0 * s * (u * u - t * t) / (u * st);
  const double tu_coef = 2.0 * t * (s * s - u * u) / (u * st);
  const double f = evaluate(d.f, p);
  return -(evaluate(d.fss, p) + evaluate(d.ftt, p) + evaluate(d.fuu, p)) -
         su_coef * evaluate(d.fsu, p) - tu_coef * evaluate(d.ftu, p) -
         4.0 * s / st * evaluate(d.fs, p) + 4.0 * t / st * evaluate(d.ft, p) -
         2.0 / u * evaluate(d.fu, p) + (-4.0 * Z * s / st + 1.0 / u) * f;
}

inline double apply_hamiltonian(const TermSum& f, const HylleraasPoint& p, double Z) {
  return apply_hamiltonian(DerivativeSet(f), p, Z);
}

/// (s^2 - t^2) u (H f) as an exact term sum. Every singular coefficient of H
/// is cancelled by the volume measure, so the result is again polynomial times
/// exp(-alpha s).
inline TermSum measure_weighted_hamiltonian(const TermSum& f, double Z) {
  const DerivativeSet d(f);
  TermSum out(f.alpha());
  auto add = [&](const TermSum& g, double coef, Monomial m) { out += g.times_monomial(coef, m); };
  // -(s^2 - t^2) u (f_ss + f_tt + f_uu)
  for (const TermSum* g : {&d.fss, &d.ftt, &d.fuu}) {
    add(*g, -1.0, {2, 0, 1});
    add(*g, 1.0, {0, 2, 1});
  }
  // -2 s (u^2 - t^2) f_su
  add(d.fsu, -2.0, {1, 0, 2});
  add(d.fsu, 2.0, {1, 2, 0});
  // -2 t (s^2 - u^2) f_tu
  add(d.ftu, -2.0, {2, 1, 0});
  add(d.ftu, 2.0, {0, 1, 2});
  // -4 s u f_s + 4 t u f_t
  add(d.fs, -4.0, {1, 0, 1});
  add(d.ft, 4.0, {0, 1, 1});
  // -2 (s^2 - t^2) f_u
  add(d.fu, -2.0, {2, 0, 0});
  add(d.fu, 2.0, {0, 2, 0});
  // potential: (-4 Z s u + s^2 - t^2) f
  add(d.f, -4.0 * Z, {1, 0, 1});
  add(d.f, 1.0, {2, 0, 0});
  add(d.f, -1.0, {0, 2, 0});
  return out;
}

// ---------------------------------------------------------------------------
// Trial kinds

enum class TrialKind { Psi0, Psi1, Psi2, Psi3, Psi4 };

inline constexpr std::array<TrialKind, 5> kAllTrialKinds{TrialKind::Psi0, TrialKind::Psi1,
                                                         TrialKind::Psi2, TrialKind::Psi3,
                                                         TrialKind::Psi4};

inline int kind_index(TrialKind k) { return static_cast<int>(k); }

inline std::string kind_name(TrialKind k) { return "psi" + std::to_string(kind_index(k)); }

inline TrialKind kind_from_index(int i) {
  if (i < 0 || i > 4) throw std::invalid_argument("trial kind index must be 0..4");
  return static_cast<TrialKind>(i);
}

/// Accepts "psi3", "Psi3" or "3".
inline TrialKind parse_kind(std::string_view text) {
  std::string_view digits = text;
  if (digits.size() == 4 && (digits[0] == 'p' || digits[0] == 'P') && digits.substr(1, 2) == "si")
    digits.remove_prefix(3);
  if (digits.size() != 1 || digits[0] < '0' || digits[0] > '4')
    throw std::invalid_argument("unknown trial kind '" + std::string(text) + "'");
  return kind_from_index(digits[0] - '0');
}

/// Monomials multiplying exp(-alpha s) chi in each trial. The first one is
/// always the constant, whose coefficient is fixed to one.
inline std::vector<Monomial> trial_basis(TrialKind kind) {
  switch (kind) {
    case TrialKind::Psi0: return {{0, 0, 0}};
    case TrialKind::Psi1: return {{0, 0, 0}, {0, 0, 1}};
    case TrialKind::Psi2: return {{0, 0, 0}, {0, 0, 1}, {0, 2, 0}};
    case TrialKind::Psi3: return {{0, 0, 0}, {0, 0, 1}, {0, 2, 0}, {2, 0, 0}};
    case TrialKind::Psi4:
      // n + m + l <= 2 with even powers of t
      return {{0, 0, 0}, {1, 0, 0}, {0, 0, 1}, {2, 0, 0}, {0, 2, 0}, {0, 0, 2}, {1, 0, 1}};
  }
  throw std::invalid_argument("trial_basis: bad kind");
}

/// Parameter vector layout: alpha first, then the linear coefficients.
/// Psi1..Psi3 omit the fixed constant coefficient; Psi4 carries C_000 explicitly.
inline std::size_t parameter_count(TrialKind kind) {
  switch (kind) {
    case TrialKind::Psi0: return 1;
    case TrialKind::Psi1: return 2;
    case TrialKind::Psi2: return 3;
    case TrialKind::Psi3: return 4;
    case TrialKind::Psi4: return 8;
  }
  return 0;
}

inline std::vector<std::string> parameter_names(TrialKind kind) {
  switch (kind) {
    case TrialKind::Psi0: return {"alpha"};
    case TrialKind::Psi1: return {"alpha", "beta"};
    case TrialKind::Psi2: return {"alpha", "beta", "gamma"};
    case TrialKind::Psi3: return {"alpha", "beta", "gamma", "delta"};
    case TrialKind::Psi4:
      return {"alpha", "C000", "C100", "C001", "C200", "C020", "C002", "C101"};
  }
  return {};
}

inline void validate_parameters(TrialKind kind, std::span<const double> params) {
  if (params.size() != parameter_count(kind))
    throw std::invalid_argument(kind_name(kind) + ": expected " +
                                std::to_string(parameter_count(kind)) + " parameters, got " +
                                std::to_string(params.size()));
  if (!(params[0] > 0.0)) throw std::invalid_argument(kind_name(kind) + ": alpha must be positive");
  for (double p : params)
    if (!std::isfinite(p)) throw std::invalid_argument(kind_name(kind) + ": non-finite parameter");
}

/// Coefficients of trial_basis(kind) implied by a parameter vector.
inline std::vector<double> linear_coefficients(TrialKind kind, std::span<const double> params) {
  validate_parameters(kind, params);
  if (kind == TrialKind::Psi4) return {params.begin() + 1, params.end()};
  std::vector<double> c{1.0};
  c.insert(c.end(), params.begin() + 1, params.end());
  return c;
}

/// Inverse of linear_coefficients; coefficients are rescaled so the constant is one.
inline std::vector<double> parameters_from(TrialKind kind, double alpha,
                                           std::span<const double> coefs) {
  const auto basis = trial_basis(kind);
  if (coefs.size() != basis.size()) throw std::invalid_argument("parameters_from: size mismatch");
  if (coefs[0] == 0.0) throw std::invalid_argument("parameters_from: constant coefficient is zero");
  std::vector<double> p{alpha};
  if (kind == TrialKind::Psi4) p.push_back(1.0);
  for (std::size_t i = 1; i < coefs.size(); ++i) p.push_back(coefs[i] / coefs[0]);
  return p;
}

/// chi = (r0 - r1)(r0 - r2) = r0^2 - r0 s + (s^2 - t^2)/4; identically one in free space.
inline TermSum cutoff_function(const CavityRadius& r0) {
  if (r0.is_free()) return TermSum(0.0, {{1.0, {0, 0, 0}}});
  const double r = r0.value();
  return TermSum(0.0, {{r * r, {0, 0, 0}}, {-r, {1, 0, 0}}, {0.25, {2, 0, 0}}, {-0.25, {0, 2, 0}}});
}

/// Basis function s^a t^b u^c exp(-alpha s) chi.
inline TermSum basis_function(Monomial m, double alpha, const CavityRadius& r0) {
  return cutoff_function(r0).times_monomial(1.0, m) * TermSum(alpha, {{1.0, {0, 0, 0}}});
}

/// Expanded trial function without the normalization constant.
inline TermSum build_trial(TrialKind kind, std::span<const double> params, const CavityRadius& r0) {
  const auto coefs = linear_coefficients(kind, params);
  const auto basis = trial_basis(kind);
  std::vector<Term> prefactor;
  for (std::size_t i = 0; i < basis.size(); ++i) prefactor.push_back({coefs[i], basis[i]});
  return TermSum(params[0], std::move(prefactor)) * cutoff_function(r0);
}

}  // namespace cae

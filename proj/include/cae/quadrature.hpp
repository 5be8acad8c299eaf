#pragma once

// Gauss-Legendre rules, radial integration, and integration over the
// two-electron configuration space of the confined atom in Hylleraas
// coordinates:
//
//   int f dtau = 2 pi^2 [ int_0^r0 ds int_0^s dt int_t^s du
//                       + int_r0^2r0 ds int_0^(2r0-s) dt int_t^s du ] f (s^2 - t^2) u
//
// In free space the first region runs to a finite cutoff s_max.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cae/wavefunction.hpp"

namespace cae {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  double a = -1.0;
  double b = 1.0;

  std::size_t size() const { return nodes.size(); }

  template <class F>
  double integrate(F&& f) const;
};

/// Neumaier compensated accumulator; summation order is the call order.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  CompensatedSum& operator+=(double x) {
    add(x);
    return *this;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

template <class F>
double QuadratureRule::integrate(F&& f) const {
  CompensatedSum acc;
  for (std::size_t i = 0; i < nodes.size(); ++i) acc += weights[i] * f(nodes[i]);
  return acc.value();
}

/// n-point Gauss-Legendre rule on [a, b]. Nodes are Newton-refined roots of P_n.
inline QuadratureRule gauss_legendre(int n, double a = -1.0, double b = 1.0) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  if (!(a < b)) throw std::invalid_argument("gauss_legendre: need a < b");
  std::vector<double> x(n), w(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Tricomi initial guess, descending order
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 1; k <= n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // recompute the derivative at the converged root
    double p0 = 1.0, p1 = 0.0;
    for (int k = 1; k <= n; ++k) {
      const double p2 = p1;
      p1 = p0;
      p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
    }
    dp = n * (z * p0 - p1) / (z * z - 1.0);
    const double wt = 2.0 / ((1.0 - z * z) * dp * dp);
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = w[n - 1 - i] = wt;
  }
  if (n % 2 == 1) x[n / 2] = 0.0;
  const double half_len = 0.5 * (b - a), mid = 0.5 * (a + b);
  QuadratureRule rule;
  rule.a = a;
  rule.b = b;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = mid + half_len * x[i];
    rule.weights[i] = half_len * w[i];
  }
  return rule;
}

/// Copies of a reference rule on [-1, 1] on each of `panels` equal panels of [a, b].
inline QuadratureRule composite_rule(const QuadratureRule& ref, double a, double b, int panels) {
  if (panels < 1) throw std::invalid_argument("composite_gauss_legendre: panels must be >= 1");
  if (!(a < b)) throw std::invalid_argument("composite_gauss_legendre: need a < b");
  QuadratureRule out;
  out.a = a;
  out.b = b;
  const double width = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * width;
    for (std::size_t i = 0; i < ref.size(); ++i) {
      out.nodes.push_back(lo + 0.5 * width * (ref.nodes[i] + 1.0));
      out.weights.push_back(0.5 * width * ref.weights[i]);
    }
  }
  return out;
}

/// Gauss-Legendre of the given order on each of `panels` equal panels of [a, b].
inline QuadratureRule composite_gauss_legendre(int order, double a, double b, int panels) {
  return composite_rule(gauss_legendre(order), a, b, panels);
}

/// int_a^b g(r) dr by composite Gauss-Legendre.
template <class G>
double integrate_radial(G&& g, double a, double b, int order, int panels = 1) {
  const QuadratureRule rule = composite_gauss_legendre(order, a, b, panels);
  CompensatedSum acc;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double v = g(rule.nodes[i]);
    if (!std::isfinite(v)) throw std::domain_error("integrate_radial: non-finite integrand");
    acc += rule.weights[i] * v;
  }
  return acc.value();
}

// ---------------------------------------------------------------------------
// Hylleraas-domain integration of an arbitrary pointwise integrand

namespace detail {

inline constexpr double kTwoPiSq = 2.0 * std::numbers::pi * std::numbers::pi;

/// Panel count for the free-space s range.
inline int free_space_panels(double s_max) { return std::max(1, static_cast<int>(std::ceil(s_max / 5.0))); }

inline double require_free_cutoff(const CavityRadius& r0, std::optional<double> s_max) {
  if (!r0.is_free()) return 2.0 * r0.value();
  if (!s_max || !(*s_max > 0.0))
    throw std::invalid_argument("integrate_hylleraas: free space needs a positive s_max");
  return *s_max;
}

}  // namespace detail

/// Triple integral of f over the confined configuration space with the
/// measure (s^2 - t^2) u applied here. f takes a HylleraasPoint.
template <class F>
double integrate_hylleraas(F&& f, const CavityRadius& r0, int order,
                           std::optional<double> s_max = std::nullopt) {
  const double s_end = detail::require_free_cutoff(r0, s_max);
  const QuadratureRule unit = gauss_legendre(order, 0.0, 1.0);

  auto inner = [&](double s, double t_max) {
    CompensatedSum acc_t;
    for (std::size_t j = 0; j < unit.size(); ++j) {
      const double t = t_max * unit.nodes[j];
      const double wt = t_max * unit.weights[j];
      const double len = s - t;
      double acc_u = 0.0;
      for (std::size_t k = 0; k < unit.size(); ++k) {
        const double u = t + len * unit.nodes[k];
        const double v = f(HylleraasPoint{s, t, u});
        if (!std::isfinite(v))
          throw std::domain_error("integrate_hylleraas: non-finite integrand at s=" +
                                  std::to_string(s) + " t=" + std::to_string(t) +
                                  " u=" + std::to_string(u));
        acc_u += len * unit.weights[k] * v * (s * s - t * t) * u;
      }
      acc_t += wt * acc_u;
    }
    return acc_t.value();
  };

  CompensatedSum total;
  if (r0.is_free()) {
    const auto rule = composite_gauss_legendre(order, 0.0, s_end, detail::free_space_panels(s_end));
    for (std::size_t i = 0; i < rule.size(); ++i)
      total += rule.weights[i] * inner(rule.nodes[i], rule.nodes[i]);
  } else {
    const double r = r0.value();
    const auto inner_rule = gauss_legendre(order, 0.0, r);
    for (std::size_t i = 0; i < inner_rule.size(); ++i)
      total += inner_rule.weights[i] * inner(inner_rule.nodes[i], inner_rule.nodes[i]);
    const auto outer_rule = gauss_legendre(order, r, 2.0 * r);
    for (std::size_t i = 0; i < outer_rule.size(); ++i)
      total += outer_rule.weights[i] * inner(outer_rule.nodes[i], 2.0 * r - outer_rule.nodes[i]);
  }
  return detail::kTwoPiSq * total.value();
}

struct ConvergedIntegral {
  double value = 0.0;
  int order = 0;
  bool converged = false;
};

/// Doubles the order until two successive results agree to rtol.
template <class F>
ConvergedIntegral integrate_hylleraas_converged(F&& f, const CavityRadius& r0, int order,
                                                double rtol = 1e-9, int max_doublings = 3,
                                                std::optional<double> s_max = std::nullopt) {
  double prev = integrate_hylleraas(f, r0, order, s_max);
  for (int k = 0; k < max_doublings; ++k) {
    const double next = integrate_hylleraas(f, r0, 2 * order, s_max);
    const bool ok = std::abs(next - prev) <= rtol * std::abs(next);
    order *= 2;
    prev = next;
    if (ok) return {prev, order, true};
  }
  return {prev, order, false};
}

// ---------------------------------------------------------------------------
// Exact-structure integration of term sums

/// Integrates term sums (polynomial in s, t, u times exp(-lambda s)) over the
/// configuration space using the same nested Gauss-Legendre scheme as
/// integrate_hylleraas. The inner t/u sums do not depend on the exponent and
/// are tabulated once per (radius, order). The volume measure is NOT applied:
/// callers pass integrands that already contain (s^2 - t^2) u.
class HylleraasIntegrator {
 public:
  HylleraasIntegrator(const CavityRadius& r0, int order, int max_degree = 24)
      : r0_(r0), order_(order), max_degree_(max_degree) {
    if (order < 2) throw std::invalid_argument("HylleraasIntegrator: order must be >= 2");
    const int d = max_degree_ + 1;
    reference_ = gauss_legendre(order);
    const QuadratureRule unit = gauss_legendre(order, 0.0, 1.0);
    // Region with t in [0, s]: homogeneous, tabulate at s = 1.
    unit_table_.assign(d * d, 0.0);
    fill_inner(unit, 1.0, 1.0, unit_table_);
    if (!r0_.is_free()) {
      const double r = r0_.value();
      inner_rule_ = gauss_legendre(order, 0.0, r);
      outer_rule_ = gauss_legendre(order, r, 2.0 * r);
      outer_tables_.assign(outer_rule_.size() * d * d, 0.0);
      for (std::size_t i = 0; i < outer_rule_.size(); ++i) {
        const double s = outer_rule_.nodes[i];
        std::span<double> tab(outer_tables_.data() + i * d * d, d * d);
        fill_inner(unit, s, 2.0 * r - s, tab);
      }
    }
  }

  const CavityRadius& radius() const { return r0_; }
  int order() const { return order_; }
  int max_degree() const { return max_degree_; }

  /// Default free-space cutoff for integrand exp(-lambda s).
  static double default_free_cutoff(double lambda) { return 80.0 / lambda; }

  /// 2 pi^2 times the raw triple integral of f (no measure applied).
  double integrate(const TermSum& f, std::optional<double> s_max = std::nullopt) const {
    if (f.empty()) return 0.0;
    const double lambda = f.alpha();
    for (const auto& t : f.terms())
      if (t.powers.a > max_degree_ || t.powers.b > max_degree_ || t.powers.c > max_degree_ ||
          t.powers.a + t.powers.b + t.powers.c + 2 > kMaxMoment)
        throw std::invalid_argument("HylleraasIntegrator: term degree exceeds table size");
    const int d = max_degree_ + 1;

    // s-moments of the homogeneous region
    std::vector<double> moments(kMaxMoment + 1, 0.0);
    auto accumulate_moments = [&](const QuadratureRule& rule) {
      for (std::size_t i = 0; i < rule.size(); ++i) {
        const double s = rule.nodes[i];
        double v = rule.weights[i] * std::exp(-lambda * s);
        for (int k = 0; k <= kMaxMoment; ++k) {
          moments[k] += v;
          v *= s;
        }
      }
    };
    if (r0_.is_free()) {
      if (!(lambda > 0.0)) throw std::invalid_argument("HylleraasIntegrator: free space needs lambda > 0");
      const double s_end = s_max.value_or(default_free_cutoff(lambda));
      accumulate_moments(composite_rule(reference_, 0.0, s_end, detail::free_space_panels(s_end)));
    } else {
      accumulate_moments(inner_rule_);
    }

    std::vector<double> outer_weight;
    if (!r0_.is_free()) {
      outer_weight.resize(outer_rule_.size());
      for (std::size_t i = 0; i < outer_rule_.size(); ++i)
        outer_weight[i] = outer_rule_.weights[i] * std::exp(-lambda * outer_rule_.nodes[i]);
    }

    CompensatedSum total;
    for (const auto& term : f.terms()) {
      const auto [a, b, c] = term.powers;
      double value = moments[a + b + c + 2] * unit_table_[b * d + c];
      if (!r0_.is_free()) {
        double acc = 0.0;
        for (std::size_t i = 0; i < outer_rule_.size(); ++i)
          acc += outer_weight[i] * ipow(outer_rule_.nodes[i], a) * outer_tables_[(i * d + b) * d + c];
        value += acc;
      }
      total += term.coef * value;
    }
    return detail::kTwoPiSq * total.value();
  }

  /// Integral of f * g * (s^2 - t^2) u.
  double overlap(const TermSum& f, const TermSum& g, std::optional<double> s_max = std::nullopt) const {
    return integrate(with_measure(f * g), s_max);
  }

  static TermSum with_measure(const TermSum& f) {
    return f.times_monomial(1.0, {2, 0, 1}) + f.times_monomial(-1.0, {0, 2, 1});
  }

 private:
  static constexpr int kMaxMoment = 80;

  static double ipow(double x, int n) {
    double r = 1.0;
    while (n > 0) {
      if (n & 1) r *= x;
      x *= x;
      n >>= 1;
    }
    return r;
  }

  // table(b, c) = int_0^t_max t^b int_t^s u^c du dt, nested Gauss-Legendre
  void fill_inner(const QuadratureRule& unit, double s, double t_max, std::span<double> table) const {
    const int d = max_degree_ + 1;
    std::vector<double> u_moments(d);
    for (std::size_t j = 0; j < unit.size(); ++j) {
      const double t = t_max * unit.nodes[j];
      const double wt = t_max * unit.weights[j];
      const double len = s - t;
      std::fill(u_moments.begin(), u_moments.end(), 0.0);
      for (std::size_t k = 0; k < unit.size(); ++k) {
        const double u = t + len * unit.nodes[k];
        double v = len * unit.weights[k];
        for (int c = 0; c < d; ++c) {
          u_moments[c] += v;
          v *= u;
        }
      }
      double tb = wt;
      for (int b = 0; b < d; ++b) {
        for (int c = 0; c < d; ++c) table[b * d + c] += tb * u_moments[c];
        tb *= t;
      }
    }
  }

  CavityRadius r0_;
  int order_;
  int max_degree_;
  std::vector<double> unit_table_;
  QuadratureRule reference_, inner_rule_, outer_rule_;
  std::vector<double> outer_tables_;
};

}  // namespace cae

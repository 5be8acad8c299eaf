#pragma once

// One-electron radial densities of the optimized two-electron states.

#include <cmath>
#include <functional>
#include <memory>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cae/quadrature.hpp"
#include "cae/variational.hpp"
#include "cae/wavefunction.hpp"

namespace cae {

inline constexpr int kDensityPanelOrder = 16;
inline constexpr int kMinDensityPoints = 64;

class RadialDensity;
double density_gradient(const RadialDensity& d, double r);

/// Tabulated, normalized radial density rho(r) on a composite Gauss-Legendre
/// grid over (0, r_end). Holds the generating function so values and
/// derivatives are available off-grid.
class RadialDensity {
 public:
  using Function = std::function<double(double)>;

  /// Normalizes `rho` so that 4 pi int rho r^2 dr = 1 on the grid.
  RadialDensity(Function rho, CavityRadius r0, double r_end, int n_points)
      : r0_(r0), r_end_(r_end) {
    if (n_points < kMinDensityPoints)
      throw std::invalid_argument("RadialDensity: need at least " +
                                  std::to_string(kMinDensityPoints) + " points");
    if (!(r_end > 0.0) || (!r0.is_free() && r_end > r0.value()))
      throw std::invalid_argument("RadialDensity: bad radial extent");
    const int panels = (n_points + kDensityPanelOrder - 1) / kDensityPanelOrder;
    const auto rule = composite_gauss_legendre(kDensityPanelOrder, 0.0, r_end, panels);
    nodes_ = rule.nodes;
    weights_ = rule.weights;

    values_.resize(nodes_.size());
    CompensatedSum mass;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      values_[i] = rho(nodes_[i]);
      if (!std::isfinite(values_[i]) || values_[i] < 0.0)
        throw std::domain_error("RadialDensity: invalid density value at r=" +
                                std::to_string(nodes_[i]));
      mass += 4.0 * std::numbers::pi * weights_[i] * values_[i] * nodes_[i] * nodes_[i];
    }
    if (!(mass.value() > 0.0) || !std::isfinite(mass.value()))
      throw std::domain_error("RadialDensity: normalization integral is not positive");
    scale_ = 1.0 / mass.value();
    for (double& v : values_) v *= scale_;
    fn_ = std::make_shared<const Function>(
        [f = std::move(rho), k = scale_](double r) { return k * f(r); });

    derivatives_.resize(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i) derivatives_[i] = density_gradient(*this, nodes_[i]);
  }

  const CavityRadius& r0() const { return r0_; }
  double r_end() const { return r_end_; }
  std::span<const double> nodes() const { return nodes_; }
  std::span<const double> weights() const { return weights_; }
  std::span<const double> values() const { return values_; }
  std::span<const double> derivatives() const { return derivatives_; }
  std::size_t size() const { return nodes_.size(); }

  /// Factor applied to the supplied function to normalize it.
  double scale() const { return scale_; }

  double operator()(double r) const { return (*fn_)(r); }

  /// 4 pi int g(r) r^2 dr over the grid.
  template <class G>
  double integrate(G&& g) const {
    CompensatedSum acc;
    for (std::size_t i = 0; i < nodes_.size(); ++i)
      acc += 4.0 * std::numbers::pi * weights_[i] * g(i) * nodes_[i] * nodes_[i];
    return acc.value();
  }

 private:
  CavityRadius r0_;
  double r_end_;
  std::vector<double> nodes_, weights_, values_, derivatives_;
  double scale_ = 1.0;
  std::shared_ptr<const Function> fn_;
};

/// d rho / dr by 5-point finite differences at step h = min(1e-4, (r_end - r)/10)
/// with one Richardson step (h, 2h). Central when the 4h stencil fits in
/// (0, r_end), one-sided otherwise.
inline double density_gradient(const RadialDensity& d, double r) {
  const double r_end = d.r_end();
  if (!(r > 0.0) || !(r < r_end))
    throw std::domain_error("density_gradient: r outside (0, r_end)");
  const double h = std::min(1e-4, (r_end - r) / 10.0);
  auto central = [&](double step) {
    return (-d(r + 2 * step) + 8 * d(r + step) - 8 * d(r - step) + d(r - 2 * step)) / (12 * step);
  };
  // forward for sign = +1, backward for sign = -1
  auto one_sided = [&](double step, double sign) {
    const double st = sign * step;
    return (-25 * d(r) + 48 * d(r + st) - 36 * d(r + 2 * st) + 16 * d(r + 3 * st) -
            3 * d(r + 4 * st)) /
           (12 * st);
  };
  if (r - 4 * h > 0.0) return (16.0 * central(h) - central(2 * h)) / 15.0;
  const double hf = std::min(h, r_end - r) / 2.0;  // forward stencil spans 8 hf
  return (16.0 * one_sided(hf / 2.0, 1.0) - one_sided(hf, 1.0)) / 15.0;
}

// ---------------------------------------------------------------------------
// Reduction of the two-electron state

/// Unnormalized-by-grid one-electron density B^2 int |psi|^2 d^3 r2 for a
/// solved state. Psi0 uses its separable closed form.
class DensityEvaluator {
 public:
  explicit DensityEvaluator(const SolveResult& sr, int order = kDefaultQuadOrder)
      : sr_(sr),
        psi_(build_trial(sr.kind, sr.params, sr.r0)),
        r2_rule_(gauss_legendre(order, 0.0, 1.0)),
        u_rule_(gauss_legendre(std::max(2, max_u_power(psi_) + 2), 0.0, 1.0)) {
    const double alpha = sr.params[0];
    if (sr.kind == TrialKind::Psi0) {
      // separable: rho(r) = B^2 exp(-2 alpha r) (r0 - r)^2 * (4 pi int exp(-2 alpha x)(r0-x)^2 x^2 dx)
      if (sr.r0.is_free()) {
        partner_mass_ = std::numbers::pi / (alpha * alpha * alpha);
      } else {
        const double r0 = sr.r0.value();
        partner_mass_ = integrate_radial(
            [&](double x) {
              const double c = (r0 - x);
              return 4.0 * std::numbers::pi * std::exp(-2.0 * alpha * x) * c * c * x * x;
            },
            0.0, r0, order);
      }
    }
  }

  const SolveResult& state() const { return sr_; }

  /// Radial extent of the density: r0, or a free-space cutoff 20/alpha grown
  /// until the mass beyond it is below 1e-10.
  double radial_extent() const {
    if (!sr_.r0.is_free()) return sr_.r0.value();
    const double alpha = sr_.params[0];
    double r_max = 20.0 / alpha;
    for (int k = 0; k < 20; ++k) {
      const double tail = integrate_radial(
          [&](double r) { return 4.0 * std::numbers::pi * (*this)(r) * r * r; }, r_max, 2.0 * r_max,
          32, 4);
      if (tail < 1e-10) break;
      r_max *= 1.25;
    }
    return r_max;
  }

  double operator()(double r) const {
    const double B2 = sr_.norm_constant * sr_.norm_constant;
    const double alpha = sr_.params[0];
    if (!(r > 0.0)) throw std::domain_error("one_electron_density: r must be positive");
    if (!sr_.r0.is_free() && !(r < sr_.r0.value()))
      throw std::domain_error("one_electron_density: r must lie inside the cavity");
    if (sr_.kind == TrialKind::Psi0) {
      const double wall = sr_.r0.is_free() ? 1.0 : (sr_.r0.value() - r) * (sr_.r0.value() - r);
      return B2 * partner_mass_ * std::exp(-2.0 * alpha * r) * wall;
    }
    // 2 pi / r { int_0^r dr2 r2 int_{r-r2}^{r+r2} du u psi^2 + int_r^R dr2 r2 int_{r2-r}^{r2+r} du u psi^2 }
    double total = 0.0;
    auto segment = [&](double lo, double hi) {
      const double width = hi - lo;
      CompensatedSum acc;
      for (std::size_t i = 0; i < r2_rule_.size(); ++i) {
        const double r2 = lo + width * r2_rule_.nodes[i];
        const double u_lo = std::abs(r - r2), u_hi = r + r2;
        const double u_len = u_hi - u_lo;
        double inner = 0.0;
        for (std::size_t k = 0; k < u_rule_.size(); ++k) {
          const double u = u_lo + u_len * u_rule_.nodes[k];
          const double v = evaluate(psi_, {r + r2, r2 - r, u});
          inner += u_rule_.weights[k] * u * v * v;
        }
        acc += width * r2_rule_.weights[i] * r2 * u_len * inner;
      }
      return acc.value();
    };
    total += segment(0.0, r);
    if (sr_.r0.is_free()) {
      const double reach = r + 40.0 / alpha;
      const int panels = static_cast<int>(std::ceil((reach - r) / 5.0));
      const double step = (reach - r) / panels;
      for (int p = 0; p < panels; ++p) total += segment(r + p * step, r + (p + 1) * step);
    } else {
      total += segment(r, sr_.r0.value());
    }
    return B2 * 2.0 * std::numbers::pi / r * total;
  }

 private:
  static int max_u_power(const TermSum& f) {
    int c = 0;
    for (const auto& t : f.terms()) c = std::max(c, t.powers.c);
    return c;
  }

  SolveResult sr_;
  TermSum psi_;
  QuadratureRule r2_rule_, u_rule_;
  double partner_mass_ = 0.0;
};

/// rho(r) for a solved state, scaled by B^2. Valid for 0 < r < r0.
inline double one_electron_density(const SolveResult& sr, double r, int order = kDefaultQuadOrder) {
  return DensityEvaluator(sr, order)(r);
}

inline constexpr int kDefaultDensityPoints = 128;

/// Normalized tabulation of the density of a solved state.
inline RadialDensity tabulate_density(const SolveResult& sr, int n_points = kDefaultDensityPoints,
                                      int order = kDefaultQuadOrder) {
  auto eval = std::make_shared<const DensityEvaluator>(sr, order);
  const double r_end = eval->radial_extent();
  return RadialDensity([eval](double r) { return (*eval)(r); }, sr.r0, r_end, n_points);
}

}  // namespace cae

#pragma once

// Rayleigh quotient of the trial wavefunctions and its minimization over the
// variational parameters.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cae/nelder_mead.hpp"
#include "cae/quadrature.hpp"
#include "cae/wavefunction.hpp"

namespace cae {

inline constexpr int kDefaultQuadOrder = 48;

struct SolveResult {
  TrialKind kind = TrialKind::Psi0;
  CavityRadius r0 = CavityRadius::free_space();
  std::vector<double> params;
  double energy = 0.0;         // hartree
  double norm_constant = 0.0;  // B with B^2 <psi|psi> = 1
  int quad_order = kDefaultQuadOrder;
  bool converged = false;
  double Z = kHeliumCharge;
};

/// Overlap and Hamiltonian matrices of a trial basis at fixed alpha.
struct BasisMatrices {
  Eigen::MatrixXd hamiltonian;
  Eigen::MatrixXd overlap;
};

/// Energy functional for one (kind, radius) pair. Matrix elements between
/// basis functions are integrated exactly in structure (polynomial times
/// exponential) with nested Gauss-Legendre; the quotient for any parameter
/// vector is then c^T H c / c^T S c.
class EnergyFunctional {
 public:
  EnergyFunctional(TrialKind kind, CavityRadius r0, int order = kDefaultQuadOrder,
                   double Z = kHeliumCharge)
      : kind_(kind), r0_(r0), Z_(Z), basis_(trial_basis(kind)), integrator_(r0, order) {}

  TrialKind kind() const { return kind_; }
  const CavityRadius& radius() const { return r0_; }
  int order() const { return integrator_.order(); }
  double charge() const { return Z_; }

  /// s_max only matters in free space; defaults to 40/alpha.
  BasisMatrices matrices(double alpha, std::optional<double> s_max = std::nullopt) const {
    if (!(alpha > 0.0)) throw std::invalid_argument("EnergyFunctional: alpha must be positive");
    const auto n = static_cast<Eigen::Index>(basis_.size());
    std::vector<TermSum> phi, h_phi;
    phi.reserve(basis_.size());
    h_phi.reserve(basis_.size());
    for (const auto& m : basis_) {
      phi.push_back(basis_function(m, alpha, r0_));
      h_phi.push_back(measure_weighted_hamiltonian(phi.back(), Z_));
    }
    BasisMatrices out{Eigen::MatrixXd(n, n), Eigen::MatrixXd(n, n)};
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j <= i; ++j) {
        const double sij = integrator_.overlap(phi[i], phi[j], s_max);
        const double hij = integrator_.integrate(phi[i] * h_phi[j], s_max);
        const double hji = integrator_.integrate(phi[j] * h_phi[i], s_max);
        out.overlap(i, j) = out.overlap(j, i) = sij;
        out.hamiltonian(i, j) = out.hamiltonian(j, i) = 0.5 * (hij + hji);
      }
    }
    return out;
  }

  struct Quotient {
    double numerator = 0.0;
    double denominator = 0.0;
    double energy() const { return numerator / denominator; }
  };

  Quotient quotient(std::span<const double> params, std::optional<double> s_max = std::nullopt) const {
    const auto c = linear_coefficients(kind_, params);
    const auto m = matrices(params[0], s_max);
    const Eigen::Map<const Eigen::VectorXd> v(c.data(), static_cast<Eigen::Index>(c.size()));
    return {v.dot(m.hamiltonian * v), v.dot(m.overlap * v)};
  }

  double energy(std::span<const double> params) const { return quotient(params).energy(); }

  /// Lowest generalized eigenvalue of (H, S) at alpha; optionally returns the
  /// eigenvector scaled so the constant coefficient is one.
  double lowest_root(double alpha, std::vector<double>* coefs = nullptr) const {
    const auto m = matrices(alpha);
    if (m.overlap.rows() == 1) {
      if (coefs) *coefs = {1.0};
      return m.hamiltonian(0, 0) / m.overlap(0, 0);
    }
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(m.hamiltonian, m.overlap);
    if (solver.info() != Eigen::Success) return std::numeric_limits<double>::quiet_NaN();
    if (coefs) {
      const Eigen::VectorXd v = solver.eigenvectors().col(0);
      coefs->assign(v.data(), v.data() + v.size());
    }
    return solver.eigenvalues()(0);
  }

 private:
  TrialKind kind_;
  CavityRadius r0_;
  double Z_;
  std::vector<Monomial> basis_;
  HylleraasIntegrator integrator_;
};

struct RayleighQuotient {
  double energy = 0.0;
  double norm = 0.0;  // <psi|psi> without B
  int order = 0;
  bool converged = false;
};

/// <psi|H|psi> / <psi|psi> at the given order, validated against the doubled
/// order (and, in free space, a doubled s cutoff).
inline RayleighQuotient rayleigh_quotient(TrialKind kind, std::span<const double> params,
                                          const CavityRadius& r0, int order = kDefaultQuadOrder,
                                          double Z = kHeliumCharge, double rtol = 1e-9) {
  validate_parameters(kind, params);
  const EnergyFunctional base(kind, r0, order, Z);
  const auto q = base.quotient(params);
  const EnergyFunctional doubled(kind, r0, 2 * order, Z);
  const double e2 = doubled.quotient(params).energy();
  bool ok = std::abs(e2 - q.energy()) <= rtol * std::abs(e2);
  if (r0.is_free()) {
    const double s_max = HylleraasIntegrator::default_free_cutoff(2.0 * params[0]);
    const double e_wide = base.quotient(params, 2.0 * s_max).energy();
    ok = ok && std::abs(e_wide - q.energy()) < 1e-8;
  }
  return {q.energy(), q.denominator, order, ok};
}

/// Independent pointwise route: psi (H psi) and psi^2 sampled on the nested
/// Gauss-Legendre grid, with H applied through exact derivatives at each node.
inline RayleighQuotient rayleigh_quotient_pointwise(TrialKind kind, std::span<const double> params,
                                                    const CavityRadius& r0,
                                                    int order = kDefaultQuadOrder,
                                                    double Z = kHeliumCharge) {
  const TermSum psi = build_trial(kind, params, r0);
  const DerivativeSet d(psi);
  std::optional<double> s_max;
  if (r0.is_free()) s_max = 40.0 / params[0];
  const double num = integrate_hylleraas(
      [&](const HylleraasPoint& p) { return evaluate(psi, p) * apply_hamiltonian(d, p, Z); }, r0,
      order, s_max);
  const double den = integrate_hylleraas(
      [&](const HylleraasPoint& p) {
        const double v = evaluate(psi, p);
        return v * v;
      },
      r0, order, s_max);
  return {num / den, den, order, true};
}

// ---------------------------------------------------------------------------
// Minimization

struct SolverOptions {
  int quad_order = kDefaultQuadOrder;
  double Z = kHeliumCharge;
  int starts = 5;
  /// Optimum from a neighbouring radius, used as an extra start.
  std::optional<std::vector<double>> continuation;
  NelderMeadOptions nelder_mead{};
};

class SolveError : public std::runtime_error {
 public:
  SolveError(const std::string& what, SolveResult best)
      : std::runtime_error(what), best_(std::move(best)) {}
  const SolveResult& best() const { return best_; }

 private:
  SolveResult best_;
};

namespace detail {

// Optimizer coordinates: log(alpha) followed by the free linear coefficients.
// For Psi4 the constant coefficient C000 stays fixed at one.
inline std::vector<double> to_search(TrialKind kind, std::span<const double> params) {
  std::vector<double> x{std::log(params[0])};
  const std::size_t skip = kind == TrialKind::Psi4 ? 2 : 1;
  x.insert(x.end(), params.begin() + skip, params.end());
  return x;
}

inline std::vector<double> from_search(TrialKind kind, std::span<const double> x) {
  std::vector<double> p{std::exp(x[0])};
  if (kind == TrialKind::Psi4) p.push_back(1.0);
  p.insert(p.end(), x.begin() + 1, x.end());
  return p;
}

/// Minimizes the lowest Rayleigh-Ritz root over alpha: coarse log grid then
/// golden-section refinement.
inline double best_alpha_by_ritz(const EnergyFunctional& fn) {
  auto root = [&](double log_a) {
    const double e = fn.lowest_root(std::exp(log_a));
    return std::isfinite(e) ? e : std::numeric_limits<double>::infinity();
  };
  const double lo = std::log(0.05), hi = std::log(12.0);
  constexpr int kGrid = 48;
  int best = 0;
  double best_e = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= kGrid; ++i) {
    const double e = root(lo + (hi - lo) * i / kGrid);
    if (e < best_e) {
      best_e = e;
      best = i;
    }
  }
  double a = lo + (hi - lo) * std::max(best - 1, 0) / kGrid;
  double b = lo + (hi - lo) * std::min(best + 1, kGrid) / kGrid;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = root(c), fd = root(d);
  while (b - a > 1e-10) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = root(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = root(d);
    }
  }
  return std::exp(0.5 * (a + b));
}

/// Parameters at alpha with the linear coefficients from the Ritz eigenvector.
inline std::vector<double> ritz_start(const EnergyFunctional& fn, double alpha) {
  std::vector<double> coefs;
  fn.lowest_root(alpha, &coefs);
  if (coefs.empty() || std::abs(coefs[0]) < 1e-12 * std::abs(coefs[0] + 1.0)) {
    std::vector<double> p(parameter_count(fn.kind()), 0.0);
    p[0] = alpha;
    if (fn.kind() == TrialKind::Psi4) p[1] = 1.0;
    return p;
  }
  return parameters_from(fn.kind(), alpha, coefs);
}

}  // namespace detail

/// Variational ground state for one trial kind and radius: multi-start
/// Nelder-Mead over (log alpha, linear coefficients), best start wins.
inline SolveResult solve_ground_state(TrialKind kind, const CavityRadius& r0,
                                      const SolverOptions& opts = {}) {
  const EnergyFunctional fn(kind, r0, opts.quad_order, opts.Z);

  std::vector<std::vector<double>> starts;
  if (opts.continuation) {
    validate_parameters(kind, *opts.continuation);
    starts.push_back(*opts.continuation);
  }
  starts.push_back(detail::ritz_start(fn, detail::best_alpha_by_ritz(fn)));
  for (double seed : {opts.Z - 5.0 / 16.0, 1.0, 2.0}) starts.push_back(detail::ritz_start(fn, seed));
  if (static_cast<int>(starts.size()) > opts.starts) starts.resize(std::max(opts.starts, 1));

  auto objective = [&](const std::vector<double>& x) {
    const auto p = detail::from_search(kind, x);
    if (!(p[0] > 0.0) || !std::isfinite(p[0])) return std::numeric_limits<double>::infinity();
    return fn.energy(p);
  };

  SolveResult best;
  best.kind = kind;
  best.r0 = r0;
  best.quad_order = opts.quad_order;
  best.Z = opts.Z;
  best.energy = std::numeric_limits<double>::infinity();
  bool any_converged = false;
  for (const auto& start : starts) {
    const auto x0 = detail::to_search(kind, start);
    std::vector<double> steps(x0.size());
    for (std::size_t i = 0; i < x0.size(); ++i) steps[i] = 0.1 * std::abs(x0[i]) + 0.05;
    const auto nm = nelder_mead(objective, x0, steps, opts.nelder_mead);
    any_converged = any_converged || nm.converged;
    if (nm.value < best.energy) {
      best.energy = nm.value;
      best.params = detail::from_search(kind, nm.x);
      best.converged = nm.converged;
    }
  }

  if (!std::isfinite(best.energy))
    throw SolveError(kind_name(kind) + ": no finite energy found", best);
  const auto rq = rayleigh_quotient(kind, best.params, r0, opts.quad_order, opts.Z);
  best.energy = rq.energy;
  best.norm_constant = 1.0 / std::sqrt(rq.norm);
  best.converged = any_converged && rq.converged;
  if (!any_converged)
    throw SolveError(kind_name(kind) + ": no Nelder-Mead start converged", best);
  return best;
}

}  // namespace cae

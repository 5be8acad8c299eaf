#pragma once

// Information measures of normalized radial densities. All integrals are
// 4 pi int (...) r^2 dr on the density's own grid.

#include <cmath>
#include <map>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "cae/density.hpp"

namespace cae {

/// Densities below this are treated as zero in rho ln rho and (rho')^2 / rho.
inline constexpr double kDensityFloor = 1e-300;

inline const std::vector<double>& default_tsallis_indices() {
  static const std::vector<double> q{0.5, 0.6, 0.7, 0.8, 0.9};
  return q;
}

/// -int rho ln rho
inline double shannon(const RadialDensity& d) {
  const auto v = d.values();
  return -d.integrate([&](std::size_t i) { return v[i] < kDensityFloor ? 0.0 : v[i] * std::log(v[i]); });
}

/// int (rho')^2 / rho
inline double fisher(const RadialDensity& d) {
  const auto v = d.values();
  const auto g = d.derivatives();
  return d.integrate([&](std::size_t i) { return v[i] < kDensityFloor ? 0.0 : g[i] * g[i] / v[i]; });
}

/// int rho ln(rho / rho_ref), with rho_ref evaluated at the nodes of d.
inline double kullback_leibler(const RadialDensity& d, const RadialDensity& ref) {
  const auto v = d.values();
  const auto r = d.nodes();
  return d.integrate([&](std::size_t i) {
    if (v[i] < kDensityFloor) return 0.0;
    const double w = ref(r[i]);
    if (!(w > 0.0))
      throw std::domain_error("kullback_leibler: reference density vanishes where density does not");
    return v[i] * std::log(v[i] / w);
  });
}

/// int rho^2
inline double disequilibrium(const RadialDensity& d) {
  const auto v = d.values();
  return d.integrate([&](std::size_t i) { return v[i] * v[i]; });
}

/// (1 - int rho^q) / (q - 1)
inline double tsallis(const RadialDensity& d, double q) {
  if (!(q > 0.0)) throw std::invalid_argument("tsallis: q must be positive");
  if (q == 1.0) throw std::invalid_argument("tsallis: q = 1 is the Shannon entropy");
  const auto v = d.values();
  const double moment = d.integrate([&](std::size_t i) { return v[i] > 0.0 ? std::pow(v[i], q) : 0.0; });
  return (1.0 - moment) / (q - 1.0);
}

struct FisherShannon {
  double shannon_power = 0.0;  // J = exp(2S/3) / (2 pi e)
  double complexity = 0.0;     // C_FS = F J
  double stam_margin = 0.0;    // C_FS / 3 - 1, non-negative by Stam's inequality
};

inline FisherShannon fisher_shannon(double shannon_entropy, double fisher_information) {
  FisherShannon out;
  out.shannon_power = std::exp(2.0 * shannon_entropy / 3.0) / (2.0 * std::numbers::pi * std::numbers::e);
  out.complexity = fisher_information * out.shannon_power;
  out.stam_margin = out.complexity / 3.0 - 1.0;
  return out;
}

inline FisherShannon fisher_shannon(const RadialDensity& d) { return fisher_shannon(shannon(d), fisher(d)); }

struct EntropyReport {
  double shannon = 0.0;
  double fisher = 0.0;
  double disequilibrium = 0.0;
  std::map<double, double> tsallis;
  double shannon_power = 0.0;
  double fisher_shannon = 0.0;
  double stam_margin = 0.0;
};

inline EntropyReport entropy_report(const RadialDensity& d,
                                    std::span<const double> q_values = default_tsallis_indices()) {
  EntropyReport rep;
  rep.shannon = shannon(d);
  rep.fisher = fisher(d);
  rep.disequilibrium = disequilibrium(d);
  for (double q : q_values) rep.tsallis[q] = tsallis(d, q);
  const auto fs = fisher_shannon(rep.shannon, rep.fisher);
  rep.shannon_power = fs.shannon_power;
  rep.fisher_shannon = fs.complexity;
  rep.stam_margin = fs.stam_margin;
  return rep;
}

}  // namespace cae

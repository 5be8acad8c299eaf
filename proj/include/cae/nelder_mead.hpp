#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

namespace cae {

struct NelderMeadOptions {
  double reflection = 1.0;
  double expansion = 2.0;
  double contraction = 0.5;
  double shrink = 0.5;
  double f_tol = 1e-10;  // spread of function values over the simplex
  double x_tol = 1e-8;   // max coordinate distance from the best vertex
  int max_iterations = 2000;
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
};

/// Downhill simplex minimization. `steps` gives the initial simplex offset per
/// coordinate. Non-finite function values are treated as +inf.
template <class F>
NelderMeadResult nelder_mead(F&& f, std::vector<double> x0, std::span<const double> steps,
                             const NelderMeadOptions& opt = {}) {
  const std::size_t n = x0.size();
  if (n == 0) throw std::invalid_argument("nelder_mead: empty parameter vector");
  if (steps.size() != n) throw std::invalid_argument("nelder_mead: steps size mismatch");

  NelderMeadResult res;
  auto eval = [&](const std::vector<double>& x) {
    ++res.evaluations;
    const double v = f(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };

  std::vector<std::vector<double>> simplex(n + 1, x0);
  for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += steps[i];
  std::vector<double> values(n + 1);
  for (std::size_t i = 0; i <= n; ++i) values[i] = eval(simplex[i]);

  std::vector<std::size_t> order(n + 1);
  std::vector<double> centroid(n), trial(n), trial2(n);
  auto point_along = [&](double coef, std::vector<double>& out) {
    const auto& worst = simplex[order[n]];
    for (std::size_t j = 0; j < n; ++j) out[j] = centroid[j] + coef * (centroid[j] - worst[j]);
  };

  for (res.iterations = 0; res.iterations < opt.max_iterations; ++res.iterations) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

    const double f_best = values[order[0]], f_worst = values[order[n]];
    double x_spread = 0.0;
    for (std::size_t i = 1; i <= n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        x_spread = std::max(x_spread, std::abs(simplex[order[i]][j] - simplex[order[0]][j]));
    if (std::abs(f_worst - f_best) < opt.f_tol && x_spread < opt.x_tol) {
      res.converged = true;
      break;
    }

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[order[i]][j] / n;

    point_along(opt.reflection, trial);
    const double f_ref = eval(trial);
    if (f_ref < f_best) {
      point_along(opt.reflection * opt.expansion, trial2);
      const double f_exp = eval(trial2);
      if (f_exp < f_ref) {
        simplex[order[n]] = trial2;
        values[order[n]] = f_exp;
      } else {
        simplex[order[n]] = trial;
        values[order[n]] = f_ref;
      }
      continue;
    }
    if (f_ref < values[order[n - 1]]) {
      simplex[order[n]] = trial;
      values[order[n]] = f_ref;
      continue;
    }
    // contraction: outside if the reflected point improved on the worst
    const bool outside = f_ref < f_worst;
    point_along(outside ? opt.reflection * opt.contraction : -opt.contraction, trial2);
    const double f_con = eval(trial2);
    if (f_con < (outside ? f_ref : f_worst)) {
      simplex[order[n]] = trial2;
      values[order[n]] = f_con;
      continue;
    }
    const auto best = simplex[order[0]];
    for (std::size_t i = 1; i <= n; ++i) {
      auto& v = simplex[order[i]];
      for (std::size_t j = 0; j < n; ++j) v[j] = best[j] + opt.shrink * (v[j] - best[j]);
      values[order[i]] = eval(v);
    }
  }

  const auto best = static_cast<std::size_t>(
      std::distance(values.begin(), std::min_element(values.begin(), values.end())));
  res.x = simplex[best];
  res.value = values[best];
  return res;
}

}  // namespace cae

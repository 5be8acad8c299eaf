// Acceptance run: one PASS/FAIL line per criterion, with supporting detail
// lines indented underneath. Exit status is nonzero if any criterion fails.

#include <algorithm>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "cae/harness.hpp"
#include "oracles.hpp"

using namespace cae;
using std::numbers::pi;

namespace {

struct Verdict {
  std::string name;
  bool pass = true;
  std::vector<std::string> details{};

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      details.push_back("violated: " + what);
    }
  }
  void note(const std::string& what) { details.push_back(what); }
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::vector<Verdict> verdicts;

void report(Verdict v) {
  std::printf("%s  %s\n", v.pass ? "PASS" : "FAIL", v.name.c_str());
  for (const auto& d : v.details) std::printf("      %s\n", d.c_str());
  std::fflush(stdout);
  verdicts.push_back(std::move(v));
}

Verdict table_check(const SweepReport& rep, const ReferenceData& ref, ReferenceTable table, double tol,
                    const std::string& name) {
  Verdict v{name};
  const auto summary = compare_reference(rep, ref, table == ReferenceTable::energy ? tol : 1.0,
                                         table == ReferenceTable::shannon ? tol : 1.0);
  std::size_t within = 0, total = 0;
  for (const auto& c : summary.checks) {
    if (c.table != table) continue;
    ++total;
    if (c.passed()) {
      ++within;
      continue;
    }
    v.pass = false;
    v.note(fmt("%s r0=%s expected %.5f computed %s |d|=%.2e", kind_name(c.kind).c_str(),
               radius_token(c.r0).c_str(), c.expected,
               c.computed ? format_number(*c.computed).c_str() : "missing", c.deviation()));
  }
  v.details.insert(v.details.begin(), fmt("%zu/%zu cells within %.0e", within, total, tol));
  return v;
}

RadialDensity hydrogenic(double a) {
  return RadialDensity([a](double r) { return a * a * a / pi * std::exp(-2.0 * a * r); },
                       CavityRadius::free_space(), 40.0 / a, 256);
}

}  // namespace

int main() {
  const auto ref = ReferenceData::load();

  SweepConfig cfg;
  cfg.output_dir = "acceptance_out";
  std::printf("sweep: %zu kinds x %zu radii, order %d, %d density points, %d job(s)\n", cfg.kinds.size(),
              cfg.radii.size(), cfg.quad_order, cfg.density_points, cfg.jobs);
  std::fflush(stdout);
  const auto rep = run_sweep(cfg);
  std::size_t failed_cells = 0;
  for (const auto& c : rep.cells)
    if (!c.ok()) ++failed_cells;
  std::printf("sweep finished in %.1f s, %zu failed cells\n", rep.wall_seconds, failed_cells);

  // 1. energies
  {
    auto v = table_check(rep, ref, ReferenceTable::energy, 2e-3, "reference energies within 2e-3 hartree");
    v.require(rep.wall_seconds < 600.0, fmt("full sweep under 10 minutes (took %.1f s)", rep.wall_seconds));
    std::size_t below = 0;
    for (const auto& e : ref.targets(ReferenceTable::energy)) {
      const auto* c = rep.find(*e.kind, e.r0);
      if (c && c->ok() && c->solve->energy < e.value - 2e-3) ++below;
    }
    v.note(fmt("cells lower than the table by more than 2e-3: %zu", below));
    report(std::move(v));
  }

  // 2. Shannon entropies
  report(table_check(rep, ref, ReferenceTable::shannon, 5e-3, "reference Shannon entropies within 5e-3"));

  // 3. analytic hydrogenic oracles
  {
    Verdict v{"analytic hydrogenic oracles within 1e-6 relative"};
    double worst = 0.0;
    auto track = [&](double got, double want, const std::string& what) {
      const double dev = std::abs(got - want) / std::abs(want);
      worst = std::max(worst, dev);
      v.require(dev <= 1e-6, fmt("%s: %.10g vs %.10g", what.c_str(), got, want));
    };
    for (double a : {1.0, 27.0 / 16.0, 2.0}) {
      const auto d = hydrogenic(a);
      const std::string tag = fmt("alpha=%.4g", a);
      track(shannon(d), 3.0 + std::log(pi) - 3.0 * std::log(a), tag + " Shannon");
      track(fisher(d), 4.0 * a * a, tag + " Fisher");
      track(disequilibrium(d), a * a * a / (8.0 * pi), tag + " disequilibrium");
      for (double q : default_tsallis_indices()) {
        const double m = std::pow(a, 3.0 * (q - 1.0)) * std::pow(pi, 1.0 - q) / (q * q * q);
        track(tsallis(d, q), (1.0 - m) / (q - 1.0), tag + fmt(" Tsallis q=%.1f", q));
      }
    }
    track(kullback_leibler(hydrogenic(1.0), hydrogenic(2.0)), 3.0 - 3.0 * std::log(2.0), "KL(1||2)");
    v.note(fmt("worst relative deviation %.2e", worst));
    report(std::move(v));
  }

  // 4. structural properties
  {
    Verdict v{"structural properties"};
    double min_stam = INFINITY, min_kl = INFINITY, max_self_kl = 0.0, max_tsallis_gap = 0.0, max_norm = 0.0;
    std::string worst_gap_cell;
    for (const auto& c : rep.cells) {
      if (!c.ok()) continue;
      const auto& d = *c.density;
      const std::string cell = kind_name(c.kind) + " r0=" + radius_token(c.r0);
      min_stam = std::min(min_stam, c.entropy.stam_margin);
      if (c.kl_to_psi0) min_kl = std::min(min_kl, *c.kl_to_psi0);
      max_self_kl = std::max(max_self_kl, std::abs(kullback_leibler(d, d)));
      for (double dq : {-1e-3, 1e-3}) {
        const double gap = std::abs(tsallis(d, 1.0 + dq) - c.entropy.shannon);
        if (gap > max_tsallis_gap) {
          max_tsallis_gap = gap;
          worst_gap_cell = cell;
        }
        v.require(gap < 5e-3, fmt("Tsallis q=1%+g continuity on %s: gap %.2e", dq, cell.c_str(), gap));
      }
      // B from the norm integral already normalizes the reduced density
      const double norm_dev = std::abs(d.scale() - 1.0);
      max_norm = std::max(max_norm, norm_dev);
      v.require(norm_dev <= 1e-6, fmt("normalization on %s: %.2e", cell.c_str(), norm_dev));
      v.require(c.entropy.stam_margin >= -1e-9, fmt("Stam margin on %s: %.3e", cell.c_str(), c.entropy.stam_margin));
      if (c.kl_to_psi0) v.require(*c.kl_to_psi0 >= -1e-9, fmt("KL on %s: %.3e", cell.c_str(), *c.kl_to_psi0));
    }
    v.require(max_self_kl <= 1e-9, fmt("KL(d,d) = %.2e", max_self_kl));
    v.note(fmt("min Stam margin %.4e, min KL %.3e, max |KL(d,d)| %.1e", min_stam, min_kl, max_self_kl));
    v.note(fmt("max Tsallis q->1 gap %.2e (%s), max normalization deviation %.1e", max_tsallis_gap,
               worst_gap_cell.c_str(), max_norm));

    const double c_ref = fisher_shannon(hydrogenic(1.0)).complexity;
    double worst_scale = 0.0;
    for (double a : {0.5, 27.0 / 16.0, 2.0, 3.0})
      worst_scale = std::max(worst_scale, std::abs(fisher_shannon(hydrogenic(a)).complexity / c_ref - 1.0));
    v.require(worst_scale <= 1e-6, fmt("C_FS scale invariance: %.2e", worst_scale));
    v.note(fmt("hydrogenic C_FS %.6f, scale-invariance deviation %.1e", c_ref, worst_scale));

    std::mt19937_64 rng(31337);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double worst_fd = 0.0;
    for (const auto& c : rep.cells) {
      if (!c.ok() || (c.r0 != 1.0 && c.r0 != 4.0 && !std::isinf(c.r0))) continue;
      const auto psi = build_trial(c.kind, c.solve->params, make_radius(c.r0));
      const DerivativeSet ds(psi);
      const double reach = std::isinf(c.r0) ? 3.0 : c.r0;
      for (int n = 0; n < 100;) {
        const double r1 = reach * (0.02 + 0.96 * unit(rng)), r2 = reach * (0.02 + 0.96 * unit(rng));
        const double cth = 2.0 * unit(rng) - 1.0;
        const HylleraasPoint x{r1 + r2, r2 - r1, std::sqrt(r1 * r1 + r2 * r2 - 2 * r1 * r2 * cth)};
        if (x.u < 0.05 || x.s - std::abs(x.t) < 0.05) continue;
        ++n;
        const double exact = apply_hamiltonian(ds, x, kHeliumCharge);
        const double fd = oracle::hamiltonian_fd(c.kind, c.solve->params, c.r0, x, kHeliumCharge);
        worst_fd = std::max(worst_fd, std::abs(exact - fd) / std::max(std::abs(exact), std::abs(evaluate(psi, x))));
      }
    }
    v.require(worst_fd <= 1e-6, fmt("Hamiltonian vs finite differences: %.2e", worst_fd));
    v.note(fmt("Hamiltonian vs finite differences, 100 points per optimized state at r0 = 1, 4, inf: worst %.1e",
               worst_fd));
    report(std::move(v));
  }

  // 5. qualitative extrema
  {
    Verdict v{"qualitative extrema of the figure data"};
    auto value = [&](TrialKind k, double r, auto get) {
      const auto* c = rep.find(k, r);
      return c && c->ok() ? get(*c) : NAN;
    };
    std::vector<double> finite_radii;
    for (double r : cfg.radii)
      if (std::isfinite(r)) finite_radii.push_back(r);

    for (auto k : kAllTrialKinds) {
      for (std::size_t i = 1; i < finite_radii.size(); ++i) {
        const auto f = [](const SweepCell& c) { return c.entropy.fisher; };
        const double a = value(k, finite_radii[i - 1], f), b = value(k, finite_radii[i], f);
        v.require(b < a, fmt("Fisher decreasing for %s between r0=%g and %g (%.5f -> %.5f)", kind_name(k).c_str(),
                             finite_radii[i - 1], finite_radii[i], a, b));
      }
    }

    auto argmax = [&](const std::vector<double>& radii, auto get) {
      double best_r = NAN, best = -INFINITY;
      for (double r : radii) {
        const double x = get(r);
        if (x > best) {
          best = x;
          best_r = r;
        }
      }
      return best_r;
    };
    const double fd_peak = argmax(cfg.radii, [&](double r) {
      const auto f = [](const SweepCell& c) { return c.entropy.fisher; };
      return value(TrialKind::Psi4, r, f) - value(TrialKind::Psi0, r, f);
    });
    v.require(fd_peak == 2.0, fmt("Fisher difference psi4 - psi0 peaks at r0=%s", radius_token(fd_peak).c_str()));
    v.note(fmt("Fisher difference psi4 - psi0 peaks at r0=%s", radius_token(fd_peak).c_str()));

    for (auto k : {TrialKind::Psi1, TrialKind::Psi2, TrialKind::Psi3, TrialKind::Psi4}) {
      const double peak = argmax(cfg.radii, [&](double r) {
        return value(k, r, [](const SweepCell& c) { return c.kl_to_psi0.value_or(NAN); });
      });
      if (k == TrialKind::Psi1) {
        v.note(fmt("KL(psi1 || psi0) peaks at r0=%s (not part of the criterion)", radius_token(peak).c_str()));
        continue;
      }
      v.require(peak == 4.0, fmt("KL(%s || psi0) peaks at r0=%s", kind_name(k).c_str(), radius_token(peak).c_str()));
      v.note(fmt("KL(%s || psi0) peaks at r0=%s", kind_name(k).c_str(), radius_token(peak).c_str()));
    }

    SweepConfig fine;
    fine.radii = {1.0, 1.25, 1.5, 1.75, 2.0};
    const auto fine_rep = run_sweep(fine);
    for (auto k : kAllTrialKinds) {
      double best_r = NAN, best = INFINITY;
      for (double r : fine.radii) {
        const auto* c = fine_rep.find(k, r);
        if (c && c->ok() && c->entropy.fisher_shannon < best) {
          best = c->entropy.fisher_shannon;
          best_r = r;
        }
      }
      v.require(best_r >= 1.25 && best_r <= 1.75,
                fmt("C_FS minimum for %s at r0=%g", kind_name(k).c_str(), best_r));
      v.note(fmt("C_FS minimum for %s at r0=%g (%.5f)", kind_name(k).c_str(), best_r, best));
    }
    report(std::move(v));
  }

  // 6. Monte Carlo oracles
  {
    Verdict v{"Monte Carlo oracles within 5 standard errors"};
    std::mt19937_64 rng(20240601);
    for (auto [kind, r0] : {std::pair{TrialKind::Psi4, 1.0}, std::pair{TrialKind::Psi1, 5.0}}) {
      const auto* c = rep.find(kind, r0);
      if (!c || !c->ok()) {
        v.require(false, fmt("%s r0=%g missing from the sweep", kind_name(kind).c_str(), r0));
        continue;
      }
      const auto& p = c->solve->params;
      const double exact = rayleigh_quotient(kind, p, make_radius(r0)).norm;
      const double ball = 4.0 * pi * r0 * r0 * r0 / 3.0;
      const auto mc = oracle::sample_mean(
          [&] {
            const auto x = oracle::to_hylleraas(oracle::in_ball(rng, r0), oracle::in_ball(rng, r0));
            const double f = oracle::trial_direct(kind, p, r0, x);
            return f * f;
          },
          1'000'000);
      const double est = ball * ball * mc.mean, se = ball * ball * mc.std_error;
      const double z = std::abs(est - exact) / se;
      v.require(z < 5.0, fmt("<psi|psi> for %s r0=%g", kind_name(kind).c_str(), r0));
      v.note(fmt("6-D <psi|psi> %s r0=%g: quadrature %.6e, MC %.6e +- %.1e (%.2f sigma, 1e6 samples)",
                 kind_name(kind).c_str(), r0, exact, est, se, z));
    }
    {
      const auto* c = rep.find(TrialKind::Psi1, 5.0);
      if (c && c->ok()) {
        const auto& sr = *c->solve;
        const double r0 = 5.0, r = 1.0;
        const double ball = 4.0 * pi * r0 * r0 * r0 / 3.0;
        const double B2 = sr.norm_constant * sr.norm_constant;
        const double exact = one_electron_density(sr, r);
        const auto mc = oracle::sample_mean(
            [&] {
              const auto x = oracle::to_hylleraas({0.0, 0.0, r}, oracle::in_ball(rng, r0));
              const double f = oracle::trial_direct(sr.kind, sr.params, r0, x);
              return f * f;
            },
            10'000'000);
        const double est = ball * B2 * mc.mean, se = ball * B2 * mc.std_error;
        const double z = std::abs(est - exact) / se;
        v.require(z < 5.0, "density reduction for psi1 r0=5");
        v.note(fmt("density psi1 r0=5 at r=1: reduction %.6e, MC %.6e +- %.1e (%.2f sigma, 1e7 samples)", exact,
                   est, se, z));
      }
    }
    report(std::move(v));
  }

  const auto passed = std::count_if(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; });
  std::printf("%td/%zu criteria passed\n", passed, verdicts.size());
  return passed == static_cast<std::ptrdiff_t>(verdicts.size()) ? 0 : 1;
}

// Command-line front end: solve one cell, run sweeps, verify against the
// reference tables, dump densities.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "cae/harness.hpp"

namespace {

struct SweepFlags {
  std::string config_file;
  std::string r0, kind, q, out, format;
  int order = 0, points = 0, jobs = 0;

  void add_to(CLI::App* app, bool single_cell) {
    app->add_option("--config", config_file, "key=value config file (flags override it)");
    app->add_option("--r0", r0, single_cell ? "cavity radius, or inf" : "comma-separated radii, inf last");
    app->add_option("--kind", kind, single_cell ? "trial kind psi0..psi4" : "comma-separated trial kinds");
    app->add_option("--order", order, "Gauss-Legendre order per dimension");
    app->add_option("--points", points, "radial density grid points");
    if (!single_cell) {
      app->add_option("--q", q, "comma-separated Tsallis indices");
      app->add_option("--out", out, "output directory");
      app->add_option("--format", format, "csv, json or csv,json");
      app->add_option("--jobs", jobs, "worker threads (default $CAE_JOBS or 1)");
    }
  }

  cae::SweepConfig build() const {
    cae::SweepConfig cfg;
    if (!config_file.empty()) cae::apply_config_file(cfg, config_file);
    if (!r0.empty()) cae::apply_setting(cfg, "r0", r0);
    if (!kind.empty()) cae::apply_setting(cfg, "kind", kind);
    if (!q.empty()) cae::apply_setting(cfg, "q", q);
    if (!out.empty()) cae::apply_setting(cfg, "out", out);
    if (!format.empty()) cae::apply_setting(cfg, "format", format);
    if (order > 0) cfg.quad_order = order;
    if (points > 0) cfg.density_points = points;
    if (jobs > 0) cfg.jobs = jobs;
    return cfg;
  }
};

void print_sweep_summary(const cae::SweepReport& rep) {
  std::printf("%-6s %-6s %14s %11s %11s %10s %10s\n", "kind", "r0", "E", "S", "F", "C_FS", "KL");
  for (const auto& c : rep.cells) {
    if (!c.ok()) {
      std::printf("%-6s %-6s  FAILED: %s\n", cae::kind_name(c.kind).c_str(),
                  cae::radius_token(c.r0).c_str(), c.error.c_str());
      continue;
    }
    std::printf("%-6s %-6s %14.6f %11.5f %11.5f %10.5f %10s\n", cae::kind_name(c.kind).c_str(),
                cae::radius_token(c.r0).c_str(), c.solve->energy, c.entropy.shannon,
                c.entropy.fisher, c.entropy.fisher_shannon,
                c.kl_to_psi0 ? cae::format_number(*c.kl_to_psi0).c_str() : "-");
  }
  std::printf("config %s, %.1f s\n", rep.config_hash.c_str(), rep.wall_seconds);
}

cae::SolveResult solve_single(const cae::SweepConfig& cfg) {
  if (cfg.kinds.size() != 1 || cfg.radii.size() != 1)
    throw std::invalid_argument("exactly one --kind and one --r0 are required");
  cae::SolverOptions opts;
  opts.quad_order = cfg.quad_order;
  return cae::solve_ground_state(cfg.kinds.front(), cae::make_radius(cfg.radii.front()), opts);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Variational confined helium and information measures of its densities"};
  app.require_subcommand(1);

  SweepFlags solve_flags, sweep_flags, verify_flags, density_flags;
  std::string solve_format = "text";
  auto* solve = app.add_subcommand("solve", "optimize one (kind, r0) cell");
  solve_flags.add_to(solve, true);
  solve->add_option("--format", solve_format, "text or json")->check(CLI::IsMember({"text", "json"}));

  auto* sweep = app.add_subcommand("sweep", "solve all kinds x radii and write tables and figure data");
  sweep_flags.add_to(sweep, false);

  double tol_e = 2e-3, tol_s = 5e-3;
  bool covered_only = false;
  std::string reference_file = CAE_REFERENCE_FILE;
  auto* verify = app.add_subcommand("verify", "run a sweep and compare with the reference tables");
  verify_flags.add_to(verify, false);
  verify->add_option("--tol-e", tol_e, "energy tolerance (hartree)");
  verify->add_option("--tol-s", tol_s, "Shannon entropy tolerance");
  verify->add_option("--reference", reference_file, "reference table CSV");
  verify->add_flag("--covered-only", covered_only, "skip reference cells outside the sweep");

  std::string density_out;
  auto* density = app.add_subcommand("density", "dump one density as CSV (r, rho, drho_dr)");
  density_flags.add_to(density, true);
  density->add_option("--out", density_out, "output file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) {
      const auto res = solve_single(solve_flags.build());
      if (solve_format == "json") {
        nlohmann::json j{{"kind", cae::kind_name(res.kind)},
                         {"r0", cae::radius_token(res.r0.value())},
                         {"param_names", cae::parameter_names(res.kind)},
                         {"params", res.params},
                         {"energy", res.energy},
                         {"norm_constant", res.norm_constant},
                         {"quad_order", res.quad_order},
                         {"converged", res.converged}};
        std::cout << j.dump(2) << '\n';
      } else {
        std::printf("kind    %s\nr0      %s\nenergy  %.10f\nB       %.10g\n",
                    cae::kind_name(res.kind).c_str(), cae::radius_token(res.r0.value()).c_str(),
                    res.energy, res.norm_constant);
        const auto names = cae::parameter_names(res.kind);
        for (std::size_t i = 0; i < names.size(); ++i)
          std::printf("%-7s %.10g\n", names[i].c_str(), res.params[i]);
        std::printf("converged %s\n", res.converged ? "yes" : "no");
      }
      return 0;
    }

    if (density->parsed()) {
      const auto cfg = density_flags.build();
      const auto res = solve_single(cfg);
      const auto d = cae::tabulate_density(res, cfg.density_points, cfg.quad_order);
      std::ofstream file;
      if (!density_out.empty()) {
        file.open(density_out);
        if (!file) throw std::runtime_error("cannot write '" + density_out + "'");
      }
      std::ostream& out = density_out.empty() ? std::cout : file;
      out << "r,rho,drho_dr\n";
      for (std::size_t i = 0; i < d.size(); ++i)
        out << cae::format_number(d.nodes()[i]) << ',' << cae::format_number(d.values()[i]) << ','
            << cae::format_number(d.derivatives()[i]) << '\n';
      return 0;
    }

    if (sweep->parsed()) {
      const auto cfg = sweep_flags.build();
      const auto rep = cae::run_sweep(cfg);
      print_sweep_summary(rep);
      for (auto fmt : cfg.formats) cae::emit(rep, fmt);
      std::printf("wrote %s\n", cfg.output_dir.c_str());
      const bool all_ok = std::all_of(rep.cells.begin(), rep.cells.end(), [](const auto& c) { return c.ok(); });
      return all_ok ? 0 : 1;
    }

    if (verify->parsed()) {
      const auto ref = cae::ReferenceData::load(reference_file);
      const auto cfg = verify_flags.build();
      const auto rep = cae::run_sweep(cfg);
      const auto summary = cae::compare_reference(rep, ref, tol_e, tol_s, covered_only);
      for (const auto& c : summary.checks) {
        if (c.passed()) continue;
        std::printf("FAIL %-7s %-6s %-6s expected %10.5f computed %10s |d| %.2e > %.1e\n",
                    cae::table_name(c.table).c_str(), cae::kind_name(c.kind).c_str(),
                    cae::radius_token(c.r0).c_str(), c.expected,
                    c.computed ? cae::format_number(*c.computed).c_str() : "missing", c.deviation(),
                    c.tolerance);
      }
      std::printf("worst offenders:\n");
      for (const auto& c : summary.worst(5))
        std::printf("  %-7s %-6s %-6s |d| %.2e (tol %.1e)\n", cae::table_name(c.table).c_str(),
                    cae::kind_name(c.kind).c_str(), cae::radius_token(c.r0).c_str(), c.deviation(),
                    c.tolerance);
      std::printf("%zu/%zu reference cells within tolerance\n", summary.checks.size() - summary.failures(),
                  summary.checks.size());
      return summary.passed() ? 0 : 1;
    }
  } catch (const cae::SolveError& e) {
    std::fprintf(stderr, "error: %s (best energy %.8f)\n", e.what(), e.best().energy);
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}

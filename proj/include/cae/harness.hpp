#pragma once

// Sweeps over cavity radii and trial kinds, regression against the reference
// tables, and CSV/JSON output of tables and figure data.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "cae/density.hpp"
#include "cae/infotheory.hpp"
#include "cae/reference.hpp"
#include "cae/variational.hpp"

namespace cae {

enum class OutputFormat { csv, json };

inline OutputFormat parse_format(std::string_view s) {
  if (s == "csv") return OutputFormat::csv;
  if (s == "json") return OutputFormat::json;
  throw std::invalid_argument("unknown output format '" + std::string(s) + "'");
}

inline std::vector<double> default_radii() {
  return {0.5, 0.6, 0.7, 0.8, 0.9, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 10.0,
          std::numeric_limits<double>::infinity()};
}

inline int default_jobs() {
  if (const char* env = std::getenv("CAE_JOBS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (const std::exception&) {
    }
  }
  return 1;
}

struct SweepConfig {
  std::vector<double> radii = default_radii();  // +inf for free space
  std::vector<TrialKind> kinds{kAllTrialKinds.begin(), kAllTrialKinds.end()};
  int quad_order = kDefaultQuadOrder;
  int density_points = kDefaultDensityPoints;
  std::vector<double> tsallis_q = default_tsallis_indices();
  std::string output_dir = "cae_out";
  std::set<OutputFormat> formats{OutputFormat::csv};
  int jobs = default_jobs();

  void validate() const {
    if (radii.empty()) throw std::invalid_argument("sweep config: radii must not be empty");
    for (std::size_t i = 0; i < radii.size(); ++i) {
      if (!(radii[i] > 0.0)) throw std::invalid_argument("sweep config: radii must be positive");
      if (i > 0 && !(radii[i] > radii[i - 1]))
        throw std::invalid_argument("sweep config: radii must be strictly increasing (inf last)");
    }
    if (kinds.empty()) throw std::invalid_argument("sweep config: kinds must not be empty");
    if (std::set<TrialKind>(kinds.begin(), kinds.end()).size() != kinds.size())
      throw std::invalid_argument("sweep config: duplicate kinds");
    if (quad_order < 8) throw std::invalid_argument("sweep config: order must be >= 8");
    if (density_points < kMinDensityPoints)
      throw std::invalid_argument("sweep config: density points must be >= 64");
    for (double q : tsallis_q)
      if (!(q > 0.0) || q == 1.0) throw std::invalid_argument("sweep config: tsallis q must be > 0 and != 1");
    if (jobs < 1) throw std::invalid_argument("sweep config: jobs must be >= 1");
  }

  /// Canonical text form; the provenance hash is taken over this.
  std::string canonical() const {
    std::ostringstream os;
    os.precision(17);
    os << "radii=";
    for (double r : radii) os << r << ';';
    os << "kinds=";
    for (auto k : kinds) os << kind_index(k) << ';';
    os << "order=" << quad_order << ";points=" << density_points << ";q=";
    for (double q : tsallis_q) os << q << ';';
    return os.str();
  }
};

namespace detail {

inline std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t");
  const auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace detail

/// Applies one key=value setting. Keys mirror the CLI flags.
inline void apply_setting(SweepConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "r0" || key == "radii") {
    cfg.radii.clear();
    for (const auto& r : detail::split_list(value)) cfg.radii.push_back(parse_radius(r));
  } else if (key == "kind" || key == "kinds") {
    cfg.kinds.clear();
    for (const auto& k : detail::split_list(value)) cfg.kinds.push_back(parse_kind(k));
  } else if (key == "order") {
    cfg.quad_order = std::stoi(value);
  } else if (key == "points") {
    cfg.density_points = std::stoi(value);
  } else if (key == "q") {
    cfg.tsallis_q.clear();
    for (const auto& q : detail::split_list(value)) cfg.tsallis_q.push_back(std::stod(q));
  } else if (key == "out") {
    cfg.output_dir = value;
  } else if (key == "format") {
    cfg.formats.clear();
    for (const auto& f : detail::split_list(value)) cfg.formats.insert(parse_format(f));
  } else if (key == "jobs") {
    cfg.jobs = std::stoi(value);
  } else {
    throw std::invalid_argument("unknown config key '" + key + "'");
  }
}

/// Flat key=value text; '#' starts a comment. Unknown keys are errors.
inline void apply_config_text(SweepConfig& cfg, std::istream& in) {
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected key=value");
    auto key = detail::trim(line.substr(0, eq));
    std::replace(key.begin(), key.end(), '-', '_');
    apply_setting(cfg, key, detail::trim(line.substr(eq + 1)));
  }
}

inline void apply_config_file(SweepConfig& cfg, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path.string() + "'");
  apply_config_text(cfg, in);
}

// ---------------------------------------------------------------------------

struct SweepCell {
  TrialKind kind = TrialKind::Psi0;
  double r0 = 0.0;
  std::optional<SolveResult> solve;
  std::optional<RadialDensity> density;
  EntropyReport entropy;
  std::optional<double> kl_to_psi0;  // KL(rho_kind, rho_0) at the same radius
  std::string error;

  bool ok() const { return solve.has_value() && density.has_value() && error.empty(); }
};

struct SweepReport {
  SweepConfig config;
  std::vector<SweepCell> cells;  // kinds-major in config order, radii ascending
  std::string config_hash;
  std::string timestamp;
  double wall_seconds = 0.0;

  const SweepCell* find(TrialKind kind, double r0) const {
    for (const auto& c : cells)
      if (c.kind == kind && same_radius(c.r0, r0)) return &c;
    return nullptr;
  }
};

namespace detail {

inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline void solve_cell(SweepCell& cell, const SweepConfig& cfg,
                       const std::optional<std::vector<double>>& seed) {
  try {
    SolverOptions opts;
    opts.quad_order = cfg.quad_order;
    opts.continuation = seed;
    cell.solve = solve_ground_state(cell.kind, make_radius(cell.r0), opts);
    cell.density = tabulate_density(*cell.solve, cfg.density_points, cfg.quad_order);
    cell.entropy = entropy_report(*cell.density, cfg.tsallis_q);
  } catch (const SolveError& e) {
    cell.solve = e.best();
    cell.error = e.what();
  } catch (const std::exception& e) {
    cell.error = e.what();
  }
}

}  // namespace detail

/// Solves every (kind, r0) cell and computes its information measures. Each
/// kind is swept in increasing radius, seeding the optimizer with the previous
/// optimum; kinds run on up to cfg.jobs threads. Failures are recorded per cell.
inline SweepReport run_sweep(const SweepConfig& cfg) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  SweepReport rep;
  rep.config = cfg;
  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx",
                static_cast<unsigned long long>(detail::fnv1a(cfg.canonical())));
  rep.config_hash = hash;
  rep.timestamp = detail::utc_timestamp();

  for (auto k : cfg.kinds)
    for (double r : cfg.radii) {
      SweepCell cell;
      cell.kind = k;
      cell.r0 = r;
      rep.cells.push_back(std::move(cell));
    }

  const std::size_t n_radii = cfg.radii.size();
  auto run_chain = [&](std::size_t kind_pos) {
    std::optional<std::vector<double>> seed;
    for (std::size_t j = 0; j < n_radii; ++j) {
      auto& cell = rep.cells[kind_pos * n_radii + j];
      detail::solve_cell(cell, cfg, seed);
      if (cell.solve && cell.error.empty()) seed = cell.solve->params;
    }
  };

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cfg.kinds.size(); i = next++) run_chain(i);
  };
  const int n_threads = std::min<int>(cfg.jobs, static_cast<int>(cfg.kinds.size()));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  // KL against the uncorrelated density at the same radius
  for (auto& cell : rep.cells) {
    const SweepCell* ref = rep.find(TrialKind::Psi0, cell.r0);
    if (!cell.ok() || ref == nullptr || !ref->ok()) continue;
    try {
      cell.kl_to_psi0 = kullback_leibler(*cell.density, *ref->density);
    } catch (const std::exception& e) {
      cell.error = e.what();
    }
  }
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

// ---------------------------------------------------------------------------
// Regression against the reference tables

struct CellCheck {
  ReferenceTable table = ReferenceTable::energy;
  TrialKind kind = TrialKind::Psi0;
  double r0 = 0.0;
  double expected = 0.0;
  std::optional<double> computed;  // empty when the cell is missing or failed
  double tolerance = 0.0;

  double deviation() const {
    return computed ? std::abs(*computed - expected) : std::numeric_limits<double>::infinity();
  }
  bool passed() const { return computed.has_value() && deviation() <= tolerance; }
};

struct ComparisonSummary {
  std::vector<CellCheck> checks;

  std::size_t failures() const {
    return static_cast<std::size_t>(
        std::count_if(checks.begin(), checks.end(), [](const CellCheck& c) { return !c.passed(); }));
  }
  bool passed() const { return failures() == 0; }

  /// Largest deviation relative to tolerance first.
  std::vector<CellCheck> worst(std::size_t n) const {
    auto sorted = checks;
    std::stable_sort(sorted.begin(), sorted.end(), [](const CellCheck& a, const CellCheck& b) {
      return a.deviation() / a.tolerance > b.deviation() / b.tolerance;
    });
    if (sorted.size() > n) sorted.resize(n);
    return sorted;
  }
};

/// Checks every reference target (external values excluded). With
/// `covered_only`, targets outside the report's kinds x radii are skipped;
/// otherwise they count as failures.
inline ComparisonSummary compare_reference(const SweepReport& rep, const ReferenceData& ref,
                                           double tol_e, double tol_s, bool covered_only = false) {
  ComparisonSummary out;
  for (auto table : {ReferenceTable::energy, ReferenceTable::shannon}) {
    for (const auto& e : ref.targets(table)) {
      const SweepCell* cell = rep.find(*e.kind, e.r0);
      if (covered_only && cell == nullptr) continue;
      CellCheck chk{table, *e.kind, e.r0, e.value, std::nullopt,
                    table == ReferenceTable::energy ? tol_e : tol_s};
      if (cell != nullptr && cell->ok())
        chk.computed = table == ReferenceTable::energy ? cell->solve->energy : cell->entropy.shannon;
      out.checks.push_back(chk);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Output

inline std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline std::string radius_token(double r0) { return std::isinf(r0) ? "inf" : format_number(r0); }

namespace detail {

using ColumnValue = std::function<std::optional<double>(double r0)>;

inline void write_table(const std::filesystem::path& path, const SweepReport& rep,
                        const std::vector<std::string>& names, const std::vector<ColumnValue>& columns) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << "r0";
  for (const auto& n : names) out << ',' << n;
  out << '\n';
  for (double r : rep.config.radii) {
    out << radius_token(r);
    for (const auto& col : columns) {
      const auto v = col(r);
      out << ',' << (v ? format_number(*v) : "nan");
    }
    out << '\n';
  }
}

}  // namespace detail

/// Writes tables and figure data under rep.config.output_dir and returns the
/// written paths in a fixed order.
inline std::vector<std::filesystem::path> emit(const SweepReport& rep, OutputFormat format) {
  namespace fs = std::filesystem;
  if (rep.cells.empty()) throw std::invalid_argument("emit: empty report");
  const fs::path dir = rep.config.output_dir;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory '" + dir.string() + "': " + ec.message());

  const auto& kinds = rep.config.kinds;
  const bool has_ref = std::find(kinds.begin(), kinds.end(), TrialKind::Psi0) != kinds.end();
  std::vector<TrialKind> correlated;
  for (auto k : kinds)
    if (k != TrialKind::Psi0) correlated.push_back(k);

  using Getter = std::function<std::optional<double>(const SweepCell&)>;
  auto value_of = [&](TrialKind k, double r0, const Getter& g) -> std::optional<double> {
    const SweepCell* c = rep.find(k, r0);
    if (c == nullptr || !c->ok()) return std::nullopt;
    return g(*c);
  };
  auto per_kind = [&](const std::vector<TrialKind>& ks, Getter g) {
    std::vector<detail::ColumnValue> cols;
    for (auto k : ks)
      cols.push_back([&, k, g](double r0) { return value_of(k, r0, g); });
    return cols;
  };
  auto diff_from_psi0 = [&](const std::vector<TrialKind>& ks, Getter g) {
    std::vector<detail::ColumnValue> cols;
    for (auto k : ks)
      cols.push_back([&, k, g](double r0) -> std::optional<double> {
        const auto a = value_of(k, r0, g);
        const auto b = value_of(TrialKind::Psi0, r0, g);
        if (!a || !b) return std::nullopt;
        return *a - *b;
      });
    return cols;
  };
  auto names = [](const std::vector<TrialKind>& ks, const std::string& prefix) {
    std::vector<std::string> out;
    for (auto k : ks) out.push_back(prefix + kind_name(k));
    return out;
  };

  const Getter energy = [](const SweepCell& c) -> std::optional<double> { return c.solve->energy; };
  const Getter shannon_g = [](const SweepCell& c) -> std::optional<double> { return c.entropy.shannon; };
  const Getter fisher_g = [](const SweepCell& c) -> std::optional<double> { return c.entropy.fisher; };
  const Getter cfs = [](const SweepCell& c) -> std::optional<double> { return c.entropy.fisher_shannon; };
  const Getter diseq = [](const SweepCell& c) -> std::optional<double> { return c.entropy.disequilibrium; };
  const Getter kl = [](const SweepCell& c) { return c.kl_to_psi0; };

  std::vector<fs::path> written;
  if (format == OutputFormat::csv) {
    auto table = [&](const std::string& file, const std::vector<std::string>& n,
                     const std::vector<detail::ColumnValue>& cols) {
      written.push_back(dir / file);
      detail::write_table(written.back(), rep, n, cols);
    };
    table("table_energies.csv", names(kinds, "E_"), per_kind(kinds, energy));
    table("table_shannon.csv", names(kinds, "S_"), per_kind(kinds, shannon_g));
    table("figure_fisher.csv", names(kinds, "F_"), per_kind(kinds, fisher_g));
    table("figure_cfs.csv", names(kinds, "CFS_"), per_kind(kinds, cfs));
    table("figure_disequilibrium.csv", names(kinds, "D_"), per_kind(kinds, diseq));
    for (double q : rep.config.tsallis_q) {
      const Getter ts = [q](const SweepCell& c) -> std::optional<double> {
        const auto it = c.entropy.tsallis.find(q);
        if (it == c.entropy.tsallis.end()) return std::nullopt;
        return it->second;
      };
      table("figure_tsallis_q" + format_number(q) + ".csv", names(kinds, "Sq_"), per_kind(kinds, ts));
    }
    if (has_ref && !correlated.empty()) {
      table("figure_shannon_diff.csv", names(correlated, "dS_"), diff_from_psi0(correlated, shannon_g));
      table("figure_fisher_diff.csv", names(correlated, "dF_"), diff_from_psi0(correlated, fisher_g));
      table("figure_kl.csv", names(correlated, "KL_"), per_kind(correlated, kl));
    }
    const fs::path dens_dir = dir / "densities";
    fs::create_directories(dens_dir, ec);
    for (const auto& c : rep.cells) {
      if (!c.ok()) continue;
      const auto path = dens_dir / ("density_" + kind_name(c.kind) + "_r0_" + radius_token(c.r0) + ".csv");
      std::ofstream out(path);
      if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
      out << "r,rho,drho_dr\n";
      const auto& d = *c.density;
      for (std::size_t i = 0; i < d.size(); ++i)
        out << format_number(d.nodes()[i]) << ',' << format_number(d.values()[i]) << ','
            << format_number(d.derivatives()[i]) << '\n';
      written.push_back(path);
    }
  } else {
    using nlohmann::json;
    auto num = [](double v) -> json {
      if (std::isfinite(v)) return v;
      return radius_token(v);
    };
    json doc;
    doc["provenance"] = {{"config_hash", rep.config_hash},
                         {"timestamp", rep.timestamp},
                         {"quad_order", rep.config.quad_order},
                         {"density_points", rep.config.density_points},
                         {"wall_seconds", rep.wall_seconds}};
    json cells = json::array();
    for (const auto& c : rep.cells) {
      json jc{{"kind", kind_name(c.kind)}, {"r0", num(c.r0)}, {"ok", c.ok()}};
      if (!c.error.empty()) jc["error"] = c.error;
      if (c.solve) {
        jc["energy"] = c.solve->energy;
        jc["params"] = c.solve->params;
        jc["param_names"] = parameter_names(c.kind);
        jc["norm_constant"] = c.solve->norm_constant;
        jc["converged"] = c.solve->converged;
      }
      if (c.ok()) {
        json ts = json::object();
        for (const auto& [q, v] : c.entropy.tsallis) ts[format_number(q)] = v;
        jc["entropy"] = {{"shannon", c.entropy.shannon},
                         {"fisher", c.entropy.fisher},
                         {"disequilibrium", c.entropy.disequilibrium},
                         {"tsallis", ts},
                         {"shannon_power", c.entropy.shannon_power},
                         {"fisher_shannon", c.entropy.fisher_shannon},
                         {"stam_margin", c.entropy.stam_margin}};
        if (c.kl_to_psi0) jc["entropy"]["kl_to_psi0"] = *c.kl_to_psi0;
      }
      cells.push_back(std::move(jc));
    }
    doc["cells"] = std::move(cells);
    const auto path = dir / "report.json";
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << doc.dump(2) << '\n';
    written.push_back(path);
  }
  return written;
}

}  // namespace cae

#pragma once

// Published reference values keyed by (table, kind, r0), read from the
// versioned CSV shipped in data/.

#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cae/wavefunction.hpp"

#ifndef CAE_REFERENCE_FILE
#define CAE_REFERENCE_FILE "data/reference_tables.csv"
#endif

namespace cae {

enum class ReferenceTable { energy, shannon };

inline std::string table_name(ReferenceTable t) { return t == ReferenceTable::energy ? "energy" : "shannon"; }

inline double parse_radius(std::string_view text) {
  std::string s(text);
  if (s == "inf" || s == "Inf" || s == "INF" || s == "infinity" || s == "∞")
    return std::numeric_limits<double>::infinity();
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("bad radius '" + s + "'");
  }
  if (pos != s.size()) throw std::invalid_argument("bad radius '" + s + "'");
  return v;
}

inline CavityRadius make_radius(double r) {
  return std::isinf(r) ? CavityRadius::free_space() : CavityRadius(r);
}

inline bool same_radius(double a, double b) {
  if (std::isinf(a) || std::isinf(b)) return std::isinf(a) && std::isinf(b);
  return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b));
}

struct ReferenceEntry {
  ReferenceTable table = ReferenceTable::energy;
  std::optional<TrialKind> kind;  // empty for external comparison values
  double r0 = 0.0;
  double value = 0.0;
  std::string source;

  bool is_target() const { return source == "target"; }
};

class ReferenceData {
 public:
  static ReferenceData parse(std::istream& in) {
    ReferenceData out;
    std::string line;
    bool header_seen = false;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line[0] == '#') {
        if (line.rfind("# version:", 0) == 0) out.version_ = std::stoi(line.substr(10));
        continue;
      }
      if (!header_seen) {
        if (line != "table,kind,r0,value,source")
          throw std::runtime_error("reference data: unexpected header '" + line + "'");
        header_seen = true;
        continue;
      }
      std::vector<std::string> f;
      std::stringstream ss(line);
      for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
      if (f.size() != 5)
        throw std::runtime_error("reference data: line " + std::to_string(line_no) + " needs 5 fields");
      ReferenceEntry e;
      if (f[0] == "energy") e.table = ReferenceTable::energy;
      else if (f[0] == "shannon") e.table = ReferenceTable::shannon;
      else throw std::runtime_error("reference data: unknown table '" + f[0] + "'");
      if (f[1] != "-") e.kind = parse_kind(f[1]);
      e.r0 = parse_radius(f[2]);
      e.value = std::stod(f[3]);
      e.source = f[4];
      out.entries_.push_back(std::move(e));
    }
    if (!header_seen) throw std::runtime_error("reference data: missing header");
    return out;
  }

  static ReferenceData load(const std::string& path = CAE_REFERENCE_FILE) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open reference data '" + path + "'");
    return parse(in);
  }

  int version() const { return version_; }
  const std::vector<ReferenceEntry>& entries() const { return entries_; }

  std::optional<double> lookup(ReferenceTable table, TrialKind kind, double r0) const {
    for (const auto& e : entries_)
      if (e.is_target() && e.table == table && e.kind == kind && same_radius(e.r0, r0)) return e.value;
    return std::nullopt;
  }

  std::vector<ReferenceEntry> targets(ReferenceTable table) const {
    std::vector<ReferenceEntry> out;
    for (const auto& e : entries_)
      if (e.is_target() && e.table == table) out.push_back(e);
    return out;
  }

 private:
  int version_ = 0;
  std::vector<ReferenceEntry> entries_;
};

}  // namespace cae

#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "semicontrol/fields.hpp"

namespace semicontrol {

/// Config file cannot be read or does not match the schema.
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Flat INI-style experiment description: [grid], [problem], [solver],
/// [optimize], [counterexample], [exponents], [run] sections with
/// key = value lines.  Unknown sections or keys are config errors.
struct ExperimentConfig {
  std::map<std::string, std::map<std::string, std::string>> sections;

  bool has(const std::string& section, const std::string& key) const;
  std::string get(const std::string& section, const std::string& key,
                  const std::string& fallback) const;
  std::string require(const std::string& section, const std::string& key) const;
  double get_double(const std::string& section, const std::string& key, double fallback) const;
  int get_int(const std::string& section, const std::string& key, int fallback) const;
  bool get_bool(const std::string& section, const std::string& key, bool fallback) const;
  std::vector<double> get_doubles(const std::string& section, const std::string& key) const;
  std::vector<int> get_ints(const std::string& section, const std::string& key) const;
};

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

/// Exit codes: 0 success, 2 config error, 3 solver divergence,
/// 4 validation failure.
int run_experiment(const std::string& command, const std::string& config_path,
                   const std::string& output_dir_override, std::ostream& log);

/// 0 iff the artifacts match within tol (prints the worst node), 1 on a
/// tolerance failure, 2 on a shape mismatch.
int diff_artifacts(const std::string& path_a, const std::string& path_b, double tol,
                   std::ostream& log);

// Deterministic CSV field serialization: columns t,x1[,x2[,x3]],value with a
// header line, %.12e floats, lexicographic node order, time-major.
void write_field_csv(const std::string& path, const SpaceTimeField& f);
void write_field_csv(const std::string& path, const SpatialField& f);
void write_field_csv(const std::string& path, const BoundaryField& f);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};
CsvTable read_csv(const std::string& path);

/// Reconstructs the value column of a field CSV written for the given grid;
/// the row count decides between space-time, spatial, and boundary layout.
Eigen::VectorXd read_field_values(const std::string& path, const GridSpec& grid);

}  // namespace semicontrol

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "evbreak/bootstrap.hpp"
#include "evbreak/copula_lab.hpp"
#include "evbreak/cusum.hpp"

namespace evbreak {

/// One test applied to every simulated sample of a cell.
struct TestSpec {
  std::string label;                     // derived from the other fields when empty
  std::vector<double> breaks;            // marginal break fractions for the adapted test
  std::optional<double> k_star_fraction; // fixed-k variant at k* = floor(n * fraction)
  Prefactor prefactor = Prefactor::adapted;

  std::string display_label() const;
};

enum class SweepParameter {
  vartheta,        // base parameter of every segment
  tau,             // Kendall tau of every segment, vartheta solved from the segment's asymmetry
  dvartheta,       // target segment vartheta = template value + v
  da,              // target segment a = (max(0.4 - v, 0), max(v - 0.4, 0)) at fixed tau
  dmu,             // target segment GEV location of `margin` = template value + v
  break_fraction,  // end of the first segment
  test_theta,      // break fraction of every adapted test
};

std::string to_string(SweepParameter p);
std::optional<SweepParameter> sweep_parameter_from_string(const std::string& s);

struct Sweep {
  SweepParameter parameter = SweepParameter::vartheta;
  std::vector<double> values;
  std::size_t segment = 1;  // target segment for the d* parameters
  std::size_t margin = 0;   // margin for dmu
  double tau = 0.5;         // fixed tau for da
};

struct ExperimentConfig {
  std::string name = "experiment";
  DgpScenario scenario;  // template; n is replaced by each entry of n_values
  std::vector<std::size_t> n_values{100};
  std::vector<TestSpec> tests{TestSpec{}};
  std::optional<Sweep> sweep;
  std::optional<GridMeasure> measure;  // default grid of the scenario's dimension
  std::optional<double> bandwidth;     // default 0.01 / sqrt(n)
  std::size_t replicates = 500;        // bootstrap B
  double alpha = 0.05;
  std::size_t replications = 500;
  std::uint64_t seed = 20240101;
  std::size_t workers = 1;

  /// Throws std::invalid_argument for configs no cell could run.
  void validate() const;
};

struct ResultRow {
  std::string experiment;
  std::string parameter;  // sweep parameter name, or "none"
  double value = 0.0;     // sweep value, 0 without a sweep
  std::size_t n = 0;
  std::string test;
  std::size_t replications = 0;
  std::size_t rejections = 0;
  double rate = 0.0;
  double standard_error = 0.0;
  std::string error;  // non-empty for an infeasible cell

  bool ok() const { return error.empty(); }
};

struct ResultTable {
  std::vector<ResultRow> rows;
  std::vector<double> seconds;  // wall time per row; kept apart so the table is reproducible

  bool all_ok() const;
  /// Deterministic CSV of the rows (no timing).
  void write_csv(std::ostream& out) const;
  void write_timing_csv(std::ostream& out) const;
  /// Aligned text table for terminals.
  void write_pretty(std::ostream& out) const;
};

/// Rejection rates for every (n, test) cell. The config must not carry a sweep.
ResultTable run_experiment(const ExperimentConfig& config);

/// Rejection rates for every (sweep value, n, test) cell, ordered by sweep value.
/// Throws std::invalid_argument when the sweep is missing or empty.
ResultTable power_curve(const ExperimentConfig& config);

/// The scenario of one cell: template with n and the sweep value applied.
DgpScenario cell_scenario(const ExperimentConfig& config, std::size_t n, std::optional<double> sweep_value);

}  // namespace evbreak

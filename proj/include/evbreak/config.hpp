#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "evbreak/copula_lab.hpp"
#include "evbreak/cusum.hpp"
#include "evbreak/mc_harness.hpp"

namespace evbreak {

/// Schema violations, each prefixed by the JSON pointer of the offending value.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

/// An experiment file: one or more experiments, each with an optional
/// full-scale override of B and the replication count.
struct SimulationFile {
  struct Entry {
    ExperimentConfig config;
    std::optional<std::size_t> full_replicates;
    std::optional<std::size_t> full_replications;
  };
  std::vector<Entry> experiments;
};

DgpScenario scenario_from_json(const nlohmann::json& j);
nlohmann::json scenario_to_json(const DgpScenario& s);

GridMeasure grid_from_json(const nlohmann::json& j, std::size_t dim);
nlohmann::json grid_to_json(const GridMeasure& mu);

ExperimentConfig experiment_from_json(const nlohmann::json& j);
nlohmann::json experiment_to_json(const ExperimentConfig& c);

/// Accepts either {"experiments": [...]} or a single experiment object.
SimulationFile simulation_from_json(const nlohmann::json& j);
SimulationFile load_simulation_file(const std::string& path);

}  // namespace evbreak

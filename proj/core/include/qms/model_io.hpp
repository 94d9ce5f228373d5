#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <nlohmann/json.hpp>
#include <string>

#include "qms/gqpe.hpp"
#include "qms/models.hpp"

namespace qms {

// File formats. Model files carry a "type" tag:
//   {"type": "dense", "matrix": [[[re, im], ...], ...], "e_max_pad": 0.0}
//   {"type": "tfim", "sites": 2, "coupling": 1.0, "field": 1.0,
//    "periodic": false}
//   {"type": "classical", "energies": [...]}
//   {"type": "classical-ising", "rows": 3, "cols": 3, "coupling": 1.0,
//    "field": 0.0, "periodic": true}
// Observable files:
//   {"subsystem_dim": 2, "rest_dim": 2, "values": [...],
//    "basis": "computational" | [[[re, im], ...], ...]}
// All loader failures throw std::invalid_argument naming the offending key.

nlohmann::json load_json(const std::string& path);
void save_json(const std::string& path, const nlohmann::json& value);

Eigen::MatrixXcd complex_matrix_from_json(const nlohmann::json& value);
nlohmann::json complex_matrix_to_json(const Eigen::MatrixXcd& matrix);

bool model_is_classical(const nlohmann::json& model);
SpectralHamiltonian hamiltonian_from_json(const nlohmann::json& model);
ClassicalSystem classical_system_from_json(const nlohmann::json& model,
                                           double temperature);
LocalObservable observable_from_json(const nlohmann::json& value);

nlohmann::json gqpe_config_to_json(const GqpeConfig& cfg);
GqpeConfig gqpe_config_from_json(const nlohmann::json& value);

// Shared run settings for the chain subcommands. JSON config files use the
// long flag names as keys ("burn-in", "n-max", ...); flags given on the
// command line override file values.
struct RunConfig {
  std::string model_path;
  std::string observable_path;
  std::string output_path;
  std::string backend = "direct";
  std::string kernel = "uniform";
  double temperature = 1.0;
  double delta = 0.05;
  double epsilon = 1e-2;
  double z = 1.0;
  std::int64_t steps = 0;
  std::int64_t burn_in = 0;
  std::int64_t thinning = 1;
  std::uint64_t seed = 0;
  int n_max = 1000;
  int chains = 1;
  int initial_state = 0;

  void validate() const;
};

RunConfig run_config_from_json(const nlohmann::json& value, RunConfig base);
nlohmann::json run_config_to_json(const RunConfig& cfg);

}  // namespace qms

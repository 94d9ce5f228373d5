#include "qms/model_io.hpp"

#include <fstream>
#include <stdexcept>
#include <vector>

namespace qms {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& what) {
  throw std::invalid_argument(what);
}

const json& field(const json& value, const std::string& key) {
  const auto it = value.find(key);
  if (it == value.end()) fail("missing field \"" + key + "\"");
  return *it;
}

double number_field(const json& value, const std::string& key) {
  const json& f = field(value, key);
  if (!f.is_number()) fail("field \"" + key + "\" must be a number");
  return f.get<double>();
}

int int_field(const json& value, const std::string& key) {
  const json& f = field(value, key);
  if (!f.is_number_integer()) fail("field \"" + key + "\" must be an integer");
  return f.get<int>();
}

bool bool_field(const json& value, const std::string& key, bool fallback) {
  const auto it = value.find(key);
  if (it == value.end()) return fallback;
  if (!it->is_boolean()) fail("field \"" + key + "\" must be a boolean");
  return it->get<bool>();
}

}  // namespace

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open \"" + path + "\"");
  json value;
  try {
    in >> value;
  } catch (const json::parse_error& err) {
    fail("cannot parse \"" + path + "\": " + err.what());
  }
  return value;
}

void save_json(const std::string& path, const json& value) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail("cannot write \"" + path + "\"");
  out << value.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed for \"" + path + "\"");
}

Eigen::MatrixXcd complex_matrix_from_json(const json& value) {
  if (!value.is_array() || value.empty())
    fail("matrix must be a non-empty array of rows");
  const int rows = static_cast<int>(value.size());
  const int cols = static_cast<int>(value.at(0).size());
  Eigen::MatrixXcd out(rows, cols);
  for (int i = 0; i < rows; ++i) {
    const json& row = value.at(static_cast<std::size_t>(i));
    if (!row.is_array() || static_cast<int>(row.size()) != cols)
      fail("matrix rows have inconsistent lengths");
    for (int j = 0; j < cols; ++j) {
      const json& cell = row.at(static_cast<std::size_t>(j));
      if (cell.is_number()) {
        out(i, j) = cell.get<double>();
      } else if (cell.is_array() && cell.size() == 2 &&
                 cell.at(0).is_number() && cell.at(1).is_number()) {
        out(i, j) = std::complex<double>(cell.at(0).get<double>(),
                                         cell.at(1).get<double>());
      } else {
        fail("matrix entries must be numbers or [re, im] pairs");
      }
    }
  }
  return out;
}

json complex_matrix_to_json(const Eigen::MatrixXcd& matrix) {
  json rows = json::array();
  for (int i = 0; i < matrix.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < matrix.cols(); ++j)
      row.push_back({matrix(i, j).real(), matrix(i, j).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

bool model_is_classical(const json& model) {
  const json& type = field(model, "type");
  if (!type.is_string()) fail("model \"type\" must be a string");
  const std::string name = type.get<std::string>();
  if (name == "classical" || name == "classical-ising") return true;
  if (name == "dense" || name == "tfim") return false;
  fail("unknown model type \"" + name + "\"");
}

SpectralHamiltonian hamiltonian_from_json(const json& model) {
  const std::string type = field(model, "type").get<std::string>();
  if (type == "dense") {
    const Eigen::MatrixXcd matrix =
        complex_matrix_from_json(field(model, "matrix"));
    double pad = 0.0;
    if (model.contains("e_max_pad")) pad = number_field(model, "e_max_pad");
    return build_spectral(matrix, pad);
  }
  if (type == "tfim") {
    const int sites = int_field(model, "sites");
    return build_spectral(tfim_hamiltonian(sites,
                                           number_field(model, "coupling"),
                                           number_field(model, "field"),
                                           bool_field(model, "periodic",
                                                      false)));
  }
  fail("model type \"" + type + "\" is not a Hamiltonian");
}

ClassicalSystem classical_system_from_json(const json& model,
                                           double temperature) {
  const std::string type = field(model, "type").get<std::string>();
  if (type == "classical") {
    const json& energies = field(model, "energies");
    if (!energies.is_array() || energies.empty())
      fail("\"energies\" must be a non-empty array");
    std::vector<double> values;
    values.reserve(energies.size());
    for (const json& e : energies) {
      if (!e.is_number()) fail("\"energies\" entries must be numbers");
      values.push_back(e.get<double>());
    }
    return ClassicalSystem(std::move(values), temperature);
  }
  if (type == "classical-ising") {
    double fieldval = 0.0;
    if (model.contains("field")) fieldval = number_field(model, "field");
    return classical_ising(int_field(model, "rows"), int_field(model, "cols"),
                           number_field(model, "coupling"), fieldval,
                           bool_field(model, "periodic", true), temperature);
  }
  fail("model type \"" + type + "\" is not a classical energy table");
}

LocalObservable observable_from_json(const json& value) {
  const int m = int_field(value, "subsystem_dim");
  const int r = int_field(value, "rest_dim");
  const json& values = field(value, "values");
  if (!values.is_array() || static_cast<int>(values.size()) != m)
    fail("\"values\" must list one number per subsystem dimension");
  Eigen::VectorXd eigenvalues(m);
  for (int i = 0; i < m; ++i) {
    const json& v = values.at(static_cast<std::size_t>(i));
    if (!v.is_number()) fail("\"values\" entries must be numbers");
    eigenvalues(i) = v.get<double>();
  }
  const json& basis = field(value, "basis");
  Eigen::MatrixXcd basis_matrix;
  if (basis.is_string() && basis.get<std::string>() == "computational") {
    basis_matrix = Eigen::MatrixXcd::Identity(m, m);
  } else if (basis.is_array()) {
    basis_matrix = complex_matrix_from_json(basis);
  } else {
    fail("\"basis\" must be \"computational\" or a matrix");
  }
  return LocalObservable(m, r, basis_matrix, eigenvalues);
}

json gqpe_config_to_json(const GqpeConfig& cfg) {
  return json{{"lambda", cfg.lambda},
              {"t_max", cfg.t_max},
              {"p", cfg.p},
              {"q", cfg.q},
              {"z", cfg.z},
              {"epsilon", cfg.epsilon},
              {"e_max", cfg.e_max},
              {"temperature", cfg.temperature},
              {"omega_max", cfg.omega_max()},
              {"delta_omega", cfg.delta_omega()},
              {"shift", cfg.shift()}};
}

GqpeConfig gqpe_config_from_json(const json& value) {
  GqpeConfig cfg;
  cfg.lambda = number_field(value, "lambda");
  cfg.t_max = number_field(value, "t_max");
  cfg.p = int_field(value, "p");
  cfg.q = int_field(value, "q");
  cfg.z = number_field(value, "z");
  cfg.epsilon = number_field(value, "epsilon");
  cfg.e_max = number_field(value, "e_max");
  cfg.temperature = number_field(value, "temperature");
  cfg.validate();
  return cfg;
}

void RunConfig::validate() const {
  if (steps <= 0) fail("steps must be positive");
  if (burn_in < 0 || burn_in >= steps) fail("need steps > burn-in >= 0");
  if (thinning < 1) fail("thinning must be at least 1");
  if (!(delta > 0.0 && delta < 1.0)) fail("delta must lie in (0, 1)");
  if (!(epsilon > 0.0 && epsilon < 1.0)) fail("epsilon must lie in (0, 1)");
  if (!(temperature > 0.0)) fail("temperature must be positive");
  if (!(z > 0.0)) fail("z must be positive");
  if (n_max < 1) fail("n-max must be at least 1");
  if (chains < 1) fail("chains must be at least 1");
  if (initial_state < 0) fail("initial state must be non-negative");
  if (backend != "direct" && backend != "circuit")
    fail("backend must be \"direct\" or \"circuit\"");
  if (kernel != "uniform" && kernel != "single-flip")
    fail("kernel must be \"uniform\" or \"single-flip\"");
}

RunConfig run_config_from_json(const json& value, RunConfig base) {
  if (!value.is_object()) fail("run config must be a JSON object");
  for (const auto& item : value.items()) {
    const std::string& key = item.key();
    const json& v = item.value();
    if (key == "model")
      base.model_path = v.get<std::string>();
    else if (key == "observable")
      base.observable_path = v.get<std::string>();
    else if (key == "output")
      base.output_path = v.get<std::string>();
    else if (key == "backend")
      base.backend = v.get<std::string>();
    else if (key == "kernel")
      base.kernel = v.get<std::string>();
    else if (key == "temperature")
      base.temperature = v.get<double>();
    else if (key == "delta")
      base.delta = v.get<double>();
    else if (key == "epsilon")
      base.epsilon = v.get<double>();
    else if (key == "z")
      base.z = v.get<double>();
    else if (key == "steps")
      base.steps = v.get<std::int64_t>();
    else if (key == "burn-in")
      base.burn_in = v.get<std::int64_t>();
    else if (key == "thinning")
      base.thinning = v.get<std::int64_t>();
    else if (key == "seed")
      base.seed = v.get<std::uint64_t>();
    else if (key == "n-max")
      base.n_max = v.get<int>();
    else if (key == "chains")
      base.chains = v.get<int>();
    else if (key == "initial")
      base.initial_state = v.get<int>();
    else
      fail("unknown run config key \"" + key + "\"");
  }
  return base;
}

json run_config_to_json(const RunConfig& cfg) {
  return json{{"model", cfg.model_path},
              {"observable", cfg.observable_path},
              {"output", cfg.output_path},
              {"backend", cfg.backend},
              {"kernel", cfg.kernel},
              {"temperature", cfg.temperature},
              {"delta", cfg.delta},
              {"epsilon", cfg.epsilon},
              {"z", cfg.z},
              {"steps", cfg.steps},
              {"burn-in", cfg.burn_in},
              {"thinning", cfg.thinning},
              {"seed", cfg.seed},
              {"n-max", cfg.n_max},
              {"chains", cfg.chains},
              {"initial", cfg.initial_state}};
}

}  // namespace qms

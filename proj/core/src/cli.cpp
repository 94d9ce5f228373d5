#include "qms/cli.hpp"

#include <cmath>
#include <cstdint>
#include <exception>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <nlohmann/json.hpp>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "qms/classical.hpp"
#include "qms/errors.hpp"
#include "qms/gqpe.hpp"
#include "qms/model_io.hpp"
#include "qms/models.hpp"
#include "qms/quantum.hpp"
#include "qms/stats.hpp"

namespace qms {

namespace {

using nlohmann::json;

ProposalKernel make_kernel(const std::string& name, int num_states) {
  if (name == "single-flip") {
    int bits = 0;
    while ((1 << bits) < num_states) ++bits;
    if ((1 << bits) != num_states)
      throw std::invalid_argument(
          "single-flip kernel needs a power-of-two state count");
    return ProposalKernel::single_bit_flip(bits);
  }
  if (name == "uniform") return ProposalKernel::uniform_offdiagonal(num_states);
  throw std::invalid_argument("unknown kernel \"" + name + "\"");
}

std::string chain_file_path(const std::string& base, int chain, int chains) {
  if (chains == 1) return base;
  return base + ".chain" + std::to_string(chain);
}

// Independent chains, one worker and one output file each.
void run_chain_pool(int chains, const std::function<void(int)>& body) {
  if (chains == 1) {
    body(0);
    return;
  }
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(chains));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(chains));
  for (int k = 0; k < chains; ++k)
    pool.emplace_back([&, k] {
      try {
        body(k);
      } catch (...) {
        errors[static_cast<std::size_t>(k)] = std::current_exception();
      }
    });
  for (std::thread& t : pool) t.join();
  for (const std::exception_ptr& e : errors)
    if (e) std::rethrow_exception(e);
}

std::ofstream open_sink(const std::string& path) {
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  if (!out) throw std::invalid_argument("cannot write \"" + path + "\"");
  return out;
}

void emit_report(const json& report, const std::string& output_path) {
  if (!output_path.empty()) save_json(output_path, report);
  std::cout << report.dump(2) << '\n';
}

// ---- classical-chain -------------------------------------------------------

int cmd_classical_chain(const RunConfig& rc) {
  rc.validate();
  if (rc.model_path.empty()) throw std::invalid_argument("--model is required");
  if (rc.output_path.empty())
    throw std::invalid_argument("--output is required");
  const json model = load_json(rc.model_path);
  if (!model_is_classical(model))
    throw std::invalid_argument(
        "classical-chain needs a classical model file");
  const ClassicalSystem sys =
      classical_system_from_json(model, rc.temperature);
  if (rc.initial_state >= sys.num_states())
    throw std::invalid_argument("initial state out of range");
  const ProposalKernel kernel = make_kernel(rc.kernel, sys.num_states());
  const AcceptanceFunction af(rc.delta, rc.temperature);

  run_chain_pool(rc.chains, [&](int k) {
    std::ofstream out =
        open_sink(chain_file_path(rc.output_path, k, rc.chains));
    run_classical_chain(sys, kernel, af, rc.initial_state, rc.steps, rc.seed,
                        static_cast<std::uint64_t>(k),
                        [&](const ClassicalSample& s) {
                          out << json{{"branches", s.branches},
                                      {"energy", s.energy},
                                      {"state", s.state},
                                      {"step", s.step}}
                                     .dump()
                              << '\n';
                        },
                        rc.n_max);
    if (!out) throw std::runtime_error("sample write failed");
  });

  json outputs = json::array();
  for (int k = 0; k < rc.chains; ++k)
    outputs.push_back(chain_file_path(rc.output_path, k, rc.chains));
  const json summary{{"command", "classical-chain"},
                     {"config", run_config_to_json(rc)},
                     {"num_states", sys.num_states()},
                     {"outputs", outputs}};
  save_json(rc.output_path + ".summary.json", summary);
  std::cout << summary.dump(2) << '\n';
  return 0;
}

// ---- quantum-chain ---------------------------------------------------------

int cmd_quantum_chain(const RunConfig& rc) {
  rc.validate();
  if (rc.model_path.empty()) throw std::invalid_argument("--model is required");
  if (rc.observable_path.empty())
    throw std::invalid_argument("--observable is required");
  if (rc.output_path.empty())
    throw std::invalid_argument("--output is required");
  const json model = load_json(rc.model_path);
  if (model_is_classical(model))
    throw std::invalid_argument("quantum-chain needs a Hamiltonian model file");
  const SpectralHamiltonian h = hamiltonian_from_json(model);
  const LocalObservable b =
      observable_from_json(load_json(rc.observable_path));
  if (b.subsystem_dim() * b.rest_dim() != h.dim())
    throw std::invalid_argument(
        "observable does not factor the model dimension");
  const GqpeConfig cfg =
      plan_resources(rc.epsilon, h.e_max(), rc.temperature, rc.z);
  const AcceptanceFunction af(rc.delta, rc.temperature);
  const ProposalKernel kernel = make_kernel(rc.kernel, b.subsystem_dim());
  std::unique_ptr<EnergyMeasurement> backend;
  if (rc.backend == "circuit")
    backend = std::make_unique<CircuitBackend>(h, cfg);
  else
    backend = std::make_unique<DirectPovmBackend>(h, cfg);

  run_chain_pool(rc.chains, [&](int k) {
    std::ofstream out =
        open_sink(chain_file_path(rc.output_path, k, rc.chains));
    Eigen::MatrixXcd rho =
        Eigen::MatrixXcd::Identity(h.dim(), h.dim()) / double(h.dim());
    run_quantum_chain(rho, h, b, kernel, af, cfg, *backend, rc.steps, rc.seed,
                      static_cast<std::uint64_t>(k),
                      [&](const QuantumSample& s) {
                        out << json{{"beta_d0", s.observable_value},
                                    {"branches", s.branches},
                                    {"d0", s.d0},
                                    {"omega0", s.omega0_corrected},
                                    {"omega0_raw", s.omega0_raw},
                                    {"step", s.step}}
                                   .dump()
                            << '\n';
                      },
                      rc.n_max);
    if (!out) throw std::runtime_error("sample write failed");
  });

  json outputs = json::array();
  for (int k = 0; k < rc.chains; ++k)
    outputs.push_back(chain_file_path(rc.output_path, k, rc.chains));
  const json summary{{"command", "quantum-chain"},
                     {"config", run_config_to_json(rc)},
                     {"dimension", h.dim()},
                     {"gqpe", gqpe_config_to_json(cfg)},
                     {"outputs", outputs}};
  save_json(rc.output_path + ".summary.json", summary);
  std::cout << summary.dump(2) << '\n';
  return 0;
}

// ---- plan / gqpe-verify ----------------------------------------------------

int cmd_plan(double epsilon, double e_max, double temperature, double zeta,
             const std::string& output) {
  const GqpeConfig cfg = plan_resources(epsilon, e_max, temperature, zeta);
  const json report = gqpe_config_to_json(cfg);
  emit_report(report, output);
  return 0;
}

int cmd_gqpe_verify(double epsilon, double e_max, double temperature,
                    double zeta, int points, const std::string& output) {
  const GqpeConfig cfg = plan_resources(epsilon, e_max, temperature, zeta);
  const FilterErrorReport rep = filter_error(cfg, points);
  const double bound = 3.0 * epsilon;
  const bool pass = rep.max_error <= bound;
  const json report{{"command", "gqpe-verify"},
                    {"config", gqpe_config_to_json(cfg)},
                    {"points", points},
                    {"relative_max_error", rep.max_error},
                    {"omega_at_max", rep.omega_at_max},
                    {"bound", bound},
                    {"pass", pass}};
  emit_report(report, output);
  return pass ? 0 : 2;
}

// ---- db-verify ---------------------------------------------------------------

int cmd_db_verify(const std::string& model_path,
                  const std::string& observable_path, double temperature,
                  double delta, double epsilon, double zeta,
                  const std::string& kernel_name, int n_max,
                  std::int64_t max_terms, const std::string& output) {
  if (model_path.empty()) throw std::invalid_argument("--model is required");
  const json model = load_json(model_path);
  const AcceptanceFunction af(delta, temperature);

  if (model_is_classical(model)) {
    const ClassicalSystem sys =
        classical_system_from_json(model, temperature);
    const ProposalKernel kernel = make_kernel(kernel_name, sys.num_states());
    const DetailedBalanceReport rep =
        check_classical_db(sys, kernel, af, n_max, max_terms);
    const double bound = 1e-10;
    const bool pass = rep.max_violation <= bound;
    const json report{{"command", "db-verify"},
                      {"type", "classical"},
                      {"n_max", n_max},
                      {"max_violation", rep.max_violation},
                      {"completeness_residual", rep.completeness_residual},
                      {"max_survival", rep.max_survival},
                      {"bound", bound},
                      {"pass", pass}};
    emit_report(report, output);
    return pass ? 0 : 2;
  }

  if (observable_path.empty())
    throw std::invalid_argument(
        "--observable is required for a Hamiltonian model");
  const SpectralHamiltonian h = hamiltonian_from_json(model);
  const LocalObservable b = observable_from_json(load_json(observable_path));
  if (b.subsystem_dim() * b.rest_dim() != h.dim())
    throw std::invalid_argument(
        "observable does not factor the model dimension");
  const GqpeConfig cfg = plan_resources(epsilon, h.e_max(), temperature, zeta);
  const ProposalKernel kernel = make_kernel(kernel_name, b.subsystem_dim());
  const BranchSuperoperators ops =
      branch_superoperators_upto(h, b, kernel, af, cfg, n_max, max_terms);
  const QuantumBalanceReport balance = check_quantum_db(h, ops, temperature);
  const StationarityReport stationarity =
      check_stationarity(h, ops, temperature);
  const double bound = 10.0 * epsilon * balance.max_magnitude;
  const bool pass = balance.max_violation <= bound;
  const json report{{"command", "db-verify"},
                    {"type", "quantum"},
                    {"n_max", n_max},
                    {"gqpe", gqpe_config_to_json(cfg)},
                    {"max_violation", balance.max_violation},
                    {"per_branch", balance.per_branch},
                    {"max_magnitude", balance.max_magnitude},
                    {"completeness_residual", balance.completeness_residual},
                    {"residual_best", stationarity.residual_best},
                    {"tail_mass", stationarity.tail_mass},
                    {"residual_worst", stationarity.residual_worst},
                    {"bound", bound},
                    {"pass", pass}};
  emit_report(report, output);
  return pass ? 0 : 2;
}

// ---- report ------------------------------------------------------------------

std::vector<double> read_series(const std::string& path,
                                const std::string& quantity,
                                std::int64_t burn_in, std::int64_t thinning) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open \"" + path + "\"");
  std::vector<double> series;
  std::string line;
  std::int64_t index = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& err) {
      throw std::invalid_argument("bad record in \"" + path +
                                  "\": " + err.what());
    }
    const auto it = record.find(quantity);
    if (it == record.end())
      throw std::invalid_argument("records in \"" + path +
                                  "\" lack field \"" + quantity + "\"");
    if (index >= burn_in && (index - burn_in) % thinning == 0)
      series.push_back(it->get<double>());
    ++index;
  }
  return series;
}

json estimate_to_json(const EstimateReport& er) {
  json out{{"count", er.count},
           {"mean", er.mean},
           {"std_error", er.std_error},
           {"tau", er.tau},
           {"ess", er.ess},
           {"window_converged", er.window_converged},
           {"constant_series", er.constant_series}};
  if (er.has_reference) {
    out["reference"] = er.reference;
    out["z"] = er.z;
    out["pass"] = std::abs(er.z) <= 3.0;
  }
  return out;
}

int cmd_report(const std::vector<std::string>& inputs,
               const std::string& quantity, std::int64_t burn_in,
               std::int64_t thinning, std::optional<double> reference,
               const std::string& output, const std::string& csv_path) {
  if (inputs.empty()) throw std::invalid_argument("--input is required");
  if (burn_in < 0) throw std::invalid_argument("burn-in must be non-negative");
  if (thinning < 1) throw std::invalid_argument("thinning must be at least 1");

  json chains = json::array();
  std::vector<EstimateReport> reports;
  for (const std::string& path : inputs) {
    const std::vector<double> series =
        read_series(path, quantity, burn_in, thinning);
    const EstimateReport er =
        reference ? estimate(series, *reference) : estimate(series);
    reports.push_back(er);
    json entry = estimate_to_json(er);
    entry["file"] = path;
    chains.push_back(std::move(entry));
  }

  json out{{"command", "report"},
           {"quantity", quantity},
           {"burn-in", burn_in},
           {"thinning", thinning},
           {"chains", chains}};
  if (reports.size() > 1) {
    double mean = 0.0;
    double var = 0.0;
    for (const EstimateReport& er : reports) {
      mean += er.mean;
      var += er.std_error * er.std_error;
    }
    mean /= static_cast<double>(reports.size());
    const double se = std::sqrt(var) / static_cast<double>(reports.size());
    json pooled{{"mean", mean}, {"std_error", se}};
    if (reference) {
      pooled["reference"] = *reference;
      const double zscore = se > 0.0 ? (mean - *reference) / se
                                     : (mean == *reference ? 0.0 : INFINITY);
      pooled["z"] = zscore;
      pooled["pass"] = std::abs(zscore) <= 3.0;
    }
    out["pooled"] = pooled;
  }

  if (!csv_path.empty()) {
    std::ostringstream csv;
    csv << "file,quantity,count,mean,std_error,tau,ess,z\n";
    for (std::size_t i = 0; i < reports.size(); ++i) {
      const EstimateReport& er = reports[i];
      csv << inputs[i] << ',' << quantity << ',' << er.count << ','
          << json(er.mean).dump() << ',' << json(er.std_error).dump() << ','
          << json(er.tau).dump() << ',' << json(er.ess).dump() << ',';
      if (er.has_reference) csv << json(er.z).dump();
      csv << '\n';
    }
    std::ofstream fout(csv_path, std::ios::trunc | std::ios::binary);
    if (!fout) throw std::invalid_argument("cannot write \"" + csv_path + "\"");
    fout << csv.str();
  }

  emit_report(out, output);
  return 0;
}

// ---- flag plumbing -----------------------------------------------------------

struct RunFlags {
  std::string model, observable, output, backend = "direct",
              kernel = "uniform", config;
  double temperature = 1.0, delta = 0.05, epsilon = 1e-2, z = 1.0;
  std::int64_t steps = 0, burn_in = 0, thinning = 1;
  std::uint64_t seed = 0;
  int n_max = 1000, chains = 1, initial = 0;

  CLI::Option* model_opt = nullptr;
  CLI::Option* observable_opt = nullptr;
  CLI::Option* output_opt = nullptr;
  CLI::Option* backend_opt = nullptr;
  CLI::Option* kernel_opt = nullptr;
  CLI::Option* config_opt = nullptr;
  CLI::Option* temperature_opt = nullptr;
  CLI::Option* delta_opt = nullptr;
  CLI::Option* epsilon_opt = nullptr;
  CLI::Option* z_opt = nullptr;
  CLI::Option* steps_opt = nullptr;
  CLI::Option* burn_in_opt = nullptr;
  CLI::Option* thinning_opt = nullptr;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* n_max_opt = nullptr;
  CLI::Option* chains_opt = nullptr;
  CLI::Option* initial_opt = nullptr;
};

void add_run_flags(CLI::App* cmd, RunFlags& f, bool quantum) {
  f.model_opt = cmd->add_option("--model", f.model, "model file (JSON)");
  if (quantum)
    f.observable_opt =
        cmd->add_option("--observable", f.observable, "observable file (JSON)");
  f.output_opt =
      cmd->add_option("--output", f.output, "sample sink path (JSONL)");
  f.config_opt = cmd->add_option("--config", f.config,
                                 "JSON config file; explicit flags win");
  f.temperature_opt =
      cmd->add_option("--temperature", f.temperature, "temperature T");
  f.delta_opt = cmd->add_option("--delta", f.delta, "acceptance ceiling gap");
  if (quantum) {
    f.epsilon_opt =
        cmd->add_option("--epsilon", f.epsilon, "filter accuracy target");
    f.z_opt = cmd->add_option("--z", f.z, "grid refinement factor");
    f.backend_opt = cmd->add_option("--backend", f.backend,
                                    "energy measurement: direct | circuit");
  }
  f.kernel_opt = cmd->add_option("--kernel", f.kernel,
                                 "proposal kernel: uniform | single-flip");
  f.steps_opt = cmd->add_option("--steps", f.steps, "number of chain steps");
  f.burn_in_opt = cmd->add_option("--burn-in", f.burn_in,
                                  "records to drop at report time");
  f.thinning_opt =
      cmd->add_option("--thinning", f.thinning, "report-time thinning stride");
  f.seed_opt = cmd->add_option("--seed", f.seed, "root seed");
  f.n_max_opt = cmd->add_option("--n-max", f.n_max, "branch cap per step");
  f.chains_opt =
      cmd->add_option("--chains", f.chains, "number of independent chains");
  f.initial_opt =
      cmd->add_option("--initial", f.initial, "initial classical state index");
}

RunConfig resolve_run_config(const RunFlags& f) {
  RunConfig rc;
  if (f.config_opt != nullptr && f.config_opt->count() > 0)
    rc = run_config_from_json(load_json(f.config), rc);
  if (f.model_opt && f.model_opt->count()) rc.model_path = f.model;
  if (f.observable_opt && f.observable_opt->count())
    rc.observable_path = f.observable;
  if (f.output_opt && f.output_opt->count()) rc.output_path = f.output;
  if (f.backend_opt && f.backend_opt->count()) rc.backend = f.backend;
  if (f.kernel_opt && f.kernel_opt->count()) rc.kernel = f.kernel;
  if (f.temperature_opt && f.temperature_opt->count())
    rc.temperature = f.temperature;
  if (f.delta_opt && f.delta_opt->count()) rc.delta = f.delta;
  if (f.epsilon_opt && f.epsilon_opt->count()) rc.epsilon = f.epsilon;
  if (f.z_opt && f.z_opt->count()) rc.z = f.z;
  if (f.steps_opt && f.steps_opt->count()) rc.steps = f.steps;
  if (f.burn_in_opt && f.burn_in_opt->count()) rc.burn_in = f.burn_in;
  if (f.thinning_opt && f.thinning_opt->count()) rc.thinning = f.thinning;
  if (f.seed_opt && f.seed_opt->count()) rc.seed = f.seed;
  if (f.n_max_opt && f.n_max_opt->count()) rc.n_max = f.n_max;
  if (f.chains_opt && f.chains_opt->count()) rc.chains = f.chains;
  if (f.initial_opt && f.initial_opt->count()) rc.initial_state = f.initial;
  return rc;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"rejection-free Metropolis sampling, classical and "
               "measurement-based"};
  app.require_subcommand(1);

  CLI::App* classical_cmd = app.add_subcommand(
      "classical-chain", "run the rejection-free classical sampler");
  RunFlags classical_flags;
  add_run_flags(classical_cmd, classical_flags, false);

  CLI::App* quantum_cmd = app.add_subcommand(
      "quantum-chain", "run the measurement-based sampler");
  RunFlags quantum_flags;
  add_run_flags(quantum_cmd, quantum_flags, true);

  CLI::App* plan_cmd =
      app.add_subcommand("plan", "derive measurement resources from targets");
  double plan_epsilon = 1e-2, plan_emax = 1.0, plan_temperature = 1.0,
         plan_z = 1.0;
  std::string plan_output;
  plan_cmd->add_option("--epsilon", plan_epsilon, "filter accuracy target");
  plan_cmd->add_option("--emax", plan_emax, "spectral radius bound");
  plan_cmd->add_option("--temperature", plan_temperature, "temperature T");
  plan_cmd->add_option("--z", plan_z, "grid refinement factor");
  plan_cmd->add_option("--output", plan_output, "also write the JSON here");

  CLI::App* gqpe_cmd = app.add_subcommand(
      "gqpe-verify", "check the simulated filter against the ideal one");
  double gq_epsilon = 1e-2, gq_emax = 1.0, gq_temperature = 1.0, gq_z = 1.0;
  int gq_points = 4001;
  std::string gq_output;
  gqpe_cmd->add_option("--epsilon", gq_epsilon, "filter accuracy target");
  gqpe_cmd->add_option("--emax", gq_emax, "spectral radius bound");
  gqpe_cmd->add_option("--temperature", gq_temperature, "temperature T");
  gqpe_cmd->add_option("--z", gq_z, "grid refinement factor");
  gqpe_cmd->add_option("--points", gq_points, "sweep resolution");
  gqpe_cmd->add_option("--output", gq_output, "also write the JSON here");

  CLI::App* db_cmd = app.add_subcommand(
      "db-verify", "brute-force balance and stationarity checks");
  std::string db_model, db_observable, db_kernel = "uniform", db_output;
  double db_temperature = 1.0, db_delta = 0.05, db_epsilon = 1e-2, db_z = 1.0;
  int db_n_max = 2;
  std::int64_t db_max_terms = 100000000;
  db_cmd->add_option("--model", db_model, "model file (JSON)");
  db_cmd->add_option("--observable", db_observable,
                     "observable file (JSON, Hamiltonian models)");
  db_cmd->add_option("--temperature", db_temperature, "temperature T");
  db_cmd->add_option("--delta", db_delta, "acceptance ceiling gap");
  db_cmd->add_option("--epsilon", db_epsilon, "filter accuracy target");
  db_cmd->add_option("--z", db_z, "grid refinement factor");
  db_cmd->add_option("--kernel", db_kernel,
                     "proposal kernel: uniform | single-flip");
  db_cmd->add_option("--n-max", db_n_max, "deepest branch to enumerate");
  db_cmd->add_option("--max-terms", db_max_terms, "enumeration budget");
  db_cmd->add_option("--output", db_output, "also write the JSON here");

  CLI::App* report_cmd = app.add_subcommand(
      "report", "estimate means from sample files; never touches the RNG");
  std::vector<std::string> rp_inputs;
  std::string rp_quantity = "energy", rp_output, rp_csv;
  std::int64_t rp_burn_in = 0, rp_thinning = 1;
  double rp_reference = 0.0;
  report_cmd->add_option("--input", rp_inputs, "sample file (repeatable)");
  report_cmd->add_option("--quantity", rp_quantity,
                         "record field to average");
  report_cmd->add_option("--burn-in", rp_burn_in, "records to drop");
  report_cmd->add_option("--thinning", rp_thinning, "keep every k-th record");
  CLI::Option* rp_reference_opt = report_cmd->add_option(
      "--reference", rp_reference, "exact value to compare against");
  report_cmd->add_option("--output", rp_output, "also write the JSON here");
  report_cmd->add_option("--csv", rp_csv, "also write per-chain rows here");

  std::vector<std::string> full;
  full.reserve(args.size() + 1);
  full.push_back("qms");
  full.insert(full.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  argv.reserve(full.size());
  for (const std::string& s : full) argv.push_back(s.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    std::cout << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& err) {
    std::cerr << "error: " << err.what() << '\n' << app.help();
    return 1;
  }

  try {
    if (classical_cmd->parsed())
      return cmd_classical_chain(resolve_run_config(classical_flags));
    if (quantum_cmd->parsed())
      return cmd_quantum_chain(resolve_run_config(quantum_flags));
    if (plan_cmd->parsed())
      return cmd_plan(plan_epsilon, plan_emax, plan_temperature, plan_z,
                      plan_output);
    if (gqpe_cmd->parsed())
      return cmd_gqpe_verify(gq_epsilon, gq_emax, gq_temperature, gq_z,
                             gq_points, gq_output);
    if (db_cmd->parsed())
      return cmd_db_verify(db_model, db_observable, db_temperature, db_delta,
                           db_epsilon, db_z, db_kernel, db_n_max, db_max_terms,
                           db_output);
    if (report_cmd->parsed()) {
      std::optional<double> reference;
      if (rp_reference_opt->count() > 0) reference = rp_reference;
      return cmd_report(rp_inputs, rp_quantity, rp_burn_in, rp_thinning,
                        reference, rp_output, rp_csv);
    }
    std::cerr << "error: no subcommand\n" << app.help();
    return 1;
  } catch (const GuardError& err) {
    std::cerr << "guard: " << err.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 1;
  } catch (const json::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 1;
  } catch (const std::exception& err) {
    std::cerr << "failure: " << err.what() << '\n';
    return 2;
  }
}

}  // namespace qms

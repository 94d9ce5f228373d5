#include "qms/gqpe.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace qms {

namespace {

constexpr double kPi = 3.14159265358979323846;

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

int grid_size(int p) { return 1 << p; }

}  // namespace

double GqpeConfig::omega_max() const {
  return std::ldexp(1.0, p - 1) * kPi / t_max;
}

double GqpeConfig::delta_omega() const { return kPi / t_max; }

double GqpeConfig::shift() const { return 1.0 / (2.0 * lambda * temperature); }

void GqpeConfig::validate() const {
  require(lambda > 0.0, "lambda must be positive");
  require(t_max > 0.0, "t_max must be positive");
  require(temperature > 0.0, "temperature must be positive");
  require(z > 0.0, "z must be positive");
  require(epsilon > 0.0 && epsilon < 1.0, "epsilon must lie in (0, 1)");
  require(e_max >= 0.0, "e_max must be non-negative");
  require(p >= 1 && p <= 24, "p must lie in [1, 24]");
  require(q >= 1 && q <= p, "q must lie in [1, p]");

  // The back-action shift must be an exact grid fraction; otherwise the
  // shifted ledger arguments drift off the frequency lattice.
  const double target = z * shift();
  require(std::abs(delta_omega() - target) <= 1e-12 * delta_omega(),
          "grid spacing must equal z / (2 lambda temperature)");
  require(e_max <= omega_max() * (1.0 + 1e-12),
          "spectral bound exceeds the frequency window");
}

GqpeConfig plan_resources(double epsilon, double e_max, double temperature,
                          double z) {
  require(epsilon > 0.0 && epsilon < 1.0, "epsilon must lie in (0, 1)");
  require(e_max >= 0.0, "e_max must be non-negative");
  require(temperature > 0.0, "temperature must be positive");
  require(z > 0.0, "z must be positive");

  const double log_eps = std::log(1.0 / epsilon);
  GqpeConfig cfg;
  cfg.epsilon = epsilon;
  cfg.e_max = e_max;
  cfg.temperature = temperature;
  cfg.z = z;
  cfg.lambda = z * z * log_eps / (2.0 * kPi * kPi * temperature * temperature);
  cfg.t_max = 2.0 * kPi * cfg.lambda * temperature / z;
  cfg.q = std::max(1, static_cast<int>(std::ceil(std::log2(log_eps))));

  const int p0 =
      static_cast<int>(std::ceil(std::log2(e_max * cfg.t_max + log_eps)));
  cfg.p = std::max(p0, cfg.q);
  while (cfg.p <= 16 && e_max > cfg.omega_max()) ++cfg.p;
  if (cfg.p > 16) {
    throw GuardError("no register of at most 16 qubits covers the spectrum at "
                     "this accuracy");
  }
  cfg.validate();
  return cfg;
}

double gaussian_filter(double lambda, double omega) {
  return std::sqrt(lambda / kPi) * std::exp(-lambda * omega * omega);
}

std::vector<double> frequency_grid(const GqpeConfig& cfg) {
  cfg.validate();
  if (cfg.p > 20) {
    throw GuardError("frequency grid with p > 20 is too large to materialize");
  }
  const int n = grid_size(cfg.p);
  const double scale = cfg.omega_max() / n;
  std::vector<double> grid(n);
  for (int j = 0; j < n; ++j) grid[j] = (2 * j - n + 1) * scale;
  return grid;
}

std::vector<double> time_grid(const GqpeConfig& cfg) {
  cfg.validate();
  if (cfg.p > 20) {
    throw GuardError("time grid with p > 20 is too large to materialize");
  }
  const int n = grid_size(cfg.p);
  const double scale = cfg.t_max / n;
  std::vector<double> grid(n);
  for (int j = 0; j < n; ++j) grid[j] = (2 * j - n + 1) * scale;
  return grid;
}

Eigen::MatrixXcd cqft_matrix(const GqpeConfig& cfg) {
  cfg.validate();
  if (cfg.p > 12) {
    throw GuardError("transform matrix with p > 12 is too large to materialize");
  }
  const std::vector<double> omegas = frequency_grid(cfg);
  const std::vector<double> times = time_grid(cfg);
  const int n = grid_size(cfg.p);
  const double norm = 1.0 / std::sqrt(static_cast<double>(n));
  Eigen::MatrixXcd f(n, n);
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < n; ++j) {
      f(k, j) = std::polar(norm, omegas[k] * times[j]);
    }
  }
  return f;
}

namespace {

// Indices of the 2^q preparation states, the block nearest zero frequency.
int block_start(const GqpeConfig& cfg) {
  return (1 << (cfg.p - 1)) - (1 << (cfg.q - 1));
}

}  // namespace

Eigen::VectorXcd prepare_ancilla(const GqpeConfig& cfg) {
  cfg.validate();
  const std::vector<double> omegas = frequency_grid(cfg);
  const int n = grid_size(cfg.p);
  const int start = block_start(cfg);
  const int count = 1 << cfg.q;

  Eigen::VectorXcd state = Eigen::VectorXcd::Zero(n);
  double mass = 0.0;
  for (int l = 0; l < count; ++l) {
    const double g = gaussian_filter(cfg.lambda, omegas[start + l]);
    state(start + l) = std::sqrt(g);
    mass += g;
  }
  if (mass <= 0.0) {
    throw std::invalid_argument("filter mass vanishes on the preparation block");
  }
  state /= std::sqrt(mass);
  return state;
}

namespace {

// effective_filter(omega) = (sum_j cos(omega t_j) h_j / 2^p)^2 where
// h_j = sum_l sqrt(g(w_l)) cos(w_l t_j) over the preparation block; both
// grids are symmetric about zero so every sum is real.
struct FilterProfile {
  std::vector<double> times;
  std::vector<double> h;
  double inv_n = 0.0;

  double operator()(double omega) const {
    double total = 0.0;
    for (std::size_t j = 0; j < times.size(); ++j) {
      total += std::cos(omega * times[j]) * h[j];
    }
    total *= inv_n;
    return total * total;
  }
};

FilterProfile make_filter_profile(const GqpeConfig& cfg) {
  FilterProfile profile;
  profile.times = time_grid(cfg);
  profile.inv_n = 1.0 / static_cast<double>(grid_size(cfg.p));

  const std::vector<double> omegas = frequency_grid(cfg);
  const int start = block_start(cfg);
  const int count = 1 << cfg.q;
  profile.h.assign(profile.times.size(), 0.0);
  for (std::size_t j = 0; j < profile.times.size(); ++j) {
    double acc = 0.0;
    for (int l = 0; l < count; ++l) {
      const double w = omegas[start + l];
      acc += std::sqrt(gaussian_filter(cfg.lambda, w)) *
             std::cos(w * profile.times[j]);
    }
    profile.h[j] = acc;
  }
  return profile;
}

}  // namespace

double effective_filter(const GqpeConfig& cfg, double omega) {
  return make_filter_profile(cfg)(omega);
}

FilterErrorReport filter_error(const GqpeConfig& cfg, int points) {
  if (points < 2) throw std::invalid_argument("sweep needs at least two points");
  const FilterProfile profile = make_filter_profile(cfg);
  const double half_range = cfg.e_max + cfg.omega_max();
  const double peak = gaussian_filter(cfg.lambda, 0.0);

  FilterErrorReport report;
  for (int i = 0; i < points; ++i) {
    const double omega =
        -half_range + 2.0 * half_range * i / static_cast<double>(points - 1);
    const double err =
        std::abs(profile(omega) - gaussian_filter(cfg.lambda, omega)) / peak;
    if (err > report.max_error) {
      report.max_error = err;
      report.omega_at_max = omega;
    }
  }
  return report;
}

namespace {

void check_unit_trace(const Eigen::MatrixXcd& rho) {
  if (std::abs(rho.trace().real() - 1.0) > 1e-8 ||
      std::abs(rho.trace().imag()) > 1e-8) {
    throw std::invalid_argument("density matrix must have unit trace");
  }
}

void check_spectrum_covered(const SpectralHamiltonian& h,
                            const GqpeConfig& cfg) {
  if (h.e_max() > cfg.e_max * (1.0 + 1e-12) + 1e-12) {
    throw std::invalid_argument(
        "spectral radius exceeds the configured bound e_max");
  }
}

// Populations of a valid state are non-negative, but repeated collapse and
// rebasing can leave them at -1e-17 or so; clamp that to zero and reject
// anything worse.
Eigen::VectorXd clamped_populations(const Eigen::MatrixXcd& rho) {
  Eigen::VectorXd pop = rho.diagonal().real();
  if (pop.minCoeff() < -1e-10) {
    throw std::invalid_argument("density matrix population is negative");
  }
  return pop.cwiseMax(0.0);
}

}  // namespace

DirectPovmBackend::DirectPovmBackend(const SpectralHamiltonian& h,
                                     const GqpeConfig& cfg) {
  cfg.validate();
  check_spectrum_covered(h, cfg);
  omegas_ = frequency_grid(cfg);
  const int n = static_cast<int>(omegas_.size());
  const int d = h.dim();
  weights_.resize(n, d);
  for (int a = 0; a < d; ++a) {
    const double e = h.eigenvalues()(a);
    double mass = 0.0;
    for (int j = 0; j < n; ++j) {
      weights_(j, a) = gaussian_filter(cfg.lambda, omegas_[j] - e);
      mass += weights_(j, a);
    }
    if (mass <= 0.0) {
      throw std::invalid_argument(
          "filter mass vanishes on the grid for an eigenvalue");
    }
    weights_.col(a) /= mass;
  }
}

std::vector<double> DirectPovmBackend::outcome_distribution(
    const Eigen::MatrixXcd& rho) const {
  check_unit_trace(rho);
  const Eigen::VectorXd probs = weights_ * clamped_populations(rho);
  return std::vector<double>(probs.data(), probs.data() + probs.size());
}

int DirectPovmBackend::measure(Eigen::MatrixXcd& rho, RngStream& rng) const {
  check_unit_trace(rho);
  const Eigen::VectorXd probs = weights_ * clamped_populations(rho);
  const int j = rng.sample_weights(probs.data(), static_cast<int>(probs.size()));
  const Eigen::VectorXd amp = weights_.row(j).transpose().cwiseSqrt();
  const double norm = probs(j);
  const int d = dim();
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) {
      rho(a, b) *= amp(a) * amp(b) / norm;
    }
  }
  return j;
}

CircuitBackend::CircuitBackend(const SpectralHamiltonian& h,
                               const GqpeConfig& cfg) {
  cfg.validate();
  check_spectrum_covered(h, cfg);
  dim_ = h.dim();
  omegas_ = frequency_grid(cfg);

  const Eigen::MatrixXcd f = cqft_matrix(cfg);
  const Eigen::VectorXcd time_amp = f.adjoint() * prepare_ancilla(cfg);
  const std::vector<double> times = time_grid(cfg);
  const int n = static_cast<int>(times.size());

  Eigen::MatrixXcd staged(n, dim_);
  for (int a = 0; a < dim_; ++a) {
    const double e = h.eigenvalues()(a);
    for (int j = 0; j < n; ++j) {
      staged(j, a) = time_amp(j) * std::polar(1.0, -e * times[j]);
    }
  }
  beta_ = f * staged;
}

std::vector<double> CircuitBackend::outcome_distribution(
    const Eigen::MatrixXcd& rho) const {
  check_unit_trace(rho);
  const Eigen::VectorXd probs = beta_.cwiseAbs2() * clamped_populations(rho);
  return std::vector<double>(probs.data(), probs.data() + probs.size());
}

int CircuitBackend::measure(Eigen::MatrixXcd& rho, RngStream& rng) const {
  check_unit_trace(rho);
  const Eigen::VectorXd probs = beta_.cwiseAbs2() * clamped_populations(rho);
  const int k = rng.sample_weights(probs.data(), static_cast<int>(probs.size()));
  const double norm = probs(k);
  for (int a = 0; a < dim_; ++a) {
    for (int b = 0; b < dim_; ++b) {
      rho(a, b) *= beta_(k, a) * std::conj(beta_(k, b)) / norm;
    }
  }
  return k;
}

ExactEnergyBackend::ExactEnergyBackend(const SpectralHamiltonian& h,
                                       double delta_omega) {
  if (delta_omega <= 0.0) {
    throw std::invalid_argument("delta_omega must be positive");
  }
  dim_ = h.dim();
  const Eigen::VectorXd& evals = h.eigenvalues();
  const double tol = 1e-9 * std::max(1.0, h.e_max());

  for (int a = 0; a < dim_; ++a) {
    if (groups_.empty() ||
        evals(a) - evals(groups_.back().front()) > tol) {
      groups_.emplace_back();
      const double snapped =
          (std::round(evals(a) / delta_omega - 0.5) + 0.5) * delta_omega;
      omegas_.push_back(snapped);
    }
    groups_.back().push_back(a);
  }
}

std::vector<double> ExactEnergyBackend::outcome_distribution(
    const Eigen::MatrixXcd& rho) const {
  check_unit_trace(rho);
  const Eigen::VectorXd pop = clamped_populations(rho);
  std::vector<double> probs(groups_.size(), 0.0);
  for (std::size_t g = 0; g < groups_.size(); ++g) {
    for (int a : groups_[g]) probs[g] += pop(a);
  }
  return probs;
}

int ExactEnergyBackend::measure(Eigen::MatrixXcd& rho, RngStream& rng) const {
  const std::vector<double> probs = outcome_distribution(rho);
  const int g = rng.sample_weights(probs);
  Eigen::MatrixXcd post = Eigen::MatrixXcd::Zero(dim_, dim_);
  for (int a : groups_[g]) {
    for (int b : groups_[g]) {
      post(a, b) = rho(a, b) / probs[g];
    }
  }
  rho = std::move(post);
  return g;
}

PovmSet build_direct_povm(const SpectralHamiltonian& h, const GqpeConfig& cfg) {
  const DirectPovmBackend backend(h, cfg);
  const Eigen::MatrixXcd& vecs = h.eigenvectors();
  const int d = h.dim();

  PovmSet povm;
  povm.omegas = backend.omegas();
  const int n = static_cast<int>(povm.omegas.size());
  povm.elements.reserve(n);
  for (int j = 0; j < n; ++j) {
    const Eigen::VectorXd amp = backend.weights().row(j).transpose().cwiseSqrt();
    Eigen::MatrixXcd element = Eigen::MatrixXcd::Zero(d, d);
    for (int a = 0; a < d; ++a) {
      element += amp(a) * vecs.col(a) * vecs.col(a).adjoint();
    }
    povm.elements.push_back(std::move(element));
  }
  return povm;
}

int povm_measure(const PovmSet& povm, Eigen::MatrixXcd& rho, RngStream& rng) {
  check_unit_trace(rho);
  if (povm.elements.empty()) {
    throw std::invalid_argument("measurement needs at least one element");
  }
  std::vector<double> probs(povm.elements.size());
  std::vector<Eigen::MatrixXcd> post(povm.elements.size());
  double total = 0.0;
  for (std::size_t j = 0; j < povm.elements.size(); ++j) {
    post[j] = povm.elements[j] * rho * povm.elements[j].adjoint();
    probs[j] = post[j].trace().real();
    total += probs[j];
  }
  if (std::abs(total - 1.0) > 1e-8) {
    throw std::invalid_argument(
        "measurement operators do not resolve the identity on this state");
  }
  const int j = rng.sample_weights(probs);
  rho = post[j] / probs[j];
  return j;
}

}  // namespace qms

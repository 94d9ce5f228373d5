#include "qms/models.hpp"

#include <cmath>
#include <complex>
#include <sstream>
#include <stdexcept>

namespace qms {

namespace {

constexpr double kHermitianTol = 1e-10;
constexpr double kTraceTol = 1e-10;
constexpr double kUnitaryTol = 1e-10;
constexpr double kKernelTol = 1e-12;

double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

ClassicalSystem::ClassicalSystem(std::vector<double> energies_in, double temperature_in)
    : energies(std::move(energies_in)), temperature(temperature_in) {
  if (energies.size() < 2) throw std::invalid_argument("ClassicalSystem: need at least 2 states");
  for (double e : energies) {
    if (!std::isfinite(e)) throw std::invalid_argument("ClassicalSystem: non-finite energy");
  }
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw std::invalid_argument("ClassicalSystem: temperature must be positive");
  }
}

AcceptanceFunction::AcceptanceFunction(double delta, double temperature)
    : delta_(delta), temperature_(temperature) {
  if (!(delta > 0.0) || !(delta < 1.0)) {
    throw std::invalid_argument("AcceptanceFunction: delta must lie in (0, 1)");
  }
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw std::invalid_argument("AcceptanceFunction: temperature must be positive");
  }
  one_minus_delta_ = 1.0 - delta;
  // Matches -log1p(-f(omega)) at the plateau bitwise, so the shortcut in
  // surprisal() is exact, not merely close.
  floor_surprisal_ = -std::log1p(-one_minus_delta_);
  tail_cut_ = 40.0 * temperature;
}

SpectralHamiltonian::SpectralHamiltonian(Eigen::VectorXd eigenvalues,
                                         Eigen::MatrixXcd eigenvectors, double e_max)
    : eigenvalues_(std::move(eigenvalues)), eigenvectors_(std::move(eigenvectors)), e_max_(e_max) {
  const int d = static_cast<int>(eigenvalues_.size());
  if (d < 1) throw std::invalid_argument("SpectralHamiltonian: empty spectrum");
  if (eigenvectors_.rows() != d || eigenvectors_.cols() != d) {
    throw std::invalid_argument("SpectralHamiltonian: eigenvector matrix shape mismatch");
  }
  for (int a = 0; a + 1 < d; ++a) {
    if (eigenvalues_[a] > eigenvalues_[a + 1]) {
      throw std::invalid_argument("SpectralHamiltonian: eigenvalues must ascend");
    }
  }
  Eigen::MatrixXcd gram = eigenvectors_.adjoint() * eigenvectors_;
  gram -= Eigen::MatrixXcd::Identity(d, d);
  if (max_abs(gram) > kUnitaryTol) {
    throw std::invalid_argument("SpectralHamiltonian: eigenvector matrix is not unitary");
  }
  for (int a = 0; a < d; ++a) {
    if (std::abs(eigenvalues_[a]) > e_max_) {
      throw std::invalid_argument("SpectralHamiltonian: eigenvalue exceeds e_max bound");
    }
  }
}

Eigen::MatrixXcd SpectralHamiltonian::matrix() const {
  return eigenvectors_ * eigenvalues_.asDiagonal().toDenseMatrix().cast<std::complex<double>>() *
         eigenvectors_.adjoint();
}

SpectralHamiltonian build_spectral(const Eigen::MatrixXcd& h_matrix, double e_max_pad) {
  if (h_matrix.rows() != h_matrix.cols() || h_matrix.rows() < 1) {
    throw std::invalid_argument("build_spectral: matrix must be square and non-empty");
  }
  if (e_max_pad < 0.0) throw std::invalid_argument("build_spectral: negative e_max pad");
  const double dev = max_abs(h_matrix - h_matrix.adjoint());
  if (dev > kHermitianTol) {
    std::ostringstream msg;
    msg << "build_spectral: matrix is not Hermitian, max |H - H^dagger| = " << dev;
    throw std::invalid_argument(msg.str());
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h_matrix);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("build_spectral: eigendecomposition failed");
  }
  Eigen::VectorXd evals = solver.eigenvalues();
  const double e_max = evals.cwiseAbs().maxCoeff() + e_max_pad;
  return SpectralHamiltonian(std::move(evals), solver.eigenvectors(), e_max);
}

DensityMatrix::DensityMatrix(Eigen::MatrixXcd entries) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols() || entries_.rows() < 1) {
    throw std::invalid_argument("DensityMatrix: matrix must be square and non-empty");
  }
  if (max_abs(entries_ - entries_.adjoint()) > kHermitianTol) {
    throw std::invalid_argument("DensityMatrix: matrix is not Hermitian");
  }
  if (std::abs(entries_.trace() - std::complex<double>(1.0, 0.0)) > kTraceTol) {
    throw std::invalid_argument("DensityMatrix: trace must equal 1");
  }
}

void DensityMatrix::validate_full() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(entries_, Eigen::EigenvaluesOnly);
  if (solver.eigenvalues().minCoeff() < -1e-10) {
    throw std::invalid_argument("DensityMatrix: negative eigenvalue beyond tolerance");
  }
}

DensityMatrix DensityMatrix::pure(const Eigen::VectorXcd& state) {
  const double norm = state.norm();
  if (norm <= 0.0) throw std::invalid_argument("DensityMatrix::pure: zero state");
  Eigen::VectorXcd psi = state / norm;
  return DensityMatrix(psi * psi.adjoint());
}

LocalObservable::LocalObservable(int subsystem_dim, int rest_dim, Eigen::MatrixXcd basis,
                                 Eigen::VectorXd values)
    : m_(subsystem_dim), r_(rest_dim), basis_(std::move(basis)), values_(std::move(values)) {
  if (m_ < 1 || r_ < 1) throw std::invalid_argument("LocalObservable: dimensions must be >= 1");
  if (basis_.rows() != m_ || basis_.cols() != m_) {
    throw std::invalid_argument("LocalObservable: basis must be subsystem_dim x subsystem_dim");
  }
  if (values_.size() != m_) {
    throw std::invalid_argument("LocalObservable: need one value per basis vector");
  }
  Eigen::MatrixXcd gram = basis_.adjoint() * basis_;
  gram -= Eigen::MatrixXcd::Identity(m_, m_);
  if (max_abs(gram) > kUnitaryTol) {
    throw std::invalid_argument("LocalObservable: basis is not unitary");
  }
  for (int a = 0; a < m_; ++a) {
    if (!std::isfinite(values_[a])) throw std::invalid_argument("LocalObservable: non-finite value");
  }
}

Eigen::MatrixXcd observable_matrix(const LocalObservable& b) {
  const int m = b.subsystem_dim();
  const int r = b.rest_dim();
  Eigen::MatrixXcd small = Eigen::MatrixXcd::Zero(m, m);
  for (int a = 0; a < m; ++a) {
    small += b.values()[a] * (b.basis().col(a) * b.basis().col(a).adjoint());
  }
  return kron(small, Eigen::MatrixXcd::Identity(r, r));
}

ProposalKernel::ProposalKernel(Eigen::MatrixXd matrix) : matrix_(std::move(matrix)) {
  const int n = static_cast<int>(matrix_.rows());
  if (matrix_.cols() != n || n < 2) {
    throw std::invalid_argument("ProposalKernel: matrix must be square with size >= 2");
  }
  for (int b = 0; b < n; ++b) {
    double col = 0.0;
    for (int a = 0; a < n; ++a) {
      const double v = matrix_(a, b);
      if (v < -kKernelTol || v > 1.0 + kKernelTol) {
        throw std::invalid_argument("ProposalKernel: entry outside [0, 1]");
      }
      col += v;
    }
    if (std::abs(col - 1.0) > 1e-12) {
      throw std::invalid_argument("ProposalKernel: columns must sum to 1");
    }
  }
  if ((matrix_ - matrix_.transpose()).cwiseAbs().maxCoeff() > kKernelTol) {
    throw std::invalid_argument("ProposalKernel: matrix must be symmetric");
  }

  col_start_.assign(n + 1, 0);
  for (int b = 0; b < n; ++b) {
    double acc = 0.0;
    for (int a = 0; a < n; ++a) {
      const double v = matrix_(a, b);
      if (v > 0.0) {
        acc += v;
        nz_index_.push_back(a);
        nz_cum_.push_back(acc);
      }
    }
    if (static_cast<int>(nz_index_.size()) == col_start_[b]) {
      throw std::invalid_argument("ProposalKernel: column carries no mass");
    }
    col_start_[b + 1] = static_cast<int>(nz_index_.size());
  }
}

int ProposalKernel::sample(int from, RngStream& rng) const {
  if (from < 0 || from >= size()) {
    throw std::out_of_range("ProposalKernel::sample: state out of range");
  }
  const int lo = col_start_[from];
  const int hi = col_start_[from + 1];
  const double target = rng.uniform() * nz_cum_[hi - 1];
  for (int k = lo; k < hi; ++k) {
    if (target < nz_cum_[k]) return nz_index_[k];
  }
  return nz_index_[hi - 1];
}

ProposalKernel ProposalKernel::uniform_offdiagonal(int num_states) {
  if (num_states < 2) throw std::invalid_argument("uniform_offdiagonal: need >= 2 states");
  Eigen::MatrixXd m = Eigen::MatrixXd::Constant(num_states, num_states, 1.0 / (num_states - 1));
  m.diagonal().setZero();
  return ProposalKernel(std::move(m));
}

ProposalKernel ProposalKernel::single_bit_flip(int n_bits) {
  if (n_bits < 1 || n_bits > 20) throw std::invalid_argument("single_bit_flip: bad bit count");
  const int n = 1 << n_bits;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (int b = 0; b < n; ++b) {
    for (int k = 0; k < n_bits; ++k) m(b ^ (1 << k), b) = 1.0 / n_bits;
  }
  return ProposalKernel(std::move(m));
}

DensityMatrix gibbs_state(const SpectralHamiltonian& h, double temperature) {
  if (!(temperature > 0.0)) throw std::invalid_argument("gibbs_state: temperature must be positive");
  const Eigen::VectorXd& e = h.eigenvalues();
  Eigen::VectorXd w = ((e.array() - e.minCoeff()) / -temperature).exp();
  w /= w.sum();
  Eigen::MatrixXcd rho = h.eigenvectors() * w.cast<std::complex<double>>().asDiagonal() *
                         h.eigenvectors().adjoint();
  return DensityMatrix(std::move(rho));
}

double gibbs_expectation(const SpectralHamiltonian& h, double temperature,
                         const Eigen::MatrixXcd& obs) {
  if (obs.rows() != h.dim() || obs.cols() != h.dim()) {
    throw std::invalid_argument("gibbs_expectation: observable dimension mismatch");
  }
  const std::complex<double> tr = (gibbs_state(h, temperature).entries() * obs).trace();
  if (std::abs(tr.imag()) > 1e-10) {
    throw std::runtime_error("gibbs_expectation: expectation has a non-real component");
  }
  return tr.real();
}

double gibbs_expectation(const SpectralHamiltonian& h, double temperature,
                         const LocalObservable& b) {
  return gibbs_expectation(h, temperature, observable_matrix(b));
}

double gibbs_mean_energy(const ClassicalSystem& sys) {
  // Shift by the minimum energy for a stable partition sum.
  double e0 = sys.energies[0];
  for (double e : sys.energies) e0 = std::min(e0, e);
  double z = 0.0;
  double num = 0.0;
  for (double e : sys.energies) {
    const double w = std::exp(-(e - e0) / sys.temperature);
    z += w;
    num += e * w;
  }
  return num / z;
}

Eigen::MatrixXcd pauli_x() {
  Eigen::MatrixXcd m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

Eigen::MatrixXcd pauli_y() {
  Eigen::MatrixXcd m(2, 2);
  m << std::complex<double>(0, 0), std::complex<double>(0, -1), std::complex<double>(0, 1),
      std::complex<double>(0, 0);
  return m;
}

Eigen::MatrixXcd pauli_z() {
  Eigen::MatrixXcd m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Eigen::MatrixXcd tfim_hamiltonian(int sites, double coupling, double field, bool periodic) {
  if (sites < 1 || sites > 10) throw std::invalid_argument("tfim_hamiltonian: bad site count");
  const int dim = 1 << sites;
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
  auto site_op = [&](const Eigen::MatrixXcd& op, int site) {
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(1, 1);
    for (int s = 0; s < sites; ++s) {
      out = kron(out, s == site ? op : Eigen::MatrixXcd::Identity(2, 2));
    }
    return out;
  };
  const int bonds = periodic && sites > 2 ? sites : sites - 1;
  for (int i = 0; i < bonds; ++i) {
    h -= coupling * (site_op(pauli_z(), i) * site_op(pauli_z(), (i + 1) % sites));
  }
  for (int i = 0; i < sites; ++i) h -= field * site_op(pauli_x(), i);
  return h;
}

ClassicalSystem classical_ising(int rows, int cols, double coupling, double field, bool periodic,
                                double temperature) {
  if (rows < 1 || cols < 1 || rows * cols > 20) {
    throw std::invalid_argument("classical_ising: lattice too large to enumerate");
  }
  const int n = rows * cols;
  const int num_states = 1 << n;
  auto spin = [](int config, int site) { return (config >> site) & 1 ? -1.0 : 1.0; };
  std::vector<double> energies(num_states);
  for (int c = 0; c < num_states; ++c) {
    double e = 0.0;
    for (int rr = 0; rr < rows; ++rr) {
      for (int cc = 0; cc < cols; ++cc) {
        const int site = rr * cols + cc;
        // Right and down neighbors cover each bond once; wraparound bonds
        // only exist when the ring has length > 2, otherwise they would
        // duplicate an interior bond.
        if (cc + 1 < cols) {
          e -= coupling * spin(c, site) * spin(c, site + 1);
        } else if (periodic && cols > 2) {
          e -= coupling * spin(c, site) * spin(c, rr * cols);
        }
        if (rr + 1 < rows) {
          e -= coupling * spin(c, site) * spin(c, site + cols);
        } else if (periodic && rows > 2) {
          e -= coupling * spin(c, site) * spin(c, cc);
        }
        e -= field * spin(c, site);
      }
    }
    energies[c] = e;
  }
  return ClassicalSystem(std::move(energies), temperature);
}

}  // namespace qms

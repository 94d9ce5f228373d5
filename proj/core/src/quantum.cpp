#include "qms/quantum.hpp"

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>

namespace qms {

namespace {

using Complex = std::complex<double>;

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

void require_temperature_match(const AcceptanceFunction& af,
                               const GqpeConfig& cfg) {
  const double scale = std::max(1.0, std::abs(cfg.temperature));
  require(std::abs(af.temperature() - cfg.temperature) <= 1e-12 * scale,
          "acceptance function and measurement config disagree on "
          "temperature");
}

}  // namespace

QuantumDelayLedger::QuantumDelayLedger(const AcceptanceFunction& af,
                                       double shift)
    : af_(&af), shift_(shift) {
  if (!std::isfinite(shift)) throw std::invalid_argument("shift not finite");
}

void QuantumDelayLedger::start(double w0) {
  values_.assign(1, w0);
  s_.assign(1, std::vector<double>(1, 0.0));
  sbar_.assign(1, std::vector<double>(1, 0.0));
}

double QuantumDelayLedger::advance(double w_next) {
  if (values_.empty()) throw std::logic_error("ledger not started");
  values_.push_back(w_next);
  const int n = static_cast<int>(values_.size()) - 2;
  const double temp = af_->temperature();
  const std::size_t need = static_cast<std::size_t>(n) + 2;
  for (auto& row : s_) row.resize(need, 0.0);
  for (auto& row : sbar_) row.resize(need, 0.0);
  while (s_.size() < need) {
    s_.emplace_back(need, 0.0);
    sbar_.emplace_back(need, 0.0);
  }
  s_[n + 1][n + 1] = 0.0;
  sbar_[n + 1][n + 1] = 0.0;
  for (int m = n; m >= 1; --m) {
    const double down = values_[n] - values_[m - 1];
    s_[m - 1][n] =
        s_[m - 1][n - 1] +
        af_->surprisal(down + temp * (sbar_[n][m] - s_[m - 1][n - 1]) + shift_);
    sbar_[m - 1][n] =
        sbar_[m - 1][n - 1] +
        af_->surprisal(down + temp * (sbar_[n][m] - sbar_[m - 1][n - 1]));
    const double up = values_[m] - values_[n + 1];
    s_[n + 1][m] =
        s_[n + 1][m + 1] +
        af_->surprisal(up + temp * (sbar_[m][n] - s_[n + 1][m + 1]) + shift_);
    sbar_[n + 1][m] =
        sbar_[n + 1][m + 1] +
        af_->surprisal(up + temp * (sbar_[m][n] - sbar_[n + 1][m + 1]));
  }
  return values_[n + 1] - values_[0] +
         temp * (sbar_[n + 1][1] - s_[0][n]) + shift_;
}

void QuantumDelayLedger::pop() {
  if (values_.size() < 2) throw std::logic_error("nothing to pop");
  // Stale table cells are overwritten by the next advance.
  values_.pop_back();
}

double QuantumDelayLedger::delay_surprisal() const {
  const int n = branch_count();
  if (n < 0) throw std::logic_error("ledger not advanced");
  return s_[0][n];
}

std::vector<double> local_outcome_distribution(const Eigen::MatrixXcd& rho,
                                               const LocalObservable& b) {
  const int m = b.subsystem_dim();
  const int r = b.rest_dim();
  if (rho.rows() != m * r || rho.cols() != m * r)
    throw std::invalid_argument("state dimension does not match observable");
  // Partial trace over the rest factor, then sandwich with basis columns.
  Eigen::MatrixXcd traced = Eigen::MatrixXcd::Zero(m, m);
  for (int a = 0; a < m; ++a)
    for (int a2 = 0; a2 < m; ++a2)
      traced(a, a2) = rho.block(a * r, a2 * r, r, r).trace();
  std::vector<double> probs(static_cast<std::size_t>(m));
  for (int d = 0; d < m; ++d) {
    const Complex p = b.basis().col(d).adjoint() * traced * b.basis().col(d);
    probs[static_cast<std::size_t>(d)] = std::max(0.0, p.real());
  }
  return probs;
}

LocalMeasurementOutcome measure_local(const Eigen::MatrixXcd& rho,
                                      const LocalObservable& b,
                                      RngStream& rng) {
  const int m = b.subsystem_dim();
  const int r = b.rest_dim();
  const std::vector<double> probs = local_outcome_distribution(rho, b);
  double total = 0.0;
  for (double p : probs) total += p;
  if (total < 1e-14)
    throw GuardError("subsystem measurement found no probability mass");
  const int d = rng.sample_weights(probs);

  Eigen::MatrixXcd rest = Eigen::MatrixXcd::Zero(r, r);
  for (int a = 0; a < m; ++a) {
    for (int a2 = 0; a2 < m; ++a2) {
      const Complex coeff =
          std::conj(b.basis()(a, d)) * b.basis()(a2, d);
      if (coeff == Complex(0.0, 0.0)) continue;
      rest += coeff * rho.block(a * r, a2 * r, r, r);
    }
  }
  rest /= probs[static_cast<std::size_t>(d)];
  return LocalMeasurementOutcome{d, std::move(rest)};
}

Eigen::MatrixXcd prepare_local(const Eigen::MatrixXcd& rho_rest, int c,
                               const LocalObservable& b) {
  const int m = b.subsystem_dim();
  const int r = b.rest_dim();
  if (rho_rest.rows() != r || rho_rest.cols() != r)
    throw std::invalid_argument("rest state has wrong dimension");
  if (c < 0 || c >= m)
    throw std::invalid_argument("basis index out of range");
  const Eigen::MatrixXcd projector =
      b.basis().col(c) * b.basis().col(c).adjoint();
  return kron(projector, rho_rest);
}

double energy_correction(double omega0, double lambda, double t) {
  if (!(lambda > 0.0) || !(t > 0.0))
    throw std::invalid_argument("correction needs positive lambda and t");
  return 1.0 / (2.0 * lambda * t) + omega0 * std::exp(-1.0 / (4.0 * lambda * t * t));
}

QuantumStepRecord quantum_step(Eigen::MatrixXcd& rho,
                               const SpectralHamiltonian& h,
                               const LocalObservable& b,
                               const ProposalKernel& kernel,
                               const AcceptanceFunction& af,
                               const GqpeConfig& cfg,
                               const EnergyMeasurement& backend,
                               RngStream& rng, int branch_cap) {
  const int m = b.subsystem_dim();
  const int r = b.rest_dim();
  const int dim = m * r;
  require(h.dim() == dim, "observable does not factor the Hamiltonian space");
  require(backend.dim() == dim, "measurement back end has wrong dimension");
  require(rho.rows() == dim && rho.cols() == dim,
          "state dimension mismatch");
  require(kernel.size() == m, "proposal kernel size mismatch");
  require(cfg.lambda > 0.0 && cfg.temperature > 0.0,
          "config needs positive lambda and temperature");
  require(branch_cap > 0, "branch cap must be positive");
  require_temperature_match(af, cfg);

  const Eigen::MatrixXcd& v = h.eigenvectors();
  const std::vector<double>& omegas = backend.omegas();

  QuantumStepRecord rec;
  Eigen::MatrixXcd rho_eig = v.adjoint() * rho * v;
  const int j0 = backend.measure(rho_eig, rng);
  const double w0 = omegas[static_cast<std::size_t>(j0)];
  rec.omegas.push_back(w0);
  rho = v * rho_eig * v.adjoint();

  QuantumDelayLedger ledger(af, cfg.shift());
  ledger.start(w0);

  for (int n = 0;; ++n) {
    if (n >= branch_cap) {
      rec.branches = branch_cap;
      throw QuantumTruncationError("branch cap exceeded in quantum step",
                                   std::move(rec));
    }
    LocalMeasurementOutcome lm = measure_local(rho, b, rng);
    if (n == 0) {
      rec.d0 = lm.outcome;
      rec.observable_value = b.values()(lm.outcome);
    }
    const int c = rng.sample_weights(kernel.matrix().col(lm.outcome).data(), m);
    rec.outcomes.push_back(QuantumProposalOutcome{lm.outcome, c});
    rho = prepare_local(lm.rest, c, b);

    rho_eig = v.adjoint() * rho * v;
    const int j = backend.measure(rho_eig, rng);
    const double w = omegas[static_cast<std::size_t>(j)];
    rec.omegas.push_back(w);
    rho = v * rho_eig * v.adjoint();

    const double arg = ledger.advance(w);
    const double u = rng.uniform();
    if (u <= af.f(arg)) {
      rec.branches = n;
      rec.accepted = true;
      break;
    }
  }

  rec.omega0_raw = w0;
  rec.omega0_corrected = energy_correction(w0, cfg.lambda, cfg.temperature);

  // Roundoff hygiene for long chains: the exact update preserves trace and
  // Hermiticity, so pin both against drift.
  rho = (0.5 * (rho + rho.adjoint().eval())).eval();
  const double tr = rho.trace().real();
  if (!(tr > 0.0)) throw GuardError("state trace collapsed");
  rho /= tr;
  return rec;
}

void run_quantum_chain(Eigen::MatrixXcd& rho, const SpectralHamiltonian& h,
                       const LocalObservable& b, const ProposalKernel& kernel,
                       const AcceptanceFunction& af, const GqpeConfig& cfg,
                       const EnergyMeasurement& backend, std::int64_t steps,
                       std::uint64_t seed, std::uint64_t chain_index,
                       const std::function<void(const QuantumSample&)>& sink,
                       int branch_cap) {
  require(steps >= 0, "step count must be non-negative");
  for (std::int64_t i = 0; i < steps; ++i) {
    RngStream stream(seed, chain_index, static_cast<std::uint64_t>(i));
    const QuantumStepRecord rec =
        quantum_step(rho, h, b, kernel, af, cfg, backend, stream, branch_cap);
    if (sink)
      sink(QuantumSample{i, rec.omega0_raw, rec.omega0_corrected, rec.d0,
                         rec.observable_value, rec.branches});
  }
}

Eigen::MatrixXcd apply_superoperator(const Eigen::MatrixXcd& sop,
                                     const Eigen::MatrixXcd& rho) {
  const int dim = static_cast<int>(rho.rows());
  if (rho.cols() != dim || sop.rows() != dim * dim || sop.cols() != dim * dim)
    throw std::invalid_argument("superoperator dimension mismatch");
  const Eigen::Map<const Eigen::VectorXcd> vin(rho.data(),
                                               static_cast<long>(dim) * dim);
  const Eigen::VectorXcd vout = sop * vin;
  return Eigen::Map<const Eigen::MatrixXcd>(vout.data(), dim, dim);
}

BranchSuperoperators branch_superoperators_upto(
    const SpectralHamiltonian& h, const LocalObservable& b,
    const ProposalKernel& kernel, const AcceptanceFunction& af,
    const GqpeConfig& cfg, int n_max, std::int64_t max_terms) {
  const int m = b.subsystem_dim();
  const int r = b.rest_dim();
  const int dim = m * r;
  require(h.dim() == dim, "observable does not factor the Hamiltonian space");
  require(kernel.size() == m, "proposal kernel size mismatch");
  require(n_max >= 0, "need at least one branch");
  require(max_terms > 0, "term budget must be positive");
  require_temperature_match(af, cfg);

  const DirectPovmBackend backend(h, cfg);
  const Eigen::MatrixXd& wts = backend.weights();
  const std::vector<double>& omegas = backend.omegas();
  const int ng = static_cast<int>(omegas.size());
  const int dim2 = dim * dim;

  // Transfer superoperator of measure-propose-prepare, Hamiltonian
  // eigenbasis, summed over outcome and proposal.
  const Eigen::MatrixXcd& v = h.eigenvectors();
  const Eigen::MatrixXcd eye_rest = Eigen::MatrixXcd::Identity(r, r);
  Eigen::MatrixXcd transfer = Eigen::MatrixXcd::Zero(dim2, dim2);
  for (int d = 0; d < m; ++d) {
    for (int c = 0; c < m; ++c) {
      const double pcd = kernel.prob(c, d);
      if (pcd == 0.0) continue;
      const Eigen::MatrixXcd flip =
          kron(b.basis().col(c) * b.basis().col(d).adjoint(), eye_rest);
      const Eigen::MatrixXcd w = v.adjoint() * flip * v;
      transfer += pcd * kron(w.conjugate(), w);
    }
  }

  // Frequency outcome j scales the |a><b| component by
  // sqrt(c_j(E_a) c_j(E_b)); as a superoperator that is diagonal.
  std::vector<Eigen::VectorXd> scale(static_cast<std::size_t>(ng));
  for (int j = 0; j < ng; ++j) {
    Eigen::VectorXd s(dim2);
    for (int col = 0; col < dim; ++col)
      for (int row = 0; row < dim; ++row)
        s(row + dim * col) = std::sqrt(wts(j, row) * wts(j, col));
    scale[static_cast<std::size_t>(j)] = std::move(s);
  }

  BranchSuperoperators out;
  out.dim = dim;
  out.branch.assign(static_cast<std::size_t>(n_max) + 1,
                    Eigen::MatrixXcd::Zero(dim2, dim2));
  out.survival = Eigen::MatrixXcd::Zero(dim2, dim2);

  QuantumDelayLedger ledger(af, cfg.shift());
  std::int64_t terms = 0;

  // prefix already includes the scaling of the latest frequency outcome;
  // branch n applies the transfer map, one more outcome, and the
  // acceptance test.
  std::function<void(const Eigen::MatrixXcd&, int)> descend =
      [&](const Eigen::MatrixXcd& prefix, int n) {
        const Eigen::MatrixXcd shared = transfer * prefix;
        Eigen::MatrixXcd child(dim2, dim2);
        for (int j = 0; j < ng; ++j) {
          const double arg = ledger.advance(omegas[static_cast<std::size_t>(j)]);
          const double delay = std::exp(-ledger.delay_surprisal());
          terms += dim2;
          if (terms > max_terms)
            throw GuardError("branch enumeration exceeded the term budget");
          const Eigen::VectorXd& s = scale[static_cast<std::size_t>(j)];
          child = shared;
          for (int row = 0; row < dim2; ++row) child.row(row) *= s(row);
          const double accept = af.f(arg);
          out.branch[static_cast<std::size_t>(n)] += (delay * accept) * child;
          if (n == n_max)
            out.survival += (delay * (1.0 - accept)) * child;
          else
            descend(child, n + 1);
          ledger.pop();
        }
      };

  for (int j0 = 0; j0 < ng; ++j0) {
    ledger.start(omegas[static_cast<std::size_t>(j0)]);
    Eigen::MatrixXcd root = Eigen::MatrixXcd::Zero(dim2, dim2);
    root.diagonal() =
        scale[static_cast<std::size_t>(j0)].cast<Complex>();
    descend(root, 0);
  }
  return out;
}

QuantumBalanceReport check_quantum_db(const SpectralHamiltonian& h,
                                      const BranchSuperoperators& ops,
                                      double temperature) {
  require(temperature > 0.0, "temperature must be positive");
  const int dim = ops.dim;
  require(h.dim() == dim, "dimension mismatch");
  const int dim2 = dim * dim;
  const double e0 = h.eigenvalues().minCoeff();

  // Gibbs weight of the input index pair, referenced to the ground energy
  // so the comparison stays well conditioned; balance is scale invariant.
  Eigen::VectorXd wpair(dim2);
  for (int col = 0; col < dim; ++col)
    for (int row = 0; row < dim; ++row)
      wpair(row + dim * col) = std::exp(
          -((h.eigenvalues()(row) - e0) + (h.eigenvalues()(col) - e0)) /
          (2.0 * temperature));

  QuantumBalanceReport report;
  for (const Eigen::MatrixXcd& q : ops.branch) {
    const Eigen::MatrixXcd weighted = q * wpair.asDiagonal();
    const double viol =
        (weighted - weighted.adjoint()).cwiseAbs().maxCoeff();
    report.per_branch.push_back(viol);
    report.max_violation = std::max(report.max_violation, viol);
    report.max_magnitude =
        std::max(report.max_magnitude, q.cwiseAbs().maxCoeff());
  }

  Eigen::MatrixXcd total = ops.survival;
  for (const Eigen::MatrixXcd& q : ops.branch) total += q;
  for (int col = 0; col < dim2; ++col) {
    Complex sum(0.0, 0.0);
    for (int x = 0; x < dim; ++x) sum += total(x + dim * x, col);
    const double expected = (col % dim == col / dim) ? 1.0 : 0.0;
    report.completeness_residual =
        std::max(report.completeness_residual, std::abs(sum - expected));
  }
  return report;
}

StationarityReport check_stationarity(const SpectralHamiltonian& h,
                                      const BranchSuperoperators& ops,
                                      double temperature) {
  require(temperature > 0.0, "temperature must be positive");
  const int dim = ops.dim;
  require(h.dim() == dim, "dimension mismatch");
  const double e0 = h.eigenvalues().minCoeff();
  Eigen::VectorXd pi =
      (-(h.eigenvalues().array() - e0) / temperature).exp();
  pi /= pi.sum();
  const Eigen::MatrixXcd rho_t =
      pi.cast<Complex>().asDiagonal().toDenseMatrix();

  Eigen::MatrixXcd image = Eigen::MatrixXcd::Zero(dim, dim);
  for (const Eigen::MatrixXcd& q : ops.branch)
    image += apply_superoperator(q, rho_t);
  const double tail =
      apply_superoperator(ops.survival, rho_t).trace().real();

  Eigen::MatrixXcd diff = image + tail * rho_t - rho_t;
  diff = 0.5 * (diff + diff.adjoint().eval());
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(diff);
  const double residual = 0.5 * solver.eigenvalues().cwiseAbs().sum();

  StationarityReport report;
  report.residual_best = residual;
  report.tail_mass = tail;
  report.residual_worst = residual + tail;
  return report;
}

double equilibrium_energy_readout(const SpectralHamiltonian& h,
                                  const DirectPovmBackend& backend,
                                  double temperature) {
  require(temperature > 0.0, "temperature must be positive");
  require(backend.dim() == h.dim(), "dimension mismatch");
  const double e0 = h.eigenvalues().minCoeff();
  Eigen::VectorXd pi =
      (-(h.eigenvalues().array() - e0) / temperature).exp();
  pi /= pi.sum();
  const std::vector<double>& omegas = backend.omegas();
  const Eigen::Map<const Eigen::VectorXd> ovec(
      omegas.data(), static_cast<long>(omegas.size()));
  const Eigen::VectorXd per_state = backend.weights().transpose() * ovec;
  return pi.dot(per_state);
}

}  // namespace qms

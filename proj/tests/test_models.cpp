#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"
#include "qms/models.hpp"

using namespace qms;
using Complex = std::complex<double>;

namespace {

double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("acceptance function values") {
  const AcceptanceFunction af(0.05, 1.0);
  CHECK(af.f(0.0) == doctest::Approx(0.95).epsilon(1e-15));
  CHECK(af.f(-3.0) == af.f(0.0));
  CHECK(af.f(1.0) == doctest::Approx(0.95 * std::exp(-1.0)).epsilon(1e-15));
  // s(0) = -ln(1 - 0.95) = ln 20
  CHECK(af.surprisal(0.0) == doctest::Approx(std::log(20.0)).epsilon(1e-14));
  CHECK(af.surprisal(-5.0) == af.surprisal(0.0));
}

TEST_CASE("surprisal is consistent with f across the working range") {
  const AcceptanceFunction af(0.05, 2.0);
  for (double w : {0.01, 0.3, 1.0, 4.0, 17.0, 60.0}) {
    CHECK(af.surprisal(w) ==
          doctest::Approx(-std::log1p(-af.f(w))).epsilon(1e-13));
  }
}

TEST_CASE("surprisal tail rounds to zero only past the resolution cut") {
  const AcceptanceFunction af(0.05, 1.0);
  CHECK(af.surprisal(39.0) > 0.0);
  CHECK(af.surprisal(41.0) == 0.0);
  // the discarded value is below 1e-17, invisible to any accumulation
  CHECK(-std::log1p(-af.f(41.0)) < 1e-17);
  const AcceptanceFunction hot(0.05, 3.0);
  CHECK(hot.surprisal(119.0) > 0.0);
  CHECK(hot.surprisal(121.0) == 0.0);
}

TEST_CASE("acceptance function rejects bad parameters") {
  CHECK_THROWS(AcceptanceFunction(0.0, 1.0));
  CHECK_THROWS(AcceptanceFunction(1.0, 1.0));
  CHECK_THROWS(AcceptanceFunction(0.05, 0.0));
  CHECK_THROWS(AcceptanceFunction(0.05, -2.0));
}

TEST_CASE("classical system validation") {
  CHECK_THROWS(ClassicalSystem({}, 1.0));
  CHECK_THROWS(ClassicalSystem({0.0, 1.0}, 0.0));
  const ClassicalSystem sys({0.3, -1.2}, 2.0);
  CHECK(sys.num_states() == 2);
}

TEST_CASE("gibbs mean energy of a two-level system") {
  const ClassicalSystem sys({0.0, 1.0}, 1.0);
  const double w = std::exp(-1.0);
  CHECK(gibbs_mean_energy(sys) == doctest::Approx(w / (1.0 + w)).epsilon(1e-14));
}

TEST_CASE("periodic Ising ground energy and field term") {
  // 3 x 3 torus has 18 bonds; the aligned states sit at -18 J.
  const ClassicalSystem sys = classical_ising(3, 3, 1.0, 0.0, true, 1.0);
  CHECK(sys.num_states() == 512);
  CHECK(*std::min_element(sys.energies.begin(), sys.energies.end()) ==
        doctest::Approx(-18.0).epsilon(1e-14));
  CHECK(sys.energies[0] == doctest::Approx(-18.0).epsilon(1e-14));
  CHECK(sys.energies[511] == doctest::Approx(-18.0).epsilon(1e-14));

  // With a field the all-up state (bit 0 -> spin +1) is strictly lowest.
  const ClassicalSystem biased = classical_ising(3, 3, 1.0, 0.5, true, 1.0);
  CHECK(biased.energies[0] == doctest::Approx(-18.0 - 4.5).epsilon(1e-14));
  CHECK(biased.energies[511] == doctest::Approx(-18.0 + 4.5).epsilon(1e-14));
}

TEST_CASE("open-boundary Ising matches a hand count") {
  // 1 x 3 open chain: bonds (0,1), (1,2). State 0b010: spins +,-,+.
  const ClassicalSystem sys = classical_ising(1, 3, 1.0, 0.0, false, 1.0);
  CHECK(sys.num_states() == 8);
  CHECK(sys.energies[0b000] == doctest::Approx(-2.0));
  CHECK(sys.energies[0b010] == doctest::Approx(2.0));
  CHECK(sys.energies[0b001] == doctest::Approx(0.0));
}

TEST_CASE("width-two periodic lattice counts each bond once") {
  // 2 x 2 torus: wrap bonds coincide with interior bonds, leaving 4
  // distinct pairs each counted twice by the naive wrap convention; the
  // builder must not double them beyond the standard 2x2 degeneracy.
  const ClassicalSystem sys = classical_ising(2, 2, 1.0, 0.0, true, 1.0);
  // aligned: every pair bond is satisfied; on the 2x2 torus there are
  // 8 bonds in the wrap convention (each of 4 edges doubled), but the
  // builder deduplicates to 4.
  CHECK(sys.energies[0] == doctest::Approx(-4.0));
}

TEST_CASE("spectral form reconstructs the matrix and orders eigenvalues") {
  Eigen::MatrixXcd h(2, 2);
  h << Complex(1.0, 0.0), Complex(0.0, -0.7), Complex(0.0, 0.7),
      Complex(-0.5, 0.0);
  const SpectralHamiltonian spec = build_spectral(h);
  CHECK(spec.dim() == 2);
  CHECK(spec.eigenvalues()(0) <= spec.eigenvalues()(1));
  CHECK(max_abs(spec.matrix() - h) < 1e-12);
  CHECK(max_abs(spec.eigenvectors().adjoint() * spec.eigenvectors() -
                Eigen::MatrixXcd::Identity(2, 2)) < 1e-12);
  CHECK(spec.e_max() == doctest::Approx(std::max(std::abs(spec.eigenvalues()(0)),
                                                 std::abs(spec.eigenvalues()(1)))));
}

TEST_CASE("non-Hermitian input is rejected") {
  Eigen::MatrixXcd h(2, 2);
  h << Complex(1.0, 0.0), Complex(0.2, 0.0), Complex(0.3, 0.0),
      Complex(-1.0, 0.0);
  CHECK_THROWS(build_spectral(h));
}

TEST_CASE("e_max pad extends the certified bound") {
  const SpectralHamiltonian spec = build_spectral(pauli_z(), 0.25);
  CHECK(spec.e_max() == doctest::Approx(1.25));
}

TEST_CASE("gibbs state of one qubit") {
  const SpectralHamiltonian spec = build_spectral(pauli_z());
  const DensityMatrix rho = gibbs_state(spec, 1.0);
  const double z = std::exp(1.0) + std::exp(-1.0);
  CHECK(std::abs(rho.entries()(0, 0) - std::exp(-1.0) / z) < 1e-14);
  CHECK(std::abs(rho.entries()(1, 1) - std::exp(1.0) / z) < 1e-14);
  CHECK(std::abs(rho.entries()(0, 1)) < 1e-15);
  rho.validate_full();
  CHECK(gibbs_expectation(spec, 1.0, pauli_z()) ==
        doctest::Approx(-std::tanh(1.0)).epsilon(1e-13));
}

TEST_CASE("density matrix structural checks") {
  Eigen::MatrixXcd ok(2, 2);
  ok << 0.5, 0.1, 0.1, 0.5;
  CHECK_NOTHROW(DensityMatrix{Eigen::MatrixXcd(ok)});

  Eigen::MatrixXcd bad_trace = 2.0 * ok;
  CHECK_THROWS(DensityMatrix{std::move(bad_trace)});

  Eigen::MatrixXcd not_herm(2, 2);
  not_herm << 0.5, 0.3, 0.1, 0.5;
  CHECK_THROWS(DensityMatrix{std::move(not_herm)});

  Eigen::VectorXcd v(2);
  v << Complex(1.0, 0.0), Complex(0.0, 1.0);
  const DensityMatrix pure = DensityMatrix::pure(v);
  CHECK(std::abs(pure.entries().trace() - Complex(1.0, 0.0)) < 1e-14);

  Eigen::MatrixXcd neg(2, 2);
  neg << 1.5, 0.0, 0.0, -0.5;
  const DensityMatrix indefinite{std::move(neg)};
  CHECK_THROWS(indefinite.validate_full());
}

TEST_CASE("pauli algebra and kron dimensions") {
  const Eigen::MatrixXcd x = pauli_x(), y = pauli_y(), z = pauli_z();
  CHECK(max_abs(x * x - Eigen::MatrixXcd::Identity(2, 2)) < 1e-15);
  CHECK(max_abs(x * y - Complex(0.0, 1.0) * z) < 1e-15);
  CHECK(max_abs(y * z - Complex(0.0, 1.0) * x) < 1e-15);
  const Eigen::MatrixXcd zz = kron(z, z);
  CHECK(zz.rows() == 4);
  CHECK(std::abs(zz(0, 0) - Complex(1.0, 0.0)) < 1e-15);
  CHECK(std::abs(zz(1, 1) - Complex(-1.0, 0.0)) < 1e-15);
  CHECK(std::abs(zz(3, 3) - Complex(1.0, 0.0)) < 1e-15);
}

TEST_CASE("transverse-field Ising matrices") {
  CHECK(max_abs(tfim_hamiltonian(1, 1.0, 0.7, false) + 0.7 * pauli_x()) <
        1e-15);
  // two sites, open: -J Z Z - h (X I + I X)
  const Eigen::MatrixXcd h2 = tfim_hamiltonian(2, 1.3, 0.4, false);
  const Eigen::MatrixXcd expect =
      -1.3 * kron(pauli_z(), pauli_z()) -
      0.4 * (kron(pauli_x(), Eigen::MatrixXcd::Identity(2, 2)) +
             kron(Eigen::MatrixXcd::Identity(2, 2), pauli_x()));
  CHECK(max_abs(h2 - expect) < 1e-14);
  CHECK(max_abs(h2 - h2.adjoint()) < 1e-15);
  // periodic three-site chain keeps all three bonds
  const Eigen::MatrixXcd h3 = tfim_hamiltonian(3, 1.0, 0.0, true);
  CHECK(std::abs(h3(0, 0) - Complex(-3.0, 0.0)) < 1e-14);
}

TEST_CASE("local observable matrix is subsystem-major") {
  // B = diag(2, -1) on the first factor of a 2 x 3 space.
  Eigen::VectorXd vals(2);
  vals << 2.0, -1.0;
  const LocalObservable b(2, 3, Eigen::MatrixXcd::Identity(2, 2), vals);
  const Eigen::MatrixXcd m = observable_matrix(b);
  CHECK(m.rows() == 6);
  for (int i = 0; i < 3; ++i) {
    CHECK(std::abs(m(i, i) - Complex(2.0, 0.0)) < 1e-15);
    CHECK(std::abs(m(3 + i, 3 + i) - Complex(-1.0, 0.0)) < 1e-15);
  }
}

TEST_CASE("local observable in a rotated basis") {
  Eigen::MatrixXcd had(2, 2);
  had << 1.0, 1.0, 1.0, -1.0;
  had /= std::sqrt(2.0);
  Eigen::VectorXd vals(2);
  vals << 1.0, -1.0;
  const LocalObservable b(2, 1, had, vals);
  CHECK(max_abs(observable_matrix(b) - pauli_x()) < 1e-14);
}

TEST_CASE("proposal kernel validation") {
  Eigen::MatrixXd asym(2, 2);
  asym << 0.0, 1.0, 1.0, 0.0;
  CHECK_NOTHROW(ProposalKernel{Eigen::MatrixXd(asym)});

  Eigen::MatrixXd not_stochastic(2, 2);
  not_stochastic << 0.5, 0.5, 0.4, 0.5;
  CHECK_THROWS(ProposalKernel{std::move(not_stochastic)});

  Eigen::MatrixXd not_symmetric(3, 3);
  not_symmetric << 0.0, 0.5, 0.5, 1.0, 0.0, 0.5, 0.0, 0.5, 0.0;
  CHECK_THROWS(ProposalKernel{std::move(not_symmetric)});
}

TEST_CASE("builtin kernels") {
  const ProposalKernel uni = ProposalKernel::uniform_offdiagonal(4);
  CHECK(uni.prob(0, 0) == 0.0);
  CHECK(uni.prob(2, 0) == doctest::Approx(1.0 / 3.0));

  const ProposalKernel flip = ProposalKernel::single_bit_flip(3);
  CHECK(flip.size() == 8);
  CHECK(flip.prob(0b001, 0b000) == doctest::Approx(1.0 / 3.0));
  CHECK(flip.prob(0b011, 0b000) == 0.0);
  CHECK(flip.prob(0b000, 0b000) == 0.0);
}

TEST_CASE("gibbs expectation of a local observable") {
  const SpectralHamiltonian spec =
      build_spectral(tfim_hamiltonian(2, 1.0, 0.5, false));
  Eigen::VectorXd vals(2);
  vals << 1.0, -1.0;
  const LocalObservable b(2, 2, Eigen::MatrixXcd::Identity(2, 2), vals);
  const double via_matrix = gibbs_expectation(spec, 1.3, observable_matrix(b));
  const double via_local = gibbs_expectation(spec, 1.3, b);
  CHECK(via_local == doctest::Approx(via_matrix).epsilon(1e-13));
}

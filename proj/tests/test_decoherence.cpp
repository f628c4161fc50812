#include "einsel/decoherence.hpp"
#include "oracles.hpp"

#include <catch_amalgamated.hpp>

using namespace einsel;
using Catch::Approx;

namespace {

double max_diff(const CMatrix& a, const CMatrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

/// Pointer-basis representation U^dag rho U.
CMatrix in_basis(const DensityMatrix& rho, const DephasingChannel& ch) {
  return ch.basis().adjoint() * rho.matrix() * ch.basis();
}

}  // namespace

TEST_CASE("dephasing at t = 0 is the identity") {
  oracle::Gen gen(31);
  const DensityMatrix rho(gen.density(2));
  CHECK(max_diff(dephase(rho, DephasingChannel::computational(2, 1.0), 0.0).matrix(), rho.matrix()) == 0.0);
  CHECK(max_diff(dephase(rho, DephasingChannel::hadamard(2, 1.0), 0.0).matrix(), rho.matrix()) < 1e-15);
  CHECK_THROWS_AS(dephase(rho, DephasingChannel::computational(2, 1.0), -1.0), std::invalid_argument);
  CHECK_THROWS_AS(DephasingChannel::computational(1, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(DephasingChannel(CMatrix::Ones(2, 2), 1.0), invariant_violation);
}

TEST_CASE("dephasing of |+> at t = t_D") {
  const auto out = dephase(DensityMatrix::from_pure(PureState::plus()), DephasingChannel::computational(1, 2.5), 2.5);
  // 0.5 * exp(-1)
  CHECK(std::abs(out(0, 1)) == Approx(0.18393972058572117).margin(1e-15));
  CHECK(out(0, 0).real() == Approx(0.5).margin(1e-15));
}

TEST_CASE("long-time dephasing reaches the Born diagonal") {
  oracle::Gen gen(32);
  for (int n = 1; n <= 3; ++n) {
    const CVector psi = gen.state(n);
    const auto ch = DephasingChannel::computational(n, 0.3);
    const auto out = dephase(DensityMatrix::from_pure(PureState(psi)), ch, 40 * 0.3);
    CMatrix expected = CMatrix::Zero(psi.size(), psi.size());
    for (Eigen::Index i = 0; i < psi.size(); ++i) expected(i, i) = std::norm(psi(i));
    CHECK(max_diff(out.matrix(), expected) < 1e-12);
  }
}

TEST_CASE("decohered limit of equal-weight and Bell-reduced states") {
  CVector v(4);
  v << 0.5, -0.5, cplx(0.0, 0.5), 0.5;
  const auto lim = decohered_limit(DensityMatrix::from_pure(PureState(v)), DephasingChannel::computational(2, 1.0));
  CHECK(max_diff(lim.matrix(), CMatrix::Identity(4, 4) * 0.25) < 1e-15);

  const auto diag = DensityMatrix::diagonal({0.1, 0.2, 0.3, 0.4});
  CHECK(max_diff(decohered_limit(diag, DephasingChannel::computational(2, 1.0)).matrix(), diag.matrix()) == 0.0);

  CVector bell = CVector::Zero(4);
  bell(0) = 0.6;
  bell(3) = 0.8;
  const auto sa = decohered_limit(DensityMatrix::from_pure(PureState(bell)), DephasingChannel::computational(2, 1.0));
  CHECK(max_diff(sa.matrix(), DensityMatrix::diagonal({0.36, 0.0, 0.0, 0.64}).matrix()) < 1e-15);
}

TEST_CASE("dephasing is a semigroup and conserves the pointer diagonal") {
  oracle::Gen gen(33);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = gen.integer(1, 3);
    const DensityMatrix rho(gen.density(n));
    const auto ch = trial % 2 ? DephasingChannel::hadamard(n, 0.7) : DephasingChannel(gen.unitary(n), 0.7);
    const double t1 = gen.uniform(0.0, 2.0), t2 = gen.uniform(0.0, 2.0);
    const auto once = dephase(rho, ch, t1 + t2);
    const auto twice = dephase(dephase(rho, ch, t1), ch, t2);
    CHECK(max_diff(once.matrix(), twice.matrix()) < 1e-12);
    const CMatrix before = in_basis(rho, ch), after = in_basis(once, ch);
    CHECK((before.diagonal() - after.diagonal()).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("entropy under dephasing never decreases") {
  oracle::Gen gen(34);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = gen.integer(1, 3);
    const DensityMatrix rho(gen.density(n, 1 + trial % 2));
    const auto ch = DephasingChannel(gen.unitary(n), 1.0);
    double prev = von_neumann_entropy(rho);
    for (double t = 0.05; t < 6.0; t += 0.05) {
      const double h = von_neumann_entropy(dephase(rho, ch, t));
      CHECK(h >= prev - 1e-10);
      prev = h;
    }
  }
}

TEST_CASE("distance to the decohered limit decays as exp(-t/t_D)") {
  oracle::Gen gen(35);
  for (int trial = 0; trial < 10; ++trial) {
    const DensityMatrix rho(gen.density(2));
    const auto ch = DephasingChannel::computational(2, 0.5);
    const auto lim = decohered_limit(rho, ch);
    const double scale = rho.matrix().cwiseAbs().maxCoeff();
    for (double t : {0.1, 0.5, 1.0, 3.0}) {
      const double dist = max_diff(dephase(rho, ch, t).matrix(), lim.matrix());
      CHECK(dist <= std::exp(-t / 0.5) * scale + 1e-15);
    }
  }
}

TEST_CASE("dephasing a subset of qubits") {
  // Bell pair, dephase only qubit 1: coherences vanish because the computational
  // basis of qubit 1 distinguishes the branches
  CVector bell = CVector::Zero(4);
  bell(0) = bell(3) = 1.0 / std::sqrt(2.0);
  const auto ch = DephasingChannel::computational(1, 1.0);
  const auto out = decohered_limit(DensityMatrix::from_pure(PureState(bell)), ch, QubitSet{1});
  CHECK(std::abs(out(0, 3)) < 1e-15);
  CHECK(out(0, 0).real() == Approx(0.5));

  // |+>|0>, dephase qubit 1 only: nothing changes
  const auto prod = DensityMatrix::from_pure(tensor_product(PureState::plus(), PureState::zeros(1)));
  CHECK(max_diff(decohered_limit(prod, ch, QubitSet{1}).matrix(), prod.matrix()) < 1e-15);

  // subset dephasing equals the Kronecker oracle channel
  oracle::Gen gen(36);
  const DensityMatrix rho(gen.density(3));
  const auto hch = DephasingChannel::hadamard(1, 1.0);
  const auto got = dephase(rho, hch, 0.8, QubitSet{2});
  const CMatrix u = oracle::on_qubit(oracle::hadamard(), 2, 3);
  CMatrix in = u.adjoint() * rho.matrix() * u;
  const double f = std::exp(-0.8);
  for (Eigen::Index i = 0; i < 8; ++i)
    for (Eigen::Index j = 0; j < 8; ++j)
      if ((i & 1) != (j & 1)) in(i, j) *= f;
  CHECK(max_diff(got.matrix(), u * in * u.adjoint()) < 1e-12);
}

TEST_CASE("pointer observable commutator defect") {
  const CMatrix zz = oracle::pauli_string("ZZ");
  const CMatrix zero = CMatrix::Zero(2, 2);
  CHECK(pointer_commutator_defect(HamiltonianSpec(zero, zz), oracle::pauli_string("ZI")) == 0.0);
  CHECK(pointer_commutator_defect(HamiltonianSpec(zero, zz), oracle::pauli_string("XI")) == Approx(2.0));
  CHECK(pointer_commutator_defect(HamiltonianSpec(pauli::x(), zz), pauli::z()) > 1.0);
  CHECK_THROWS_AS(HamiltonianSpec(CMatrix(pauli::x() * cplx(0, 1)), zz), std::invalid_argument);
}

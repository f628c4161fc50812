#include "einsel/linalg.hpp"
#include "oracles.hpp"

#include <catch_amalgamated.hpp>

using namespace einsel;
using Catch::Approx;

namespace {

double max_diff(const CMatrix& a, const CMatrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("tensor product of basis states and diagonal matrices") {
  const auto s = tensor_product(PureState::zeros(1), PureState::zeros(1));
  CHECK(s.amplitudes().isApprox(CVector::Unit(4, 0)));

  const cplx a = 0.6, b = cplx(0.0, 0.8);
  const auto t = tensor_product(PureState::qubit(a, b), PureState::zeros(1));
  CHECK(std::abs(t[0] - a) < 1e-15);
  CHECK(std::abs(t[2] - b) < 1e-15);
  CHECK(std::abs(t[1]) + std::abs(t[3]) == 0.0);

  const auto r = tensor_product(DensityMatrix::diagonal({0.5, 0.5}), DensityMatrix::diagonal({1.0, 0.0}));
  CHECK(max_diff(r.matrix(), DensityMatrix::diagonal({0.5, 0.0, 0.5, 0.0}).matrix()) == 0.0);
}

TEST_CASE("state constructors reject malformed input") {
  CHECK_THROWS_AS(PureState(CVector::Ones(3) / std::sqrt(3.0)), std::invalid_argument);
  CHECK_THROWS_AS(PureState(CVector::Ones(2)), invariant_violation);
  CHECK_THROWS_AS(PureState(CVector::Ones(1)), std::invalid_argument);
  CMatrix bad(2, 2);
  bad << 0.5, 0.6, 0.6, 0.5;  // eigenvalue -0.1
  CHECK_THROWS_AS(DensityMatrix(bad), invariant_violation);
  CHECK_THROWS_AS(DensityMatrix::diagonal({0.5, 0.6}), invariant_violation);
  CHECK_THROWS_AS(QubitSet({1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(partial_trace(DensityMatrix::maximally_mixed(2), QubitSet{2}), std::invalid_argument);
}

TEST_CASE("partial trace of the recorded three-qubit state keeps only pointer correlations") {
  const cplx alpha = 0.6, beta = cplx(0.0, 0.8);
  CVector v = CVector::Zero(8);
  v(0) = alpha;
  v(7) = beta;
  const auto rho = partial_trace(PureState(v), QubitSet{0, 1});
  CMatrix expected = CMatrix::Zero(4, 4);
  expected(0, 0) = 0.36;
  expected(3, 3) = 0.64;
  CHECK(max_diff(rho.matrix(), expected) < 1e-15);
}

TEST_CASE("partial trace matches the index-summation oracle") {
  oracle::Gen gen(11);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = gen.integer(2, 4);
    const CMatrix raw = gen.density(n);
    const DensityMatrix rho(raw);
    std::vector<int> keep;
    for (int q = 0; q < n; ++q)
      if (gen.uniform() < 0.5) keep.push_back(q);
    if (keep.empty()) keep.push_back(gen.integer(0, n - 1));
    std::shuffle(keep.begin(), keep.end(), gen.eng);
    const auto got = partial_trace(rho, QubitSet(keep));
    CHECK(max_diff(got.matrix(), oracle::partial_trace(raw, n, keep)) < 1e-12);
  }
  // pure-state path against the same oracle
  const CVector psi = gen.state(3);
  const auto got = partial_trace(PureState(psi), QubitSet{0});
  CHECK(max_diff(got.matrix(), oracle::partial_trace(psi * psi.adjoint(), 3, {0})) < 1e-12);
}

TEST_CASE("partial trace of a product returns the factor") {
  oracle::Gen gen(12);
  for (int trial = 0; trial < 10; ++trial) {
    const DensityMatrix a(gen.density(2)), b(gen.density(1));
    const auto ab = tensor_product(a, b);
    CHECK(max_diff(partial_trace(ab, QubitSet{0, 1}).matrix(), a.matrix()) < 1e-12);
    CHECK(max_diff(partial_trace(ab, QubitSet{2}).matrix(), b.matrix()) < 1e-12);
  }
}

TEST_CASE("von Neumann entropy values") {
  oracle::Gen gen(13);
  CHECK(von_neumann_entropy(DensityMatrix::from_pure(PureState(gen.state(3)))) == Approx(0.0).margin(1e-10));
  CHECK(von_neumann_entropy(DensityMatrix::diagonal({0.5, 0.5})) == Approx(1.0).margin(1e-15));
  // -(1/4) log2(1/4) - (3/4) log2(3/4)
  CHECK(von_neumann_entropy(DensityMatrix::diagonal({0.25, 0.75})) == Approx(0.8112781244591328).margin(1e-14));
  CHECK(von_neumann_entropy(DensityMatrix::maximally_mixed(3)) == Approx(3.0).margin(1e-12));
}

TEST_CASE("entropy is invariant under unitary conjugation") {
  oracle::Gen gen(14);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = gen.integer(1, 3);
    const DensityMatrix rho(gen.density(n, gen.integer(1, 1 << n)));
    const auto rotated = conjugate(rho, gen.unitary(n));
    CHECK(std::abs(von_neumann_entropy(rotated) - von_neumann_entropy(rho)) < 1e-9);
    CHECK(std::abs(von_neumann_entropy(rho) - oracle::entropy_bits(rho.matrix())) < 1e-9);
  }
}

TEST_CASE("purity values and bounds") {
  CHECK(purity(DensityMatrix::from_pure(PureState::plus())) == Approx(1.0).margin(1e-15));
  CHECK(purity(DensityMatrix::diagonal({0.5, 0.5})) == Approx(0.5).margin(1e-15));
  CHECK(purity(DensityMatrix::diagonal({0.36, 0.64})) == Approx(0.5392).margin(1e-15));

  oracle::Gen gen(15);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = gen.integer(1, 3);
    const DensityMatrix rho(gen.density(n, gen.integer(1, 1 << n)));
    const double p = purity(rho);
    const double top = density_eigenvalues(rho).maxCoeff();
    CHECK(p <= 1.0 + 1e-12);
    CHECK((p >= 1.0 - 1e-9) == (top >= 1.0 - 1e-9));
  }
}

TEST_CASE("Born probabilities") {
  CHECK(born_probability(PureState::zeros(1), Projector::onto(PureState::zeros(1))) == 1.0);
  for (int n = 1; n <= 3; ++n)
    CHECK(born_probability(DensityMatrix::maximally_mixed(n), Projector::basis_states(n, {1})) ==
          Approx(1.0 / (1 << n)).margin(1e-15));
  // decohered equal-weight state, union of 3 of 8 outcomes
  CHECK(born_probability(DensityMatrix::maximally_mixed(3), Projector::basis_states(3, {0, 4, 6})) ==
        Approx(3.0 / 8.0).margin(1e-15));

  oracle::Gen gen(16);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = gen.integer(1, 3);
    const DensityMatrix rho(gen.density(n));
    const CMatrix u = gen.unitary(n);
    double total = 0.0;
    for (Eigen::Index k = 0; k < u.cols(); ++k) total += born_probability(rho, Projector::onto({CVector(u.col(k))}));
    CHECK(std::abs(total - 1.0) < 1e-12);
  }
  CHECK_THROWS_AS(born_probability(DensityMatrix::maximally_mixed(2), Projector::identity(1)), std::invalid_argument);
}

TEST_CASE("projectors validate idempotence") {
  CMatrix half = CMatrix::Identity(2, 2) * 0.5;
  CHECK_THROWS_AS(Projector(half), invariant_violation);
  const auto p = Projector::qubit_value(2, 1, 1);
  CHECK(p.rank() == 2);
  CHECK(born_probability(PureState::basis(2, 1), p) == 1.0);
  CHECK(born_probability(PureState::basis(2, 2), p) == 0.0);
}

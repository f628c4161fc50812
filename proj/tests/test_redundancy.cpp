#include "einsel/redundancy.hpp"
#include "oracles.hpp"

#include <catch_amalgamated.hpp>

using namespace einsel;
using Catch::Approx;

namespace {

EnvironmentRecord record(const CVector& v) { return {v, detail::log2_exact(static_cast<std::size_t>(v.size()))}; }

EnvironmentRecord basis_record(int n, std::size_t k) { return EnvironmentRecord::from_state(PureState::basis(n, k)); }

/// Minimal Pauli weight by brute force over Kronecker-built Pauli strings.
std::optional<int> brute_distance(const CVector& a, const CVector& b, int n) {
  std::optional<int> best;
  std::string s(static_cast<std::size_t>(n), 'I');
  const char labels[] = {'I', 'X', 'Y', 'Z'};
  const std::size_t total = std::size_t{1} << (2 * n);
  for (std::size_t code = 0; code < total; ++code) {
    int weight = 0;
    for (int q = 0; q < n; ++q) {
      s[static_cast<std::size_t>(q)] = labels[(code >> (2 * q)) & 3U];
      weight += s[static_cast<std::size_t>(q)] != 'I';
    }
    if (best && weight >= *best) continue;
    const CVector flipped = oracle::pauli_string(s) * a;
    if (std::abs(b.dot(flipped)) >= 1.0 - 1e-9) best = weight;
  }
  return best;
}

CVector ghz(int n, double sign) {
  CVector v = CVector::Zero(Eigen::Index{1} << n);
  v(0) = 1.0 / std::sqrt(2.0);
  v(v.size() - 1) = sign / std::sqrt(2.0);
  return v;
}

}  // namespace

TEST_CASE("environment records of the branch state") {
  const auto j = ghz_branch_state(3);
  const auto r0 = environment_record(j, PureState::basis(1, 0));
  CHECK(r0.weight() == Approx(0.5).margin(1e-15));
  CHECK((r0.amplitudes() - PureState::zeros(3).amplitudes()).norm() < 1e-15);

  const auto rp = environment_record(j, PureState::plus());
  CHECK(rp.weight() == Approx(0.5).margin(1e-15));
  CHECK((rp.amplitudes() - ghz(3, 1.0)).norm() < 1e-15);

  const JointState product(tensor_product(PureState::zeros(1), PureState::plus()), QubitSet{0}, QubitSet{1});
  const auto null = environment_record(product, PureState::basis(1, 1));
  CHECK(null.is_null());
  CHECK(null.weight() == 0.0);
  CHECK_THROWS_AS(redundancy_distance(null, null), std::invalid_argument);
}

TEST_CASE("record weights over an orthonormal system basis sum to one") {
  oracle::Gen gen(41);
  for (int trial = 0; trial < 20; ++trial) {
    const int ns = gen.integer(1, 2), ne = gen.integer(1, 3);
    const JointState j(PureState(gen.state(ns + ne)), QubitSet::range(0, ns), QubitSet::range(ns, ne));
    const CMatrix u = gen.unitary(ns);
    double total = 0.0;
    for (Eigen::Index k = 0; k < u.cols(); ++k) total += environment_record(j, PureState(CVector(u.col(k)))).weight();
    CHECK(std::abs(total - 1.0) < 1e-12);
  }
}

TEST_CASE("distances between GHZ-type records") {
  for (int n = 1; n <= 8; ++n) {
    const auto d_ptr = redundancy_distance(basis_record(n, 0), basis_record(n, (std::size_t{1} << n) - 1));
    REQUIRE(d_ptr.finite());
    CHECK(*d_ptr.value == n);
    CHECK(d_ptr.flips->total() == n);
    const auto d_conj = redundancy_distance(record(ghz(n, 1.0)), record(ghz(n, -1.0)));
    REQUIRE(d_conj.finite());
    CHECK(*d_conj.value == 1);
    // for a single qubit Y relates |+> and |-> as well
    if (n > 1) CHECK(d_conj.flips->n_z() == 1);
  }
  const auto same = redundancy_distance(record(ghz(3, 1.0)), record(ghz(3, 1.0)));
  CHECK(*same.value == 0);
  CHECK(same.flips->to_string() == "III");
  // global phase is ignored
  CHECK(*redundancy_distance(record(ghz(3, 1.0)), record(cplx(0, 1) * ghz(3, 1.0))).value == 0);
}

TEST_CASE("Y counts as a single flip") {
  const CVector a = PureState::basis(2, 0).amplitudes();
  const CVector b = oracle::pauli_string("YI") * a;
  const auto d = redundancy_distance(record(a), record(b));
  CHECK(*d.value == 1);
}

TEST_CASE("unrelated records are infinitely distant") {
  const auto d = redundancy_distance(basis_record(2, 0), EnvironmentRecord::from_state(
                                                             tensor_product(PureState::plus(), PureState::zeros(1))));
  CHECK_FALSE(d.finite());
  CHECK_FALSE(d.flips.has_value());
}

TEST_CASE("computational records: distance equals Hamming distance") {
  for (int n = 1; n <= 4; ++n) {
    const std::size_t d = std::size_t{1} << n;
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = 0; b < d; ++b)
        CHECK(*redundancy_distance(basis_record(n, a), basis_record(n, b)).value == std::popcount(a ^ b));
  }
}

TEST_CASE("distance agrees with the Kronecker-product search oracle") {
  oracle::Gen gen(42);
  const char labels[] = {'I', 'X', 'Y', 'Z'};
  for (int trial = 0; trial < 40; ++trial) {
    const int n = gen.integer(1, 4);
    // a random state, and the image of a random state or of a under a random Pauli string
    const CVector a = trial % 4 == 0 ? CVector(PureState::basis(n, 0).amplitudes()) : gen.state(n);
    CVector b;
    if (trial % 5 == 4) {
      b = gen.state(n);
    } else {
      std::string s;
      for (int q = 0; q < n; ++q) s += labels[gen.integer(0, 3)];
      b = oracle::pauli_string(s) * a * std::polar(1.0, gen.uniform(0.0, 6.0));
    }
    const auto got = redundancy_distance(record(a), record(b));
    CHECK(got.value == brute_distance(a, b, n));
    if (got.flips) {
      std::string s = got.flips->to_string();
      CHECK(std::abs(b.dot(oracle::pauli_string(s) * a)) >= 1.0 - 1e-9);
    }
  }
}

TEST_CASE("metric axioms") {
  std::vector<EnvironmentRecord> mixed{basis_record(3, 0), basis_record(3, 7), record(ghz(3, 1.0)), record(ghz(3, -1.0))};
  const auto rep = verify_metric_axioms(mixed);
  CHECK(rep.ok());
  CHECK(rep.violations.empty());
  CHECK(rep.distances[0][2] == std::nullopt);
  for (std::size_t i = 0; i < mixed.size(); ++i) CHECK(rep.distances[i][i] == 0);

  for (int n = 1; n <= 4; ++n) {
    std::vector<EnvironmentRecord> all;
    for (std::size_t k = 0; k < (std::size_t{1} << n); ++k) all.push_back(basis_record(n, k));
    CHECK(verify_metric_axioms(all).ok());
  }
}

TEST_CASE("majority decoding") {
  CHECK(majority_decode({0, 0, 1}) == 0);
  CHECK(majority_decode({1, 1, 1}) == 1);
  CHECK(majority_decode({1, 0, 1, 1, 0}) == 1);
  CHECK_THROWS_AS(majority_decode({1, 0}), std::invalid_argument);
  CHECK_THROWS_AS(majority_decode({2}), std::invalid_argument);
}

TEST_CASE("error robustness of the repetition record") {
  const auto j3 = ghz_branch_state(3);
  const auto r = error_robustness(j3, RecordBasis::Pointer, 1);
  CHECK(r.patterns == 3);
  CHECK(r.success_rate == 1.0);
  CHECK(error_robustness(j3, RecordBasis::Conjugate, 1).success_rate == 0.5);
  CHECK(error_robustness(j3, RecordBasis::Conjugate, 0).success_rate == Approx(1.0).margin(1e-12));
  CHECK(error_robustness(ghz_branch_state(5), RecordBasis::Pointer, 0).success_rate == 1.0);

  for (int n : {3, 5, 7}) {
    const auto j = ghz_branch_state(n);
    for (int k = 0; k <= (n + 1) / 2 - 1; ++k) CHECK(error_robustness(j, RecordBasis::Pointer, k).success_rate == 1.0);
    CHECK(error_robustness(j, RecordBasis::Pointer, (n + 1) / 2).success_rate == 0.0);
    CHECK(error_robustness(j, RecordBasis::Conjugate, 1).success_rate == 0.5);
  }
  // unequal branch weights: pointer decoding is still exact below half the cells
  const auto skew = ghz_branch_state(5, 0.6, 0.8);
  CHECK(error_robustness(skew, RecordBasis::Pointer, 2).success_rate == Approx(1.0).margin(1e-15));
  CHECK_THROWS_AS(error_robustness(j3, RecordBasis::Pointer, 4), std::invalid_argument);
}

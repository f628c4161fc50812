#include "einsel/circuits.hpp"
#include "oracles.hpp"

#include <catch_amalgamated.hpp>

using namespace einsel;

namespace {

double max_diff(const CMatrix& a, const CMatrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("CNOT truth table") {
  const Gate g = Gate::cnot(0, 1);
  CHECK(apply(PureState::basis(2, 0b10), g).amplitudes() == PureState::basis(2, 0b11).amplitudes());
  CHECK(apply(PureState::basis(2, 0b00), g).amplitudes() == PureState::basis(2, 0b00).amplitudes());
  CHECK(apply(PureState::basis(2, 0b01), g).amplitudes() == PureState::basis(2, 0b01).amplitudes());
  CHECK(apply(PureState::basis(2, 0b11), g).amplitudes() == PureState::basis(2, 0b10).amplitudes());
  CHECK_THROWS_AS(Gate::cnot(1, 1), std::invalid_argument);
}

TEST_CASE("Hadamard on |0>") {
  const auto s = apply(PureState::zeros(1), Gate::h(0));
  CHECK(std::abs(s[0] - 1.0 / std::sqrt(2.0)) < 1e-15);
  CHECK(std::abs(s[1] - 1.0 / std::sqrt(2.0)) < 1e-15);
}

TEST_CASE("gate unitaries match Kronecker-product oracles") {
  for (int n = 2; n <= 4; ++n)
    for (int c = 0; c < n; ++c)
      for (int t = 0; t < n; ++t) {
        if (c == t) continue;
        Circuit circ(n);
        circ.add(Gate::cnot(c, t));
        CHECK(max_diff(unitary(circ), oracle::cnot(c, t, n)) == 0.0);
      }
  const std::pair<Gate (*)(int), char> singles[] = {{Gate::x, 'X'}, {Gate::y, 'Y'}, {Gate::z, 'Z'}};
  for (const auto& [make, label] : singles)
    for (int q = 0; q < 3; ++q) {
      Circuit circ(3);
      circ.add(make(q));
      CHECK(max_diff(unitary(circ), oracle::on_qubit(oracle::pauli(label), q, 3)) < 1e-15);
    }
}

TEST_CASE("premeasurement correlates the apparatus") {
  const auto c = premeasurement(0, 1);
  CHECK(apply(measurement_register(1.0, 0.0, 0), c).amplitudes() == PureState::zeros(2).amplitudes());

  const double r = 1.0 / std::sqrt(2.0);
  const auto bell = apply(measurement_register(r, r, 0), c);
  CHECK(std::abs(bell[0] - r) < 1e-15);
  CHECK(std::abs(bell[3] - r) < 1e-15);

  const auto s = apply(measurement_register(0.6, 0.8, 0), c);
  CVector expected(4);
  expected << 0.6, 0.0, 0.0, 0.8;
  CHECK((s.amplitudes() - expected).norm() < 1e-15);
}

TEST_CASE("decoherence chain copies the apparatus into the environment") {
  const cplx alpha = 0.6, beta = cplx(0.0, 0.8);
  Circuit c = premeasurement(0, 1).widened(3);
  c.append(decoherence_chain(1, QubitSet{2}));
  const auto out = apply(measurement_register(alpha, beta, 1), c);
  CHECK(std::abs(out[0] - alpha) < 1e-15);
  CHECK(std::abs(out[7] - beta) < 1e-15);

  const double r = 1.0 / std::sqrt(2.0);
  Circuit c3 = premeasurement(0, 1).widened(5);
  c3.append(decoherence_chain(1, QubitSet::range(2, 3)));
  const auto ghz = apply(measurement_register(r, r, 3), c3);
  CHECK(std::abs(ghz[0] - r) < 1e-15);
  CHECK(std::abs(ghz[31] - r) < 1e-15);

  const auto none = apply(measurement_register(1.0, 0.0, 3), c3);
  CHECK(none.amplitudes() == PureState::zeros(5).amplitudes());
}

TEST_CASE("environment as control of the apparatus") {
  const auto c = noise_chain(QubitSet{0}, 1);
  CHECK(apply(PureState::basis(2, 0b10), c).amplitudes() == PureState::basis(2, 0b11).amplitudes());
  CHECK(apply(PureState::basis(2, 0b00), c).amplitudes() == PureState::basis(2, 0b00).amplitudes());
  const auto out = apply(tensor_product(PureState::plus(), PureState::zeros(1)), c);
  const auto app = partial_trace(out, QubitSet{1});
  CHECK(max_diff(app.matrix(), CMatrix::Identity(2, 2) * 0.5) < 1e-15);
  const CMatrix full = out.amplitudes() * out.amplitudes().adjoint();
  CHECK(max_diff(app.matrix(), oracle::partial_trace(full, 2, {1})) < 1e-15);
}

TEST_CASE("Hadamard conjugation swaps control and target") {
  Circuit hh(2);
  hh.add(Gate::h(0));
  hh.add(Gate::h(1));
  Circuit fwd(2), rev(2);
  fwd.add(Gate::cnot(0, 1));
  rev.add(Gate::cnot(1, 0));
  const CMatrix lhs = unitary(hh) * unitary(fwd) * unitary(hh);
  CHECK(max_diff(lhs, unitary(rev)) < 1e-12);
}

TEST_CASE("circuits preserve the norm of random states") {
  oracle::Gen gen(21);
  const GateKind kinds[] = {GateKind::PauliX, GateKind::PauliY, GateKind::PauliZ, GateKind::Hadamard, GateKind::CNot};
  for (int trial = 0; trial < 50; ++trial) {
    const int n = gen.integer(2, 6);
    Circuit c(n);
    for (int g = 0; g < 20; ++g) {
      const auto kind = kinds[gen.integer(0, 4)];
      const int t = gen.integer(0, n - 1);
      if (kind == GateKind::CNot) {
        const int ctl = (t + gen.integer(1, n - 1)) % n;
        c.add(Gate::cnot(ctl, t));
      } else {
        c.add(Gate{kind, t, std::nullopt});
      }
    }
    const auto out = apply(PureState(gen.state(n)), c);
    CHECK(std::abs(out.amplitudes().norm() - 1.0) < 1e-12);
    CHECK(is_unitary(unitary(c)));
  }
}

TEST_CASE("pipeline leaves a pointer-diagonal system-apparatus state") {
  oracle::Gen gen(22);
  for (int trial = 0; trial < 25; ++trial) {
    const int n_env = gen.integer(1, 3);
    const CVector sa = gen.state(1);
    Circuit c = premeasurement(0, 1).widened(2 + n_env);
    c.append(decoherence_chain(1, QubitSet::range(2, n_env)));
    const auto out = apply(measurement_register(sa(0), sa(1), n_env), c);
    const CMatrix full = out.amplitudes() * out.amplitudes().adjoint();
    const CMatrix reduced = oracle::partial_trace(full, 2 + n_env, {0, 1});
    CMatrix expected = CMatrix::Zero(4, 4);
    expected(0, 0) = std::norm(sa(0));
    expected(3, 3) = std::norm(sa(1));
    CHECK(max_diff(reduced, expected) < 1e-12);
  }
}

TEST_CASE("circuit text round trip") {
  Circuit c(3);
  c.add(Gate::h(0));
  c.add(Gate::cnot(0, 2));
  c.add(Gate::y(1));
  const std::string text = to_text(c);
  CHECK(text == "H 0\nCNOT 0 2\nY 1\n");
  const Circuit back = parse_circuit("# comment\n" + text);
  CHECK(to_text(back) == text);
  CHECK(back.width() == 3);
  CHECK_THROWS_AS(parse_circuit("H 0\nSWAP 0 1\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_circuit("CNOT 1 1\n"), std::invalid_argument);
}

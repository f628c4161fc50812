/**
 * @file circuits.hpp
 * @brief Gate-level circuits: premeasurement, environmental monitoring and
 * noise, built from Pauli, Hadamard and c-not gates.
 *
 * Text form is one gate per line: `X 0`, `Y 1`, `Z 2`, `H 0`, `CNOT c t`.
 * Blank lines and lines starting with '#' are ignored when parsing.
 */
#pragma once

#include "einsel/linalg.hpp"

#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace einsel {

enum class GateKind { PauliX, PauliY, PauliZ, Hadamard, CNot };

struct Gate {
  GateKind kind;
  int target;
  std::optional<int> control;

  static Gate x(int q) { return {GateKind::PauliX, q, std::nullopt}; }
  static Gate y(int q) { return {GateKind::PauliY, q, std::nullopt}; }
  static Gate z(int q) { return {GateKind::PauliZ, q, std::nullopt}; }
  static Gate h(int q) { return {GateKind::Hadamard, q, std::nullopt}; }
  static Gate cnot(int control, int target) {
    if (control == target) throw std::invalid_argument("c-not control and target coincide");
    return {GateKind::CNot, target, control};
  }

  int max_index() const { return control ? std::max(*control, target) : target; }

  friend bool operator==(const Gate&, const Gate&) = default;
};

class Circuit {
 public:
  explicit Circuit(int width) : width_(width) {
    if (width < 1 || width > kMaxPureQubits) throw std::invalid_argument("circuit width out of range");
  }

  Circuit& add(const Gate& g) {
    if (g.target < 0 || g.target >= width_ || (g.control && (*g.control < 0 || *g.control >= width_)))
      throw std::invalid_argument("gate index outside circuit width " + std::to_string(width_));
    if (g.kind == GateKind::CNot && (!g.control || *g.control == g.target))
      throw std::invalid_argument("c-not needs a control distinct from its target");
    if (g.kind != GateKind::CNot && g.control) throw std::invalid_argument("only c-not gates carry a control");
    gates_.push_back(g);
    return *this;
  }

  /// Appends `other`'s gates, widening this circuit if needed.
  Circuit& append(const Circuit& other) {
    width_ = std::max(width_, other.width_);
    for (const auto& g : other.gates_) add(g);
    return *this;
  }

  /// Same gates on a wider register.
  Circuit widened(int width) const {
    Circuit c(std::max(width, width_));
    for (const auto& g : gates_) c.add(g);
    return c;
  }

  int width() const { return width_; }
  const std::vector<Gate>& gates() const { return gates_; }
  std::size_t size() const { return gates_.size(); }

  friend bool operator==(const Circuit&, const Circuit&) = default;

 private:
  int width_;
  std::vector<Gate> gates_;
};

namespace detail {

inline void apply_in_place(CVector& v, int n, const Gate& g) {
  const std::size_t dim = static_cast<std::size_t>(v.size());
  const std::size_t tm = bit_mask(g.target, n);
  const double s = 1.0 / std::sqrt(2.0);
  const cplx i1(0.0, 1.0);
  switch (g.kind) {
    case GateKind::PauliX:
      for (std::size_t i = 0; i < dim; ++i)
        if (!(i & tm)) std::swap(v(static_cast<Eigen::Index>(i)), v(static_cast<Eigen::Index>(i | tm)));
      break;
    case GateKind::PauliY:
      for (std::size_t i = 0; i < dim; ++i)
        if (!(i & tm)) {
          const cplx a0 = v(static_cast<Eigen::Index>(i));
          const cplx a1 = v(static_cast<Eigen::Index>(i | tm));
          v(static_cast<Eigen::Index>(i)) = -i1 * a1;
          v(static_cast<Eigen::Index>(i | tm)) = i1 * a0;
        }
      break;
    case GateKind::PauliZ:
      for (std::size_t i = 0; i < dim; ++i)
        if (i & tm) v(static_cast<Eigen::Index>(i)) = -v(static_cast<Eigen::Index>(i));
      break;
    case GateKind::Hadamard:
      for (std::size_t i = 0; i < dim; ++i)
        if (!(i & tm)) {
          const cplx a0 = v(static_cast<Eigen::Index>(i));
          const cplx a1 = v(static_cast<Eigen::Index>(i | tm));
          v(static_cast<Eigen::Index>(i)) = s * (a0 + a1);
          v(static_cast<Eigen::Index>(i | tm)) = s * (a0 - a1);
        }
      break;
    case GateKind::CNot: {
      const std::size_t cm = bit_mask(*g.control, n);
      for (std::size_t i = 0; i < dim; ++i)
        if ((i & cm) && !(i & tm)) std::swap(v(static_cast<Eigen::Index>(i)), v(static_cast<Eigen::Index>(i | tm)));
      break;
    }
  }
}

}  // namespace detail

inline PureState apply(const PureState& state, const Gate& g) {
  const int n = state.num_qubits();
  if (g.max_index() >= n || g.target < 0 || (g.control && *g.control < 0))
    throw std::invalid_argument("gate index outside the register");
  CVector v = state.amplitudes();
  detail::apply_in_place(v, n, g);
  return PureState(std::move(v));
}

inline PureState apply(const PureState& state, const Circuit& c) {
  const int n = state.num_qubits();
  if (c.width() > n) throw std::invalid_argument("circuit is wider than the register");
  CVector v = state.amplitudes();
  for (const auto& g : c.gates()) detail::apply_in_place(v, n, g);
  return PureState(std::move(v));
}

/// Full-register unitary of a circuit, column k = circuit applied to |k>.
inline CMatrix unitary(const Circuit& c) {
  const int n = c.width();
  const auto d = Eigen::Index{1} << n;
  CMatrix u(d, d);
  for (Eigen::Index k = 0; k < d; ++k) {
    CVector v = CVector::Zero(d);
    v(k) = 1.0;
    for (const auto& g : c.gates()) detail::apply_in_place(v, n, g);
    u.col(k) = v;
  }
  return u;
}

/// System controls the apparatus: (a|0> + b|1>)|0> -> a|00> + b|11>.
inline Circuit premeasurement(int system, int apparatus) {
  if (system == apparatus) throw std::invalid_argument("premeasurement: system and apparatus coincide");
  Circuit c(std::max(system, apparatus) + 1);
  c.add(Gate::cnot(system, apparatus));
  return c;
}

/// Apparatus controls each environment qubit in turn, spreading its record.
inline Circuit decoherence_chain(int apparatus, const QubitSet& environment) {
  if (environment.contains(apparatus)) throw std::invalid_argument("decoherence_chain: apparatus is in the environment");
  int width = apparatus + 1;
  for (int e : environment) width = std::max(width, e + 1);
  Circuit c(width);
  for (int e : environment) c.add(Gate::cnot(apparatus, e));
  return c;
}

/// Environment qubits control the apparatus (reversed c-nots).
inline Circuit noise_chain(const QubitSet& environment, int apparatus) {
  if (environment.contains(apparatus)) throw std::invalid_argument("noise_chain: apparatus is in the environment");
  int width = apparatus + 1;
  for (int e : environment) width = std::max(width, e + 1);
  Circuit c(width);
  for (int e : environment) c.add(Gate::cnot(e, apparatus));
  return c;
}

inline std::string to_text(const Gate& g) {
  switch (g.kind) {
    case GateKind::PauliX: return "X " + std::to_string(g.target);
    case GateKind::PauliY: return "Y " + std::to_string(g.target);
    case GateKind::PauliZ: return "Z " + std::to_string(g.target);
    case GateKind::Hadamard: return "H " + std::to_string(g.target);
    case GateKind::CNot: return "CNOT " + std::to_string(*g.control) + " " + std::to_string(g.target);
  }
  return {};
}

inline std::string to_text(const Circuit& c) {
  std::string out;
  for (const auto& g : c.gates()) {
    out += to_text(g);
    out += '\n';
  }
  return out;
}

/// Parses the line format. Width is the larger of `min_width` and the
/// highest index used plus one.
inline Circuit parse_circuit(std::string_view text, int min_width = 1) {
  std::vector<Gate> gates;
  int width = min_width;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string op;
    if (!(ls >> op) || op.front() == '#') continue;
    auto fail = [&](const std::string& why) {
      return std::invalid_argument("circuit line " + std::to_string(lineno) + ": " + why);
    };
    int a = -1, b = -1;
    if (op == "CNOT") {
      if (!(ls >> a >> b)) throw fail("CNOT needs control and target");
      if (a < 0 || b < 0) throw fail("negative qubit index");
      if (a == b) throw fail("control equals target");
      gates.push_back(Gate::cnot(a, b));
    } else {
      if (!(ls >> a)) throw fail("missing qubit index");
      if (a < 0) throw fail("negative qubit index");
      if (op == "X") gates.push_back(Gate::x(a));
      else if (op == "Y") gates.push_back(Gate::y(a));
      else if (op == "Z") gates.push_back(Gate::z(a));
      else if (op == "H") gates.push_back(Gate::h(a));
      else throw fail("unknown gate '" + op + "'");
    }
    std::string extra;
    if (ls >> extra) throw fail("trailing token '" + extra + "'");
    width = std::max(width, gates.back().max_index() + 1);
  }
  Circuit c(width);
  for (const auto& g : gates) c.add(g);
  return c;
}

/// (alpha|0> + beta|1>)_S |0>_A |env>^{⊗n_env}, the starting register of the
/// premeasurement and decoherence circuits. The environment defaults to all |0>.
inline PureState measurement_register(cplx alpha, cplx beta, int n_env,
                                      const PureState& env_qubit = PureState::zeros(1)) {
  if (env_qubit.num_qubits() != 1) throw std::invalid_argument("environment initial state must be one qubit");
  PureState reg = tensor_product(PureState::qubit(alpha, beta), PureState::zeros(1));
  for (int i = 0; i < n_env; ++i) reg = tensor_product(reg, env_qubit);
  return reg;
}

}  // namespace einsel

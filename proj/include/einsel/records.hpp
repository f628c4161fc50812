/**
 * @file records.hpp
 * @brief Observer memory: system-record correlations, conditional predictive
 * probability, per-outcome horizons, redundant records, branch counting and
 * the compressibility of record histories.
 *
 * Joint registers put the system qubits first and the memory cells after.
 */
#pragma once

#include "einsel/compress.hpp"
#include "einsel/decoherence.hpp"
#include "einsel/linalg.hpp"
#include "einsel/probability.hpp"
#include "einsel/redundancy.hpp"
#include "einsel/rng.hpp"
#include "einsel/sieve.hpp"

#include <optional>
#include <vector>

namespace einsel {

/// Outcomes i with probabilities p_i, system states |s_i> and mutually
/// orthogonal record states (pure or mixed).
class MemoryModel {
 public:
  MemoryModel(ProbabilityVector p, std::vector<PureState> system_states, std::vector<DensityMatrix> records)
      : p_(std::move(p)), system_(std::move(system_states)), records_(std::move(records)) {
    validate();
  }

  MemoryModel(ProbabilityVector p, std::vector<PureState> system_states, const std::vector<PureState>& records)
      : MemoryModel(std::move(p), std::move(system_states), to_density(records)) {}

  /// The two-outcome cell: |0>_S recorded as |1>, |1>_S recorded as |0>,
  /// with weights |alpha|^2 and |beta|^2.
  static MemoryModel two_outcome(cplx alpha, cplx beta) {
    const double a2 = std::norm(alpha), b2 = std::norm(beta);
    const double s = a2 + b2;
    return {ProbabilityVector({a2 / s, b2 / s}), {PureState::basis(1, 0), PureState::basis(1, 1)},
            std::vector<PureState>{PureState::basis(1, 1), PureState::basis(1, 0)}};
  }

  std::size_t outcomes() const { return system_.size(); }
  const ProbabilityVector& probabilities() const { return p_; }
  const std::vector<PureState>& system_states() const { return system_; }
  const std::vector<DensityMatrix>& records() const { return records_; }
  int system_qubits() const { return system_.front().num_qubits(); }
  int record_qubits() const { return records_.front().num_qubits(); }

  /// Projector onto the support of record i.
  Projector record_support(std::size_t i) const {
    return Projector(detail::spectral_projector(records_.at(i).matrix(), 1e-10, true));
  }

 private:
  static std::vector<DensityMatrix> to_density(const std::vector<PureState>& v) {
    std::vector<DensityMatrix> out;
    for (const auto& s : v) out.push_back(DensityMatrix::from_pure(s));
    return out;
  }

  void validate() const {
    if (system_.empty() || system_.size() != records_.size() || p_.size() != system_.size())
      throw std::invalid_argument("memory model: outcome, system and record counts must agree");
    for (const auto& s : system_)
      if (s.num_qubits() != system_.front().num_qubits()) throw std::invalid_argument("system states differ in size");
    for (const auto& r : records_)
      if (r.num_qubits() != records_.front().num_qubits()) throw std::invalid_argument("record states differ in size");
    for (std::size_t i = 0; i < records_.size(); ++i)
      for (std::size_t j = i + 1; j < records_.size(); ++j) {
        const double overlap = (records_[i].matrix() * records_[j].matrix()).trace().real();
        if (std::abs(overlap) > 1e-10) throw std::invalid_argument("record states are not mutually orthogonal");
      }
  }

  ProbabilityVector p_;
  std::vector<PureState> system_;
  std::vector<DensityMatrix> records_;
};

namespace detail {

inline DensityMatrix tensor_power(const DensityMatrix& rho, int n) {
  DensityMatrix out = rho;
  for (int i = 1; i < n; ++i) out = tensor_product(out, rho);
  return out;
}

inline DensityMatrix correlated_mixture(const MemoryModel& m, int cells) {
  const int ns = m.system_qubits();
  if (ns + cells * m.record_qubits() > kMaxDensityQubits)
    throw std::invalid_argument("system plus memory exceeds the 12-qubit density-matrix cap");
  std::optional<CMatrix> acc;
  for (std::size_t i = 0; i < m.outcomes(); ++i) {
    const DensityMatrix block =
        tensor_product(DensityMatrix::from_pure(m.system_states()[i]), tensor_power(m.records()[i], cells));
    CMatrix term = m.probabilities()[i] * block.matrix();
    acc = acc ? CMatrix(*acc + term) : term;
  }
  return DensityMatrix(std::move(*acc), unchecked);
}

}  // namespace detail

/// rho_SM = sum_i p_i |s_i><s_i| ⊗ rho_mu_i.
inline DensityMatrix correlate(const MemoryModel& m) { return detail::correlated_mixture(m, 1); }

/// Each outcome's record replicated over n cells.
inline DensityMatrix redundant_records(const MemoryModel& m, int n) {
  if (n < 1) throw std::invalid_argument("redundant_records: need at least one cell");
  return detail::correlated_mixture(m, n);
}

/// p(sigma, mu_i) / p(mu_i); empty when p(mu_i) < 1e-12.
inline std::optional<double> conditional_g(const DensityMatrix& rho_sm, const Projector& record,
                                           const Projector& proposition) {
  if (record.matrix().rows() != static_cast<Eigen::Index>(rho_sm.dim()) ||
      proposition.matrix().rows() != static_cast<Eigen::Index>(rho_sm.dim()))
    throw std::invalid_argument("conditional_g: projector dimension mismatch");
  const double p_mu = born_probability(rho_sm, record);
  if (p_mu < 1e-12) return std::nullopt;
  return born_probability(rho_sm, meet(proposition, record)) / p_mu;
}

/// Local projector on the memory (or system) factor, padded to the register.
inline Projector embed_projector(const Projector& local, const QubitSet& targets, int num_qubits) {
  if (static_cast<int>(targets.size()) != local.num_qubits())
    throw std::invalid_argument("embed_projector: target count does not match the projector");
  targets.validate(num_qubits);
  return Projector(detail::embed(local.matrix(), targets, num_qubits));
}

/// Symmetric bit-flip mixing at rate gamma on each target qubit:
/// rho -> (1 - q) rho + q X rho X, q = (1 - exp(-2 gamma t)) / 2.
inline DensityMatrix symmetric_flip(const DensityMatrix& rho, double rate, double t, const QubitSet& targets) {
  if (rate < 0.0 || t < 0.0) throw std::invalid_argument("symmetric_flip: negative rate or time");
  const int n = rho.num_qubits();
  targets.validate(n);
  const double q = 0.5 * (1.0 - std::exp(-2.0 * rate * t));
  CMatrix m = rho.matrix();
  for (int target : targets) {
    const std::size_t mask = detail::bit_mask(target, n);
    const auto d = m.rows();
    CMatrix flipped(d, d);
    for (Eigen::Index r = 0; r < d; ++r)
      for (Eigen::Index c = 0; c < d; ++c)
        flipped(r, c) = m(static_cast<Eigen::Index>(static_cast<std::size_t>(r) ^ mask),
                          static_cast<Eigen::Index>(static_cast<std::size_t>(c) ^ mask));
    m = (1.0 - q) * m + q * flipped;
  }
  return DensityMatrix(std::move(m), detail::unchecked);
}

/// Open-system evolution of the system factor of rho_SM for time t: dephasing
/// by `ch` plus optional symmetric flip mixing. The two Pauli channels commute,
/// so the order is immaterial. The memory is left alone.
inline DensityMatrix evolve_system(const DensityMatrix& rho_sm, int system_qubits, const DephasingChannel& ch, double t,
                                   double flip_rate = 0.0) {
  const QubitSet sys = QubitSet::range(0, system_qubits);
  DensityMatrix out = dephase(rho_sm, ch, t, sys);
  if (flip_rate > 0.0) out = symmetric_flip(out, flip_rate, t, sys);
  return out;
}

namespace detail {

/// Renormalized system state conditioned on record i.
inline DensityMatrix conditional_system_state(const DensityMatrix& rho_sm, const MemoryModel& m, std::size_t i) {
  const int ns = m.system_qubits();
  const int n = rho_sm.num_qubits();
  const QubitSet mem = QubitSet::range(ns, n - ns);
  const Projector pi = embed_projector(m.record_support(i), mem, n);
  const CMatrix projected = pi.matrix() * rho_sm.matrix() * pi.matrix();
  const double w = projected.trace().real();
  if (w < 1e-12) throw std::invalid_argument("record has zero weight");
  const DensityMatrix cond(projected / w, unchecked);
  return partial_trace(cond, QubitSet::range(0, ns));
}

}  // namespace detail

/// Predictability horizon of outcome i, from the entropy of the renormalized
/// conditional state <mu_i| rho_SM(t) |mu_i>. The dynamics act on the system.
inline Horizon outcome_horizon(const MemoryModel& m, const DynamicsSpec& dyn, std::size_t i,
                               EntropyMeasure measure = EntropyMeasure::VonNeumann) {
  if (i >= m.outcomes()) throw std::invalid_argument("outcome_horizon: no such outcome");
  if (dyn.num_qubits() != m.system_qubits()) throw std::invalid_argument("outcome_horizon: dynamics must act on the system");
  const int ns = m.system_qubits();
  const DensityMatrix rho0 = correlate(m);
  const int n = rho0.num_qubits();
  const QubitSet sys = QubitSet::range(0, ns);

  EntropyTrajectory traj;
  traj.times = dyn.time_grid;
  traj.horizon_cap = dyn.horizon_cap;
  traj.num_qubits = ns;
  traj.equilibrium_purity = 1.0 / static_cast<double>(std::size_t{1} << ns);
  auto push = [&](const DensityMatrix& joint) {
    const DensityMatrix c = detail::conditional_system_state(joint, m, i);
    traj.entropy.push_back(von_neumann_entropy(c));
    traj.purity.push_back(purity(c));
  };

  if (!dyn.self_hamiltonian) {
    for (double t : traj.times) push(dephase(rho0, dyn.channel, t, sys));
    const DensityMatrix eq = detail::conditional_system_state(decohered_limit(rho0, dyn.channel, sys), m, i);
    traj.equilibrium_entropy = von_neumann_entropy(eq);
    traj.equilibrium_linear_entropy = linear_entropy(eq);
  } else {
    DensityMatrix rho = rho0;
    push(rho);
    std::map<double, CMatrix> unitaries;
    for (std::size_t k = 1; k < traj.times.size(); ++k) {
      const double dt = traj.times[k] - traj.times[k - 1];
      auto it = unitaries.find(dt);
      if (it == unitaries.end())
        it = unitaries.emplace(dt, detail::embed(detail::step_unitary(*dyn.self_hamiltonian, dt), sys, n)).first;
      rho = dephase(conjugate(rho, it->second), dyn.channel, dt, sys);
      push(rho);
    }
    traj.equilibrium_entropy = traj.entropy.back();
    traj.equilibrium_linear_entropy = 1.0 - traj.purity.back();
  }
  return predictability_horizon(traj, measure);
}

/// Number of diagonal entries above `threshold` once an N-cell record register
/// has decohered in the channel's basis. Conjugate records are the Hadamard
/// images of the model's single-cell records.
inline std::size_t branch_count(const MemoryModel& m, RecordBasis record_basis, int cells, const DephasingChannel& ch,
                                double threshold = 1e-6) {
  if (m.record_qubits() != 1) throw std::invalid_argument("branch_count: records must be single cells");
  if (cells < 1 || cells > kMaxDensityQubits) throw std::invalid_argument("branch_count: cell count out of range");
  if (ch.num_qubits() != cells) throw std::invalid_argument("branch_count: channel must act on the record register");
  const double p_min = *std::min_element(m.probabilities().begin(), m.probabilities().end());
  if (!(threshold > 0.0) || !(threshold < p_min)) throw std::invalid_argument("branch_count: threshold outside (0, min p)");

  const CMatrix h = pauli::hadamard();
  std::optional<CMatrix> acc;
  for (std::size_t i = 0; i < m.outcomes(); ++i) {
    DensityMatrix cell = m.records()[i];
    if (record_basis == RecordBasis::Conjugate) cell = conjugate(cell, h);
    CMatrix term = m.probabilities()[i] * detail::tensor_power(cell, cells).matrix();
    acc = acc ? CMatrix(*acc + term) : term;
  }
  const DensityMatrix decohered = decohered_limit(DensityMatrix(std::move(*acc), detail::unchecked), ch);
  std::size_t branches = 0;
  for (std::size_t k = 0; k < decohered.dim(); ++k) {
    const double w = ch.is_computational() ? decohered(k, k).real() : born_probability(decohered, ch.pointer_projector(k));
    if (w > threshold) ++branches;
  }
  return branches;
}

/// Probability that every record cell, read in the given single-cell basis,
/// shows the same value.
inline double record_consensus(const DensityMatrix& rho, const QubitSet& cells, RecordBasis basis) {
  DensityMatrix r = partial_trace(rho, cells);
  if (basis == RecordBasis::Conjugate) r = conjugate(r, hadamard_transform(r.num_qubits()));
  return std::min(1.0, r(0, 0).real() + r(r.dim() - 1, r.dim() - 1).real());
}

/// The single-cell basis in which all n redundant cells agree with
/// certainty, if any.
inline std::optional<RecordBasis> consensus_basis(const MemoryModel& m, int n) {
  const DensityMatrix rho = redundant_records(m, n);
  const QubitSet cells = QubitSet::range(m.system_qubits(), n * m.record_qubits());
  for (RecordBasis b : {RecordBasis::Pointer, RecordBasis::Conjugate})
    if (record_consensus(rho, cells, b) >= 1.0 - 1e-9) return b;
  return std::nullopt;
}

/// A history of record symbols drawn from {0, ..., alphabet - 1}.
struct RecordSequence {
  std::vector<std::uint32_t> symbols;
  std::uint32_t alphabet = 2;

  RecordSequence(std::vector<std::uint32_t> s, std::uint32_t a) : symbols(std::move(s)), alphabet(a) {
    if (alphabet == 0) throw std::invalid_argument("record alphabet is empty");
    for (auto x : symbols)
      if (x >= alphabet) throw std::invalid_argument("record symbol outside the alphabet");
  }

  static RecordSequence constant(std::size_t length, std::uint32_t symbol = 0, std::uint32_t alphabet = 2) {
    return {std::vector<std::uint32_t>(length, symbol), alphabet};
  }

  static RecordSequence alternating(std::size_t length) {
    std::vector<std::uint32_t> s(length);
    for (std::size_t i = 0; i < length; ++i) s[i] = static_cast<std::uint32_t>(i & 1U);
    return {std::move(s), 2};
  }

  static RecordSequence random(std::size_t length, std::uint64_t seed, std::uint32_t alphabet = 2) {
    SeededRng rng(seed);
    std::vector<std::uint32_t> s(length);
    for (auto& x : s) x = static_cast<std::uint32_t>(rng.below(alphabet));
    return {std::move(s), alphabet};
  }
};

/// Compressed-to-raw length ratio; a computable proxy, not K(R).
inline double compressibility_proxy(const RecordSequence& r) {
  if (r.symbols.size() < 16) throw std::invalid_argument("compressibility_proxy: need at least 16 symbols");
  return compression_cost(r.symbols, r.alphabet).ratio();
}

}  // namespace einsel

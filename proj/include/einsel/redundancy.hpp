/**
 * @file redundancy.hpp
 * @brief Environment records, the redundancy distance between them, and the
 * robustness of record decoding against single-qubit errors.
 */
#pragma once

#include "einsel/linalg.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace einsel {

/// A pure register split into system and environment.
struct JointState {
  PureState state;
  QubitSet system;
  QubitSet environment;

  JointState(PureState s, QubitSet sys, QubitSet env)
      : state(std::move(s)), system(std::move(sys)), environment(std::move(env)) {
    const int n = state.num_qubits();
    system.validate(n);
    environment.validate(n);
    if (system.empty() || environment.empty()) throw std::invalid_argument("JointState: empty system or environment");
    if (system.size() + environment.size() != static_cast<std::size_t>(n))
      throw std::invalid_argument("JointState: system and environment must partition the register");
    for (int q : system)
      if (environment.contains(q)) throw std::invalid_argument("JointState: system and environment overlap");
  }
};

/// (|0>|0...0> + |1>|1...1>)/sqrt(2): one system qubit (index 0) recorded by
/// n_env environment qubits.
inline JointState ghz_branch_state(int n_env, cplx alpha = 1.0 / std::sqrt(2.0), cplx beta = 1.0 / std::sqrt(2.0)) {
  if (n_env < 1 || n_env + 1 > kMaxPureQubits) throw std::invalid_argument("environment size out of range");
  const auto d = Eigen::Index{1} << (n_env + 1);
  CVector v = CVector::Zero(d);
  v(0) = alpha;
  v(d - 1) = beta;
  return {PureState::normalized(v), QubitSet{0}, QubitSet::range(1, n_env)};
}

/// Conditional environment state <phi|Psi_SE>, normalized, with its weight.
class EnvironmentRecord {
 public:
  static constexpr double kNullWeight = 1e-12;

  EnvironmentRecord(CVector conditional, int num_qubits) : num_qubits_(num_qubits) {
    weight_ = conditional.squaredNorm();
    amplitudes_ = weight_ > kNullWeight ? CVector(conditional / std::sqrt(weight_)) : CVector::Zero(conditional.size());
  }

  /// A normalized record with unit weight, e.g. |000>.
  static EnvironmentRecord from_state(const PureState& psi) { return {psi.amplitudes(), psi.num_qubits()}; }

  bool is_null() const { return weight_ <= kNullWeight; }
  double weight() const { return weight_; }
  int num_qubits() const { return num_qubits_; }
  const CVector& amplitudes() const { return amplitudes_; }

 private:
  CVector amplitudes_;
  double weight_ = 0.0;
  int num_qubits_ = 0;
};

inline EnvironmentRecord environment_record(const JointState& j, const PureState& phi) {
  const int n = j.state.num_qubits();
  if (phi.num_qubits() != static_cast<int>(j.system.size()))
    throw std::invalid_argument("environment_record: phi does not match the system size");
  const std::size_t ds = std::size_t{1} << j.system.size();
  const std::size_t de = std::size_t{1} << j.environment.size();
  CVector e = CVector::Zero(static_cast<Eigen::Index>(de));
  for (std::size_t s = 0; s < ds; ++s) {
    const cplx c = std::conj(phi[s]);
    if (c == cplx(0.0)) continue;
    const std::size_t sp = j.system.scatter(s, n);
    for (std::size_t k = 0; k < de; ++k) e(static_cast<Eigen::Index>(k)) += c * j.state[sp | j.environment.scatter(k, n)];
  }
  return {std::move(e), static_cast<int>(j.environment.size())};
}

enum class Pauli : char { I = 'I', X = 'X', Y = 'Y', Z = 'Z' };

/// Per-qubit Pauli labels with their counts.
class FlipSequence {
 public:
  explicit FlipSequence(std::vector<Pauli> labels) : labels_(std::move(labels)) {
    for (Pauli p : labels_) {
      if (p == Pauli::X) ++n_x_;
      if (p == Pauli::Y) ++n_y_;
      if (p == Pauli::Z) ++n_z_;
    }
  }

  const std::vector<Pauli>& labels() const { return labels_; }
  int n_x() const { return n_x_; }
  int n_y() const { return n_y_; }
  int n_z() const { return n_z_; }
  int total() const { return n_x_ + n_y_ + n_z_; }

  std::string to_string() const {
    std::string s;
    for (Pauli p : labels_) s += static_cast<char>(p);
    return s;
  }

 private:
  std::vector<Pauli> labels_;
  int n_x_ = 0, n_y_ = 0, n_z_ = 0;
};

/// Minimal flip count, or no value when no Pauli string relates the records.
struct RedundancyDistance {
  std::optional<int> value;
  std::optional<FlipSequence> flips;

  bool finite() const { return value.has_value(); }
};

inline constexpr int kMaxFlipSearchQubits = 8;
inline constexpr double kUnitOverlap = 1.0 - 1e-9;

namespace detail {

/// |<b| X^xmask Z^zmask |a>|. A Y on a qubit equals XZ up to a phase.
inline double pauli_overlap(const CVector& a, const CVector& b, std::size_t xmask, std::size_t zmask) {
  cplx acc = 0.0;
  const auto d = static_cast<std::size_t>(a.size());
  for (std::size_t k = 0; k < d; ++k) {
    const cplx ak = a(static_cast<Eigen::Index>(k));
    if (ak == cplx(0.0)) continue;
    const double sign = (std::popcount(k & zmask) & 1) ? -1.0 : 1.0;
    acc += std::conj(b(static_cast<Eigen::Index>(k ^ xmask))) * sign * ak;
  }
  return std::abs(acc);
}

}  // namespace detail

/// Least n_x + n_y + n_z over per-qubit Pauli assignments carrying record `a`
/// onto `b` up to a global phase. Searched in order of increasing weight.
inline RedundancyDistance redundancy_distance(const EnvironmentRecord& a, const EnvironmentRecord& b) {
  if (a.is_null() || b.is_null()) throw std::invalid_argument("redundancy_distance: null record");
  if (a.num_qubits() != b.num_qubits()) throw std::invalid_argument("redundancy_distance: record sizes differ");
  const int n = a.num_qubits();
  if (n > kMaxFlipSearchQubits) throw std::invalid_argument("redundancy_distance: more than 8 environment qubits");

  const std::size_t subsets = std::size_t{1} << n;
  for (int w = 0; w <= n; ++w) {
    for (std::size_t support = 0; support < subsets; ++support) {
      if (std::popcount(support) != w) continue;
      std::vector<int> sites;
      for (int q = 0; q < n; ++q)
        if (support & detail::bit_mask(q, n)) sites.push_back(q);
      std::size_t combos = 1;
      for (int i = 0; i < w; ++i) combos *= 3;
      for (std::size_t code = 0; code < combos; ++code) {
        std::size_t xmask = 0, zmask = 0, c = code;
        std::vector<Pauli> labels(static_cast<std::size_t>(n), Pauli::I);
        for (int q : sites) {
          const std::size_t m = detail::bit_mask(q, n);
          switch (c % 3) {
            case 0: xmask |= m; labels[static_cast<std::size_t>(q)] = Pauli::X; break;
            case 1: xmask |= m; zmask |= m; labels[static_cast<std::size_t>(q)] = Pauli::Y; break;
            default: zmask |= m; labels[static_cast<std::size_t>(q)] = Pauli::Z; break;
          }
          c /= 3;
        }
        if (detail::pauli_overlap(a.amplitudes(), b.amplitudes(), xmask, zmask) >= kUnitOverlap)
          return {w, FlipSequence(std::move(labels))};
      }
    }
  }
  return {};
}

/// Outcome of checking non-negativity, symmetry and the triangle inequality.
struct MetricReport {
  std::vector<std::vector<std::optional<int>>> distances;  ///< empty = unrelated (infinite)
  bool nonnegative = true;
  bool symmetric = true;
  bool triangle = true;
  std::vector<std::string> violations;

  bool ok() const { return nonnegative && symmetric && triangle; }
};

/// Checks the metric axioms over all ordered triples. Unrelated pairs count
/// as infinitely distant.
inline MetricReport verify_metric_axioms(std::span<const EnvironmentRecord> records) {
  MetricReport rep;
  const std::size_t m = records.size();
  rep.distances.assign(m, std::vector<std::optional<int>>(m));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) rep.distances[i][j] = redundancy_distance(records[i], records[j]).value;

  auto label = [](std::size_t i, std::size_t j) { return "(" + std::to_string(i) + "," + std::to_string(j) + ")"; };
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      const auto& dij = rep.distances[i][j];
      if (dij && *dij < 0) {
        rep.nonnegative = false;
        rep.violations.push_back("negative distance at " + label(i, j));
      }
      if (dij != rep.distances[j][i]) {
        rep.symmetric = false;
        rep.violations.push_back("asymmetric pair " + label(i, j));
      }
    }
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b)
      for (std::size_t c = 0; c < m; ++c) {
        const auto& ab = rep.distances[a][b];
        const auto& bc = rep.distances[b][c];
        const auto& ac = rep.distances[a][c];
        if (!ab || !bc) continue;  // left side infinite
        if (!ac || *ab + *bc < *ac) {
          rep.triangle = false;
          rep.violations.push_back("triangle inequality fails for (" + std::to_string(a) + "," + std::to_string(b) +
                                   "," + std::to_string(c) + ")");
        }
      }
  return rep;
}

/// Majority symbol of an odd-length bit list.
inline int majority_decode(std::span<const int> bits) {
  if (bits.size() % 2 == 0) throw std::invalid_argument("majority_decode: even length has no majority");
  std::size_t ones = 0;
  for (int b : bits) {
    if (b != 0 && b != 1) throw std::invalid_argument("majority_decode: bits must be 0 or 1");
    ones += static_cast<std::size_t>(b);
  }
  return 2 * ones > bits.size() ? 1 : 0;
}

inline int majority_decode(std::initializer_list<int> bits) {
  return majority_decode(std::span<const int>(bits.begin(), bits.size()));
}

/// Which system observable the observer reads off the environment.
enum class RecordBasis { Pointer, Conjugate };

inline const char* to_string(RecordBasis b) { return b == RecordBasis::Pointer ? "pointer" : "hadamard"; }

struct RobustnessResult {
  double success_rate = 0.0;
  std::size_t patterns = 0;
};

namespace detail {

inline std::vector<std::size_t> masks_of_weight(int n, int k) {
  std::vector<std::size_t> out;
  for (std::size_t m = 0; m < (std::size_t{1} << n); ++m)
    if (std::popcount(m) == k) out.push_back(m);
  return out;
}

inline CVector flip_bits(const CVector& v, std::size_t xmask) {
  CVector out(v.size());
  for (Eigen::Index k = 0; k < v.size(); ++k) out(static_cast<Eigen::Index>(static_cast<std::size_t>(k) ^ xmask)) = v(k);
  return out;
}

inline CVector flip_phases(const CVector& v, std::size_t zmask) {
  CVector out = v;
  for (Eigen::Index k = 0; k < v.size(); ++k)
    if (std::popcount(static_cast<std::size_t>(k) & zmask) & 1) out(k) = -out(k);
  return out;
}

/// Applies H to every qubit, without the 2^{-N/2} normalization (fast
/// Walsh-Hadamard transform). Leaving the scale out keeps equal-magnitude
/// sums exact.
inline CVector walsh_hadamard(CVector v) {
  const auto d = v.size();
  for (Eigen::Index h = 1; h < d; h <<= 1)
    for (Eigen::Index i = 0; i < d; i += 2 * h)
      for (Eigen::Index j = i; j < i + h; ++j) {
        const cplx a = v(j), b = v(j + h);
        v(j) = a + b;
        v(j + h) = a - b;
      }
  return v;
}

}  // namespace detail

/// Exhaustive error-pattern test of record decoding.
///
/// Pointer basis: every weight-k bit-flip (X) pattern is applied to the
/// records of |0>_S and |1>_S; each environment qubit is read in {|0>,|1>}
/// and the majority vote is compared with the system state.
///
/// Conjugate basis: every weight-k phase-flip (Z) pattern is applied to the
/// records of |+>_S and |->_S; the environment is read in |±>^N and the sign
/// is estimated by a GF(2)-linear functional of the outcome bits. The best
/// such functional for the pattern set is used.
///
/// The rate is the exact probability of a correct answer, averaged over
/// patterns and over the two branches weighted by their record weights.
inline RobustnessResult error_robustness(const JointState& j, RecordBasis basis, int k) {
  if (j.system.size() != 1) throw std::invalid_argument("error_robustness: expects a single system qubit");
  const int n = static_cast<int>(j.environment.size());
  if (k < 0 || k > n) throw std::invalid_argument("error_robustness: error count exceeds environment size");
  if (n > kMaxFlipSearchQubits + 4) throw std::invalid_argument("error_robustness: environment too large");

  const bool pointer = basis == RecordBasis::Pointer;
  const PureState branch_state[2] = {pointer ? PureState::basis(1, 0) : PureState::plus(),
                                     pointer ? PureState::basis(1, 1) : PureState::minus()};
  EnvironmentRecord rec[2] = {environment_record(j, branch_state[0]), environment_record(j, branch_state[1])};
  const double w0 = rec[0].weight() / (rec[0].weight() + rec[1].weight());
  const double branch_weight[2] = {w0, 1.0 - w0};

  const auto patterns = detail::masks_of_weight(n, k);
  const std::size_t d = std::size_t{1} << n;

  // Outcome distributions per (pattern, branch).
  std::vector<std::array<Eigen::VectorXd, 2>> dist;
  dist.reserve(patterns.size());
  for (std::size_t mask : patterns) {
    std::array<Eigen::VectorXd, 2> pd;
    for (int s = 0; s < 2; ++s) {
      if (rec[s].is_null()) {
        pd[static_cast<std::size_t>(s)] = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d));
        continue;
      }
      CVector v = pointer ? detail::flip_bits(rec[s].amplitudes(), mask)
                          : detail::walsh_hadamard(detail::flip_phases(rec[s].amplitudes(), mask));
      pd[static_cast<std::size_t>(s)] = v.cwiseAbs2();
    }
    dist.push_back(std::move(pd));
  }

  // Extended-precision sums keep rates such as 1/2 exact when the outcome
  // probabilities are equal.
  auto rate_for = [&](auto decode) {
    long double total = 0.0L;
    for (const auto& pd : dist)
      for (int s = 0; s < 2; ++s) {
        long double good = 0.0L, mass = 0.0L;
        for (std::size_t x = 0; x < d; ++x) {
          const long double p = pd[static_cast<std::size_t>(s)](static_cast<Eigen::Index>(x));
          mass += p;
          if (decode(x) == s) good += p;
        }
        if (mass > 0.0L) total += static_cast<long double>(branch_weight[s]) * (good / mass);
      }
    return static_cast<double>(total / static_cast<long double>(dist.size()));
  };

  RobustnessResult out;
  out.patterns = patterns.size();
  if (pointer) {
    out.success_rate = rate_for([n](std::size_t x) { return 2 * std::popcount(x) > n ? 1 : 0; });
  } else {
    double best = 0.0;
    for (std::size_t functional = 0; functional < d; ++functional)
      best = std::max(best, rate_for([functional](std::size_t x) { return std::popcount(x & functional) & 1; }));
    out.success_rate = best;
  }
  return out;
}

}  // namespace einsel

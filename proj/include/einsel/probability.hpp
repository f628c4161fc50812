/**
 * @file probability.hpp
 * @brief Outcome probabilities after decoherence: equal-weight superpositions,
 * permuted superpositions, coarse-graining by an ancilla, and the classical
 * sum and product rules for pointer events.
 */
#pragma once

#include "einsel/decoherence.hpp"
#include "einsel/linalg.hpp"

#include <cmath>
#include <numeric>
#include <optional>
#include <vector>

namespace einsel {

class ProbabilityVector {
 public:
  explicit ProbabilityVector(std::vector<double> p) : p_(std::move(p)) {
    if (p_.empty()) throw std::invalid_argument("probability vector is empty");
    double sum = 0.0;
    for (double x : p_) {
      if (x < -1e-12 || x > 1.0 + 1e-12) throw invariant_violation("probability outside [0, 1]");
      sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw invariant_violation("probabilities do not sum to 1");
  }

  std::size_t size() const { return p_.size(); }
  double operator[](std::size_t i) const { return p_[i]; }
  const std::vector<double>& values() const { return p_; }
  auto begin() const { return p_.begin(); }
  auto end() const { return p_.end(); }

 private:
  std::vector<double> p_;
};

/// Born probabilities of every pointer state of the channel after full
/// decoherence. Only for states with equal-magnitude pointer coefficients.
inline ProbabilityVector uniform_outcome_probabilities(const PureState& psi, const DephasingChannel& ch) {
  if (psi.num_qubits() != ch.num_qubits()) throw std::invalid_argument("state and channel dimensions differ");
  const CVector coeff = ch.basis().adjoint() * psi.amplitudes();
  const double first = std::abs(coeff(0));
  for (Eigen::Index k = 1; k < coeff.size(); ++k)
    if (std::abs(std::abs(coeff(k)) - first) > 1e-10)
      throw std::invalid_argument("pointer coefficients differ in magnitude; use born_probability directly");
  const DensityMatrix rho = decohered_limit(DensityMatrix::from_pure(psi), ch);
  std::vector<double> p(psi.dim());
  for (std::size_t k = 0; k < p.size(); ++k) p[k] = born_probability(rho, ch.pointer_projector(k));
  return ProbabilityVector(std::move(p));
}

namespace detail {

inline CMatrix permutation_matrix(std::span<const std::size_t> perm, std::size_t dim) {
  if (perm.size() > dim) throw std::invalid_argument("permutation longer than the state dimension");
  std::vector<std::size_t> full(dim);
  std::iota(full.begin(), full.end(), std::size_t{0});
  std::copy(perm.begin(), perm.end(), full.begin());
  std::vector<bool> seen(dim, false);
  for (auto v : full) {
    if (v >= dim || seen[v]) throw std::invalid_argument("labels do not form a permutation");
    seen[v] = true;
  }
  CMatrix p = CMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t k = 0; k < dim; ++k) p(static_cast<Eigen::Index>(full[k]), static_cast<Eigen::Index>(k)) = 1.0;
  return p;
}

inline ProbabilityVector measure(const DensityMatrix& rho, std::span<const CVector> measurement) {
  for (std::size_t a = 0; a < measurement.size(); ++a)
    for (std::size_t b = 0; b < measurement.size(); ++b) {
      const cplx ip = measurement[a].dot(measurement[b]);
      if (std::abs(ip - (a == b ? 1.0 : 0.0)) > 1e-10) throw std::invalid_argument("measurement basis is not orthonormal");
    }
  std::vector<double> p;
  for (const auto& v : measurement) {
    if (v.size() != static_cast<Eigen::Index>(rho.dim())) throw std::invalid_argument("measurement vector dimension mismatch");
    p.push_back(std::max(0.0, v.dot(rho.matrix() * v).real()));
  }
  return ProbabilityVector(std::move(p));  // rejects states outside the measured subspace
}

}  // namespace detail

struct DistributionPair {
  ProbabilityVector original;
  ProbabilityVector permuted;
};

/// Outcome distributions of rho and of its relabelled copy (|k> -> |perm[k]>)
/// under the given orthonormal measurement, with no decoherence. The
/// measurement may span a subspace, provided it contains the state; labels
/// past the end of `perm` stay fixed.
inline DistributionPair permutation_distinguishability(const DensityMatrix& rho, std::span<const std::size_t> perm,
                                                       std::span<const CVector> measurement) {
  const CMatrix p = detail::permutation_matrix(perm, rho.dim());
  const DensityMatrix permuted = conjugate(rho, p);
  return {detail::measure(rho, measurement), detail::measure(permuted, measurement)};
}

inline DistributionPair permutation_distinguishability(const PureState& psi, std::span<const std::size_t> perm,
                                                       std::span<const CVector> measurement) {
  return permutation_distinguishability(DensityMatrix::from_pure(psi), perm, measurement);
}

/// Ancilla degeneracies n_k with n_k / M approximating p_k.
struct CoarseGraining {
  std::vector<double> target;           ///< the p_k being approximated
  std::size_t M = 0;                    ///< dimension of the flat system-ancilla space
  std::vector<std::size_t> degeneracy;  ///< n_k, summing to M
  bool dimension_deficit = false;       ///< some n_k = 0 although p_k > 0

  std::size_t N() const { return target.size(); }
};

/// Largest-remainder apportionment of M seats to the weights p_k (ties go to
/// the lower label).
inline CoarseGraining coarse_grain(const ProbabilityVector& p, std::size_t M) {
  if (M == 0) throw std::invalid_argument("coarse_grain: M must be positive");
  CoarseGraining cg;
  cg.target = p.values();
  cg.M = M;
  cg.degeneracy.resize(p.size());
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t assigned = 0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double quota = p[k] * static_cast<double>(M);
    const auto base = static_cast<std::size_t>(std::floor(quota + 1e-12));
    cg.degeneracy[k] = base;
    assigned += base;
    remainders.emplace_back(quota - static_cast<double>(base), k);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t i = 0; assigned < M; ++i, ++assigned) ++cg.degeneracy[remainders[i % remainders.size()].second];
  while (assigned > M) {  // rounding overshoot, only possible through the 1e-12 slack
    auto it = std::max_element(cg.degeneracy.begin(), cg.degeneracy.end());
    --*it;
    --assigned;
  }
  for (std::size_t k = 0; k < p.size(); ++k)
    if (cg.degeneracy[k] == 0 && p[k] > 0.0) cg.dimension_deficit = true;
  return cg;
}

struct ReducedReconstruction {
  DensityMatrix rho;               ///< diag(n_k / M), zero-padded to a qubit register
  std::vector<double> diagonal;    ///< n_k / M
  double deviation = 0.0;          ///< max_k |p_k - n_k / M|
};

/// Builds the flat M-dimensional state (every |k, j> with weight 1/M) and sums
/// it over each outcome's block of ancilla labels.
inline ReducedReconstruction reconstruct_reduced(const CoarseGraining& cg) {
  std::size_t total = 0;
  for (auto n : cg.degeneracy) total += n;
  if (total != cg.M) throw invariant_violation("degeneracies do not sum to M");

  const std::vector<double> flat(cg.M, 1.0 / static_cast<double>(cg.M));
  std::vector<double> diag(cg.N(), 0.0);
  std::size_t offset = 0;
  for (std::size_t k = 0; k < cg.N(); ++k) {
    for (std::size_t j = offset; j < offset + cg.degeneracy[k]; ++j) diag[k] += flat[j];
    offset += cg.degeneracy[k];
  }

  double deviation = 0.0;
  for (std::size_t k = 0; k < cg.N(); ++k) deviation = std::max(deviation, std::abs(cg.target[k] - diag[k]));

  int n = 0;
  while ((std::size_t{1} << n) < std::max<std::size_t>(cg.N(), 2)) ++n;
  std::vector<double> padded(std::size_t{1} << n, 0.0);
  std::copy(diag.begin(), diag.end(), padded.begin());
  return {DensityMatrix::diagonal(padded), diag, deviation};
}

/// Projector onto the span of the ranges of b and c.
inline Projector projector_union(const Projector& b, const Projector& c) {
  return Projector(detail::spectral_projector(b.matrix() + c.matrix(), 1e-10, true));
}

/// Projector onto the intersection of the ranges of b and c.
inline Projector projector_intersection(const Projector& b, const Projector& c) {
  const auto d = b.matrix().rows();
  const CMatrix gap = 2.0 * CMatrix::Identity(d, d) - b.matrix() - c.matrix();
  return Projector(detail::spectral_projector(gap, 1e-10, false));
}

/// |mu(b or c) - mu(b) - mu(c) + mu(b and c)|.
inline double sum_rule_violation(const DensityMatrix& rho, const Projector& b, const Projector& c) {
  if (b.matrix().rows() != c.matrix().rows()) throw std::invalid_argument("projector dimensions differ");
  return std::abs(born_probability(rho, projector_union(b, c)) - born_probability(rho, b) - born_probability(rho, c) +
                  born_probability(rho, projector_intersection(b, c)));
}

inline double sum_rule_violation(const PureState& psi, const Projector& b, const Projector& c) {
  return sum_rule_violation(DensityMatrix::from_pure(psi), b, c);
}

inline double commutator_defect(const Projector& p, const Projector& q) {
  return detail::max_abs(p.matrix() * q.matrix() - q.matrix() * p.matrix());
}

/// Product of commuting projectors.
inline Projector meet(const Projector& p, const Projector& q) {
  if (commutator_defect(p, q) > 1e-12) throw std::invalid_argument("projectors do not commute");
  return Projector(p.matrix() * q.matrix());
}

/// |mu(c b | a) - mu(c | b a) mu(b | a)| for commuting events, with
/// conditionals as ratios of Born probabilities. Empty when mu(a) < 1e-12.
/// A vanishing mu(b a) makes both sides zero.
inline std::optional<double> conditional_product_check(const DensityMatrix& rho, const Projector& a, const Projector& b,
                                                       const Projector& c) {
  if (commutator_defect(a, b) > 1e-12 || commutator_defect(a, c) > 1e-12 || commutator_defect(b, c) > 1e-12)
    throw std::invalid_argument("conditional_product_check: projectors must commute pairwise");
  const double mu_a = born_probability(rho, a);
  if (mu_a < 1e-12) return std::nullopt;
  const Projector ba = meet(b, a);
  const Projector cba = meet(c, ba);
  const double mu_ba = born_probability(rho, ba);
  const double mu_cba = born_probability(rho, cba);
  const double lhs = mu_cba / mu_a;
  const double c_given_ba = mu_ba < 1e-12 ? 0.0 : mu_cba / mu_ba;
  const double rhs = c_given_ba * (mu_ba / mu_a);
  return std::abs(lhs - rhs);
}

}  // namespace einsel

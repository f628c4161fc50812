/**
 * @file decoherence.hpp
 * @brief Pure-decoherence channel and the pointer-observable commutation test.
 *
 * The channel damps every coherence between distinct pointer states by
 * exp(-t / t_D) and leaves the pointer-basis diagonal untouched. It may act on
 * a subset of the register; coherences are then damped between elements whose
 * target-subsystem pointer labels differ.
 */
#pragma once

#include "einsel/linalg.hpp"

#include <optional>

namespace einsel {

class DephasingChannel {
 public:
  /// `basis` holds the pointer states as columns.
  DephasingChannel(CMatrix basis, double decoherence_time) : basis_(std::move(basis)), t_d_(decoherence_time) {
    if (!(t_d_ > 0.0)) throw std::invalid_argument("decoherence time t_D must be positive");
    num_qubits_ = detail::log2_exact(static_cast<std::size_t>(basis_.rows()));
    if (num_qubits_ < 1) throw std::invalid_argument("pointer basis dimension must be a power of two >= 2");
    if (!is_unitary(basis_)) throw invariant_violation("pointer basis is not orthonormal");
    computational_ = detail::max_abs(basis_ - CMatrix::Identity(basis_.rows(), basis_.cols())) == 0.0;
  }

  static DephasingChannel computational(int num_qubits, double decoherence_time) {
    const auto d = Eigen::Index{1} << num_qubits;
    return {CMatrix::Identity(d, d), decoherence_time};
  }

  /// Pointer states |±...±>.
  static DephasingChannel hadamard(int num_qubits, double decoherence_time) {
    return {hadamard_transform(num_qubits), decoherence_time};
  }

  const CMatrix& basis() const { return basis_; }
  double decoherence_time() const { return t_d_; }
  int num_qubits() const { return num_qubits_; }
  bool is_computational() const { return computational_; }

  /// Projector onto pointer state k.
  Projector pointer_projector(std::size_t k) const {
    const auto col = basis_.col(static_cast<Eigen::Index>(k));
    return Projector(col * col.adjoint());
  }

 private:
  CMatrix basis_;
  double t_d_;
  int num_qubits_ = 0;
  bool computational_ = false;
};

namespace detail {

/// basis on `targets` ⊗ identity on the rest, as a full-register matrix.
inline CMatrix embed(const CMatrix& local, const QubitSet& targets, int n) {
  const QubitSet rest = targets.complement(n);
  const std::size_t dk = std::size_t{1} << targets.size();
  const std::size_t dr = std::size_t{1} << rest.size();
  const auto d = Eigen::Index{1} << n;
  CMatrix w = CMatrix::Zero(d, d);
  std::vector<std::size_t> kpart(dk);
  for (std::size_t a = 0; a < dk; ++a) kpart[a] = targets.scatter(a, n);
  for (std::size_t r = 0; r < dr; ++r) {
    const std::size_t rp = rest.scatter(r, n);
    for (std::size_t a = 0; a < dk; ++a)
      for (std::size_t b = 0; b < dk; ++b)
        w(static_cast<Eigen::Index>(kpart[a] | rp), static_cast<Eigen::Index>(kpart[b] | rp)) =
            local(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
  }
  return w;
}

/// Multiplies coherences between different target labels by `factor`, in the
/// channel's pointer basis.
inline DensityMatrix damp(const DensityMatrix& rho, const DephasingChannel& ch, const QubitSet& targets,
                          double factor) {
  const int n = rho.num_qubits();
  targets.validate(n);
  if (static_cast<int>(targets.size()) != ch.num_qubits())
    throw std::invalid_argument("channel acts on " + std::to_string(ch.num_qubits()) + " qubits but " +
                                std::to_string(targets.size()) + " targets given");

  const bool whole = static_cast<int>(targets.size()) == n;
  std::optional<CMatrix> w;
  if (!ch.is_computational()) w = whole ? ch.basis() : embed(ch.basis(), targets, n);

  CMatrix m = w ? CMatrix(w->adjoint() * rho.matrix() * *w) : rho.matrix();
  const auto d = m.rows();
  if (whole) {
    for (Eigen::Index r = 0; r < d; ++r)
      for (Eigen::Index c = 0; c < d; ++c)
        if (r != c) m(r, c) *= factor;
  } else {
    std::vector<std::size_t> label(static_cast<std::size_t>(d));
    for (Eigen::Index i = 0; i < d; ++i) label[static_cast<std::size_t>(i)] = targets.gather(static_cast<std::size_t>(i), n);
    for (Eigen::Index r = 0; r < d; ++r)
      for (Eigen::Index c = 0; c < d; ++c)
        if (label[static_cast<std::size_t>(r)] != label[static_cast<std::size_t>(c)]) m(r, c) *= factor;
  }
  if (w) m = *w * m * w->adjoint();
  return DensityMatrix(std::move(m), unchecked);
}

}  // namespace detail

/// Dephasing of `targets` for time t.
inline DensityMatrix dephase(const DensityMatrix& rho, const DephasingChannel& ch, double t, const QubitSet& targets) {
  if (t < 0.0) throw std::invalid_argument("dephase: negative time");
  return detail::damp(rho, ch, targets, std::exp(-t / ch.decoherence_time()));
}

/// Dephasing of the whole register for time t.
inline DensityMatrix dephase(const DensityMatrix& rho, const DephasingChannel& ch, double t) {
  return dephase(rho, ch, t, QubitSet::range(0, rho.num_qubits()));
}

/// t -> infinity: projection onto the pointer-basis diagonal.
inline DensityMatrix decohered_limit(const DensityMatrix& rho, const DephasingChannel& ch, const QubitSet& targets) {
  return detail::damp(rho, ch, targets, 0.0);
}

inline DensityMatrix decohered_limit(const DensityMatrix& rho, const DephasingChannel& ch) {
  return decohered_limit(rho, ch, QubitSet::range(0, rho.num_qubits()));
}

/// Self-Hamiltonian of the apparatus and its interaction with the environment.
/// Operators of smaller dimension than the interaction act on the leading
/// factor and are padded with identity.
struct HamiltonianSpec {
  CMatrix self_hamiltonian;
  CMatrix interaction_hamiltonian;

  HamiltonianSpec(CMatrix self, CMatrix interaction)
      : self_hamiltonian(std::move(self)), interaction_hamiltonian(std::move(interaction)) {
    if (detail::hermiticity_defect(self_hamiltonian) > kNormTolerance)
      throw std::invalid_argument("self-Hamiltonian is not Hermitian");
    if (detail::hermiticity_defect(interaction_hamiltonian) > kNormTolerance)
      throw std::invalid_argument("interaction Hamiltonian is not Hermitian");
  }
};

namespace detail {

inline CMatrix pad_to(const CMatrix& op, Eigen::Index dim) {
  if (op.size() == 0) return CMatrix::Zero(dim, dim);
  if (op.rows() == dim) return op;
  if (op.rows() > dim || dim % op.rows() != 0)
    throw std::invalid_argument("operator dimension does not divide the register dimension");
  return kron(op, CMatrix::Identity(dim / op.rows(), dim / op.rows()));
}

}  // namespace detail

/// max |([H_A + H_AE, O])_ij|; zero certifies O as a pointer observable.
inline double pointer_commutator_defect(const HamiltonianSpec& h, const CMatrix& observable) {
  if (detail::hermiticity_defect(observable) > kNormTolerance)
    throw std::invalid_argument("observable is not Hermitian");
  const Eigen::Index dim = std::max({h.self_hamiltonian.rows(), h.interaction_hamiltonian.rows(), observable.rows()});
  const CMatrix total = detail::pad_to(h.self_hamiltonian, dim) + detail::pad_to(h.interaction_hamiltonian, dim);
  const CMatrix o = detail::pad_to(observable, dim);
  return detail::max_abs(total * o - o * total);
}

}  // namespace einsel

/**
 * @file linalg.hpp
 * @brief Dense complex linear algebra for small qubit registers.
 *
 * Qubit ordering is big-endian throughout the library: qubit 0 is the most
 * significant bit of a basis-state index, so |q0 q1 ... q(n-1)>.
 */
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace einsel {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

/// Raised when a computed or supplied object breaks a physical invariant
/// (non-unit norm, negative eigenvalue, non-idempotent projector, ...).
class invariant_violation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kMaxPureQubits = 20;
inline constexpr int kMaxDensityQubits = 12;

inline constexpr double kNormTolerance = 1e-10;
inline constexpr double kPositivityTolerance = 1e-8;
inline constexpr double kEigenZero = 1e-12;

namespace detail {

struct unchecked_t {
  explicit unchecked_t() = default;
};
inline constexpr unchecked_t unchecked{};

/// log2 of a power of two, or -1.
inline int log2_exact(std::size_t dim) {
  if (dim == 0 || (dim & (dim - 1)) != 0) return -1;
  int n = 0;
  while ((std::size_t{1} << n) < dim) ++n;
  return n;
}

inline std::size_t bit_mask(int qubit, int num_qubits) {
  return std::size_t{1} << (num_qubits - 1 - qubit);
}

inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline CVector kron(const CVector& a, const CVector& b) {
  CVector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

inline double max_abs(const CMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline double hermiticity_defect(const CMatrix& m) { return max_abs(m - m.adjoint()); }

/// Eigenvalues of a Hermitian matrix in ascending order. The 2x2 case uses the
/// closed form, which dominates the cost of single-qubit sieves.
inline Eigen::VectorXd hermitian_eigenvalues(const CMatrix& m) {
  if (m.rows() == 1) return Eigen::VectorXd::Constant(1, m(0, 0).real());
  if (m.rows() == 2) {
    const double a = m(0, 0).real();
    const double d = m(1, 1).real();
    const double off = std::abs(m(0, 1));
    const double mean = 0.5 * (a + d);
    const double radius = std::sqrt(0.25 * (a - d) * (a - d) + off * off);
    Eigen::VectorXd ev(2);
    ev << mean - radius, mean + radius;
    return ev;
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(m, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

/// Projector onto the eigenspace of a Hermitian PSD matrix whose eigenvalues
/// are above (range) or below (kernel) the threshold.
inline CMatrix spectral_projector(const CMatrix& psd, double threshold, bool range) {
  if (psd.isDiagonal(0.0)) {
    CMatrix out = CMatrix::Zero(psd.rows(), psd.cols());
    for (Eigen::Index k = 0; k < psd.rows(); ++k)
      if ((psd(k, k).real() > threshold) == range) out(k, k) = 1.0;
    return out;
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(psd);
  const auto& ev = solver.eigenvalues();
  const auto& vecs = solver.eigenvectors();
  CMatrix out = CMatrix::Zero(psd.rows(), psd.cols());
  for (Eigen::Index k = 0; k < ev.size(); ++k) {
    const bool above = ev(k) > threshold;
    if (above == range) out += vecs.col(k) * vecs.col(k).adjoint();
  }
  return out;
}

}  // namespace detail

/// Ordered list of distinct qubit indices naming a subsystem.
class QubitSet {
 public:
  QubitSet() = default;
  QubitSet(std::initializer_list<int> indices) : indices_(indices) { check_distinct(); }
  explicit QubitSet(std::vector<int> indices) : indices_(std::move(indices)) { check_distinct(); }

  /// Qubits first, first+1, ..., first+count-1.
  static QubitSet range(int first, int count) {
    std::vector<int> idx(static_cast<std::size_t>(std::max(count, 0)));
    for (int i = 0; i < count; ++i) idx[static_cast<std::size_t>(i)] = first + i;
    return QubitSet(std::move(idx));
  }

  std::size_t size() const { return indices_.size(); }
  bool empty() const { return indices_.empty(); }
  int operator[](std::size_t i) const { return indices_[i]; }
  auto begin() const { return indices_.begin(); }
  auto end() const { return indices_.end(); }
  const std::vector<int>& indices() const { return indices_; }

  bool contains(int q) const { return std::find(indices_.begin(), indices_.end(), q) != indices_.end(); }

  void validate(int num_qubits) const {
    for (int q : indices_)
      if (q < 0 || q >= num_qubits)
        throw std::invalid_argument("qubit index " + std::to_string(q) + " outside register of " +
                                    std::to_string(num_qubits) + " qubits");
  }

  /// Register qubits not in this set, ascending.
  QubitSet complement(int num_qubits) const {
    std::vector<int> rest;
    for (int q = 0; q < num_qubits; ++q)
      if (!contains(q)) rest.push_back(q);
    return QubitSet(std::move(rest));
  }

  /// Full-register index whose bits on this set spell `local` (MSB first).
  std::size_t scatter(std::size_t local, int num_qubits) const {
    const std::size_t m = indices_.size();
    std::size_t full = 0;
    for (std::size_t j = 0; j < m; ++j)
      if ((local >> (m - 1 - j)) & 1U) full |= detail::bit_mask(indices_[j], num_qubits);
    return full;
  }

  /// Inverse of scatter: the local index read off this set's bits.
  std::size_t gather(std::size_t full, int num_qubits) const {
    std::size_t local = 0;
    for (int q : indices_) local = (local << 1) | ((full & detail::bit_mask(q, num_qubits)) ? 1U : 0U);
    return local;
  }

  friend bool operator==(const QubitSet&, const QubitSet&) = default;

 private:
  void check_distinct() const {
    auto sorted = indices_;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw std::invalid_argument("QubitSet contains duplicate indices");
  }

  std::vector<int> indices_;
};

/// Normalized amplitude vector over n qubits.
class PureState {
 public:
  explicit PureState(CVector amplitudes) : amps_(std::move(amplitudes)) {
    num_qubits_ = detail::log2_exact(static_cast<std::size_t>(amps_.size()));
    if (num_qubits_ < 1) throw std::invalid_argument("amplitude count must be a power of two >= 2");
    if (num_qubits_ > kMaxPureQubits) throw std::invalid_argument("pure state exceeds 20-qubit cap");
    if (std::abs(amps_.squaredNorm() - 1.0) > kNormTolerance)
      throw invariant_violation("pure state is not normalized (|psi|^2 = " +
                                std::to_string(amps_.squaredNorm()) + ")");
  }

  /// Rescales a nonzero vector to unit norm.
  static PureState normalized(const CVector& v) {
    const double nrm = v.norm();
    if (nrm < 1e-300) throw std::invalid_argument("cannot normalize the zero vector");
    return PureState(v / nrm);
  }

  static PureState basis(int num_qubits, std::size_t index) {
    if (num_qubits < 1 || num_qubits > kMaxPureQubits) throw std::invalid_argument("invalid qubit count");
    CVector v = CVector::Zero(Eigen::Index{1} << num_qubits);
    if (index >= static_cast<std::size_t>(v.size())) throw std::invalid_argument("basis index out of range");
    v(static_cast<Eigen::Index>(index)) = 1.0;
    return PureState(std::move(v));
  }

  static PureState zeros(int num_qubits) { return basis(num_qubits, 0); }

  /// a|0> + b|1>, normalized.
  static PureState qubit(cplx a, cplx b) {
    CVector v(2);
    v << a, b;
    return normalized(v);
  }

  static PureState plus() { return qubit(1.0, 1.0); }
  static PureState minus() { return qubit(1.0, -1.0); }

  int num_qubits() const { return num_qubits_; }
  std::size_t dim() const { return static_cast<std::size_t>(amps_.size()); }
  const CVector& amplitudes() const { return amps_; }
  cplx operator[](std::size_t i) const { return amps_(static_cast<Eigen::Index>(i)); }

 private:
  CVector amps_;
  int num_qubits_ = 0;
};

/// Hermitian, unit-trace, positive operator over n qubits.
class DensityMatrix {
 public:
  /// Full validation, including the positivity check by diagonalization.
  explicit DensityMatrix(CMatrix elements) : rho_(std::move(elements)) {
    init_shape();
    if (detail::hermiticity_defect(rho_) > kNormTolerance)
      throw invariant_violation("density matrix is not Hermitian");
    if (std::abs(rho_.trace().real() - 1.0) > kNormTolerance)
      throw invariant_violation("density matrix trace is not 1");
    if (detail::hermitian_eigenvalues(rho_).minCoeff() < -kPositivityTolerance)
      throw invariant_violation("density matrix has a negative eigenvalue");
  }

  /// For operations that preserve the invariants by construction; only the
  /// shape is checked and the matrix is re-symmetrized.
  DensityMatrix(CMatrix elements, detail::unchecked_t) : rho_(std::move(elements)) {
    init_shape();
    rho_ = 0.5 * (rho_ + rho_.adjoint()).eval();
  }

  static DensityMatrix from_pure(const PureState& psi) {
    if (psi.num_qubits() > kMaxDensityQubits) throw std::invalid_argument("density matrix exceeds 12-qubit cap");
    return DensityMatrix(psi.amplitudes() * psi.amplitudes().adjoint(), detail::unchecked);
  }

  static DensityMatrix maximally_mixed(int num_qubits) {
    const auto d = Eigen::Index{1} << num_qubits;
    return DensityMatrix(CMatrix::Identity(d, d) / static_cast<double>(d), detail::unchecked);
  }

  /// diag(p), validated.
  static DensityMatrix diagonal(std::span<const double> p) {
    CMatrix m = CMatrix::Zero(static_cast<Eigen::Index>(p.size()), static_cast<Eigen::Index>(p.size()));
    for (std::size_t i = 0; i < p.size(); ++i) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = p[i];
    return DensityMatrix(std::move(m));
  }
  static DensityMatrix diagonal(std::initializer_list<double> p) {
    return diagonal(std::span<const double>(p.begin(), p.size()));
  }

  int num_qubits() const { return num_qubits_; }
  std::size_t dim() const { return static_cast<std::size_t>(rho_.rows()); }
  const CMatrix& matrix() const { return rho_; }
  cplx operator()(std::size_t i, std::size_t j) const {
    return rho_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }

 private:
  void init_shape() {
    if (rho_.rows() != rho_.cols()) throw std::invalid_argument("density matrix must be square");
    num_qubits_ = detail::log2_exact(static_cast<std::size_t>(rho_.rows()));
    if (num_qubits_ < 1) throw std::invalid_argument("density matrix dimension must be a power of two >= 2");
    if (num_qubits_ > kMaxDensityQubits) throw std::invalid_argument("density matrix exceeds 12-qubit cap");
  }

  CMatrix rho_;
  int num_qubits_ = 0;
};

/// Orthogonal projector (Hermitian and idempotent).
class Projector {
 public:
  explicit Projector(CMatrix elements) : p_(std::move(elements)) {
    if (p_.rows() != p_.cols()) throw std::invalid_argument("projector must be square");
    num_qubits_ = detail::log2_exact(static_cast<std::size_t>(p_.rows()));
    if (num_qubits_ < 0) throw std::invalid_argument("projector dimension must be a power of two");
    if (detail::hermiticity_defect(p_) > kNormTolerance) throw invariant_violation("projector is not Hermitian");
    if (detail::max_abs(p_ * p_ - p_) > kNormTolerance) throw invariant_violation("projector is not idempotent");
    rank_ = static_cast<int>(std::lround(p_.trace().real()));
  }

  /// Projector onto the span of the given vectors (rank threshold 1e-10).
  static Projector onto(std::span<const CVector> vectors) {
    if (vectors.empty()) throw std::invalid_argument("span of no vectors");
    const auto d = vectors.front().size();
    CMatrix gram = CMatrix::Zero(d, d);
    for (const auto& v : vectors) {
      if (v.size() != d) throw std::invalid_argument("span vectors differ in dimension");
      gram += v * v.adjoint();
    }
    return Projector(detail::spectral_projector(gram, 1e-10, true));
  }
  static Projector onto(std::initializer_list<CVector> vectors) {
    return onto(std::span<const CVector>(vectors.begin(), vectors.size()));
  }
  static Projector onto(const PureState& psi) { return onto({psi.amplitudes()}); }

  static Projector basis_states(int num_qubits, std::span<const std::size_t> indices) {
    const auto d = Eigen::Index{1} << num_qubits;
    CMatrix m = CMatrix::Zero(d, d);
    for (auto i : indices) {
      if (static_cast<Eigen::Index>(i) >= d) throw std::invalid_argument("basis index out of range");
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = 1.0;
    }
    return Projector(std::move(m));
  }
  static Projector basis_states(int num_qubits, std::initializer_list<std::size_t> indices) {
    return basis_states(num_qubits, std::span<const std::size_t>(indices.begin(), indices.size()));
  }

  /// Projector onto qubit `qubit` reading `value` in the computational basis.
  static Projector qubit_value(int num_qubits, int qubit, int value) {
    if (qubit < 0 || qubit >= num_qubits) throw std::invalid_argument("qubit index out of range");
    const auto d = Eigen::Index{1} << num_qubits;
    const auto mask = detail::bit_mask(qubit, num_qubits);
    CMatrix m = CMatrix::Zero(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
      if (((static_cast<std::size_t>(i) & mask) != 0) == (value != 0)) m(i, i) = 1.0;
    return Projector(std::move(m));
  }

  static Projector identity(int num_qubits) {
    const auto d = Eigen::Index{1} << num_qubits;
    return Projector(CMatrix::Identity(d, d));
  }

  Projector complement() const {
    return Projector(CMatrix::Identity(p_.rows(), p_.cols()) - p_);
  }

  int num_qubits() const { return num_qubits_; }
  int rank() const { return rank_; }
  const CMatrix& matrix() const { return p_; }

 private:
  CMatrix p_;
  int num_qubits_ = 0;
  int rank_ = 0;
};

// ---------------------------------------------------------------------------
// Composition and reduction

/// a ⊗ b with a's qubits first.
inline PureState tensor_product(const PureState& a, const PureState& b) {
  return PureState(detail::kron(a.amplitudes(), b.amplitudes()));
}

inline DensityMatrix tensor_product(const DensityMatrix& a, const DensityMatrix& b) {
  return DensityMatrix(detail::kron(a.matrix(), b.matrix()), detail::unchecked);
}

/// Reduced state on `keep`; the result's qubit order follows `keep`.
inline DensityMatrix partial_trace(const DensityMatrix& rho, const QubitSet& keep) {
  const int n = rho.num_qubits();
  if (keep.empty()) throw std::invalid_argument("partial_trace: keep-set is empty");
  keep.validate(n);
  const QubitSet traced = keep.complement(n);
  const std::size_t dk = std::size_t{1} << keep.size();
  const std::size_t dt = std::size_t{1} << traced.size();

  std::vector<std::size_t> kpart(dk), tpart(dt);
  for (std::size_t a = 0; a < dk; ++a) kpart[a] = keep.scatter(a, n);
  for (std::size_t t = 0; t < dt; ++t) tpart[t] = traced.scatter(t, n);

  const CMatrix& m = rho.matrix();
  CMatrix out = CMatrix::Zero(static_cast<Eigen::Index>(dk), static_cast<Eigen::Index>(dk));
  for (std::size_t a = 0; a < dk; ++a)
    for (std::size_t b = 0; b < dk; ++b) {
      cplx acc = 0.0;
      for (std::size_t t = 0; t < dt; ++t)
        acc += m(static_cast<Eigen::Index>(kpart[a] | tpart[t]), static_cast<Eigen::Index>(kpart[b] | tpart[t]));
      out(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = acc;
    }
  return DensityMatrix(std::move(out), detail::unchecked);
}

/// Reduced state of a pure register, without forming the full density matrix.
inline DensityMatrix partial_trace(const PureState& psi, const QubitSet& keep) {
  const int n = psi.num_qubits();
  if (keep.empty()) throw std::invalid_argument("partial_trace: keep-set is empty");
  keep.validate(n);
  if (static_cast<int>(keep.size()) > kMaxDensityQubits) throw std::invalid_argument("reduced state exceeds 12-qubit cap");
  const QubitSet traced = keep.complement(n);
  const std::size_t dk = std::size_t{1} << keep.size();
  const std::size_t dt = std::size_t{1} << traced.size();

  // Reshape into a dk x dt amplitude matrix A so that rho = A A^dagger.
  CMatrix amp(static_cast<Eigen::Index>(dk), static_cast<Eigen::Index>(dt));
  for (std::size_t t = 0; t < dt; ++t) {
    const std::size_t tp = traced.scatter(t, n);
    for (std::size_t a = 0; a < dk; ++a)
      amp(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(t)) = psi[keep.scatter(a, n) | tp];
  }
  return DensityMatrix(amp * amp.adjoint(), detail::unchecked);
}

// ---------------------------------------------------------------------------
// Spectral quantities

/// Eigenvalues with the [-1e-8, 0) band clipped to zero.
inline Eigen::VectorXd density_eigenvalues(const DensityMatrix& rho) {
  Eigen::VectorXd ev = detail::hermitian_eigenvalues(rho.matrix());
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) < -kPositivityTolerance) throw invariant_violation("negative eigenvalue in density matrix");
    if (ev(i) < 0.0) ev(i) = 0.0;
  }
  return ev;
}

/// Shannon entropy in bits of a probability list; entries below 1e-12 contribute 0.
inline double shannon_entropy_bits(std::span<const double> p) {
  double h = 0.0;
  for (double x : p)
    if (x > kEigenZero) h -= x * std::log2(x);
  return h;
}

/// -Tr rho log2 rho, in bits.
inline double von_neumann_entropy(const DensityMatrix& rho) {
  const Eigen::VectorXd ev = density_eigenvalues(rho);
  const double h = shannon_entropy_bits(std::span<const double>(ev.data(), static_cast<std::size_t>(ev.size())));
  return std::clamp(h, 0.0, static_cast<double>(rho.num_qubits()));
}

/// Tr rho^2.
inline double purity(const DensityMatrix& rho) {
  // For Hermitian rho, Tr rho^2 = sum |rho_ij|^2.
  return rho.matrix().squaredNorm();
}

/// 1 - Tr rho^2.
inline double linear_entropy(const DensityMatrix& rho) { return 1.0 - purity(rho); }

/// Tr(rho P), clipped into [0, 1].
inline double born_probability(const DensityMatrix& rho, const Projector& p) {
  if (rho.dim() != static_cast<std::size_t>(p.matrix().rows()))
    throw std::invalid_argument("born_probability: dimension mismatch");
  const double v = (rho.matrix().cwiseProduct(p.matrix().transpose())).sum().real();
  return std::clamp(v, 0.0, 1.0);
}

inline double born_probability(const PureState& psi, const Projector& p) {
  if (psi.dim() != static_cast<std::size_t>(p.matrix().rows()))
    throw std::invalid_argument("born_probability: dimension mismatch");
  const double v = psi.amplitudes().dot(p.matrix() * psi.amplitudes()).real();
  return std::clamp(v, 0.0, 1.0);
}

/// U rho U^dagger.
inline DensityMatrix conjugate(const DensityMatrix& rho, const CMatrix& unitary) {
  if (unitary.rows() != static_cast<Eigen::Index>(rho.dim()) || unitary.cols() != unitary.rows())
    throw std::invalid_argument("conjugate: dimension mismatch");
  return DensityMatrix(unitary * rho.matrix() * unitary.adjoint(), detail::unchecked);
}

inline bool is_unitary(const CMatrix& u, double tol = kNormTolerance) {
  if (u.rows() != u.cols()) return false;
  return detail::max_abs(u.adjoint() * u - CMatrix::Identity(u.rows(), u.cols())) <= tol;
}

/// Single-qubit constants.
namespace pauli {
inline CMatrix identity() { return CMatrix::Identity(2, 2); }
inline CMatrix x() {
  CMatrix m(2, 2);
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}
inline CMatrix y() {
  CMatrix m(2, 2);
  m << 0.0, cplx(0.0, -1.0), cplx(0.0, 1.0), 0.0;
  return m;
}
inline CMatrix z() {
  CMatrix m(2, 2);
  m << 1.0, 0.0, 0.0, -1.0;
  return m;
}
inline CMatrix hadamard() {
  CMatrix m(2, 2);
  const double s = 1.0 / std::sqrt(2.0);
  m << s, s, s, -s;
  return m;
}
}  // namespace pauli

/// H ⊗ H ⊗ ... on n qubits.
inline CMatrix hadamard_transform(int num_qubits) {
  CMatrix out = CMatrix::Identity(1, 1);
  for (int i = 0; i < num_qubits; ++i) out = detail::kron(out, pauli::hadamard());
  return out;
}

}  // namespace einsel

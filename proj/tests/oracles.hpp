// Independent reference implementations and random generators for tests.
// Nothing here calls into the library's numerical kernels.
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <cstdint>
#include <random>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

inline Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline Mat pauli(char c) {
  Mat m(2, 2);
  switch (c) {
    case 'X': m << 0, 1, 1, 0; break;
    case 'Y': m << 0, cplx(0, -1), cplx(0, 1), 0; break;
    case 'Z': m << 1, 0, 0, -1; break;
    default: m = Mat::Identity(2, 2);
  }
  return m;
}

/// Tensor product of single-qubit Paulis, leftmost = qubit 0.
inline Mat pauli_string(const std::string& s) {
  Mat out = Mat::Identity(1, 1);
  for (char c : s) out = kron(out, pauli(c));
  return out;
}

/// Bit of qubit q (qubit 0 most significant) in basis index i of an n-qubit register.
inline int bit(std::size_t i, int q, int n) { return static_cast<int>((i >> (n - 1 - q)) & 1U); }

/// Partial trace by explicit double loop over basis indices.
inline Mat partial_trace(const Mat& rho, int n, const std::vector<int>& keep) {
  const int nk = static_cast<int>(keep.size());
  Mat out = Mat::Zero(1 << nk, 1 << nk);
  const std::size_t d = std::size_t{1} << n;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      bool traced_equal = true;
      for (int q = 0; q < n && traced_equal; ++q) {
        if (std::find(keep.begin(), keep.end(), q) != keep.end()) continue;
        traced_equal = bit(i, q, n) == bit(j, q, n);
      }
      if (!traced_equal) continue;
      std::size_t a = 0, b = 0;
      for (int q : keep) {
        a = (a << 1) | static_cast<std::size_t>(bit(i, q, n));
        b = (b << 1) | static_cast<std::size_t>(bit(j, q, n));
      }
      out(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) += rho(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
  return out;
}

/// Full 2^n x 2^n matrix of a CNOT, built from its action on basis states.
inline Mat cnot(int control, int target, int n) {
  const std::size_t d = std::size_t{1} << n;
  Mat u = Mat::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < d; ++i) {
    std::size_t j = i;
    if (bit(i, control, n)) j ^= std::size_t{1} << (n - 1 - target);
    u(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = 1.0;
  }
  return u;
}

/// Single-qubit gate on qubit q of n, as identity tensor products.
inline Mat on_qubit(const Mat& g, int q, int n) {
  Mat out = Mat::Identity(1, 1);
  for (int k = 0; k < n; ++k) out = kron(out, k == q ? g : Mat(Mat::Identity(2, 2)));
  return out;
}

inline Mat hadamard() {
  Mat h(2, 2);
  h << 1, 1, 1, -1;
  return h / std::sqrt(2.0);
}

inline double entropy_bits(const Mat& rho) {
  Eigen::SelfAdjointEigenSolver<Mat> es(rho);
  double h = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double p = es.eigenvalues()(i);
    if (p > 1e-15) h -= p * std::log2(p);
  }
  return h;
}

struct Gen {
  std::mt19937_64 eng;
  explicit Gen(std::uint64_t seed) : eng(seed) {}

  double normal() { return std::normal_distribution<double>()(eng); }
  double uniform(double lo = 0.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(eng); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng); }

  Vec state(int n) {
    Vec v(1 << n);
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = cplx(normal(), normal());
    return v / v.norm();
  }

  Mat unitary(int n) {
    Mat a(1 << n, 1 << n);
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = cplx(normal(), normal());
    Eigen::HouseholderQR<Mat> qr(a);
    return qr.householderQ();
  }

  /// Random mixed state of rank up to 2^n.
  Mat density(int n, int rank = -1) {
    const int d = 1 << n;
    const int r = rank < 0 ? d : rank;
    Mat g(d, r);
    for (Eigen::Index i = 0; i < g.rows(); ++i)
      for (Eigen::Index j = 0; j < g.cols(); ++j) g(i, j) = cplx(normal(), normal());
    Mat rho = g * g.adjoint();
    return rho / rho.trace().real();
  }
};

}  // namespace oracle

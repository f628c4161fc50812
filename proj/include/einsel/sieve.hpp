/**
 * @file sieve.hpp
 * @brief Entropy production under open-system dynamics, predictability
 * horizons, and the predictability sieve over candidate initial states.
 */
#pragma once

#include "einsel/decoherence.hpp"
#include "einsel/linalg.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <vector>

namespace einsel {

/// Dephasing plus an optional self-Hamiltonian, sampled on a time grid.
struct DynamicsSpec {
  DephasingChannel channel;
  std::optional<CMatrix> self_hamiltonian;
  std::vector<double> time_grid;
  double horizon_cap;

  DynamicsSpec(DephasingChannel ch, std::optional<CMatrix> hamiltonian, std::vector<double> grid, double cap)
      : channel(std::move(ch)), self_hamiltonian(std::move(hamiltonian)), time_grid(std::move(grid)), horizon_cap(cap) {
    if (time_grid.size() < 2) throw std::invalid_argument("time grid needs at least two points");
    if (time_grid.front() != 0.0) throw std::invalid_argument("time grid must start at 0");
    for (std::size_t i = 1; i < time_grid.size(); ++i)
      if (!(time_grid[i] > time_grid[i - 1])) throw std::invalid_argument("time grid must be strictly increasing");
    if (!(horizon_cap > 0.0) || horizon_cap < time_grid.back())
      throw std::invalid_argument("horizon cap must cover the time grid");
    if (self_hamiltonian) {
      if (self_hamiltonian->rows() != channel.basis().rows() || self_hamiltonian->cols() != self_hamiltonian->rows())
        throw std::invalid_argument("self-Hamiltonian dimension does not match the channel");
      if (detail::hermiticity_defect(*self_hamiltonian) > kNormTolerance)
        throw std::invalid_argument("self-Hamiltonian is not Hermitian");
    }
  }

  /// Grid 0, dt, 2dt, ..., cap. Defaults: cap = 50 t_D, dt = t_D / 100.
  static DynamicsSpec uniform(DephasingChannel ch, std::optional<double> dt = std::nullopt,
                              std::optional<double> cap = std::nullopt, std::optional<CMatrix> hamiltonian = std::nullopt) {
    const double t_d = ch.decoherence_time();
    const double step = dt.value_or(t_d / 100.0);
    const double t_max = cap.value_or(50.0 * t_d);
    if (!(step > 0.0) || !(t_max > 0.0)) throw std::invalid_argument("grid step and cap must be positive");
    const auto steps = static_cast<std::size_t>(std::llround(t_max / step));
    if (steps < 1) throw std::invalid_argument("grid step exceeds the horizon cap");
    std::vector<double> grid(steps + 1);
    for (std::size_t i = 0; i <= steps; ++i) grid[i] = t_max * static_cast<double>(i) / static_cast<double>(steps);
    return {std::move(ch), std::move(hamiltonian), std::move(grid), t_max};
  }

  int num_qubits() const { return channel.num_qubits(); }
};

/// Entropy and purity sampled along a trajectory, with equilibrium values.
struct EntropyTrajectory {
  std::vector<double> times;
  std::vector<double> entropy;  ///< von Neumann, bits
  std::vector<double> purity;   ///< Tr rho^2
  double equilibrium_entropy = 0.0;
  double equilibrium_linear_entropy = 0.0;
  /// Reference for the purity horizon: the maximally mixed value 2^-n.
  double equilibrium_purity = 1.0;
  double horizon_cap = 0.0;
  int num_qubits = 1;

  std::size_t size() const { return times.size(); }
};

enum class EntropyMeasure { VonNeumann, Linear };

/// A horizon integral. `capped` marks non-convergence (value is then the cap
/// or the truncated integral); `cap_dominated` marks a non-negligible
/// integrand at the cap.
struct Horizon {
  double value = 0.0;
  bool capped = false;
  bool cap_dominated = false;
};

namespace detail {

inline CMatrix step_unitary(const CMatrix& h, double dt) {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(h);
  const auto& ev = solver.eigenvalues();
  CVector phases(ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i) phases(i) = std::exp(cplx(0.0, -ev(i) * dt));
  return solver.eigenvectors() * phases.asDiagonal() * solver.eigenvectors().adjoint();
}

inline double trapezoid(const std::vector<double>& t, const std::vector<double>& f) {
  double acc = 0.0;
  for (std::size_t i = 1; i < t.size(); ++i) acc += 0.5 * (f[i] + f[i - 1]) * (t[i] - t[i - 1]);
  return acc;
}

}  // namespace detail

/// Evolves rho0 along the grid. Without a self-Hamiltonian the dephased state
/// is evaluated in closed form at every grid time; otherwise each interval is
/// an exact unitary step followed by an exact dephasing step.
inline EntropyTrajectory evolve_entropy(const DensityMatrix& rho0, const DynamicsSpec& dyn) {
  if (rho0.num_qubits() != dyn.num_qubits()) throw std::invalid_argument("evolve_entropy: dimension mismatch");
  EntropyTrajectory traj;
  traj.times = dyn.time_grid;
  traj.horizon_cap = dyn.horizon_cap;
  traj.num_qubits = rho0.num_qubits();
  traj.entropy.reserve(traj.times.size());
  traj.purity.reserve(traj.times.size());
  traj.equilibrium_purity = 1.0 / static_cast<double>(rho0.dim());

  auto record = [&](const DensityMatrix& rho) {
    traj.entropy.push_back(von_neumann_entropy(rho));
    traj.purity.push_back(purity(rho));
  };

  if (!dyn.self_hamiltonian) {
    for (double t : traj.times) record(dephase(rho0, dyn.channel, t));
    const DensityMatrix eq = decohered_limit(rho0, dyn.channel);
    traj.equilibrium_entropy = von_neumann_entropy(eq);
    traj.equilibrium_linear_entropy = linear_entropy(eq);
    return traj;
  }

  std::map<double, CMatrix> unitaries;
  DensityMatrix rho = rho0;
  record(rho);
  for (std::size_t i = 1; i < traj.times.size(); ++i) {
    const double dt = traj.times[i] - traj.times[i - 1];
    auto it = unitaries.find(dt);
    if (it == unitaries.end()) it = unitaries.emplace(dt, detail::step_unitary(*dyn.self_hamiltonian, dt)).first;
    rho = dephase(conjugate(rho, it->second), dyn.channel, dt);
    record(rho);
  }
  traj.equilibrium_entropy = traj.entropy.back();
  traj.equilibrium_linear_entropy = 1.0 - traj.purity.back();
  return traj;
}

inline EntropyTrajectory evolve_entropy(const PureState& psi0, const DynamicsSpec& dyn) {
  return evolve_entropy(DensityMatrix::from_pure(psi0), dyn);
}

/// Integral of (H_EQ - H(t)) / (H_EQ - H(0)) over the grid. A degenerate
/// denominator or an integrand above 0.5 at the cap returns the cap flag.
inline Horizon predictability_horizon(const EntropyTrajectory& traj,
                                      EntropyMeasure measure = EntropyMeasure::VonNeumann) {
  std::vector<double> h(traj.size());
  double h_eq = traj.equilibrium_entropy;
  if (measure == EntropyMeasure::VonNeumann) {
    h = traj.entropy;
  } else {
    for (std::size_t i = 0; i < h.size(); ++i) h[i] = 1.0 - traj.purity[i];
    h_eq = traj.equilibrium_linear_entropy;
  }
  const double denom = h_eq - h.front();
  if (!(denom > 1e-9)) return {traj.horizon_cap, true, true};

  std::vector<double> f(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) f[i] = (h_eq - h[i]) / denom;
  Horizon out;
  out.value = detail::trapezoid(traj.times, f);
  out.cap_dominated = f.back() > 1e-3;
  if (f.back() > 0.5) {
    out.capped = true;
  }
  return out;
}

/// Integral of Tr rho_t^2 - Tr rho^2(inf) over the grid.
inline Horizon purity_horizon(const EntropyTrajectory& traj) {
  std::vector<double> f(traj.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = traj.purity[i] - traj.equilibrium_purity;
  Horizon out;
  out.value = detail::trapezoid(traj.times, f);
  out.cap_dominated = f.back() > 1e-3;
  return out;
}

struct SieveReport {
  std::size_t candidate = 0;  ///< index into the candidate list
  Horizon t_p;
  Horizon tprime_p;
  double final_entropy = 0.0;         ///< bits, at the last grid time
  double final_linear_entropy = 0.0;  ///< 1 - Tr rho^2 at the last grid time
  double max_entropy = 0.0;           ///< largest entropy seen on the grid
};

inline SieveReport sieve_evaluate(const PureState& psi, const DynamicsSpec& dyn, std::size_t index = 0) {
  const auto traj = evolve_entropy(psi, dyn);
  SieveReport r;
  r.candidate = index;
  r.t_p = predictability_horizon(traj);
  r.tprime_p = purity_horizon(traj);
  r.final_entropy = traj.entropy.back();
  r.final_linear_entropy = 1.0 - traj.purity.back();
  r.max_entropy = *std::max_element(traj.entropy.begin(), traj.entropy.end());
  return r;
}

/// Ranks candidates by descending t'_p, ties by ascending final entropy, then
/// by candidate index.
inline std::vector<SieveReport> sieve_rank(std::span<const PureState> candidates, const DynamicsSpec& dyn) {
  if (candidates.empty()) throw std::invalid_argument("sieve_rank: no candidates");
  std::vector<SieveReport> reports;
  reports.reserve(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) reports.push_back(sieve_evaluate(candidates[i], dyn, i));
  std::stable_sort(reports.begin(), reports.end(), [](const SieveReport& a, const SieveReport& b) {
    if (a.tprime_p.value != b.tprime_p.value) return a.tprime_p.value > b.tprime_p.value;
    return a.final_entropy < b.final_entropy;
  });
  return reports;
}

/// cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>. The poles are returned as
/// exact basis states, dropping the global phase at theta = pi.
inline PureState bloch_state(double theta, double phi) {
  CVector v(2);
  if (theta == 0.0)
    v << 1.0, 0.0;
  else if (theta == std::numbers::pi)
    v << 0.0, 1.0;
  else
    v << std::cos(theta / 2.0), std::polar(std::sin(theta / 2.0), phi);
  return PureState(std::move(v));
}

struct BlochPoint {
  double theta;
  double phi;
};

/// theta in [0, pi] inclusive, phi in [0, 2 pi) exclusive.
inline std::vector<BlochPoint> bloch_grid(double theta_step, double phi_step) {
  if (!(theta_step > 0.0) || !(phi_step > 0.0)) throw std::invalid_argument("bloch_grid: steps must be positive");
  const auto nt = static_cast<int>(std::llround(std::numbers::pi / theta_step));
  const auto np = static_cast<int>(std::llround(2.0 * std::numbers::pi / phi_step));
  std::vector<BlochPoint> pts;
  for (int i = 0; i <= nt; ++i)
    for (int j = 0; j < np; ++j)
      pts.push_back({i == nt ? std::numbers::pi : std::numbers::pi * i / nt, 2.0 * std::numbers::pi * j / np});
  return pts;
}

/// Product states with the same Bloch angles on every qubit.
inline PureState product_bloch_state(int num_qubits, double theta, double phi) {
  PureState s = bloch_state(theta, phi);
  for (int i = 1; i < num_qubits; ++i) s = tensor_product(s, bloch_state(theta, phi));
  return s;
}

/// Number of distinct rays (1/sqrt N) sum_k (-1)^{i_k} |k>, i_k in {0, 1},
/// counted by enumeration: sign patterns related by a global sign coincide.
inline std::size_t count_sign_superpositions(int n) {
  if (n < 1 || n > 20) throw std::invalid_argument("count_sign_superpositions: N out of range");
  std::size_t distinct = 0;
  const std::size_t all = std::size_t{1} << n;
  const std::size_t full = all - 1;
  for (std::size_t signs = 0; signs < all; ++signs)
    if (signs <= (signs ^ full)) ++distinct;  // canonical member of {s, ~s}
  return distinct;
}

}  // namespace einsel

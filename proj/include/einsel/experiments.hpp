/**
 * @file experiments.hpp
 * @brief Deterministic experiment runner: JSON config in, CSV or JSON artifact
 * out.
 *
 * Config file (one experiment per file):
 *
 *     { "experiment": "sieve", "seed": 7, "format": "csv", "output": "sieve.csv",
 *       "parameters": { "t_D": 1.0, "theta_step": 0.0872664626 } }
 *
 * Artifacts begin with '#' metadata lines (CSV) or metadata keys (JSON) that
 * echo the effective config and the build identifier. Wall-clock time is kept
 * out of the file so that equal configs give byte-identical artifacts.
 */
#pragma once

#include "einsel/circuits.hpp"
#include "einsel/decoherence.hpp"
#include "einsel/linalg.hpp"
#include "einsel/probability.hpp"
#include "einsel/records.hpp"
#include "einsel/redundancy.hpp"
#include "einsel/rng.hpp"
#include "einsel/sieve.hpp"

#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <optional>
#include <set>
#include <string>
#include <vector>

#ifndef EINSEL_VERSION
#define EINSEL_VERSION "dev"
#endif

namespace einsel::experiments {

using json = nlohmann::ordered_json;

inline std::string build_id() { return std::string("einsel ") + EINSEL_VERSION; }

/// Bad or missing configuration; the message names the offending field.
class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class OutputFormat { Csv, Json };

inline const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"premeasure", "redundancy", "sieve",
                                              "probability", "records", "observer-lists"};
  return names;
}

struct ExperimentConfig {
  std::string experiment;
  json parameters = json::object();
  std::optional<std::uint64_t> seed;
  std::string output;  ///< empty: standard output
  std::optional<OutputFormat> format;
  json source = json::object();  ///< the parsed input, key order preserved

  static ExperimentConfig from_json(const json& j) {
    if (!j.is_object()) throw config_error("config: top level must be a JSON object");
    static const std::set<std::string> known{"experiment", "parameters", "seed", "output", "format"};
    for (const auto& [key, value] : j.items())
      if (!known.contains(key)) throw config_error("config." + key + ": unknown field");
    ExperimentConfig c;
    c.source = j;
    if (!j.contains("experiment") || !j["experiment"].is_string())
      throw config_error("config.experiment: missing or not a string");
    c.experiment = j["experiment"].get<std::string>();
    if (j.contains("parameters")) {
      if (!j["parameters"].is_object()) throw config_error("config.parameters: must be an object");
      c.parameters = j["parameters"];
    }
    if (j.contains("seed")) {
      if (!j["seed"].is_number_unsigned()) throw config_error("config.seed: must be a non-negative integer");
      c.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("output")) {
      if (!j["output"].is_string()) throw config_error("config.output: must be a string");
      c.output = j["output"].get<std::string>();
    }
    if (j.contains("format")) {
      if (!j["format"].is_string()) throw config_error("config.format: must be \"csv\" or \"json\"");
      c.format = parse_format(j["format"].get<std::string>(), "config.format");
    }
    return c;
  }

  static ExperimentConfig parse(const std::string& text) {
    json j;
    try {
      j = json::parse(text);
    } catch (const json::parse_error& e) {
      throw config_error(std::string("config: invalid JSON: ") + e.what());
    }
    return from_json(j);
  }

  static OutputFormat parse_format(const std::string& s, const std::string& field) {
    if (s == "csv") return OutputFormat::Csv;
    if (s == "json") return OutputFormat::Json;
    throw config_error(field + ": must be \"csv\" or \"json\" (got \"" + s + "\")");
  }

  void override_seed(std::uint64_t s) {
    seed = s;
    source["seed"] = s;
  }

  void override_format(OutputFormat f) {
    format = f;
    source["format"] = f == OutputFormat::Csv ? "csv" : "json";
  }

  void override_output(const std::string& path) {
    output = path;
  }

  /// The parsed input with command-line overrides applied, as echoed into
  /// artifacts.
  const json& echo() const { return source; }
};

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<json>> rows;

  void add(std::vector<json> row) {
    if (row.size() != columns.size()) throw std::logic_error("table row width mismatch");
    rows.push_back(std::move(row));
  }
};

struct ResultArtifact {
  std::string experiment;
  json config_echo;
  std::string build;
  json details = json::object();
  Table table;
  OutputFormat format = OutputFormat::Csv;
  double wall_seconds = 0.0;  ///< reported on the console, never written to the artifact
};

// ---------------------------------------------------------------------------
// Parameter access with field-named diagnostics

class Params {
 public:
  Params(const json& p, std::set<std::string> allowed) : p_(p) {
    for (const auto& [key, value] : p_.items())
      if (!allowed.contains(key)) throw config_error(field(key) + ": unknown parameter");
  }

  bool has(const std::string& k) const { return p_.contains(k); }

  double number(const std::string& k, double def, double lo, double hi) const {
    if (!p_.contains(k)) return def;
    if (!p_[k].is_number()) throw config_error(field(k) + ": must be a number");
    const double v = p_[k].get<double>();
    if (!(v >= lo && v <= hi))
      throw config_error(field(k) + ": must be in [" + fmt(lo) + ", " + fmt(hi) + "] (got " + fmt(v) + ")");
    return v;
  }

  int integer(const std::string& k, int def, int lo, int hi) const {
    if (!p_.contains(k)) return def;
    if (!p_[k].is_number_integer()) throw config_error(field(k) + ": must be an integer");
    const auto v = p_[k].get<long long>();
    if (v < lo || v > hi)
      throw config_error(field(k) + ": must be an integer in [" + std::to_string(lo) + ", " + std::to_string(hi) +
                         "] (got " + std::to_string(v) + ")");
    return static_cast<int>(v);
  }

  std::string choice(const std::string& k, const std::string& def, const std::vector<std::string>& options) const {
    if (!p_.contains(k)) return def;
    if (!p_[k].is_string()) throw config_error(field(k) + ": must be a string");
    const auto v = p_[k].get<std::string>();
    if (std::find(options.begin(), options.end(), v) == options.end()) {
      std::string list;
      for (const auto& o : options) list += (list.empty() ? "" : ", ") + o;
      throw config_error(field(k) + ": must be one of {" + list + "} (got \"" + v + "\")");
    }
    return v;
  }

  std::vector<double> numbers(const std::string& k, std::vector<double> def) const {
    if (!p_.contains(k)) return def;
    if (!p_[k].is_array() || p_[k].empty()) throw config_error(field(k) + ": must be a nonempty array of numbers");
    std::vector<double> out;
    for (const auto& x : p_[k]) {
      if (!x.is_number()) throw config_error(field(k) + ": must be a nonempty array of numbers");
      out.push_back(x.get<double>());
    }
    return out;
  }

  const json& raw(const std::string& k) const { return p_[k]; }

  static std::string field(const std::string& k) { return "parameters." + k; }

 private:
  static std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
  }
  const json& p_;
};

/// A d x d complex matrix given row-major as [[[re, im], ...], ...].
inline CMatrix matrix_from_json(const json& b, Eigen::Index d, const std::string& where) {
  const std::string shape = std::to_string(d) + "x" + std::to_string(d);
  if (!b.is_array() || static_cast<Eigen::Index>(b.size()) != d)
    throw config_error(where + ": expected a " + shape + " matrix of [re, im] pairs");
  CMatrix u(d, d);
  for (Eigen::Index r = 0; r < d; ++r) {
    const json& row = b[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != d)
      throw config_error(where + "[" + std::to_string(r) + "]: row must hold " + std::to_string(d) + " entries");
    for (Eigen::Index c = 0; c < d; ++c) {
      const json& e = row[static_cast<std::size_t>(c)];
      if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
        throw config_error(where + "[" + std::to_string(r) + "][" + std::to_string(c) + "]: expected [re, im]");
      u(r, c) = cplx(e[0].get<double>(), e[1].get<double>());
    }
  }
  return u;
}

/// Channel from `{"basis": "computational" | "hadamard" | [[[re, im], ...], ...], "t_D": 1.0}`;
/// a matrix is row-major with pointer states as columns.
inline DephasingChannel channel_from_json(const json& j, int num_qubits, const std::string& where, double default_t_d = 1.0) {
  if (!j.is_object()) throw config_error(where + ": must be an object");
  for (const auto& [key, value] : j.items())
    if (key != "basis" && key != "t_D") throw config_error(where + "." + key + ": unknown field");
  double t_d = default_t_d;
  if (j.contains("t_D")) {
    if (!j["t_D"].is_number() || !(j["t_D"].get<double>() > 0.0))
      throw config_error(where + ".t_D: must be a positive number of seconds");
    t_d = j["t_D"].get<double>();
  }
  if (!j.contains("basis") || (j["basis"].is_string() && j["basis"] == "computational"))
    return DephasingChannel::computational(num_qubits, t_d);
  if (j["basis"].is_string() && j["basis"] == "hadamard") return DephasingChannel::hadamard(num_qubits, t_d);
  const CMatrix u = matrix_from_json(j["basis"], Eigen::Index{1} << num_qubits, where + ".basis");
  try {
    return DephasingChannel(u, t_d);
  } catch (const std::exception& e) {
    throw config_error(where + ".basis: " + e.what());
  }
}

namespace detail {

inline std::uint64_t require_seed(const ExperimentConfig& c) {
  if (!c.seed) throw config_error("config.seed: required by the '" + c.experiment + "' experiment (or pass --seed)");
  return *c.seed;
}

inline json vec(const std::vector<double>& v) { return json(v); }

inline const char* basis_name(RecordBasis b) { return b == RecordBasis::Pointer ? "pointer" : "conjugate"; }

inline json opt(std::optional<double> v) { return v ? json(*v) : json(nullptr); }

// ---------------------------------------------------------------------------

inline ResultArtifact premeasure(const ExperimentConfig& cfg) {
  Params p(cfg.parameters, {"trials", "n_env", "env_init"});
  const int trials = p.integer("trials", 100, 1, 100000);
  const int n_env = p.integer("n_env", 1, 1, 10);
  const std::string env_init = p.choice("env_init", "zero", {"zero", "plus"});
  SeededRng rng(require_seed(cfg));

  Circuit circuit = premeasurement(0, 1).widened(2 + n_env);
  circuit.append(decoherence_chain(1, QubitSet::range(2, n_env)));

  ResultArtifact a;
  a.details["circuit"] = to_text(circuit);
  a.details["env_init"] = env_init;
  a.table.columns = {"trial", "alpha_re", "alpha_im", "beta_re", "beta_im", "p00", "p11", "max_offdiag",
                     "max_diag_error"};
  const PureState env_qubit = env_init == "zero" ? PureState::zeros(1) : PureState::plus();
  for (int t = 0; t < trials; ++t) {
    const double theta = std::acos(1.0 - 2.0 * rng.uniform());
    const double phi = 2.0 * std::numbers::pi * rng.uniform();
    const cplx alpha = std::cos(theta / 2.0);
    const cplx beta = std::polar(std::sin(theta / 2.0), phi);
    const PureState out = apply(measurement_register(alpha, beta, n_env, env_qubit), circuit);
    const DensityMatrix sa = partial_trace(out, QubitSet{0, 1});
    double off = 0.0;
    for (std::size_t r = 0; r < 4; ++r)
      for (std::size_t c = 0; c < 4; ++c)
        if (r != c) off = std::max(off, std::abs(sa(r, c)));
    const double p00 = sa(0, 0).real(), p11 = sa(3, 3).real();
    const double diag_err = std::max({std::abs(p00 - std::norm(alpha)), std::abs(p11 - std::norm(beta)),
                                      std::abs(sa(1, 1)), std::abs(sa(2, 2))});
    if (env_init == "zero" && (off > 1e-12 || diag_err > 1e-12))
      throw invariant_violation("premeasure: reduced system-apparatus state is not pointer-diagonal");
    a.table.add({t, alpha.real(), alpha.imag(), beta.real(), beta.imag(), p00, p11, off, diag_err});
  }
  return a;
}

inline ResultArtifact redundancy(const ExperimentConfig& cfg) {
  Params p(cfg.parameters, {"N_min", "N_max"});
  const int n_min = p.integer("N_min", 3, 1, kMaxFlipSearchQubits);
  const int n_max = p.integer("N_max", 7, n_min, kMaxFlipSearchQubits);

  ResultArtifact a;
  a.table.columns = {"N", "basis", "k", "patterns", "success_rate", "d_pointer", "d_conjugate"};
  for (int n = n_min; n <= n_max; ++n) {
    const JointState j = ghz_branch_state(n);
    auto dist = [&](const PureState& x, const PureState& y) -> json {
      const auto d = redundancy_distance(environment_record(j, x), environment_record(j, y));
      return d.value ? json(*d.value) : json("inf");
    };
    const json d_pointer = dist(PureState::basis(1, 0), PureState::basis(1, 1));
    const json d_conjugate = dist(PureState::plus(), PureState::minus());
    for (RecordBasis b : {RecordBasis::Pointer, RecordBasis::Conjugate})
      for (int k = 0; k <= n; ++k) {
        const auto r = error_robustness(j, b, k);
        a.table.add({n, to_string(b), k, r.patterns, r.success_rate, d_pointer, d_conjugate});
      }
  }
  return a;
}

inline ResultArtifact sieve(const ExperimentConfig& cfg) {
  Params p(cfg.parameters, {"t_D", "channel", "hamiltonian", "theta_step", "phi_step", "dt", "T_max"});
  const double t_d_default = p.number("t_D", 1.0, 1e-9, 1e9);
  const DephasingChannel ch = p.has("channel")
                                  ? channel_from_json(p.raw("channel"), 1, Params::field("channel"), t_d_default)
                                  : DephasingChannel::computational(1, t_d_default);
  const double t_d = ch.decoherence_time();
  const double theta_step = p.number("theta_step", std::numbers::pi / 36.0, 1e-3, std::numbers::pi);
  const double phi_step = p.number("phi_step", std::numbers::pi / 18.0, 1e-3, 2.0 * std::numbers::pi);
  const double t_max = p.number("T_max", 50.0 * t_d, 1e-6 * t_d, 1e4 * t_d);
  const double dt = p.number("dt", t_d / 100.0, 1e-5 * t_d, t_max);
  if (t_max / dt > 2e6) throw config_error(Params::field("dt") + ": grid would exceed 2e6 points");

  std::optional<CMatrix> h;
  if (p.has("hamiltonian")) {
    h = matrix_from_json(p.raw("hamiltonian"), 2, Params::field("hamiltonian"));
    if (einsel::detail::hermiticity_defect(*h) > kNormTolerance)
      throw config_error(Params::field("hamiltonian") + ": must be Hermitian");
  }
  const auto dyn = DynamicsSpec::uniform(ch, dt, t_max, h);
  const auto grid = bloch_grid(theta_step, phi_step);
  std::vector<PureState> candidates;
  for (const auto& g : grid) candidates.push_back(bloch_state(g.theta, g.phi));
  const auto ranked = sieve_rank(candidates, dyn);

  ResultArtifact a;
  a.details["t_D"] = t_d;
  a.details["T_max"] = t_max;
  a.details["dt"] = dt;
  a.table.columns = {"theta", "phi", "t_p", "t_p_capped", "tprime_p", "final_entropy_bits"};
  for (const auto& r : ranked) {
    const auto& g = grid[r.candidate];
    a.table.add({g.theta, g.phi, r.t_p.value, r.t_p.capped ? 1 : 0, r.tprime_p.value, r.final_entropy});
  }
  return a;
}

inline ResultArtifact probability(const ExperimentConfig& cfg) {
  Params p(cfg.parameters, {"N", "p", "M", "M_start", "sum_rule_qubits"});
  const int n_uniform = p.integer("N", 4, 2, 1 << 10);
  if ((n_uniform & (n_uniform - 1)) != 0) throw config_error(Params::field("N") + ": must be a power of two");
  const auto target = p.numbers("p", {1.0 / 3.0, 2.0 / 3.0});
  const int m_max = p.integer("M", 1024, 1, 1 << 24);
  const int m_start = p.integer("M_start", 4, 1, m_max);
  const int sum_qubits = p.integer("sum_rule_qubits", 3, 1, 3);

  ResultArtifact a;
  a.table.columns = {"subexperiment", "inputs", "outputs", "violation"};

  // equal-magnitude superposition with seeded phases
  {
    const int nq = std::countr_zero(static_cast<unsigned>(n_uniform));
    SeededRng rng(require_seed(cfg));
    CVector v(n_uniform);
    std::vector<double> phases;
    for (int k = 0; k < n_uniform; ++k) {
      phases.push_back(2.0 * std::numbers::pi * rng.uniform());
      v(k) = std::polar(1.0 / std::sqrt(static_cast<double>(n_uniform)), phases.back());
    }
    const auto probs = uniform_outcome_probabilities(PureState(v), DephasingChannel::computational(nq, 1.0));
    double dev = 0.0;
    for (double x : probs) dev = std::max(dev, std::abs(x - 1.0 / n_uniform));
    a.table.add({"uniform", json{{"N", n_uniform}, {"phases", phases}}, vec(probs.values()), dev});
  }

  // relabelling an equal-weight superposition changes its statistics in a
  // basis other than the pointer basis
  {
    const double s3 = 1.0 / std::sqrt(3.0), s2 = 1.0 / std::sqrt(2.0);
    CVector psi(4);
    psi << s3, s3, -s3, 0.0;
    std::vector<CVector> meas(3, CVector::Zero(4));
    meas[0](0) = 1.0;
    meas[1](1) = s2;
    meas[1](2) = s2;
    meas[2](1) = s2;
    meas[2](2) = -s2;
    const std::vector<std::size_t> perm{2, 1, 0};
    const auto pr = permutation_distinguishability(PureState(psi), perm, meas);
    double diff = 0.0;
    for (std::size_t k = 0; k < 3; ++k) diff = std::max(diff, std::abs(pr.original[k] - pr.permuted[k]));
    a.table.add({"permutation",
                 json{{"state", "(|1>+|2>-|3>)/sqrt3"}, {"swap", "1<->3"}, {"measurement", "|1>, (|2>±|3>)/sqrt2"}},
                 json{{"original", pr.original.values()}, {"permuted", pr.permuted.values()}}, diff});
  }

  // coarse graining over a doubling sequence of M
  {
    std::vector<double> pv = target;
    ProbabilityVector pvec = [&] {
      try {
        return ProbabilityVector(pv);
      } catch (const std::exception& e) {
        throw config_error(Params::field("p") + ": " + e.what());
      }
    }();
    for (long long m = m_start; m <= m_max; m *= 2) {
      const auto cg = coarse_grain(pvec, static_cast<std::size_t>(m));
      const auto rec = reconstruct_reduced(cg);
      a.table.add({"coarse_grain",
                   json{{"p", pv}, {"M", m}},
                   json{{"n_k", cg.degeneracy}, {"reduced", rec.diagonal}, {"bound", 1.0 / static_cast<double>(m)},
                        {"dimension_deficit", cg.dimension_deficit}},
                   rec.deviation});
    }
  }

  // classical sum rule for every pair of pointer events on a decohered state
  {
    const int d = 1 << sum_qubits;
    SeededRng rng(require_seed(cfg) ^ 0x5bd1e995ULL);
    std::vector<double> w(static_cast<std::size_t>(d));
    double tot = 0.0;
    for (auto& x : w) tot += (x = rng.uniform() + 1e-3);
    for (auto& x : w) x /= tot;
    const DensityMatrix rho = DensityMatrix::diagonal(w);
    std::vector<Projector> events;
    for (std::size_t mask = 0; mask < (std::size_t{1} << d); ++mask) {
      std::vector<std::size_t> idx;
      for (int k = 0; k < d; ++k)
        if (mask >> k & 1U) idx.push_back(static_cast<std::size_t>(k));
      events.push_back(Projector::basis_states(sum_qubits, idx));
    }
    double worst = 0.0;
    for (const auto& b : events)
      for (const auto& c : events) worst = std::max(worst, sum_rule_violation(rho, b, c));
    a.table.add({"sum_rule_pointer", json{{"dimension", d}, {"pairs", events.size() * events.size()}}, json(nullptr),
                 worst});

    const Projector b = Projector::onto(PureState::basis(1, 0));
    const Projector c = Projector::onto(PureState::plus());
    a.table.add({"sum_rule_noncommuting", json{{"state", "|0>"}, {"b", "span|0>"}, {"c", "span|+>"}}, json(nullptr),
                 sum_rule_violation(PureState::basis(1, 0), b, c)});

    const auto prod = conditional_product_check(DensityMatrix::maximally_mixed(2), Projector::qubit_value(2, 0, 0),
                                                Projector::qubit_value(2, 1, 0), Projector::qubit_value(2, 0, 0));
    a.table.add({"product_rule", json{{"state", "1/4"}, {"a", "q0=0"}, {"b", "q1=0"}, {"c", "q0=0"}}, json(nullptr),
                 opt(prod)});
  }
  return a;
}

inline ResultArtifact records(const ExperimentConfig& cfg) {
  Params p(cfg.parameters, {"N", "N_max", "basis", "t_D", "flip_rate", "g_time", "length", "dt", "T_max"});
  const int n_max = p.integer("N_max", 10, 1, kMaxDensityQubits);
  const int n_only = p.integer("N", 0, 1, kMaxDensityQubits);
  const std::string basis = p.choice("basis", "both", {"pointer", "conjugate", "both"});
  const double t_d = p.number("t_D", 1.0, 1e-9, 1e9);
  const double gamma = p.number("flip_rate", 0.1 / t_d, 0.0, 1e9);
  const double g_time = p.number("g_time", t_d, 0.0, 1e12);
  const int length = p.integer("length", 1024, 16, 1 << 22);
  const double t_max = p.number("T_max", 50.0 * t_d, 1e-6 * t_d, 1e4 * t_d);
  const double dt = p.number("dt", t_d / 100.0, 1e-5 * t_d, t_max);
  const std::uint64_t seed = require_seed(cfg);

  ResultArtifact a;
  a.table.columns = {"experiment", "N", "basis", "branches", "g_t", "horizon", "compress_ratio"};
  const json none = nullptr;
  const MemoryModel model = MemoryModel::two_outcome(std::sqrt(0.36), std::sqrt(0.64));

  for (int n = n_only ? n_only : 1; n <= (n_only ? n_only : n_max); ++n)
    for (RecordBasis b : {RecordBasis::Pointer, RecordBasis::Conjugate}) {
      if (basis != "both" && basis != detail::basis_name(b)) continue;
      const auto br = branch_count(model, b, n, DephasingChannel::computational(n, t_d));
      a.table.add({"branch_count", n, basis_name(b), br, none, none, none});
    }

  // g(t) for the pointer record under dephasing, with and without flip mixing
  {
    const DephasingChannel ch = DephasingChannel::computational(1, t_d);
    const DensityMatrix rho = correlate(model);
    const Projector rec = embed_projector(model.record_support(0), QubitSet{1}, 2);
    const Projector prop = embed_projector(Projector::onto(model.system_states()[0]), QubitSet{0}, 2);
    const auto grid = DynamicsSpec::uniform(ch, dt, t_max).time_grid;
    double g_min = 1.0;
    for (double t : grid) g_min = std::min(g_min, conditional_g(evolve_system(rho, 1, ch, t), rec, prop).value_or(0.0));
    a.table.add({"g_pointer_dephasing_min", 1, "pointer", none, g_min, none, none});
    const auto g_flip = conditional_g(evolve_system(rho, 1, ch, g_time, gamma), rec, prop);
    a.table.add({"g_flip_mixing", 1, "pointer", none, opt(g_flip), none, none});
  }

  // per-outcome horizons: pointer outcome vs conjugate outcome
  {
    const auto dyn = DynamicsSpec::uniform(DephasingChannel::computational(1, t_d), dt, t_max);
    const MemoryModel mixed_exposure(ProbabilityVector({0.5, 0.5}), {PureState::basis(1, 0), PureState::plus()},
                                     std::vector<PureState>{PureState::basis(1, 0), PureState::basis(1, 1)});
    const Horizon hp = outcome_horizon(mixed_exposure, dyn, 0);
    const Horizon hc = outcome_horizon(mixed_exposure, dyn, 1);
    a.table.add({"horizon_pointer_outcome", 1, "pointer", none, none, hp.capped ? json("cap") : json(hp.value), none});
    a.table.add({"horizon_conjugate_outcome", 1, "conjugate", none, none, hc.capped ? json("cap") : json(hc.value), none});
  }

  const auto n = static_cast<std::size_t>(length);
  a.table.add({"compress_constant", length, none, none, none, none, compressibility_proxy(RecordSequence::constant(n))});
  a.table.add({"compress_random", length, none, none, none, none, compressibility_proxy(RecordSequence::random(n, seed))});
  a.table.add({"compress_alternating", length, none, none, none, none,
               compressibility_proxy(RecordSequence::alternating(n))});
  return a;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Observer lists

enum class ObserverAccess { Environment, Direct };

struct ObserverScenario {
  RecordBasis a_basis = RecordBasis::Pointer;
  RecordBasis b_basis = RecordBasis::Pointer;
  ObserverAccess b_access = ObserverAccess::Environment;
  int ensemble = 1000;
  int fragment = 2;  ///< environment qubits per decoherence episode
};

struct ListAgreement {
  double a_b = 0.0;       ///< L_A vs L_B
  double a_aprime = 0.0;  ///< L_A vs L_A'
  double b_aprime = 0.0;  ///< L_B vs L_A'
};

namespace detail {

/// Samples a projective measurement of one qubit in the given basis and
/// collapses the register.
inline int measure_qubit(CVector& v, int n, int qubit, RecordBasis basis, SeededRng& rng) {
  const Gate h = Gate::h(qubit);
  if (basis == RecordBasis::Conjugate) einsel::detail::apply_in_place(v, n, h);
  const std::size_t mask = einsel::detail::bit_mask(qubit, n);
  double p1 = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (static_cast<std::size_t>(i) & mask) p1 += std::norm(v(i));
  const int outcome = rng.uniform() < p1 ? 1 : 0;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (((static_cast<std::size_t>(i) & mask) != 0) != (outcome == 1)) v(i) = 0.0;
  v /= v.norm();
  if (basis == RecordBasis::Conjugate) einsel::detail::apply_in_place(v, n, h);
  return outcome;
}

}  // namespace detail

/// A prepares each member in a random eigenstate of its basis, the
/// environment decoheres it, B reads it (from the environment's record or
/// directly from the system), the environment decoheres it again, and A
/// remeasures in the original basis. Decoherence episodes are c-not chains
/// from the system onto fresh environment fragments.
inline ListAgreement simulate_observer_lists(const ObserverScenario& sc, std::uint64_t seed) {
  if (sc.ensemble < 1) throw std::invalid_argument("observer lists: empty ensemble");
  if (sc.fragment < 1 || 1 + 2 * sc.fragment > kMaxPureQubits) throw std::invalid_argument("observer lists: bad fragment size");
  const int n = 1 + 2 * sc.fragment;
  const Circuit first = decoherence_chain(0, QubitSet::range(1, sc.fragment)).widened(n);
  const Circuit second = decoherence_chain(0, QubitSet::range(1 + sc.fragment, sc.fragment)).widened(n);
  const int b_qubit = sc.b_access == ObserverAccess::Environment ? 1 : 0;

  SeededRng rng(seed);
  std::size_t ab = 0, aa = 0, ba = 0;
  for (int m = 0; m < sc.ensemble; ++m) {
    const int a = rng.bit();
    CVector v = CVector::Zero(Eigen::Index{1} << n);
    v(a ? static_cast<Eigen::Index>(einsel::detail::bit_mask(0, n)) : 0) = 1.0;
    if (sc.a_basis == RecordBasis::Conjugate) einsel::detail::apply_in_place(v, n, Gate::h(0));
    for (const auto& g : first.gates()) einsel::detail::apply_in_place(v, n, g);
    const int b = detail::measure_qubit(v, n, b_qubit, sc.b_basis, rng);
    for (const auto& g : second.gates()) einsel::detail::apply_in_place(v, n, g);
    const int a2 = detail::measure_qubit(v, n, 0, sc.a_basis, rng);
    ab += (a == b);
    aa += (a == a2);
    ba += (b == a2);
  }
  const double e = sc.ensemble;
  return {static_cast<double>(ab) / e, static_cast<double>(aa) / e, static_cast<double>(ba) / e};
}

inline ResultArtifact observer_lists(const ExperimentConfig& cfg) {
  Params p(cfg.parameters, {"a_basis", "b_basis", "b_access", "ensemble", "fragment"});
  const std::vector<std::string> bases{"pointer", "conjugate"};
  ObserverScenario base;
  base.ensemble = p.integer("ensemble", 1000, 1, 10000000);
  base.fragment = p.integer("fragment", 2, 1, 8);
  base.b_access = p.choice("b_access", "environment", {"environment", "direct"}) == "environment"
                      ? ObserverAccess::Environment
                      : ObserverAccess::Direct;
  const std::uint64_t seed = detail::require_seed(cfg);

  auto parse_basis = [](const std::string& s) { return s == "pointer" ? RecordBasis::Pointer : RecordBasis::Conjugate; };
  std::vector<RecordBasis> a_list{RecordBasis::Pointer, RecordBasis::Conjugate};
  std::vector<RecordBasis> b_list = a_list;
  if (p.has("a_basis")) a_list = {parse_basis(p.choice("a_basis", "pointer", bases))};
  if (p.has("b_basis")) b_list = {parse_basis(p.choice("b_basis", "pointer", bases))};

  ResultArtifact a;
  a.table.columns = {"a_basis", "b_basis", "b_access", "ensemble", "agree_A_B", "agree_A_Aprime", "agree_B_Aprime"};
  for (RecordBasis ab : a_list)
    for (RecordBasis bb : b_list) {
      ObserverScenario sc = base;
      sc.a_basis = ab;
      sc.b_basis = bb;
      const auto r = simulate_observer_lists(sc, seed);
      a.table.add({detail::basis_name(ab), detail::basis_name(bb),
                   sc.b_access == ObserverAccess::Environment ? "environment" : "direct", sc.ensemble, r.a_b,
                   r.a_aprime, r.b_aprime});
    }
  return a;
}

// ---------------------------------------------------------------------------

/// Runs the named experiment. Invariant violations propagate as
/// einsel::invariant_violation; bad configs as config_error.
inline ResultArtifact run(const ExperimentConfig& cfg) {
  static const std::map<std::string, std::function<ResultArtifact(const ExperimentConfig&)>> table{
      {"premeasure", detail::premeasure}, {"redundancy", detail::redundancy},
      {"sieve", detail::sieve},           {"probability", detail::probability},
      {"records", detail::records},       {"observer-lists", observer_lists}};
  auto it = table.find(cfg.experiment);
  if (it == table.end()) {
    std::string list;
    for (const auto& n : experiment_names()) list += (list.empty() ? "" : ", ") + n;
    throw config_error("config.experiment: unknown experiment '" + cfg.experiment + "'; choose one of: " + list);
  }
  const auto start = std::chrono::steady_clock::now();
  ResultArtifact a;
  try {
    a = it->second(cfg);
  } catch (const config_error&) {
    throw;
  } catch (const invariant_violation&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw config_error(std::string("parameters: ") + e.what());
  }
  a.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  a.experiment = cfg.experiment;
  a.config_echo = cfg.echo();
  a.build = build_id();
  a.format = cfg.format.value_or(cfg.experiment == "probability" ? OutputFormat::Json : OutputFormat::Csv);
  return a;
}

// ---------------------------------------------------------------------------
// Rendering

namespace detail {

inline std::string csv_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string csv_cell(const json& v) {
  if (v.is_null()) return "";
  if (v.is_boolean()) return v.get<bool>() ? "1" : "0";
  if (v.is_number_integer()) return v.dump();
  if (v.is_number_float()) return csv_number(v.get<double>());
  if (v.is_string()) return csv_quote(v.get<std::string>());
  return csv_quote(v.dump());
}

}  // namespace detail

/// The artifact's bytes.
inline std::string render(const ResultArtifact& a) {
  if (a.format == OutputFormat::Json) {
    json j;
    j["experiment"] = a.experiment;
    j["build"] = a.build;
    j["config"] = a.config_echo;
    j["details"] = a.details;
    j["columns"] = a.table.columns;
    json rows = json::array();
    for (const auto& r : a.table.rows) {
      json o = json::object();
      for (std::size_t c = 0; c < r.size(); ++c) o[a.table.columns[c]] = r[c];
      rows.push_back(std::move(o));
    }
    j["results"] = std::move(rows);
    return j.dump(2) + "\n";
  }
  std::string out;
  out += "# experiment: " + a.experiment + "\r\n";
  out += "# build: " + a.build + "\r\n";
  out += "# config: " + a.config_echo.dump() + "\r\n";
  for (const auto& [key, value] : a.details.items()) {
    if (value.is_string()) {
      std::istringstream lines(value.get<std::string>());
      std::string line;
      while (std::getline(lines, line)) out += "# " + key + ": " + line + "\r\n";
    } else {
      out += "# " + key + ": " + value.dump() + "\r\n";
    }
  }
  for (std::size_t c = 0; c < a.table.columns.size(); ++c)
    out += (c ? "," : "") + detail::csv_quote(a.table.columns[c]);
  out += "\r\n";
  for (const auto& r : a.table.rows) {
    for (std::size_t c = 0; c < r.size(); ++c) out += (c ? "," : "") + detail::csv_cell(r[c]);
    out += "\r\n";
  }
  return out;
}

/// Writes through a temporary sibling file and renames it into place.
inline void write_atomic(const std::filesystem::path& path, const std::string& bytes) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw std::runtime_error("write to " + tmp.string() + " failed");
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace einsel::experiments

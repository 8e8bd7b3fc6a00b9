#pragma once

// Command implementations behind the qdisc CLI. Each command takes a
// validated RunConfig and returns its textual output (CSV or JSON).

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qdisc/circuit.hpp"
#include "qdisc/collective.hpp"
#include "qdisc/errors.hpp"
#include "qdisc/fit.hpp"
#include "qdisc/locc.hpp"
#include "qdisc/noisy_sim.hpp"
#include "qdisc/parallel.hpp"
#include "qdisc/states.hpp"

namespace qdisc {

// Invalid user configuration; names the offending field.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::invalid_argument("invalid " + field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

struct QSweep {
  double start = 0.0;
  double stop = 1.0;
  int count = 101;
};

struct RunConfig {
  double alpha = std::numbers::pi / 4;
  double v = 0.1;
  double q = 0.5;
  std::optional<QSweep> q_sweep;
  std::vector<int> copies{2};
  int grid = kDefaultGridSize;
  std::int64_t shots = kDefaultShots;
  std::uint64_t seed = 1;
  int jobs = 1;
  NoiseModel noise;
  std::vector<double> scales = default_scales();
  int bootstrap = kDefaultBootstrapResamples;
  // fit
  double tol = 1e-8;
  int restarts = 20;
  std::string circuit_path;
  // multi-copy noise budget; negative means the per-M default
  int single_gates = -1;
  int cnot_gates = -1;
  // policy
  bool check = false;

  static std::vector<double> default_scales() {
    std::vector<double> s;
    for (int k = 0; k <= 20; ++k) s.push_back(0.1 * k);
    return s;
  }

  std::vector<double> q_points() const {
    if (!q_sweep) return {q};
    std::vector<double> pts;
    const auto& s = *q_sweep;
    for (int k = 0; k < s.count; ++k) {
      pts.push_back(k + 1 == s.count ? s.stop : s.start + (s.stop - s.start) * k / (s.count - 1));
    }
    return pts;
  }

  DiscriminationProblem problem(double q_value, int m) const { return {alpha, v, q_value, m}; }

  void validate() const {
    auto in_unit = [](double x) { return x >= 0.0 && x <= 1.0; };
    if (!std::isfinite(alpha) || alpha <= 0.0 || alpha > std::numbers::pi / 2) {
      throw ConfigError("alpha", "must lie in (0, pi/2], got " + std::to_string(alpha));
    }
    if (!in_unit(v)) throw ConfigError("v", "must lie in [0, 1], got " + std::to_string(v));
    if (!in_unit(q)) throw ConfigError("q", "must lie in [0, 1], got " + std::to_string(q));
    if (q_sweep) {
      if (!in_unit(q_sweep->start) || !in_unit(q_sweep->stop)) {
        throw ConfigError("q-sweep", "start and stop must lie in [0, 1]");
      }
      if (q_sweep->count < 2) throw ConfigError("q-sweep", "count must be >= 2");
    }
    if (copies.empty()) throw ConfigError("copies", "at least one copy count is required");
    for (int m : copies) {
      if (m < 1) throw ConfigError("copies", "must be >= 1, got " + std::to_string(m));
      if (m > kMaxCopies) {
        throw ConfigError("copies", "must be <= " + std::to_string(kMaxCopies) + ", got " +
                                        std::to_string(m));
      }
    }
    if (grid < 3) throw ConfigError("grid", "must be >= 3, got " + std::to_string(grid));
    if (shots < 1) throw ConfigError("shots", "must be >= 1");
    if (jobs < 1) throw ConfigError("jobs", "must be >= 1");
    if (bootstrap < 100) throw ConfigError("bootstrap", "must be >= 100");
    if (!(tol > 0.0 && tol < 1.0)) throw ConfigError("tol", "must lie in (0, 1)");
    if (restarts < 1) throw ConfigError("restarts", "must be >= 1");
    const std::pair<const char*, double> rates[] = {
        {"p1", noise.p1}, {"p2", noise.p2}, {"r0", noise.r0}, {"r1", noise.r1}};
    for (const auto& [name, rate] : rates) {
      if (!in_unit(rate)) throw ConfigError(name, "must lie in [0, 1]");
    }
    for (double s : scales) {
      if (!(s >= 0.0)) throw ConfigError("scales", "must be nonnegative");
      try {
        noise.scaled(s).validate();
      } catch (const DomainError& e) {
        throw ConfigError("scales", e.what());
      }
    }
  }
};

// CSV cells use 12 significant digits.
inline std::string csv_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

class CsvWriter {
 public:
  explicit CsvWriter(std::initializer_list<const char*> header) {
    bool first = true;
    for (const char* h : header) {
      os_ << (first ? "" : ",") << h;
      first = false;
    }
    os_ << '\n';
  }

  template <class... Cells>
  void row(const Cells&... cells) {
    bool first = true;
    ((os_ << (first ? "" : ",") << cell(cells), first = false), ...);
    os_ << '\n';
  }

  std::string str() const { return os_.str(); }

 private:
  static std::string cell(double x) { return csv_number(x); }
  static std::string cell(int x) { return std::to_string(x); }
  static std::string cell(std::int64_t x) { return std::to_string(x); }

  std::ostringstream os_;
};

inline std::string cmd_helstrom(const RunConfig& cfg) {
  cfg.validate();
  const auto qs = cfg.q_points();
  CsvWriter csv{"q", "M", "p_col"};
  for (int m : cfg.copies) {
    const auto values = parallel_map(qs.size(), cfg.jobs, [&](std::size_t i) {
      return helstrom_error(cfg.problem(qs[i], m));
    });
    for (std::size_t i = 0; i < qs.size(); ++i) csv.row(qs[i], m, values[i]);
  }
  return csv.str();
}

inline std::string cmd_locc(const RunConfig& cfg) {
  cfg.validate();
  const auto qs = cfg.q_points();
  CsvWriter csv{"q", "M", "p_locc"};
  for (int m : cfg.copies) {
    const auto table = dp_solve(cfg.problem(cfg.q, m), cfg.grid, cfg.jobs);
    const auto values =
        parallel_map(qs.size(), cfg.jobs, [&](std::size_t i) { return table.value(qs[i]); });
    for (std::size_t i = 0; i < qs.size(); ++i) csv.row(qs[i], m, values[i]);
  }
  return csv.str();
}

inline std::string cmd_gap(const RunConfig& cfg) {
  cfg.validate();
  const auto qs = cfg.q_points();
  CsvWriter csv{"q", "M", "p_locc", "p_col", "delta"};
  for (int m : cfg.copies) {
    const auto table = dp_solve(cfg.problem(cfg.q, m), cfg.grid, cfg.jobs);
    const auto rows = parallel_map(qs.size(), cfg.jobs, [&](std::size_t i) {
      return gap(table, cfg.problem(qs[i], m));
    });
    for (std::size_t i = 0; i < qs.size(); ++i) {
      csv.row(qs[i], m, rows[i].p_locc, rows[i].p_col, rows[i].delta);
    }
  }
  return csv.str();
}

struct FitOutput {
  std::string circuit_text;
  std::string report;  // JSON
  bool converged;
};

inline FitOptions fit_options(const RunConfig& cfg) {
  FitOptions opts;
  opts.tol = cfg.tol;
  opts.restarts = cfg.restarts;
  opts.seed = cfg.seed;
  return opts;
}

inline std::vector<std::string> decision_labels(const std::vector<Hypothesis>& decision) {
  std::vector<std::string> out;
  for (auto h : decision) out.emplace_back(to_string(h));
  return out;
}

// Fits the two-copy Helstrom measurement at (alpha, v, q).
inline FitOutput cmd_fit(const RunConfig& cfg) {
  cfg.validate();
  const auto problem = cfg.problem(cfg.q, 2);
  const auto fitted = fit_helstrom_circuit(problem, fit_options(cfg));
  const double noiseless =
      exact_error_probability(problem, fitted.circuit, fitted.decision, NoiseModel::noiseless());
  nlohmann::json report;
  report["alpha"] = cfg.alpha;
  report["v"] = cfg.v;
  report["q"] = cfg.q;
  report["copies"] = 2;
  report["seed"] = cfg.seed;
  report["fidelity"] = fitted.fit.fidelity;
  report["infidelity"] = 1.0 - fitted.fit.fidelity;
  report["converged"] = fitted.fit.converged;
  report["restarts_used"] = fitted.fit.restarts_used;
  report["params"] = fitted.fit.params;
  report["decision"] = decision_labels(fitted.decision);
  report["noiseless_error"] = noiseless;
  report["helstrom_error"] = helstrom_error(problem);
  report["circuit"] = to_text(fitted.circuit);
  return {to_text(fitted.circuit), report.dump(2) + "\n", fitted.fit.converged};
}

// Two copies: the fitted (or supplied) circuit swept over noise scales.
// Three or four copies: the direct Gamma-eigenbasis measurement with an
// effective gate budget, plus the Helstrom reference column.
inline std::string cmd_noise_sweep(const RunConfig& cfg,
                                   const std::optional<Circuit>& circuit = std::nullopt) {
  cfg.validate();
  const int m = cfg.copies.front();
  const auto problem = cfg.problem(cfg.q, m);
  if (m == 2) {
    Circuit c = circuit ? *circuit : fit_helstrom_circuit(problem, fit_options(cfg)).circuit;
    if (c.width() != 2) throw ConfigError("circuit", "two-copy sweep needs a 2-qubit circuit");
    const auto decision = measurement_unitary(helstrom_povm(problem).povm).decision;
    const auto points = parallel_map(cfg.scales.size(), cfg.jobs, [&](std::size_t k) {
      const auto noise = cfg.noise.scaled(cfg.scales[k]);
      const auto dists = circuit_distributions(problem, c, noise);
      return SweepPoint{cfg.scales[k], error_from_distributions(dists, decision, problem.q),
                        sample_error(dists, decision, problem.q, cfg.shots,
                                     derive_seed(cfg.seed, k), cfg.bootstrap)};
    });
    CsvWriter csv{"scale", "p_exact", "p_sampled", "stderr"};
    for (const auto& p : points) csv.row(p.scale, p.p_exact, p.estimate.p_err, p.estimate.std_error);
    return csv.str();
  }
  if (m != 3 && m != 4) throw ConfigError("copies", "noise-sweep supports M = 2, 3 or 4");
  auto gates = default_gate_count(m);
  if (cfg.single_gates >= 0) gates.single_qubit = cfg.single_gates;
  if (cfg.cnot_gates >= 0) gates.two_qubit = cfg.cnot_gates;
  const auto solution = helstrom_povm(problem);
  const auto basis = measurement_unitary(solution.povm);
  const auto points = parallel_map(cfg.scales.size(), cfg.jobs, [&](std::size_t k) {
    const auto noise = cfg.noise.scaled(cfg.scales[k]);
    const auto dists = multi_copy_distributions(problem, basis, noise, gates);
    return SweepPoint{cfg.scales[k], error_from_distributions(dists, basis.decision, problem.q),
                      sample_error(dists, basis.decision, problem.q, cfg.shots,
                                   derive_seed(cfg.seed, k), cfg.bootstrap)};
  });
  CsvWriter csv{"scale", "p_exact", "p_sampled", "stderr", "p_helstrom"};
  for (const auto& p : points) {
    csv.row(p.scale, p.p_exact, p.estimate.p_err, p.estimate.std_error, solution.error_probability);
  }
  return csv.str();
}

// Full policy table as JSON, optionally with a Monte-Carlo run of the policy.
inline std::string cmd_policy(const RunConfig& cfg) {
  cfg.validate();
  const int m = cfg.copies.front();
  const auto problem = cfg.problem(cfg.q, m);
  const auto table = dp_solve(problem, cfg.grid, cfg.jobs);
  nlohmann::json out;
  out["alpha"] = cfg.alpha;
  out["v"] = cfg.v;
  out["q"] = cfg.q;
  out["copies"] = m;
  out["grid_size"] = cfg.grid;
  std::vector<double> qs(static_cast<std::size_t>(cfg.grid));
  for (int i = 0; i < cfg.grid; ++i) qs[static_cast<std::size_t>(i)] = table.q_at(i);
  out["q_grid"] = qs;
  nlohmann::json stages = nlohmann::json::array();
  for (int s = 1; s <= m; ++s) {
    stages.push_back({{"stage", s}, {"angle", table.angle_row(s)}, {"risk", table.risk_row(s - 1)}});
  }
  out["stages"] = stages;
  out["terminal_risk"] = table.risk_row(m);
  out["p_locc"] = table.value(cfg.q);
  if (cfg.check) {
    const auto est = simulate_policy(table, problem, cfg.shots, cfg.seed, cfg.bootstrap);
    out["monte_carlo"] = {{"p_err", est.p_err},
                          {"stderr", est.std_error},
                          {"shots", est.shots},
                          {"seed", est.seed}};
  }
  return out.dump(2) + "\n";
}

}  // namespace qdisc

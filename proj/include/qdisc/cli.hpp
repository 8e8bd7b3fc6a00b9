#pragma once

// CLI front end: flag/config parsing (CLI11) and exit-code mapping.
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qdisc/commands.hpp"

namespace qdisc::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

inline const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"helstrom", "locc",        "gap",
                                              "fit",      "noise-sweep", "policy"};
  return names;
}

// Parsed invocation: the CLI11 app owns the option bindings into `config`.
struct Invocation {
  RunConfig config;
  std::vector<double> q_sweep;
  std::string out_path;
  std::unique_ptr<CLI::App> app;

  Invocation() : app(std::make_unique<CLI::App>("Two-state multi-copy discrimination bounds")) {
    config.jobs = default_jobs();
    auto& a = *app;
    a.option_defaults()->always_capture_default();
    a.set_config("--config", "", "TOML-style key = value file; flags override it");
    a.require_subcommand(1, 1);
    a.add_option("--alpha", config.alpha, "half-angle between the states (rad)");
    a.add_option("--v", config.v, "mixing parameter in [0, 1]");
    a.add_option("--q", config.q, "prior probability of rho_plus");
    a.add_option("--q-sweep", q_sweep, "q sweep: start stop count")->expected(3);
    a.add_option("--copies", config.copies, "copy count(s), comma separated")->delimiter(',');
    a.add_option("--grid", config.grid, "dynamic-programming grid size");
    a.add_option("--shots", config.shots, "shots per estimate");
    a.add_option("--seed", config.seed, "master random seed");
    a.add_option("--jobs", config.jobs, "worker threads");
    a.add_option("--out", out_path, "output file (default stdout)");
    a.add_option("--p1", config.noise.p1, "1-qubit gate depolarizing probability");
    a.add_option("--p2", config.noise.p2, "2-qubit gate depolarizing probability");
    a.add_option("--r0", config.noise.r0, "readout P(1|0)");
    a.add_option("--r1", config.noise.r1, "readout P(0|1)");
    a.add_option("--scales", config.scales, "noise scales, comma separated")->delimiter(',');
    a.add_option("--bootstrap", config.bootstrap, "bootstrap resamples");
    a.add_option("--tol", config.tol, "fit: required 1 - fidelity");
    a.add_option("--restarts", config.restarts, "fit: multi-start count");
    a.add_option("--circuit", config.circuit_path,
                 "fit: circuit output file; noise-sweep: circuit input file");
    a.add_option("--single-gates", config.single_gates, "M=3,4: 1-qubit depolarizing events");
    a.add_option("--cnot-gates", config.cnot_gates, "M=3,4: 2-qubit depolarizing events");
    a.add_flag("--check", config.check, "policy: add a Monte-Carlo check");
    for (const auto& name : command_names()) a.add_subcommand(name)->fallthrough();
  }

  std::string command() const { return app->get_subcommands().front()->get_name(); }

  void finalize() {
    if (!q_sweep.empty()) {
      const double count = q_sweep[2];
      if (count != std::floor(count)) throw ConfigError("q-sweep", "count must be an integer");
      config.q_sweep = QSweep{q_sweep[0], q_sweep[1], static_cast<int>(count)};
    }
    config.validate();
  }

  // Key = value rendering of every option, readable back through --config.
  std::string config_text() const { return app->config_to_str(true, false); }
};

inline void write_output(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("out", "cannot open " + path);
  f << text;
}

inline int dispatch(const Invocation& inv, std::ostream& out) {
  const auto& cfg = inv.config;
  const std::string cmd = inv.command();
  if (cmd == "helstrom") {
    write_output(inv.out_path, cmd_helstrom(cfg), out);
  } else if (cmd == "locc") {
    write_output(inv.out_path, cmd_locc(cfg), out);
  } else if (cmd == "gap") {
    write_output(inv.out_path, cmd_gap(cfg), out);
  } else if (cmd == "fit") {
    const auto result = cmd_fit(cfg);
    if (!cfg.circuit_path.empty()) write_output(cfg.circuit_path, result.circuit_text, out);
    write_output(inv.out_path, result.report, out);
    if (!result.converged) return kExitNumerical;
  } else if (cmd == "noise-sweep") {
    std::optional<Circuit> circuit;
    if (!cfg.circuit_path.empty()) {
      std::ifstream f(cfg.circuit_path);
      if (!f) throw ConfigError("circuit", "cannot open " + cfg.circuit_path);
      circuit = read_circuit(f);
    }
    write_output(inv.out_path, cmd_noise_sweep(cfg, circuit), out);
  } else if (cmd == "policy") {
    write_output(inv.out_path, cmd_policy(cfg), out);
  }
  return kExitOk;
}

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Invocation inv;
  try {
    inv.app->parse(argc, argv);
    inv.finalize();
    return dispatch(inv, out);
  } catch (const CLI::CallForHelp&) {
    out << inv.app->help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << " (residual " << e.residual() << ")\n";
    return kExitNumerical;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::logic_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
}

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"qdisc"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace qdisc::cli

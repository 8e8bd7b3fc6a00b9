#pragma once

// Density-matrix simulation of measurement circuits with depolarizing gate
// noise and per-qubit classical readout error.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "qdisc/circuit.hpp"
#include "qdisc/collective.hpp"
#include "qdisc/errors.hpp"
#include "qdisc/fit.hpp"
#include "qdisc/linalg.hpp"
#include "qdisc/sampling.hpp"
#include "qdisc/states.hpp"

namespace qdisc {

inline constexpr std::int64_t kDefaultShots = 200000;

struct NoiseModel {
  double p1 = 1e-3;  // 1-qubit gate depolarizing probability
  double p2 = 1e-2;  // 2-qubit gate depolarizing probability
  double r0 = 1e-2;  // P(read 1 | true 0)
  double r1 = 2e-2;  // P(read 0 | true 1)
  double scale = 1.0;

  static NoiseModel noiseless() { return NoiseModel{}.scaled(0.0); }

  NoiseModel scaled(double s) const {
    auto n = *this;
    n.scale = s;
    return n;
  }

  double eff_p1() const { return scale * p1; }
  double eff_p2() const { return scale * p2; }
  double eff_r0() const { return scale * r0; }
  double eff_r1() const { return scale * r1; }

  void validate() const {
    auto check = [](double base, double eff, const char* name) {
      if (!(base >= 0.0) || !(eff >= 0.0 && eff <= 1.0)) {
        throw DomainError(std::string("noise: scale * ") + name + " = " + std::to_string(eff) +
                          " outside [0, 1]");
      }
    };
    if (!(scale >= 0.0) || !std::isfinite(scale)) throw DomainError("noise: scale must be >= 0");
    check(p1, eff_p1(), "p1");
    check(p2, eff_p2(), "p2");
    check(r0, eff_r0(), "r0");
    check(r1, eff_r1(), "r1");
  }
};

using OutcomeDistribution = std::vector<double>;

inline int qubit_count(Eigen::Index dim) {
  int n = 0;
  while ((Eigen::Index{1} << n) < dim) ++n;
  if ((Eigen::Index{1} << n) != dim) throw DimensionError("state dimension is not a power of 2");
  return n;
}

namespace detail {

// (1 - p) rho + p (I/2^k) (x) tr_S(rho), written as the Pauli twirl
// (1 - p) rho + p/4^k sum_P P rho P over Pauli strings P on the qubit set S.
inline ComplexMatrix depolarize_raw(const ComplexMatrix& rho, std::span<const int> qubits, double p) {
  if (p == 0.0) return rho;
  const int width = qubit_count(rho.rows());
  const std::array<ComplexMatrix, 4> paulis{pauli::identity(), pauli::x(), pauli::y(), pauli::z()};
  ComplexMatrix twirl = ComplexMatrix::Zero(rho.rows(), rho.cols());
  const int k = static_cast<int>(qubits.size());
  const int strings = 1 << (2 * k);
  for (int s = 0; s < strings; ++s) {
    ComplexMatrix op = ComplexMatrix::Identity(rho.rows(), rho.cols());
    for (int j = 0; j < k; ++j) {
      const int which = (s >> (2 * j)) & 3;
      if (which != 0) op = embed_single(paulis[static_cast<std::size_t>(which)], qubits[j], width) * op;
    }
    twirl += op * rho * op.adjoint();
  }
  return (1.0 - p) * rho + (p / strings) * twirl;
}

inline void check_qubits(std::span<const int> qubits, int width) {
  if (qubits.empty() || qubits.size() > 2) throw DomainError("depolarize: acts on 1 or 2 qubits");
  for (int q : qubits) {
    if (q < 0 || q >= width) throw DomainError("depolarize: invalid qubit index " + std::to_string(q));
  }
  if (qubits.size() == 2 && qubits[0] == qubits[1]) throw DomainError("depolarize: repeated qubit");
}

inline ComplexMatrix conjugate(const ComplexMatrix& u, const ComplexMatrix& rho) {
  return u * rho * u.adjoint();
}

}  // namespace detail

inline DensityMatrix depolarize(const DensityMatrix& rho, std::span<const int> qubits, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("depolarize: p must lie in [0, 1]");
  detail::check_qubits(qubits, qubit_count(rho.dim()));
  return DensityMatrix(detail::depolarize_raw(rho.matrix(), qubits, p));
}

namespace detail {
inline ComplexMatrix apply_circuit_raw(const Circuit& c, ComplexMatrix rho, const NoiseModel& noise) {
  for (const auto& g : c.gates()) {
    rho = conjugate(embedded_unitary(g, c.width()), rho);
    if (g.two_qubit()) {
      rho = depolarize_raw(rho, std::span<const int>(g.qubits.data(), 2), noise.eff_p2());
    } else {
      rho = depolarize_raw(rho, std::span<const int>(g.qubits.data(), 1), noise.eff_p1());
    }
  }
  return rho;
}
}  // namespace detail

// Each gate: rho -> U rho U^dagger, then depolarize the gate's qubits.
inline DensityMatrix apply_circuit_noisy(const Circuit& c, const DensityMatrix& rho_in,
                                         const NoiseModel& noise) {
  noise.validate();
  if (qubit_count(rho_in.dim()) != c.width()) {
    throw DimensionError("apply_circuit_noisy: circuit width does not match state");
  }
  return DensityMatrix(detail::apply_circuit_raw(c, rho_in.matrix(), noise));
}

// Computational-basis probabilities followed by independent per-qubit
// asymmetric bit flips.
inline OutcomeDistribution readout_distribution(const ComplexMatrix& rho, const NoiseModel& noise) {
  noise.validate();
  const int width = qubit_count(rho.rows());
  OutcomeDistribution p(static_cast<std::size_t>(rho.rows()));
  for (Eigen::Index i = 0; i < rho.rows(); ++i) p[static_cast<std::size_t>(i)] = std::max(0.0, rho(i, i).real());
  const double r0 = noise.eff_r0();
  const double r1 = noise.eff_r1();
  if (r0 > 0.0 || r1 > 0.0) {
    for (int q = 0; q < width; ++q) {
      const std::size_t mask = std::size_t{1} << (width - 1 - q);
      for (std::size_t i = 0; i < p.size(); ++i) {
        if (i & mask) continue;
        const double zero = p[i];
        const double one = p[i | mask];
        p[i] = (1.0 - r0) * zero + r1 * one;
        p[i | mask] = r0 * zero + (1.0 - r1) * one;
      }
    }
  }
  const double total = std::accumulate(p.begin(), p.end(), 0.0);
  for (double& x : p) x /= total;
  return p;
}

inline OutcomeDistribution readout_distribution(const DensityMatrix& rho, const NoiseModel& noise) {
  return readout_distribution(rho.matrix(), noise);
}

// Outcome distributions under each hypothesis.
struct HypothesisDistributions {
  OutcomeDistribution plus;
  OutcomeDistribution minus;
};

inline double error_from_distributions(const HypothesisDistributions& d,
                                       std::span<const Hypothesis> decision, double q) {
  if (decision.size() != d.plus.size() || decision.size() != d.minus.size()) {
    throw DimensionError("decision map does not cover every outcome");
  }
  double miss_plus = 0.0;
  double miss_minus = 0.0;
  for (std::size_t i = 0; i < decision.size(); ++i) {
    if (decision[i] == Hypothesis::minus) {
      miss_plus += d.plus[i];
    } else {
      miss_minus += d.minus[i];
    }
  }
  return q * miss_plus + (1.0 - q) * miss_minus;
}

inline HypothesisDistributions circuit_distributions(const DiscriminationProblem& problem,
                                                     const Circuit& circuit,
                                                     const NoiseModel& noise) {
  problem.validate();
  noise.validate();
  if (circuit.width() != problem.copies) {
    throw DimensionError("circuit width must equal the copy count");
  }
  auto run = [&](Sign s) {
    const auto rho = tensor_power(make_state(problem, s), problem.copies);
    return readout_distribution(detail::apply_circuit_raw(circuit, rho.matrix(), noise), noise);
  };
  return {run(Sign::plus), run(Sign::minus)};
}

inline double exact_error_probability(const DiscriminationProblem& problem, const Circuit& circuit,
                                      std::span<const Hypothesis> decision,
                                      const NoiseModel& noise) {
  return error_from_distributions(circuit_distributions(problem, circuit, noise), decision,
                                  problem.q);
}

// Shot-level estimate: the true hypothesis is drawn by the prior for every
// shot, outcomes by the noisy distribution, and the error rate gets a
// bootstrap standard deviation.
inline ErrorEstimate sample_error(const HypothesisDistributions& d,
                                  std::span<const Hypothesis> decision, double q,
                                  std::int64_t shots, std::uint64_t seed,
                                  int resamples = kDefaultBootstrapResamples) {
  if (shots < 1) throw DomainError("estimate_error: shots must be >= 1");
  if (resamples < 100) throw DomainError("estimate_error: bootstrap_resamples must be >= 100");
  if (decision.size() != d.plus.size()) throw DimensionError("decision map size mismatch");
  Rng rng(seed);
  std::binomial_distribution<std::int64_t> prior(shots, q);
  const std::int64_t n_plus = prior(rng);
  const std::int64_t n_minus = shots - n_plus;
  std::int64_t errors = 0;
  if (n_plus > 0) {
    const auto counts = sample_counts(d.plus, n_plus, rng);
    for (std::size_t i = 0; i < counts.size(); ++i)
      if (decision[i] == Hypothesis::minus) errors += counts[i];
  }
  if (n_minus > 0) {
    const auto counts = sample_counts(d.minus, n_minus, rng);
    for (std::size_t i = 0; i < counts.size(); ++i)
      if (decision[i] == Hypothesis::plus) errors += counts[i];
  }
  ErrorEstimate out;
  out.shots = shots;
  out.seed = seed;
  out.p_err = static_cast<double>(errors) / static_cast<double>(shots);
  out.std_error = bootstrap_std(errors, shots, resamples, rng);
  return out;
}

inline ErrorEstimate estimate_error(const DiscriminationProblem& problem, const Circuit& circuit,
                                    std::span<const Hypothesis> decision, const NoiseModel& noise,
                                    std::int64_t shots, std::uint64_t seed,
                                    int resamples = kDefaultBootstrapResamples) {
  return sample_error(circuit_distributions(problem, circuit, noise), decision, problem.q, shots,
                      seed, resamples);
}

struct SweepPoint {
  double scale;
  double p_exact;
  ErrorEstimate estimate;
};

// One point per scale; point k samples with derive_seed(seed, k).
inline std::vector<SweepPoint> noise_sweep(const DiscriminationProblem& problem,
                                           const Circuit& circuit,
                                           std::span<const Hypothesis> decision,
                                           const NoiseModel& base, std::span<const double> scales,
                                           std::int64_t shots, std::uint64_t seed) {
  std::vector<SweepPoint> out;
  out.reserve(scales.size());
  for (std::size_t k = 0; k < scales.size(); ++k) {
    const NoiseModel noise = base.scaled(scales[k]);
    const auto dists = circuit_distributions(problem, circuit, noise);
    out.push_back({scales[k], error_from_distributions(dists, decision, problem.q),
                   sample_error(dists, decision, problem.q, shots, derive_seed(seed, k))});
  }
  return out;
}

// Stand-in noise budget for the uncompiled three- and four-copy measurements.
struct EffectiveGateCount {
  int single_qubit = 0;
  int two_qubit = 0;
};

inline EffectiveGateCount default_gate_count(int copies) {
  if (copies == 3) return {40, 20};
  if (copies == 4) return {200, 100};
  throw DomainError("default_gate_count: only M = 3 or 4");
}

// The Gamma-eigenbasis measurement as one global rotation, followed by the
// depolarizing events (1-qubit events cycle over qubits, 2-qubit events over
// neighbouring pairs) and readout error.
inline HypothesisDistributions multi_copy_distributions(const DiscriminationProblem& problem,
                                                        const MeasurementBasis& basis,
                                                        const NoiseModel& noise,
                                                        EffectiveGateCount gates) {
  problem.validate();
  noise.validate();
  if (problem.copies != 3 && problem.copies != 4) {
    throw DomainError("multi_copy_measurement_sim: M must be 3 or 4");
  }
  if (gates.single_qubit < 0 || gates.two_qubit < 0) {
    throw DomainError("multi_copy_measurement_sim: gate counts must be >= 0");
  }
  const int n = problem.copies;
  auto run = [&](Sign s) {
    const auto rho = tensor_power(make_state(problem, s), n);
    ComplexMatrix out = detail::conjugate(basis.unitary, rho.matrix());
    for (int k = 0; k < gates.single_qubit; ++k) {
      const int q = k % n;
      out = detail::depolarize_raw(out, std::span<const int>(&q, 1), noise.eff_p1());
    }
    for (int k = 0; k < gates.two_qubit; ++k) {
      const std::array<int, 2> pair{k % (n - 1), k % (n - 1) + 1};
      out = detail::depolarize_raw(out, pair, noise.eff_p2());
    }
    return readout_distribution(out, noise);
  };
  return {run(Sign::plus), run(Sign::minus)};
}

struct MultiCopyResult {
  double p_exact;
  double p_helstrom;
  ErrorEstimate estimate;
};

inline MultiCopyResult multi_copy_measurement_sim(const DiscriminationProblem& problem,
                                                  const NoiseModel& noise, std::int64_t shots,
                                                  std::uint64_t seed, EffectiveGateCount gates) {
  if (problem.copies != 3 && problem.copies != 4) {
    throw DomainError("multi_copy_measurement_sim: M must be 3 or 4");
  }
  const auto solution = helstrom_povm(problem);
  const auto basis = measurement_unitary(solution.povm);
  const auto dists = multi_copy_distributions(problem, basis, noise, gates);
  return {error_from_distributions(dists, basis.decision, problem.q), solution.error_probability,
          sample_error(dists, basis.decision, problem.q, shots, seed)};
}

inline MultiCopyResult multi_copy_measurement_sim(const DiscriminationProblem& problem,
                                                  const NoiseModel& noise, std::int64_t shots,
                                                  std::uint64_t seed) {
  return multi_copy_measurement_sim(problem, noise, shots, seed,
                                    default_gate_count(problem.copies));
}

}  // namespace qdisc

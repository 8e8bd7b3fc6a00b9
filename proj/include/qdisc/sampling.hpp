#pragma once

// Seeded shot sampling and bootstrap error bars.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "qdisc/errors.hpp"

namespace qdisc {

using Rng = std::mt19937_64;

inline constexpr int kDefaultBootstrapResamples = 1000;

struct ErrorEstimate {
  double p_err = 0.0;
  double std_error = 0.0;  // bootstrap standard deviation of p_err
  std::int64_t shots = 0;
  std::uint64_t seed = 0;

  friend bool operator==(const ErrorEstimate&, const ErrorEstimate&) = default;
};

// SplitMix64 finalizer; gives each (seed, task) pair its own stream so
// parallel sweeps reproduce regardless of scheduling.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t task) {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (task + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Multinomial draw via sequential conditional binomials.
inline std::vector<std::int64_t> sample_counts(std::span<const double> probs, std::int64_t shots,
                                               Rng& rng) {
  if (shots < 1) throw DomainError("sample_shots: shots must be >= 1");
  std::vector<std::int64_t> counts(probs.size(), 0);
  double remaining_mass = 1.0;
  std::int64_t remaining = shots;
  for (std::size_t i = 0; i + 1 < probs.size() && remaining > 0; ++i) {
    const double p = remaining_mass > 0.0 ? std::clamp(probs[i] / remaining_mass, 0.0, 1.0) : 0.0;
    std::binomial_distribution<std::int64_t> draw(remaining, p);
    counts[i] = draw(rng);
    remaining -= counts[i];
    remaining_mass -= probs[i];
  }
  if (!probs.empty()) counts.back() += remaining;
  return counts;
}

inline std::vector<std::int64_t> sample_shots(std::span<const double> probs, std::int64_t shots,
                                              std::uint64_t seed) {
  Rng rng(seed);
  return sample_counts(probs, shots, rng);
}

// Bootstrap std-dev of an error rate from `errors` failures in `shots`
// Bernoulli trials. Resampling n indicators with replacement yields an error
// count distributed Binomial(n, errors/n), so each resample is one binomial draw.
inline double bootstrap_std(std::int64_t errors, std::int64_t shots, int resamples, Rng& rng) {
  if (resamples < 2) throw DomainError("bootstrap: need at least 2 resamples");
  const double p_hat = static_cast<double>(errors) / static_cast<double>(shots);
  std::binomial_distribution<std::int64_t> draw(shots, p_hat);
  std::vector<double> means(static_cast<std::size_t>(resamples));
  for (auto& m : means) m = static_cast<double>(draw(rng)) / static_cast<double>(shots);
  const double mean = std::accumulate(means.begin(), means.end(), 0.0) / resamples;
  double ss = 0.0;
  for (double m : means) ss += (m - mean) * (m - mean);
  return std::sqrt(ss / (resamples - 1));
}

}  // namespace qdisc

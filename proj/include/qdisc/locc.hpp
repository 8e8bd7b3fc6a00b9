#pragma once

// Optimal adaptive local measurement (LOCC) by backward induction over the
// prior, plus an exhaustive two-copy search used as an independent check.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "qdisc/collective.hpp"
#include "qdisc/errors.hpp"
#include "qdisc/linalg.hpp"
#include "qdisc/parallel.hpp"
#include "qdisc/sampling.hpp"
#include "qdisc/states.hpp"

namespace qdisc {

inline constexpr int kDefaultGridSize = 2501;
inline constexpr int kCoarseAngleCount = 181;
inline constexpr double kAngleTol = 1e-10;

// Index of the projector that clicked: 0 for |psi>, 1 for |psi_perp>.
enum class Outcome : int { zero = 0, one = 1 };
inline constexpr std::array<Outcome, 2> kOutcomes{Outcome::zero, Outcome::one};

inline double reduce_angle(double phi) {
  double r = std::fmod(phi, std::numbers::pi);
  if (r < 0.0) r += std::numbers::pi;
  return r;
}

// Pi_0 = |psi><psi| with |psi> = cos(phi)|0> + sin(phi)|1>, Pi_1 = I - Pi_0.
inline std::pair<HermitianOperator, HermitianOperator> projectors(double phi) {
  phi = reduce_angle(phi);
  ComplexVector psi(2);
  psi << std::cos(phi), std::sin(phi);
  ComplexMatrix p0 = projector(psi);
  ComplexMatrix p1 = ComplexMatrix::Identity(2, 2) - p0;
  return {HermitianOperator(std::move(p0)), HermitianOperator(std::move(p1))};
}

// Born probabilities of a single-angle projective measurement on rho_+/-.
// The Bloch vector of Pi_0(phi) is (sin 2phi, 0, cos 2phi) and that of
// rho_+/- is (1 - v)(+/-sin a, 0, cos a), so tr(rho_+/- Pi_0) = (1 + (1-v) cos(2phi -/+ a)) / 2.
struct LocalLikelihood {
  double alpha;
  double v;

  double operator()(Hypothesis h, double phi, Outcome d) const {
    const double shift = h == Hypothesis::plus ? -alpha : alpha;
    const double p0 = 0.5 * (1.0 + (1.0 - v) * std::cos(2.0 * phi + shift));
    return d == Outcome::zero ? p0 : 1.0 - p0;
  }
};

inline double outcome_probability(double q, double phi, Outcome d, const LocalLikelihood& lk) {
  return q * lk(Hypothesis::plus, phi, d) + (1.0 - q) * lk(Hypothesis::minus, phi, d);
}

inline double posterior(double q, double phi, Outcome d, double alpha, double v) {
  if (!(q >= 0.0 && q <= 1.0)) throw DomainError("posterior: q must lie in [0, 1]");
  const LocalLikelihood lk{alpha, v};
  const double evidence = outcome_probability(q, phi, d, lk);
  if (evidence <= 0.0) throw DomainError("posterior: outcome has zero probability");
  return std::clamp(q * lk(Hypothesis::plus, phi, d) / evidence, 0.0, 1.0);
}

// Error of guessing the more likely state.
inline double terminal_risk(double q) { return std::min(q, 1.0 - q); }

// Expected risk after one measurement at angle phi, continuing with next_risk.
// Zero-probability outcomes are skipped.
template <class NextRisk>
double stage_risk(double q, double phi, const NextRisk& next_risk, double alpha, double v) {
  const LocalLikelihood lk{alpha, v};
  double total = 0.0;
  for (Outcome d : kOutcomes) {
    const double plus = q * lk(Hypothesis::plus, phi, d);
    const double evidence = plus + (1.0 - q) * lk(Hypothesis::minus, phi, d);
    if (evidence <= 0.0) continue;
    total += evidence * next_risk(std::clamp(plus / evidence, 0.0, 1.0));
  }
  return total;
}

// Optimal angle when exactly one copy remains: (1/2) arccot((2q - 1) cot(alpha)).
inline double last_copy_optimal_angle(double q, double alpha) {
  const double x = (2.0 * q - 1.0) * std::cos(alpha) / std::sin(alpha);
  return 0.5 * (std::numbers::pi / 2 - std::atan(x));
}

struct AngleChoice {
  double phi;
  double risk;
};

// Coarse scan of [0, pi) followed by golden-section refinement around the
// best coarse point. The objective is non-smooth, so no derivatives are used.
template <class Objective>
AngleChoice minimize_angle(const Objective& f, int coarse = kCoarseAngleCount,
                           double tol = kAngleTol) {
  const double step = std::numbers::pi / coarse;
  AngleChoice best{0.0, f(0.0)};
  for (int i = 1; i < coarse; ++i) {
    const double phi = i * step;
    const double r = f(phi);
    if (r < best.risk) best = {phi, r};
  }
  constexpr double inv_phi = 0.6180339887498949;
  double lo = best.phi - step;
  double hi = best.phi + step;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  while (hi - lo > tol) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = f(x2);
    }
  }
  const double mid = 0.5 * (lo + hi);
  const double fm = f(mid);
  if (fm < best.risk) best = {mid, fm};
  best.phi = reduce_angle(best.phi);
  return best;
}

// Backward-induction solution. Stage m (1-based) is the m-th measurement;
// risk row k holds R_k, the expected error with M - k copies still unmeasured.
class PolicyTable {
 public:
  PolicyTable(double alpha, double v, int copies, int grid_size)
      : alpha_(alpha),
        v_(v),
        copies_(copies),
        grid_size_(grid_size),
        angle_(static_cast<std::size_t>(copies), std::vector<double>(grid_size)),
        risk_(static_cast<std::size_t>(copies) + 1, std::vector<double>(grid_size)) {}

  double alpha() const noexcept { return alpha_; }
  double v() const noexcept { return v_; }
  int copies() const noexcept { return copies_; }
  int grid_size() const noexcept { return grid_size_; }

  double q_at(int i) const { return static_cast<double>(i) / (grid_size_ - 1); }

  // phi_m at grid point i, m in 1..M.
  double angle(int stage, int i) const { return angle_.at(stage - 1).at(i); }
  // R_k at grid point i, k in 0..M.
  double risk(int k, int i) const { return risk_.at(k).at(i); }
  const std::vector<double>& angle_row(int stage) const { return angle_.at(stage - 1); }
  const std::vector<double>& risk_row(int k) const { return risk_.at(k); }

  // R_k(q) for arbitrary q. The last two rows are evaluated exactly; earlier
  // rows are linearly interpolated on the grid.
  double risk_at(int k, double q) const {
    if (k == copies_) return terminal_risk(q);
    if (k == copies_ - 1) return one_copy_risk(q);
    const auto& row = risk_.at(k);
    const double x = std::clamp(q, 0.0, 1.0) * (grid_size_ - 1);
    const int i = std::min(static_cast<int>(x), grid_size_ - 2);
    const double t = x - i;
    if (i == 0 || i == grid_size_ - 2) return (1.0 - t) * row[i] + t * row[i + 1];
    const double p0 = row[i - 1], p1 = row[i], p2 = row[i + 1], p3 = row[i + 2];
    // cubic Lagrange through four neighbouring nodes
    return p1 + 0.5 * t * (p2 - p0 + t * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3 + t * (3.0 * (p1 - p2) + p3 - p0)));
  }

  // Optimal angle and risk for measurement `stage` at an arbitrary prior.
  AngleChoice choose(int stage, double q) const {
    if (stage < 1 || stage > copies_) throw DomainError("PolicyTable: stage out of range");
    if (stage == copies_) {
      const double phi = last_copy_optimal_angle(q, alpha_);
      return {phi, one_copy_risk(q)};
    }
    auto next = [this, stage](double qn) { return risk_at(stage, qn); };
    return minimize_angle([&](double phi) { return stage_risk(q, phi, next, alpha_, v_); });
  }

  // R_0 at the given prior; grid points return the tabulated value.
  double value(double q) const {
    const double x = q * (grid_size_ - 1);
    const double idx = std::round(x);
    if (std::abs(x - idx) < 1e-9) return risk_[0][static_cast<std::size_t>(idx)];
    return choose(1, q).risk;
  }

  void set(int stage, int i, AngleChoice c) {
    angle_.at(stage - 1).at(i) = c.phi;
    risk_.at(stage - 1).at(i) = c.risk;
  }
  void set_terminal(int i, double r) { risk_.at(copies_).at(i) = r; }

 private:
  double one_copy_risk(double q) const {
    auto terminal = [](double qn) { return terminal_risk(qn); };
    return stage_risk(q, last_copy_optimal_angle(q, alpha_), terminal, alpha_, v_);
  }

  double alpha_;
  double v_;
  int copies_;
  int grid_size_;
  std::vector<std::vector<double>> angle_;
  std::vector<std::vector<double>> risk_;
};

// Stages are solved backwards; grid points within a stage are independent
// and may be spread over `jobs` threads without changing the result.
inline PolicyTable dp_solve(const DiscriminationProblem& problem,
                            int grid_size = kDefaultGridSize, int jobs = 1) {
  problem.validate();
  if (grid_size < 3) throw DomainError("dp_solve: grid_size must be >= 3");
  PolicyTable table(problem.alpha, problem.v, problem.copies, grid_size);
  for (int i = 0; i < grid_size; ++i) table.set_terminal(i, terminal_risk(table.q_at(i)));
  for (int stage = problem.copies; stage >= 1; --stage) {
    const auto row = parallel_map(static_cast<std::size_t>(grid_size), jobs, [&](std::size_t i) {
      return table.choose(stage, table.q_at(static_cast<int>(i)));
    });
    for (int i = 0; i < grid_size; ++i) table.set(stage, i, row[static_cast<std::size_t>(i)]);
  }
  return table;
}

struct GapResult {
  double p_locc;
  double p_col;
  double delta;
};

inline GapResult gap(const DiscriminationProblem& problem, int grid_size = kDefaultGridSize,
                     int jobs = 1) {
  const double locc = dp_solve(problem, grid_size, jobs).value(problem.q);
  const double col = helstrom_error(problem);
  return {locc, col, locc - col};
}

inline GapResult gap(const PolicyTable& table, const DiscriminationProblem& problem) {
  const double locc = table.value(problem.q);
  const double col = helstrom_error(problem);
  return {locc, col, locc - col};
}

// Monte-Carlo run of the adaptive policy: sample the true state by the prior,
// measure each copy at the policy angle for the current posterior, then guess
// the more likely state (ties go to rho_minus).
inline ErrorEstimate simulate_policy(const PolicyTable& policy, const DiscriminationProblem& problem,
                                     std::int64_t shots, std::uint64_t seed,
                                     int resamples = kDefaultBootstrapResamples) {
  problem.validate();
  if (problem.copies != policy.copies() || problem.alpha != policy.alpha() ||
      problem.v != policy.v()) {
    throw DomainError("simulate_policy: policy was built for a different problem");
  }
  if (shots < 1) throw DomainError("simulate_policy: shots must be >= 1");
  const LocalLikelihood lk{problem.alpha, problem.v};
  std::map<std::pair<int, double>, double> angle_cache;
  auto angle_for = [&](int stage, double q) {
    auto [it, inserted] = angle_cache.try_emplace({stage, q}, 0.0);
    if (inserted) it->second = policy.choose(stage, q).phi;
    return it->second;
  };

  Rng rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::int64_t errors = 0;
  for (std::int64_t s = 0; s < shots; ++s) {
    const Hypothesis truth = unit(rng) < problem.q ? Hypothesis::plus : Hypothesis::minus;
    double q = problem.q;
    for (int stage = 1; stage <= problem.copies; ++stage) {
      const double phi = angle_for(stage, q);
      const Outcome d = unit(rng) < lk(truth, phi, Outcome::zero) ? Outcome::zero : Outcome::one;
      q = posterior(q, phi, d, problem.alpha, problem.v);
    }
    const Hypothesis guess = q > 0.5 ? Hypothesis::plus : Hypothesis::minus;
    if (guess != truth) ++errors;
  }
  ErrorEstimate out;
  out.shots = shots;
  out.seed = seed;
  out.p_err = static_cast<double>(errors) / static_cast<double>(shots);
  out.std_error = bootstrap_std(errors, shots, resamples, rng);
  return out;
}

}  // namespace qdisc

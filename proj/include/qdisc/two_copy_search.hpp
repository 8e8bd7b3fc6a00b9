#pragma once

// Exhaustive search over the three angles of a two-copy adaptive local
// measurement: phi1 for the first copy and phi2(D1) for the second. Born
// probabilities come from explicit density-matrix traces, so the search shares
// nothing with the backward-induction solver beyond the state definitions.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "qdisc/errors.hpp"
#include "qdisc/linalg.hpp"
#include "qdisc/states.hpp"

namespace qdisc {

namespace detail {

// tr(rho Pi_0(phi)) for rho_+ and rho_-.
struct ClickProbabilities {
  double plus;
  double minus;
};

inline ClickProbabilities click_probabilities(const ComplexMatrix& rho_plus,
                                              const ComplexMatrix& rho_minus, double phi) {
  ComplexVector psi(2);
  psi << std::cos(phi), std::sin(phi);
  const Complex a = psi.adjoint() * rho_plus * psi;
  const Complex b = psi.adjoint() * rho_minus * psi;
  return {a.real(), b.real()};
}

// Expected error of the two-copy protocol, summed over the four leaves
// (D1, D2): each leaf contributes min(q P(D1 D2 | +), (1 - q) P(D1 D2 | -)).
inline double two_copy_leaf_sum(double q, const ClickProbabilities& first,
                                const std::array<ClickProbabilities, 2>& second) {
  double total = 0.0;
  for (int d1 = 0; d1 < 2; ++d1) {
    const double p1 = d1 == 0 ? first.plus : 1.0 - first.plus;
    const double m1 = d1 == 0 ? first.minus : 1.0 - first.minus;
    for (int d2 = 0; d2 < 2; ++d2) {
      const auto& s = second[static_cast<std::size_t>(d1)];
      const double p2 = d2 == 0 ? s.plus : 1.0 - s.plus;
      const double m2 = d2 == 0 ? s.minus : 1.0 - s.minus;
      total += std::min(q * p1 * p2, (1.0 - q) * m1 * m2);
    }
  }
  return total;
}

}  // namespace detail

struct TwoCopyAngles {
  double phi1;
  std::array<double, 2> phi2;  // indexed by first outcome
  double risk;
};

inline TwoCopyAngles brute_force_two_copy_angles(const DiscriminationProblem& problem,
                                                 int angle_grid = 64, double refine_tol = 1e-10) {
  problem.validate();
  if (problem.copies != 2) throw DomainError("brute_force_two_copy: requires M = 2");
  if (angle_grid < 4) throw DomainError("brute_force_two_copy: angle_grid must be >= 4");
  const ComplexMatrix rp = make_state(problem, Sign::plus).matrix();
  const ComplexMatrix rm = make_state(problem, Sign::minus).matrix();
  const double q = problem.q;
  auto objective = [&](double a, double b, double c) {
    return detail::two_copy_leaf_sum(
        q, detail::click_probabilities(rp, rm, a),
        {detail::click_probabilities(rp, rm, b), detail::click_probabilities(rp, rm, c)});
  };

  const double step = std::numbers::pi / angle_grid;
  std::vector<detail::ClickProbabilities> table(static_cast<std::size_t>(angle_grid));
  for (int i = 0; i < angle_grid; ++i) table[i] = detail::click_probabilities(rp, rm, i * step);

  struct Candidate {
    double risk;
    int i, j, k;
  };
  std::vector<Candidate> grid;
  grid.reserve(static_cast<std::size_t>(angle_grid) * angle_grid * angle_grid);
  for (int i = 0; i < angle_grid; ++i)
    for (int j = 0; j < angle_grid; ++j)
      for (int k = 0; k < angle_grid; ++k)
        grid.push_back({detail::two_copy_leaf_sum(q, table[i], {table[j], table[k]}), i, j, k});
  constexpr std::size_t kStarts = 12;
  const auto n_starts = std::min(kStarts, grid.size());
  std::partial_sort(grid.begin(), grid.begin() + static_cast<std::ptrdiff_t>(n_starts), grid.end(),
                    [](const Candidate& x, const Candidate& y) { return x.risk < y.risk; });

  TwoCopyAngles best{0.0, {0.0, 0.0}, grid.front().risk};
  best.phi1 = grid.front().i * step;
  best.phi2 = {grid.front().j * step, grid.front().k * step};
  // Pattern search over the full 3x3x3 neighbourhood, halving the step on failure.
  for (std::size_t s = 0; s < n_starts; ++s) {
    std::array<double, 3> x{grid[s].i * step, grid[s].j * step, grid[s].k * step};
    double fx = grid[s].risk;
    double h = step;
    while (h > refine_tol) {
      std::array<double, 3> best_x = x;
      double best_f = fx;
      for (int di = -1; di <= 1; ++di)
        for (int dj = -1; dj <= 1; ++dj)
          for (int dk = -1; dk <= 1; ++dk) {
            if (di == 0 && dj == 0 && dk == 0) continue;
            const std::array<double, 3> y{x[0] + di * h, x[1] + dj * h, x[2] + dk * h};
            const double fy = objective(y[0], y[1], y[2]);
            if (fy < best_f) {
              best_f = fy;
              best_x = y;
            }
          }
      if (best_f < fx) {
        x = best_x;
        fx = best_f;
      } else {
        h *= 0.5;
      }
    }
    if (fx < best.risk) best = {x[0], {x[1], x[2]}, fx};
  }
  return best;
}

inline double brute_force_two_copy(const DiscriminationProblem& problem, int angle_grid = 64,
                                   double refine_tol = 1e-10) {
  return brute_force_two_copy_angles(problem, angle_grid, refine_tol).risk;
}

}  // namespace qdisc

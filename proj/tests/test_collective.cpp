#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "qdisc/collective.hpp"
#include "test_support.hpp"

using namespace qdisc;
using Catch::Approx;
using qdisc::testing::max_abs_diff;

namespace {
const double kPi = std::numbers::pi;
const DiscriminationProblem kFig2{kPi / 4, 0.1, 0.5, 1};

int rank_of(const HermitianOperator& p) {
  return static_cast<int>(std::lround(p.trace().real()));
}
}  // namespace

TEST_CASE("gamma", "[collective]") {
  SECTION("q = 1, M = 1 is rho_plus") {
    const auto p = kFig2.with_q(1.0);
    CHECK(max_abs_diff(gamma(p).matrix(), make_state(p, Sign::plus).matrix()) == 0.0);
  }
  SECTION("identical states with equal priors cancel") {
    for (int m = 1; m <= 4; ++m) {
      const DiscriminationProblem p{0.4, 1.0, 0.5, m};
      CHECK(gamma(p).matrix().cwiseAbs().maxCoeff() < 1e-15);
    }
  }
  SECTION("q = 1/2 leaves only the off-diagonal term") {
    const auto g = gamma(kFig2).matrix();
    CHECK(std::abs(g(0, 0)) < 1e-15);
    CHECK(std::abs(g(1, 1)) < 1e-15);
    CHECK(g(0, 1).real() == Approx(0.45 / std::sqrt(2.0)).margin(1e-15));
  }
  SECTION("trace is 2q - 1") {
    Rng rng(2);
    for (int trial = 0; trial < 20; ++trial) {
      const auto p = qdisc::testing::random_problem(rng, 1 + trial % 4);
      CHECK(gamma(p).trace().real() == Approx(2 * p.q - 1).margin(1e-12));
    }
  }
}

TEST_CASE("helstrom_error", "[collective]") {
  CHECK(helstrom_error({kPi / 2, 0.0, 0.5, 1}) == Approx(0.0).margin(1e-15));
  for (double q : {0.1, 0.5, 0.8}) {
    for (int m = 1; m <= 3; ++m) {
      CHECK(helstrom_error({0.9, 1.0, q, m}) == Approx(std::min(q, 1 - q)).margin(1e-14));
    }
  }
  CHECK(helstrom_error(kFig2) == Approx((1 - 0.9 * std::sin(kPi / 4)) / 2).margin(1e-12));
  CHECK(helstrom_error(kFig2) == Approx(0.181802).margin(1e-6));
}

TEST_CASE("single_copy_closed_form", "[collective]") {
  CHECK(single_copy_closed_form(0.7, 0.3, 0.0) == 0.0);
  CHECK(single_copy_closed_form(0.7, 1.0, 0.3) == Approx(0.3).margin(1e-15));
  CHECK(single_copy_closed_form(kPi / 4, 0.1, 0.5) == Approx(0.5 * (1 - 0.9 / std::sqrt(2.0))).margin(1e-15));
  CHECK(single_copy_closed_form(kPi / 4, 0.1, 0.5) == Approx(helstrom_error(kFig2)).margin(1e-12));
}

TEST_CASE("closed form matches the eigen route on a grid", "[collective][property]") {
  for (int i = 1; i <= 20; ++i) {
    for (int j = 0; j <= 20; ++j) {
      for (int k = 0; k <= 20; ++k) {
        const double alpha = i * (kPi / 2) / 20;
        const double v = j / 20.0;
        const double q = k / 20.0;
        REQUIRE(helstrom_error({alpha, v, q, 1}) ==
                Approx(single_copy_closed_form(alpha, v, q)).margin(1e-12));
      }
    }
  }
}

TEST_CASE("helstrom_povm", "[collective]") {
  SECTION("certain prior always guesses rho_plus") {
    const auto sol = helstrom_povm(kFig2.with_q(1.0));
    CHECK(max_abs_diff(sol.povm.elements()[0].matrix(), ComplexMatrix::Identity(2, 2)) < 1e-12);
    CHECK(sol.povm.elements()[1].matrix().cwiseAbs().maxCoeff() < 1e-12);
    CHECK(sol.error_probability == 0.0);
  }
  SECTION("orthogonal pure states give the +/- x projectors") {
    const auto sol = helstrom_povm({kPi / 2, 0.0, 0.5, 1});
    ComplexMatrix px(2, 2), mx(2, 2);
    px << 0.5, 0.5, 0.5, 0.5;
    mx << 0.5, -0.5, -0.5, 0.5;
    CHECK(max_abs_diff(sol.povm.elements()[0].matrix(), px) < 1e-12);
    CHECK(max_abs_diff(sol.povm.elements()[1].matrix(), mx) < 1e-12);
    CHECK(sol.error_probability == Approx(0.0).margin(1e-15));
  }
  SECTION("two copies at q = 0.75 has a rank-one rho_minus projector") {
    const DiscriminationProblem p{kPi / 4, 0.1, 0.75, 2};
    const auto sol = helstrom_povm(p);
    CHECK(rank_of(sol.povm.elements()[1]) == 1);
    CHECK(rank_of(sol.povm.elements()[0]) == 3);
    CHECK(error_probability(sol.povm, p) == Approx(helstrom_error(p)).margin(1e-10));
    CHECK(sol.error_probability == Approx(helstrom_error(p)).margin(1e-12));
  }
  SECTION("zero eigenvalues go to rho_minus") {
    // identical states at q = 1/2: Gamma = 0, everything decides rho_minus
    const auto sol = helstrom_povm({0.5, 1.0, 0.5, 2});
    CHECK(rank_of(sol.povm.elements()[1]) == 4);
    CHECK(sol.povm.size() == 2);
  }
}

TEST_CASE("error_probability", "[collective]") {
  const DiscriminationProblem p{kPi / 4, 0.1, 0.75, 2};
  SECTION("always guessing rho_plus errs with probability 1 - q") {
    Povm always({HermitianOperator(ComplexMatrix(ComplexMatrix::Identity(4, 4)))}, {Hypothesis::plus});
    CHECK(error_probability(always, p) == Approx(0.25).margin(1e-15));
  }
  SECTION("computational-basis measurement with |00> -> rho_minus") {
    std::vector<HermitianOperator> elems;
    std::vector<Hypothesis> decision;
    for (int i = 0; i < 4; ++i) {
      ComplexMatrix e = ComplexMatrix::Zero(4, 4);
      e(i, i) = 1.0;
      elems.emplace_back(e);
      decision.push_back(i == 0 ? Hypothesis::minus : Hypothesis::plus);
    }
    // Born-rule arithmetic: <0|rho_+/-|0> = (1 + 0.9 cos(pi/4)) / 2 for both states,
    // so P(00 | either) = c^2 with c = (1 + 0.9/sqrt 2) / 2.
    const double c = 0.5 * (1 + 0.9 / std::sqrt(2.0));
    const double expected = 0.75 * c * c + 0.25 * (1 - c * c);
    CHECK(error_probability(Povm(elems, decision), p) == Approx(expected).margin(1e-14));
  }
  SECTION("dimension mismatch") {
    Povm single({HermitianOperator(ComplexMatrix(ComplexMatrix::Identity(2, 2)))}, {Hypothesis::plus});
    CHECK_THROWS_AS(error_probability(single, p), DimensionError);
  }
}

TEST_CASE("Povm validation", "[collective]") {
  ComplexMatrix half = 0.5 * ComplexMatrix::Identity(2, 2);
  CHECK_THROWS_AS(Povm({HermitianOperator(half)}, {Hypothesis::plus}), DomainError);
  ComplexMatrix neg(2, 2);
  neg << 1.5, 0, 0, -0.5;
  ComplexMatrix rest(2, 2);
  rest << -0.5, 0, 0, 1.5;
  CHECK_THROWS_AS(Povm({HermitianOperator(neg), HermitianOperator(rest)},
                       {Hypothesis::plus, Hypothesis::minus}),
                  DomainError);
  CHECK_THROWS_AS(Povm({HermitianOperator(half)}, {}), DimensionError);
}

TEST_CASE("collective invariants", "[collective][property]") {
  Rng rng(23);
  for (int trial = 0; trial < 60; ++trial) {
    const auto base = qdisc::testing::random_problem(rng, 1);
    double previous = 1.0;
    for (int m = 1; m <= 4; ++m) {
      const auto p = base.with_copies(m);
      const double pe = helstrom_error(p);
      CHECK(pe <= previous + 1e-12);
      CHECK(pe <= std::min(p.q, 1 - p.q) + 1e-15);
      CHECK(pe >= 0.0);
      previous = pe;

      // exchanging the state labels maps q to 1 - q
      const auto plus = tensor_power(make_state(p, Sign::plus), m).matrix();
      const auto minus = tensor_power(make_state(p, Sign::minus), m).matrix();
      const HermitianOperator swapped(ComplexMatrix((1 - p.q) * minus - p.q * plus));
      CHECK(0.5 * (1 - trace_norm(swapped)) == Approx(pe).margin(1e-12));
      CHECK(helstrom_error(p.with_q(1 - p.q)) == Approx(pe).margin(1e-12));

      const auto sol = helstrom_povm(p);
      CHECK(error_probability(sol.povm, p) == Approx(pe).margin(1e-10));
      ComplexMatrix sum = ComplexMatrix::Zero(sol.povm.dim(), sol.povm.dim());
      for (const auto& e : sol.povm.elements()) sum += e.matrix();
      CHECK(max_abs_diff(sum, ComplexMatrix::Identity(sol.povm.dim(), sol.povm.dim())) <= 1e-10);
    }
  }
}

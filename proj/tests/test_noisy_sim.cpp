#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cmath>
#include <numbers>

#include "qdisc/collective.hpp"
#include "qdisc/fit.hpp"
#include "qdisc/noisy_sim.hpp"
#include "test_support.hpp"

using namespace qdisc;
using Catch::Approx;
using qdisc::testing::max_abs_diff;

namespace {
const double kPi = std::numbers::pi;
const DiscriminationProblem kFig3{kPi / 4, 0.1, 0.75, 2};

// Trace out qubit 1 (LSB) of a two-qubit operator.
ComplexMatrix reduce_to_qubit0(const ComplexMatrix& rho) {
  ComplexMatrix out = ComplexMatrix::Zero(2, 2);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int k = 0; k < 2; ++k) out(a, b) += rho(2 * a + k, 2 * b + k);
  return out;
}

ComplexMatrix reduce_to_qubit1(const ComplexMatrix& rho) {
  ComplexMatrix out = ComplexMatrix::Zero(2, 2);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int k = 0; k < 2; ++k) out(a, b) += rho(2 * k + a, 2 * k + b);
  return out;
}

DensityMatrix random_state(Rng& rng, Eigen::Index dim) {
  std::normal_distribution<double> n01;
  ComplexMatrix a(dim, dim);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = Complex(n01(rng), n01(rng));
  ComplexMatrix rho = a * a.adjoint();
  rho /= rho.trace();
  return DensityMatrix(ComplexMatrix((rho + rho.adjoint()) / 2.0));
}

DensityMatrix basis_state(Eigen::Index dim, Eigen::Index i) {
  ComplexMatrix rho = ComplexMatrix::Zero(dim, dim);
  rho(i, i) = 1.0;
  return DensityMatrix(rho);
}

const FittedMeasurement& fig3_fit() {
  static const FittedMeasurement f = fit_helstrom_circuit(kFig3);
  return f;
}

void check_state(const ComplexMatrix& rho) {
  CHECK(std::abs(rho.trace() - Complex(1.0)) <= 1e-10);
  CHECK(hermitian_eigenvalues(HermitianOperator(rho)).minCoeff() >= -1e-10);
}
}  // namespace

TEST_CASE("NoiseModel validation", "[noisy_sim]") {
  CHECK_NOTHROW(NoiseModel{}.validate());
  CHECK_NOTHROW(NoiseModel{}.scaled(2.0).validate());
  CHECK_THROWS_AS(NoiseModel{}.scaled(-1.0).validate(), DomainError);
  CHECK_THROWS_AS(NoiseModel{}.scaled(101.0).validate(), DomainError);  // scale * p2 > 1
  NoiseModel bad;
  bad.r1 = 1.5;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  const auto zero = NoiseModel::noiseless();
  CHECK(zero.eff_p1() == 0.0);
  CHECK(zero.eff_r1() == 0.0);
}

TEST_CASE("depolarize", "[noisy_sim]") {
  Rng rng(3);
  const auto rho = random_state(rng, 4);
  const std::array<int, 1> q0{0};
  const std::array<int, 1> q1{1};
  const std::array<int, 2> both{0, 1};

  CHECK(max_abs_diff(depolarize(rho, q0, 0.0).matrix(), rho.matrix()) < 1e-15);
  CHECK(max_abs_diff(depolarize(rho, both, 0.0).matrix(), rho.matrix()) < 1e-15);

  const auto full0 = depolarize(rho, q0, 1.0).matrix();
  CHECK(max_abs_diff(reduce_to_qubit0(full0), 0.5 * pauli::identity()) < 1e-14);
  CHECK(max_abs_diff(reduce_to_qubit1(full0), reduce_to_qubit1(rho.matrix())) < 1e-14);
  const auto full1 = depolarize(rho, q1, 1.0).matrix();
  CHECK(max_abs_diff(reduce_to_qubit1(full1), 0.5 * pauli::identity()) < 1e-14);
  CHECK(max_abs_diff(reduce_to_qubit0(full1), reduce_to_qubit0(rho.matrix())) < 1e-14);

  CHECK(max_abs_diff(depolarize(rho, both, 1.0).matrix(), 0.25 * ComplexMatrix::Identity(4, 4)) <
        1e-14);

  // partial strength is the convex mixture
  const double p = 0.3;
  const ComplexMatrix mixed = (1 - p) * rho.matrix() + p * full0;
  CHECK(max_abs_diff(depolarize(rho, q0, p).matrix(), mixed) < 1e-14);

  const std::array<int, 1> out_of_range{2};
  const std::array<int, 2> repeated{1, 1};
  CHECK_THROWS_AS(depolarize(rho, out_of_range, 0.1), DomainError);
  CHECK_THROWS_AS(depolarize(rho, repeated, 0.1), DomainError);
  CHECK_THROWS_AS(depolarize(rho, q0, 1.1), DomainError);
}

TEST_CASE("channels preserve trace and positivity", "[noisy_sim][property]") {
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const auto rho = random_state(rng, 4);
    const double p = qdisc::testing::uniform(rng, 0.0, 1.0);
    const std::array<int, 1> one{trial % 2};
    const std::array<int, 2> two{0, 1};
    check_state(depolarize(rho, one, p).matrix());
    check_state(depolarize(rho, two, p).matrix());
  }
  AnsatzParams params{};
  for (int trial = 0; trial < 50; ++trial) {
    for (auto& x : params) x = qdisc::testing::uniform(rng, -kPi, kPi);
    const auto noise = NoiseModel{}.scaled(qdisc::testing::uniform(rng, 0.0, 50.0));
    check_state(apply_circuit_noisy(ansatz_circuit(params), random_state(rng, 4), noise).matrix());
  }
}

TEST_CASE("apply_circuit_noisy", "[noisy_sim]") {
  Rng rng(7);
  const auto rho = random_state(rng, 4);
  AnsatzParams params{};
  for (auto& x : params) x = qdisc::testing::uniform(rng, -kPi, kPi);
  const auto c = ansatz_circuit(params);

  SECTION("noiseless is unitary conjugation") {
    const auto u = unitary_of(c);
    const ComplexMatrix expected = u * rho.matrix() * u.adjoint();
    CHECK(max_abs_diff(apply_circuit_noisy(c, rho, NoiseModel::noiseless()).matrix(), expected) <
          1e-13);
  }
  SECTION("empty circuit") {
    CHECK(max_abs_diff(apply_circuit_noisy(Circuit(2), rho, NoiseModel{}).matrix(), rho.matrix()) ==
          0.0);
  }
  SECTION("fully depolarizing RY leaves its qubit maximally mixed") {
    NoiseModel noise;
    noise.p1 = 1.0;
    for (double theta : {0.0, 0.4, 2.5}) {
      const auto out = apply_circuit_noisy(Circuit(2, {Gate::ry(0, theta)}), rho, noise).matrix();
      CHECK(max_abs_diff(reduce_to_qubit0(out), 0.5 * pauli::identity()) < 1e-14);
    }
  }
  SECTION("width mismatch") {
    CHECK_THROWS_AS(apply_circuit_noisy(Circuit(3), rho, NoiseModel{}), DimensionError);
  }
}

TEST_CASE("readout_distribution", "[noisy_sim]") {
  Rng rng(11);
  const auto rho = random_state(rng, 4);
  const auto ideal = readout_distribution(rho, NoiseModel::noiseless());
  for (int i = 0; i < 4; ++i) CHECK(ideal[static_cast<std::size_t>(i)] == Approx(rho.matrix()(i, i).real()).margin(1e-15));

  NoiseModel flip;
  flip.r0 = 1.0;
  flip.r1 = 0.0;
  const auto one = readout_distribution(basis_state(2, 0), flip);
  CHECK(one[0] == 0.0);
  CHECK(one[1] == 1.0);

  const auto d = readout_distribution(basis_state(4, 0), NoiseModel{});
  CHECK(d[0] == Approx(0.9801).margin(1e-15));
  CHECK(d[1] == Approx(0.0099).margin(1e-15));
  CHECK(d[2] == Approx(0.0099).margin(1e-15));
  CHECK(d[3] == Approx(0.0001).margin(1e-15));

  const auto e = readout_distribution(basis_state(4, 3), NoiseModel{});
  CHECK(e[0] == Approx(0.0004).margin(1e-15));
  CHECK(e[3] == Approx(0.9604).margin(1e-15));
}

TEST_CASE("readout distributions are normalized", "[noisy_sim][property]") {
  Rng rng(13);
  for (int trial = 0; trial < 300; ++trial) {
    const Eigen::Index dim = Eigen::Index{1} << (1 + trial % 4);
    NoiseModel noise{qdisc::testing::uniform(rng, 0, 1), qdisc::testing::uniform(rng, 0, 1),
                     qdisc::testing::uniform(rng, 0, 1), qdisc::testing::uniform(rng, 0, 1), 1.0};
    const auto d = readout_distribution(random_state(rng, dim), noise);
    double total = 0.0;
    for (double x : d) {
      CHECK(x >= 0.0);
      total += x;
    }
    CHECK(total == Approx(1.0).margin(1e-12));
  }
}

TEST_CASE("exact_error_probability", "[noisy_sim]") {
  SECTION("fitted Helstrom circuit reaches the bound noiselessly") {
    const auto& f = fig3_fit();
    CHECK(exact_error_probability(kFig3, f.circuit, f.decision, NoiseModel::noiseless()) ==
          Approx(helstrom_error(kFig3)).margin(1e-6));
  }
  SECTION("always deciding rho_plus errs with probability 1 - q") {
    const std::vector<Hypothesis> all_plus(4, Hypothesis::plus);
    CHECK(exact_error_probability(kFig3, Circuit(2), all_plus, NoiseModel{}) ==
          Approx(0.25).margin(1e-14));
  }
  SECTION("identical states cannot beat guessing") {
    Rng rng(17);
    const auto& f = fig3_fit();
    for (int trial = 0; trial < 20; ++trial) {
      const DiscriminationProblem p{qdisc::testing::uniform(rng, 0.05, kPi / 2), 1.0,
                                    qdisc::testing::uniform(rng, 0, 1), 2};
      const auto noise = NoiseModel{}.scaled(qdisc::testing::uniform(rng, 0, 5));
      CHECK(exact_error_probability(p, f.circuit, f.decision, noise) >=
            std::min(p.q, 1 - p.q) - 1e-10);
    }
  }
  SECTION("decision map must cover all outcomes") {
    const std::vector<Hypothesis> short_map(3, Hypothesis::plus);
    CHECK_THROWS_AS(exact_error_probability(kFig3, Circuit(2), short_map, NoiseModel{}),
                    DimensionError);
  }
}

TEST_CASE("fitted circuits reach the bound on random problems", "[noisy_sim][property]") {
  Rng rng(19);
  for (int trial = 0; trial < 10; ++trial) {
    const auto p = qdisc::testing::random_problem(rng, 2);
    const auto f = fit_helstrom_circuit(p);
    INFO("alpha=" << p.alpha << " v=" << p.v << " q=" << p.q);
    CHECK(f.fit.fidelity >= 1 - 1e-8);
    CHECK(exact_error_probability(p, f.circuit, f.decision, NoiseModel::noiseless()) ==
          Approx(helstrom_error(p)).margin(1e-6));
  }
}

TEST_CASE("sample_shots", "[noisy_sim]") {
  const std::vector<double> point{1.0, 0.0, 0.0, 0.0};
  const auto counts = sample_shots(point, 1000, 1);
  CHECK(counts == std::vector<std::int64_t>{1000, 0, 0, 0});

  const std::vector<double> uniform(4, 0.25);
  const auto u = sample_shots(uniform, 200000, 2);
  const double sigma = std::sqrt(200000 * 0.25 * 0.75);
  std::int64_t total = 0;
  for (auto c : u) {
    CHECK(std::abs(static_cast<double>(c) - 50000.0) <= 5 * sigma);
    total += c;
  }
  CHECK(total == 200000);
  CHECK(sample_shots(uniform, 200000, 2) == u);
  CHECK(sample_shots(uniform, 200000, 3) != u);
  CHECK_THROWS_AS(sample_shots(uniform, 0, 1), DomainError);
}

TEST_CASE("estimate_error", "[noisy_sim]") {
  const auto& f = fig3_fit();
  SECTION("noiseless estimate agrees with the exact value") {
    const auto est = estimate_error(kFig3, f.circuit, f.decision, NoiseModel::noiseless(), 1000000, 4);
    const double exact = exact_error_probability(kFig3, f.circuit, f.decision, NoiseModel::noiseless());
    CHECK(std::abs(est.p_err - exact) <= 4 * est.std_error);
  }
  SECTION("default noise at 200000 shots") {
    const auto est = estimate_error(kFig3, f.circuit, f.decision, NoiseModel{}, kDefaultShots, 5);
    const double exact = exact_error_probability(kFig3, f.circuit, f.decision, NoiseModel{});
    CHECK(std::abs(est.p_err - exact) <= 4 * est.std_error);
    CHECK(est.std_error > 0.0);
    CHECK(est.std_error == Approx(std::sqrt(exact * (1 - exact) / kDefaultShots)).epsilon(0.15));
    CHECK(est.shots == kDefaultShots);
    CHECK(est.seed == 5);
  }
  SECTION("certain prior with a perfect decision never errs") {
    const DiscriminationProblem p{kPi / 4, 0.1, 1.0, 2};
    const std::vector<Hypothesis> all_plus(4, Hypothesis::plus);
    const auto est = estimate_error(p, Circuit(2), all_plus, NoiseModel{}, 10000, 6);
    CHECK(est.p_err == 0.0);
    CHECK(est.std_error == 0.0);
  }
  SECTION("argument checks") {
    CHECK_THROWS_AS(estimate_error(kFig3, f.circuit, f.decision, NoiseModel{}, 0, 1), DomainError);
    CHECK_THROWS_AS(estimate_error(kFig3, f.circuit, f.decision, NoiseModel{}, 100, 1, 99),
                    DomainError);
  }
}

TEST_CASE("estimate_error converges across seeds", "[noisy_sim][property]") {
  const auto& f = fig3_fit();
  const auto dists = circuit_distributions(kFig3, f.circuit, NoiseModel{});
  const double exact = error_from_distributions(dists, f.decision, kFig3.q);
  int within = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto est = sample_error(dists, f.decision, kFig3.q, kDefaultShots, derive_seed(99, seed));
    within += std::abs(est.p_err - exact) <= 4 * est.std_error;
  }
  CHECK(within >= 95);
}

TEST_CASE("seeded estimates are bit-identical", "[noisy_sim][property]") {
  const auto& f = fig3_fit();
  for (std::uint64_t seed : {0ull, 1ull, 12345ull}) {
    const auto a = estimate_error(kFig3, f.circuit, f.decision, NoiseModel{}, 50000, seed);
    const auto b = estimate_error(kFig3, f.circuit, f.decision, NoiseModel{}, 50000, seed);
    CHECK(a == b);
  }
}

TEST_CASE("noise_sweep", "[noisy_sim]") {
  const auto& f = fig3_fit();
  std::vector<double> scales;
  for (int k = 0; k <= 20; ++k) scales.push_back(0.1 * k);
  const auto sweep = noise_sweep(kFig3, f.circuit, f.decision, NoiseModel{}, scales, 20000, 8);
  REQUIRE(sweep.size() == scales.size());
  CHECK(sweep.front().p_exact == Approx(helstrom_error(kFig3)).margin(1e-6));
  CHECK(sweep[10].p_exact > helstrom_error(kFig3));
  for (std::size_t k = 0; k < sweep.size(); ++k) {
    CHECK(sweep[k].scale == scales[k]);
    CHECK(sweep[k].estimate.seed == derive_seed(8, k));
  }
  // property check: exact error is nondecreasing in scale
  for (std::size_t k = 1; k < sweep.size(); ++k) {
    CHECK(sweep[k].p_exact >= sweep[k - 1].p_exact - 1e-12);
  }
  const std::vector<double> bad{-0.5};
  CHECK_THROWS_AS(noise_sweep(kFig3, f.circuit, f.decision, NoiseModel{}, bad, 100, 1), DomainError);
}

TEST_CASE("multi_copy_measurement_sim", "[noisy_sim]") {
  for (int m : {3, 4}) {
    const DiscriminationProblem p{kPi / 4, 0.1, 0.75, m};
    INFO("M=" << m);
    const auto r = multi_copy_measurement_sim(p, NoiseModel::noiseless(), 10000, 1);
    CHECK(r.p_helstrom == Approx(helstrom_error(p)).margin(1e-14));
    CHECK(r.p_exact == Approx(helstrom_error(p)).margin(1e-6));

    // readout errors off, event count zero, nonzero gate noise: still exact
    NoiseModel gates_only;
    gates_only.r0 = gates_only.r1 = 0.0;
    const auto z = multi_copy_measurement_sim(p, gates_only, 10000, 1, {0, 0});
    CHECK(z.p_exact == Approx(helstrom_error(p)).margin(1e-6));

    const auto noisy = multi_copy_measurement_sim(p, NoiseModel{}, 10000, 1);
    CHECK(noisy.p_exact > r.p_exact);

    NoiseModel huge;
    huge.p1 = huge.p2 = 1.0;
    huge.r0 = huge.r1 = 0.5;
    const auto h = multi_copy_measurement_sim(p, huge, 10000, 1);
    CHECK(h.p_exact >= 0.25 - 1e-10);
  }
  CHECK_THROWS_AS(multi_copy_measurement_sim(kFig3, NoiseModel{}, 100, 1), DomainError);
  CHECK_THROWS_AS(multi_copy_measurement_sim({kPi / 4, 0.1, 0.75, 3}, NoiseModel{}, 100, 1, {-1, 0}),
                  DomainError);
  CHECK(default_gate_count(3).two_qubit == 20);
  CHECK(default_gate_count(4).two_qubit == 100);
}

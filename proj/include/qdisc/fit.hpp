#pragma once

// From the optimal POVM to a fitted three-CNOT circuit.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "qdisc/circuit.hpp"
#include "qdisc/collective.hpp"
#include "qdisc/errors.hpp"
#include "qdisc/linalg.hpp"
#include "qdisc/sampling.hpp"

namespace qdisc {

// Rotation taking the POVM's eigenbasis to the computational basis, with the
// decision attached to each computational outcome.
struct MeasurementBasis {
  ComplexMatrix unitary;
  std::vector<Hypothesis> decision;  // indexed by computational outcome
};

// Each POVM element must be an orthogonal projector. Rows of the unitary are
// the elements' range vectors: rho_minus elements first, then rho_plus, each
// group in element order and eigenvalue order within an element. For the
// Helstrom POVM with rank(P_-) = 1 this sends |0...0> to rho_minus.
inline MeasurementBasis measurement_unitary(const Povm& povm) {
  constexpr double kProjectorTol = 1e-8;
  const auto d = povm.dim();
  std::vector<ComplexVector> rows;
  std::vector<Hypothesis> decision;
  for (Hypothesis group : {Hypothesis::minus, Hypothesis::plus}) {
    for (std::size_t k = 0; k < povm.size(); ++k) {
      if (povm.decision()[k] != group) continue;
      const auto eig = hermitian_eig(povm.elements()[k]);
      for (Eigen::Index i = 0; i < d; ++i) {
        const double lambda = eig.values(i);
        if (std::abs(lambda) > kProjectorTol && std::abs(lambda - 1.0) > kProjectorTol) {
          throw DomainError("measurement_unitary: element " + std::to_string(k) +
                            " is not a projector (eigenvalue " + std::to_string(lambda) + ")");
        }
        if (lambda > 0.5) {
          rows.push_back(eig.vectors.col(i));
          decision.push_back(group);
        }
      }
    }
  }
  if (static_cast<Eigen::Index>(rows.size()) != d) {
    throw DomainError("measurement_unitary: projector ranks sum to " + std::to_string(rows.size()) +
                      ", expected " + std::to_string(d));
  }
  ComplexMatrix u(d, d);
  for (Eigen::Index r = 0; r < d; ++r) u.row(r) = rows[static_cast<std::size_t>(r)].adjoint();
  const double defect = (u * u.adjoint() - ComplexMatrix::Identity(d, d)).cwiseAbs().maxCoeff();
  if (defect > 1e-8) {
    throw DomainError("measurement_unitary: projectors are not mutually orthogonal");
  }
  return {std::move(u), std::move(decision)};
}

// Haar-distributed unitary via QR of a complex Ginibre matrix.
inline ComplexMatrix haar_unitary(Eigen::Index dim, Rng& rng) {
  std::normal_distribution<double> n01(0.0, 1.0);
  ComplexMatrix z(dim, dim);
  for (Eigen::Index i = 0; i < z.size(); ++i) z.data()[i] = Complex(n01(rng), n01(rng));
  Eigen::HouseholderQR<ComplexMatrix> qr(z);
  ComplexMatrix qm = qr.householderQ();
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < dim; ++j) {
    const Complex diag = r(j, j);
    qm.col(j) *= diag / std::abs(diag);
  }
  return qm;
}

struct FitOptions {
  double tol = 1e-8;  // required 1 - fidelity
  int restarts = 20;
  int max_iterations = 5000;
  std::uint64_t seed = 0;
};

struct FitResult {
  AnsatzParams params{};
  double fidelity = 0.0;
  int restarts_used = 0;
  bool converged = false;
};

namespace detail {

// Residual r(p, g) = vec(U(p) - e^{ig} T) split into real and imaginary
// parts; the Jacobian is exact, obtained by differentiating one gate at a time.
class AnsatzResidual {
 public:
  explicit AnsatzResidual(const ComplexMatrix& target) : target_(target) {}

  static constexpr int kParams = 16;  // 15 angles + global phase
  static constexpr int kResiduals = 32;

  double evaluate(const Eigen::VectorXd& x, Eigen::VectorXd& r, Eigen::MatrixXd* jac) const {
    const Circuit c = ansatz_circuit(to_params(x));
    const auto& gates = c.gates();
    const std::size_t n = gates.size();
    std::vector<ComplexMatrix> layer(n);
    for (std::size_t k = 0; k < n; ++k) layer[k] = embedded_unitary(gates[k], 2);
    // prefix[k] = layer[k-1] ... layer[0]; suffix[k] = layer[n-1] ... layer[k+1]
    std::vector<ComplexMatrix> prefix(n + 1), suffix(n);
    prefix[0] = ComplexMatrix::Identity(4, 4);
    for (std::size_t k = 0; k < n; ++k) prefix[k + 1] = layer[k] * prefix[k];
    suffix[n - 1] = ComplexMatrix::Identity(4, 4);
    for (std::size_t k = n - 1; k > 0; --k) suffix[k - 1] = suffix[k] * layer[k];

    const Complex phase = std::polar(1.0, x(15));
    const ComplexMatrix diff = prefix[n] - phase * target_;
    pack(diff, r);
    if (jac != nullptr) {
      jac->resize(kResiduals, kParams);
      Eigen::VectorXd col(kResiduals);
      int p = 0;
      for (std::size_t k = 0; k < n; ++k) {
        for (int a = 0; a < gates[k].parameter_count(); ++a, ++p) {
          const ComplexMatrix dg = embed_single(gate_derivative(gates[k], a), gates[k].qubits[0], 2);
          pack(suffix[k] * dg * prefix[k], col);
          jac->col(p) = col;
        }
      }
      pack(-Complex(0.0, 1.0) * phase * target_, col);
      jac->col(15) = col;
    }
    return r.squaredNorm();
  }

  static AnsatzParams to_params(const Eigen::VectorXd& x) {
    AnsatzParams p{};
    for (int i = 0; i < 15; ++i) p[static_cast<std::size_t>(i)] = x(i);
    return p;
  }

 private:
  static void pack(const ComplexMatrix& m, Eigen::VectorXd& out) {
    out.resize(kResiduals);
    for (int i = 0; i < 16; ++i) {
      out(i) = m.data()[i].real();
      out(16 + i) = m.data()[i].imag();
    }
  }

  ComplexMatrix target_;
};

inline Eigen::VectorXd levenberg_marquardt(const AnsatzResidual& f, Eigen::VectorXd x,
                                           int max_iterations) {
  Eigen::VectorXd r, r_trial;
  Eigen::MatrixXd jac;
  double cost = f.evaluate(x, r, &jac);
  double mu = 1e-3;
  for (int it = 0; it < max_iterations && cost > 1e-28; ++it) {
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd grad = jac.transpose() * r;
    Eigen::MatrixXd damped = jtj;
    damped.diagonal().array() += mu * (1.0 + jtj.diagonal().array());
    const Eigen::VectorXd step = damped.ldlt().solve(-grad);
    const Eigen::VectorXd trial = x + step;
    const double trial_cost = f.evaluate(trial, r_trial, nullptr);
    if (trial_cost < cost) {
      x = trial;
      const bool stalled = cost - trial_cost < 1e-16 * cost;
      cost = f.evaluate(x, r, &jac);
      mu = std::max(mu / 3.0, 1e-15);
      if (stalled) break;
    } else {
      mu *= 4.0;
      if (mu > 1e12) break;
    }
  }
  return x;
}

}  // namespace detail

inline FitResult fit_ansatz(const ComplexMatrix& target, const FitOptions& opts = {}) {
  if (target.rows() != 4 || target.cols() != 4) {
    throw DimensionError("fit_ansatz: target must be 4x4");
  }
  const double unitarity = (target.adjoint() * target - ComplexMatrix::Identity(4, 4))
                               .cwiseAbs()
                               .maxCoeff();
  if (unitarity > 1e-10) throw DomainError("fit_ansatz: target is not unitary");

  const detail::AnsatzResidual residual(target);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  FitResult best;
  for (int attempt = 0; attempt < opts.restarts; ++attempt) {
    Rng rng(derive_seed(opts.seed, static_cast<std::uint64_t>(attempt)));
    Eigen::VectorXd x(16);
    for (int i = 0; i < 15; ++i) x(i) = angle(rng);
    const ComplexMatrix u0 = unitary_of(ansatz_circuit(detail::AnsatzResidual::to_params(x)));
    x(15) = std::arg((target.adjoint() * u0).trace());
    x = detail::levenberg_marquardt(residual, x, opts.max_iterations);

    AnsatzParams p = detail::AnsatzResidual::to_params(x);
    const double f = fidelity(unitary_of(ansatz_circuit(p)), target);
    if (attempt == 0 || f > best.fidelity) {
      best.params = p;
      best.fidelity = f;
    }
    best.restarts_used = attempt + 1;
    if (1.0 - best.fidelity <= opts.tol) {
      best.converged = true;
      break;
    }
  }
  return best;
}

// Helstrom POVM -> measurement unitary -> fitted ansatz, for two copies.
struct FittedMeasurement {
  Circuit circuit;
  std::vector<Hypothesis> decision;
  ComplexMatrix target;
  FitResult fit;
};

inline FittedMeasurement fit_helstrom_circuit(const DiscriminationProblem& problem,
                                              const FitOptions& opts = {}) {
  if (problem.copies != 2) throw DomainError("fit_helstrom_circuit: requires M = 2");
  const auto basis = measurement_unitary(helstrom_povm(problem).povm);
  auto fit = fit_ansatz(basis.unitary, opts);
  return {ansatz_circuit(fit.params), basis.decision, basis.unitary, fit};
}

}  // namespace qdisc

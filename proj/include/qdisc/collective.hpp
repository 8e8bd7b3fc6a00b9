#pragma once

// Optimal collective measurement: the Helstrom observable, its error bound,
// and the two-outcome projective POVM that attains it.

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "qdisc/errors.hpp"
#include "qdisc/linalg.hpp"
#include "qdisc/states.hpp"

namespace qdisc {

inline constexpr double kPovmTol = 1e-10;

class Povm {
 public:
  Povm(std::vector<HermitianOperator> elements, std::vector<Hypothesis> decision)
      : elements_(std::move(elements)), decision_(std::move(decision)) {
    if (elements_.empty()) throw DomainError("Povm: no elements");
    if (elements_.size() != decision_.size()) {
      throw DimensionError("Povm: element and decision counts differ");
    }
    const auto d = elements_.front().dim();
    ComplexMatrix sum = ComplexMatrix::Zero(d, d);
    for (std::size_t k = 0; k < elements_.size(); ++k) {
      if (elements_[k].dim() != d) throw DimensionError("Povm: elements have mixed dimensions");
      const double lo = hermitian_eigenvalues(elements_[k]).minCoeff();
      if (lo < -kPovmTol) {
        throw DomainError("Povm: element " + std::to_string(k) + " has eigenvalue " +
                          std::to_string(lo));
      }
      sum += elements_[k].matrix();
    }
    const double defect = (sum - ComplexMatrix::Identity(d, d)).cwiseAbs().maxCoeff();
    if (defect > kPovmTol) {
      throw DomainError("Povm: elements sum to identity only within " + std::to_string(defect));
    }
  }

  const std::vector<HermitianOperator>& elements() const noexcept { return elements_; }
  const std::vector<Hypothesis>& decision() const noexcept { return decision_; }
  std::size_t size() const noexcept { return elements_.size(); }
  Eigen::Index dim() const noexcept { return elements_.front().dim(); }

 private:
  std::vector<HermitianOperator> elements_;
  std::vector<Hypothesis> decision_;
};

struct HelstromSolution {
  HermitianOperator gamma;
  double error_probability;
  Povm povm;  // element 0 decides rho_plus, element 1 decides rho_minus
};

// q rho_+^{(x)M} - (1 - q) rho_-^{(x)M}
inline HermitianOperator gamma(const DiscriminationProblem& p) {
  p.validate();
  const auto plus = tensor_power(make_state(p, Sign::plus), p.copies);
  const auto minus = tensor_power(make_state(p, Sign::minus), p.copies);
  return HermitianOperator(p.q * plus.matrix() - (1.0 - p.q) * minus.matrix());
}

inline double helstrom_error(const DiscriminationProblem& p) {
  const double norm = trace_norm(gamma(p));
  return std::clamp(0.5 * (1.0 - norm), 0.0, std::min(p.q, 1.0 - p.q));
}

// Closed-form single-copy bound from the two eigenvalues of the 2x2 Gamma.
inline double single_copy_closed_form(double alpha, double v, double q) {
  const double bias = 2.0 * q - 1.0;
  const double c = std::cos(alpha);
  const double s = std::sin(alpha);
  const double radius = (1.0 - v) * std::sqrt(bias * bias * c * c + s * s);
  return 0.5 * (1.0 - std::max(std::abs(bias), radius));
}

// Born-rule error of an arbitrary POVM against the problem's two hypotheses.
inline double error_probability(const Povm& povm, const DiscriminationProblem& p) {
  p.validate();
  const auto dim = Eigen::Index{1} << p.copies;
  if (povm.dim() != dim) {
    throw DimensionError("error_probability: POVM dimension " + std::to_string(povm.dim()) +
                         " does not match 2^M = " + std::to_string(dim));
  }
  const auto plus = tensor_power(make_state(p, Sign::plus), p.copies);
  const auto minus = tensor_power(make_state(p, Sign::minus), p.copies);
  double miss_plus = 0.0;   // decide minus given plus
  double miss_minus = 0.0;  // decide plus given minus
  for (std::size_t k = 0; k < povm.size(); ++k) {
    const auto& e = povm.elements()[k].matrix();
    if (povm.decision()[k] == Hypothesis::minus) {
      miss_plus += (plus.matrix() * e).trace().real();
    } else {
      miss_minus += (minus.matrix() * e).trace().real();
    }
  }
  return p.q * miss_plus + (1.0 - p.q) * miss_minus;
}

// Projector onto the strictly positive eigenspace of Gamma decides rho_plus;
// its complement (zero eigenvalues included) decides rho_minus.
inline HelstromSolution helstrom_povm(const DiscriminationProblem& p) {
  auto g = gamma(p);
  const auto eig = hermitian_eig(g);
  const auto d = g.dim();
  ComplexMatrix positive = ComplexMatrix::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    if (eig.values(i) > 0.0) positive += projector(eig.vectors.col(i));
  }
  HermitianOperator p_plus(positive);
  HermitianOperator p_minus(ComplexMatrix(ComplexMatrix::Identity(d, d) - positive));
  const double err =
      std::clamp(0.5 * (1.0 - eig.values.cwiseAbs().sum()), 0.0, std::min(p.q, 1.0 - p.q));
  Povm povm({std::move(p_plus), std::move(p_minus)}, {Hypothesis::plus, Hypothesis::minus});
  return HelstromSolution{std::move(g), err, std::move(povm)};
}

}  // namespace qdisc

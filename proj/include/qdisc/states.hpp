#pragma once

// The two-state qubit family and its tensor powers.

#include <cmath>
#include <numbers>
#include <string>

#include "qdisc/errors.hpp"
#include "qdisc/linalg.hpp"

namespace qdisc {

inline constexpr int kMaxCopies = 6;

enum class Sign { plus, minus };

// Which state the decision rule names.
enum class Hypothesis { plus, minus };

inline const char* to_string(Hypothesis h) { return h == Hypothesis::plus ? "+" : "-"; }

struct DiscriminationProblem {
  double alpha = std::numbers::pi / 4;  // half-angle between the Bloch vectors
  double v = 0.1;                       // mixing: 0 pure, 1 maximally mixed
  double q = 0.5;                       // prior probability of rho_plus
  int copies = 1;

  void validate() const {
    if (!std::isfinite(alpha) || alpha <= 0.0 || alpha > std::numbers::pi / 2) {
      throw DomainError("alpha must lie in (0, pi/2], got " + std::to_string(alpha));
    }
    if (!(v >= 0.0 && v <= 1.0)) throw DomainError("v must lie in [0, 1], got " + std::to_string(v));
    if (!(q >= 0.0 && q <= 1.0)) throw DomainError("q must lie in [0, 1], got " + std::to_string(q));
    if (copies < 1) throw DomainError("copies must be >= 1, got " + std::to_string(copies));
  }

  DiscriminationProblem with_q(double new_q) const {
    auto p = *this;
    p.q = new_q;
    return p;
  }
  DiscriminationProblem with_copies(int m) const {
    auto p = *this;
    p.copies = m;
    return p;
  }
};

// (I + (1 - v)(cos(alpha) Z +/- sin(alpha) X)) / 2
inline DensityMatrix make_state(double alpha, double v, Sign sign) {
  if (!(v >= 0.0 && v <= 1.0)) throw DomainError("make_state: v must lie in [0, 1]");
  if (!std::isfinite(alpha)) throw DomainError("make_state: alpha must be finite");
  const double s = sign == Sign::plus ? 1.0 : -1.0;
  const ComplexMatrix bloch = std::cos(alpha) * pauli::z() + s * std::sin(alpha) * pauli::x();
  return DensityMatrix(0.5 * (pauli::identity() + (1.0 - v) * bloch));
}

inline DensityMatrix make_state(const DiscriminationProblem& p, Sign sign) {
  return make_state(p.alpha, p.v, sign);
}

inline DensityMatrix tensor_power(const DensityMatrix& rho, int m, int max_copies = kMaxCopies) {
  if (m < 1) throw DomainError("tensor_power: m must be >= 1, got " + std::to_string(m));
  if (m > max_copies) {
    throw ResourceError("tensor_power: m = " + std::to_string(m) + " exceeds cap " +
                        std::to_string(max_copies));
  }
  ComplexMatrix out = rho.matrix();
  for (int k = 1; k < m; ++k) out = kron(out, rho.matrix());
  return DensityMatrix(std::move(out));
}

}  // namespace qdisc

#pragma once

// Dense complex linear algebra for small (<= 64x64) qubit operators.

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "qdisc/errors.hpp"

namespace qdisc {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kDensityTol = 1e-12;
inline constexpr double kEigenResidualTol = 1e-10;

namespace pauli {
inline ComplexMatrix identity() { return ComplexMatrix::Identity(2, 2); }
inline ComplexMatrix x() {
  ComplexMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}
inline ComplexMatrix y() {
  ComplexMatrix m(2, 2);
  m << 0, Complex(0, -1), Complex(0, 1), 0;
  return m;
}
inline ComplexMatrix z() {
  ComplexMatrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}
}  // namespace pauli

inline bool is_square(const ComplexMatrix& m) { return m.rows() == m.cols() && m.rows() > 0; }

inline bool all_finite(const ComplexMatrix& m) {
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    const Complex z = m.data()[i];
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  }
  return true;
}

inline void require_square(const ComplexMatrix& m, const char* what) {
  if (!is_square(m)) {
    throw DimensionError(std::string(what) + ": matrix is not square (" + std::to_string(m.rows()) +
                         "x" + std::to_string(m.cols()) + ")");
  }
  if (!all_finite(m)) throw DomainError(std::string(what) + ": matrix has non-finite entries");
}

// Largest entrywise |a_ij - conj(a_ji)|.
inline double hermiticity_defect(const ComplexMatrix& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_square(a, "kron");
  require_square(b, "kron");
  return Eigen::kroneckerProduct(a, b).eval();
}

// Hermitian matrix. Construction symmetrizes away floating-point drift below
// kHermitianTol and rejects anything larger.
class HermitianOperator {
 public:
  HermitianOperator() = default;
  explicit HermitianOperator(ComplexMatrix m) {
    require_square(m, "HermitianOperator");
    const double defect = hermiticity_defect(m);
    if (defect > kHermitianTol) {
      throw DomainError("HermitianOperator: |A - A^dagger| = " + std::to_string(defect) +
                        " exceeds tolerance");
    }
    matrix_ = (m + m.adjoint()) / 2.0;
  }

  const ComplexMatrix& matrix() const noexcept { return matrix_; }
  Eigen::Index dim() const noexcept { return matrix_.rows(); }
  Complex trace() const { return matrix_.trace(); }

  friend HermitianOperator operator+(const HermitianOperator& a, const HermitianOperator& b) {
    return HermitianOperator(a.matrix_ + b.matrix_);
  }
  friend HermitianOperator operator-(const HermitianOperator& a, const HermitianOperator& b) {
    return HermitianOperator(a.matrix_ - b.matrix_);
  }
  friend HermitianOperator operator*(double s, const HermitianOperator& a) {
    return HermitianOperator(s * a.matrix_);
  }

 private:
  ComplexMatrix matrix_;
};

struct EigenDecomposition {
  RealVector values;     // ascending
  ComplexMatrix vectors;  // orthonormal columns
};

namespace detail {
inline double operator_scale(const ComplexMatrix& m) {
  return std::max(1.0, m.cwiseAbs().maxCoeff() * static_cast<double>(m.rows()));
}
}  // namespace detail

inline EigenDecomposition hermitian_eig(const HermitianOperator& h) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h.matrix());
  if (solver.info() != Eigen::Success) {
    throw NumericalError("hermitian_eig: eigensolver did not converge", INFINITY);
  }
  EigenDecomposition out{solver.eigenvalues(), solver.eigenvectors()};
  const ComplexMatrix& v = out.vectors;
  const double residual =
      (h.matrix() * v - v * out.values.cast<Complex>().asDiagonal()).cwiseAbs().maxCoeff();
  const auto n = h.dim();
  const double unitarity = (v.adjoint() * v - ComplexMatrix::Identity(n, n)).cwiseAbs().maxCoeff();
  if (residual > kEigenResidualTol * detail::operator_scale(h.matrix()) ||
      unitarity > kEigenResidualTol) {
    throw NumericalError("hermitian_eig: residual " + std::to_string(residual) +
                             " above tolerance",
                         std::max(residual, unitarity));
  }
  return out;
}

inline RealVector hermitian_eigenvalues(const HermitianOperator& h) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h.matrix(), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("hermitian_eigenvalues: eigensolver did not converge", INFINITY);
  }
  return solver.eigenvalues();
}

// Sum of absolute eigenvalues.
inline double trace_norm(const HermitianOperator& h) {
  return hermitian_eigenvalues(h).cwiseAbs().sum();
}

// Quantum state: Hermitian, unit trace, positive semidefinite.
class DensityMatrix {
 public:
  explicit DensityMatrix(HermitianOperator op) : op_(std::move(op)) {
    const Complex tr = op_.trace();
    if (std::abs(tr - Complex(1.0)) > kDensityTol) {
      throw DomainError("DensityMatrix: trace " + std::to_string(tr.real()) + " is not 1");
    }
    const double lo = hermitian_eigenvalues(op_).minCoeff();
    if (lo < -kDensityTol) {
      throw DomainError("DensityMatrix: negative eigenvalue " + std::to_string(lo));
    }
  }
  explicit DensityMatrix(ComplexMatrix m) : DensityMatrix(HermitianOperator(std::move(m))) {}

  const HermitianOperator& op() const noexcept { return op_; }
  const ComplexMatrix& matrix() const noexcept { return op_.matrix(); }
  Eigen::Index dim() const noexcept { return op_.dim(); }

 private:
  HermitianOperator op_;
};

inline ComplexMatrix projector(const ComplexVector& v) { return v * v.adjoint(); }

}  // namespace qdisc

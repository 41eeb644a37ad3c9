#pragma once

// Small dense Hermitian operator algebra. Everything here is a free function
// template over Eigen expressions, so callers may pass products, sums or
// blocks without materializing them first.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "semisic/core.hpp"

namespace semisic {

template <typename Real>
using OperatorX = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Real>
using KetX = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;

template <typename Derived>
void require_square(const Eigen::MatrixBase<Derived>& a, const char* what) {
  if (a.rows() != a.cols()) {
    throw Error(ErrorCode::kDimensionMismatch,
                std::string(what) + ": operator is not square");
  }
}

template <typename DerivedA, typename DerivedB>
void require_same_dim(const Eigen::MatrixBase<DerivedA>& a,
                      const Eigen::MatrixBase<DerivedB>& b, const char* what) {
  require_square(a, what);
  require_square(b, what);
  if (a.rows() != b.rows()) {
    throw Error(ErrorCode::kDimensionMismatch,
                std::string(what) + ": dimensions " + std::to_string(a.rows()) +
                    " and " + std::to_string(b.rows()) + " differ");
  }
}

/// Largest |A_ij - conj(A_ji)|.
template <typename Derived>
typename Derived::RealScalar hermiticity_error(const Eigen::MatrixBase<Derived>& a) {
  return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

template <typename Derived>
bool is_hermitian(const Eigen::MatrixBase<Derived>& a, const Tolerances& tol = {}) {
  return a.rows() == a.cols() &&
         hermiticity_error(a) <= tol.tol_herm * std::max<double>(1.0, a.cwiseAbs().maxCoeff());
}

/// Tr[A B]. The imaginary part must vanish for Hermitian inputs and is
/// checked against tol_herm relative to the operand sizes.
template <typename DerivedA, typename DerivedB>
typename DerivedA::RealScalar hs_inner(const Eigen::MatrixBase<DerivedA>& a,
                                       const Eigen::MatrixBase<DerivedB>& b,
                                       const Tolerances& tol = {}) {
  using Real = typename DerivedA::RealScalar;
  require_same_dim(a, b, "hs_inner");
  const auto value = (a.array() * b.transpose().array()).sum();
  const Real scale = std::max<Real>(Real(1), a.norm() * b.norm());
  if (std::abs(value.imag()) > Real(tol.tol_herm) * scale) {
    throw Error(ErrorCode::kNonNegligibleImaginaryPart,
                "hs_inner: imaginary part " + std::to_string(double(value.imag())) +
                    " is not negligible");
  }
  return value.real();
}

/// |v><v| for a normalized ket.
template <typename Derived>
OperatorX<typename Derived::RealScalar> outer(const Eigen::MatrixBase<Derived>& v,
                                              const Tolerances& tol = {}) {
  static_assert(Derived::ColsAtCompileTime == 1 || Derived::ColsAtCompileTime == Eigen::Dynamic);
  if (v.cols() != 1) {
    throw Error(ErrorCode::kDimensionMismatch, "outer: expected a column vector");
  }
  if (std::abs(v.squaredNorm() - 1) > tol.tol_norm) {
    throw Error(ErrorCode::kNotNormalized,
                "outer: squared norm " + std::to_string(double(v.squaredNorm())) + " != 1");
  }
  return v * v.adjoint();
}

/// Eigen-decomposition of a Hermitian operator: ascending eigenvalues,
/// eigenvectors as columns with the first non-negligible amplitude made
/// real and positive.
template <typename Real>
struct HermitianEigen {
  Eigen::Matrix<Real, Eigen::Dynamic, 1> values;
  OperatorX<Real> vectors;
};

template <typename Derived>
HermitianEigen<typename Derived::RealScalar> eig_hermitian(const Eigen::MatrixBase<Derived>& a,
                                                           const Tolerances& tol = {}) {
  using Real = typename Derived::RealScalar;
  require_square(a, "eig_hermitian");
  const OperatorX<Real> m = a;
  if (!is_hermitian(m, tol)) {
    throw Error(ErrorCode::kNonNegligibleImaginaryPart, "eig_hermitian: operator is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<OperatorX<Real>> solver(m);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::kConvergenceFailure, "eig_hermitian: eigensolver did not converge");
  }
  HermitianEigen<Real> out{solver.eigenvalues(), solver.eigenvectors()};
  const Real cutoff = std::sqrt(std::numeric_limits<Real>::epsilon());
  for (Eigen::Index j = 0; j < out.vectors.cols(); ++j) {
    auto col = out.vectors.col(j);
    for (Eigen::Index i = 0; i < col.size(); ++i) {
      if (std::abs(col(i)) > cutoff) {
        col *= std::conj(col(i)) / std::abs(col(i));
        col(i) = std::abs(col(i));
        break;
      }
    }
  }
  return out;
}

template <typename Derived>
bool is_psd(const Eigen::MatrixBase<Derived>& a, const Tolerances& tol = {}) {
  return eig_hermitian(a, tol).values(0) >= -tol.tol_psd;
}

template <typename Derived>
int rank(const Eigen::MatrixBase<Derived>& a, const Tolerances& tol = {}) {
  using Real = typename Derived::RealScalar;
  const auto values = eig_hermitian(a, tol).values;
  const Real norm = values.cwiseAbs().maxCoeff();
  const Real cutoff = Real(tol.tol_rank) * std::max<Real>(Real(1), norm);
  return static_cast<int>((values.array() > cutoff).count());
}

/// A = c0 I + cx X + cy Y + cz Z.
template <typename Real>
struct PauliCoefficients {
  Real c0{}, cx{}, cy{}, cz{};
};

template <typename Derived>
PauliCoefficients<typename Derived::RealScalar> pauli_decompose(
    const Eigen::MatrixBase<Derived>& a, const Tolerances& tol = {}) {
  using Real = typename Derived::RealScalar;
  if (a.rows() != 2 || a.cols() != 2) {
    throw Error(ErrorCode::kDimensionMismatch, "pauli_decompose: expected a 2x2 operator");
  }
  if (!is_hermitian(a, tol)) {
    throw Error(ErrorCode::kNonNegligibleImaginaryPart, "pauli_decompose: operator is not Hermitian");
  }
  const std::complex<Real> i(0, 1);
  return {
      (a(0, 0) + a(1, 1)).real() / 2,
      (a(0, 1) + a(1, 0)).real() / 2,
      (i * (a(0, 1) - a(1, 0))).real() / 2,
      (a(0, 0) - a(1, 1)).real() / 2,
  };
}

template <typename Real>
OperatorX<Real> pauli_recompose(const PauliCoefficients<Real>& c) {
  using C = std::complex<Real>;
  OperatorX<Real> a(2, 2);
  a << C(c.c0 + c.cz, 0), C(c.cx, -c.cy),
       C(c.cx, c.cy), C(c.c0 - c.cz, 0);
  return a;
}

}  // namespace semisic

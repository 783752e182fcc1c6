// Copyright 2026 The psicomplete Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Small dense complex linear algebra: Hermitian operators, their spectra,
// inverse square roots, null spaces and real homogeneous systems. Everything
// is templated on the real scalar type; the rest of the library uses the
// double-precision aliases at the bottom of this file.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "psic/error.hpp"

namespace psic {

template <typename Scalar>
using ComplexMatrixT = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using ComplexVectorT = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;
template <typename Scalar>
using RealMatrixT = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using RealVectorT = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Largest entry modulus, 0 for an empty matrix.
template <typename Derived>
typename Derived::RealScalar max_abs(const Eigen::MatrixBase<Derived>& m) {
  if (m.size() == 0) return 0;
  return m.cwiseAbs().maxCoeff();
}

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if (!std::isfinite(std::abs(m(i, j)))) return false;
    }
  }
  return true;
}

/// (M + M^dagger) / 2. Used to scrub roundoff from products that are
/// Hermitian in exact arithmetic.
template <typename Derived>
auto hermitian_part(const Eigen::MatrixBase<Derived>& m) {
  using Plain = typename Derived::PlainObject;
  Plain h = (m + m.adjoint()) / typename Derived::RealScalar(2);
  return h;
}

/// Square complex matrix equal to its adjoint to 1e-12 relative to its
/// largest entry. Construction validates; the matrix is immutable after.
template <typename Scalar>
class HermitianOperatorT {
 public:
  using Matrix = ComplexMatrixT<Scalar>;
  using Vector = ComplexVectorT<Scalar>;

  static constexpr Scalar kHermiticityTol = Scalar(1e-12);

  HermitianOperatorT() = default;

  explicit HermitianOperatorT(Matrix m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols() || m_.rows() == 0) {
      std::ostringstream os;
      os << "operator must be square and non-empty, got " << m_.rows() << "x" << m_.cols();
      throw Error(ErrorCode::DimensionMismatch, os.str());
    }
    if (!all_finite(m_)) throw Error(ErrorCode::NonFinite, "operator has non-finite entries");
    const Scalar scale = max_abs(m_);
    const Scalar skew = max_abs(Matrix(m_ - m_.adjoint()));
    if (skew > kHermiticityTol * scale) {
      std::ostringstream os;
      os << "max |M - M^dagger| = " << skew << " exceeds " << kHermiticityTol << " * " << scale;
      throw Error(ErrorCode::NotHermitian, os.str());
    }
  }

  /// Builds from a matrix that is Hermitian up to roundoff by taking its
  /// Hermitian part.
  static HermitianOperatorT from_hermitian_part(const Matrix& m) {
    return HermitianOperatorT(Matrix(hermitian_part(m)));
  }

  /// |v><v|
  static HermitianOperatorT outer(const Vector& v) {
    return HermitianOperatorT(Matrix(v * v.adjoint()));
  }

  static HermitianOperatorT identity(Eigen::Index dim) {
    return HermitianOperatorT(Matrix::Identity(dim, dim));
  }

  Eigen::Index dim() const { return m_.rows(); }
  const Matrix& matrix() const { return m_; }

  /// <v|M|v>, real by Hermiticity; the imaginary roundoff is dropped.
  Scalar expectation(const Vector& v) const { return v.dot(m_ * v).real(); }

  friend bool operator==(const HermitianOperatorT& a, const HermitianOperatorT& b) {
    return a.m_.rows() == b.m_.rows() && a.m_ == b.m_;
  }

 private:
  Matrix m_;
};

template <typename Scalar>
struct EigenDecompositionT {
  RealVectorT<Scalar> values;      // ascending
  ComplexMatrixT<Scalar> vectors;  // orthonormal columns
};

/// Spectrum of a Hermitian operator, eigenvalues ascending.
template <typename Scalar>
EigenDecompositionT<Scalar> hermitian_eig(const HermitianOperatorT<Scalar>& op,
                                          const std::string& label = "operator") {
  Eigen::SelfAdjointEigenSolver<ComplexMatrixT<Scalar>> solver(op.matrix());
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::NonConvergence,
                "Hermitian eigensolver did not converge for " + label);
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

/// Reassembles V diag(values) V^dagger, with f applied to each eigenvalue.
template <typename Scalar, typename F>
HermitianOperatorT<Scalar> spectral_map(const EigenDecompositionT<Scalar>& eig, F f) {
  RealVectorT<Scalar> mapped = eig.values.unaryExpr(f);
  ComplexMatrixT<Scalar> m =
      eig.vectors * mapped.template cast<std::complex<Scalar>>().asDiagonal() * eig.vectors.adjoint();
  return HermitianOperatorT<Scalar>::from_hermitian_part(m);
}

namespace detail {
template <typename Scalar>
void require_positive_definite(const EigenDecompositionT<Scalar>& eig, Scalar eps) {
  const Scalar largest = eig.values.maxCoeff();
  const Scalar smallest = eig.values.minCoeff();
  if (!(largest > 0) || smallest <= eps * largest) {
    std::ostringstream os;
    os << "smallest eigenvalue " << smallest << " <= " << eps << " * largest (" << largest << ")";
    throw Error(ErrorCode::SingularOperator, os.str());
  }
}
}  // namespace detail

/// M^{-1/2} for positive definite M. eps is relative to the largest
/// eigenvalue; anything at or below it is treated as singular.
template <typename Scalar>
HermitianOperatorT<Scalar> psd_inv_sqrt(const HermitianOperatorT<Scalar>& op, Scalar eps = Scalar(1e-10)) {
  const auto eig = hermitian_eig(op, "psd_inv_sqrt input");
  detail::require_positive_definite(eig, eps);
  return spectral_map(eig, [](Scalar x) { return Scalar(1) / std::sqrt(x); });
}

/// M^{1/2} for positive definite M, same singularity rule as psd_inv_sqrt.
template <typename Scalar>
HermitianOperatorT<Scalar> psd_sqrt(const HermitianOperatorT<Scalar>& op, Scalar eps = Scalar(1e-10)) {
  const auto eig = hermitian_eig(op, "psd_sqrt input");
  detail::require_positive_definite(eig, eps);
  return spectral_map(eig, [](Scalar x) { return std::sqrt(x); });
}

/// Orthonormal basis of the eigenspace with eigenvalues <= tol, ordered by
/// ascending eigenvalue. Empty when the operator is (numerically) invertible.
template <typename Scalar>
std::vector<ComplexVectorT<Scalar>> null_space(const HermitianOperatorT<Scalar>& op,
                                               Scalar tol = Scalar(1e-10)) {
  const auto eig = hermitian_eig(op, "null_space input");
  std::vector<ComplexVectorT<Scalar>> out;
  for (Eigen::Index k = 0; k < eig.values.size(); ++k) {
    if (eig.values(k) <= tol) out.emplace_back(eig.vectors.col(k));
  }
  return out;
}

/// Unit vector x with rows * x = 0. Each row of `rows` is one homogeneous
/// equation; rows.cols() is the number of unknowns. Picks the right singular
/// vector of the smallest singular value, signed so its first non-negligible
/// coordinate is positive. Throws RankTooHigh when no such vector meets
/// max |row . x| <= 1e-9 (1 + max row norm).
template <typename Scalar>
RealVectorT<Scalar> real_homogeneous_solve(const RealMatrixT<Scalar>& rows) {
  const Eigen::Index n = rows.cols();
  if (n == 0) throw Error(ErrorCode::DimensionTooSmall, "real_homogeneous_solve needs at least one unknown");
  if (!all_finite(rows)) throw Error(ErrorCode::NonFinite, "real_homogeneous_solve: non-finite row entries");

  RealVectorT<Scalar> x;
  if (rows.rows() == 0) {
    x = RealVectorT<Scalar>::Unit(n, 0);
  } else {
    Eigen::JacobiSVD<RealMatrixT<Scalar>> svd(rows, Eigen::ComputeFullV);
    x = svd.matrixV().col(n - 1);
  }

  const Scalar big = x.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(x(i)) > Scalar(1e-12) * big) {
      if (x(i) < 0) x = -x;
      break;
    }
  }

  if (rows.rows() > 0) {
    const Scalar residual = (rows * x).cwiseAbs().maxCoeff();
    const Scalar row_norm = rows.rowwise().norm().maxCoeff();
    const Scalar bound = Scalar(1e-9) * (Scalar(1) + row_norm);
    if (residual > bound) {
      std::ostringstream os;
      os << "best candidate leaves residual " << residual << " > " << bound << " (" << rows.rows()
         << " equations, " << n << " unknowns)";
      throw Error(ErrorCode::RankTooHigh, os.str());
    }
  }
  return x;
}

using ComplexMatrix = ComplexMatrixT<double>;
using ComplexVector = ComplexVectorT<double>;
using RealMatrix = RealMatrixT<double>;
using RealVector = RealVectorT<double>;
using HermitianOperator = HermitianOperatorT<double>;
using EigenDecomposition = EigenDecompositionT<double>;

}  // namespace psic

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <complex>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qroofs/tolerances.hpp"

namespace qroofs {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

namespace detail {

inline void require_square(const Matrix& m, const char* who) {
  if (m.rows() == 0 || m.rows() != m.cols()) {
    std::ostringstream msg;
    msg << who << ": expected a nonempty square matrix, got " << m.rows()
        << "x" << m.cols();
    throw std::invalid_argument(msg.str());
  }
}

inline double hermiticity_defect(const Matrix& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

}  // namespace detail

// Square matrix validated to equal its conjugate transpose within
// tol::hermiticity * (1 + max entry). Stored exactly symmetrized so the
// eigensolver never sees the (tolerated) defect.
class HermitianOperator {
 public:
  explicit HermitianOperator(Matrix m) {
    detail::require_square(m, "HermitianOperator");
    const double scale = 1.0 + m.cwiseAbs().maxCoeff();
    const double defect = detail::hermiticity_defect(m);
    if (defect > tol::hermiticity * scale) {
      std::ostringstream msg;
      msg << "HermitianOperator: matrix is not Hermitian, max |X_ij - conj(X_ji)| = "
          << defect;
      throw std::invalid_argument(msg.str());
    }
    mat_ = 0.5 * (m + m.adjoint());
  }

  int dim() const { return static_cast<int>(mat_.rows()); }
  const Matrix& matrix() const { return mat_; }

 private:
  Matrix mat_;
};

// Normalized pure state.
class StateVector {
 public:
  explicit StateVector(Vector v) : vec_(std::move(v)) {
    if (vec_.size() == 0) {
      throw std::invalid_argument("StateVector: empty vector");
    }
    const double n = vec_.norm();
    if (std::abs(n - 1.0) > tol::state_norm) {
      std::ostringstream msg;
      msg << "StateVector: norm " << n << " is not 1 within " << tol::state_norm;
      throw std::invalid_argument(msg.str());
    }
  }

  int dim() const { return static_cast<int>(vec_.size()); }
  const Vector& vector() const { return vec_; }
  Matrix projector() const { return vec_ * vec_.adjoint(); }

 private:
  Vector vec_;
};

// Hermitian, unit trace, eigenvalues above tol::psd_floor.
class DensityMatrix {
 public:
  explicit DensityMatrix(Matrix m) : op_(std::move(m)) {
    const double tr = op_.matrix().trace().real();
    if (std::abs(tr - 1.0) > tol::trace_unit) {
      std::ostringstream msg;
      msg << "DensityMatrix: trace " << tr << " is not 1 within " << tol::trace_unit;
      throw std::invalid_argument(msg.str());
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(op_.matrix(), Eigen::EigenvaluesOnly);
    const double min_eig = es.eigenvalues().minCoeff();
    if (min_eig < tol::psd_floor) {
      std::ostringstream msg;
      msg << "DensityMatrix: not positive semidefinite, offending eigenvalue "
          << min_eig;
      throw std::invalid_argument(msg.str());
    }
  }

  explicit DensityMatrix(const StateVector& psi) : DensityMatrix(psi.projector()) {}

  int dim() const { return op_.dim(); }
  const Matrix& matrix() const { return op_.matrix(); }
  const HermitianOperator& hermitian() const { return op_; }

 private:
  HermitianOperator op_;
};

// Eigenvalues sorted descending; eigenvector columns aligned with them.
struct EigenDecomposition {
  RealVector eigenvalues;
  Matrix eigenvectors;

  int dim() const { return static_cast<int>(eigenvalues.size()); }

  // Number of eigenvalues above rel * lambda_max.
  int rank(double rel = tol::rank_threshold) const {
    const double cut = rel * std::max(eigenvalues(0), 0.0);
    int r = 0;
    for (int i = 0; i < eigenvalues.size(); ++i) {
      if (eigenvalues(i) > cut) ++r;
    }
    return r;
  }

  Matrix reconstruct() const {
    return eigenvectors * eigenvalues.asDiagonal() * eigenvectors.adjoint();
  }

  double reconstruction_residual(const Matrix& original) const {
    return (reconstruct() - original).cwiseAbs().maxCoeff();
  }
};

inline EigenDecomposition eigendecompose(const HermitianOperator& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h.matrix());
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("eigendecompose: eigensolver failed to converge");
  }
  const int n = h.dim();
  EigenDecomposition out;
  out.eigenvalues = RealVector(n);
  out.eigenvectors = Matrix(n, n);
  // Eigen returns ascending order; flip to descending.
  for (int i = 0; i < n; ++i) {
    out.eigenvalues(i) = es.eigenvalues()(n - 1 - i);
    out.eigenvectors.col(i) = es.eigenvectors().col(n - 1 - i);
  }
  return out;
}

inline EigenDecomposition eigendecompose(const DensityMatrix& rho) {
  return eigendecompose(rho.hermitian());
}

// A expressed in the eigenbasis: B = V^dagger A V, symmetrized to keep the
// result exactly Hermitian.
inline Matrix conjugate_to_eigenbasis(const HermitianOperator& a,
                                      const EigenDecomposition& basis) {
  if (a.dim() != basis.dim()) {
    throw std::invalid_argument(
        "conjugate_to_eigenbasis: operator and basis dimensions differ");
  }
  Matrix b = basis.eigenvectors.adjoint() * a.matrix() * basis.eigenvectors;
  return 0.5 * (b + b.adjoint());
}

// [[Re H, -Im H], [Im H, Re H]]: real symmetric image of a Hermitian matrix.
// Spectrum of the image is the spectrum of H with every multiplicity doubled,
// so positive semidefiniteness carries over in both directions.
inline RealMatrix complex_to_real_embedding(const Matrix& h) {
  detail::require_square(h, "complex_to_real_embedding");
  const int n = static_cast<int>(h.rows());
  RealMatrix out(2 * n, 2 * n);
  out.topLeftCorner(n, n) = h.real();
  out.topRightCorner(n, n) = -h.imag();
  out.bottomLeftCorner(n, n) = h.imag();
  out.bottomRightCorner(n, n) = h.real();
  return out;
}

// Inverse of the embedding for matrices known to carry the block structure;
// averages the redundant blocks so roundoff drift cancels.
inline Matrix real_embedding_to_complex(const RealMatrix& m) {
  if (m.rows() != m.cols() || m.rows() % 2 != 0) {
    throw std::invalid_argument("real_embedding_to_complex: expected even square matrix");
  }
  const int n = static_cast<int>(m.rows()) / 2;
  RealMatrix re = 0.5 * (m.topLeftCorner(n, n) + m.bottomRightCorner(n, n));
  RealMatrix im = 0.5 * (m.bottomLeftCorner(n, n) - m.topRightCorner(n, n));
  return re.cast<Complex>() + Complex(0, 1) * im.cast<Complex>();
}

}  // namespace qroofs

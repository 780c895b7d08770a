#pragma once

#include <cmath>
#include <limits>

#include "qroofs/decomposition.hpp"
#include "qroofs/hermitian.hpp"
#include "qroofs/means.hpp"
#include "qroofs/tolerances.hpp"

namespace qroofs {

inline double expectation(const DensityMatrix& rho, const HermitianOperator& a) {
  return (a.matrix() * rho.matrix()).trace().real();
}

inline double pure_expectation(const Vector& psi, const Matrix& a) {
  return (psi.adjoint() * a * psi)(0, 0).real();
}

inline double pure_variance(const Vector& psi, const Matrix& a) {
  Vector w = a * psi;
  const double second = w.squaredNorm();
  const double first = (psi.adjoint() * w)(0, 0).real();
  return second - first * first;
}

// (Delta A)^2 = <A^2> - <A>^2.
inline double variance(const DensityMatrix& rho, const HermitianOperator& a) {
  const Matrix& m = a.matrix();
  const double second = (m * m * rho.matrix()).trace().real();
  const double first = expectation(rho, a);
  return second - first * first;
}

inline double variance(const StateVector& psi, const HermitianOperator& a) {
  return pure_variance(psi.vector(), a.matrix());
}

// Quantum Fisher information of the symmetric-logarithmic-derivative kind,
// evaluated in the eigenbasis of the state. Terms whose eigenvalue pair sums
// to at most tol::qfi_term_floor belong to the kernel and are skipped.
inline double qfi(const DensityMatrix& rho, const HermitianOperator& a) {
  auto eig = eigendecompose(rho);
  Matrix b = conjugate_to_eigenbasis(a, eig);
  const int n = eig.dim();
  double out = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const double sum = eig.eigenvalues(i) + eig.eigenvalues(j);
      if (sum <= tol::qfi_term_floor) continue;
      const double diff = eig.eigenvalues(i) - eig.eigenvalues(j);
      out += 2.0 * diff * diff / sum * std::norm(b(i, j));
    }
  }
  return out;
}

namespace detail {

// Square-root-type spectral weights have unbounded slope at zero, so kernel
// eigenvalues reported as eigensolver dust (order machine epsilon, either
// sign) would surface as sqrt(epsilon)-sized terms. Anything below the kernel
// floor is therefore snapped to exactly zero before use.
inline RealVector kernel_clipped(const RealVector& eigenvalues) {
  RealVector out = eigenvalues;
  for (int i = 0; i < out.size(); ++i) {
    if (out(i) < tol::qfi_term_floor) out(i) = 0.0;
  }
  return out;
}

}  // namespace detail

// Tr(A^2 rho) - Tr(A rho^1/2 A rho^1/2), written as the manifestly
// nonnegative eigenbasis sum.
inline double skew_information(const DensityMatrix& rho, const HermitianOperator& a) {
  auto eig = eigendecompose(rho);
  Matrix b = conjugate_to_eigenbasis(a, eig);
  const RealVector lambda = detail::kernel_clipped(eig.eigenvalues);
  const int n = eig.dim();
  double out = 0.0;
  for (int i = 0; i < n; ++i) {
    const double ri = std::sqrt(lambda(i));
    for (int j = 0; j < n; ++j) {
      const double rj = std::sqrt(lambda(j));
      out += 0.5 * (ri - rj) * (ri - rj) * std::norm(b(i, j));
    }
  }
  return out;
}

// Mean-indexed variance family. The raw value is the eigenbasis sum
// sum_ij m(lambda_i, lambda_j) |A_ij|^2 - (Tr A rho)^2; the normalized value
// divides by 2 m(1,0) so the arithmetic member reduces to the variance.
inline double generalized_variance(const DensityMatrix& rho, const HermitianOperator& a,
                                   const MeanFunction& mean, bool normalized = true) {
  if (normalized && mean.at_one_zero() == 0.0) {
    std::ostringstream msg;
    msg << "generalized_variance: mean '" << mean.name
        << "' has m(1,0) = 0, the normalized value is undefined; request the raw value";
    throw std::domain_error(msg.str());
  }
  auto eig = eigendecompose(rho);
  Matrix b = conjugate_to_eigenbasis(a, eig);
  const RealVector lambda = detail::kernel_clipped(eig.eigenvalues);
  const int n = eig.dim();
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      sum += mean(lambda(i), lambda(j)) * std::norm(b(i, j));
    }
  }
  double mean_a = 0.0;
  for (int i = 0; i < n; ++i) mean_a += lambda(i) * b(i, i).real();
  const double raw = sum - mean_a * mean_a;
  return normalized ? raw / (2.0 * mean.at_one_zero()) : raw;
}

// Mean-indexed Fisher family: raw value sums (lambda_i - lambda_j)^2 /
// m(lambda_i, lambda_j) |A_ij|^2 over pairs outside the kernel; pairs with a
// vanishing mean but nonvanishing numerator diverge and yield +infinity.
// The normalized value is 2 m(1,0) times the raw one, which is identically
// zero for means with m(1,0) = 0.
inline double generalized_qfi(const DensityMatrix& rho, const HermitianOperator& a,
                              const MeanFunction& mean, bool normalized = true) {
  if (normalized && mean.at_one_zero() == 0.0) return 0.0;
  auto eig = eigendecompose(rho);
  Matrix b = conjugate_to_eigenbasis(a, eig);
  const RealVector lambda = detail::kernel_clipped(eig.eigenvalues);
  const int n = eig.dim();
  double raw = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const double li = lambda(i);
      const double lj = lambda(j);
      if (li + lj <= tol::qfi_term_floor) continue;
      const double num = (li - lj) * (li - lj) * std::norm(b(i, j));
      const double den = mean(li, lj);
      if (den == 0.0) {
        if (num == 0.0) continue;
        return std::numeric_limits<double>::infinity();
      }
      raw += num / den;
    }
  }
  return normalized ? 2.0 * mean.at_one_zero() * raw : raw;
}

// Variance plus the linear entropy: (Delta A)^2 + 1 - Tr(rho^2).
inline double quadratic_variance(const DensityMatrix& rho, const HermitianOperator& a) {
  const double purity = rho.matrix().squaredNorm();  // Frobenius^2 = Tr(rho^2)
  return variance(rho, a) + 1.0 - purity;
}

struct VarianceSplit {
  double quantum_part;    // weighted average of the subensemble variances
  double classical_part;  // weighted spread of the subensemble expectations
};

inline VarianceSplit variance_split(const PureDecomposition& decomposition,
                                    const HermitianOperator& a) {
  double mean = 0.0;
  for (int k = 0; k < decomposition.size(); ++k) {
    mean += decomposition.weight(k) *
            pure_expectation(decomposition.state(k), a.matrix());
  }
  VarianceSplit out{0.0, 0.0};
  for (int k = 0; k < decomposition.size(); ++k) {
    const double p = decomposition.weight(k);
    const double e = pure_expectation(decomposition.state(k), a.matrix());
    out.quantum_part += p * pure_variance(decomposition.state(k), a.matrix());
    out.classical_part += p * (e - mean) * (e - mean);
  }
  return out;
}

}  // namespace qroofs

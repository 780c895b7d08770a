#pragma once

// Shared helpers for the test suites: fixed small operators, seeded random
// matrix generators, and comparison shorthands.

#include <complex>
#include <random>

#include "qroofs/hermitian.hpp"

namespace testsupport {

using qroofs::Complex;
using qroofs::Matrix;
using qroofs::Vector;

inline Matrix pauli_x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

inline Matrix pauli_y() {
  Matrix m(2, 2);
  m << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
  return m;
}

inline Matrix pauli_z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

inline Vector bell_phi_plus() {
  Vector v(4);
  v << 1 / std::sqrt(2.0), 0, 0, 1 / std::sqrt(2.0);
  return v;
}

// Dense complex matrix with independent standard normal real/imag parts.
inline Matrix ginibre(int rows, int cols, std::mt19937_64& gen) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      m(i, j) = Complex(normal(gen), normal(gen));
    }
  }
  return m;
}

inline qroofs::HermitianOperator random_hermitian(int dim, std::mt19937_64& gen) {
  Matrix m = ginibre(dim, dim, gen);
  return qroofs::HermitianOperator(0.5 * (m + m.adjoint()));
}

inline qroofs::DensityMatrix random_density(int dim, std::mt19937_64& gen,
                                            int rank = -1) {
  if (rank < 0) rank = dim;
  Matrix g = ginibre(dim, rank, gen);
  Matrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return qroofs::DensityMatrix(rho);
}

inline qroofs::StateVector random_state(int dim, std::mt19937_64& gen) {
  Vector v = ginibre(dim, 1, gen).col(0);
  v.normalize();
  return qroofs::StateVector(v);
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace testsupport

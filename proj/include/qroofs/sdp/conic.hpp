#pragma once

#include <cmath>
#include <string>
#include <tuple>
#include <vector>

#include "qroofs/hermitian.hpp"

namespace qroofs::sdp {

// Orthonormal Hermitian matrix basis under <A,B> = Re Tr(A^dag B):
// diagonal units first, then for each upper pair (m,n) the real and the
// imaginary combination.  Coordinates in this basis are the real parameter
// vector of every conic program below.
struct HermitianBasis {
  explicit HermitianBasis(int dim) : dim_(dim) {}

  int dim() const { return dim_; }
  int size() const { return dim_ * dim_; }

  // Entries of basis element l as (row, col, value) triplets.
  std::vector<std::tuple<int, int, Complex>> element(int l) const {
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    if (l < dim_) return {{l, l, Complex(1.0, 0.0)}};
    int k = l - dim_;
    const bool imaginary = k >= dim_ * (dim_ - 1) / 2;
    if (imaginary) k -= dim_ * (dim_ - 1) / 2;
    // k-th upper pair in row-major order.
    int m = 0;
    int remaining = k;
    while (remaining >= dim_ - 1 - m) {
      remaining -= dim_ - 1 - m;
      ++m;
    }
    const int n = m + 1 + remaining;
    if (imaginary) {
      return {{m, n, Complex(0.0, inv_sqrt2)}, {n, m, Complex(0.0, -inv_sqrt2)}};
    }
    return {{m, n, Complex(inv_sqrt2, 0.0)}, {n, m, Complex(inv_sqrt2, 0.0)}};
  }

  RealVector coordinates(const Matrix& h) const {
    RealVector x(size());
    for (int l = 0; l < size(); ++l) {
      double dot = 0.0;
      for (const auto& [r, c, v] : element(l)) {
        dot += (std::conj(v) * h(r, c)).real();
      }
      x(l) = dot;
    }
    return x;
  }

  Matrix matrix(const RealVector& x) const {
    Matrix h = Matrix::Zero(dim_, dim_);
    for (int l = 0; l < size(); ++l) {
      for (const auto& [r, c, v] : element(l)) h(r, c) += x(l) * v;
    }
    return h;
  }

 private:
  int dim_;
};

// Sparse Hermitian matrix as value triplets (both triangles stored).
struct SparseEntry {
  int row;
  int col;
  Complex value;
};
using SparseHermitian = std::vector<SparseEntry>;

// Linear map from the master Hermitian variable into one PSD-constrained
// Hermitian slot, tabulated on the master basis.
struct ConeMap {
  std::string label;
  int dim;                                  // output side length
  std::vector<SparseHermitian> images;      // one per master basis element
};

// Linear conic program over one Hermitian master variable rho_m:
//   minimize   <objective, rho_m>
//   subject to <equality_ops[k], rho_m> = equality_rhs[k]
//              cone[j](rho_m) is PSD for every j.
struct ConicProblem {
  int master_dim = 0;
  Matrix objective;
  std::vector<Matrix> equality_ops;
  RealVector equality_rhs;
  std::vector<ConeMap> cones;
};

// Identity cone keeping the master variable itself PSD.
inline ConeMap master_cone(int dim, std::string label = "master") {
  const HermitianBasis basis(dim);
  ConeMap cone{std::move(label), dim, {}};
  cone.images.reserve(basis.size());
  for (int l = 0; l < basis.size(); ++l) {
    SparseHermitian image;
    for (const auto& [r, c, v] : basis.element(l)) image.push_back({r, c, v});
    cone.images.push_back(std::move(image));
  }
  return cone;
}

// Cone map tabulating an arbitrary dense linear map on the master basis;
// exact zeros are dropped so structured maps stay sparse.
template <typename Map>
ConeMap tabulate_cone(int master_dim, int out_dim, std::string label,
                      Map&& apply) {
  const HermitianBasis basis(master_dim);
  ConeMap cone{std::move(label), out_dim, {}};
  cone.images.reserve(basis.size());
  for (int l = 0; l < basis.size(); ++l) {
    Matrix unit = Matrix::Zero(master_dim, master_dim);
    for (const auto& [r, c, v] : basis.element(l)) unit(r, c) += v;
    const Matrix image = apply(unit);
    SparseHermitian entries;
    for (int c = 0; c < out_dim; ++c) {
      for (int r = 0; r < out_dim; ++r) {
        if (image(r, c) != Complex(0.0, 0.0)) entries.push_back({r, c, image(r, c)});
      }
    }
    cone.images.push_back(std::move(entries));
  }
  return cone;
}

enum class SolveStatus { optimal, max_iterations, infeasible };

inline const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::optimal:
      return "optimal";
    case SolveStatus::max_iterations:
      return "max-iterations";
    case SolveStatus::infeasible:
      return "infeasible";
  }
  return "unknown";
}

// Solution report.  block_values are recomputed exactly from the master
// witness, so equality residuals and cone images are self-consistent;
// multipliers are scaled so that gap = sum_j Re Tr(multiplier_j block_j).
struct SdpSolution {
  SolveStatus status = SolveStatus::max_iterations;
  int iterations = 0;
  Matrix master;
  std::vector<Matrix> block_values;
  std::vector<Matrix> multipliers;
  double objective_value = 0.0;
  double gap = 0.0;
  double equality_residual = 0.0;
  double stationarity_residual = 0.0;
};

}  // namespace qroofs::sdp

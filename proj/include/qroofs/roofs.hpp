#pragma once

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "qroofs/decomposition.hpp"
#include "qroofs/hermitian.hpp"
#include "qroofs/metrology.hpp"
#include "qroofs/tolerances.hpp"

namespace qroofs {

// Weighted average of the subensemble variances of a pure-state decomposition.
inline double mixture_variance(const PureDecomposition& decomposition,
                               const HermitianOperator& a) {
  double out = 0.0;
  for (int k = 0; k < decomposition.size(); ++k) {
    out += decomposition.weight(k) *
           pure_variance(decomposition.state(k), a.matrix());
  }
  return out;
}

// Phase phi such that Re(<psi1|A|psi2> e^{i phi}) = 0; zero matrix elements
// accept any phase, so return 0.
inline double equalizing_phase(const StateVector& psi1, const StateVector& psi2,
                               const HermitianOperator& a) {
  const Complex element =
      (psi1.vector().adjoint() * a.matrix() * psi2.vector())(0, 0);
  if (std::abs(element) == 0.0) return 0.0;
  return M_PI / 2.0 - std::arg(element);
}

// Splits a rank-2 state into an equal-weight pair of pure states whose
// expectation values of `a` both equal Tr(a rho).
inline PureDecomposition rank2_equal_expectation_split(
    const DensityMatrix& rho, const HermitianOperator& a) {
  const auto eig = eigendecompose(rho);
  if (eig.rank(tol::rank_threshold) != 2) {
    std::ostringstream msg;
    msg << "rank2_equal_expectation_split: state has rank "
        << eig.rank(tol::rank_threshold) << ", expected 2";
    throw std::invalid_argument(msg.str());
  }
  const Vector phi1 = eig.eigenvectors.col(0);
  const Vector phi2 = eig.eigenvectors.col(1);
  const double angle =
      equalizing_phase(StateVector(phi1), StateVector(phi2), a);
  const Complex rotation = std::polar(1.0, angle);
  const double r1 = std::sqrt(std::max(eig.eigenvalues(0), 0.0));
  const double r2 = std::sqrt(std::max(eig.eigenvalues(1), 0.0));
  Vector plus = r1 * phi1 + rotation * r2 * phi2;
  Vector minus = r1 * phi1 - rotation * r2 * phi2;
  plus /= plus.norm();
  minus /= minus.norm();
  return PureDecomposition({0.5, 0.5}, {plus, minus});
}

// Equal-expectation rank-reducing split of a rank >= 3 state: both output
// states keep Tr(a rho) while losing at least one support dimension.
struct RankSplit {
  double p;                 // weight of rho_minus in the reassembly
  DensityMatrix rho_minus;  // state at the lower mixing-parameter endpoint
  DensityMatrix rho_plus;   // state at the upper mixing-parameter endpoint
  double c_minus;
  double c_plus;
  RealVector delta;                 // spectrum perturbation direction
  RealVector support_eigenvalues;   // eigenvalues on the support, descending
  RealVector support_expectations;  // <k|a|k> over the support eigenvectors
  Matrix support_vectors;           // support eigenvectors as columns
};

inline RankSplit rank_reducing_split(const DensityMatrix& rho,
                                     const HermitianOperator& a) {
  const auto eig = eigendecompose(rho);
  const int rank = eig.rank(tol::rank_threshold);
  if (rank < 3) {
    std::ostringstream msg;
    msg << "rank_reducing_split: state has rank " << rank << ", expected >= 3";
    throw std::invalid_argument(msg.str());
  }

  const Matrix vectors = eig.eigenvectors.leftCols(rank);
  const RealVector lambda = eig.eigenvalues.head(rank);
  RealVector expectations(rank);
  for (int k = 0; k < rank; ++k) {
    expectations(k) =
        (vectors.col(k).adjoint() * a.matrix() * vectors.col(k))(0, 0).real();
  }

  // A spectrum perturbation must keep both the trace and the expectation
  // value fixed; any unit vector orthogonal to the two constraint rows works,
  // and the first null column of the SVD makes the choice deterministic.
  RealMatrix constraints(2, rank);
  constraints.row(0) = expectations.transpose();
  constraints.row(1) = RealVector::Ones(rank).transpose();
  Eigen::JacobiSVD<RealMatrix> svd(constraints, Eigen::ComputeFullV);
  const RealVector delta = svd.matrixV().col(2);

  double c_plus = std::numeric_limits<double>::infinity();
  double c_minus = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < rank; ++k) {
    if (delta(k) < 0.0) c_plus = std::min(c_plus, lambda(k) / -delta(k));
    if (delta(k) > 0.0) c_minus = std::max(c_minus, -lambda(k) / delta(k));
  }
  // A traceless nonzero perturbation has entries of both signs, so both
  // endpoints are finite and bracket zero.
  if (!std::isfinite(c_plus) || !std::isfinite(c_minus))
    throw std::logic_error("rank_reducing_split: one-sided perturbation");

  const auto state_at = [&](double c) {
    Matrix out = Matrix::Zero(rho.dim(), rho.dim());
    for (int k = 0; k < rank; ++k) {
      const double weight = std::max(lambda(k) + c * delta(k), 0.0);
      out.noalias() += weight * vectors.col(k) * vectors.col(k).adjoint();
    }
    out /= out.trace().real();
    return DensityMatrix(out);
  };

  RankSplit split{c_plus / (c_plus - c_minus),
                  state_at(c_minus),
                  state_at(c_plus),
                  c_minus,
                  c_plus,
                  delta,
                  lambda,
                  expectations,
                  vectors};
  return split;
}

// Pure-state decomposition whose mixture variance equals the variance of rho:
// rank-reducing splits recurse until every branch has rank at most two, then
// the equal-expectation pair (or the pure state itself) terminates the branch.
inline PureDecomposition concave_roof_decomposition(const DensityMatrix& rho,
                                                    const HermitianOperator& a) {
  const auto eig = eigendecompose(rho);
  const int rank = eig.rank(tol::rank_threshold);
  if (rank == 1) {
    return PureDecomposition({1.0}, {eig.eigenvectors.col(0)});
  }
  if (rank == 2) {
    return rank2_equal_expectation_split(rho, a);
  }
  const RankSplit split = rank_reducing_split(rho, a);
  const PureDecomposition low = concave_roof_decomposition(split.rho_minus, a);
  const PureDecomposition high = concave_roof_decomposition(split.rho_plus, a);
  std::vector<double> weights;
  std::vector<Vector> states;
  weights.reserve(low.size() + high.size());
  states.reserve(low.size() + high.size());
  for (int k = 0; k < low.size(); ++k) {
    weights.push_back(split.p * low.weight(k));
    states.push_back(low.state(k));
  }
  for (int k = 0; k < high.size(); ++k) {
    weights.push_back((1.0 - split.p) * high.weight(k));
    states.push_back(high.state(k));
  }
  return PureDecomposition(weights, states);
}

// Two-state decomposition of a rank-2 state whose mixture variance reaches
// qfi/4, valid when the observable has zero diagonal in the eigenbasis of the
// support.  The support phase is fixed so the coupling element is real and
// non-negative instead of carrying an arbitrary reported phase.
inline PureDecomposition convex_roof_decomposition(const DensityMatrix& rho,
                                                   const HermitianOperator& a) {
  const auto eig = eigendecompose(rho);
  if (eig.rank(tol::rank_threshold) != 2) {
    std::ostringstream msg;
    msg << "convex_roof_decomposition: state has rank "
        << eig.rank(tol::rank_threshold) << ", expected 2";
    throw std::invalid_argument(msg.str());
  }
  const Vector phi1 = eig.eigenvectors.col(0);
  Vector phi2 = eig.eigenvectors.col(1);
  const Matrix& m = a.matrix();
  const double diag1 = (phi1.adjoint() * m * phi1)(0, 0).real();
  const double diag2 = (phi2.adjoint() * m * phi2)(0, 0).real();
  if (std::abs(diag1) > tol::zero_diagonal ||
      std::abs(diag2) > tol::zero_diagonal) {
    std::ostringstream msg;
    msg << "convex_roof_decomposition: observable has nonzero support diagonal ("
        << diag1 << ", " << diag2 << "), construction requires zero diagonal";
    throw std::invalid_argument(msg.str());
  }
  const Complex coupling = (phi1.adjoint() * m * phi2)(0, 0);
  if (std::abs(coupling) > 0.0) phi2 *= std::polar(1.0, -std::arg(coupling));

  const double q = std::max(eig.eigenvalues(0), 0.0);
  const double r1 = std::sqrt(q);
  const double r2 = std::sqrt(std::max(eig.eigenvalues(1), 0.0));
  Vector plus = r1 * phi1 + r2 * phi2;
  Vector minus = r1 * phi1 - r2 * phi2;
  plus /= plus.norm();
  minus /= minus.norm();
  return PureDecomposition({0.5, 0.5}, {plus, minus});
}

// Valid `count`-term decomposition of rho obtained by mixing the spectral
// decomposition through a Haar-random isometry.
template <typename Generator>
PureDecomposition random_decomposition(const DensityMatrix& rho, int count,
                                       Generator& gen) {
  const auto eig = eigendecompose(rho);
  const int rank = eig.rank(tol::rank_threshold);
  if (count < rank) {
    std::ostringstream msg;
    msg << "random_decomposition: " << count << " terms cannot reassemble a rank-"
        << rank << " state";
    throw std::invalid_argument(msg.str());
  }
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int attempt = 0; attempt < 100; ++attempt) {
    Matrix gaussian(count, rank);
    for (int i = 0; i < count; ++i)
      for (int j = 0; j < rank; ++j)
        gaussian(i, j) = Complex(normal(gen), normal(gen));
    Eigen::HouseholderQR<Matrix> qr(gaussian);
    Matrix isometry =
        qr.householderQ() * Matrix::Identity(count, rank);
    const Matrix r = qr.matrixQR().topRows(rank).triangularView<Eigen::Upper>();
    for (int j = 0; j < rank; ++j) {
      const Complex pivot = r(j, j);
      if (std::abs(pivot) > 0.0) isometry.col(j) *= pivot / std::abs(pivot);
    }

    // Columns of V sqrt(Lambda) W^dagger are the unnormalized members.
    const Vector scale =
        eig.eigenvalues.head(rank).cwiseMax(0.0).cwiseSqrt().cast<Complex>();
    Matrix members = eig.eigenvectors.leftCols(rank) * scale.asDiagonal() *
                     isometry.adjoint();
    std::vector<double> weights(count);
    std::vector<Vector> states(count);
    bool degenerate = false;
    for (int k = 0; k < count; ++k) {
      const double norm = members.col(k).norm();
      if (norm * norm < 1e-12) {
        degenerate = true;
        break;
      }
      weights[k] = norm * norm;
      states[k] = members.col(k) / norm;
    }
    if (degenerate) continue;
    return PureDecomposition(weights, states);
  }
  throw std::runtime_error(
      "random_decomposition: repeated degenerate draws, generator suspect");
}

}  // namespace qroofs

#pragma once

#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>

#include "qroofs/hermitian.hpp"
#include "qroofs/multipartite.hpp"
#include "qroofs/sdp/conic.hpp"
#include "qroofs/sdp/solver.hpp"
#include "qroofs/tolerances.hpp"

namespace qroofs::sdp {

// Two-party cost operator (A x 1 - 1 x A)^2.
inline HermitianOperator cost_operator(const HermitianOperator& obs) {
  const Matrix& a = obs.matrix();
  const int d = static_cast<int>(a.rows());
  const Matrix id = Matrix::Identity(d, d);
  const Matrix diff = tensor(a, id) - tensor(id, a);
  return HermitianOperator(diff * diff);
}

namespace detail {

// Shared builder for the symmetric-extension programs: the master variable is
// the symmetric-subspace matrix of an N-party extension, the equalities pin
// the single-party marginal to rho, and each partial transpose over the first
// M parties is kept PSD after compressing to Sym(M) x Sym(N-M), where the
// lifted state is supported.
inline ConicProblem build_extension_problem(const DensityMatrix& rho,
                                            const HermitianOperator& obs,
                                            int parties) {
  const int d = rho.dim();
  if (obs.matrix().rows() != d) {
    std::ostringstream msg;
    msg << "observable dimension " << obs.matrix().rows()
        << " does not match state dimension " << d;
    throw std::invalid_argument(msg.str());
  }

  const MultipartiteLayout layout(parties, d);
  const Matrix s_n = symmetric_basis(layout);
  const int master_dim = static_cast<int>(s_n.cols());

  int rest_dim = 1;
  for (int i = 0; i < parties - 2; ++i) rest_dim *= d;
  const Matrix cost2 = 2.0 * cost_operator(obs).matrix();
  const Matrix cost_lift =
      parties == 2 ? cost2 : tensor(cost2, Matrix::Identity(rest_dim, rest_dim));

  ConicProblem problem;
  problem.master_dim = master_dim;
  problem.objective = s_n.adjoint() * cost_lift * s_n;

  int env_dim = 1;
  for (int i = 0; i < parties - 1; ++i) env_dim *= d;
  const Matrix env_id = Matrix::Identity(env_dim, env_dim);
  const HermitianBasis local(d);
  problem.equality_rhs.resize(local.size());
  for (int k = 0; k < local.size(); ++k) {
    Matrix e_k = Matrix::Zero(d, d);
    for (const auto& [r, c, v] : local.element(k)) e_k(r, c) += v;
    problem.equality_ops.push_back(s_n.adjoint() * tensor(e_k, env_id) * s_n);
    problem.equality_rhs(k) = ((e_k * rho.matrix()).trace()).real();
  }

  problem.cones.push_back(master_cone(master_dim, "symmetric"));
  for (int m = 1; m <= parties / 2; ++m) {
    const MultipartiteLayout left(m, d);
    const MultipartiteLayout right(parties - m, d);
    const Matrix s_left = symmetric_basis(left);
    const Matrix s_right = symmetric_basis(right);
    const Matrix t = tensor(s_left, s_right).adjoint() * s_n;
    const int dim_left = static_cast<int>(s_left.cols());
    const int dim_right = static_cast<int>(s_right.cols());
    const int block_dim = dim_left * dim_right;
    std::ostringstream label;
    label << "ppt-" << m;
    problem.cones.push_back(tabulate_cone(
        master_dim, block_dim, label.str(), [&](const Matrix& unit) {
          const Matrix y = t * unit * t.adjoint();
          Matrix out(block_dim, block_dim);
          for (int a = 0; a < dim_left; ++a) {
            for (int b = 0; b < dim_left; ++b) {
              for (int r = 0; r < dim_right; ++r) {
                for (int s = 0; s < dim_right; ++s) {
                  out(a * dim_right + r, b * dim_right + s) =
                      y(b * dim_right + r, a * dim_right + s);
                }
              }
            }
          }
          return out;
        }));
  }
  return problem;
}

}  // namespace detail

inline ConicProblem build_sppt_problem(const DensityMatrix& rho,
                                       const HermitianOperator& obs) {
  return detail::build_extension_problem(rho, obs, 2);
}

inline ConicProblem build_se_problem(const DensityMatrix& rho,
                                     const HermitianOperator& obs, int parties) {
  if (parties < 3) {
    throw std::invalid_argument("symmetric extension needs at least three parties");
  }
  std::int64_t total = 1;
  for (int i = 0; i < parties; ++i) {
    total *= rho.dim();
    if (total > 256) {
      throw std::invalid_argument("extension dimension d^N exceeds the size guard of 256");
    }
  }
  return detail::build_extension_problem(rho, obs, parties);
}

// Lower bound on the convex-roof quantum Fisher information together with the
// solver witness and the recovered two-party state.
struct BoundResult {
  double value = 0.0;
  int extension_size = 0;
  SdpSolution witness;
  Matrix reduced_pair;
};

// Pluggable solver hook; the built-in interior point method is the default.
using Solver = std::function<SdpSolution(const ConicProblem&, double)>;

namespace detail {

inline BoundResult package_bound(const DensityMatrix& rho, int parties,
                                 SdpSolution solution) {
  const int d = rho.dim();
  const MultipartiteLayout layout(parties, d);
  const Matrix s_n = symmetric_basis(layout);
  const Matrix lifted = s_n * solution.master * s_n.adjoint();
  BoundResult result;
  result.value = solution.objective_value;
  result.extension_size = parties;
  result.reduced_pair = partial_trace(lifted, layout, {0, 1});
  result.witness = std::move(solution);
  return result;
}

}  // namespace detail

inline BoundResult bound_sppt(const DensityMatrix& rho, const HermitianOperator& obs,
                              double tolerance = tol::sdp_default,
                              const Solver& solver = {}) {
  const ConicProblem problem = build_sppt_problem(rho, obs);
  SdpSolution solution = solver ? solver(problem, tolerance) : solve(problem, tolerance);
  return detail::package_bound(rho, 2, std::move(solution));
}

inline BoundResult bound_se(const DensityMatrix& rho, const HermitianOperator& obs,
                            int parties, double tolerance = tol::sdp_default,
                            const Solver& solver = {}) {
  const ConicProblem problem = build_se_problem(rho, obs, parties);
  SdpSolution solution = solver ? solver(problem, tolerance) : solve(problem, tolerance);
  return detail::package_bound(rho, parties, std::move(solution));
}

}  // namespace qroofs::sdp

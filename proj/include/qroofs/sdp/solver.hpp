#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "qroofs/hermitian.hpp"
#include "qroofs/sdp/conic.hpp"
#include "qroofs/tolerances.hpp"

namespace qroofs::sdp {
namespace detail {

// One real-embedded entry of an elementary cone image; rowpos indexes into
// the per-element row support list so products can be built compactly.
struct MapEntry {
  int row;
  int rowpos;
  int col;
  double value;
};

struct BlockData {
  std::string label;
  int complex_dim = 0;
  int real_dim = 0;
  std::vector<std::vector<MapEntry>> maps;    // per master basis element
  std::vector<std::vector<int>> row_support;  // sorted global rows per element
  RealMatrix f0;                              // embedded image of x0
};

inline void append_embedded(std::vector<std::pair<std::pair<int, int>, double>>& out,
                            int m, int r, int c, Complex v) {
  if (v.real() != 0.0) {
    out.push_back({{r, c}, v.real()});
    out.push_back({{r + m, c + m}, v.real()});
  }
  if (v.imag() != 0.0) {
    out.push_back({{r, c + m}, -v.imag()});
    out.push_back({{r + m, c}, v.imag()});
  }
}

inline BlockData build_block(const ConeMap& cone, int n, const RealVector& x0,
                             const HermitianBasis& basis) {
  BlockData block;
  block.label = cone.label;
  block.complex_dim = cone.dim;
  block.real_dim = 2 * cone.dim;
  block.maps.resize(n);
  block.row_support.resize(n);
  for (int l = 0; l < n; ++l) {
    std::vector<std::pair<std::pair<int, int>, double>> raw;
    for (const auto& entry : cone.images[l]) {
      append_embedded(raw, cone.dim, entry.row, entry.col, entry.value);
    }
    // Merge duplicate coordinates, then build the row support.
    std::sort(raw.begin(), raw.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<MapEntry> merged;
    for (const auto& [coord, value] : raw) {
      if (!merged.empty() && merged.back().row == coord.first &&
          merged.back().col == coord.second) {
        merged.back().value += value;
      } else {
        merged.push_back({coord.first, -1, coord.second, value});
      }
    }
    std::erase_if(merged, [](const MapEntry& e) { return e.value == 0.0; });
    std::vector<int>& rows = block.row_support[l];
    for (const auto& e : merged) rows.push_back(e.row);
    std::sort(rows.begin(), rows.end());
    rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
    for (auto& e : merged) {
      e.rowpos = static_cast<int>(
          std::lower_bound(rows.begin(), rows.end(), e.row) - rows.begin());
    }
    block.maps[l] = std::move(merged);
  }
  // Constant term from the particular solution of the equalities.
  Matrix f0c = Matrix::Zero(cone.dim, cone.dim);
  for (int l = 0; l < n; ++l) {
    if (x0(l) == 0.0) continue;
    for (const auto& entry : cone.images[l]) {
      f0c(entry.row, entry.col) += x0(l) * entry.value;
    }
  }
  block.f0 = complex_to_real_embedding(f0c);
  (void)basis;
  return block;
}

inline double sparse_dot(const std::vector<MapEntry>& entries,
                         const RealMatrix& dense) {
  double sum = 0.0;
  for (const auto& e : entries) sum += e.value * dense(e.row, e.col);
  return sum;
}

inline void sparse_accumulate(RealMatrix& target,
                              const std::vector<MapEntry>& entries,
                              double scale) {
  for (const auto& e : entries) target(e.row, e.col) += scale * e.value;
}

// Largest alpha with base + alpha * delta staying PSD, given base = L L^T.
inline double step_to_boundary(const Eigen::LLT<RealMatrix>& llt,
                               const RealMatrix& delta) {
  RealMatrix t = delta;
  llt.matrixL().solveInPlace(t);
  RealMatrix u = t.transpose();
  llt.matrixL().solveInPlace(u);
  const RealMatrix w = 0.5 * (u + u.transpose());
  Eigen::SelfAdjointEigenSolver<RealMatrix> eig(w, Eigen::EigenvaluesOnly);
  const double lambda_min = eig.eigenvalues()(0);
  if (lambda_min >= -1e-13) return std::numeric_limits<double>::infinity();
  return -1.0 / lambda_min;
}

struct BlockState {
  RealMatrix s;     // slack iterate
  RealMatrix x;     // multiplier iterate
  RealMatrix b;     // exact block value at current y
  RealMatrix r;     // b - s
  RealMatrix sinv;
  Eigen::LLT<RealMatrix> llt_s;
  Eigen::LLT<RealMatrix> llt_x;
  RealMatrix ds_aff, dx_aff, ds, dx;
};

}  // namespace detail

// Infeasible-start Mehrotra predictor-corrector interior point method in the
// HKM scaling, run on the real embedding of every Hermitian cone after the
// equality constraints have been eliminated through a QR null-space basis.
inline SdpSolution solve(const ConicProblem& problem,
                         double tolerance = tol::sdp_default,
                         int max_iterations = 100) {
  if (problem.master_dim <= 0) throw std::invalid_argument("master dimension must be positive");
  if (problem.objective.rows() != problem.master_dim ||
      problem.objective.cols() != problem.master_dim) {
    throw std::invalid_argument("objective dimension mismatch");
  }
  if (problem.cones.empty()) throw std::invalid_argument("problem needs at least one cone");
  const int n_eq = static_cast<int>(problem.equality_ops.size());
  if (problem.equality_rhs.size() != n_eq) throw std::invalid_argument("equality sides mismatch");

  const HermitianBasis basis(problem.master_dim);
  const int n = basis.size();
  for (const auto& cone : problem.cones) {
    if (static_cast<int>(cone.images.size()) != n) {
      throw std::invalid_argument("cone map is not tabulated on the master basis");
    }
  }

  // Eliminate equalities: x = x0 + Z y with E Z = 0.
  RealMatrix z;
  RealVector x0;
  if (n_eq == 0) {
    z = RealMatrix::Identity(n, n);
    x0 = RealVector::Zero(n);
  } else {
    RealMatrix eq(n_eq, n);
    for (int k = 0; k < n_eq; ++k) eq.row(k) = basis.coordinates(problem.equality_ops[k]).transpose();
    Eigen::ColPivHouseholderQR<RealMatrix> qr(eq);
    qr.setThreshold(1e-9);
    const int rank = static_cast<int>(qr.rank());
    const int free = n - rank;
    const RealMatrix r_full = qr.matrixR().topRows(rank);
    RealMatrix unpermuted(n, free);
    if (rank == 0) {
      unpermuted.setIdentity();
      x0 = RealVector::Zero(n);
    } else {
      const auto r1 = r_full.leftCols(rank).triangularView<Eigen::Upper>();
      unpermuted.topRows(rank) = -r1.solve(r_full.rightCols(free));
      unpermuted.bottomRows(free).setIdentity();
      RealVector qtb = (qr.householderQ().transpose() * problem.equality_rhs).head(rank);
      RealVector w0(n);
      w0.head(rank) = r1.solve(qtb);
      w0.tail(free).setZero();
      x0 = qr.colsPermutation() * w0;
    }
    z = qr.colsPermutation() * unpermuted;
    const double mismatch = (eq * x0 - problem.equality_rhs).cwiseAbs().maxCoeff();
    if (mismatch > 1e-8 * (1.0 + problem.equality_rhs.cwiseAbs().maxCoeff())) {
      throw std::invalid_argument("equality constraints are inconsistent");
    }
  }
  const int q = static_cast<int>(z.cols());

  const RealVector c_full = basis.coordinates(problem.objective);
  const RealVector c_red = z.transpose() * c_full;

  std::vector<detail::BlockData> data;
  data.reserve(problem.cones.size());
  for (const auto& cone : problem.cones) data.push_back(detail::build_block(cone, n, x0, basis));
  const int n_blocks = static_cast<int>(data.size());

  SdpSolution out;

  // Assembles the solution report from master coordinates and multipliers.
  const auto finalize = [&](const RealVector& x_full,
                            const std::vector<RealMatrix>& x_mults,
                            SolveStatus status, int iterations) {
    out.status = status;
    out.iterations = iterations;
    out.master = basis.matrix(x_full);
    out.objective_value = ((problem.objective * out.master).trace()).real();
    out.block_values.clear();
    out.multipliers.clear();
    double gap = 0.0;
    for (int j = 0; j < n_blocks; ++j) {
      const ConeMap& cone = problem.cones[j];
      Matrix block = Matrix::Zero(cone.dim, cone.dim);
      for (int l = 0; l < n; ++l) {
        if (x_full(l) == 0.0) continue;
        for (const auto& entry : cone.images[l]) block(entry.row, entry.col) += x_full(l) * entry.value;
      }
      Matrix mult = Matrix::Zero(cone.dim, cone.dim);
      if (!x_mults.empty()) {
        const RealMatrix& xr = x_mults[j];
        const int m = cone.dim;
        const RealMatrix p = 0.5 * (xr.topLeftCorner(m, m) + xr.bottomRightCorner(m, m));
        const RealMatrix s = 0.5 * (xr.bottomLeftCorner(m, m) - xr.topRightCorner(m, m));
        mult = 2.0 * (p.cast<Complex>() + Complex(0.0, 1.0) * s.cast<Complex>());
      }
      gap += ((mult * block).trace()).real();
      out.block_values.push_back(std::move(block));
      out.multipliers.push_back(std::move(mult));
    }
    out.gap = gap;
    double eq_res = 0.0;
    for (int k = 0; k < n_eq; ++k) {
      const double lhs = ((problem.equality_ops[k] * out.master).trace()).real();
      eq_res = std::max(eq_res, std::abs(lhs - problem.equality_rhs(k)));
    }
    out.equality_residual = eq_res;
  };

  if (q == 0) {
    // Equalities pin the variable completely; only feasibility remains.
    double min_eig = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n_blocks; ++j) {
      Matrix f0c = Matrix::Zero(problem.cones[j].dim, problem.cones[j].dim);
      for (int l = 0; l < n; ++l) {
        if (x0(l) == 0.0) continue;
        for (const auto& entry : problem.cones[j].images[l]) f0c(entry.row, entry.col) += x0(l) * entry.value;
      }
      Eigen::SelfAdjointEigenSolver<Matrix> eig(f0c, Eigen::EigenvaluesOnly);
      min_eig = std::min(min_eig, eig.eigenvalues()(0));
    }
    const SolveStatus status = min_eig >= -std::max(tolerance, 1e-9)
                                   ? SolveStatus::optimal
                                   : SolveStatus::infeasible;
    finalize(x0, {}, status, 0);
    out.stationarity_residual = 0.0;
    return out;
  }

  // Interior point iterates.
  std::vector<detail::BlockState> blocks(n_blocks);
  double f0_scale = 0.0;
  for (int j = 0; j < n_blocks; ++j) f0_scale = std::max(f0_scale, data[j].f0.norm());
  const double s_init = std::max(10.0, 1.5 * f0_scale);
  const double x_init = std::max(10.0, 1.5 * (1.0 + c_red.cwiseAbs().maxCoeff()));
  int total_real_dim = 0;
  for (int j = 0; j < n_blocks; ++j) {
    const int m = data[j].real_dim;
    blocks[j].s = s_init * RealMatrix::Identity(m, m);
    blocks[j].x = x_init * RealMatrix::Identity(m, m);
    total_real_dim += m;
  }

  RealVector y = RealVector::Zero(q);
  SolveStatus status = SolveStatus::max_iterations;
  int iterations_done = max_iterations;
  int stalls = 0;

  RealVector g_s(n), g_x(n), w_vec(n), v_vec(n);
  RealMatrix m_kernel(n, n);
  const double c_norm = 1.0 + c_red.cwiseAbs().maxCoeff();

  for (int iter = 0; iter < max_iterations; ++iter) {
    // Exact block values at the current y, and convergence metrics.
    const RealVector u_y = z * y;
    double gap = 0.0;
    double feas = 0.0;
    double x_norm_max = 0.0;
    for (int j = 0; j < n_blocks; ++j) {
      auto& blk = blocks[j];
      blk.b = data[j].f0;
      for (int l = 0; l < n; ++l) {
        if (u_y(l) != 0.0) detail::sparse_accumulate(blk.b, data[j].maps[l], u_y(l));
      }
      blk.r = blk.b - blk.s;
      gap += blk.x.cwiseProduct(blk.b).sum();
      feas = std::max(feas, blk.r.norm() / (1.0 + data[j].f0.norm()));
      x_norm_max = std::max(x_norm_max, blk.x.norm());
    }
    for (int l = 0; l < n; ++l) {
      double dot = 0.0;
      for (int j = 0; j < n_blocks; ++j) dot += detail::sparse_dot(data[j].maps[l], blocks[j].x);
      g_x(l) = dot;
    }
    const RealVector r_stat = c_red - z.transpose() * g_x;
    const double stat = r_stat.cwiseAbs().maxCoeff() / c_norm;

    if (gap <= tolerance && feas <= tolerance && stat <= tolerance) {
      status = SolveStatus::optimal;
      iterations_done = iter;
      break;
    }
    if (x_norm_max > 1e10) {
      status = SolveStatus::infeasible;
      iterations_done = iter;
      break;
    }

    // Factorizations.
    bool factor_ok = true;
    for (int j = 0; j < n_blocks && factor_ok; ++j) {
      auto& blk = blocks[j];
      blk.llt_s.compute(blk.s);
      blk.llt_x.compute(blk.x);
      if (blk.llt_s.info() != Eigen::Success || blk.llt_x.info() != Eigen::Success) factor_ok = false;
      if (factor_ok) {
        blk.sinv = blk.llt_s.solve(RealMatrix::Identity(data[j].real_dim, data[j].real_dim));
      }
    }
    if (!factor_ok) {
      iterations_done = iter;
      break;
    }

    double mu = 0.0;
    for (int j = 0; j < n_blocks; ++j) mu += blocks[j].x.cwiseProduct(blocks[j].s).sum();
    mu /= total_real_dim;

    // Elementary first-order vectors.
    for (int l = 0; l < n; ++l) {
      double dot_s = 0.0;
      for (int j = 0; j < n_blocks; ++j) dot_s += detail::sparse_dot(data[j].maps[l], blocks[j].sinv);
      g_s(l) = dot_s;
    }
    for (int j = 0; j < n_blocks; ++j) {
      const RealMatrix d = blocks[j].x * blocks[j].r * blocks[j].sinv;
      const RealMatrix d_sym = 0.5 * (d + d.transpose());
      for (int l = 0; l < n; ++l) {
        const double dot = detail::sparse_dot(data[j].maps[l], d_sym);
        if (j == 0) w_vec(l) = dot; else w_vec(l) += dot;
      }
    }
    const RealVector g_red = z.transpose() * g_s;
    const RealVector w_red = z.transpose() * w_vec;

    // Elementary Schur kernel M[a,b] = sum_j <F_a, Sinv F_b X>, then H = Z^T M Z.
    m_kernel.setZero();
    for (int j = 0; j < n_blocks; ++j) {
      const auto& blk_data = data[j];
      const auto& blk = blocks[j];
      const int m = blk_data.real_dim;
      int max_rows = 0;
      for (int l = 0; l < n; ++l) max_rows = std::max(max_rows, static_cast<int>(blk_data.row_support[l].size()));
      if (max_rows == 0) continue;
      RealMatrix p(max_rows, m);
      RealMatrix w_dense(m, m);
      for (int l = 0; l < n; ++l) {
        const auto& rows = blk_data.row_support[l];
        if (rows.empty()) continue;
        const int nr = static_cast<int>(rows.size());
        p.topRows(nr).setZero();
        for (const auto& e : blk_data.maps[l]) p.row(e.rowpos) += e.value * blk.x.row(e.col);
        w_dense.noalias() = blk.sinv(Eigen::all, rows) * p.topRows(nr);
        for (int a = 0; a < n; ++a) {
          const auto& entries = blk_data.maps[a];
          if (entries.empty()) continue;
          m_kernel(a, l) += detail::sparse_dot(entries, w_dense);
        }
      }
    }
    const RealMatrix m_sym = 0.5 * (m_kernel + m_kernel.transpose());
    RealMatrix h = z.transpose() * m_sym * z;
    h = 0.5 * (h + h.transpose());

    Eigen::LLT<RealMatrix> llt_h(h);
    Eigen::LDLT<RealMatrix> ldlt_h;
    const bool use_llt = llt_h.info() == Eigen::Success;
    if (!use_llt) {
      ldlt_h.compute(h);
      if (ldlt_h.info() != Eigen::Success) {
        iterations_done = iter;
        break;
      }
    }
    const auto solve_h = [&](const RealVector& rhs) {
      RealVector sol = use_llt ? RealVector(llt_h.solve(rhs)) : RealVector(ldlt_h.solve(rhs));
      const RealVector resid = rhs - h * sol;
      sol += use_llt ? RealVector(llt_h.solve(resid)) : RealVector(ldlt_h.solve(resid));
      return sol;
    };

    // Predictor.
    const RealVector dy_aff = solve_h(-c_red - w_red);
    const RealVector du_aff = z * dy_aff;
    double alpha_p_aff = 1.0;
    double alpha_d_aff = 1.0;
    for (int j = 0; j < n_blocks; ++j) {
      auto& blk = blocks[j];
      blk.ds_aff = blk.r;
      for (int l = 0; l < n; ++l) {
        if (du_aff(l) != 0.0) detail::sparse_accumulate(blk.ds_aff, data[j].maps[l], du_aff(l));
      }
      const RealMatrix t = blk.x * blk.ds_aff * blk.sinv;
      blk.dx_aff = -blk.x - 0.5 * (t + t.transpose());
      alpha_p_aff = std::min(alpha_p_aff, detail::step_to_boundary(blk.llt_x, blk.dx_aff));
      alpha_d_aff = std::min(alpha_d_aff, detail::step_to_boundary(blk.llt_s, blk.ds_aff));
    }

    double mu_aff = 0.0;
    for (int j = 0; j < n_blocks; ++j) {
      const auto& blk = blocks[j];
      mu_aff += (blk.x + alpha_p_aff * blk.dx_aff).cwiseProduct(blk.s + alpha_d_aff * blk.ds_aff).sum();
    }
    mu_aff /= total_real_dim;
    const double sigma = std::clamp(std::pow(std::max(mu_aff, 0.0) / mu, 3.0), 1e-10, 1.0);

    // Corrector.
    for (int j = 0; j < n_blocks; ++j) {
      const auto& blk = blocks[j];
      const RealMatrix d = blk.dx_aff * blk.ds_aff * blk.sinv;
      const RealMatrix d_sym = 0.5 * (d + d.transpose());
      for (int l = 0; l < n; ++l) {
        const double dot = detail::sparse_dot(data[j].maps[l], d_sym);
        if (j == 0) v_vec(l) = dot; else v_vec(l) += dot;
      }
    }
    const RealVector dy = solve_h(-c_red + sigma * mu * g_red - w_red - z.transpose() * v_vec);
    const RealVector du = z * dy;
    double alpha_p = 1.0;
    double alpha_d = 1.0;
    for (int j = 0; j < n_blocks; ++j) {
      auto& blk = blocks[j];
      blk.ds = blk.r;
      for (int l = 0; l < n; ++l) {
        if (du(l) != 0.0) detail::sparse_accumulate(blk.ds, data[j].maps[l], du(l));
      }
      const RealMatrix t = blk.x * blk.ds * blk.sinv;
      const RealMatrix t2 = blk.dx_aff * blk.ds_aff * blk.sinv;
      blk.dx = sigma * mu * blk.sinv - blk.x - 0.5 * (t + t.transpose()) - 0.5 * (t2 + t2.transpose());
      alpha_p = std::min(alpha_p, detail::step_to_boundary(blk.llt_x, blk.dx));
      alpha_d = std::min(alpha_d, detail::step_to_boundary(blk.llt_s, blk.ds));
    }

    const double gamma = 0.9 + 0.09 * std::min({alpha_p, alpha_d, 1.0});
    const double step_p = std::min(1.0, gamma * alpha_p);
    const double step_d = std::min(1.0, gamma * alpha_d);
    if (step_p < 1e-10 && step_d < 1e-10) {
      if (++stalls >= 3) {
        iterations_done = iter;
        break;
      }
    } else {
      stalls = 0;
    }

    y += step_d * dy;
    for (int j = 0; j < n_blocks; ++j) {
      blocks[j].s += step_d * blocks[j].ds;
      blocks[j].x += step_p * blocks[j].dx;
    }
    iterations_done = iter + 1;
  }

  const RealVector x_full = x0 + z * y;
  std::vector<RealMatrix> mults;
  mults.reserve(n_blocks);
  for (int j = 0; j < n_blocks; ++j) mults.push_back(blocks[j].x);
  finalize(x_full, mults, status, iterations_done);
  // Stationarity of the multipliers against the reduced objective.
  for (int l = 0; l < n; ++l) {
    double dot = 0.0;
    for (int j = 0; j < n_blocks; ++j) dot += detail::sparse_dot(data[j].maps[l], blocks[j].x);
    g_x(l) = dot;
  }
  out.stationarity_residual = (c_red - z.transpose() * g_x).cwiseAbs().maxCoeff() / c_norm;
  return out;
}

}  // namespace qroofs::sdp

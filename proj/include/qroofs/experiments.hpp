#pragma once

#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "qroofs/hermitian.hpp"
#include "qroofs/metrology.hpp"
#include "qroofs/rng.hpp"
#include "qroofs/roofs.hpp"
#include "qroofs/sdp/bounds.hpp"
#include "qroofs/tolerances.hpp"

namespace qroofs {

namespace detail {

// Row-major matrix of i.i.d. complex entries with independent standard-normal
// real and imaginary parts; the draw order is part of the seeding contract.
inline Matrix gaussian_matrix(int dim, PhiloxEngine& gen) {
  NormalSampler normal;
  Matrix m(dim, dim);
  for (int r = 0; r < dim; ++r) {
    for (int c = 0; c < dim; ++c) {
      const double re = normal(gen);
      const double im = normal(gen);
      m(r, c) = Complex(re, im);
    }
  }
  return m;
}

struct KahanSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double x) {
    const double y = x - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

}  // namespace detail

inline HermitianOperator random_hermitian(int dim, PhiloxEngine& gen) {
  const Matrix m = detail::gaussian_matrix(dim, gen);
  return HermitianOperator(0.5 * (m + m.adjoint()));
}

inline DensityMatrix random_density(int dim, PhiloxEngine& gen) {
  const Matrix g = detail::gaussian_matrix(dim, gen);
  const Matrix w = g * g.adjoint();
  return DensityMatrix(w / w.trace());
}

// Random Hermitian observable whose diagonal vanishes in the eigenbasis of rho.
inline HermitianOperator random_zero_diagonal_observable(const DensityMatrix& rho,
                                                         PhiloxEngine& gen) {
  const auto eig = eigendecompose(rho);
  Matrix b = eig.eigenvectors.adjoint() *
             random_hermitian(rho.dim(), gen).matrix() * eig.eigenvectors;
  for (int k = 0; k < rho.dim(); ++k) b(k, k) = 0.0;
  return HermitianOperator(eig.eigenvectors * b * eig.eigenvectors.adjoint());
}

enum class BoundKind { sppt, se };

inline const char* to_string(BoundKind kind) {
  return kind == BoundKind::sppt ? "sppt" : "se";
}

struct TrialConfig {
  int local_dim = 2;
  BoundKind kind = BoundKind::sppt;
  int extension = 2;  // parties in the extension; fixed at 2 for sppt
  bool zero_diagonal = false;
  int trials = 200;
  std::uint64_t seed = 0;
  double tolerance = tol::sdp_default;
};

struct TrialRecord {
  int index = 0;  // seed offset of the trial substream
  double qfi_value = 0.0;
  double bound_value = std::numeric_limits<double>::quiet_NaN();
  double relative_difference = std::numeric_limits<double>::quiet_NaN();
  bool degenerate = false;  // qfi too small for a relative difference
  bool failed = false;      // solver did not reach an optimal status
  sdp::SolveStatus status = sdp::SolveStatus::max_iterations;
};

struct StatsSummary {
  double largest = 0.0;
  double average = 0.0;
  double stddev = 0.0;
  int counted = 0;
  int degenerate_count = 0;
  int failure_count = 0;
};

struct TableResult {
  TrialConfig config;
  std::vector<TrialRecord> records;
  StatsSummary summary;
};

// Order-independent summary over the non-degenerate, successful trials.
inline StatsSummary summarize(const std::vector<TrialRecord>& records) {
  StatsSummary summary;
  detail::KahanSum mean;
  for (const auto& record : records) {
    if (record.degenerate) ++summary.degenerate_count;
    if (record.failed) ++summary.failure_count;
    if (record.degenerate || record.failed) continue;
    ++summary.counted;
    summary.largest = std::max(summary.largest, record.relative_difference);
    mean.add(record.relative_difference);
  }
  if (summary.counted == 0) return summary;
  summary.average = mean.sum / summary.counted;
  detail::KahanSum spread;
  for (const auto& record : records) {
    if (record.degenerate || record.failed) continue;
    const double dev = record.relative_difference - summary.average;
    spread.add(dev * dev);
  }
  summary.stddev = std::sqrt(spread.sum / summary.counted);
  return summary;
}

inline void validate(const TrialConfig& config) {
  if (config.local_dim < 2 || config.local_dim > 4) {
    throw std::invalid_argument("local dimension must be 2, 3 or 4");
  }
  if (config.trials < 1) throw std::invalid_argument("trial count must be at least 1");
  if (config.kind == BoundKind::se && config.extension < 3) {
    throw std::invalid_argument("extension bound needs at least three parties");
  }
  if (config.tolerance <= 0.0) throw std::invalid_argument("tolerance must be positive");
}

namespace detail {

inline int requested_threads() {
  const char* request = std::getenv("QROOFS_THREADS");
  if (request == nullptr) return 1;
  const int parsed = std::atoi(request);
  if (parsed < 1) return 1;
  const int cap = std::max(1u, std::thread::hardware_concurrency());
  return std::min(parsed, cap);
}

}  // namespace detail

using TrialObserver = std::function<void(
    const DensityMatrix&, const HermitianOperator&, const sdp::BoundResult&)>;

// Runs one Table-style row: per-trial (rho, A) pairs from per-trial Philox
// substreams, the requested bound, and relative-difference statistics.
// Deterministic for a fixed seed regardless of QROOFS_THREADS.
inline TableResult run_table(const TrialConfig& config,
                             const TrialObserver& observer = {}) {
  validate(config);
  TableResult result;
  result.config = config;
  result.records.resize(config.trials);

  std::mutex observer_guard;
  const auto run_trial = [&](int index) {
    PhiloxEngine engine(config.seed, static_cast<std::uint64_t>(index));
    const DensityMatrix rho = random_density(config.local_dim, engine);
    const HermitianOperator obs =
        config.zero_diagonal ? random_zero_diagonal_observable(rho, engine)
                             : random_hermitian(config.local_dim, engine);
    TrialRecord record;
    record.index = index;
    record.qfi_value = qfi(rho, obs);
    try {
      const sdp::BoundResult bound =
          config.kind == BoundKind::sppt
              ? sdp::bound_sppt(rho, obs, config.tolerance)
              : sdp::bound_se(rho, obs, config.extension, config.tolerance);
      record.bound_value = bound.value;
      record.status = bound.witness.status;
      record.failed = record.status != sdp::SolveStatus::optimal;
      if (observer) {
        const std::lock_guard<std::mutex> lock(observer_guard);
        observer(rho, obs, bound);
      }
    } catch (const std::exception&) {
      record.failed = true;
    }
    if (record.qfi_value > tol::qfi_degenerate) {
      record.relative_difference =
          std::abs(record.qfi_value - record.bound_value) / record.qfi_value;
    } else {
      record.degenerate = true;
    }
    result.records[index] = record;
  };

  const int threads = detail::requested_threads();
  if (threads <= 1) {
    for (int index = 0; index < config.trials; ++index) run_trial(index);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int worker = 0; worker < threads; ++worker) {
      pool.emplace_back([&, worker] {
        for (int index = worker; index < config.trials; index += threads) {
          run_trial(index);
        }
      });
    }
    for (auto& thread : pool) thread.join();
  }

  result.summary = summarize(result.records);
  return result;
}

struct ConjectureReport {
  int trials = 0;
  int guaranteed_violations = 0;  // qfi above 4x a mixture variance
  int degenerate_count = 0;
  double smallest_surplus = std::numeric_limits<double>::infinity();
  double largest_surplus = 0.0;
  double average_surplus = 0.0;
};

// Probes qfi <= 4 * mixture_variance for every sampled decomposition (the
// guaranteed direction) and tracks how close the best sampled decomposition
// comes to qfi / 4 (the conjectured equality direction).
inline ConjectureReport conjecture_monitor(int count, int dim, PhiloxEngine& gen) {
  if (dim < 2 || dim > 4) throw std::invalid_argument("local dimension must be 2, 3 or 4");
  if (count < 1) throw std::invalid_argument("trial count must be at least 1");
  ConjectureReport report;
  report.trials = count;
  detail::KahanSum surplus_sum;
  int counted = 0;
  for (int trial = 0; trial < count; ++trial) {
    const DensityMatrix rho = random_density(dim, gen);
    const HermitianOperator obs = random_hermitian(dim, gen);
    const double f = qfi(rho, obs);
    const int rank = eigendecompose(rho).rank();
    double best = std::numeric_limits<double>::infinity();
    for (int round = 0; round < 12; ++round) {
      const int members = rank + round % 4;
      const auto decomposition = random_decomposition(rho, members, gen);
      const double mixture = 4.0 * mixture_variance(decomposition, obs);
      best = std::min(best, mixture);
      if (f > mixture + 1e-8) ++report.guaranteed_violations;
    }
    if (f <= tol::qfi_degenerate) {
      ++report.degenerate_count;
      continue;
    }
    const double surplus = (best - f) / f;
    report.smallest_surplus = std::min(report.smallest_surplus, surplus);
    report.largest_surplus = std::max(report.largest_surplus, surplus);
    surplus_sum.add(surplus);
    ++counted;
  }
  if (counted > 0) report.average_surplus = surplus_sum.sum / counted;
  return report;
}

}  // namespace qroofs

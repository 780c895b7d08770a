#pragma once

#include <sstream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "qroofs/hermitian.hpp"
#include "qroofs/tolerances.hpp"

namespace qroofs {

// Ensemble {p_k, |psi_k>} of normalized pure states with positive weights
// summing to one. The states need not be orthogonal.
class PureDecomposition {
 public:
  PureDecomposition(std::vector<double> weights, std::vector<Vector> states)
      : weights_(std::move(weights)), states_(std::move(states)) {
    if (weights_.empty() || weights_.size() != states_.size()) {
      throw std::invalid_argument(
          "PureDecomposition: weights and states must be nonempty and aligned");
    }
    const auto dim = states_.front().size();
    double total = 0.0;
    for (size_t k = 0; k < weights_.size(); ++k) {
      if (!(weights_[k] > 0.0)) {
        std::ostringstream msg;
        msg << "PureDecomposition: weight " << k << " is " << weights_[k]
            << ", expected > 0";
        throw std::invalid_argument(msg.str());
      }
      total += weights_[k];
      if (states_[k].size() != dim) {
        throw std::invalid_argument("PureDecomposition: mixed state dimensions");
      }
      const double n = states_[k].norm();
      if (std::abs(n - 1.0) > tol::state_norm) {
        std::ostringstream msg;
        msg << "PureDecomposition: state " << k << " has norm " << n;
        throw std::invalid_argument(msg.str());
      }
    }
    if (std::abs(total - 1.0) > tol::weight_sum) {
      std::ostringstream msg;
      msg << "PureDecomposition: weights sum to " << total;
      throw std::invalid_argument(msg.str());
    }
  }

  int size() const { return static_cast<int>(weights_.size()); }
  int dim() const { return static_cast<int>(states_.front().size()); }
  double weight(int k) const { return weights_.at(k); }
  const Vector& state(int k) const { return states_.at(k); }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<Vector>& states() const { return states_; }

  Matrix reassemble() const {
    Matrix out = Matrix::Zero(dim(), dim());
    for (size_t k = 0; k < weights_.size(); ++k) {
      out += weights_[k] * (states_[k] * states_[k].adjoint());
    }
    return out;
  }

  double reassembly_residual(const Matrix& target) const {
    return (reassemble() - target).cwiseAbs().maxCoeff();
  }

 private:
  std::vector<double> weights_;
  std::vector<Vector> states_;
};

}  // namespace qroofs

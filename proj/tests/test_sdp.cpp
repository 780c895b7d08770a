#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "qroofs/metrology.hpp"
#include "qroofs/roofs.hpp"
#include "qroofs/sdp/bounds.hpp"
#include "support.hpp"

using namespace qroofs;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

DensityMatrix fixed_rho2() {
  Matrix m(2, 2);
  m << Complex(0.65, 0.0), Complex(0.15, -0.1), Complex(0.15, 0.1), Complex(0.35, 0.0);
  return DensityMatrix(m);
}

HermitianOperator fixed_obs2() {
  Matrix m(2, 2);
  m << Complex(0.3, 0.0), Complex(1.2, 0.4), Complex(1.2, -0.4), Complex(-0.7, 0.0);
  return HermitianOperator(m);
}

DensityMatrix fixed_rho3() {
  Matrix m(3, 3);
  m << Complex(0.5, 0.0), Complex(0.1, 0.2), Complex(0.0, -0.05),
      Complex(0.1, -0.2), Complex(0.3, 0.0), Complex(0.05, 0.0),
      Complex(0.0, 0.05), Complex(0.05, 0.0), Complex(0.2, 0.0);
  return DensityMatrix(m);
}

HermitianOperator fixed_obs3() {
  Matrix m(3, 3);
  m << Complex(1.0, 0.0), Complex(0.5, -0.5), Complex(0.25, 0.0),
      Complex(0.5, 0.5), Complex(-0.5, 0.0), Complex(0.0, 0.1),
      Complex(0.25, 0.0), Complex(0.0, -0.1), Complex(0.0, 0.0);
  return HermitianOperator(m);
}

// Applies a tabulated cone map to an arbitrary Hermitian matrix.
Matrix apply_cone(const sdp::ConeMap& cone, const sdp::HermitianBasis& basis,
                  const Matrix& h) {
  const RealVector x = basis.coordinates(h);
  Matrix out = Matrix::Zero(cone.dim, cone.dim);
  for (int l = 0; l < basis.size(); ++l) {
    for (const auto& entry : cone.images[l]) {
      out(entry.row, entry.col) += x(l) * entry.value;
    }
  }
  return out;
}

double min_eigenvalue(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(h, Eigen::EigenvaluesOnly);
  return eig.eigenvalues()(0);
}

// Observable whose diagonal vanishes in the eigenbasis of rho.
HermitianOperator zero_diagonal_observable(const DensityMatrix& rho,
                                           std::mt19937_64& gen) {
  const auto eig = eigendecompose(rho);
  Matrix b = eig.eigenvectors.adjoint() *
             testsupport::random_hermitian(rho.dim(), gen).matrix() * eig.eigenvectors;
  for (int k = 0; k < rho.dim(); ++k) b(k, k) = 0.0;
  return HermitianOperator(eig.eigenvectors * b * eig.eigenvectors.adjoint());
}

}  // namespace

TEST_CASE("cost operator", "[sdp]") {
  SECTION("sigma_x expands to 2(I - sigma_x tensor sigma_x)") {
    const HermitianOperator obs(testsupport::pauli_x());
    const Matrix expected =
        2.0 * (Matrix::Identity(4, 4) -
               tensor(testsupport::pauli_x(), testsupport::pauli_x()));
    CHECK(testsupport::max_abs_diff(sdp::cost_operator(obs).matrix(), expected) < 1e-14);
  }

  SECTION("identity gives the zero operator") {
    const HermitianOperator obs(Matrix::Identity(3, 3));
    CHECK(sdp::cost_operator(obs).matrix().norm() == 0.0);
  }

  SECTION("sigma_z gives diag(0,4,4,0)") {
    const HermitianOperator obs(testsupport::pauli_z());
    Matrix expected = Matrix::Zero(4, 4);
    expected(1, 1) = 4.0;
    expected(2, 2) = 4.0;
    CHECK(testsupport::max_abs_diff(sdp::cost_operator(obs).matrix(), expected) < 1e-14);
  }

  SECTION("always positive semidefinite") {
    std::mt19937_64 gen(71);
    for (int trial = 0; trial < 10; ++trial) {
      const auto obs = testsupport::random_hermitian(3, gen);
      CHECK(min_eigenvalue(sdp::cost_operator(obs).matrix()) > -1e-12);
    }
  }
}

TEST_CASE("conic solver on direct problems", "[sdp]") {
  SECTION("minimal trace with pinned corner") {
    sdp::ConicProblem problem;
    problem.master_dim = 2;
    problem.objective = Matrix::Identity(2, 2);
    Matrix pin = Matrix::Zero(2, 2);
    pin(0, 0) = 1.0;
    problem.equality_ops.push_back(pin);
    problem.equality_rhs = RealVector::Constant(1, 1.0);
    problem.cones.push_back(sdp::master_cone(2));

    const auto solution = sdp::solve(problem);
    CHECK(solution.status == sdp::SolveStatus::optimal);
    CHECK_THAT(solution.objective_value, WithinAbs(1.0, 1e-7));
    CHECK_THAT(std::abs(solution.master(0, 0)), WithinAbs(1.0, 1e-7));
    CHECK(std::abs(solution.master(1, 1)) < 1e-6);
    CHECK(solution.gap <= 1e-8);
    CHECK(solution.equality_residual <= 1e-10);
  }

  SECTION("fully pinned feasible variable") {
    sdp::ConicProblem problem;
    problem.master_dim = 1;
    problem.objective = Matrix::Constant(1, 1, 3.0);
    problem.equality_ops.push_back(Matrix::Identity(1, 1));
    problem.equality_rhs = RealVector::Constant(1, 2.0);
    problem.cones.push_back(sdp::master_cone(1));

    const auto solution = sdp::solve(problem);
    CHECK(solution.status == sdp::SolveStatus::optimal);
    CHECK_THAT(solution.objective_value, WithinAbs(6.0, 1e-12));
    CHECK(solution.iterations == 0);
  }

  SECTION("fully pinned infeasible variable") {
    sdp::ConicProblem problem;
    problem.master_dim = 1;
    problem.objective = Matrix::Identity(1, 1);
    problem.equality_ops.push_back(Matrix::Identity(1, 1));
    problem.equality_rhs = RealVector::Constant(1, -1.0);
    problem.cones.push_back(sdp::master_cone(1));

    CHECK(sdp::solve(problem).status == sdp::SolveStatus::infeasible);
  }

  SECTION("infeasible off-diagonal demand") {
    // |X_01| <= 1 is forced by the unit diagonal, but Re X_01 = 3 is pinned.
    sdp::ConicProblem problem;
    problem.master_dim = 2;
    problem.objective = Matrix::Identity(2, 2);
    Matrix e00 = Matrix::Zero(2, 2), e11 = Matrix::Zero(2, 2), ere = Matrix::Zero(2, 2);
    e00(0, 0) = 1.0;
    e11(1, 1) = 1.0;
    ere(0, 1) = 1.0;
    ere(1, 0) = 1.0;
    problem.equality_ops = {e00, e11, ere};
    problem.equality_rhs = RealVector(3);
    problem.equality_rhs << 1.0, 1.0, 6.0;
    problem.cones.push_back(sdp::master_cone(2));

    CHECK(sdp::solve(problem).status == sdp::SolveStatus::infeasible);
  }

  SECTION("inconsistent equalities are rejected") {
    sdp::ConicProblem problem;
    problem.master_dim = 2;
    problem.objective = Matrix::Identity(2, 2);
    Matrix pin = Matrix::Zero(2, 2);
    pin(0, 0) = 1.0;
    problem.equality_ops = {pin, pin};
    problem.equality_rhs = RealVector(2);
    problem.equality_rhs << 1.0, 2.0;
    problem.cones.push_back(sdp::master_cone(2));

    CHECK_THROWS_AS(sdp::solve(problem), std::invalid_argument);
  }

  SECTION("malformed problems are rejected") {
    sdp::ConicProblem problem;
    problem.master_dim = 2;
    problem.objective = Matrix::Identity(3, 3);
    problem.cones.push_back(sdp::master_cone(2));
    CHECK_THROWS_AS(sdp::solve(problem), std::invalid_argument);

    problem.objective = Matrix::Identity(2, 2);
    problem.cones[0].images.pop_back();
    CHECK_THROWS_AS(sdp::solve(problem), std::invalid_argument);

    problem.cones.clear();
    CHECK_THROWS_AS(sdp::solve(problem), std::invalid_argument);
  }
}

TEST_CASE("extension problem structure", "[sdp]") {
  SECTION("pair program block sizes") {
    const auto p2 = sdp::build_sppt_problem(fixed_rho2(), fixed_obs2());
    REQUIRE(p2.cones.size() == 2);
    CHECK(p2.master_dim == 3);
    CHECK(p2.cones[0].dim == 3);
    CHECK(p2.cones[1].dim == 4);
    CHECK(p2.equality_ops.size() == 4);

    const auto p3 = sdp::build_sppt_problem(fixed_rho3(), fixed_obs3());
    CHECK(p3.master_dim == 6);
    CHECK(p3.cones[1].dim == 9);
    CHECK(p3.equality_ops.size() == 9);
  }

  SECTION("extension program block sizes") {
    std::mt19937_64 gen(5);
    const auto rho = testsupport::random_density(2, gen);
    const auto obs = testsupport::random_hermitian(2, gen);

    const auto se3 = sdp::build_se_problem(rho, obs, 3);
    REQUIRE(se3.cones.size() == 2);
    CHECK(se3.master_dim == 4);
    CHECK(se3.cones[1].dim == 6);

    const auto se4 = sdp::build_se_problem(rho, obs, 4);
    REQUIRE(se4.cones.size() == 3);
    CHECK(se4.master_dim == 5);
    CHECK(se4.cones[1].dim == 8);
    CHECK(se4.cones[2].dim == 9);
  }

  SECTION("preconditions") {
    std::mt19937_64 gen(6);
    const auto rho = testsupport::random_density(3, gen);
    const auto obs = testsupport::random_hermitian(3, gen);
    CHECK_THROWS_AS(sdp::build_se_problem(rho, obs, 2), std::invalid_argument);
    CHECK_THROWS_AS(sdp::build_se_problem(rho, obs, 6), std::invalid_argument);
    CHECK_THROWS_AS(
        sdp::build_sppt_problem(rho, testsupport::random_hermitian(2, gen)),
        std::invalid_argument);
  }

  SECTION("compressed partial transpose matches the full-space one") {
    std::mt19937_64 gen(7);
    for (int parties : {2, 3}) {
      const int d = parties == 2 ? 3 : 2;
      const auto rho = testsupport::random_density(d, gen);
      const auto obs = testsupport::random_hermitian(d, gen);
      const auto problem = parties == 2 ? sdp::build_sppt_problem(rho, obs)
                                        : sdp::build_se_problem(rho, obs, parties);
      const sdp::HermitianBasis basis(problem.master_dim);

      const MultipartiteLayout layout(parties, d);
      const Matrix s_n = symmetric_basis(layout);
      Matrix master = testsupport::random_hermitian(problem.master_dim, gen).matrix();
      const Matrix full_pt =
          partial_transpose(s_n * master * s_n.adjoint(), layout, {0});
      const Matrix compressed = apply_cone(problem.cones[1], basis, master);

      Eigen::SelfAdjointEigenSolver<Matrix> full_eig(full_pt, Eigen::EigenvaluesOnly);
      Eigen::SelfAdjointEigenSolver<Matrix> comp_eig(compressed, Eigen::EigenvaluesOnly);
      std::vector<double> full_vals(full_eig.eigenvalues().data(),
                                    full_eig.eigenvalues().data() + layout.total_dim());
      std::vector<double> comp_vals(comp_eig.eigenvalues().data(),
                                    comp_eig.eigenvalues().data() + problem.cones[1].dim);
      while (comp_vals.size() < full_vals.size()) comp_vals.push_back(0.0);
      std::sort(full_vals.begin(), full_vals.end());
      std::sort(comp_vals.begin(), comp_vals.end());
      for (size_t i = 0; i < full_vals.size(); ++i) {
        CHECK_THAT(comp_vals[i], WithinAbs(full_vals[i], 1e-10));
      }
    }
  }
}

TEST_CASE("bounds reproduce frozen reference values", "[sdp]") {
  SECTION("two-qubit pinned diagonal state with sigma_x") {
    Matrix rho = Matrix::Zero(2, 2);
    rho(0, 0) = 0.75;
    rho(1, 1) = 0.25;
    const auto result = sdp::bound_sppt(DensityMatrix(rho),
                                        HermitianOperator(testsupport::pauli_x()));
    CHECK(result.witness.status == sdp::SolveStatus::optimal);
    CHECK_THAT(result.value, WithinAbs(1.0, 2e-5));
    CHECK(result.extension_size == 2);
  }

  SECTION("pure plus state with sigma_z") {
    Matrix plus(2, 2);
    plus << 0.5, 0.5, 0.5, 0.5;
    const auto result = sdp::bound_sppt(DensityMatrix(plus),
                                        HermitianOperator(testsupport::pauli_z()));
    CHECK_THAT(result.value, WithinAbs(4.0, 1e-4));
  }

  SECTION("maximally mixed state with sigma_x") {
    const auto result =
        sdp::bound_sppt(DensityMatrix(Matrix::Identity(2, 2) * 0.5),
                        HermitianOperator(testsupport::pauli_x()));
    CHECK(result.value >= -1e-8);
    CHECK(result.value <= 1e-6);
  }

  SECTION("fixed qubit pair") {
    const auto result = sdp::bound_sppt(fixed_rho2(), fixed_obs2());
    CHECK(result.witness.status == sdp::SolveStatus::optimal);
    CHECK_THAT(result.value, WithinRel(0.8883999942961912, 2e-5));
  }

  SECTION("fixed qutrit pair") {
    const auto result = sdp::bound_sppt(fixed_rho3(), fixed_obs3());
    CHECK(result.witness.status == sdp::SolveStatus::optimal);
    CHECK_THAT(result.value, WithinRel(1.3340807537072747, 2e-5));
  }

  SECTION("fixed qubit extensions") {
    const auto se3 = sdp::bound_se(fixed_rho2(), fixed_obs2(), 3);
    CHECK(se3.witness.status == sdp::SolveStatus::optimal);
    CHECK(se3.extension_size == 3);
    CHECK_THAT(se3.value, WithinRel(0.8883998442248001, 2e-5));

    const auto se4 = sdp::bound_se(fixed_rho2(), fixed_obs2(), 4);
    CHECK(se4.witness.status == sdp::SolveStatus::optimal);
    CHECK_THAT(se4.value, WithinRel(0.8884001968937347, 2e-5));
  }

  SECTION("fixed qutrit extension") {
    const auto se3 = sdp::bound_se(fixed_rho3(), fixed_obs3(), 3);
    CHECK(se3.witness.status == sdp::SolveStatus::optimal);
    CHECK_THAT(se3.value, WithinRel(1.3340806997257366, 2e-5));
  }
}

TEST_CASE("solver witness is self-verifying", "[sdp]") {
  const auto problem = sdp::build_sppt_problem(fixed_rho2(), fixed_obs2());
  const auto result = sdp::bound_sppt(fixed_rho2(), fixed_obs2());
  const auto& witness = result.witness;
  REQUIRE(witness.status == sdp::SolveStatus::optimal);
  const sdp::HermitianBasis basis(problem.master_dim);

  SECTION("reported residuals hold") {
    CHECK(witness.gap <= 1e-8);
    CHECK(witness.equality_residual <= 1e-10);
    CHECK(witness.stationarity_residual <= 1e-8);
  }

  SECTION("blocks are cone images of the master witness") {
    REQUIRE(witness.block_values.size() == problem.cones.size());
    CHECK(testsupport::max_abs_diff(witness.block_values[0], witness.master) < 1e-12);
    for (size_t j = 0; j < problem.cones.size(); ++j) {
      const Matrix image = apply_cone(problem.cones[j], basis, witness.master);
      CHECK(testsupport::max_abs_diff(witness.block_values[j], image) < 1e-10);
      CHECK(min_eigenvalue(witness.block_values[j]) >= -1e-8);
    }
  }

  SECTION("gap and objective recompute from the reported matrices") {
    double gap = 0.0;
    for (size_t j = 0; j < witness.block_values.size(); ++j) {
      gap += ((witness.multipliers[j] * witness.block_values[j]).trace()).real();
    }
    CHECK_THAT(gap, WithinAbs(witness.gap, 1e-12));

    double eq = 0.0;
    for (size_t k = 0; k < problem.equality_ops.size(); ++k) {
      const double lhs = ((problem.equality_ops[k] * witness.master).trace()).real();
      eq = std::max(eq, std::abs(lhs - problem.equality_rhs(k)));
    }
    CHECK_THAT(eq, WithinAbs(witness.equality_residual, 1e-14));

    const double value = ((problem.objective * witness.master).trace()).real();
    CHECK_THAT(value, WithinAbs(witness.objective_value, 1e-12));
  }

  SECTION("bound equals the pair-state cost") {
    const Matrix cost = sdp::cost_operator(fixed_obs2()).matrix();
    const double reconstructed = 2.0 * ((cost * result.reduced_pair).trace()).real();
    CHECK_THAT(reconstructed, WithinAbs(result.value, 1e-9));
    CHECK_THAT(result.reduced_pair.trace().real(), WithinAbs(1.0, 1e-9));
    CHECK(min_eigenvalue(result.reduced_pair) >= -1e-8);
  }
}

TEST_CASE("bounds sit below every decomposition mixture", "[sdp]") {
  std::mt19937_64 gen(2024);
  for (int d : {2, 3}) {
    for (int trial = 0; trial < 10; ++trial) {
      const auto rho = testsupport::random_density(d, gen);
      const auto obs = testsupport::random_hermitian(d, gen);
      const auto bound = sdp::bound_sppt(rho, obs);
      for (int k = 0; k < 2; ++k) {
        const auto decomposition = random_decomposition(rho, d + 2, gen);
        const double mixture = 4.0 * mixture_variance(decomposition, obs);
        CHECK(bound.value <= mixture + 1e-6);
      }
      CHECK(bound.value <= qfi(rho, obs) + 1e-6);
    }
  }
}

TEST_CASE("bound hierarchy is monotone", "[sdp]") {
  std::mt19937_64 gen(99);
  for (int d : {2, 2, 3}) {
    const auto rho = testsupport::random_density(d, gen);
    const auto obs = testsupport::random_hermitian(d, gen);
    const auto sppt = sdp::bound_sppt(rho, obs);
    const auto se3 = sdp::bound_se(rho, obs, 3);
    REQUIRE(sppt.witness.status == sdp::SolveStatus::optimal);
    REQUIRE(se3.witness.status == sdp::SolveStatus::optimal);
    CHECK(sppt.value <= se3.value + 2e-8);
    if (d == 2) {
      const auto se4 = sdp::bound_se(rho, obs, 4);
      REQUIRE(se4.witness.status == sdp::SolveStatus::optimal);
      CHECK(se3.value <= se4.value + 2e-8);
    }
  }
}

TEST_CASE("exact for rank-two states with zero-diagonal observables", "[sdp]") {
  std::mt19937_64 gen(314);
  for (int trial = 0; trial < 10; ++trial) {
    const auto rho = testsupport::random_density(2, gen);
    const auto obs = zero_diagonal_observable(rho, gen);
    const double f = qfi(rho, obs);
    if (f < 1e-8) continue;
    const auto bound = sdp::bound_sppt(rho, obs);
    REQUIRE(bound.witness.status == sdp::SolveStatus::optimal);
    CHECK_THAT(bound.value, WithinRel(f, 1e-5));
  }
}

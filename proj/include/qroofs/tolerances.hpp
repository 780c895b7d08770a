#pragma once

// Central numeric tolerance record. Every validation and cutoff in the
// library reads from here so a tolerance is never duplicated at a call site.

namespace qroofs::tol {

// Hermiticity check, relative: max |X_ij - conj(X_ji)| <= hermiticity * (1 + max |X_ij|).
inline constexpr double hermiticity = 1e-12;

// |Tr(rho) - 1| allowed for density matrices.
inline constexpr double trace_unit = 1e-10;

// Most negative eigenvalue a density matrix may carry (numerical dust).
inline constexpr double psd_floor = -1e-10;

// ||psi|| - 1 allowed for state vectors.
inline constexpr double state_norm = 1e-12;

// Eigendecomposition reconstruction residual, relative to the matrix norm.
inline constexpr double eig_residual = 1e-10;

// Two-level terms of the Fisher-information sums are skipped when
// lambda_i + lambda_j falls at or below this floor (0/0 kernel pairs).
inline constexpr double qfi_term_floor = 1e-12;

// Rank detection: eigenvalues above rank_threshold * lambda_max count.
inline constexpr double rank_threshold = 1e-9;

// Decomposition weights must sum to one within this bound.
inline constexpr double weight_sum = 1e-10;

// Max-entry residual allowed when a decomposition is reassembled.
inline constexpr double reassembly = 1e-9;

// Spread allowed between subensemble expectation values that the
// equal-expectation constructions are supposed to match.
inline constexpr double expectation_match = 1e-8;

// Diagonal elements (in the state's eigenbasis) below this count as zero
// for the rank-2 convex-roof construction precondition.
inline constexpr double zero_diagonal = 1e-10;

// Default duality-gap / residual target for the conic solver.
inline constexpr double sdp_default = 1e-8;

// Trials with a Fisher information at or below this are excluded from
// relative-difference statistics.
inline constexpr double qfi_degenerate = 1e-12;

}  // namespace qroofs::tol

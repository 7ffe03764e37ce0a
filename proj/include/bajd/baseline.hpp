#pragma once

#include "bajd/model.hpp"

namespace bajd {

struct JacobiResult {
  Matrix v;          // orthogonal N x N, columns are the joint eigenvectors
  int sweeps = 0;    // sweeps performed
  bool converged = false;
  /// sum_k sum_{i != j} (V^T C_k V)_ij^2 after each sweep (index 0 = input)
  std::vector<double> off_diagonal;
};

/// Orthogonal joint diagonalization by Givens sweeps (Cardoso-Souloumiac).
/// Inputs are symmetrized as (C_k + C_k^T) / 2. Each rotation maximizes
/// sum_k sum_i (V^T C_k V)_ii^2 over its plane; iteration stops when every
/// rotation sine in a sweep is below `tol` or after `max_sweeps`.
JacobiResult jacobi_jd_detailed(const MatrixSet& c, double tol = 1e-8, int max_sweeps = 100);

Matrix jacobi_jd(const MatrixSet& c, double tol = 1e-8, int max_sweeps = 100);

/// Sum of squared off-diagonal entries of V^T C_k V over all (symmetrized) k.
double off_diagonal_objective(const MatrixSet& c, const Matrix& v);

}  // namespace bajd

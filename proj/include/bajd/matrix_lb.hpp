#pragma once

// Conditional sampling of the orthonormal factor B from the matrix
// Langevin-Bingham density
//
//   p(B) proportional to prod_m exp(b_m^T G_m b_m),  G_m = sum_k lambda_m^k Y_k,
//   Y_k = (C_k^T + C_k) / (2 sigma2_k).
//
// For M < N each column is redrawn inside the orthogonal complement of the
// others; for M = N two columns are redrawn together on the circle spanned by
// the complement of the remaining N - 2.

#include "bajd/bingham.hpp"
#include "bajd/model.hpp"
#include "bajd/random.hpp"

#include <vector>

namespace bajd {

class LBContext {
 public:
  LBContext(const MatrixSet& c, const Vector& sigma2, EigenvalueSet lambdas);

  [[nodiscard]] const std::vector<Matrix>& sym_scaled() const { return sym_scaled_; }
  [[nodiscard]] const EigenvalueSet& lambdas() const { return lambdas_; }
  [[nodiscard]] Eigen::Index dim() const { return n_; }

 private:
  std::vector<Matrix> sym_scaled_;
  EigenvalueSet lambdas_;
  Eigen::Index n_ = 0;
};

/// G_m = sum_k lambda_m^k Y_k (symmetric N x N).
Matrix build_column_field(const LBContext& ctx, Eigen::Index m);

/// Orthonormal basis (N x (N - cols)) of the orthogonal complement of the
/// column span of `b_minus`. Throws std::invalid_argument if b_minus is rank
/// deficient.
Matrix null_space_basis(const Matrix& b_minus);

/// Copy of `b` without the listed columns (order of the rest preserved).
Matrix drop_columns(const Matrix& b, std::initializer_list<Eigen::Index> cols);

/// Redraws column i (requires M < N).
StiefelPoint update_column(const StiefelPoint& b, Eigen::Index i, const LBContext& ctx,
                           const ThetaScheme& scheme, Rng& rng);

/// Redraws columns i and j jointly (requires M = N). The circle draw is a
/// two-coordinate Bingham sweep; with the default exact scheme one call is an
/// exact draw from the pair conditional.
StiefelPoint update_column_pair(const StiefelPoint& b, Eigen::Index i, Eigen::Index j,
                                const LBContext& ctx, Rng& rng, const ThetaScheme& scheme = {});

/// One full sweep over B: random column order for M < N, random pairing for M = N.
StiefelPoint sample_B_step(const StiefelPoint& b, const LBContext& ctx, const ThetaScheme& scheme,
                           Rng& rng);

}  // namespace bajd

#include "bajd/matrix_lb.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace bajd {

namespace {

Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

}  // namespace

LBContext::LBContext(const MatrixSet& c, const Vector& sigma2, EigenvalueSet lambdas)
    : lambdas_(std::move(lambdas)), n_(c.dim()) {
  const auto k_count = static_cast<Eigen::Index>(c.size());
  if (sigma2.size() != k_count || lambdas_.k() != k_count)
    throw std::invalid_argument("LBContext: K mismatch");
  sym_scaled_.reserve(c.size());
  for (Eigen::Index k = 0; k < k_count; ++k) {
    if (!(sigma2[k] > 0.0)) throw std::invalid_argument("LBContext: sigma2 must be positive");
    const Matrix& ck = c[static_cast<std::size_t>(k)];
    sym_scaled_.push_back((ck.transpose() + ck) / (2.0 * sigma2[k]));
  }
}

Matrix build_column_field(const LBContext& ctx, Eigen::Index m) {
  if (m < 0 || m >= ctx.lambdas().m()) throw std::invalid_argument("build_column_field: column out of range");
  Matrix g = Matrix::Zero(ctx.dim(), ctx.dim());
  const auto& ys = ctx.sym_scaled();
  for (std::size_t k = 0; k < ys.size(); ++k) g.noalias() += ctx.lambdas().values(m, static_cast<Eigen::Index>(k)) * ys[k];
  return g;
}

Matrix null_space_basis(const Matrix& b_minus) {
  const Eigen::Index n = b_minus.rows();
  const Eigen::Index r = b_minus.cols();
  if (r == 0) return Matrix::Identity(n, n);
  if (r >= n) throw std::invalid_argument("null_space_basis: no complement left");
  Eigen::HouseholderQR<Matrix> qr(b_minus);
  const Matrix& packed = qr.matrixQR();
  for (Eigen::Index j = 0; j < r; ++j) {
    if (std::abs(packed(j, j)) < 1e-10) throw std::invalid_argument("null_space_basis: rank-deficient input");
  }
  const Matrix q = qr.householderQ();
  return q.rightCols(n - r);
}

Matrix drop_columns(const Matrix& b, std::initializer_list<Eigen::Index> cols) {
  Matrix out(b.rows(), b.cols() - static_cast<Eigen::Index>(cols.size()));
  Eigen::Index dst = 0;
  for (Eigen::Index j = 0; j < b.cols(); ++j) {
    if (std::find(cols.begin(), cols.end(), j) != cols.end()) continue;
    out.col(dst++) = b.col(j);
  }
  return out;
}

StiefelPoint update_column(const StiefelPoint& b, Eigen::Index i, const LBContext& ctx,
                           const ThetaScheme& scheme, Rng& rng) {
  if (b.cols() >= b.rows()) throw std::invalid_argument("update_column: requires M < N");
  if (i < 0 || i >= b.cols()) throw std::invalid_argument("update_column: column out of range");
  const Matrix q = null_space_basis(drop_columns(b.matrix(), {i}));
  const Matrix g_tilde = symmetrize(q.transpose() * build_column_field(ctx, i) * q);
  const BinghamParams params = eigendecompose(g_tilde);
  Vector beta = q.transpose() * b.col(i);
  beta /= beta.norm();
  const Vector beta_new = bingham_update(params, beta, scheme, rng);
  Matrix out = b.matrix();
  out.col(i) = q * beta_new;
  return StiefelPoint(std::move(out));
}

StiefelPoint update_column_pair(const StiefelPoint& b, Eigen::Index i, Eigen::Index j,
                                const LBContext& ctx, Rng& rng, const ThetaScheme& scheme) {
  if (b.cols() != b.rows()) throw std::invalid_argument("update_column_pair: requires M = N");
  if (i == j || i < 0 || j < 0 || i >= b.cols() || j >= b.cols())
    throw std::invalid_argument("update_column_pair: need two distinct valid columns");
  const Matrix q = null_space_basis(drop_columns(b.matrix(), {i, j}));
  // exp(z^T A_i z + z_perp^T A_j z_perp) = const * exp(z^T (A_i - A_j) z) for 2x2 symmetric A_j
  const Matrix diff = symmetrize(q.transpose() * (build_column_field(ctx, i) - build_column_field(ctx, j)) * q);
  const BinghamParams params = eigendecompose(diff);
  Vector z = q.transpose() * b.col(i);
  z /= z.norm();
  const Vector z_new = bingham_update(params, z, scheme, rng);
  const double sign = (rng() >> 63) != 0 ? 1.0 : -1.0;
  Vector z_perp(2);
  z_perp << -z_new[1], z_new[0];
  Matrix out = b.matrix();
  out.col(i) = q * z_new;
  out.col(j) = sign * (q * z_perp);
  return StiefelPoint(std::move(out));
}

StiefelPoint sample_B_step(const StiefelPoint& b, const LBContext& ctx, const ThetaScheme& scheme, Rng& rng) {
  const Eigen::Index n = b.rows();
  const Eigen::Index m = b.cols();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::shuffle(order.begin(), order.end(), rng);

  if (m < n) {
    StiefelPoint cur = b;
    for (const Eigen::Index i : order) cur = update_column(cur, i, ctx, scheme, rng);
    return cur;
  }
  if (n == 1) {
    // S^0 = {-1, +1}; the density is constant on it
    Matrix out = b.matrix();
    out(0, 0) = (rng() >> 63) != 0 ? 1.0 : -1.0;
    return StiefelPoint(std::move(out));
  }
  StiefelPoint cur = b;
  std::size_t p = 0;
  for (; p + 1 < order.size(); p += 2) cur = update_column_pair(cur, order[p], order[p + 1], ctx, rng, scheme);
  if (p < order.size()) {
    std::uniform_int_distribution<std::size_t> partner(0, p - 1);
    cur = update_column_pair(cur, order[p], order[partner(rng)], ctx, rng, scheme);
  }
  return cur;
}

}  // namespace bajd

#include "bajd/model.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace bajd {

MatrixSet::MatrixSet(std::vector<Matrix> matrices) : matrices_(std::move(matrices)) {
  if (matrices_.empty()) throw std::invalid_argument("MatrixSet: at least one matrix required");
  dim_ = matrices_.front().rows();
  if (dim_ < 1) throw std::invalid_argument("MatrixSet: empty matrix");
  for (std::size_t k = 0; k < matrices_.size(); ++k) {
    const Matrix& c = matrices_[k];
    if (c.rows() != dim_ || c.cols() != dim_)
      throw std::invalid_argument("MatrixSet: matrix " + std::to_string(k) +
                                  " is not " + std::to_string(dim_) + "x" + std::to_string(dim_));
    if (!c.allFinite())
      throw std::invalid_argument("MatrixSet: matrix " + std::to_string(k) + " has non-finite entries");
  }
}

double orthonormality_error(const Matrix& b) {
  const Matrix gram = b.transpose() * b;
  return (gram - Matrix::Identity(b.cols(), b.cols())).cwiseAbs().maxCoeff();
}

StiefelPoint::StiefelPoint(Matrix b) : b_(std::move(b)) {
  if (b_.cols() < 1 || b_.cols() > b_.rows())
    throw std::invalid_argument("StiefelPoint: need 1 <= M <= N");
  if (!b_.allFinite()) throw std::invalid_argument("StiefelPoint: non-finite entries");
  const double err = bajd::orthonormality_error(b_);
  if (err > kTolerance)
    throw std::invalid_argument("StiefelPoint: columns not orthonormal (error " +
                                std::to_string(err) + ")");
}

StiefelPoint StiefelPoint::orthonormalize(const Matrix& b) {
  Eigen::HouseholderQR<Matrix> qr(b);
  Matrix q = qr.householderQ() * Matrix::Identity(b.rows(), b.cols());
  const Matrix& r = qr.matrixQR();
  for (Eigen::Index j = 0; j < b.cols(); ++j) {
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  }
  return StiefelPoint(std::move(q));
}

double StiefelPoint::orthonormality_error() const { return bajd::orthonormality_error(b_); }

void NoiseState::validate() const {
  if (sigma2.size() != v2.size()) throw std::invalid_argument("NoiseState: size mismatch");
  for (Eigen::Index k = 0; k < sigma2.size(); ++k) {
    if (!(sigma2[k] > 0.0) || !std::isfinite(sigma2[k]))
      throw std::invalid_argument("NoiseState: sigma2 must be positive");
    if (!(v2[k] > 0.0) || !std::isfinite(v2[k]))
      throw std::invalid_argument("NoiseState: v2 must be positive");
  }
}

HyperParams HyperParams::uniform(Eigen::Index k, double a, double b) {
  HyperParams h{Vector::Constant(k, a), Vector::Constant(k, b)};
  h.validate();
  return h;
}

void HyperParams::validate() const {
  if (a.size() != b.size()) throw std::invalid_argument("HyperParams: size mismatch");
  if ((a.array() <= 0.0).any() || (b.array() <= 0.0).any())
    throw std::invalid_argument("HyperParams: a_k and b_k must be positive");
}

Vector vectorize(const Matrix& c) { return Eigen::Map<const Vector>(c.data(), c.size()); }

Matrix unvectorize(const Vector& x, Eigen::Index n) {
  if (x.size() != n * n) throw std::invalid_argument("unvectorize: length is not n^2");
  return Eigen::Map<const Matrix>(x.data(), n, n);
}

Matrix build_design_matrix(const StiefelPoint& b) {
  const Eigen::Index n = b.rows();
  Matrix a(n * n, b.cols());
  for (Eigen::Index m = 0; m < b.cols(); ++m) {
    // column-major: entry (i, j) of b_m b_m^T lands at i + j*n
    for (Eigen::Index j = 0; j < n; ++j) {
      a.col(m).segment(j * n, n) = b.matrix()(j, m) * b.col(m);
    }
  }
  return a;
}

Matrix reconstruct(const StiefelPoint& b, const Eigen::Ref<const Vector>& u) {
  if (u.size() != b.cols()) throw std::invalid_argument("reconstruct: u has wrong length");
  Matrix out = b.matrix() * u.asDiagonal() * b.matrix().transpose();
  // exact symmetry regardless of rounding order
  return 0.5 * (out + out.transpose());
}

double residual_norm2(const Matrix& c, const StiefelPoint& b, const Eigen::Ref<const Vector>& u) {
  return (c - reconstruct(b, u)).squaredNorm();
}

double log_likelihood(const MatrixSet& c, const StiefelPoint& b, const EigenvalueSet& u,
                      const Vector& sigma2) {
  const auto k_count = static_cast<Eigen::Index>(c.size());
  if (sigma2.size() != k_count || u.k() != k_count)
    throw std::invalid_argument("log_likelihood: K mismatch");
  if (b.rows() != c.dim() || u.m() != b.cols())
    throw std::invalid_argument("log_likelihood: dimension mismatch");
  const double n2 = static_cast<double>(c.dim() * c.dim());
  double total = 0.0;
  for (Eigen::Index k = 0; k < k_count; ++k) {
    if (!(sigma2[k] > 0.0)) throw std::invalid_argument("log_likelihood: sigma2 must be positive");
    const double r = residual_norm2(c[static_cast<std::size_t>(k)], b, u.u(k));
    total += -0.5 * n2 * std::log(2.0 * std::numbers::pi * sigma2[k]) - r / (2.0 * sigma2[k]);
  }
  return total;
}

}  // namespace bajd

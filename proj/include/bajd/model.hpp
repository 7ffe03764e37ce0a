#pragma once

// Generative model C_k = B diag(u_k) B^T + E_k with orthonormal B and
// i.i.d. Gaussian noise of variance sigma2_k in every entry of E_k.

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace bajd {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// K observed N x N real matrices, all of the same size.
class MatrixSet {
 public:
  MatrixSet() = default;
  explicit MatrixSet(std::vector<Matrix> matrices);

  [[nodiscard]] std::size_t size() const { return matrices_.size(); }
  [[nodiscard]] Eigen::Index dim() const { return dim_; }
  [[nodiscard]] const Matrix& operator[](std::size_t k) const { return matrices_[k]; }
  [[nodiscard]] const std::vector<Matrix>& matrices() const { return matrices_; }

 private:
  std::vector<Matrix> matrices_;
  Eigen::Index dim_ = 0;
};

/// N x M matrix with orthonormal columns (B^T B = I_M).
class StiefelPoint {
 public:
  static constexpr double kTolerance = 1e-8;

  StiefelPoint() = default;
  /// Throws std::invalid_argument unless B^T B = I within kTolerance.
  explicit StiefelPoint(Matrix b);

  /// Orthonormalizes the columns of `b` with a sign-preserving thin QR.
  static StiefelPoint orthonormalize(const Matrix& b);

  [[nodiscard]] const Matrix& matrix() const { return b_; }
  [[nodiscard]] Eigen::Index rows() const { return b_.rows(); }
  [[nodiscard]] Eigen::Index cols() const { return b_.cols(); }
  [[nodiscard]] auto col(Eigen::Index m) const { return b_.col(m); }

  /// max_ij |(B^T B - I)_ij|
  [[nodiscard]] double orthonormality_error() const;

 private:
  Matrix b_;
};

double orthonormality_error(const Matrix& b);

/// Per-matrix eigenvalues; column k holds u_k (length M). Entries may be negative.
struct EigenvalueSet {
  Matrix values;  // M x K

  [[nodiscard]] Eigen::Index m() const { return values.rows(); }
  [[nodiscard]] Eigen::Index k() const { return values.cols(); }
  [[nodiscard]] auto u(Eigen::Index k) const { return values.col(k); }
  [[nodiscard]] auto u(Eigen::Index k) { return values.col(k); }
};

/// Noise variances sigma2_k and eigenvalue prior scales v2_k.
struct NoiseState {
  Vector sigma2;
  Vector v2;

  void validate() const;
};

/// Inverse-gamma shape a_k and scale b_k shared by the sigma2_k and v2_k priors.
struct HyperParams {
  Vector a;
  Vector b;

  static HyperParams uniform(Eigen::Index k, double a, double b);
  void validate() const;
};

/// Column-major vec(): out[i + j*N] = c(i, j).
Vector vectorize(const Matrix& c);

/// Inverse of vectorize for a square matrix.
Matrix unvectorize(const Vector& x, Eigen::Index n);

/// N^2 x M matrix whose column m is b_m (x) b_m = vec(b_m b_m^T).
Matrix build_design_matrix(const StiefelPoint& b);

/// B diag(u) B^T
Matrix reconstruct(const StiefelPoint& b, const Eigen::Ref<const Vector>& u);

/// ||C_k - B diag(u_k) B^T||_F^2
double residual_norm2(const Matrix& c, const StiefelPoint& b, const Eigen::Ref<const Vector>& u);

/// sum_k [ -(N^2/2) log(2 pi sigma2_k) - ||C_k - B Lambda_k B^T||_F^2 / (2 sigma2_k) ]
double log_likelihood(const MatrixSet& c, const StiefelPoint& b, const EigenvalueSet& u,
                      const Vector& sigma2);

}  // namespace bajd

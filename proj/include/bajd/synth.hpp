#pragma once

// Synthetic data for the experiments: planted joint-diagonalization sets,
// a sine-source blind source separation pipeline, and a two-class common
// spatial pattern toy problem.

#include "bajd/model.hpp"
#include "bajd/random.hpp"

namespace bajd {

/// Haar-distributed StiefelPoint: Q factor of an n x m standard Gaussian
/// matrix with the diagonal of R made positive.
StiefelPoint random_stiefel(Eigen::Index n, Eigen::Index m, Rng& rng);

struct PlantedInstance {
  MatrixSet c;
  StiefelPoint b_true;
  EigenvalueSet u_true;
  double sigma2_true = 0.0;
};

/// C_k = B diag(u_k) B^T + E_k with B Haar, u_k entries N(0, 1) and E_k
/// entries N(0, sigma2). sigma2 = 0 gives exact (symmetric) matrices.
PlantedInstance gen_jd_dataset(Eigen::Index n, Eigen::Index m, Eigen::Index k, double sigma2, Rng& rng);

/// channels x samples signal array.
struct SignalMatrix {
  Matrix data;

  [[nodiscard]] Eigen::Index channels() const { return data.rows(); }
  [[nodiscard]] Eigen::Index samples() const { return data.cols(); }
};

/// Row i = sin(2 pi f_i t / T + phi_i), f_i = 2 + 3i, phi_i = i pi / 7, t = 0..T-1.
SignalMatrix gen_sine_sources(Eigen::Index n_sources, Eigen::Index n_samples);

/// X = A S + E, E entries N(0, sigma^2). Rejects a singular or non-square A.
SignalMatrix mix_and_noise(const SignalMatrix& s, const Matrix& a, double sigma, Rng& rng);

struct Whitening {
  Matrix w;       // D^{-1/2} U^T of the sample covariance U D U^T
  Vector mean;    // per-channel mean removed before W
  SignalMatrix x_tilde;
};

/// Sample covariance uses the 1/T normalization. Throws if an eigenvalue of the
/// covariance is below 1e-12.
Whitening whiten(const SignalMatrix& x);

/// C(tau)_ij = 1/(T - tau) sum_t X_i(t + tau) X_j(t), tau = 1..max_lag.
MatrixSet lagged_covariances(const SignalMatrix& x_tilde, Eigen::Index max_lag);

/// n x n standard Gaussian matrix, redrawn until its 2-norm condition number
/// is below max_cond.
Matrix conditioned_gaussian(Eigen::Index n, double max_cond, Rng& rng);

struct CspaData {
  SignalMatrix y1;
  SignalMatrix y2;
  Matrix a;
};

/// Y^j = A S^j with S^1 ~ N(0, diag(0.1, 0.9)), S^2 ~ N(0, diag(0.9, 0.1))
/// and A a 2 x 2 standard Gaussian matrix (redrawn until well conditioned).
CspaData gen_cspa_dataset(Eigen::Index n_per_class, Rng& rng);

/// Same sources as gen_cspa_dataset but with a caller-supplied mixing matrix.
CspaData gen_cspa_dataset(Eigen::Index n_per_class, const Matrix& a, Rng& rng);

/// Y' = B^T W (Y - mean).
SignalMatrix csp_filter(const StiefelPoint& b, const Matrix& w, const Vector& mean, const SignalMatrix& y);

/// Sample covariance (1/T) of mean-centred rows.
Matrix sample_covariance(const Matrix& data);

/// Horizontal concatenation.
SignalMatrix concat(const SignalMatrix& a, const SignalMatrix& b);

}  // namespace bajd

#include "bajd/synth.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace bajd {

StiefelPoint random_stiefel(Eigen::Index n, Eigen::Index m, Rng& rng) {
  if (m < 1 || m > n) throw std::invalid_argument("random_stiefel: need 1 <= m <= n");
  return StiefelPoint::orthonormalize(gaussian_matrix(n, m, rng));
}

PlantedInstance gen_jd_dataset(Eigen::Index n, Eigen::Index m, Eigen::Index k, double sigma2, Rng& rng) {
  if (n < 1 || m < 1 || m > n || k < 1) throw std::invalid_argument("gen_jd_dataset: invalid dimensions");
  if (!(sigma2 >= 0.0)) throw std::invalid_argument("gen_jd_dataset: sigma2 must be >= 0");
  StiefelPoint b = random_stiefel(n, m, rng);
  EigenvalueSet u{gaussian_matrix(m, k, rng)};
  const double sd = std::sqrt(sigma2);
  std::vector<Matrix> mats;
  mats.reserve(static_cast<std::size_t>(k));
  for (Eigen::Index j = 0; j < k; ++j) {
    Matrix ck = reconstruct(b, u.u(j));
    if (sd > 0.0) ck += sd * gaussian_matrix(n, n, rng);
    mats.push_back(std::move(ck));
  }
  return {MatrixSet(std::move(mats)), std::move(b), std::move(u), sigma2};
}

SignalMatrix gen_sine_sources(Eigen::Index n_sources, Eigen::Index n_samples) {
  if (n_sources < 1 || n_samples < 1) throw std::invalid_argument("gen_sine_sources: invalid shape");
  SignalMatrix s{Matrix(n_sources, n_samples)};
  const double two_pi = 2.0 * std::numbers::pi;
  for (Eigen::Index i = 0; i < n_sources; ++i) {
    const double freq = 2.0 + 3.0 * static_cast<double>(i);
    const double phase = static_cast<double>(i) * std::numbers::pi / 7.0;
    for (Eigen::Index t = 0; t < n_samples; ++t)
      s.data(i, t) = std::sin(two_pi * freq * static_cast<double>(t) / static_cast<double>(n_samples) + phase);
  }
  return s;
}

SignalMatrix mix_and_noise(const SignalMatrix& s, const Matrix& a, double sigma, Rng& rng) {
  if (a.rows() != a.cols() || a.cols() != s.channels())
    throw std::invalid_argument("mix_and_noise: mixing matrix must be channels x channels");
  if (!(sigma >= 0.0)) throw std::invalid_argument("mix_and_noise: sigma must be >= 0");
  Eigen::FullPivLU<Matrix> lu(a);
  if (!lu.isInvertible()) throw std::invalid_argument("mix_and_noise: mixing matrix is singular");
  SignalMatrix x{a * s.data};
  if (sigma > 0.0) x.data += sigma * gaussian_matrix(x.channels(), x.samples(), rng);
  return x;
}

Matrix sample_covariance(const Matrix& data) {
  const Vector mean = data.rowwise().mean();
  const Matrix centred = data.colwise() - mean;
  return centred * centred.transpose() / static_cast<double>(data.cols());
}

Whitening whiten(const SignalMatrix& x) {
  const Vector mean = x.data.rowwise().mean();
  const Matrix centred = x.data.colwise() - mean;
  const Matrix cov = centred * centred.transpose() / static_cast<double>(x.samples());
  Eigen::SelfAdjointEigenSolver<Matrix> es(cov);
  if (es.info() != Eigen::Success) throw std::runtime_error("whiten: eigensolver failed");
  if (es.eigenvalues().minCoeff() < 1e-12) throw std::invalid_argument("whiten: covariance is rank deficient");
  const Matrix w = es.eigenvalues().cwiseInverse().cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
  return {w, mean, SignalMatrix{w * centred}};
}

MatrixSet lagged_covariances(const SignalMatrix& x_tilde, Eigen::Index max_lag) {
  const Eigen::Index t_len = x_tilde.samples();
  if (max_lag < 1 || max_lag >= t_len) throw std::invalid_argument("lagged_covariances: need 1 <= max_lag < T");
  std::vector<Matrix> mats;
  mats.reserve(static_cast<std::size_t>(max_lag));
  for (Eigen::Index tau = 1; tau <= max_lag; ++tau) {
    const Eigen::Index len = t_len - tau;
    const auto ahead = x_tilde.data.middleCols(tau, len);
    const auto behind = x_tilde.data.leftCols(len);
    mats.push_back(ahead * behind.transpose() / static_cast<double>(len));
  }
  return MatrixSet(std::move(mats));
}

CspaData gen_cspa_dataset(Eigen::Index n_per_class, const Matrix& a, Rng& rng) {
  if (n_per_class < 2) throw std::invalid_argument("gen_cspa_dataset: need at least 2 samples per class");
  if (a.rows() != 2 || a.cols() != 2) throw std::invalid_argument("gen_cspa_dataset: A must be 2 x 2");
  Vector sd1(2), sd2(2);
  sd1 << std::sqrt(0.1), std::sqrt(0.9);
  sd2 << std::sqrt(0.9), std::sqrt(0.1);
  const Matrix s1 = sd1.asDiagonal() * gaussian_matrix(2, n_per_class, rng);
  const Matrix s2 = sd2.asDiagonal() * gaussian_matrix(2, n_per_class, rng);
  return {SignalMatrix{a * s1}, SignalMatrix{a * s2}, a};
}

Matrix conditioned_gaussian(Eigen::Index n, double max_cond, Rng& rng) {
  if (n < 1 || !(max_cond > 1.0)) throw std::invalid_argument("conditioned_gaussian: need n >= 1 and max_cond > 1");
  while (true) {
    Matrix a = gaussian_matrix(n, n, rng);
    const Vector sv = Eigen::JacobiSVD<Matrix>(a).singularValues();
    if (sv[n - 1] > 0.0 && sv[0] / sv[n - 1] < max_cond) return a;
  }
}

CspaData gen_cspa_dataset(Eigen::Index n_per_class, Rng& rng) {
  const Matrix a = conditioned_gaussian(2, 20.0, rng);
  return gen_cspa_dataset(n_per_class, a, rng);
}

SignalMatrix csp_filter(const StiefelPoint& b, const Matrix& w, const Vector& mean, const SignalMatrix& y) {
  if (w.cols() != y.channels() || mean.size() != y.channels() || b.rows() != w.rows())
    throw std::invalid_argument("csp_filter: dimension mismatch");
  return SignalMatrix{b.matrix().transpose() * w * (y.data.colwise() - mean)};
}

SignalMatrix concat(const SignalMatrix& a, const SignalMatrix& b) {
  if (a.channels() != b.channels()) throw std::invalid_argument("concat: channel mismatch");
  SignalMatrix out{Matrix(a.channels(), a.samples() + b.samples())};
  out.data << a.data, b.data;
  return out;
}

}  // namespace bajd

#include "bajd/synth.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace bajd;

namespace {

double correlation(const Vector& a, const Vector& b) {
  const Vector ac = a.array() - a.mean();
  const Vector bc = b.array() - b.mean();
  return ac.dot(bc) / (ac.norm() * bc.norm());
}

Matrix covariance(const SignalMatrix& s) { return sample_covariance(s.data); }

}  // namespace

TEST(RandomStiefel, ValidAndDeterministic) {
  Rng a(100), b(100);
  for (int t = 0; t < 20; ++t) {
    const StiefelPoint x = random_stiefel(7, 1 + t % 7, a);
    const StiefelPoint y = random_stiefel(7, 1 + t % 7, b);
    EXPECT_LT(x.orthonormality_error(), 1e-12);
    EXPECT_EQ(x.matrix(), y.matrix());
  }
}

TEST(RandomStiefel, HaarSecondMoment) {
  Rng rng(101);
  const int n = 50000;
  double acc = 0.0;
  for (int t = 0; t < n; ++t) {
    const double v = random_stiefel(4, 4, rng).matrix()(0, 0);
    acc += v * v;
  }
  EXPECT_NEAR(acc / n, 0.25, 0.01);
}

TEST(GenJdDataset, NoiselessIsExactAndSymmetric) {
  Rng rng(102);
  const auto inst = gen_jd_dataset(6, 3, 8, 0.0, rng);
  for (std::size_t k = 0; k < inst.c.size(); ++k) {
    EXPECT_EQ(inst.c[k], inst.c[k].transpose());
    EXPECT_LT((inst.c[k] - reconstruct(inst.b_true, inst.u_true.u(static_cast<Eigen::Index>(k)))).cwiseAbs().maxCoeff(),
              1e-14);
  }
}

TEST(GenJdDataset, PaperShapeAndNoiseVariance) {
  Rng rng(103);
  const auto inst = gen_jd_dataset(10, 5, 100, 0.01, rng);
  ASSERT_EQ(inst.c.size(), 100u);
  EXPECT_EQ(inst.c.dim(), 10);
  EXPECT_EQ(inst.b_true.cols(), 5);
  EXPECT_EQ(inst.u_true.values.rows(), 5);
  EXPECT_EQ(inst.sigma2_true, 0.01);
  std::vector<double> resid;
  for (std::size_t k = 0; k < inst.c.size(); ++k) {
    const Matrix e = inst.c[k] - reconstruct(inst.b_true, inst.u_true.u(static_cast<Eigen::Index>(k)));
    for (Eigen::Index i = 0; i < e.size(); ++i) resid.push_back(e.data()[i]);
  }
  EXPECT_NEAR(oracle::variance(resid), 0.01, 0.0005);
  EXPECT_FALSE(inst.c[0].isApprox(inst.c[0].transpose()));
}

TEST(GenJdDataset, Deterministic) {
  Rng a(104), b(104);
  const auto x = gen_jd_dataset(5, 2, 3, 0.1, a);
  const auto y = gen_jd_dataset(5, 2, 3, 0.1, b);
  for (std::size_t k = 0; k < 3; ++k) EXPECT_EQ(x.c[k], y.c[k]);
}

TEST(SineSources, MeansAndCorrelations) {
  const SignalMatrix s = gen_sine_sources(10, 1000);
  ASSERT_EQ(s.channels(), 10);
  ASSERT_EQ(s.samples(), 1000);
  for (Eigen::Index i = 0; i < 10; ++i) {
    EXPECT_LT(std::abs(s.data.row(i).mean()), 0.01);
    EXPECT_NEAR(s.data(i, 0), std::sin(static_cast<double>(i) * std::numbers::pi / 7.0), 1e-15);
    for (Eigen::Index j = 0; j < i; ++j)
      EXPECT_LT(std::abs(correlation(s.data.row(i).transpose(), s.data.row(j).transpose())), 0.05);
  }
}

TEST(MixAndNoise, IdentityNoiselessAndNoiseVariance) {
  const SignalMatrix s = gen_sine_sources(3, 500);
  Rng rng(105);
  EXPECT_EQ(mix_and_noise(s, Matrix::Identity(3, 3), 0.0, rng).data, s.data);
  const Matrix a = gaussian_matrix(3, 3, rng);
  const SignalMatrix x = mix_and_noise(s, a, 0.1, rng);
  const Matrix e = x.data - a * s.data;
  std::vector<double> v(e.data(), e.data() + e.size());
  EXPECT_NEAR(oracle::variance(v), 0.01, 0.0005);
  EXPECT_THROW(mix_and_noise(s, Matrix::Zero(3, 3), 0.1, rng), std::invalid_argument);
  EXPECT_THROW(mix_and_noise(s, Matrix::Identity(2, 2), 0.1, rng), std::invalid_argument);
}

TEST(Whiten, CovarianceIsIdentity) {
  Rng rng(106);
  const SignalMatrix x = mix_and_noise(gen_sine_sources(6, 1000), gaussian_matrix(6, 6, rng), 0.1, rng);
  const Whitening w = whiten(x);
  EXPECT_LT((covariance(w.x_tilde) - Matrix::Identity(6, 6)).cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_LT(w.x_tilde.data.rowwise().mean().cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Whiten, WhiteInputGivesOrthogonalW) {
  Rng rng(107);
  SignalMatrix x{gaussian_matrix(4, 2000, rng)};
  // make the sample covariance exactly the identity first
  x = whiten(x).x_tilde;
  const Whitening w = whiten(x);
  EXPECT_LT((w.w * w.w.transpose() - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Whiten, ScaleInvariance) {
  Rng rng(108);
  const SignalMatrix x = mix_and_noise(gen_sine_sources(4, 800), gaussian_matrix(4, 4, rng), 0.1, rng);
  const Whitening w1 = whiten(x);
  const Whitening w5 = whiten(SignalMatrix{5.0 * x.data});
  for (Eigen::Index i = 0; i < 4; ++i) {
    const double s = w1.x_tilde.data.row(i).dot(w5.x_tilde.data.row(i)) > 0 ? 1.0 : -1.0;
    EXPECT_LT((w1.x_tilde.data.row(i) - s * w5.x_tilde.data.row(i)).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_LT((w1.w.row(i) - s * 5.0 * w5.w.row(i)).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(Whiten, MixingInvariance) {
  const SignalMatrix s = gen_sine_sources(5, 1000);
  Rng rng(109);
  for (int t = 0; t < 5; ++t) {
    const SignalMatrix x = mix_and_noise(s, gaussian_matrix(5, 5, rng), 0.05, rng);
    EXPECT_LT((covariance(whiten(x).x_tilde) - Matrix::Identity(5, 5)).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(Whiten, RejectsRankDeficientInput) {
  Matrix d(2, 100);
  for (Eigen::Index t = 0; t < 100; ++t) d(0, t) = d(1, t) = std::sin(0.3 * static_cast<double>(t));
  EXPECT_THROW(whiten(SignalMatrix{d}), std::invalid_argument);
}

TEST(LaggedCovariances, DefinitionAndCount) {
  Rng rng(110);
  const SignalMatrix x{gaussian_matrix(3, 50, rng)};
  const MatrixSet c = lagged_covariances(x, 4);
  ASSERT_EQ(c.size(), 4u);
  for (Eigen::Index tau = 1; tau <= 4; ++tau)
    for (Eigen::Index i = 0; i < 3; ++i)
      for (Eigen::Index j = 0; j < 3; ++j) {
        double acc = 0.0;
        for (Eigen::Index t = 0; t + tau < 50; ++t) acc += x.data(i, t + tau) * x.data(j, t);
        EXPECT_NEAR(c[static_cast<std::size_t>(tau - 1)](i, j), acc / static_cast<double>(50 - tau), 1e-13);
      }
  EXPECT_THROW(lagged_covariances(x, 50), std::invalid_argument);
  const MatrixSet paper = lagged_covariances(whiten(SignalMatrix{gaussian_matrix(10, 1000, rng)}).x_tilde, 100);
  EXPECT_EQ(paper.size(), 100u);
}

TEST(LaggedCovariances, WhiteNoiseIsSmall) {
  Rng rng(111);
  const Eigen::Index t = 20000;
  const SignalMatrix x{gaussian_matrix(2, t, rng)};
  const MatrixSet c = lagged_covariances(x, 5);
  for (const auto& m : c.matrices()) EXPECT_LT(m.cwiseAbs().maxCoeff(), 3.0 / std::sqrt(static_cast<double>(t)));
}

TEST(LaggedCovariances, PureSourcesAreNearlyDiagonal) {
  // unit-variance sources; eigen-square-root whitening would add an arbitrary
  // rotation because the source covariance is nearly isotropic
  const Eigen::Index t_len = 1000;
  SignalMatrix s = gen_sine_sources(10, t_len);
  const Matrix cov = sample_covariance(s.data);
  s.data = cov.diagonal().cwiseSqrt().cwiseInverse().asDiagonal() * (s.data.colwise() - s.data.rowwise().mean());
  const MatrixSet c = lagged_covariances(s, 100);
  for (Eigen::Index tau = 1; tau <= 100; ++tau) {
    const Matrix& m = c[static_cast<std::size_t>(tau - 1)];
    for (Eigen::Index i = 0; i < 10; ++i)
      for (Eigen::Index j = 0; j < 10; ++j) {
        if (i == j) continue;
        // 2 sin(a) sin(b) = cos(a - b) - cos(a + b); each partial cosine sum is
        // bounded by the Dirichlet kernel 1 / |sin(pi df / T)|
        const double df = 3.0 * static_cast<double>(std::abs(i - j));
        const double sf = 4.0 + 3.0 * static_cast<double>(i + j);
        const double bound = (1.0 / std::abs(std::sin(std::numbers::pi * df / t_len)) +
                              1.0 / std::abs(std::sin(std::numbers::pi * sf / t_len))) /
                             static_cast<double>(t_len - tau);
        EXPECT_LE(std::abs(m(i, j)), bound * 1.001) << "tau " << tau;
        // windows long enough to keep the leakage small
        if (tau < 45) EXPECT_LT(std::abs(m(i, j)), 0.05) << "tau " << tau;
      }
  }
}

TEST(ConditionedGaussian, RespectsBound) {
  Rng rng(112);
  for (int t = 0; t < 20; ++t) {
    const Matrix a = conditioned_gaussian(6, 10.0, rng);
    const Vector sv = Eigen::JacobiSVD<Matrix>(a).singularValues();
    EXPECT_LT(sv[0] / sv[5], 10.0);
  }
  EXPECT_THROW(conditioned_gaussian(3, 1.0, rng), std::invalid_argument);
}

TEST(Cspa, SourceCovariances) {
  Rng rng(113);
  const CspaData d = gen_cspa_dataset(200, Matrix::Identity(2, 2), rng);
  const Matrix c1 = covariance(d.y1);
  const Matrix c2 = covariance(d.y2);
  EXPECT_NEAR(c1(0, 0), 0.1, 0.02);
  EXPECT_NEAR(c1(1, 1), 0.9, 0.18);
  EXPECT_NEAR(c2(0, 0), 0.9, 0.18);
  EXPECT_NEAR(c2(1, 1), 0.1, 0.02);
  EXPECT_EQ(d.y1.samples(), 200);
  EXPECT_EQ(d.a, Matrix::Identity(2, 2));
}

TEST(Cspa, CovariancePropagation) {
  Rng rng(114);
  const CspaData d = gen_cspa_dataset(200, rng);
  EXPECT_GT(std::abs(d.a.determinant()), 0.0);
  // same source draws through the identity give S directly
  Rng again(114);
  const Matrix a_first = conditioned_gaussian(2, 20.0, again);
  EXPECT_EQ(a_first, d.a);
  const CspaData s = gen_cspa_dataset(200, Matrix::Identity(2, 2), again);
  EXPECT_LT((covariance(d.y1) - d.a * covariance(s.y1) * d.a.transpose()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((d.y1.data - d.a * s.y1.data).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_THROW(gen_cspa_dataset(1, rng), std::invalid_argument);
}

TEST(CspFilter, TrivialAndPooledCovariance) {
  Rng rng(115);
  Matrix y = gaussian_matrix(2, 50, rng);
  y = y.colwise() - y.rowwise().mean();
  const SignalMatrix out =
      csp_filter(StiefelPoint(Matrix::Identity(2, 2)), Matrix::Identity(2, 2), Vector::Zero(2), SignalMatrix{y});
  EXPECT_EQ(out.data, y);

  const CspaData d = gen_cspa_dataset(200, rng);
  const SignalMatrix pooled = concat(d.y1, d.y2);
  const Whitening w = whiten(pooled);
  const StiefelPoint b = random_stiefel(2, 2, rng);
  const SignalMatrix f = csp_filter(b, w.w, w.mean, pooled);
  EXPECT_LT((covariance(f) - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Concat, JoinsSamples) {
  const SignalMatrix a{Matrix::Ones(2, 3)};
  const SignalMatrix b{Matrix::Zero(2, 4)};
  const SignalMatrix c = concat(a, b);
  EXPECT_EQ(c.samples(), 7);
  EXPECT_EQ(c.data.col(2), Vector::Ones(2));
  EXPECT_EQ(c.data.col(3), Vector::Zero(2));
  EXPECT_THROW(concat(a, SignalMatrix{Matrix::Zero(3, 1)}), std::invalid_argument);
}

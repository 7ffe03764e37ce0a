#include "bajd/diagnostics.hpp"
#include "bajd/gibbs.hpp"
#include "bajd/matrix_lb.hpp"
#include "bajd/synth.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace bajd;

namespace {

double principal_angle_sin(const Matrix& a, const Matrix& b) {
  // largest sine of the principal angles between the column spans
  const Matrix proj = a - b * (b.transpose() * a);
  return Eigen::JacobiSVD<Matrix>(proj).singularValues()[0];
}

double skewness(const std::vector<double>& v) {
  const double mu = oracle::mean(v);
  double m2 = 0.0, m3 = 0.0;
  for (double x : v) {
    m2 += (x - mu) * (x - mu);
    m3 += (x - mu) * (x - mu) * (x - mu);
  }
  m2 /= static_cast<double>(v.size());
  m3 /= static_cast<double>(v.size());
  return m3 / std::pow(m2, 1.5);
}

SamplerConfig small_config(int n, int burn, std::uint64_t seed) {
  SamplerConfig cfg;
  cfg.n_samples = n;
  cfg.burn_in = burn;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST(SamplerConfig, Validation) {
  SamplerConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.burn_in = cfg.n_samples;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = SamplerConfig{};
  cfg.thin = 0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = SamplerConfig{};
  cfg.n_chains = 0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  EXPECT_EQ(SamplerConfig{}.hyper_for(3).a, Vector::Constant(3, 1e-3));
  EXPECT_EQ(parse_init_method("mean-eigen"), InitMethod::kMeanEigen);
  EXPECT_EQ(init_method_name(InitMethod::kRandom), "random");
  EXPECT_THROW(parse_init_method("zeros"), std::invalid_argument);
}

TEST(InitState, NoiselessPlantedSpan) {
  Rng rng(60);
  const auto inst = gen_jd_dataset(10, 5, 100, 0.0, rng);
  for (InitMethod method : {InitMethod::kMeanEigen, InitMethod::kJointEigen}) {
    Rng r(1);
    const ChainState s = init_state(inst.c, 5, HyperParams::uniform(100, 1e-3, 1e-3), r, method);
    EXPECT_LT(principal_angle_sin(s.b.matrix(), inst.b_true.matrix()), 1e-6) << init_method_name(method);
    EXPECT_EQ(s.noise.v2, Vector::Ones(100));
  }
}

TEST(InitState, SingleDiagonalMatrix) {
  Rng rng(61);
  const MatrixSet c({(Matrix(2, 2) << 5, 0, 0, 1).finished()});
  for (InitMethod method : {InitMethod::kMeanEigen, InitMethod::kJointEigen}) {
    const ChainState s = init_state(c, 1, HyperParams::uniform(1, 1e-3, 1e-3), rng, method);
    EXPECT_NEAR(std::abs(s.b.col(0)[0]), 1.0, 1e-12);
    EXPECT_NEAR(s.u.values(0, 0), 5.0, 1e-12);
    EXPECT_NEAR(s.noise.sigma2[0], 0.25, 1e-12);
    EXPECT_EQ(s.noise.v2[0], 1.0);
  }
}

TEST(InitState, BeatsRandomPoints) {
  Rng rng(62);
  const auto inst = gen_jd_dataset(8, 4, 30, 0.1, rng);
  const auto hyper = HyperParams::uniform(30, 1e-3, 1e-3);
  auto fit = [&](const StiefelPoint& b) {
    double r = 0.0;
    const Matrix a = build_design_matrix(b);
    for (std::size_t k = 0; k < inst.c.size(); ++k)
      r += residual_norm2(inst.c[k], b, a.transpose() * vectorize(inst.c[k]));
    return r;
  };
  for (InitMethod method : {InitMethod::kMeanEigen, InitMethod::kJointEigen}) {
    const ChainState s = init_state(inst.c, 4, hyper, rng, method);
    const double base = fit(s.b);
    for (int t = 0; t < 100; ++t) EXPECT_LE(base, fit(random_stiefel(8, 4, rng)));
  }
}

TEST(SampleU, RidgeLimitAndVanishingNoise) {
  Rng rng(63);
  const StiefelPoint b = random_stiefel(5, 3, rng);
  const Matrix a = build_design_matrix(b);
  const Vector x = vectorize(gaussian_matrix(5, 5, rng));
  const Vector ls = a.transpose() * x;
  Vector acc = Vector::Zero(3);
  for (int t = 0; t < 20000; ++t) acc += sample_u_k(x, a, 1e-4, 1e12, rng);
  EXPECT_LT((acc / 20000.0 - ls).cwiseAbs().maxCoeff(), 1e-3);
  const Vector mu = ls / (1.0 + 1.0 / 0.7);
  for (int t = 0; t < 100; ++t) EXPECT_LT((sample_u_k(x, a, 1e-12, 0.7, rng) - mu).cwiseAbs().maxCoeff(), 1e-4);
  EXPECT_THROW(sample_u_k(x, a, 0.0, 1.0, rng), std::invalid_argument);
  EXPECT_THROW(sample_u_k(x, a, 1.0, -1.0, rng), std::invalid_argument);
}

TEST(SampleU, ScalarPosteriorMean) {
  Rng rng(64);
  const Matrix a = Matrix::Ones(1, 1);
  const Vector x = Vector::Constant(1, 3.0);
  double acc = 0.0;
  for (int t = 0; t < 100000; ++t) acc += sample_u_k(x, a, 0.5, 2.0, rng)[0];
  EXPECT_NEAR(acc / 100000.0, 3.0 / (1.0 + 0.5), 0.01);
}

TEST(SampleU, MomentsAndNormality) {
  Rng rng(65);
  const StiefelPoint b = random_stiefel(6, 3, rng);
  const Matrix a = build_design_matrix(b);
  const Vector truth = (Vector(3) << 6.0, -4.0, 10.0).finished();
  const Vector x = a * truth + 0.1 * vectorize(gaussian_matrix(6, 6, rng));
  const double s2 = 2.0, v2 = 1.0;
  const Vector mu = (1.0 / (1.0 + 1.0 / v2)) * (a.transpose() * x);
  const double var = s2 / (1.0 + 1.0 / v2);
  const int n = 100000;
  std::vector<std::vector<double>> draws(3);
  Matrix cov = Matrix::Zero(3, 3);
  Vector mean = Vector::Zero(3);
  std::vector<Vector> all;
  for (int t = 0; t < n; ++t) {
    const Vector u = sample_u_k(x, a, s2, v2, rng);
    all.push_back(u);
    mean += u;
    for (int i = 0; i < 3; ++i) draws[static_cast<std::size_t>(i)].push_back(u[i]);
  }
  mean /= n;
  for (const auto& u : all) cov += (u - mean) * (u - mean).transpose();
  cov /= (n - 1);
  for (int i = 0; i < 3; ++i) {
    EXPECT_NEAR(mean[i] / mu[i], 1.0, 0.01);
    EXPECT_NEAR(cov(i, i) / var, 1.0, 0.01);
    for (int j = 0; j < 3; ++j)
      if (i != j) EXPECT_LT(std::abs(cov(i, j)), 0.01 * var);
    EXPECT_LT(std::abs(skewness(draws[static_cast<std::size_t>(i)])), 0.05);
  }
}

TEST(NoisePosteriors, ShapesAndRates) {
  Rng rng(66);
  const StiefelPoint b = random_stiefel(10, 5, rng);
  const Matrix a = build_design_matrix(b);
  const Vector u = Vector::Zero(5);
  const Vector x = a * u;
  const auto sp = sigma2_posterior(x, a, u, 1.0, 1e-3, 1e-3);
  EXPECT_NEAR(sp.shape, 52.501, 1e-12);
  EXPECT_NEAR(sp.rate, 1e-3, 1e-15);
  const auto vp = v2_posterior(u, 1.0, 1e-3, 1e-3);
  EXPECT_NEAR(vp.shape, 2.501, 1e-12);
  EXPECT_NEAR(vp.rate, 1e-3, 1e-15);

  const Vector u2 = (Vector(5) << 1, 2, -1, 0.5, 3).finished();
  const Vector x2 = a * u2 + 0.3 * vectorize(gaussian_matrix(10, 10, rng));
  const auto sp2 = sigma2_posterior(x2, a, u2, 2.0, 0.5, 0.25);
  const double resid = (x2 - a * u2).squaredNorm();
  EXPECT_NEAR(sp2.rate, 0.25 + 0.5 * resid + 0.5 * u2.squaredNorm() / 2.0, 1e-10);
  const auto vp2 = v2_posterior(u2, 0.4, 0.5, 0.25);
  EXPECT_NEAR(vp2.rate, 0.25 + 0.5 * u2.squaredNorm() / 0.4, 1e-12);
}

TEST(NoisePosteriors, PrecisionDrawMoments) {
  Rng rng(67);
  const StiefelPoint b = random_stiefel(4, 2, rng);
  const Matrix a = build_design_matrix(b);
  const Vector u = (Vector(2) << 1.5, -0.5).finished();
  const Vector x = a * u + 0.5 * vectorize(gaussian_matrix(4, 4, rng));
  const auto sp = sigma2_posterior(x, a, u, 1.3, 0.1, 0.2);
  const auto vp = v2_posterior(u, 0.8, 0.1, 0.2);
  double s_prec = 0.0, v_prec = 0.0;
  const int n = 100000;
  for (int t = 0; t < n; ++t) {
    s_prec += 1.0 / sample_sigma2_k(x, a, u, 1.3, 0.1, 0.2, rng);
    v_prec += 1.0 / sample_v2_k(u, 0.8, 0.1, 0.2, rng);
  }
  EXPECT_NEAR((s_prec / n) / (sp.shape / sp.rate), 1.0, 0.01);
  EXPECT_NEAR((v_prec / n) / (vp.shape / vp.rate), 1.0, 0.01);
}

TEST(RunChain, ShapesInvariantsAndDeterminism) {
  Rng rng(68);
  const auto inst = gen_jd_dataset(6, 3, 10, 0.05, rng);
  SamplerConfig cfg = small_config(60, 20, 9);
  cfg.thin = 3;
  Rng r1(chain_seed(9, 0)), r2(chain_seed(9, 0));
  const ChainTrace a = run_chain(inst.c, 3, cfg, r1);
  const ChainTrace b = run_chain(inst.c, 3, cfg, r2);
  EXPECT_EQ(a.loglik.size(), 60u);
  EXPECT_EQ(a.logpost.size(), 60u);
  EXPECT_EQ(a.sigma2.size(), 60u);
  ASSERT_EQ(a.retained.size(), 14u);
  EXPECT_EQ(a.retained.front().iter, 20);
  EXPECT_EQ(a.retained[1].iter, 23);
  EXPECT_EQ(a.loglik, b.loglik);
  EXPECT_EQ(a.logpost, b.logpost);
  for (double v : a.loglik) EXPECT_TRUE(std::isfinite(v));
  for (const auto& r : a.retained) {
    EXPECT_LT(r.state.b.orthonormality_error(), 1e-8);
    EXPECT_NO_THROW(r.state.validate(6, 10));
    EXPECT_EQ(r.loglik, a.loglik[static_cast<std::size_t>(r.iter)]);
  }
}

TEST(RunChains, MatchesSingleChainsAndIsInterleavingFree) {
  Rng rng(69);
  const auto inst = gen_jd_dataset(5, 2, 6, 0.05, rng);
  SamplerConfig cfg = small_config(40, 10, 17);
  cfg.n_chains = 3;
  const auto par = run_chains(inst.c, 2, cfg);
  cfg.parallel = false;
  const auto seq = run_chains(inst.c, 2, cfg);
  ASSERT_EQ(par.size(), 3u);
  for (std::size_t c = 0; c < 3; ++c) {
    EXPECT_EQ(par[c].chain, static_cast<int>(c));
    EXPECT_EQ(par[c].loglik, seq[c].loglik);
    Rng r(chain_seed(17, c));
    EXPECT_EQ(run_chain(inst.c, 2, cfg, r).loglik, par[c].loglik);
  }
  EXPECT_NE(par[0].loglik, par[1].loglik);
}

TEST(RunChain, ScalarModel) {
  const MatrixSet c({Matrix::Constant(1, 1, 2.5)});
  Rng rng(70);
  const ChainTrace t = run_chain(c, 1, small_config(200, 50, 1), rng);
  for (const auto& r : t.retained) EXPECT_NEAR(std::abs(r.state.b.matrix()(0, 0)), 1.0, 1e-15);
}

TEST(RunChain, SquareAndFullRankPaths) {
  Rng rng(71);
  const auto inst = gen_jd_dataset(4, 4, 8, 0.05, rng);
  for (const char* scheme : {"rejection", "slice", "grid"}) {
    SamplerConfig cfg = small_config(100, 50, 3);
    cfg.scheme = ThetaScheme::parse(scheme);
    Rng r(5);
    const ChainTrace t = run_chain(inst.c, 4, cfg, r);
    EXPECT_EQ(t.retained.size(), 50u);
    EXPECT_LT(t.max_orthonormality_error, 1e-8);
  }
}

TEST(RunChain, PlantedLogLikelihoodReference) {
  Rng rng(72);
  const auto inst = gen_jd_dataset(10, 5, 100, 0.01, rng);
  const double truth = log_likelihood(inst.c, inst.b_true, inst.u_true, Vector::Constant(100, 0.01));
  SamplerConfig cfg = small_config(3000, 1500, 11);
  const auto traces = run_chains(inst.c, 5, cfg);
  const std::vector<double> tail(traces[0].loglik.begin() + 1500, traces[0].loglik.end());
  const double mean = oracle::mean(tail);
  const double sd = std::sqrt(oracle::variance(tail));
  EXPECT_NEAR(mean, truth, 3.0 * sd);
  const auto api = api_summary(traces, inst.b_true.matrix());
  EXPECT_LE(api.map, api.mean);
}

TEST(MapEstimate, SelectionAndTies) {
  EXPECT_THROW(map_estimate({}), std::invalid_argument);
  ChainState s{StiefelPoint(Matrix::Identity(2, 1)), EigenvalueSet{Matrix::Ones(1, 1)},
               NoiseState{Vector::Ones(1), Vector::Ones(1)}};
  ChainTrace a, b;
  a.chain = 0;
  b.chain = 1;
  a.retained.push_back({5, 0.0, 1.0, s});
  EXPECT_EQ(map_estimate({a}).iter, 5);
  a.retained.push_back({6, 0.0, 3.0, s});
  b.retained.push_back({2, 0.0, 3.0, s});
  const std::vector<ChainTrace> both{a, b};
  const auto& m = map_estimate(both);
  EXPECT_EQ(m.iter, 6);
  EXPECT_EQ(&m, &both[0].retained[1]);
}

TEST(LogPosterior, AddsPriorTerms) {
  Rng rng(73);
  const auto inst = gen_jd_dataset(3, 2, 2, 0.2, rng);
  ChainState s{inst.b_true, inst.u_true, NoiseState{(Vector(2) << 0.3, 0.4).finished(), (Vector(2) << 2.0, 0.5).finished()}};
  const HyperParams h = HyperParams::uniform(2, 1.5, 0.7);
  double expected = log_likelihood(inst.c, s.b, s.u, s.noise.sigma2);
  for (int k = 0; k < 2; ++k) {
    const double s2 = s.noise.sigma2[k], v2 = s.noise.v2[k];
    const double var_u = s2 * v2;
    for (int m = 0; m < 2; ++m) {
      const double u = s.u.values(m, k);
      expected += -0.5 * std::log(2 * std::numbers::pi * var_u) - u * u / (2 * var_u);
    }
    for (double x : {s2, v2}) expected += 1.5 * std::log(0.7) - std::lgamma(1.5) - 2.5 * std::log(x) - 0.7 / x;
  }
  EXPECT_NEAR(log_posterior(inst.c, s, h), expected, 1e-9);
}

TEST(Conjugacy, SuccessiveConditionalSimulatorMatchesPrior) {
  // Alternate one Gibbs sweep with a fresh data draw given the parameters:
  // the parameter marginals must stay at the prior.
  const Eigen::Index n = 3, m = 2, k = 2;
  const double a0 = 4.0, b0 = 3.0;  // InvGamma mean 1, variance 0.5
  Rng rng(74);
  auto inv_gamma = [&](double shape, double scale) { return 1.0 / gamma_draw(shape, 1.0 / scale, rng); };

  StiefelPoint b = random_stiefel(n, m, rng);
  Vector s2(k), v2(k);
  Matrix u(m, k);
  for (Eigen::Index j = 0; j < k; ++j) {
    s2[j] = inv_gamma(a0, b0);
    v2[j] = inv_gamma(a0, b0);
    for (Eigen::Index i = 0; i < m; ++i) u(i, j) = std::sqrt(s2[j] * v2[j]) * std_normal(rng);
  }
  auto draw_data = [&]() {
    std::vector<Matrix> cs;
    for (Eigen::Index j = 0; j < k; ++j)
      cs.push_back(reconstruct(b, u.col(j)) + std::sqrt(s2[j]) * gaussian_matrix(n, n, rng));
    return MatrixSet(cs);
  };

  std::vector<double> s_series, v_series;
  const int iters = 60000;
  for (int t = 0; t < iters; ++t) {
    const MatrixSet c = draw_data();
    const Matrix a = build_design_matrix(b);
    for (Eigen::Index j = 0; j < k; ++j) {
      const Vector x = vectorize(c[static_cast<std::size_t>(j)]);
      u.col(j) = sample_u_k(x, a, s2[j], v2[j], rng);
      s2[j] = sample_sigma2_k(x, a, u.col(j), v2[j], a0, b0, rng);
      v2[j] = sample_v2_k(u.col(j), s2[j], a0, b0, rng);
    }
    b = sample_B_step(b, LBContext(c, s2, EigenvalueSet{u}), ThetaScheme{}, rng);
    s_series.push_back(s2[0]);
    v_series.push_back(v2[0]);
  }
  for (const auto* series : {&s_series, &v_series}) {
    const double mu = oracle::mean(*series);
    const double se = std::sqrt(oracle::variance(*series) / ess(*series));
    EXPECT_NEAR(mu, 1.0, 3.0 * se) << "se " << se;
  }
}

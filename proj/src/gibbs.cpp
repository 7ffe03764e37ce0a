#include "bajd/gibbs.hpp"

#include "bajd/baseline.hpp"
#include "bajd/matrix_io.hpp"
#include "bajd/matrix_lb.hpp"
#include "bajd/synth.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numbers>
#include <numeric>
#include <thread>

namespace bajd {

namespace {

constexpr double kReorthonormalizeAbove = 1e-9;

double log_inv_gamma(double x, double shape, double scale) {
  return shape * std::log(scale) - std::lgamma(shape) - (shape + 1.0) * std::log(x) - scale / x;
}

// Columns of `vecs` reordered by `keys` descending.
Matrix top_columns(const Matrix& vecs, const Vector& keys, Eigen::Index m) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(keys.size()));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  std::stable_sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) { return keys[a] > keys[b]; });
  Matrix out(vecs.rows(), m);
  for (Eigen::Index j = 0; j < m; ++j) out.col(j) = vecs.col(idx[static_cast<std::size_t>(j)]);
  return out;
}

std::string dump_state(const ChainState& s, int iter) {
  nlohmann::json j;
  j["iter"] = iter;
  j["b"] = row_major(s.b.matrix());
  j["u"] = row_major(s.u.values.transpose());
  j["sigma2"] = std::vector<double>(s.noise.sigma2.data(), s.noise.sigma2.data() + s.noise.sigma2.size());
  j["v2"] = std::vector<double>(s.noise.v2.data(), s.noise.v2.data() + s.noise.v2.size());
  // NaN/inf are not valid JSON numbers; nlohmann writes them as null
  return j.dump();
}

}  // namespace

void ChainState::validate(Eigen::Index n, Eigen::Index k) const {
  if (b.rows() != n) throw std::invalid_argument("ChainState: B has wrong row count");
  if (u.m() != b.cols() || u.k() != k) throw std::invalid_argument("ChainState: eigenvalue shape mismatch");
  if (noise.sigma2.size() != k) throw std::invalid_argument("ChainState: noise shape mismatch");
  noise.validate();
}

InitMethod parse_init_method(const std::string& name) {
  if (name == "mean-eigen") return InitMethod::kMeanEigen;
  if (name == "joint-eigen") return InitMethod::kJointEigen;
  if (name == "random") return InitMethod::kRandom;
  throw std::invalid_argument("unknown init method '" + name + "'");
}

std::string init_method_name(InitMethod m) {
  switch (m) {
    case InitMethod::kMeanEigen:
      return "mean-eigen";
    case InitMethod::kJointEigen:
      return "joint-eigen";
    case InitMethod::kRandom:
      return "random";
  }
  return "unknown";
}

void SamplerConfig::validate() const {
  if (n_samples < 1) throw std::invalid_argument("SamplerConfig: n_samples must be >= 1");
  if (burn_in < 0 || burn_in >= n_samples) throw std::invalid_argument("SamplerConfig: need 0 <= burn_in < n_samples");
  if (thin < 1) throw std::invalid_argument("SamplerConfig: thin must be >= 1");
  if (n_chains < 1) throw std::invalid_argument("SamplerConfig: n_chains must be >= 1");
  scheme.validate();
  if (hyper.a.size() > 0) hyper.validate();
}

HyperParams SamplerConfig::hyper_for(Eigen::Index k) const {
  if (hyper.a.size() == 0) return HyperParams::uniform(k, 1e-3, 1e-3);
  if (hyper.a.size() != k) throw std::invalid_argument("SamplerConfig: hyperparameters have wrong length");
  return hyper;
}

ChainState init_state(const MatrixSet& c, Eigen::Index m, const HyperParams& hyper, Rng& rng, InitMethod method) {
  const Eigen::Index n = c.dim();
  const auto k_count = static_cast<Eigen::Index>(c.size());
  if (m < 1 || m > n) throw std::invalid_argument("init_state: need 1 <= m <= N");
  if (hyper.a.size() != k_count) throw std::invalid_argument("init_state: hyperparameters have wrong length");

  std::vector<Matrix> sym;
  sym.reserve(c.size());
  for (const auto& ck : c.matrices()) sym.push_back(0.5 * (ck + ck.transpose()));

  Matrix b;
  switch (method) {
    case InitMethod::kMeanEigen: {
      Matrix mean = Matrix::Zero(n, n);
      for (const auto& s : sym) mean += s;
      mean /= static_cast<double>(k_count);
      const BinghamParams e = eigendecompose(mean);
      b = top_columns(e.eigvecs, e.eigvals.cwiseAbs(), m);
      break;
    }
    case InitMethod::kJointEigen: {
      Matrix energy = Matrix::Zero(n, n);
      for (const auto& s : sym) energy.noalias() += s * s;
      energy /= static_cast<double>(k_count);
      const BinghamParams e = eigendecompose(0.5 * (energy + energy.transpose()));
      const Matrix span = top_columns(e.eigvecs, e.eigvals, m);
      std::vector<Matrix> projected;
      projected.reserve(sym.size());
      for (const auto& s : sym) projected.push_back(span.transpose() * s * span);
      b = span * jacobi_jd(MatrixSet(std::move(projected)));
      break;
    }
    case InitMethod::kRandom:
      b = random_stiefel(n, m, rng).matrix();
      break;
  }

  ChainState s{StiefelPoint::orthonormalize(b), EigenvalueSet{Matrix(m, k_count)},
               NoiseState{Vector(k_count), Vector::Ones(k_count)}};
  const Matrix a = build_design_matrix(s.b);
  const double n2 = static_cast<double>(n * n);
  for (Eigen::Index k = 0; k < k_count; ++k) {
    const Matrix& ck = c[static_cast<std::size_t>(k)];
    s.u.u(k) = a.transpose() * vectorize(ck);
    s.noise.sigma2[k] = std::max(residual_norm2(ck, s.b, s.u.u(k)) / n2, 1e-6);
  }
  return s;
}

namespace {

Vector sample_u_k_impl(const Vector& x_k, const Matrix& a, const Matrix& ata, double sigma2_k, double v2_k,
                       Rng& rng) {
  if (!(sigma2_k > 0.0) || !(v2_k > 0.0)) throw std::invalid_argument("sample_u_k: variances must be positive");
  const Eigen::Index m = a.cols();
  Matrix precision = ata;
  precision.diagonal().array() += 1.0 / v2_k;
  const Eigen::LLT<Matrix> llt(precision);
  if (llt.info() != Eigen::Success) throw std::runtime_error("sample_u_k: precision not positive definite");
  const Vector mu = llt.solve(a.transpose() * x_k);
  Vector z(m);
  for (Eigen::Index i = 0; i < m; ++i) z[i] = std_normal(rng);
  // precision = L L^T, so L^{-T} z has covariance Sigma_u
  const Vector noise = llt.matrixU().solve(z);
  return mu + std::sqrt(sigma2_k) * noise;
}

}  // namespace

Vector sample_u_k(const Vector& x_k, const Matrix& a, double sigma2_k, double v2_k, Rng& rng) {
  if (x_k.size() != a.rows()) throw std::invalid_argument("sample_u_k: x_k length mismatch");
  return sample_u_k_impl(x_k, a, a.transpose() * a, sigma2_k, v2_k, rng);
}

GammaPosterior sigma2_posterior(const Vector& x_k, const Matrix& a, const Vector& u_k, double v2_k, double a_k,
                                double b_k) {
  if (!(v2_k > 0.0) || !(a_k > 0.0) || !(b_k > 0.0))
    throw std::invalid_argument("sigma2_posterior: parameters must be positive");
  const double n2 = static_cast<double>(a.rows());
  const double m = static_cast<double>(a.cols());
  const double shape = a_k + 0.5 * n2 + 0.5 * m;
  const double rate = b_k + 0.5 * (x_k - a * u_k).squaredNorm() + 0.5 * u_k.squaredNorm() / v2_k;
  if (!(rate > 0.0) || !std::isfinite(rate)) throw std::runtime_error("sigma2_posterior: invalid rate");
  return {shape, rate};
}

GammaPosterior v2_posterior(const Vector& u_k, double sigma2_k, double a_k, double b_k) {
  if (!(sigma2_k > 0.0) || !(a_k > 0.0) || !(b_k > 0.0))
    throw std::invalid_argument("v2_posterior: parameters must be positive");
  const double shape = a_k + 0.5 * static_cast<double>(u_k.size());
  const double rate = b_k + 0.5 * u_k.squaredNorm() / sigma2_k;
  if (!(rate > 0.0) || !std::isfinite(rate)) throw std::runtime_error("v2_posterior: invalid rate");
  return {shape, rate};
}

double sample_sigma2_k(const Vector& x_k, const Matrix& a, const Vector& u_k, double v2_k, double a_k, double b_k,
                       Rng& rng) {
  const GammaPosterior p = sigma2_posterior(x_k, a, u_k, v2_k, a_k, b_k);
  return 1.0 / gamma_draw(p.shape, 1.0 / p.rate, rng);
}

double sample_v2_k(const Vector& u_k, double sigma2_k, double a_k, double b_k, Rng& rng) {
  const GammaPosterior p = v2_posterior(u_k, sigma2_k, a_k, b_k);
  return 1.0 / gamma_draw(p.shape, 1.0 / p.rate, rng);
}

double log_posterior(const MatrixSet& c, const ChainState& s, const HyperParams& hyper) {
  double lp = log_likelihood(c, s.b, s.u, s.noise.sigma2);
  const double m = static_cast<double>(s.u.m());
  for (Eigen::Index k = 0; k < s.u.k(); ++k) {
    const double sigma2 = s.noise.sigma2[k];
    const double v2 = s.noise.v2[k];
    const double prior_var = sigma2 * v2;
    lp += -0.5 * m * std::log(2.0 * std::numbers::pi * prior_var) - 0.5 * s.u.u(k).squaredNorm() / prior_var;
    lp += log_inv_gamma(sigma2, hyper.a[k], hyper.b[k]);
    lp += log_inv_gamma(v2, hyper.a[k], hyper.b[k]);
  }
  return lp;
}

ChainTrace run_chain(const MatrixSet& c, Eigen::Index m, const SamplerConfig& config, Rng& rng) {
  config.validate();
  const auto k_count = static_cast<Eigen::Index>(c.size());
  const HyperParams hyper = config.hyper_for(k_count);
  std::vector<Vector> xs;
  xs.reserve(c.size());
  for (const auto& ck : c.matrices()) xs.push_back(vectorize(ck));

  ChainState state = init_state(c, m, hyper, rng, config.init);
  ChainTrace trace;
  trace.loglik.reserve(static_cast<std::size_t>(config.n_samples));
  trace.logpost.reserve(static_cast<std::size_t>(config.n_samples));
  trace.sigma2.reserve(static_cast<std::size_t>(config.n_samples));

  for (int it = 0; it < config.n_samples; ++it) {
    // overflowing conditionals surface as runtime errors; report them with the state
    try {
      const Matrix a = build_design_matrix(state.b);
      const Matrix ata = a.transpose() * a;
      for (Eigen::Index k = 0; k < k_count; ++k) {
        const auto ku = static_cast<std::size_t>(k);
        const Vector u_k = sample_u_k_impl(xs[ku], a, ata, state.noise.sigma2[k], state.noise.v2[k], rng);
        state.u.u(k) = u_k;
        state.noise.sigma2[k] = sample_sigma2_k(xs[ku], a, u_k, state.noise.v2[k], hyper.a[k], hyper.b[k], rng);
        state.noise.v2[k] = sample_v2_k(u_k, state.noise.sigma2[k], hyper.a[k], hyper.b[k], rng);
      }
      const LBContext ctx(c, state.noise.sigma2, state.u);
      state.b = sample_B_step(state.b, ctx, config.scheme, rng);
    } catch (const RejectionLimitError&) {
      throw;
    } catch (const std::runtime_error& e) {
      throw NumericalAbort(std::string(e.what()) + " at iteration " + std::to_string(it), dump_state(state, it));
    }

    const double err = state.b.orthonormality_error();
    trace.max_orthonormality_error = std::max(trace.max_orthonormality_error, err);
    if (err > kReorthonormalizeAbove) {
      state.b = StiefelPoint::orthonormalize(state.b.matrix());
      ++trace.reorthonormalizations;
    }

    const double ll = log_likelihood(c, state.b, state.u, state.noise.sigma2);
    const double lp = log_posterior(c, state, hyper);
    if (!std::isfinite(ll) || !std::isfinite(lp))
      throw NumericalAbort("non-finite log-likelihood at iteration " + std::to_string(it), dump_state(state, it));
    trace.loglik.push_back(ll);
    trace.logpost.push_back(lp);
    trace.sigma2.push_back(state.noise.sigma2);
    if (it >= config.burn_in && (it - config.burn_in) % config.thin == 0)
      trace.retained.push_back({it, ll, lp, state});
  }
  return trace;
}

std::vector<ChainTrace> run_chains(const MatrixSet& c, Eigen::Index m, const SamplerConfig& config) {
  config.validate();
  const auto n = static_cast<std::size_t>(config.n_chains);
  std::vector<ChainTrace> traces(n);
  std::vector<std::exception_ptr> errors(n);
  auto work = [&](std::size_t i) {
    try {
      Rng rng(chain_seed(config.seed, i));
      traces[i] = run_chain(c, m, config, rng);
      traces[i].chain = static_cast<int>(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  if (config.parallel && n > 1) {
    std::vector<std::thread> pool;
    pool.reserve(n);
    for (std::size_t i = 0; i < n; ++i) pool.emplace_back(work, i);
    for (auto& t : pool) t.join();
  } else {
    for (std::size_t i = 0; i < n; ++i) work(i);
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return traces;
}

const RetainedSample& map_estimate(const std::vector<ChainTrace>& traces) {
  const RetainedSample* best = nullptr;
  for (const auto& t : traces)
    for (const auto& r : t.retained)
      if (best == nullptr || r.logpost > best->logpost) best = &r;
  if (best == nullptr) throw std::invalid_argument("map_estimate: no retained states");
  return *best;
}

}  // namespace bajd

#include "bajd/experiments.hpp"

#include "bajd/baseline.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace bajd {

Matrix jacobi_columns(const MatrixSet& c, Eigen::Index m) {
  if (m < 1 || m > c.dim()) throw std::invalid_argument("jacobi_columns: m out of range");
  const Matrix v = jacobi_jd(c);
  if (m == c.dim()) return v;
  Vector energy = Vector::Zero(v.cols());
  for (const auto& ck : c.matrices()) {
    const Matrix s = 0.5 * (ck + ck.transpose());
    energy += (v.transpose() * s * v).diagonal().array().square().matrix();
  }
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(v.cols()));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  std::stable_sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) { return energy[a] > energy[b]; });
  idx.resize(static_cast<std::size_t>(m));
  std::sort(idx.begin(), idx.end());
  Matrix out(v.rows(), m);
  for (Eigen::Index j = 0; j < m; ++j) out.col(j) = v.col(idx[static_cast<std::size_t>(j)]);
  return out;
}

Comparison compare_methods(const MatrixSet& c, const Matrix& b_true, const SamplerConfig& config) {
  if (b_true.rows() != c.dim()) throw std::invalid_argument("compare: truth has the wrong number of rows");
  Comparison out;
  out.jacobi_api = amari_index(comparison_matrix(jacobi_columns(c, b_true.cols()), b_true));
  out.gibbs = api_summary(run_chains(c, b_true.cols(), config), b_true);
  return out;
}

BssProblem make_bss_problem(const BssSetup& setup, std::uint64_t seed) {
  const SignalMatrix s = gen_sine_sources(setup.n_sources, setup.n_samples);
  Rng mix_rng(stream_seed(seed, Stream::kMixing));
  Rng noise_rng(stream_seed(seed, Stream::kNoise));
  BssProblem p;
  p.a = conditioned_gaussian(setup.n_sources, setup.max_cond, mix_rng);
  p.x = mix_and_noise(s, p.a, setup.noise_sigma, noise_rng);
  Whitening wh = whiten(p.x);
  p.w = wh.w;
  p.target = wh.w * p.a;
  p.c = lagged_covariances(wh.x_tilde, setup.n_lags);
  return p;
}

BssResult run_bss_demo(const BssProblem& problem, const SamplerConfig& config) {
  BssResult out;
  const Matrix v = jacobi_jd(problem.c);
  out.jacobi_api = amari_index(comparison_matrix(v, problem.target));
  out.gibbs = api_summary(run_chains(problem.c, problem.c.dim(), config), problem.target);
  return out;
}

CspaProblem make_cspa_problem(Eigen::Index n_per_class, std::uint64_t seed) {
  Rng rng(stream_seed(seed, Stream::kCspaSources));
  CspaProblem p;
  p.data = gen_cspa_dataset(n_per_class, rng);
  const Whitening wh = whiten(concat(p.data.y1, p.data.y2));
  p.w = wh.w;
  p.mean = wh.mean;
  const Matrix t1 = wh.x_tilde.data.leftCols(n_per_class);
  const Matrix t2 = wh.x_tilde.data.rightCols(p.data.y2.samples());
  p.c = MatrixSet({sample_covariance(t1), sample_covariance(t2)});
  return p;
}

CspaResult run_cspa_demo(const CspaProblem& problem, const SamplerConfig& config) {
  const auto traces = run_chains(problem.c, problem.c.dim(), config);
  const ChainState& map = map_estimate(traces).state;
  const Vector u1 = map.u.u(0);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(u1.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return u1[a] < u1[b]; });
  Matrix b(map.b.rows(), map.b.cols());
  for (Eigen::Index j = 0; j < b.cols(); ++j) b.col(j) = map.b.col(order[static_cast<std::size_t>(j)]);

  CspaResult out;
  out.b = b;
  const StiefelPoint sb(b);
  out.filtered1 = csp_filter(sb, problem.w, problem.mean, problem.data.y1);
  out.filtered2 = csp_filter(sb, problem.w, problem.mean, problem.data.y2);
  out.var1 = sample_covariance(out.filtered1.data).diagonal();
  out.var2 = sample_covariance(out.filtered2.data).diagonal();
  out.pooled_cov = sample_covariance(concat(out.filtered1, out.filtered2).data);
  return out;
}

Matrix bench_target(Eigen::Index m, std::uint64_t seed) {
  Rng rng(stream_seed(seed, Stream::kBinghamTarget));
  const Matrix g = gaussian_matrix(m, m, rng);
  return 0.5 * (g + g.transpose());
}

std::vector<BenchRow> bingham_bench(Eigen::Index m, int n_samples, int burn_in,
                                    const std::vector<ThetaScheme>& schemes, std::uint64_t seed) {
  const Matrix sigma = bench_target(m, seed);
  const BinghamParams params = eigendecompose(sigma);
  std::vector<BenchRow> rows;
  for (std::size_t i = 0; i < schemes.size(); ++i) {
    Rng rng(chain_seed(stream_seed(seed, Stream::kSampler), i));
    const auto samples = sample_vector_bingham(sigma, n_samples, burn_in, schemes[i], rng);
    BenchRow row;
    row.scheme = std::string(schemes[i].name());
    row.ess = summarize(coordinate_ess(samples));
    row.lambda_min = params.eigvals.minCoeff();
    row.lambda_max = params.eigvals.maxCoeff();
    row.min_log_density = std::numeric_limits<double>::infinity();
    row.max_log_density = -std::numeric_limits<double>::infinity();
    for (const auto& x : samples) {
      const double q = x.dot(sigma * x);
      row.min_log_density = std::min(row.min_log_density, q);
      row.max_log_density = std::max(row.max_log_density, q);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace bajd

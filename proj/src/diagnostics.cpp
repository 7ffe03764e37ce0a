#include "bajd/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace bajd {

double ess(std::span<const double> series) {
  const std::size_t n = series.size();
  if (n < 100) throw std::invalid_argument("ess: need at least 100 values");
  const double nd = static_cast<double>(n);
  const double mean = std::accumulate(series.begin(), series.end(), 0.0) / nd;
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = series[i] - mean;
  auto autocov = [&](std::size_t lag) {
    double s = 0.0;
    for (std::size_t i = 0; i + lag < n; ++i) s += d[i] * d[i + lag];
    return s / nd;
  };
  const double gamma0 = autocov(0);
  if (!(gamma0 > 1e-300) || gamma0 <= 1e-28 * (1.0 + mean * mean)) return nd;

  double sum = 0.0;
  double rho_next = autocov(1) / gamma0;
  for (std::size_t t = 1; t + 1 < n; ++t) {
    const double rho = rho_next;
    rho_next = autocov(t + 1) / gamma0;
    if (rho + rho_next <= 0.0) break;
    sum += rho;
  }
  return std::clamp(nd / (1.0 + 2.0 * sum), 1.0, nd);
}

double gelman_rubin(const std::vector<std::vector<double>>& chains) {
  if (chains.size() < 2) throw std::invalid_argument("gelman_rubin: need at least 2 chains");
  const std::size_t n = chains.front().size();
  if (n < 100) throw std::invalid_argument("gelman_rubin: chains need at least 100 values");
  for (const auto& c : chains)
    if (c.size() != n) throw std::invalid_argument("gelman_rubin: chains differ in length");
  const double nd = static_cast<double>(n);
  const double md = static_cast<double>(chains.size());

  std::vector<double> means;
  double w = 0.0;
  for (const auto& c : chains) {
    const double mu = std::accumulate(c.begin(), c.end(), 0.0) / nd;
    double ss = 0.0;
    for (double v : c) ss += (v - mu) * (v - mu);
    w += ss / (nd - 1.0);
    means.push_back(mu);
  }
  w /= md;
  const double grand = std::accumulate(means.begin(), means.end(), 0.0) / md;
  double between = 0.0;
  for (double mu : means) between += (mu - grand) * (mu - grand);
  between *= nd / (md - 1.0);

  if (!(w > 0.0)) {
    const bool equal = std::all_of(means.begin(), means.end(), [&](double mu) { return mu == means.front(); });
    return equal ? 1.0 : std::numeric_limits<double>::infinity();
  }
  const double v_hat = (nd - 1.0) / nd * w + between / nd;
  return std::sqrt(v_hat / w);
}

Matrix comparison_matrix(const Matrix& b_hat, const Matrix& b_true) {
  if (b_hat.rows() != b_true.rows()) throw std::invalid_argument("comparison_matrix: row mismatch");
  return b_hat.completeOrthogonalDecomposition().pseudoInverse() * b_true;
}

double amari_index(const Matrix& p) {
  const Matrix a = p.cwiseAbs();
  const Vector row_max = a.rowwise().maxCoeff();
  const Eigen::RowVectorXd col_max = a.colwise().maxCoeff();
  if ((row_max.array() <= 0.0).any() || (col_max.array() <= 0.0).any())
    throw std::invalid_argument("amari_index: all-zero row or column");
  double total = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) total += a.row(i).sum() / row_max[i] - 1.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j) total += a.col(j).sum() / col_max[j] - 1.0;
  return total;
}

BicTerms bic_terms(const MatrixSet& c, const ChainState& theta_map) {
  const double n = static_cast<double>(c.dim());
  const double k = static_cast<double>(c.size());
  const double m = static_cast<double>(theta_map.b.cols());
  BicTerms t{};
  t.log_likelihood = log_likelihood(c, theta_map.b, theta_map.u, theta_map.noise.sigma2);
  t.params = k * m + k + (n * m - m * (m + 1.0) / 2.0);
  t.observations = k * n * n;
  t.score = t.log_likelihood - 0.5 * t.params * std::log(t.observations);
  return t;
}

double bic_log_marginal(const MatrixSet& c, const ChainState& theta_map, Eigen::Index m) {
  if (theta_map.b.cols() != m) throw std::invalid_argument("bic_log_marginal: state does not have m columns");
  return bic_terms(c, theta_map).score;
}

ModelSelection model_select(const MatrixSet& c, const std::vector<Eigen::Index>& m_range,
                            const SamplerConfig& config) {
  if (m_range.empty()) throw std::invalid_argument("model_select: empty range");
  ModelSelection out;
  double best = -std::numeric_limits<double>::infinity();
  for (const Eigen::Index m : m_range) {
    if (m < 1 || m > c.dim()) throw std::invalid_argument("model_select: m out of range");
    const auto traces = run_chains(c, m, config);
    const double score = bic_log_marginal(c, map_estimate(traces).state, m);
    out.ms.push_back(m);
    out.scores.push_back(score);
    if (score > best) {
      best = score;
      out.best_m = m;
    }
  }
  return out;
}

ApiSummary api_summary(const std::vector<ChainTrace>& traces, const Matrix& b_true) {
  std::vector<double> apis;
  for (const auto& t : traces)
    for (const auto& r : t.retained) apis.push_back(amari_index(comparison_matrix(r.state.b.matrix(), b_true)));
  if (apis.empty()) throw std::invalid_argument("api_summary: no retained states");
  ApiSummary s;
  s.min = *std::min_element(apis.begin(), apis.end());
  s.max = *std::max_element(apis.begin(), apis.end());
  s.mean = std::accumulate(apis.begin(), apis.end(), 0.0) / static_cast<double>(apis.size());
  double ss = 0.0;
  for (double a : apis) ss += (a - s.mean) * (a - s.mean);
  s.std = apis.size() > 1 ? std::sqrt(ss / static_cast<double>(apis.size() - 1)) : 0.0;
  s.map = amari_index(comparison_matrix(map_estimate(traces).state.b.matrix(), b_true));
  return s;
}

EssSummary summarize(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("summarize: empty");
  std::sort(values.begin(), values.end());
  EssSummary s;
  s.min = values.front();
  s.max = values.back();
  const std::size_t n = values.size();
  s.median = n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(n);
  return s;
}

std::vector<double> coordinate_ess(const std::vector<Vector>& samples) {
  if (samples.empty()) throw std::invalid_argument("coordinate_ess: no samples");
  const Eigen::Index m = samples.front().size();
  std::vector<double> out;
  std::vector<double> series(samples.size());
  for (Eigen::Index i = 0; i < m; ++i) {
    for (std::size_t t = 0; t < samples.size(); ++t) series[t] = samples[t][i];
    out.push_back(ess(series));
  }
  return out;
}

std::vector<double> retained_loglik(const ChainTrace& trace) {
  std::vector<double> out;
  out.reserve(trace.retained.size());
  for (const auto& r : trace.retained) out.push_back(r.loglik);
  return out;
}

std::vector<std::optional<double>> loglik_ess(const std::vector<ChainTrace>& traces) {
  std::vector<std::optional<double>> out;
  for (const auto& t : traces) {
    const auto series = retained_loglik(t);
    out.push_back(series.size() >= 100 ? std::optional<double>(ess(series)) : std::nullopt);
  }
  return out;
}

std::optional<double> loglik_r_hat(const std::vector<ChainTrace>& traces) {
  if (traces.size() < 2) return std::nullopt;
  std::vector<std::vector<double>> halves;
  for (const auto& t : traces) {
    const std::size_t n = t.loglik.size();
    halves.emplace_back(t.loglik.begin() + static_cast<std::ptrdiff_t>(n - n / 2), t.loglik.end());
    if (halves.back().size() < 100 || halves.back().size() != halves.front().size()) return std::nullopt;
  }
  return gelman_rubin(halves);
}

}  // namespace bajd

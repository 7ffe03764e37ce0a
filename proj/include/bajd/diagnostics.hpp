#pragma once

// Convergence and recovery diagnostics.

#include "bajd/gibbs.hpp"
#include "bajd/model.hpp"

#include <optional>
#include <span>
#include <vector>

namespace bajd {

/// Effective sample size n / (1 + 2 sum_t rho_t), the sum stopping before the
/// first lag t with rho_t + rho_{t+1} <= 0. Clamped to [1, n]; a constant
/// series returns n. Requires n >= 100.
double ess(std::span<const double> series);

/// sqrt(V / W) with W the mean within-chain variance and
/// V = (n-1)/n W + B/n, B = n * variance of the chain means.
/// Requires >= 2 chains of equal length >= 100. Returns +inf when W = 0 and the
/// chain means differ, 1 when W = 0 and they agree.
double gelman_rubin(const std::vector<std::vector<double>>& chains);

/// P = pinv(B_hat) B_true.
Matrix comparison_matrix(const Matrix& b_hat, const Matrix& b_true);

/// Amari performance index; zero exactly for generalized permutation matrices.
/// Rejects an all-zero row or column.
double amari_index(const Matrix& p);

struct BicTerms {
  double log_likelihood;
  double params;       // d
  double observations; // n_obs
  double score;        // log_likelihood - d/2 log n_obs
};

/// d = K M + K + (N M - M (M + 1) / 2), n_obs = K N^2.
BicTerms bic_terms(const MatrixSet& c, const ChainState& theta_map);
double bic_log_marginal(const MatrixSet& c, const ChainState& theta_map, Eigen::Index m);

struct ModelSelection {
  Eigen::Index best_m = 0;
  std::vector<Eigen::Index> ms;
  std::vector<double> scores;
};

/// Runs the sampler for each m and scores its MAP state by BIC.
ModelSelection model_select(const MatrixSet& c, const std::vector<Eigen::Index>& m_range,
                            const SamplerConfig& config);

struct ApiSummary {
  double min = 0.0;
  double mean = 0.0;
  double std = 0.0;
  double max = 0.0;
  double map = 0.0;
};

/// API of every retained state (all chains) against b_true, plus the MAP state's.
ApiSummary api_summary(const std::vector<ChainTrace>& traces, const Matrix& b_true);

/// Per-coordinate ESS of a sample list, summarized as in the benchmark tables.
struct EssSummary {
  double min = 0.0;
  double median = 0.0;
  double mean = 0.0;
  double max = 0.0;
};
EssSummary summarize(std::vector<double> values);
std::vector<double> coordinate_ess(const std::vector<Vector>& samples);

/// Log-likelihood at the retained iterations of one chain.
std::vector<double> retained_loglik(const ChainTrace& trace);

/// ESS of retained_loglik per chain; nullopt for chains with fewer than 100
/// retained states.
std::vector<std::optional<double>> loglik_ess(const std::vector<ChainTrace>& traces);

/// R on the second half of each chain's full log-likelihood trace; nullopt
/// with fewer than 2 chains or half-traces shorter than 100.
std::optional<double> loglik_r_hat(const std::vector<ChainTrace>& traces);

}  // namespace bajd

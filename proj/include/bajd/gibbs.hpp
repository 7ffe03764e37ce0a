#pragma once

// Gibbs sampler for approximate joint diagonalization.
//
// Each iteration draws, for every k in turn, u_k | rest (Gaussian), then
// sigma2_k | rest and v2_k | rest (inverse gamma), and finally one sweep of
// B | rest from the matrix Langevin-Bingham conditional.

#include "bajd/bingham.hpp"
#include "bajd/model.hpp"
#include "bajd/random.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace bajd {

struct ChainState {
  StiefelPoint b;
  EigenvalueSet u;
  NoiseState noise;

  void validate(Eigen::Index n, Eigen::Index k) const;
};

enum class InitMethod {
  /// top-M eigenvectors of mean_k (C_k + C_k^T)/2
  kMeanEigen,
  /// span of the top-M eigenvectors of mean_k S_k^2 (S_k = symmetrized C_k),
  /// rotated inside that span by Jacobi joint diagonalization
  kJointEigen,
  /// Haar-random StiefelPoint
  kRandom,
};

InitMethod parse_init_method(const std::string& name);
std::string init_method_name(InitMethod m);

struct SamplerConfig {
  int n_samples = 5000;
  int burn_in = 2500;
  int thin = 1;
  ThetaScheme scheme;
  /// Empty means a_k = b_k = 1e-3 for every k.
  HyperParams hyper;
  std::uint64_t seed = 0;
  int n_chains = 1;
  InitMethod init = InitMethod::kJointEigen;
  /// Run chains on separate threads.
  bool parallel = true;

  void validate() const;
  [[nodiscard]] HyperParams hyper_for(Eigen::Index k) const;
};

struct RetainedSample {
  int iter = 0;
  double loglik = 0.0;
  double logpost = 0.0;
  ChainState state;
};

struct ChainTrace {
  int chain = 0;
  std::vector<RetainedSample> retained;
  std::vector<double> loglik;   // one entry per iteration
  std::vector<double> logpost;  // one entry per iteration
  std::vector<Vector> sigma2;   // one entry per iteration
  int reorthonormalizations = 0;
  double max_orthonormality_error = 0.0;
};

/// Raised when the log-likelihood stops being finite; carries a JSON dump
/// of the offending state.
class NumericalAbort : public std::runtime_error {
 public:
  NumericalAbort(const std::string& what, std::string state_dump)
      : std::runtime_error(what), dump_(std::move(state_dump)) {}
  [[nodiscard]] const std::string& state_dump() const { return dump_; }

 private:
  std::string dump_;
};

ChainState init_state(const MatrixSet& c, Eigen::Index m, const HyperParams& hyper, Rng& rng,
                      InitMethod method = InitMethod::kJointEigen);

/// u_k | x_k, A, sigma2_k, v2_k ~ N(mu, sigma2_k Sigma_u),
/// Sigma_u = (v2_k^{-1} I + A^T A)^{-1}, mu = Sigma_u A^T x_k.
Vector sample_u_k(const Vector& x_k, const Matrix& a, double sigma2_k, double v2_k, Rng& rng);

struct GammaPosterior {
  double shape;
  double rate;  // precision ~ Gamma(shape, scale = 1/rate)
};

GammaPosterior sigma2_posterior(const Vector& x_k, const Matrix& a, const Vector& u_k, double v2_k,
                                double a_k, double b_k);
GammaPosterior v2_posterior(const Vector& u_k, double sigma2_k, double a_k, double b_k);

double sample_sigma2_k(const Vector& x_k, const Matrix& a, const Vector& u_k, double v2_k, double a_k,
                       double b_k, Rng& rng);
double sample_v2_k(const Vector& u_k, double sigma2_k, double a_k, double b_k, Rng& rng);

/// Log joint density (up to a constant) of data, u, sigma2 and v2; the
/// uniform Stiefel prior on B contributes only a constant.
double log_posterior(const MatrixSet& c, const ChainState& s, const HyperParams& hyper);

ChainTrace run_chain(const MatrixSet& c, Eigen::Index m, const SamplerConfig& config, Rng& rng);

/// n_chains independent chains, chain i seeded with chain_seed(config.seed, i).
std::vector<ChainTrace> run_chains(const MatrixSet& c, Eigen::Index m, const SamplerConfig& config);

/// Retained state with the highest log posterior; ties go to the lower
/// (chain, iteration).
const RetainedSample& map_estimate(const std::vector<ChainTrace>& traces);

}  // namespace bajd

#pragma once

// End-to-end pipelines shared by the command-line tool and the test suites.

#include "bajd/diagnostics.hpp"
#include "bajd/gibbs.hpp"
#include "bajd/synth.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace bajd {

/// The m columns of the Jacobi solution V with the largest diagonal energy
/// sum_k (V^T S_k V)_ii^2, in their original order. m = N keeps V as is.
Matrix jacobi_columns(const MatrixSet& c, Eigen::Index m);

struct Comparison {
  double jacobi_api = 0.0;
  ApiSummary gibbs;
};

/// Jacobi and Gibbs (MAP and retained-sample statistics) against b_true.
Comparison compare_methods(const MatrixSet& c, const Matrix& b_true, const SamplerConfig& config);

struct BssSetup {
  Eigen::Index n_sources = 10;
  Eigen::Index n_samples = 1000;
  Eigen::Index n_lags = 100;
  double noise_sigma = 0.1;
  /// Mixing matrices are redrawn until cond(A) < max_cond.
  double max_cond = 10.0;
};

struct BssProblem {
  MatrixSet c;
  Matrix a;        // mixing matrix
  Matrix w;        // whitening matrix
  Matrix target;   // W A, the matrix an exact separator B satisfies B^{-1} W A = generalized permutation
  SignalMatrix x;  // mixtures
};

/// Sine sources, conditioned Gaussian mixing (stream kMixing), additive noise (stream
/// kNoise), whitening and lagged covariances.
BssProblem make_bss_problem(const BssSetup& setup, std::uint64_t seed);

struct BssResult {
  double jacobi_api = 0.0;
  ApiSummary gibbs;
};

BssResult run_bss_demo(const BssProblem& problem, const SamplerConfig& config);

struct CspaProblem {
  CspaData data;
  Matrix w;
  Vector mean;
  MatrixSet c;  // whitened class covariances
};

/// Two classes of n_per_class samples (stream kCspaSources), whitened on the
/// pooled data.
CspaProblem make_cspa_problem(Eigen::Index n_per_class, std::uint64_t seed);

struct CspaResult {
  Matrix b;             // columns ordered by ascending class-1 MAP eigenvalue
  SignalMatrix filtered1;
  SignalMatrix filtered2;
  Vector var1;          // per-coordinate variance of filtered class 1
  Vector var2;
  Matrix pooled_cov;    // covariance of the pooled filtered data
};

CspaResult run_cspa_demo(const CspaProblem& problem, const SamplerConfig& config);

struct BenchRow {
  std::string scheme;
  EssSummary ess;
  double min_log_density = 0.0;  // min over samples of x^T S x
  double max_log_density = 0.0;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
};

/// Symmetric target S = (G + G^T) / 2 with G standard Gaussian (stream kBinghamTarget).
Matrix bench_target(Eigen::Index m, std::uint64_t seed);

/// Per-coordinate ESS of n_samples vector Bingham draws for each scheme;
/// scheme i draws from chain_seed(stream_seed(seed, kSampler), i).
std::vector<BenchRow> bingham_bench(Eigen::Index m, int n_samples, int burn_in,
                                    const std::vector<ThetaScheme>& schemes, std::uint64_t seed);

}  // namespace bajd

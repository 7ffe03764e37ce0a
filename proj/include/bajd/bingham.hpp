#pragma once

// Vector Bingham sampling, p(x | S) proportional to exp(x^T S x) on the unit
// sphere in R^M.
//
// The sampler works in the eigenbasis S = U diag(lambda) U^T, where the
// target on y = U^T x is exp(sum_i lambda_i y_i^2). One Gibbs sweep visits
// each coordinate i, writes y_i^2 = theta and y_j^2 = (1 - theta) u_j for
// j != i with the u_j held fixed, draws theta from
//
//   theta^{-1/2} (1 - theta)^{(M-3)/2} exp(lambda_i theta + (1 - theta) sum_j lambda_j u_j)
//
// and a fresh uniform sign for y_i. theta can be drawn by exact rejection,
// by slice sampling, or from a midpoint grid.

#include "bajd/model.hpp"
#include "bajd/random.hpp"

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace bajd {

enum class ThetaSchemeKind { kRejection, kSlice, kGrid };

struct ThetaScheme {
  ThetaSchemeKind kind = ThetaSchemeKind::kRejection;
  int grid_size = 1000;
  double slice_width = 0.25;
  /// Visit coordinates in a fresh random order each sweep instead of 0..M-1.
  bool random_scan = false;

  void validate() const;
  [[nodiscard]] std::string_view name() const;
  /// "rejection", "slice" or "grid"; throws std::invalid_argument otherwise.
  static ThetaScheme parse(std::string_view name);
};

/// The rejection sampler gave up after too many consecutive rejections.
class RejectionLimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr long kMaxConsecutiveRejections = 1'000'000;

struct BinghamParams {
  Matrix sigma;
  Matrix eigvecs;  // columns ordered like eigvals
  Vector eigvals;  // descending
};

/// Symmetric eigendecomposition with descending eigenvalues and each
/// eigenvector's largest-magnitude entry made positive. Rejects
/// non-symmetric input.
BinghamParams eigendecompose(const Matrix& sigma);

/// Log of the unnormalized theta conditional; rest_term = sum_{j != i} lambda_j u_j.
double theta_log_density(double theta, double lambda_i, double rest_term, int m);

/// theta together with 1 - theta, each carried at full relative precision.
struct ThetaDraw {
  double theta = 0.5;
  double complement = 0.5;
};

/// Draws theta from the conditional above. `current` is the chain's present
/// value; only the slice scheme uses it.
ThetaDraw draw_theta(double lambda_i, double rest_term, int m, const ThetaScheme& scheme, Rng& rng,
                     ThetaDraw current = {});

double sample_theta(double lambda_i, double rest_term, int m, const ThetaScheme& scheme, Rng& rng,
                    double current_theta = 0.5);

/// One sweep over all coordinates of y (in the eigenbasis, eigenvalues `lambda`).
Vector gibbs_sweep(const Vector& y, const Vector& lambda, const ThetaScheme& scheme, Rng& rng);

/// One sweep started from x in the original frame; returns the new x = U y.
Vector bingham_update(const BinghamParams& params, const Vector& x, const ThetaScheme& scheme,
                      Rng& rng);

/// Runs `burn_in` + `n_samples` sweeps from a uniform random start and returns
/// the last `n_samples` states mapped back through U.
std::vector<Vector> sample_vector_bingham(const Matrix& sigma, int n_samples, int burn_in,
                                          const ThetaScheme& scheme, Rng& rng);

}  // namespace bajd

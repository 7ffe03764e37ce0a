#include "bajd/bingham.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace bajd {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_sum_exp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

double log_beta_fn(double a, double b) { return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b); }

bool random_sign_positive(Rng& rng) { return (rng() >> 63) != 0; }

// The theta conditional is a Kummer-beta law. Writing x = theta when the
// exponent slope c = lambda_i - rest_term is <= 0 and x = 1 - theta otherwise
// gives the form
//
//   x^{alpha-1} (1 - x)^{beta-1} exp(-kappa x),  kappa >= 0,
//
// so the mass always piles up near x = 0, where doubles are dense.
struct KummerBeta {
  double alpha;
  double beta;
  double kappa;
  bool flipped;  // x = 1 - theta

  static KummerBeta from_theta(double lambda_i, double rest_term, int m) {
    const double c = lambda_i - rest_term;
    const double half = 0.5;
    const double b = 0.5 * (m - 1);
    if (c <= 0.0) return {half, b, -c, false};
    return {b, half, c, true};
  }

  [[nodiscard]] double log_density(double x, double comp) const {
    if (!(x > 0.0) || !(comp > 0.0)) return kNegInf;
    return (alpha - 1.0) * std::log(x) + (beta - 1.0) * std::log(comp) - kappa * x;
  }

  [[nodiscard]] ThetaDraw to_theta(double x, double comp) const {
    return flipped ? ThetaDraw{comp, x} : ThetaDraw{x, comp};
  }

  [[nodiscard]] std::pair<double, double> from_draw(ThetaDraw d) const {
    return flipped ? std::pair{d.complement, d.theta} : std::pair{d.theta, d.complement};
  }
};

// Exact rejection sampling. Three envelopes dominate the target; the one with
// the smallest total mass (highest acceptance rate) is used:
//   beta:   x^{a-1}(1-x)^{b-1}, accept with exp(-kappa x)
//   gamma:  x^{a-1} exp(-(kappa+b-1) x) on (0, inf), needs b >= 1, using
//           (1-x)^{b-1} <= exp(-(b-1) x)
//   split:  2^{1-b} x^{a-1} exp(-kappa x) on (0, inf) plus
//           C_R (1-x)^{b-1} on (1/2, 1), needs b < 1 and kappa > 0
class KummerRejection {
 public:
  explicit KummerRejection(const KummerBeta& t) : t_(t) {
    mass_beta_ = log_beta_fn(t.alpha, t.beta);
    envelope_ = Envelope::kBeta;
    double best = mass_beta_;
    if (t.beta >= 1.0 && t.kappa + t.beta - 1.0 > 0.0) {
      rate_ = t.kappa + t.beta - 1.0;
      const double mass = std::lgamma(t.alpha) - t.alpha * std::log(rate_);
      if (mass < best) {
        best = mass;
        envelope_ = Envelope::kGamma;
      }
    }
    if (t.beta < 1.0 && t.kappa > 0.0) {
      log_cl_ = (1.0 - t.beta) * std::log(2.0);
      const double mass_left = log_cl_ + std::lgamma(t.alpha) - t.alpha * std::log(t.kappa);
      const double x_peak = std::clamp((t.alpha - 1.0) / t.kappa, 0.5, 1.0);
      log_cr_ = (t.alpha - 1.0) * std::log(x_peak) - t.kappa * x_peak;
      const double mass_right = log_cr_ - t.beta * std::log(2.0) - std::log(t.beta);
      const double mass = log_sum_exp(mass_left, mass_right);
      if (mass < best) {
        best = mass;
        envelope_ = Envelope::kSplit;
        p_left_ = std::exp(mass_left - mass);
      }
    }
  }

  ThetaDraw draw(Rng& rng) const {
    for (long attempt = 0; attempt < kMaxConsecutiveRejections; ++attempt) {
      double x = 0.0;
      double comp = 0.0;
      double log_accept = 0.0;
      switch (envelope_) {
        case Envelope::kBeta: {
          const double ga = gamma_draw(t_.alpha, 1.0, rng);
          const double gb = gamma_draw(t_.beta, 1.0, rng);
          const double s = ga + gb;
          x = ga / s;
          comp = gb / s;
          log_accept = -t_.kappa * x;
          break;
        }
        case Envelope::kGamma: {
          x = gamma_draw(t_.alpha, 1.0 / rate_, rng);
          if (!(x < 1.0)) continue;
          comp = 1.0 - x;
          log_accept = (t_.beta - 1.0) * (std::log1p(-x) + x);
          break;
        }
        case Envelope::kSplit: {
          if (uniform01(rng) < p_left_) {
            x = gamma_draw(t_.alpha, 1.0 / t_.kappa, rng);
            if (!(x < 1.0)) continue;
            comp = 1.0 - x;
          } else {
            comp = 0.5 * std::pow(uniform01(rng), 1.0 / t_.beta);
            x = 1.0 - comp;
          }
          double log_env = log_cl_ + (t_.alpha - 1.0) * std::log(x) - t_.kappa * x;
          if (x > 0.5) log_env = log_sum_exp(log_env, log_cr_ + (t_.beta - 1.0) * std::log(comp));
          log_accept = t_.log_density(x, comp) - log_env;
          break;
        }
      }
      const double u = uniform01(rng);
      if (x > 0.0 && comp > 0.0 && std::log(u) < log_accept) return t_.to_theta(x, comp);
    }
    throw RejectionLimitError("theta rejection sampler: " + std::to_string(kMaxConsecutiveRejections) +
                              " consecutive rejections (alpha=" + std::to_string(t_.alpha) +
                              ", beta=" + std::to_string(t_.beta) + ", kappa=" + std::to_string(t_.kappa) + ")");
  }

 private:
  enum class Envelope { kBeta, kGamma, kSplit };

  KummerBeta t_;
  Envelope envelope_;
  double mass_beta_ = 0.0;
  double rate_ = 0.0;
  double log_cl_ = 0.0;
  double log_cr_ = 0.0;
  double p_left_ = 1.0;
};

ThetaDraw draw_grid(const KummerBeta& t, int grid_size, Rng& rng) {
  std::vector<double> logp(static_cast<std::size_t>(grid_size));
  const double g = grid_size;
  for (int j = 0; j < grid_size; ++j) {
    const double x = (j + 0.5) / g;
    const double comp = (grid_size - j - 0.5) / g;
    logp[static_cast<std::size_t>(j)] = t.log_density(x, comp);
  }
  const double hi = *std::max_element(logp.begin(), logp.end());
  double total = 0.0;
  for (double& v : logp) {
    v = std::exp(v - hi);
    total += v;
  }
  const double target = uniform01(rng) * total;
  double acc = 0.0;
  int pick = grid_size - 1;
  for (int j = 0; j < grid_size; ++j) {
    acc += logp[static_cast<std::size_t>(j)];
    if (target < acc) {
      pick = j;
      break;
    }
  }
  return t.to_theta((pick + 0.5) / g, (grid_size - pick - 0.5) / g);
}

// Stepping-out and shrinkage slice update on (0, 1).
ThetaDraw draw_slice(const KummerBeta& t, double width, ThetaDraw current, Rng& rng) {
  auto [x0, c0] = t.from_draw(current);
  double f0 = t.log_density(x0, c0);
  if (!std::isfinite(f0)) {
    // current point sits on the boundary; restart from an exact draw
    return KummerRejection(t).draw(rng);
  }
  auto f = [&](double x) { return t.log_density(x, 1.0 - x); };
  const double log_level = f0 - std::exponential_distribution<double>(1.0)(rng);

  double left = x0 - width * uniform01(rng);
  double right = left + width;
  while (left > 0.0 && f(left) > log_level) left -= width;
  while (right < 1.0 && f(right) > log_level) right += width;
  left = std::max(left, 0.0);
  right = std::min(right, 1.0);

  for (int iter = 0; iter < 500; ++iter) {
    const double x1 = left + uniform01(rng) * (right - left);
    if (x1 > 0.0 && x1 < 1.0 && f(x1) > log_level) return t.to_theta(x1, 1.0 - x1);
    if (x1 < x0) {
      left = x1;
    } else {
      right = x1;
    }
  }
  return current;
}

}  // namespace

void ThetaScheme::validate() const {
  if (kind == ThetaSchemeKind::kGrid && grid_size < 10)
    throw std::invalid_argument("grid scheme needs grid_size >= 10");
  if (kind == ThetaSchemeKind::kSlice && !(slice_width > 0.0))
    throw std::invalid_argument("slice scheme needs a positive width");
}

std::string_view ThetaScheme::name() const {
  switch (kind) {
    case ThetaSchemeKind::kRejection:
      return "rejection";
    case ThetaSchemeKind::kSlice:
      return "slice";
    case ThetaSchemeKind::kGrid:
      return "grid";
  }
  return "unknown";
}

ThetaScheme ThetaScheme::parse(std::string_view name) {
  ThetaScheme s;
  if (name == "rejection") {
    s.kind = ThetaSchemeKind::kRejection;
  } else if (name == "slice") {
    s.kind = ThetaSchemeKind::kSlice;
  } else if (name == "grid") {
    s.kind = ThetaSchemeKind::kGrid;
  } else {
    throw std::invalid_argument("unknown theta scheme '" + std::string(name) + "'");
  }
  return s;
}

BinghamParams eigendecompose(const Matrix& sigma) {
  if (sigma.rows() != sigma.cols() || sigma.rows() < 1)
    throw std::invalid_argument("eigendecompose: matrix must be square");
  const double scale = std::max(1.0, sigma.cwiseAbs().maxCoeff());
  if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw std::invalid_argument("eigendecompose: matrix is not symmetric");
  const Matrix sym = 0.5 * (sigma + sigma.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigendecompose: solver failed");
  const Eigen::Index m = sym.rows();
  BinghamParams p{sigma, Matrix(m, m), Vector(m)};
  for (Eigen::Index j = 0; j < m; ++j) {
    const Eigen::Index src = m - 1 - j;
    p.eigvals[j] = es.eigenvalues()[src];
    Vector v = es.eigenvectors().col(src);
    Eigen::Index imax = 0;
    v.cwiseAbs().maxCoeff(&imax);
    if (v[imax] < 0.0) v = -v;
    p.eigvecs.col(j) = v;
  }
  return p;
}

double theta_log_density(double theta, double lambda_i, double rest_term, int m) {
  if (!(theta > 0.0 && theta < 1.0)) throw std::invalid_argument("theta_log_density: theta must lie in (0, 1)");
  if (m < 2) throw std::invalid_argument("theta_log_density: m must be >= 2");
  return -0.5 * std::log(theta) + 0.5 * (m - 3) * std::log1p(-theta) + lambda_i * theta +
         (1.0 - theta) * rest_term;
}

ThetaDraw draw_theta(double lambda_i, double rest_term, int m, const ThetaScheme& scheme, Rng& rng,
                     ThetaDraw current) {
  if (m < 2) throw std::invalid_argument("draw_theta: m must be >= 2");
  const KummerBeta target = KummerBeta::from_theta(lambda_i, rest_term, m);
  switch (scheme.kind) {
    case ThetaSchemeKind::kRejection:
      return KummerRejection(target).draw(rng);
    case ThetaSchemeKind::kSlice:
      return draw_slice(target, scheme.slice_width, current, rng);
    case ThetaSchemeKind::kGrid:
      return draw_grid(target, scheme.grid_size, rng);
  }
  throw std::logic_error("draw_theta: unhandled scheme");
}

double sample_theta(double lambda_i, double rest_term, int m, const ThetaScheme& scheme, Rng& rng,
                    double current_theta) {
  return draw_theta(lambda_i, rest_term, m, scheme, rng, {current_theta, 1.0 - current_theta}).theta;
}

Vector gibbs_sweep(const Vector& y_in, const Vector& lambda, const ThetaScheme& scheme, Rng& rng) {
  const Eigen::Index m = y_in.size();
  if (lambda.size() != m) throw std::invalid_argument("gibbs_sweep: lambda has wrong length");
  Vector y = y_in;
  if (m == 1) {
    y[0] = random_sign_positive(rng) ? 1.0 : -1.0;
    return y;
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  if (scheme.random_scan) std::shuffle(order.begin(), order.end(), rng);

  for (const Eigen::Index i : order) {
    double rest2 = 0.0;
    double weighted = 0.0;
    for (Eigen::Index j = 0; j < m; ++j) {
      if (j == i) continue;
      const double yj2 = y[j] * y[j];
      rest2 += yj2;
      weighted += lambda[j] * yj2;
    }
    if (rest2 < 1e-14) continue;
    const double rest_term = weighted / rest2;
    const ThetaDraw d = draw_theta(lambda[i], rest_term, static_cast<int>(m), scheme, rng,
                                   {y[i] * y[i], rest2});
    const bool positive = random_sign_positive(rng);
    const double scale = std::sqrt(d.complement / rest2);
    for (Eigen::Index j = 0; j < m; ++j)
      if (j != i) y[j] *= scale;
    y[i] = (positive ? 1.0 : -1.0) * std::sqrt(d.theta);
  }
  return y / y.norm();
}

Vector bingham_update(const BinghamParams& params, const Vector& x, const ThetaScheme& scheme, Rng& rng) {
  const Vector y = params.eigvecs.transpose() * x;
  const Vector y_new = gibbs_sweep(y / y.norm(), params.eigvals, scheme, rng);
  Vector out = params.eigvecs * y_new;
  return out / out.norm();
}

std::vector<Vector> sample_vector_bingham(const Matrix& sigma, int n_samples, int burn_in,
                                          const ThetaScheme& scheme, Rng& rng) {
  scheme.validate();
  if (n_samples < 0 || burn_in < 0) throw std::invalid_argument("sample_vector_bingham: negative counts");
  const BinghamParams p = eigendecompose(sigma);
  const Eigen::Index m = sigma.rows();
  Vector y(m);
  for (Eigen::Index i = 0; i < m; ++i) y[i] = std_normal(rng);
  y /= y.norm();
  for (int t = 0; t < burn_in; ++t) y = gibbs_sweep(y, p.eigvals, scheme, rng);
  std::vector<Vector> out;
  out.reserve(static_cast<std::size_t>(n_samples));
  for (int t = 0; t < n_samples; ++t) {
    y = gibbs_sweep(y, p.eigvals, scheme, rng);
    out.push_back(p.eigvecs * y);
  }
  return out;
}

}  // namespace bajd

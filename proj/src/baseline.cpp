#include "bajd/baseline.hpp"

#include <algorithm>
#include <cmath>

namespace bajd {

namespace {

std::vector<Matrix> symmetrized(const MatrixSet& c) {
  std::vector<Matrix> out;
  out.reserve(c.size());
  for (const auto& m : c.matrices()) out.push_back(0.5 * (m + m.transpose()));
  return out;
}

double off_diag(const std::vector<Matrix>& mats) {
  double total = 0.0;
  for (const auto& m : mats) total += m.squaredNorm() - m.diagonal().squaredNorm();
  return total;
}

}  // namespace

double off_diagonal_objective(const MatrixSet& c, const Matrix& v) {
  double total = 0.0;
  for (const auto& m : symmetrized(c)) {
    const Matrix d = v.transpose() * m * v;
    total += d.squaredNorm() - d.diagonal().squaredNorm();
  }
  return total;
}

JacobiResult jacobi_jd_detailed(const MatrixSet& c, double tol, int max_sweeps) {
  const Eigen::Index n = c.dim();
  std::vector<Matrix> mats = symmetrized(c);
  JacobiResult res;
  res.v = Matrix::Identity(n, n);
  res.off_diagonal.push_back(off_diag(mats));

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double max_sine = 0.0;
    for (Eigen::Index p = 0; p + 1 < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        // 2x2 Gram matrix of h_k = (C_pp - C_qq, 2 C_pq); its top eigenvector
        // gives (cos 2t, sin 2t) of the optimal angle
        double g11 = 0.0, g12 = 0.0, g22 = 0.0;
        for (const auto& m : mats) {
          const double h1 = m(p, p) - m(q, q);
          const double h2 = m(p, q) + m(q, p);
          g11 += h1 * h1;
          g12 += h1 * h2;
          g22 += h2 * h2;
        }
        const double ton = g11 - g22;
        const double toff = 2.0 * g12;
        const double theta = 0.5 * std::atan2(toff, ton + std::hypot(ton, toff));
        const double cs = std::cos(theta);
        const double sn = std::sin(theta);
        // sub-tolerance rotations are still applied; tol only decides termination
        if (sn == 0.0) continue;
        max_sine = std::max(max_sine, std::abs(sn));
        // V <- V G with G = [[c, -s], [s, c]] on (p, q); C <- G^T C G
        for (auto& m : mats) {
          const Eigen::VectorXd cp = m.col(p);
          const Eigen::VectorXd cq = m.col(q);
          m.col(p) = cs * cp + sn * cq;
          m.col(q) = -sn * cp + cs * cq;
          const Eigen::RowVectorXd rp = m.row(p);
          const Eigen::RowVectorXd rq = m.row(q);
          m.row(p) = cs * rp + sn * rq;
          m.row(q) = -sn * rp + cs * rq;
        }
        const Eigen::VectorXd vp = res.v.col(p);
        const Eigen::VectorXd vq = res.v.col(q);
        res.v.col(p) = cs * vp + sn * vq;
        res.v.col(q) = -sn * vp + cs * vq;
      }
    }
    res.sweeps = sweep + 1;
    res.off_diagonal.push_back(off_diag(mats));
    if (max_sine < tol) {
      res.converged = true;
      break;
    }
  }
  return res;
}

Matrix jacobi_jd(const MatrixSet& c, double tol, int max_sweeps) { return jacobi_jd_detailed(c, tol, max_sweeps).v; }

}  // namespace bajd

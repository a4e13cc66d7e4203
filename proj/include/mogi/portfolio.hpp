#pragma once

// L1-constrained minimum-variance portfolios and the annualized
// out-of-sample risk of a daily weight path.

#include <vector>

#include "mogi/linalg.hpp"

namespace mogi {

struct PortfolioWeights {
  Vec w;
  double c0 = 0.0;
  double objective = 0.0;
  double kkt_residual = 0.0;
  int iterations = 0;
};

struct PortfolioOptions {
  int max_iter = 5000;
  double kkt_tol = 1e-7;
  double ridge = 1e-10;
  Vec w0;  // optional warm start, used when its size matches
};

namespace detail {

// Euclidean projection onto { x : sum x = 1, ||x||_1 <= c0 }. The solution
// has the form x_i = S_lam(v_i - nu) with soft threshold S; the inner
// bisection finds nu matching the budget for a given lam, the outer
// bisection drives ||x||_1 down to c0.
inline Vec project_budget_l1(const Vec& v, double c0) {
  const int p = static_cast<int>(v.size());
  auto soft = [](double x, double lam) {
    if (x > lam) return x - lam;
    if (x < -lam) return x + lam;
    return 0.0;
  };
  auto solve_nu = [&](double lam) {
    // sum_i S_lam(v_i - nu) = 1 is continuous and nonincreasing in nu
    double lo = v.minCoeff() - lam - 1.0, hi = v.maxCoeff() + lam + 1.0;
    for (int it = 0; it < 64; ++it) {
      const double nu = 0.5 * (lo + hi);
      double s = 0.0;
      for (int i = 0; i < p; ++i) s += soft(v[i] - nu, lam);
      (s > 1.0 ? lo : hi) = nu;
    }
    return 0.5 * (lo + hi);
  };
  auto build = [&](double lam) {
    const double nu = solve_nu(lam);
    Vec x(p);
    for (int i = 0; i < p; ++i) x[i] = soft(v[i] - nu, lam);
    return x;
  };

  Vec x0 = build(0.0);  // plain hyperplane projection
  if (x0.cwiseAbs().sum() <= c0 + 1e-12) return x0;
  // ||x(lam)||_1 is nonincreasing in lam and reaches 1 (a single vertex
  // carries the whole budget) for lam large enough
  double lo = 0.0, hi = 1.0;
  while (build(hi).cwiseAbs().sum() > c0) hi *= 2.0;
  for (int it = 0; it < 64; ++it) {
    const double lam = 0.5 * (lo + hi);
    (build(lam).cwiseAbs().sum() > c0 ? lo : hi) = lam;
  }
  return build(hi);
}

}  // namespace detail

// min w' G w subject to sum w = 1 and ||w||_1 <= c0, by accelerated projected
// gradient with fixed step 1/L (L = 2 ||S|| bounds the Hessian) and gradient
// restarts. The reported KKT residual is the norm of the projected gradient
// step at the solution.
inline PortfolioWeights min_variance_l1(const Mat& gamma, double c0,
                                        const PortfolioOptions& opt = {}) {
  const int p = static_cast<int>(gamma.rows());
  if (p < 1 || gamma.cols() != p) throw std::invalid_argument("min_variance_l1: square input required");
  if (c0 < 1.0) throw std::domain_error("min_variance_l1: c0 >= 1 required for feasibility");
  Mat S = symmetrize(gamma);
  Eigen::SelfAdjointEigenSolver<Mat> es(S);
  const double min_ev = es.eigenvalues().minCoeff();
  const double max_ev = es.eigenvalues().maxCoeff();
  if (min_ev < -1e-8 * std::max(1.0, max_ev))
    throw std::domain_error("min_variance_l1: input must be positive semidefinite");
  if (min_ev < 0.0) S = psd_project(S);
  S += opt.ridge * std::max(1.0, max_ev) * Mat::Identity(p, p);

  const double L = 2.0 * spectral_norm(S) + opt.ridge;
  const double step = 1.0 / L;
  Vec w = detail::project_budget_l1(
      opt.w0.size() == p ? opt.w0 : Vec::Constant(p, 1.0 / p), c0);
  Vec y = w;
  double t = 1.0;
  int it = 0;
  for (; it < opt.max_iter; ++it) {
    Vec cand = detail::project_budget_l1(y - step * 2.0 * (S * y), c0);
    const double move = (cand - w).norm();
    const double res = (cand - detail::project_budget_l1(
                                    cand - step * 2.0 * (S * cand), c0)).norm() * L;
    if ((y - cand).dot(cand - w) > 0.0) {  // momentum points uphill, restart
      y = cand;
      t = 1.0;
    } else {
      const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
      y = cand + ((t - 1.0) / tn) * (cand - w);
      t = tn;
    }
    w = cand;
    if (res <= opt.kkt_tol || move < 1e-14) break;
  }

  PortfolioWeights out;
  out.w = w;
  out.c0 = c0;
  out.objective = w.dot(S * w);
  out.iterations = it;
  out.kkt_residual =
      (w - detail::project_budget_l1(w - (1.0 / L) * 2.0 * S * w, c0)).norm() * L;
  return out;
}

// Annualized out-of-sample risk sqrt( (252/d) sum_k [ sum_i r_{k,i}^2 +
// (r_k^CO)^2 ] ) from within-day portfolio returns on the interval grid and
// the close-to-open return. grids[k] holds the day-k price path on the
// intraday grid (one column per node); close_to_open[k] = Y(k) - Y(k-1+tau).
inline double oos_risk(const std::vector<Vec>& weights, const std::vector<Mat>& grids,
                       const std::vector<Vec>& close_to_open) {
  const std::size_t d = weights.size();
  if (d == 0) throw std::domain_error("oos_risk: empty weight path");
  if (grids.size() != d || close_to_open.size() != d)
    throw std::domain_error("oos_risk: series length mismatch");
  double acc = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    const Mat& y = grids[k];
    if (y.cols() < 2) throw std::domain_error("oos_risk: missing intraday grid");
    if (y.rows() != weights[k].size() || close_to_open[k].size() != weights[k].size())
      throw std::domain_error("oos_risk: dimension mismatch");
    for (int i = 1; i < y.cols(); ++i) {
      const double r = weights[k].dot(y.col(i) - y.col(i - 1));
      acc += r * r;
    }
    const double rco = weights[k].dot(close_to_open[k]);
    acc += rco * rco;
  }
  return std::sqrt(252.0 / static_cast<double>(d) * acc);
}

}  // namespace mogi

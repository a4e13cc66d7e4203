#pragma once

// Quasi-Newton minimizer with forward-difference gradients and Armijo
// backtracking; the only optimizer used by the estimation code.

#include <functional>
#include <limits>

#include "mogi/linalg.hpp"

namespace mogi {

struct OptimOptions {
  int max_iter = 200;
  double grad_tol = 1e-7;
  double fd_eps = 1e-6;
  double armijo_c = 1e-4;
  int max_backtracks = 40;
  bool central = false;  // central differences: twice the cost, O(h^2) accuracy
};

struct OptimResult {
  Vec x;
  double f = std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool converged = false;
};

inline Vec fd_gradient(const std::function<double(const Vec&)>& f, const Vec& x, double fx,
                       double eps, bool central = false) {
  Vec g(x.size());
  Vec xp = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = eps * (1.0 + std::abs(x[i]));
    xp[i] = x[i] + h;
    const double fp = f(xp);
    if (central) {
      xp[i] = x[i] - h;
      g[i] = (fp - f(xp)) / (2.0 * h);
    } else {
      g[i] = (fp - fx) / h;
    }
    xp[i] = x[i];
  }
  return g;
}

inline OptimResult bfgs_minimize(const std::function<double(const Vec&)>& f, const Vec& x0,
                                 const OptimOptions& opt = {}) {
  const Eigen::Index d = x0.size();
  OptimResult res;
  res.x = x0;
  res.f = f(x0);
  if (!std::isfinite(res.f)) return res;

  Mat Hinv = Mat::Identity(d, d);  // inverse Hessian approximation
  Vec g = fd_gradient(f, res.x, res.f, opt.fd_eps, opt.central);

  for (int it = 0; it < opt.max_iter; ++it) {
    res.iterations = it + 1;
    if (g.cwiseAbs().maxCoeff() < opt.grad_tol) {
      res.converged = true;
      return res;
    }
    Vec dir = -(Hinv * g);
    double slope = g.dot(dir);
    if (!(slope < 0.0)) {  // reset on non-descent direction
      Hinv = Mat::Identity(d, d);
      dir = -g;
      slope = -g.squaredNorm();
      if (!(slope < 0.0)) {
        res.converged = true;  // zero gradient
        return res;
      }
    }

    double t = 1.0;
    double f_new = std::numeric_limits<double>::infinity();
    Vec x_new;
    bool accepted = false;
    for (int bt = 0; bt < opt.max_backtracks; ++bt) {
      x_new = res.x + t * dir;
      f_new = f(x_new);
      if (std::isfinite(f_new) && f_new <= res.f + opt.armijo_c * t * slope) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) return res;  // stuck: report best iterate, not converged

    Vec g_new = fd_gradient(f, x_new, f_new, opt.fd_eps, opt.central);
    Vec s = x_new - res.x;
    Vec y = g_new - g;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      const double rho = 1.0 / sy;
      Mat I = Mat::Identity(d, d);
      Hinv = (I - rho * s * y.transpose()) * Hinv * (I - rho * y * s.transpose()) +
             rho * s * s.transpose();
    }
    res.x = x_new;
    res.f = f_new;
    g = g_new;
  }
  return res;
}

}  // namespace mogi

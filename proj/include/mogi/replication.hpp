#pragma once

// Built-in study configurations used by the replication harness and tests.

#include "mogi/params.hpp"

namespace mogi {
namespace replication {

inline Vec vec6(double a, double b, double c, double d, double e, double f) {
  Vec v(6);
  v << a, b, c, d, e, f;
  return v;
}

// Low-dimensional three-asset study.
inline StructuralParams study_small() {
  StructuralParams s;
  s.p = 3;
  s.tau = 6.5 / 24.0;
  s.omega_H1 = unvech(vec6(0.04, 0, 0, 0.04, 0, 0.08), 3);
  s.omega_H2 = unvech(vec6(0.004, 0, 0, 0.004, 0, 0.004), 3);
  s.omega_L1 = unvech(vec6(0.004, 0, 0, 0.016, 0, 0.012), 3);
  s.omega_L2 = unvech(vec6(0.0012, 0, 0, 0.004, 0, 0.004), 3);
  s.gamma_H = unvech_lower(vec6(0.4, 0.1, 0, 0.5, 0, 0.3), 3);
  s.gamma_L = unvech_lower(vec6(0.7, 0, 0, 0.6, 0, 0.8), 3);
  s.beta_H = unvech_lower(vec6(0.8, -0.1, 0.1, 0.7, -0.1, 0.6), 3);
  s.beta_L = unvech_lower(vec6(0.2, 0, 0, 0.3, -0.1, 0.2), 3);
  s.nu = unvech(vec6(0, 0.08, 0.08, 0, 0.08, 0), 3);
  s.mu = Vec::Zero(3);
  s.rho = 0.3 * Mat::Identity(3, 3);
  s.x0 = Vec::Constant(3, 10.0);
  s.sigma0 = Mat();  // filled with the whole-day intercept by callers
  return s;
}

// Three-dimensional factor process of the high-dimensional study. The last
// entry of omega_L2 is 0.0012; the alternative reading 0.012 makes the spot
// volatility structurally negative and contradicts the published intercepts.
inline StructuralParams study_factor() {
  StructuralParams s;
  s.p = 3;
  s.tau = 6.5 / 24.0;
  s.omega_H1 = unvech(vec6(0.06, 0, 0, 0.08, 0, 0.04), 3);
  s.omega_H2 = unvech(vec6(0.004, 0, 0, 0.004, 0, 0.004), 3);
  s.omega_L1 = unvech(vec6(0.024, 0, 0, 0.012, 0, 0.004), 3);
  s.omega_L2 = unvech(vec6(0.006, 0, 0, 0.004, 0, 0.0012), 3);
  s.gamma_H = unvech_lower(vec6(0.5, 0, 0, 0.3, 0, 0.4), 3);
  s.gamma_L = unvech_lower(vec6(0.6, 0, 0, 0.8, 0, 0.7), 3);
  s.beta_H = unvech_lower(vec6(0.7, 0, 0, 0.6, 0, 0.8), 3);
  s.beta_L = unvech_lower(vec6(0.3, 0, 0, 0.25, 0, 0.2), 3);
  s.nu = Eigen::Vector3d(0.06, 0.04, 0.03).asDiagonal();
  s.mu = Vec::Zero(3);
  s.rho = 0.3 * Mat::Identity(3, 3);
  s.x0 = Vec::Zero(3);
  s.sigma0 = Mat();
  return s;
}

}  // namespace replication
}  // namespace mogi

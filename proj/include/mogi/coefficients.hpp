#pragma once

// Recursion coefficients of the integrated volatility structure and the
// conditional volatility recursions built on them. Everything here works in
// vec space (p^2 vectors); callers unvec at the boundary.

#include <vector>

#include "mogi/linalg.hpp"
#include "mogi/params.hpp"

namespace mogi {

enum class Regime { H, L, Day };

struct GarchCoefficients {
  Regime regime = Regime::Day;
  Mat omega_g;  // p x p symmetric intercept
  Mat Rg, Ag, Bg;  // p^2 x p^2
  Mat varrho;      // regime auxiliary matrix
  bool stable = true;  // ||Rg||_2 < 1
};

struct CoefficientSet {
  GarchCoefficients H, L, day;
};

struct GarchState {
  int k = 0;
  Vec h_H, h_L, h;  // vec-space conditional volatilities, per-day units
};

namespace detail {

// Solves X * varrho = LHS (right division) instead of forming an explicit
// inverse of varrho.
inline Mat solve_right(const Mat& lhs, const Mat& varrho) {
  Eigen::JacobiSVD<Mat> svd(varrho.transpose(), Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vec& sv = svd.singularValues();
  if (sv(sv.size() - 1) <= 0.0 || sv(0) / sv(sv.size() - 1) > 1e12)
    throw std::runtime_error("derive_coefficients: varrho is numerically singular");
  return svd.solve(lhs.transpose()).transpose();
}

struct RegimeKron {
  Mat R_H, R_L, B_H, B_L;
  VarrhoSeries sH, sL;
  Mat vr_H, vr_L;
};

inline RegimeKron regime_kron(const Mat& gamma_H, const Mat& gamma_L, const Mat& beta_H,
                              const Mat& beta_L) {
  RegimeKron k;
  k.R_H = kron(gamma_H, gamma_H);
  k.R_L = kron(gamma_L, gamma_L);
  k.B_H = kron(beta_H, beta_H);
  k.B_L = kron(beta_L, beta_L);
  k.sH = varrho_series(k.B_H);
  k.sL = varrho_series(k.B_L);
  k.vr_H = 2.0 * k.sH.rho3 * k.R_H + k.sH.rho1 - k.sH.rho2;
  k.vr_L = 2.0 * k.sL.rho3 * k.R_L + k.sL.rho1 - k.sL.rho2;
  return k;
}

}  // namespace detail

// Whole-day intercept from the per-regime recursion coefficients:
// vec(w^g) = (I - R^g)[{(1-tau)A_L^g + tau I}(I - R_H^g)^{-1} vec(w_H^g)
//            + (1-tau)(I - R_L^g)^{-1} vec(w_L^g)].
inline Mat whole_day_intercept(const Mat& omega_H_g, const Mat& omega_L_g, const Mat& R_H_g,
                               const Mat& R_L_g, const Mat& A_L_g, const Mat& R_g, double tau) {
  const int p = static_cast<int>(omega_H_g.rows());
  const Mat I = Mat::Identity(p * p, p * p);
  Eigen::PartialPivLU<Mat> luH(I - R_H_g), luL(I - R_L_g);
  if (std::abs(luH.determinant()) < 1e-300 || std::abs(luL.determinant()) < 1e-300)
    throw std::runtime_error("whole_day_intercept: singular resolvent");
  Vec w = (I - R_g) * (((1.0 - tau) * A_L_g + tau * I) * luH.solve(vec(omega_H_g)) +
                       (1.0 - tau) * luL.solve(vec(omega_L_g)));
  return symmetrize(unvec(w, p));
}

// Coefficients from the estimable parameter vector; the two intercepts are
// free and the whole-day intercept closes the system.
inline CoefficientSet derive_coefficients(const GarchParams& params, double tau) {
  const int p = params.p;
  auto k = detail::regime_kron(params.gamma_H, params.gamma_L, params.beta_H, params.beta_L);

  CoefficientSet out;
  out.H.regime = Regime::H;
  out.H.varrho = k.vr_H;
  out.H.Rg = detail::solve_right(k.vr_H * k.R_L * k.R_H, k.vr_H);
  out.H.Ag = k.vr_H * k.R_L * k.B_H;
  out.H.Bg = k.vr_H * k.B_L;
  out.H.omega_g = symmetrize(params.omega_H_g);

  out.L.regime = Regime::L;
  out.L.varrho = k.vr_L;
  out.L.Rg = detail::solve_right(k.vr_L * k.R_H * k.R_L, k.vr_L);
  out.L.Ag = k.vr_L * k.B_H;
  out.L.Bg = k.vr_L * k.R_H * k.B_L;
  out.L.omega_g = symmetrize(params.omega_L_g);

  out.day.regime = Regime::Day;
  out.day.varrho = tau * k.vr_H + (1.0 - tau) * (k.vr_L * k.R_H + k.vr_L * k.B_H * k.vr_H);
  out.day.Rg = detail::solve_right(out.day.varrho * k.R_L * k.R_H, out.day.varrho);
  out.day.Ag = out.day.varrho * k.R_L * k.B_H;
  out.day.Bg = out.day.varrho * k.B_L;
  out.day.omega_g =
      whole_day_intercept(out.H.omega_g, out.L.omega_g, out.H.Rg, out.L.Rg, out.L.Ag, out.day.Rg, tau);

  for (GarchCoefficients* c : {&out.H, &out.L, &out.day}) c->stable = spectral_norm(c->Rg) < 1.0;
  return out;
}

// Coefficients from the full generative parameter set; the intercepts are
// derived from the structural matrices, including the nu contribution.
inline CoefficientSet derive_coefficients(const StructuralParams& params, double tau) {
  params.validate();
  const int p = params.p;
  auto k = detail::regime_kron(params.gamma_H, params.gamma_L, params.beta_H, params.beta_L);
  const Mat I = Mat::Identity(p * p, p * p);

  const Mat om_H = params.gamma_H * params.omega_H1 * params.gamma_H.transpose() - params.omega_H2;
  const Mat om_L = params.gamma_L * params.omega_L1 * params.gamma_L.transpose() - params.omega_L2;
  const Mat nu2 = params.nu * params.nu.transpose();
  const Vec c_H = 2.0 * k.sH.rho3 * k.R_H * vec(params.omega_H1) - k.sH.rho2 * vec(params.omega_H2) +
                  (k.sH.rho2 - 2.0 * k.sH.rho3) * vec(nu2);
  const Vec c_L = 2.0 * k.sL.rho3 * k.R_L * vec(params.omega_L1) - k.sL.rho2 * vec(params.omega_L2);

  CoefficientSet out;
  out.H.regime = Regime::H;
  out.H.varrho = k.vr_H;
  out.H.Rg = detail::solve_right(k.vr_H * k.R_L * k.R_H, k.vr_H);
  out.H.Ag = k.vr_H * k.R_L * k.B_H;
  out.H.Bg = k.vr_H * k.B_L;
  out.H.omega_g =
      symmetrize(unvec((I - out.H.Rg) * c_H + k.vr_H * vec(om_L) + k.vr_H * k.R_L * vec(om_H), p));

  out.L.regime = Regime::L;
  out.L.varrho = k.vr_L;
  out.L.Rg = detail::solve_right(k.vr_L * k.R_H * k.R_L, k.vr_L);
  out.L.Ag = k.vr_L * k.B_H;
  out.L.Bg = k.vr_L * k.R_H * k.B_L;
  out.L.omega_g =
      symmetrize(unvec((I - out.L.Rg) * c_L + k.vr_L * vec(om_H) + k.vr_L * k.R_H * vec(om_L), p));

  out.day.regime = Regime::Day;
  out.day.varrho = tau * k.vr_H + (1.0 - tau) * (k.vr_L * k.R_H + k.vr_L * k.B_H * k.vr_H);
  out.day.Rg = detail::solve_right(out.day.varrho * k.R_L * k.R_H, out.day.varrho);
  out.day.Ag = out.day.varrho * k.R_L * k.B_H;
  out.day.Bg = out.day.varrho * k.B_L;
  out.day.omega_g = symmetrize(unvec(
      (I - out.day.Rg) * (((1.0 - tau) * k.vr_L * k.B_H + tau * I) * c_H + (1.0 - tau) * c_L +
                          (1.0 - tau) * k.vr_L * vec(om_H)) +
          out.day.varrho * vec(om_L) + out.day.varrho * k.R_L * vec(om_H),
      p));

  for (GarchCoefficients* c : {&out.H, &out.L, &out.day}) c->stable = spectral_norm(c->Rg) < 1.0;
  return out;
}

// Exact conditional mean of the next whole-day integrated volatility given
// the spot volatility at the day boundary:
// E[int vec(Sigma) | F] = {(1-tau) vr_L B_H + tau I} c_H + (1-tau) c_L
//                         + (1-tau) vr_L vec(w_H) + varrho vec(Sigma).
inline Mat conditional_day_mean(const StructuralParams& params, const Mat& sigma_spot,
                                double tau) {
  const int p = params.p;
  auto k = detail::regime_kron(params.gamma_H, params.gamma_L, params.beta_H, params.beta_L);
  const Mat I = Mat::Identity(p * p, p * p);
  const Mat om_H = params.gamma_H * params.omega_H1 * params.gamma_H.transpose() - params.omega_H2;
  const Mat nu2 = params.nu * params.nu.transpose();
  const Vec c_H = tau * (2.0 * k.sH.rho3 * k.R_H * vec(params.omega_H1) -
                         k.sH.rho2 * vec(params.omega_H2) +
                         (k.sH.rho2 - 2.0 * k.sH.rho3) * vec(nu2));
  const Vec c_L = (1.0 - tau) * (2.0 * k.sL.rho3 * k.R_L * vec(params.omega_L1) -
                                 k.sL.rho2 * vec(params.omega_L2));
  const Mat varrho =
      tau * k.vr_H + (1.0 - tau) * (k.vr_L * k.R_H + k.vr_L * k.B_H * k.vr_H);
  Vec h = ((1.0 - tau) / tau * k.vr_L * k.B_H + I) * c_H + c_L +
          (1.0 - tau) * k.vr_L * vec(om_H) + varrho * vec(sigma_spot);
  return symmetrize(unvec(h, p));
}

// Ground-truth estimable parameter vector implied by a generative set.
inline GarchParams garch_truth(const StructuralParams& s, double tau) {
  CoefficientSet c = derive_coefficients(s, tau);
  GarchParams g;
  g.p = s.p;
  g.omega_H_g = c.H.omega_g;
  g.omega_L_g = c.L.omega_g;
  g.gamma_H = s.gamma_H;
  g.gamma_L = s.gamma_L;
  g.beta_H = s.beta_H;
  g.beta_L = s.beta_L;
  g.mu = s.mu;
  return g;
}

namespace detail {

inline Vec step_generic(const Vec& h_prev, const GarchCoefficients& coef, const Mat& rv,
                        const Mat& overnight_outer, double tau) {
  const int p = static_cast<int>(coef.omega_g.rows());
  if (h_prev.size() != p * p || rv.rows() != p || overnight_outer.rows() != p)
    throw std::invalid_argument("step_h: dimension mismatch");
  return vec(coef.omega_g) + coef.Rg * h_prev + (coef.Ag / tau) * vec(rv) +
         (coef.Bg / (1.0 - tau)) * vec(overnight_outer);
}

}  // namespace detail

// H-regime step: rv_prev is the previous day's open-to-close realized
// measure, overnight_outer_prev the previous night's return outer product.
inline Vec step_h_H(const Vec& h_prev, const GarchCoefficients& coef_H, const Mat& rv_prev,
                    const Mat& overnight_outer_prev, double tau) {
  return detail::step_generic(h_prev, coef_H, rv_prev, overnight_outer_prev, tau);
}

// L-regime step: the realized-measure innovation is the SAME day's
// open-to-close measure; the overnight outer product is lagged one night.
inline Vec step_h_L(const Vec& h_prev, const GarchCoefficients& coef_L, const Mat& rv_same_day,
                    const Mat& overnight_outer_prev, double tau) {
  return detail::step_generic(h_prev, coef_L, rv_same_day, overnight_outer_prev, tau);
}

// Whole-day step: both innovations lagged one day.
inline Vec step_h_day(const Vec& h_prev, const GarchCoefficients& coef_day,
                      const Mat& rv_prev_open_close, const Mat& overnight_outer_prev, double tau) {
  return detail::step_generic(h_prev, coef_day, rv_prev_open_close, overnight_outer_prev, tau);
}

struct ForecastOptions {
  bool psd_projection = true;
  // Alternative forecast form using the open-period state in place of the
  // whole-day state; off by default (the whole-day lag is the proven form).
  bool open_state_lag = false;
};

// Runs the whole-day recursion over the sample and returns the next-day
// integrated volatility forecast. rv[k] is day k+1's open-to-close realized
// measure and overnight[k] the raw close-to-open return of night k+1; the
// drift adjustment r_k(mu) = overnight - (1-tau)mu is applied here.
inline Mat forecast_next(const GarchParams& theta, const std::vector<Mat>& rv,
                         const std::vector<Vec>& overnight, double tau,
                         const ForecastOptions& opt = {}) {
  if (rv.empty() || rv.size() != overnight.size())
    throw std::domain_error("forecast_next: empty or mismatched history");
  const int p = theta.p;
  const CoefficientSet coef = derive_coefficients(theta, tau);
  const std::size_t n = rv.size();

  std::vector<Mat> oo(n);
  for (std::size_t k = 0; k < n; ++k) {
    Vec r = overnight[k] - (1.0 - tau) * theta.mu;
    oo[k] = r * r.transpose();
  }

  Vec h = vec(rv[0]) / tau;
  Vec h_H = h;
  for (std::size_t k = 1; k < n; ++k) {
    h = step_h_day(h, coef.day, rv[k - 1], oo[k - 1], tau);
    if (opt.open_state_lag) h_H = step_h_H(h_H, coef.H, rv[k - 1], oo[k - 1], tau);
  }
  Vec h_next = vec(coef.day.omega_g) + coef.day.Rg * (opt.open_state_lag ? h_H : h) +
               (coef.day.Ag / tau) * vec(rv[n - 1]) + (coef.day.Bg / (1.0 - tau)) * vec(oo[n - 1]);
  Mat out = symmetrize(unvec(h_next, p));
  return opt.psd_projection ? psd_project(out) : out;
}

}  // namespace mogi

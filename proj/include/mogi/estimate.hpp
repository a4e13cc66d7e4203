#pragma once

// Two-stage weighted least squares for the overnight GARCH recursions:
// per-regime identity-weight fits, weight matrix construction, the full
// WLSE, the plug-in sandwich covariance, and the no-overnight baseline.

#include <optional>
#include <vector>

#include "mogi/coefficients.hpp"
#include "mogi/optimize.hpp"
#include "mogi/realized.hpp"
#include "mogi/simulate.hpp"

namespace mogi {

inline constexpr int kBurnInDays = 10;
inline constexpr double kLossSentinel = 1e12;

inline RealizedSeries realized_from_panels(const std::vector<DayPanel>& panels,
                                           const PrvmOptions& opt = {}, bool truncated = false) {
  RealizedSeries s;
  if (panels.empty()) throw std::invalid_argument("realized_from_panels: no panels");
  s.p = static_cast<int>(panels.front().y.rows());
  s.m = static_cast<int>(panels.front().y.cols()) - 1;
  s.window = opt.window > 0 ? opt.window : static_cast<int>(std::floor(std::sqrt(s.m)));
  s.truncated = truncated;
  s.weight = opt.weight;
  for (const DayPanel& d : panels) {
    s.rv.push_back(truncated ? jump_truncated_prvm(d.y, opt) : prvm(d.y, opt));
    s.r_raw.push_back(d.r_overnight);
  }
  return s;
}

// Oracle variant for tests: uses the true integrated volatilities.
inline RealizedSeries realized_from_oracle(const std::vector<DayPanel>& panels) {
  RealizedSeries s;
  if (panels.empty()) throw std::invalid_argument("realized_from_oracle: no panels");
  s.p = static_cast<int>(panels.front().y.rows());
  s.m = static_cast<int>(panels.front().y.cols()) - 1;
  for (const DayPanel& d : panels) {
    s.rv.push_back(d.iv);
    s.r_raw.push_back(d.r_overnight);
  }
  return s;
}

struct HhatSeries {
  std::vector<Vec> h_H, h_L, h_day;  // vec space, one entry per day
};

// Recursions driven by the observed realized measures. Day 0 initializes at
// vec(RV_0)/tau; the L recursion uses the same-day realized measure.
inline HhatSeries hhat_series(const CoefficientSet& coef, const RealizedSeries& data,
                              const Vec& mu, double tau) {
  const int n = data.n_days();
  if (n < 1) throw std::domain_error("hhat_series: empty data");
  HhatSeries out;
  out.h_H.resize(n);
  out.h_L.resize(n);
  out.h_day.resize(n);
  std::vector<Mat> oo(n);
  for (int k = 0; k < n; ++k) {
    Vec r = data.r_mu(k, mu, tau);
    oo[k] = r * r.transpose();
  }
  Vec h0 = vec(data.rv[0]) / tau;
  out.h_H[0] = h0;
  out.h_L[0] = h0;
  out.h_day[0] = h0;
  for (int k = 1; k < n; ++k) {
    out.h_H[k] = step_h_H(out.h_H[k - 1], coef.H, data.rv[k - 1], oo[k - 1], tau);
    out.h_L[k] = step_h_L(out.h_L[k - 1], coef.L, data.rv[k], oo[k - 1], tau);
    out.h_day[k] = step_h_day(out.h_day[k - 1], coef.day, data.rv[k - 1], oo[k - 1], tau);
  }
  return out;
}

struct WeightMatrices {
  Mat V_H, V_L;  // vech-space, dimension p(p+1)/2
  double upsilon_H = 0.0, upsilon_L = 0.0;
};

namespace detail {

struct RegimeResiduals {
  std::vector<Vec> e_H, e_L;  // vech-space residuals per day
};

inline RegimeResiduals residuals(const GarchParams& theta, const RealizedSeries& data, double tau) {
  const CoefficientSet coef = derive_coefficients(theta, tau);
  const HhatSeries h = hhat_series(coef, data, theta.mu, tau);
  const int n = data.n_days();
  const int p = theta.p;
  RegimeResiduals out;
  out.e_H.resize(n);
  out.e_L.resize(n);
  for (int k = 0; k < n; ++k) {
    Vec r = data.r_mu(k, theta.mu, tau);
    out.e_H[k] = vech(data.rv[k]) - tau * vech(unvec(h.h_H[k], p));
    out.e_L[k] = vech(Mat(r * r.transpose())) - (1.0 - tau) * vech(unvec(h.h_L[k], p));
  }
  return out;
}

}  // namespace detail

// Weighted loss (1/2n) sum_k [ e_H' V_H^{-1} e_H + e_L' V_L^{-1} e_L ] with
// the first kBurnInDays days excluded. Unstable parameter points return a
// large sentinel instead of throwing, so optimizers can recover.
inline double loss_wlse(const GarchParams& theta, const RealizedSeries& data,
                        const WeightMatrices& V, double tau, int burn_in = kBurnInDays) {
  const int n = data.n_days();
  if (n <= burn_in) throw std::domain_error("loss_wlse: need more days than the burn-in");
  try {
    auto res = detail::residuals(theta, data, tau);
    Eigen::LLT<Mat> lltH(V.V_H), lltL(V.V_L);
    if (lltH.info() != Eigen::Success || lltL.info() != Eigen::Success)
      throw std::invalid_argument("loss_wlse: weight matrices must be positive definite");
    double acc = 0.0;
    for (int k = burn_in; k < n; ++k) {
      acc += res.e_H[k].dot(lltH.solve(res.e_H[k]));
      acc += res.e_L[k].dot(lltL.solve(res.e_L[k]));
    }
    const double loss = acc / (2.0 * n);
    return std::isfinite(loss) ? loss : kLossSentinel;
  } catch (const std::runtime_error&) {
    return kLossSentinel;
  } catch (const std::domain_error&) {
    return kLossSentinel;
  }
}

// Identity-weight loss restricted to one regime (stage 1).
inline double loss_regime(const GarchParams& theta, const RealizedSeries& data, Regime regime,
                          double tau, int burn_in = kBurnInDays) {
  const int n = data.n_days();
  if (n <= burn_in) throw std::domain_error("loss_regime: need more days than the burn-in");
  try {
    auto res = detail::residuals(theta, data, tau);
    double acc = 0.0;
    for (int k = burn_in; k < n; ++k) {
      const Vec& e = (regime == Regime::H) ? res.e_H[k] : res.e_L[k];
      acc += e.squaredNorm();
    }
    const double loss = acc / (2.0 * n);
    return std::isfinite(loss) ? loss : kLossSentinel;
  } catch (const std::runtime_error&) {
    return kLossSentinel;
  } catch (const std::domain_error&) {
    return kLossSentinel;
  }
}

// Transformed parameterization for unconstrained optimization: intercepts
// through lower-triangular Cholesky factors with log diagonals, gamma/beta
// as raw lower-triangular entries (soft spectral-norm penalty), mu raw.
struct ThetaMap {
  int p = 0;
  bool fit_omega_H = true, fit_omega_L = true, fit_dynamics = true, fit_mu = true;

  int dim() const {
    const int h = vech_len(p);
    return (fit_omega_H ? h : 0) + (fit_omega_L ? h : 0) + (fit_dynamics ? 4 * h : 0) +
           (fit_mu ? p : 0);
  }

  Vec pack(const GarchParams& g) const {
    Vec x(dim());
    int at = 0;
    auto put_chol = [&](const Mat& W) {
      Eigen::LLT<Mat> llt(symmetrize(W));
      Mat L = llt.info() == Eigen::Success
                  ? Mat(llt.matrixL())
                  : Mat(Eigen::LLT<Mat>(psd_project(W) + 1e-10 * Mat::Identity(p, p)).matrixL());
      Vec v = vech(L);
      int idx = 0;
      for (int j = 0; j < p; ++j)
        for (int i = j; i < p; ++i) {
          x[at++] = (i == j) ? std::log(std::max(v[idx], 1e-12)) : v[idx];
          ++idx;
        }
    };
    if (fit_omega_H) put_chol(g.omega_H_g);
    if (fit_omega_L) put_chol(g.omega_L_g);
    if (fit_dynamics)
      for (const Mat* M : {&g.gamma_H, &g.gamma_L, &g.beta_H, &g.beta_L}) {
        Vec v = vech(*M);
        for (int i = 0; i < vech_len(p); ++i) x[at++] = v[i];
      }
    if (fit_mu)
      for (int i = 0; i < p; ++i) x[at++] = g.mu[i];
    return x;
  }

  GarchParams unpack(const Vec& x, const GarchParams& base) const {
    GarchParams g = base;
    int at = 0;
    auto get_chol = [&] {
      Vec v(vech_len(p));
      int idx = 0;
      for (int j = 0; j < p; ++j)
        for (int i = j; i < p; ++i) {
          v[idx] = (i == j) ? std::exp(x[at]) : x[at];
          ++at;
          ++idx;
        }
      Mat L = unvech_lower(v, p);
      return Mat(L * L.transpose());
    };
    if (fit_omega_H) g.omega_H_g = get_chol();
    if (fit_omega_L) g.omega_L_g = get_chol();
    if (fit_dynamics)
      for (Mat* M : {&g.gamma_H, &g.gamma_L, &g.beta_H, &g.beta_L}) {
        Vec v(vech_len(p));
        for (int i = 0; i < vech_len(p); ++i) v[i] = x[at++];
        *M = unvech_lower(v, p);
      }
    if (fit_mu)
      for (int i = 0; i < p; ++i) g.mu[i] = x[at++];
    return g;
  }
};

// Smooth penalty activating as the triangular factors approach instability
// or a non-positive (1,1) entry.
inline double stability_penalty(const GarchParams& g, double cap = 0.995, double weight = 1e4) {
  double pen = 0.0;
  for (const Mat* M : {&g.gamma_H, &g.gamma_L, &g.beta_H, &g.beta_L}) {
    const double ex = spectral_norm(*M) - cap;
    if (ex > 0.0) pen += weight * ex * ex;
    const double neg = -(*M)(0, 0);
    if (neg > 0.0) pen += weight * neg * neg;
  }
  return pen;
}

struct FitResult {
  GarchParams theta;
  double loss = std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool converged = false;
  WeightMatrices weights;
  std::optional<Mat> covariance;  // sandwich on the natural theta space
};

namespace detail {

inline GarchParams initial_guess(const RealizedSeries& data, double tau) {
  const int p = data.p;
  const int n = data.n_days();
  Mat rv_bar = Mat::Zero(p, p), ov_bar = Mat::Zero(p, p);
  Vec r_bar = Vec::Zero(p);
  for (int k = 0; k < n; ++k) {
    rv_bar += data.rv[k];
    ov_bar += data.r_raw[k] * data.r_raw[k].transpose();
    r_bar += data.r_raw[k];
  }
  rv_bar /= n;
  ov_bar /= n;
  r_bar /= n;
  GarchParams g;
  g.p = p;
  g.gamma_H = 0.3 * Mat::Identity(p, p);
  g.gamma_L = 0.3 * Mat::Identity(p, p);
  g.beta_H = 0.4 * Mat::Identity(p, p);
  g.beta_L = 0.2 * Mat::Identity(p, p);
  g.omega_H_g = psd_project(rv_bar / tau * 0.5) + 1e-8 * Mat::Identity(p, p);
  g.omega_L_g = psd_project(ov_bar / (1.0 - tau) * 0.5) + 1e-8 * Mat::Identity(p, p);
  g.mu = r_bar / (1.0 - tau);
  return g;
}

inline OptimResult run_penalized(const std::function<double(const GarchParams&)>& objective,
                                 const ThetaMap& map, const GarchParams& base, const Vec& x0,
                                 const OptimOptions& oopt) {
  auto f = [&](const Vec& x) {
    GarchParams g = map.unpack(x, base);
    return objective(g) + stability_penalty(g);
  };
  return bfgs_minimize(f, x0, oopt);
}

}  // namespace detail

// Stage-1 per-regime identity-weight fit. The H regime fits the intercept
// and all four triangular matrices; the L regime additionally fits mu.
inline FitResult stage1_lse(const RealizedSeries& data, Regime regime, double tau,
                            const OptimOptions& oopt = {}) {
  data.validate();
  ThetaMap map;
  map.p = data.p;
  map.fit_omega_H = (regime == Regime::H);
  map.fit_omega_L = (regime == Regime::L);
  map.fit_mu = (regime == Regime::L);
  GarchParams base = detail::initial_guess(data, tau);
  auto objective = [&](const GarchParams& g) { return loss_regime(g, data, regime, tau); };
  OptimResult r = detail::run_penalized(objective, map, base, map.pack(base), oopt);
  FitResult out;
  out.theta = map.unpack(r.x, base);
  out.loss = r.f;
  out.iterations = r.iterations;
  out.converged = r.converged;
  return out;
}

inline WeightMatrices weight_matrices(const RealizedSeries& data, const GarchParams& theta_H,
                                      const GarchParams& theta_L, double tau) {
  const int n = data.n_days();
  const int h = vech_len(data.p);
  auto res_H = detail::residuals(theta_H, data, tau);
  auto res_L = detail::residuals(theta_L, data, tau);
  Mat Vt_H = Mat::Zero(h, h), Vt_L = Mat::Zero(h, h);
  for (int k = 0; k < n; ++k) {
    Vt_H += res_H.e_H[k] * res_H.e_H[k].transpose();
    Vt_L += res_L.e_L[k] * res_L.e_L[k].transpose();
  }
  Vt_H /= n;
  Vt_L /= n;
  WeightMatrices W;
  const double shrink = std::pow(static_cast<double>(n), -0.6);
  W.upsilon_H = Vt_H.diagonal().mean() * shrink;
  W.upsilon_L = Vt_L.diagonal().mean() * shrink;
  W.V_H = Vt_H + W.upsilon_H * Mat::Identity(h, h);
  W.V_L = Vt_L + W.upsilon_L * Mat::Identity(h, h);
  return W;
}

struct WlseOptions {
  OptimOptions stage1;
  OptimOptions stage2;
  int extra_starts = 2;
  bool compute_covariance = false;
  std::optional<GarchParams> init;  // extra user-supplied starting point
  WlseOptions() {
    stage1.max_iter = 150;
    stage2.max_iter = 200;
  }
};

// Natural-space flattening of theta in the order
// (vech wH, vech wL, vech gH, vech gL, vech bH, vech bL, mu).
inline Vec theta_to_vector(const GarchParams& g) {
  const int h = vech_len(g.p);
  Vec x(6 * h + g.p);
  x << vech(g.omega_H_g), vech(g.omega_L_g), vech(g.gamma_H), vech(g.gamma_L), vech(g.beta_H),
      vech(g.beta_L), g.mu;
  return x;
}

inline GarchParams theta_from_vector(const Vec& x, int p) {
  const int h = vech_len(p);
  return GarchParams::from_vech(p, x.segment(0, h), x.segment(h, h), x.segment(2 * h, h),
                                x.segment(3 * h, h), x.segment(4 * h, h), x.segment(5 * h, h),
                                x.segment(6 * h, p));
}

// Plug-in sandwich covariance: derivatives of the recursion outputs by
// central finite differences in the natural theta space; expectations
// replaced by sample averages over post-burn-in days. Returns B^-1 A B^-1/n.
inline Mat sandwich_covariance(const GarchParams& theta, const RealizedSeries& data,
                               const WeightMatrices& V, double tau, int burn_in = kBurnInDays) {
  const int p = theta.p;
  const int h = vech_len(p);
  const int d = 6 * h + p;
  const int n = data.n_days();
  if (n <= burn_in) throw std::domain_error("sandwich_covariance: need more days than burn-in");

  auto eval = [&](const GarchParams& g) {
    // per-day model outputs: tau h^H and the L-regime residual
    const CoefficientSet coef = derive_coefficients(g, tau);
    const HhatSeries hh = hhat_series(coef, data, g.mu, tau);
    std::pair<std::vector<Vec>, std::vector<Vec>> out;
    out.first.resize(n);
    out.second.resize(n);
    for (int k = 0; k < n; ++k) {
      Vec r = data.r_mu(k, g.mu, tau);
      out.first[k] = tau * vech(unvec(hh.h_H[k], p));
      out.second[k] =
          vech(Mat(r * r.transpose())) - (1.0 - tau) * vech(unvec(hh.h_L[k], p));
    }
    return out;
  };

  const Vec x0 = theta_to_vector(theta);
  auto base = eval(theta);
  std::vector<std::vector<Vec>> dH(d), dL(d);  // per parameter, per day
  for (int i = 0; i < d; ++i) {
    const double step = 1e-5 * (1.0 + std::abs(x0[i]));
    Vec xp = x0, xm = x0;
    xp[i] += step;
    xm[i] -= step;
    auto up = eval(theta_from_vector(xp, p));
    auto um = eval(theta_from_vector(xm, p));
    dH[i].resize(n);
    dL[i].resize(n);
    for (int k = 0; k < n; ++k) {
      dH[i][k] = (up.first[k] - um.first[k]) / (2.0 * step);
      dL[i][k] = (up.second[k] - um.second[k]) / (2.0 * step);
    }
  }

  Eigen::LLT<Mat> lltH(V.V_H), lltL(V.V_L);
  if (lltH.info() != Eigen::Success || lltL.info() != Eigen::Success)
    throw std::invalid_argument("sandwich_covariance: weights must be positive definite");

  Mat A = Mat::Zero(d, d), B = Mat::Zero(d, d);
  Mat JH(d, h), JL(d, h);
  const int n_eval = n - burn_in;
  for (int k = burn_in; k < n; ++k) {
    for (int i = 0; i < d; ++i) {
      JH.row(i) = dH[i][k].transpose();
      JL.row(i) = dL[i][k].transpose();
    }
    Vec qH = vech(data.rv[k]) - base.first[k];
    Vec qL = base.second[k];
    Mat JH_Vi = lltH.solve(JH.transpose()).transpose();  // d x h, rows J V^-1
    Mat JL_Vi = lltL.solve(JL.transpose()).transpose();
    Vec aH = JH_Vi * qH, aL = JL_Vi * qL;
    A += aH * aH.transpose() + aL * aL.transpose();
    B += 2.0 * (JH_Vi * JH.transpose() + JL_Vi * JL.transpose());
  }
  A /= n_eval;
  B /= n_eval;
  A = symmetrize(A);
  B = symmetrize(B);

  Eigen::FullPivLU<Mat> lu(B);
  if (!lu.isInvertible()) throw std::runtime_error("sandwich_covariance: singular B");
  Mat Binv = lu.inverse();
  return symmetrize(Binv * A * Binv) / n;
}

inline FitResult fit_wlse(const RealizedSeries& data, double tau, const WlseOptions& opt = {}) {
  data.validate();
  const int p = data.p;
  if (data.n_days() < 6 * vech_len(p) + p)
    throw std::domain_error("fit_wlse: need at least as many days as parameters");

  FitResult s1H = stage1_lse(data, Regime::H, tau, opt.stage1);
  FitResult s1L = stage1_lse(data, Regime::L, tau, opt.stage1);

  GarchParams start = s1H.theta;
  start.omega_L_g = s1L.theta.omega_L_g;
  start.mu = s1L.theta.mu;
  WeightMatrices W = weight_matrices(data, s1H.theta, s1L.theta, tau);

  ThetaMap map;
  map.p = p;
  auto objective = [&](const GarchParams& g) { return loss_wlse(g, data, W, tau); };

  std::vector<Vec> starts;
  starts.push_back(map.pack(start));
  for (int j = 1; j <= opt.extra_starts; ++j) {
    GarchParams pert = start;
    const double scale = (j % 2 == 1) ? 0.7 : 1.25;
    pert.gamma_H *= scale;
    pert.gamma_L *= scale;
    pert.beta_H *= scale;
    pert.beta_L *= scale;
    starts.push_back(map.pack(pert));
  }
  if (opt.init) starts.push_back(map.pack(*opt.init));

  FitResult best;
  for (const Vec& x0 : starts) {
    OptimResult r = detail::run_penalized(objective, map, start, x0, opt.stage2);
    if (r.f < best.loss) {
      best.theta = map.unpack(r.x, start);
      best.loss = r.f;
      best.iterations = r.iterations;
      best.converged = r.converged;
    }
  }
  best.weights = W;
  if (opt.compute_covariance && best.loss < kLossSentinel)
    best.covariance = sandwich_covariance(best.theta, data, W, tau);
  return best;
}

// Whole-day forecast from a fitted parameter vector and an observed series.
inline Mat forecast_next(const GarchParams& theta, const RealizedSeries& data, double tau,
                         const ForecastOptions& opt = {}) {
  return forecast_next(theta, data.rv, data.r_raw, tau, opt);
}

// No-overnight baseline: whole-day recursion driven by the realized measure
// only, identity-weight LSE, with a diagonal variance scaling for forecasts.
struct MgiFit {
  Mat omega, gamma, beta;
  Mat lambda;  // diagonal scaling
  double loss = std::numeric_limits<double>::infinity();
  bool converged = false;
};

namespace detail {

struct MgiCoef {
  Mat Rg, Ag;
  Vec w;
};

inline MgiCoef mgi_coefficients(const Mat& omega, const Mat& gamma, const Mat& beta) {
  const Mat R = kron(gamma, gamma);
  const Mat B = kron(beta, beta);
  VarrhoSeries s = varrho_series(B);
  const Mat vr = 2.0 * s.rho3 * R + s.rho1 - s.rho2;
  MgiCoef c;
  c.Rg = solve_right(vr * R, vr);
  c.Ag = vr * B;
  c.w = vec(symmetrize(omega));
  return c;
}

inline std::vector<Vec> mgi_h_series(const MgiCoef& c, const RealizedSeries& data) {
  const int n = data.n_days();
  std::vector<Vec> h(n);
  h[0] = vec(data.rv[0]);
  for (int k = 1; k < n; ++k) h[k] = c.w + c.Rg * h[k - 1] + c.Ag * vec(data.rv[k - 1]);
  return h;
}

}  // namespace detail

inline double mgi_loss(const Mat& omega, const Mat& gamma, const Mat& beta,
                       const RealizedSeries& data, int burn_in = kBurnInDays) {
  try {
    auto c = detail::mgi_coefficients(omega, gamma, beta);
    auto h = detail::mgi_h_series(c, data);
    const int n = data.n_days();
    double acc = 0.0;
    for (int k = burn_in; k < n; ++k)
      acc += (vech(data.rv[k]) - vech(unvec(h[k], data.p))).squaredNorm();
    const double loss = acc / (2.0 * n);
    return std::isfinite(loss) ? loss : kLossSentinel;
  } catch (const std::exception&) {
    return kLossSentinel;
  }
}

inline MgiFit fit_mgi_baseline(const RealizedSeries& data, double tau,
                               const OptimOptions& oopt = {}) {
  data.validate();
  const int p = data.p;
  const int n = data.n_days();
  Mat rv_bar = Mat::Zero(p, p);
  Vec ov_diag = Vec::Zero(p);
  for (int k = 0; k < n; ++k) {
    rv_bar += data.rv[k];
    ov_diag += data.r_raw[k].cwiseAbs2();
  }
  rv_bar /= n;
  ov_diag /= n;
  if (rv_bar.diagonal().minCoeff() <= 0.0)
    throw std::domain_error("fit_mgi_baseline: degenerate realized variance");

  ThetaMap map;  // reuse the packing machinery through a GarchParams shell
  map.p = p;
  map.fit_omega_L = false;
  map.fit_mu = false;
  GarchParams shell;
  shell.p = p;
  shell.omega_H_g = psd_project(0.5 * rv_bar) + 1e-10 * Mat::Identity(p, p);
  shell.omega_L_g = Mat::Identity(p, p);
  shell.gamma_H = 0.3 * Mat::Identity(p, p);
  shell.gamma_L = 0.3 * Mat::Identity(p, p);
  shell.beta_H = 0.4 * Mat::Identity(p, p);
  shell.beta_L = 0.2 * Mat::Identity(p, p);
  shell.mu = Vec::Zero(p);

  // only omega_H (as the MGI omega), gamma_H, gamma_L, beta_H, beta_L slots
  // are packed; the loss reads omega_H/gamma_H/beta_H
  auto f = [&](const Vec& x) {
    GarchParams g = map.unpack(x, shell);
    double pen = stability_penalty(g);
    return mgi_loss(g.omega_H_g, g.gamma_H, g.beta_H, data) + pen;
  };
  OptimResult r = bfgs_minimize(f, map.pack(shell), oopt);
  GarchParams g = map.unpack(r.x, shell);

  MgiFit out;
  out.omega = g.omega_H_g;
  out.gamma = g.gamma_H;
  out.beta = g.beta_H;
  out.loss = r.f;
  out.converged = r.converged;
  Vec lam(p);
  for (int i = 0; i < p; ++i)
    lam[i] = std::sqrt((rv_bar(i, i) + ov_diag[i]) / rv_bar(i, i));
  out.lambda = lam.asDiagonal();
  return out;
}

// Scaled whole-day forecast Lambda h_{n+1} Lambda from the baseline fit.
inline Mat mgi_forecast(const MgiFit& fit, const RealizedSeries& data) {
  auto c = detail::mgi_coefficients(fit.omega, fit.gamma, fit.beta);
  auto h = detail::mgi_h_series(c, data);
  Vec h_next = c.w + c.Rg * h.back() + c.Ag * vec(data.rv.back());
  Mat base = psd_project(symmetrize(unvec(h_next, data.p)));
  return fit.lambda * base * fit.lambda;
}

// Naive benchmark: realized measure plus the overnight outer product.
inline Mat prvm_naive_forecast(const RealizedSeries& data) {
  const Vec& r = data.r_raw.back();
  return data.rv.back() + r * r.transpose();
}

}  // namespace mogi

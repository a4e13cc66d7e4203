#pragma once

// Synthetic price panels from the two-regime Ito diffusion, with exact
// ground-truth integrated volatilities kept as oracle fields.

#include <cstdint>
#include <vector>

#include "mogi/linalg.hpp"
#include "mogi/params.hpp"
#include "mogi/rng.hpp"

namespace mogi {

struct DayPanel {
  int k = 0;           // day index, 1-based
  Mat y;               // p x (m+1) noisy intraday log prices on the open-period grid
  Vec x_open;          // exact X(k-1)
  Vec x_close;         // exact X(k-1+tau)
  Vec x_end;           // exact X(k)
  Vec r_overnight;     // raw close-to-open return X(k) - X(k-1+tau)
  Mat iv;              // oracle: true open-to-close integrated volatility
  Mat iv_night;        // oracle: true close-to-open integrated volatility
  Mat sigma_day_start; // oracle: spot volatility at the day open
  Mat sigma_close;     // oracle: spot volatility at the day close
};

struct SimulateOptions {
  int fine_factor = 10;      // fine-grid refinement over the observation grid
  double noise_std = 0.001;  // microstructure noise, intraday interior only
  int max_day_attempts = 32;
};

namespace detail {

inline Mat chol_lower(const Mat& S, double tol_scale) {
  Eigen::LLT<Mat> llt(S);
  if (llt.info() == Eigen::Success) return llt.matrixL();
  Eigen::SelfAdjointEigenSolver<Mat> es(S);
  double floor = -1e-10 * std::max(1.0, std::abs(S.trace())) * tol_scale;
  if (es.eigenvalues().minCoeff() < floor)
    throw std::runtime_error("simulate: spot volatility lost positive semidefiniteness");
  Vec ev = es.eigenvalues().cwiseMax(0.0);
  Mat root = es.eigenvectors() * ev.cwiseSqrt().asDiagonal();
  return root;  // root * root' = clipped S
}

struct DayResult {
  DayPanel panel;
  Vec x_next;      // X(k)
  Mat sigma_next;  // spot volatility at the next day open
};

// One day of the diffusion on a fine grid: open regime on [k-1, k-1+tau]
// (fine_factor * m steps), close regime on [k-1+tau, k].
inline DayResult simulate_one_day(const StructuralParams& par, const Vec& x_start,
                                  const Mat& sigma_start, int k, int m,
                                  const SimulateOptions& opt, std::mt19937_64& rng,
                                  const Mat& rho_chol) {
  const int p = par.p;
  const double tau = par.tau;
  std::normal_distribution<double> nd;

  DayResult out;
  out.panel.k = k;
  out.panel.y = Mat::Zero(p, m + 1);
  out.panel.x_open = x_start;
  out.panel.sigma_day_start = sigma_start;
  out.panel.iv = Mat::Zero(p, p);

  const int n_open = opt.fine_factor * m;
  const double dt_open = tau / n_open;
  const int n_night = std::max(1, static_cast<int>(std::ceil((1.0 - tau) / dt_open)));
  const double dt_night = (1.0 - tau) / n_night;

  Vec x = x_start;
  Mat sigma = sigma_start;
  Mat integral = Mat::Zero(p, p);  // running trapezoid of sigma over the open period
  Vec z_run = Vec::Zero(p);        // Z_t accumulation
  out.panel.y.col(0) = x;

  const Mat gH_oH1 = par.gamma_H * (par.omega_H1 + sigma_start) * par.gamma_H.transpose();
  const Mat oH2_s = par.omega_H2 + sigma_start;

  Vec zb(p), zw(p);
  for (int s = 0; s < n_open; ++s) {
    Mat root = chol_lower(sigma, 1.0);
    for (int i = 0; i < p; ++i) {
      zb[i] = nd(rng);
      zw[i] = nd(rng);
    }
    const double sq = std::sqrt(dt_open);
    Vec db = sq * zb;
    Vec dbt = par.rho * db + sq * (rho_chol * zw);
    x += par.mu * dt_open + root * zb * sq;
    z_run += dbt;
    out.panel.iv += sigma * dt_open;  // refined below by trapezoid correction
    Mat sigma_prev = sigma;

    const double t_frac = (s + 1) * dt_open;  // t - [t]
    integral += 0.5 * dt_open * sigma_prev;   // first half of trapezoid
    const double u = t_frac / tau;
    sigma = sigma_start + u * u * gH_oH1 - u * oH2_s +
            (par.beta_H * integral * par.beta_H.transpose()) / tau +
            ((tau - t_frac) / (tau * tau)) * (par.nu * (z_run * z_run.transpose()) *
                                              par.nu.transpose());
    integral += 0.5 * dt_open * sigma;  // second half of trapezoid
    out.panel.iv += 0.5 * dt_open * (sigma - sigma_prev);

    if ((s + 1) % opt.fine_factor == 0) {
      int ell = (s + 1) / opt.fine_factor;
      out.panel.y.col(ell) = x;
    }
  }
  out.panel.x_close = x;

  // close-to-open regime
  const Mat sigma_close = sigma;
  out.panel.sigma_close = sigma_close;
  const Mat gL_oL1 = par.gamma_L * (par.omega_L1 + sigma_close) * par.gamma_L.transpose();
  const Mat oL2_s = par.omega_L2 + sigma_close;
  Vec r_diffusion = Vec::Zero(p);
  out.panel.iv_night = Mat::Zero(p, p);
  for (int s = 0; s < n_night; ++s) {
    Mat root = chol_lower(sigma, 1.0);
    for (int i = 0; i < p; ++i) zb[i] = nd(rng);
    Vec dx_diff = root * zb * std::sqrt(dt_night);
    x += par.mu * dt_night + dx_diff;
    r_diffusion += dx_diff;
    Mat sigma_prev = sigma;
    const double u = (s + 1) * dt_night / (1.0 - tau);
    sigma = sigma_close + u * u * gL_oL1 - u * oL2_s +
            (par.beta_L * (r_diffusion * r_diffusion.transpose()) * par.beta_L.transpose()) /
                (1.0 - tau);
    out.panel.iv_night += 0.5 * dt_night * (sigma_prev + sigma);
  }

  out.panel.x_end = x;
  out.panel.r_overnight = out.panel.x_end - out.panel.x_close;
  out.x_next = x;
  out.sigma_next = sigma;

  // microstructure noise on interior intraday nodes only
  for (int ell = 1; ell < m; ++ell)
    for (int i = 0; i < p; ++i) out.panel.y(i, ell) += opt.noise_std * nd(rng);
  return out;
}

}  // namespace detail

inline std::vector<DayPanel> simulate_mogi(const StructuralParams& params, int n, int m,
                                           std::uint64_t seed, const SimulateOptions& opt = {}) {
  params.validate();
  if (n < 1 || m < 1) throw std::invalid_argument("simulate_mogi: n, m must be >= 1");
  const int p = params.p;
  if (params.x0.size() != p || params.sigma0.rows() != p)
    throw std::invalid_argument("simulate_mogi: x0 / sigma0 dimension mismatch");

  Mat rho_gap = Mat::Identity(p, p) - params.rho * params.rho.transpose();
  Eigen::LLT<Mat> llt(symmetrize(rho_gap));
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("simulate_mogi: rho must satisfy I - rho rho' >= 0");
  const Mat rho_chol = llt.matrixL();

  std::vector<DayPanel> out;
  out.reserve(n);
  Vec x = params.x0;
  Mat sigma = params.sigma0;
  for (int k = 1; k <= n; ++k) {
    for (int attempt = 0;; ++attempt) {
      if (attempt >= opt.max_day_attempts)
        throw std::runtime_error("simulate_mogi: day resampling limit reached");
      auto rng = make_rng(seed, static_cast<std::uint64_t>(k),
                          static_cast<std::uint64_t>(attempt));
      try {
        auto day = detail::simulate_one_day(params, x, sigma, k, m, opt, rng, rho_chol);
        out.push_back(std::move(day.panel));
        x = day.x_next;
        sigma = day.sigma_next;
        break;
      } catch (const std::runtime_error&) {
        continue;  // PSD fault: resample the day with a fresh substream
      }
    }
  }
  return out;
}

struct FactorDesign {
  int p = 0, r = 0;
  Mat U;        // p x r loadings with U'U = p I_r
  Mat gamma_s;  // idiosyncratic covariance, positive definite
  StructuralParams factor;  // r-dimensional factor process

  void validate() const {
    if (p < r || r < 1) throw std::invalid_argument("FactorDesign: need p >= r >= 1");
    if (U.rows() != p || U.cols() != r) throw std::invalid_argument("FactorDesign: U dimension");
    if ((U.transpose() * U - static_cast<double>(p) * Mat::Identity(r, r)).norm() > 1e-8 * p)
      throw std::invalid_argument("FactorDesign: U'U = p I_r violated");
    Eigen::LLT<Mat> llt(symmetrize(gamma_s));
    if (llt.info() != Eigen::Success)
      throw std::invalid_argument("FactorDesign: gamma_s not positive definite");
    factor.validate();
  }
};

// Loading matrix with columns (sqrt(2)cos(2 i pi / p), 1, sqrt(2)sin(2 i pi / p)).
inline Mat build_U(int p, int r = 3) {
  if (p < r || r != 3) throw std::invalid_argument("build_U: requires p >= r = 3");
  Mat U(p, 3);
  for (int i = 1; i <= p; ++i) {
    const double a = 2.0 * i * M_PI / p;
    U(i - 1, 0) = std::sqrt(2.0) * std::cos(a);
    U(i - 1, 1) = 1.0;
    U(i - 1, 2) = std::sqrt(2.0) * std::sin(a);
  }
  return U;
}

// X = U f + u: factor process via simulate_mogi at dimension r, idiosyncratic
// Brownian part sampled exactly on the observation grid. Oracle iv stores the
// full-asset integrated volatility U Psi_k U' + tau Gamma^s.
inline std::vector<DayPanel> simulate_factor_mogi(const FactorDesign& design, int n, int m,
                                                  std::uint64_t seed,
                                                  const SimulateOptions& opt = {}) {
  design.validate();
  const int p = design.p, r = design.r;
  const double tau = design.factor.tau;

  SimulateOptions fopt = opt;
  fopt.noise_std = 0.0;  // noise is added at the asset level below
  std::vector<DayPanel> fdays = simulate_mogi(design.factor, n, m, seed, fopt);

  Eigen::LLT<Mat> llt(symmetrize(design.gamma_s));
  const Mat root_s = llt.matrixL();

  std::vector<DayPanel> out(n);
  Vec u = Vec::Zero(p);  // idiosyncratic log-price component
  std::normal_distribution<double> nd;
  for (int k = 1; k <= n; ++k) {
    auto rng = make_rng(seed ^ 0xfac70a11u, static_cast<std::uint64_t>(k), 0);
    const DayPanel& f = fdays[k - 1];
    DayPanel d;
    d.k = k;
    d.y = Mat::Zero(p, m + 1);
    Vec z(p);
    auto draw = [&](double dt) {
      for (int i = 0; i < p; ++i) z[i] = nd(rng);
      return (root_s * z * std::sqrt(dt)).eval();
    };
    d.x_open = design.U * f.y.col(0) + u;
    d.y.col(0) = d.x_open;
    const double dt_obs = tau / m;
    for (int ell = 1; ell <= m; ++ell) {
      u += draw(dt_obs);
      d.y.col(ell) = design.U * f.y.col(ell) + u;
      if (ell > 0 && ell < m)
        for (int i = 0; i < p; ++i) d.y(i, ell) += opt.noise_std * nd(rng);
    }
    d.x_close = design.U * f.x_close + u;
    u += draw(1.0 - tau);
    d.x_end = design.U * f.x_end + u;
    d.r_overnight = d.x_end - d.x_close;
    d.iv = design.U * f.iv * design.U.transpose() + tau * design.gamma_s;
    d.iv_night =
        design.U * f.iv_night * design.U.transpose() + (1.0 - tau) * design.gamma_s;
    d.sigma_day_start =
        design.U * f.sigma_day_start * design.U.transpose() + design.gamma_s;
    d.sigma_close = design.U * f.sigma_close * design.U.transpose() + design.gamma_s;
    out[k - 1] = std::move(d);
  }
  return out;
}

}  // namespace mogi

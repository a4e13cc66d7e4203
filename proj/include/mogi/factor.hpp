#pragma once

// High-dimensional pipeline: factor-loading estimation from the variance of
// realized volatility matrices, rank selection, projection to the factor
// scale, sparse idiosyncratic estimation by thresholding the principal
// orthogonal complement, and large-matrix forecasting.

#include <fstream>
#include <limits>
#include <string>
#include <unordered_map>
#include <vector>

#include "mogi/estimate.hpp"

namespace mogi {

// sqrt(p) times the top-r eigenvectors of S = sum (G_k - mean)^2 / (np),
// matrix squares. Each column sign is fixed so its largest-magnitude entry
// is positive.
inline Mat estimate_loadings(const std::vector<Mat>& rv_series, int r) {
  const int n = static_cast<int>(rv_series.size());
  if (n < 2) throw std::invalid_argument("estimate_loadings: need at least two matrices");
  const int p = static_cast<int>(rv_series.front().rows());
  if (r < 1 || r > p) throw std::invalid_argument("estimate_loadings: rank out of range");

  Mat mean = Mat::Zero(p, p);
  for (const Mat& g : rv_series) mean += g;
  mean /= n;
  Mat S = Mat::Zero(p, p);
  for (const Mat& g : rv_series) {
    Mat d = g - mean;
    S += d * d;
  }
  S /= static_cast<double>(n) * p;
  if (S.norm() < 1e-300)
    throw std::domain_error("estimate_loadings: degenerate input, no variance direction");

  Eigen::SelfAdjointEigenSolver<Mat> es(symmetrize(S));
  if (es.info() != Eigen::Success) throw std::runtime_error("estimate_loadings: eigen failure");
  Mat U(p, r);
  for (int j = 0; j < r; ++j) {
    Vec v = es.eigenvectors().col(p - 1 - j);
    int arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v[arg] < 0.0) v = -v;
    U.col(j) = std::sqrt(static_cast<double>(p)) * v;
  }
  return U;
}

// Mean over columns of the cosine between a column of U_hat and its
// projection onto span(U_true); 1 means the subspaces coincide.
inline double subspace_cosine(const Mat& U_hat, const Mat& U_true) {
  if (U_hat.rows() != U_true.rows()) throw std::invalid_argument("subspace_cosine: row mismatch");
  Eigen::HouseholderQR<Mat> qr(U_true);
  Mat Q = Mat(qr.householderQ()).leftCols(U_true.cols());
  double acc = 0.0;
  for (int j = 0; j < U_hat.cols(); ++j) {
    const Vec u = U_hat.col(j);
    acc += (Q * (Q.transpose() * u)).norm() / u.norm();
  }
  return acc / U_hat.cols();
}

// Greedy column alignment of an estimated loading matrix to a reference
// basis: picks the signed permutation maximizing |(1/p) U_hat' U_ref| one
// column at a time. Used when reporting estimation errors against a known
// design, where the factor order and sign are not identified.
inline Mat align_loadings(const Mat& U_hat, const Mat& U_ref) {
  if (U_hat.rows() != U_ref.rows() || U_hat.cols() != U_ref.cols())
    throw std::invalid_argument("align_loadings: shape mismatch");
  const int r = static_cast<int>(U_hat.cols());
  Mat M = U_hat.transpose() * U_ref / static_cast<double>(U_hat.rows());
  Mat out(U_hat.rows(), r);
  std::vector<bool> used(r, false);
  for (int j = 0; j < r; ++j) {  // reference column j picks its best match
    int pick = -1;
    double val = -1.0;
    for (int i = 0; i < r; ++i)
      if (!used[i] && std::abs(M(i, j)) > val) {
        val = std::abs(M(i, j));
        pick = i;
      }
    used[pick] = true;
    out.col(j) = (M(pick, j) < 0.0 ? -1.0 : 1.0) * U_hat.col(pick);
  }
  return out;
}

struct RankOptions {
  int r_max = 30;
  double c1_scale = 0.02;
  double c2 = 0.5;
  bool global_c1 = false;  // average the per-day scale eigenvalue instead
};

// Penalized scree criterion: one less than the argmin over j of
// sum_k [ p^-1 lambda_{k,j} + j c1_k {sqrt(log p / sqrt(m)) + log(p)/p}^c2 ]
// with c1_k = c1_scale * lambda_{k,r_max}. The argmin lands on the first
// index past the factor block, so subtracting one recovers the rank; the
// result is clamped to at least one factor.
inline int select_rank(const std::vector<Mat>& rv_series, int m, const RankOptions& opt = {}) {
  const int n = static_cast<int>(rv_series.size());
  if (n < 1) throw std::invalid_argument("select_rank: empty series");
  const int p = static_cast<int>(rv_series.front().rows());
  const int r_max = std::min(opt.r_max, p);
  if (r_max < 1) throw std::invalid_argument("select_rank: r_max out of range");
  if (m < 1) throw std::invalid_argument("select_rank: m must be positive");

  Mat lambda(n, p);  // descending eigenvalues per day
  for (int k = 0; k < n; ++k) {
    Eigen::SelfAdjointEigenSolver<Mat> es(symmetrize(rv_series[k]));
    if (es.info() != Eigen::Success) throw std::runtime_error("select_rank: eigen failure");
    lambda.row(k) = es.eigenvalues().reverse().transpose();
  }
  const double pen_base =
      std::sqrt(std::log(static_cast<double>(p)) / std::sqrt(static_cast<double>(m))) +
      std::log(static_cast<double>(p)) / p;
  const double pen_pow = std::pow(pen_base, opt.c2);
  double c1_global = 0.0;
  if (opt.global_c1) {
    for (int k = 0; k < n; ++k) c1_global += lambda(k, r_max - 1);
    c1_global = opt.c1_scale * c1_global / n;
  }

  int best_j = 1;
  double best = std::numeric_limits<double>::infinity();
  for (int j = 1; j <= r_max; ++j) {
    double obj = 0.0;
    for (int k = 0; k < n; ++k) {
      const double c1 = opt.global_c1 ? c1_global : opt.c1_scale * lambda(k, r_max - 1);
      obj += lambda(k, j - 1) / p + j * c1 * pen_pow;
    }
    if (obj < best) {
      best = obj;
      best_j = j;
    }
  }
  return std::max(best_j - 1, 1);
}

struct FactorEstimate {
  int p = 0, r = 0;
  Mat U;                  // p x r loadings, U'U = p I_r
  RealizedSeries series;  // r-dimensional projected measures and returns
};

// Projection to the factor scale: RV*_k = p^-2 U' G_k U and raw factor
// returns p^-1 U' [X(k) - X(k-1+tau)]. The drift adjustment stays with the
// series accessor so mu can vary during estimation.
inline FactorEstimate project_factor(const std::vector<Mat>& rv_series,
                                     const std::vector<Vec>& overnight_returns, const Mat& U) {
  const int n = static_cast<int>(rv_series.size());
  if (n < 1) throw std::invalid_argument("project_factor: empty series");
  if (overnight_returns.size() != rv_series.size())
    throw std::invalid_argument("project_factor: series length mismatch");
  const int p = static_cast<int>(U.rows());
  const int r = static_cast<int>(U.cols());
  if ((U.transpose() * U - p * Mat::Identity(r, r)).cwiseAbs().maxCoeff() > 1e-6 * p)
    throw std::invalid_argument("project_factor: loading scaling U'U = p I violated");

  FactorEstimate out;
  out.p = p;
  out.r = r;
  out.U = U;
  out.series.p = r;
  const double pinv2 = 1.0 / (static_cast<double>(p) * p);
  for (int k = 0; k < n; ++k) {
    out.series.rv.push_back(symmetrize(pinv2 * U.transpose() * rv_series[k] * U));
    out.series.r_raw.push_back(U.transpose() * overnight_returns[k] / p);
  }
  return out;
}

inline FitResult fit_wlse_factor(const FactorEstimate& factor, double tau,
                                 const WlseOptions& opt = {}) {
  return fit_wlse(factor.series, tau, opt);
}

enum class ThresholdRule { Soft, Hard };

struct SparseEstimate {
  Mat gamma_s;         // thresholded idiosyncratic volatility matrix
  Mat gamma_s_input;   // principal orthogonal complement before thresholding
  double varpi = 0.0;  // base threshold level
  ThresholdRule rule = ThresholdRule::Soft;
};

// Default simulation threshold sqrt(log p / n) + sqrt(1/p).
inline double default_threshold(int p, int n) {
  return std::sqrt(std::log(static_cast<double>(p)) / n) + std::sqrt(1.0 / p);
}

namespace detail {

// Input volatility matrix: mean realized measure plus the mean outer product
// of demeaned overnight returns; then the principal orthogonal complement.
inline Mat poet_complement(const std::vector<Mat>& rv_series,
                           const std::vector<Vec>& overnight_returns, int r) {
  const int n = static_cast<int>(rv_series.size());
  if (n < 2) throw std::invalid_argument("poet: need at least two days");
  if (overnight_returns.size() != rv_series.size())
    throw std::invalid_argument("poet: series length mismatch");
  const int p = static_cast<int>(rv_series.front().rows());
  if (r < 0 || r > p) throw std::invalid_argument("poet: rank out of range");

  Mat bar = Mat::Zero(p, p);
  Vec rbar = Vec::Zero(p);
  for (const Vec& x : overnight_returns) rbar += x;
  rbar /= n;
  for (int k = 0; k < n; ++k) {
    Vec d = overnight_returns[k] - rbar;
    bar += rv_series[k] + d * d.transpose();
  }
  bar /= n;

  Eigen::SelfAdjointEigenSolver<Mat> es(symmetrize(bar));
  if (es.info() != Eigen::Success) throw std::runtime_error("poet: eigen failure");
  Mat comp = symmetrize(bar);
  for (int j = 0; j < r; ++j) {
    const double lam = es.eigenvalues()[p - 1 - j];
    const Vec q = es.eigenvectors().col(p - 1 - j);
    comp -= lam * q * q.transpose();
  }
  return symmetrize(comp);
}

inline Mat adaptive_threshold(const Mat& tilde, double varpi, ThresholdRule rule) {
  const int p = static_cast<int>(tilde.rows());
  Mat out = Mat::Zero(p, p);
  for (int i = 0; i < p; ++i) out(i, i) = std::max(tilde(i, i), 0.0);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) {
      if (i == j) continue;
      const double level =
          varpi * std::sqrt(std::max(tilde(i, i), 0.0) * std::max(tilde(j, j), 0.0));
      const double x = tilde(i, j);
      if (std::abs(x) < level) continue;
      out(i, j) = (rule == ThresholdRule::Hard)
                      ? x
                      : (x > 0.0 ? x - level : x + level);
    }
  return symmetrize(out);
}

}  // namespace detail

inline SparseEstimate poet_idiosyncratic(const std::vector<Mat>& rv_series,
                                         const std::vector<Vec>& overnight_returns, int r,
                                         double varpi, ThresholdRule rule = ThresholdRule::Soft) {
  SparseEstimate out;
  out.gamma_s_input = detail::poet_complement(rv_series, overnight_returns, r);
  out.varpi = varpi;
  out.rule = rule;
  out.gamma_s = detail::adaptive_threshold(out.gamma_s_input, varpi, rule);
  return out;
}

// Sector-membership alternative: keep within-sector entries, zero the rest.
inline SparseEstimate poet_idiosyncratic_sector(const std::vector<Mat>& rv_series,
                                                const std::vector<Vec>& overnight_returns, int r,
                                                const std::vector<int>& sector) {
  SparseEstimate out;
  out.gamma_s_input = detail::poet_complement(rv_series, overnight_returns, r);
  const int p = static_cast<int>(out.gamma_s_input.rows());
  if (static_cast<int>(sector.size()) != p)
    throw std::invalid_argument("poet sector mode: sector map size mismatch");
  Mat g = Mat::Zero(p, p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) {
      if (i == j)
        g(i, i) = std::max(out.gamma_s_input(i, i), 0.0);
      else if (sector[i] == sector[j])
        g(i, j) = out.gamma_s_input(i, j);
    }
  out.gamma_s = symmetrize(g);
  return out;
}

// Sparsity functional max_j sum_i |G_ij|^delta |G_ii G_jj|^{(1-delta)/2};
// delta = 0 counts nonzero entries weighted by the diagonal geometric mean.
inline double sparsity_measure(const Mat& g, double delta = 0.0) {
  const int p = static_cast<int>(g.rows());
  double best = 0.0;
  for (int j = 0; j < p; ++j) {
    double acc = 0.0;
    for (int i = 0; i < p; ++i) {
      const double a = std::abs(g(i, j));
      if (a == 0.0) continue;
      acc += std::pow(a, delta) *
             std::pow(std::abs(g(i, i) * g(j, j)), (1.0 - delta) / 2.0);
    }
    best = std::max(best, acc);
  }
  return best;
}

struct LargeForecast {
  Mat raw;  // U H_{n+1} U' + Gamma^s as assembled
  Mat psd;  // eigenvalue-clipped projection of the raw sum
};

// One-day-ahead large volatility matrix from the fitted factor dynamics and
// the sparse idiosyncratic estimate.
inline LargeForecast predict_large(const Mat& U, const GarchParams& theta,
                                   const RealizedSeries& factor_series, const Mat& gamma_s,
                                   double tau, const ForecastOptions& opt = {}) {
  ForecastOptions raw_opt = opt;
  raw_opt.psd_projection = false;
  const Mat H = forecast_next(theta, factor_series, tau, raw_opt);
  LargeForecast out;
  out.raw = symmetrize(U * H * U.transpose() + gamma_s);
  out.psd = psd_project(out.raw);
  return out;
}

// Sector map file: one "symbol,sector" pair per line; returns integer codes
// in first-appearance order aligned with the row order of the file.
inline std::vector<int> load_sector_map(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_sector_map: cannot open " + path);
  std::unordered_map<std::string, int> codes;
  std::vector<int> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw std::runtime_error("load_sector_map: malformed line: " + line);
    std::string sec = line.substr(comma + 1);
    auto [it, inserted] = codes.emplace(sec, static_cast<int>(codes.size()));
    out.push_back(it->second);
  }
  if (out.empty()) throw std::runtime_error("load_sector_map: empty file");
  return out;
}

}  // namespace mogi

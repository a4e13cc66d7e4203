#pragma once

// Realized covariance estimation from noisy intraday prices: pre-averaged
// realized volatility matrix (PRVM), its jump-truncated variant, previous
// tick synchronization, and overnight return outer products.

#include <algorithm>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "mogi/linalg.hpp"

namespace mogi {

enum class PreAvgWeight { MinKernel, MaxKernel };

struct PrvmOptions {
  int window = 0;  // 0: use floor(sqrt(m))
  double phi = 1.0 / 12.0;
  PreAvgWeight weight = PreAvgWeight::MinKernel;
  double truncation_const = 2.19;
};

namespace detail {

inline double preavg_g(double x, PreAvgWeight w) {
  return w == PreAvgWeight::MinKernel ? std::min(x, 1.0 - x) : std::max(x, 1.0 - x);
}

struct PrvmWork {
  Mat incr;   // p x m increments
  Mat xbar;   // p x (m - w + 1) pre-averaged increments
  Vec chat;   // squared weight-difference coefficients, size w
  int w = 0;
};

inline PrvmWork prvm_work(const Mat& panel, int w, PreAvgWeight weight) {
  const int p = static_cast<int>(panel.rows());
  const int m = static_cast<int>(panel.cols()) - 1;
  if (w < 2 || m < w) throw std::domain_error("prvm: requires m >= w >= 2");
  PrvmWork wk;
  wk.w = w;
  wk.incr = panel.rightCols(m) - panel.leftCols(m);
  Vec gw(w);
  wk.chat = Vec(w);
  for (int s = 1; s <= w; ++s) {
    gw[s - 1] = preavg_g(static_cast<double>(s) / w, weight);
    const double prev = preavg_g(static_cast<double>(s - 1) / w, weight);
    wk.chat[s - 1] = (gw[s - 1] - prev) * (gw[s - 1] - prev);
  }
  const int nu = m - w + 1;
  wk.xbar = Mat::Zero(p, nu);
  for (int u = 0; u < nu; ++u)
    for (int s = 1; s <= w - 1; ++s) wk.xbar.col(u) += gw[s - 1] * wk.incr.col(u + s);
  return wk;
}

}  // namespace detail

// Pre-averaged realized volatility matrix. panel is p x (m+1) intraday log
// prices on an equally spaced grid.
inline Mat prvm(const Mat& panel, const PrvmOptions& opt = {}) {
  const int p = static_cast<int>(panel.rows());
  const int m = static_cast<int>(panel.cols()) - 1;
  const int w = opt.window > 0 ? opt.window : static_cast<int>(std::floor(std::sqrt(m)));
  auto wk = detail::prvm_work(panel, w, opt.weight);
  const int nu = m - w + 1;

  Mat acc = wk.xbar * wk.xbar.transpose();
  // hat term collapses to per-column weights: column l of incr appears in
  // summand (u, s) exactly when u = l - s + 1 lands in the valid range
  Vec colw = Vec::Zero(m);
  for (int l = 0; l < m; ++l)
    for (int s = 1; s <= w; ++s) {
      const int u = l - s + 1;
      if (u >= 0 && u < nu) colw[l] += wk.chat[s - 1];
    }
  Mat hat = Mat::Zero(p, p);
  for (int l = 0; l < m; ++l) hat += colw[l] * (wk.incr.col(l) * wk.incr.col(l).transpose());
  return symmetrize((acc - 0.5 * hat) / (w * opt.phi));
}

// PRVM with per-summand jump truncation: summand u contributes to entry
// (i,j) only when |xbar_i(u)| and |xbar_j(u)| both stay below their
// thresholds v^i = c sqrt(sum_u xbar_i(u)^2 / (m-w+1)).
inline Mat jump_truncated_prvm(const Mat& panel, const PrvmOptions& opt = {}) {
  const int p = static_cast<int>(panel.rows());
  const int m = static_cast<int>(panel.cols()) - 1;
  const int w = opt.window > 0 ? opt.window : static_cast<int>(std::floor(std::sqrt(m)));
  auto wk = detail::prvm_work(panel, w, opt.weight);
  const int nu = m - w + 1;

  Vec v(p);
  for (int i = 0; i < p; ++i)
    v[i] = opt.truncation_const * std::sqrt(wk.xbar.row(i).squaredNorm() / nu);

  Mat acc = Mat::Zero(p, p);
  Eigen::Matrix<bool, Eigen::Dynamic, 1> keep(p);
  for (int u = 0; u < nu; ++u) {
    for (int i = 0; i < p; ++i) keep[i] = std::abs(wk.xbar(i, u)) < v[i];
    Mat hat_u = Mat::Zero(p, p);
    for (int s = 1; s <= w; ++s)
      hat_u += wk.chat[s - 1] * (wk.incr.col(u + s - 1) * wk.incr.col(u + s - 1).transpose());
    for (int j = 0; j < p; ++j)
      for (int i = 0; i < p; ++i)
        if (keep[i] && keep[j])
          acc(i, j) += wk.xbar(i, u) * wk.xbar(j, u) - 0.5 * hat_u(i, j);
  }
  return symmetrize(acc / (w * opt.phi));
}

// r_n(mu) = X(n) - X(tau + n - 1) - (1 - tau) mu and its outer product.
inline std::pair<Vec, Mat> overnight_outer(const Vec& x_close, const Vec& x_next_open,
                                           const Vec& mu, double tau) {
  if (x_close.size() != x_next_open.size() || x_close.size() != mu.size())
    throw std::invalid_argument("overnight_outer: dimension mismatch");
  Vec r = x_next_open - x_close - (1.0 - tau) * mu;
  return {r, r * r.transpose()};
}

struct TickStream {
  std::vector<double> times;   // strictly increasing
  std::vector<double> prices;  // positive
};

// Previous-tick synchronization: value at grid time t is the last tick price
// at time <= t.
inline Mat previous_tick_sync(const std::vector<TickStream>& streams, const std::vector<double>& grid) {
  const int p = static_cast<int>(streams.size());
  const int g = static_cast<int>(grid.size());
  Mat panel(p, g);
  for (int i = 0; i < p; ++i) {
    const auto& s = streams[i];
    if (s.times.empty() || s.times.size() != s.prices.size())
      throw std::domain_error("previous_tick_sync: empty or inconsistent stream");
    if (s.times.front() > grid.front())
      throw std::domain_error("previous_tick_sync: no tick at or before the grid start");
    std::size_t j = 0;
    for (int t = 0; t < g; ++t) {
      while (j + 1 < s.times.size() && s.times[j + 1] <= grid[t]) ++j;
      panel(i, t) = s.prices[j];
    }
  }
  return panel;
}

struct RealizedSeries {
  int p = 0, m = 0, window = 0;
  bool truncated = false;
  PreAvgWeight weight = PreAvgWeight::MinKernel;
  std::vector<Mat> rv;           // per-day open-to-close realized measure
  std::vector<Vec> r_raw;        // per-day raw overnight return X(k) - X(k-1+tau)

  int n_days() const { return static_cast<int>(rv.size()); }

  // drift-adjusted overnight return of day k (0-based)
  Vec r_mu(int k, const Vec& mu, double tau) const {
    return r_raw[k] - (1.0 - tau) * mu;
  }

  void validate() const {
    if (rv.size() != r_raw.size()) throw std::invalid_argument("RealizedSeries: length mismatch");
    for (const Mat& M : rv) {
      if (M.rows() != p || M.cols() != p || !M.allFinite() ||
          (M - M.transpose()).norm() > 1e-8 * (1.0 + M.norm()))
        throw std::invalid_argument("RealizedSeries: invalid realized measure");
    }
    for (const Vec& r : r_raw)
      if (r.size() != p || !r.allFinite())
        throw std::invalid_argument("RealizedSeries: invalid overnight return");
  }
};

inline void save_realized_series(const RealizedSeries& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_realized_series: cannot open " + path);
  out << "day";
  for (int i = 0; i < vech_len(s.p); ++i) out << ",vech_rv_" << i;
  for (int i = 0; i < s.p; ++i) out << ",r_" << i;
  out << "\n";
  out.precision(17);
  for (int k = 0; k < s.n_days(); ++k) {
    out << (k + 1);
    Vec v = vech(s.rv[k]);
    for (int i = 0; i < v.size(); ++i) out << "," << v[i];
    for (int i = 0; i < s.p; ++i) out << "," << s.r_raw[k][i];
    out << "\n";
  }
}

inline RealizedSeries load_realized_series(const std::string& path, int p) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_realized_series: cannot open " + path);
  RealizedSeries s;
  s.p = p;
  std::string line;
  std::getline(in, line);  // header
  const int h = vech_len(p);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::getline(ss, cell, ',');
    Vec v(h), r(p);
    for (int i = 0; i < h; ++i) {
      std::getline(ss, cell, ',');
      v[i] = std::stod(cell);
    }
    for (int i = 0; i < p; ++i) {
      std::getline(ss, cell, ',');
      r[i] = std::stod(cell);
    }
    s.rv.push_back(unvech(v, p));
    s.r_raw.push_back(r);
  }
  s.validate();
  return s;
}

}  // namespace mogi

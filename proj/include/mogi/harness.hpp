#pragma once

// Config-driven experiment harness behind the command line tool: synthetic
// data generation, estimation from saved series, forecast comparisons,
// replication sweeps, and the minimum-variance backtest.

#include <atomic>
#include <functional>
#include <map>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "mogi/estimate.hpp"
#include "mogi/factor.hpp"
#include "mogi/io.hpp"
#include "mogi/portfolio.hpp"
#include "mogi/replication.hpp"
#include "mogi/simulate.hpp"

namespace mogi {

struct ExperimentConfig {
  std::string mode = "replicate";   // simulate | estimate | forecast | backtest | replicate
  std::string design = "small";     // small | factor
  int p = 3;
  int r = 3;
  int n = 250;       // estimation days
  int n_out = 63;    // backtest out-of-sample days
  int m = 780;       // intraday observations
  int reps = 10;
  int r_max = 10;
  int window = 0;       // 0: floor(sqrt(m))
  int fine_factor = 0;  // Euler refinement per observation step; 0: auto
  int threads = 1;
  std::uint64_t seed = 1;
  double tau = 6.5 / 24.0;
  double threshold = -1.0;  // negative: default rule
  double noise_std = 0.001;
  bool truncated = false;
  bool compute_covariance = false;
  std::vector<double> c0_grid{1.0, 1.5, 2.0, 2.5, 3.0};
  std::string out_dir = "out";
  std::string data_path;    // estimate/forecast: saved realized series
  std::string params_path;  // forecast: fitted parameter file
  std::string sector_path;  // optional sector map for the thresholding step
};

inline nlohmann::json to_json(const ExperimentConfig& c) {
  return nlohmann::json{{"mode", c.mode},
                        {"design", c.design},
                        {"p", c.p},
                        {"r", c.r},
                        {"n", c.n},
                        {"n_out", c.n_out},
                        {"m", c.m},
                        {"reps", c.reps},
                        {"r_max", c.r_max},
                        {"window", c.window},
                        {"fine_factor", c.fine_factor},
                        {"threads", c.threads},
                        {"seed", c.seed},
                        {"tau", c.tau},
                        {"threshold", c.threshold},
                        {"noise_std", c.noise_std},
                        {"truncated", c.truncated},
                        {"compute_covariance", c.compute_covariance},
                        {"c0_grid", c.c0_grid},
                        {"out_dir", c.out_dir},
                        {"data_path", c.data_path},
                        {"params_path", c.params_path},
                        {"sector_path", c.sector_path}};
}

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  c.mode = j.value("mode", c.mode);
  c.design = j.value("design", c.design);
  c.p = j.value("p", c.p);
  c.r = j.value("r", c.r);
  c.n = j.value("n", c.n);
  c.n_out = j.value("n_out", c.n_out);
  c.m = j.value("m", c.m);
  c.reps = j.value("reps", c.reps);
  c.r_max = j.value("r_max", c.r_max);
  c.window = j.value("window", c.window);
  c.fine_factor = j.value("fine_factor", c.fine_factor);
  c.threads = j.value("threads", c.threads);
  c.seed = j.value("seed", c.seed);
  c.tau = j.value("tau", c.tau);
  c.threshold = j.value("threshold", c.threshold);
  c.noise_std = j.value("noise_std", c.noise_std);
  c.truncated = j.value("truncated", c.truncated);
  c.compute_covariance = j.value("compute_covariance", c.compute_covariance);
  if (j.contains("c0_grid")) c.c0_grid = j.at("c0_grid").get<std::vector<double>>();
  c.out_dir = j.value("out_dir", c.out_dir);
  c.data_path = j.value("data_path", c.data_path);
  c.params_path = j.value("params_path", c.params_path);
  c.sector_path = j.value("sector_path", c.sector_path);
  return c;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_config: cannot open " + path);
  nlohmann::json j;
  in >> j;
  return config_from_json(j);
}

namespace harness {

// Per-rep seeds are derived by mixing, so results are invariant to how reps
// are partitioned across threads.
inline std::uint64_t rep_seed(std::uint64_t seed, int rep) {
  return splitmix64(seed ^ splitmix64(0x9e3779b97f4a7c15ULL + static_cast<std::uint64_t>(rep)));
}

inline void parallel_for(int count, int threads, const std::function<void(int)>& body) {
  if (threads <= 1 || count <= 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr err;
  std::mutex err_mu;
  const int nthreads = std::min(threads, count);
  for (int t = 0; t < nthreads; ++t)
    pool.emplace_back([&] {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= count) return;
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mu);
          if (!err) err = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

inline StructuralParams small_design() {
  StructuralParams s = replication::study_small();
  s.sigma0 = derive_coefficients(s, s.tau).day.omega_g;
  return s;
}

inline FactorDesign factor_design(int p) {
  FactorDesign d;
  d.p = p;
  d.r = 3;
  d.U = build_U(p);
  d.gamma_s = Mat(p, p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) d.gamma_s(i, j) = std::pow(0.5, std::abs(i - j)) * 0.004;
  d.factor = replication::study_factor();
  d.factor.sigma0 = derive_coefficients(d.factor, d.factor.tau).day.omega_g;
  return d;
}

inline std::vector<DayPanel> simulate_design(const ExperimentConfig& cfg, int n_days,
                                             std::uint64_t seed) {
  SimulateOptions opt;
  opt.noise_std = cfg.noise_std;
  // keep roughly 7800 fine Euler steps over the open period regardless of m
  opt.fine_factor =
      cfg.fine_factor > 0 ? cfg.fine_factor : std::max(1, std::min(10, 7800 / cfg.m));
  if (cfg.design == "factor") return simulate_factor_mogi(factor_design(cfg.p), n_days, cfg.m, seed, opt);
  if (cfg.design != "small") throw std::invalid_argument("unknown design: " + cfg.design);
  StructuralParams s = small_design();
  if (cfg.p != s.p) throw std::invalid_argument("small design requires p = 3");
  return simulate_mogi(s, n_days, cfg.m, seed, opt);
}

inline RealizedSeries measure_panels(const std::vector<DayPanel>& panels,
                                     const ExperimentConfig& cfg) {
  PrvmOptions opt;
  opt.window = cfg.window;
  return realized_from_panels(panels, opt, cfg.truncated);
}

inline void write_manifest(const ExperimentConfig& cfg) {
  nlohmann::json conf = to_json(cfg);
  nlohmann::json man{{"tool", "mogi"},
                     {"version", "0.1.0"},
                     {"mode", cfg.mode},
                     {"seed", cfg.seed},
                     {"config", conf},
                     {"config_hash", hex64(fnv1a64(conf.dump()))}};
  write_json(cfg.out_dir + "/manifest.json", man);
}

inline nlohmann::json fit_to_json(const FitResult& fit) {
  nlohmann::json j{{"theta", to_json(fit.theta)},
                   {"loss", fit.loss},
                   {"iterations", fit.iterations},
                   {"converged", fit.converged}};
  if (fit.covariance) {
    Vec se = fit.covariance->diagonal().cwiseMax(0.0).cwiseSqrt();
    j["stderr"] = std::vector<double>(se.data(), se.data() + se.size());
  }
  return j;
}

struct BlockError {
  std::string block, norm;
  double value = 0.0;
};

inline std::vector<BlockError> block_errors(const GarchParams& est, const GarchParams& truth) {
  std::vector<BlockError> out;
  auto push = [&](const std::string& name, const Mat& d) {
    out.push_back({name, "frobenius", d.norm()});
    out.push_back({name, "spectral", spectral_norm(d)});
    out.push_back({name, "max", d.cwiseAbs().maxCoeff()});
  };
  push("omega_H", est.omega_H_g - truth.omega_H_g);
  push("omega_L", est.omega_L_g - truth.omega_L_g);
  push("gamma_H", est.gamma_H - truth.gamma_H);
  push("gamma_L", est.gamma_L - truth.gamma_L);
  push("beta_H", est.beta_H - truth.beta_H);
  push("beta_L", est.beta_L - truth.beta_L);
  push("mu", Mat(est.mu - truth.mu));
  return out;
}

inline double rel_frob(const Mat& est, const Mat& truth) {
  return (est - truth).norm() / std::max(truth.norm(), 1e-300);
}

// Spot factor volatility at a day open, recovered from the oracle field of a
// factor-design panel.
inline Mat factor_spot(const FactorDesign& d, const Mat& sigma_day_start) {
  const double p2 = static_cast<double>(d.p) * d.p;
  return symmetrize(d.U.transpose() * (sigma_day_start - d.gamma_s) * d.U / p2);
}

// Static no-dynamics baseline: factor structure of the latest open-to-open
// volatility estimate, complement thresholded at sqrt(2 log p / sqrt(m)).
inline Mat poet_static_matrix(const std::vector<Mat>& rv_series,
                              const std::vector<Vec>& overnight_returns, int r, int m) {
  const int p = static_cast<int>(rv_series.front().rows());
  const Vec& ret = overnight_returns.back();
  Mat bar = rv_series.back() + ret * ret.transpose();
  Eigen::SelfAdjointEigenSolver<Mat> es(symmetrize(bar));
  Mat low = Mat::Zero(p, p);
  for (int j = 0; j < r; ++j) {
    const Vec v = es.eigenvectors().col(p - 1 - j);
    low += es.eigenvalues()[p - 1 - j] * v * v.transpose();
  }
  const double varpi = std::sqrt(2.0 * std::log(static_cast<double>(p)) / std::sqrt(m));
  Mat resid = detail::adaptive_threshold(bar - low, varpi, ThresholdRule::Soft);
  return psd_project(symmetrize(low + resid));
}

struct ForecastErrors {
  double mogi = 0, mgi = 0, naive = 0;
};

// One forecast-comparison replication on the small design: mean relative
// Frobenius errors against the exact conditional means over a window of
// n_out one-day-ahead forecasts. Models are fit once on the first n days;
// the forecast recursions absorb each later day without refitting.
inline ForecastErrors forecast_rep(const ExperimentConfig& cfg, std::uint64_t seed) {
  const StructuralParams truth_par = small_design();
  const int window = std::max(1, cfg.n_out);
  auto panels = simulate_design(cfg, cfg.n + window, seed);
  const RealizedSeries full = measure_panels(panels, cfg);
  RealizedSeries series = full;
  series.rv.assign(full.rv.begin(), full.rv.begin() + cfg.n);
  series.r_raw.assign(full.r_raw.begin(), full.r_raw.begin() + cfg.n);
  FitResult fit = fit_wlse(series, cfg.tau);
  MgiFit mgi = fit_mgi_baseline(series, cfg.tau);
  ForecastErrors e;
  for (int j = 0; j < window; ++j) {
    if (j > 0) {
      series.rv.push_back(full.rv[cfg.n + j - 1]);
      series.r_raw.push_back(full.r_raw[cfg.n + j - 1]);
    }
    const Mat truth =
        conditional_day_mean(truth_par, panels[cfg.n + j].sigma_day_start, cfg.tau);
    e.mogi += rel_frob(forecast_next(fit.theta, series, cfg.tau), truth);
    e.mgi += rel_frob(mgi_forecast(mgi, series), truth);
    e.naive += rel_frob(prvm_naive_forecast(series), truth);
  }
  e.mogi /= window;
  e.mgi /= window;
  e.naive /= window;
  return e;
}

// One replication of the factor pipeline: loading recovery, rank selection,
// idiosyncratic thresholding, and the large forecast against the exact
// conditional mean.
inline std::vector<std::pair<std::string, double>> factor_rep(const ExperimentConfig& cfg,
                                                              std::uint64_t seed) {
  const FactorDesign design = factor_design(cfg.p);
  const GarchParams truth = garch_truth(design.factor, cfg.tau);
  const double varpi = cfg.threshold >= 0.0 ? cfg.threshold : default_threshold(cfg.p, cfg.n);

  auto panels = simulate_design(cfg, cfg.n + 1, seed);
  std::vector<Mat> rvs;
  std::vector<Vec> rets;
  for (int k = 0; k < cfg.n; ++k) {
    rvs.push_back(measure_panels({panels[k]}, cfg).rv[0]);
    rets.push_back(panels[k].r_overnight);
  }

  Mat U_hat = align_loadings(estimate_loadings(rvs, cfg.r), design.U);
  RankOptions ro;
  ro.r_max = cfg.r_max;
  const int r_hat = select_rank(rvs, cfg.m, ro);

  FactorEstimate fe = project_factor(rvs, rets, U_hat);
  FitResult fit = fit_wlse_factor(fe, cfg.tau);
  SparseEstimate sp = poet_idiosyncratic(rvs, rets, cfg.r, varpi);
  const Mat spot = factor_spot(design, panels.back().sigma_day_start);
  const Mat truth_large =
      design.U * conditional_day_mean(design.factor, spot, cfg.tau) * design.U.transpose() +
      design.gamma_s;
  LargeForecast lf = predict_large(U_hat, fit.theta, fe.series, sp.gamma_s, cfg.tau);

  std::vector<std::pair<std::string, double>> rows;
  rows.emplace_back("subspace_cosine", subspace_cosine(U_hat, design.U));
  rows.emplace_back("rank_hat", static_cast<double>(r_hat));
  rows.emplace_back("poet_max_err", (sp.gamma_s - design.gamma_s).cwiseAbs().maxCoeff());
  rows.emplace_back("forecast_rel_err", rel_frob(lf.psd, truth_large));
  for (const BlockError& e : block_errors(fit.theta, truth))
    if (e.norm == "frobenius") rows.emplace_back("err_" + e.block, e.value);
  return rows;
}

struct BacktestRisks {
  std::vector<double> mogi, poet;  // one entry per c0
};

// One backtest replication on the factor design. The overnight factor model
// refits nothing out of sample: loadings, fitted dynamics, and the sparse
// idiosyncratic part stay fixed while the forecast recursion absorbs each
// new day. The baseline holds one static thresholded volatility matrix.
inline BacktestRisks backtest_rep(const ExperimentConfig& cfg, std::uint64_t seed) {
  const int n_total = cfg.n + cfg.n_out;
  const double varpi = cfg.threshold >= 0.0 ? cfg.threshold : default_threshold(cfg.p, cfg.n);

  auto panels = simulate_design(cfg, n_total, seed);
  std::vector<Mat> rvs(n_total);
  std::vector<Vec> rets(n_total);
  for (int k = 0; k < n_total; ++k) {
    rvs[k] = measure_panels({panels[k]}, cfg).rv[0];
    rets[k] = panels[k].r_overnight;
  }
  std::vector<Mat> rvs_in(rvs.begin(), rvs.begin() + cfg.n);
  std::vector<Vec> rets_in(rets.begin(), rets.begin() + cfg.n);

  const Mat U_hat = estimate_loadings(rvs_in, cfg.r);
  FactorEstimate fe_in = project_factor(rvs_in, rets_in, U_hat);
  FitResult fit = fit_wlse_factor(fe_in, cfg.tau);
  SparseEstimate sp =
      cfg.sector_path.empty()
          ? poet_idiosyncratic(rvs_in, rets_in, cfg.r, varpi)
          : poet_idiosyncratic_sector(rvs_in, rets_in, cfg.r, load_sector_map(cfg.sector_path));
  const Mat poet_static = poet_static_matrix(rvs_in, rets_in, cfg.r, cfg.m);

  // per-day forecasts with the in-sample fit, series grown day by day
  std::vector<Mat> forecasts(cfg.n_out);
  for (int d = 0; d < cfg.n_out; ++d) {
    const int t = cfg.n + d;  // trading day, forecast uses days < t
    std::vector<Mat> rv_hist(rvs.begin(), rvs.begin() + t);
    std::vector<Vec> ret_hist(rets.begin(), rets.begin() + t);
    FactorEstimate fe = project_factor(rv_hist, ret_hist, U_hat);
    forecasts[d] = predict_large(U_hat, fit.theta, fe.series, sp.gamma_s, cfg.tau).psd;
  }

  std::vector<Mat> grids(cfg.n_out);
  std::vector<Vec> overnight(cfg.n_out);
  const int stride = std::max(1, cfg.m / 39);  // 39 intraday intervals when divisible
  for (int d = 0; d < cfg.n_out; ++d) {
    const Mat& y = panels[cfg.n + d].y;
    const int cols = static_cast<int>(y.cols());
    std::vector<int> idx;
    for (int c = 0; c < cols; c += stride) idx.push_back(c);
    if (idx.back() != cols - 1) idx.push_back(cols - 1);
    Mat g(cfg.p, static_cast<int>(idx.size()));
    for (std::size_t c = 0; c < idx.size(); ++c) g.col(c) = y.col(idx[c]);
    grids[d] = g;
    overnight[d] = panels[cfg.n + d].r_overnight;
  }

  BacktestRisks rr;
  for (double c0 : cfg.c0_grid) {
    std::vector<Vec> w_mogi(cfg.n_out), w_poet(cfg.n_out);
    const Vec wp = min_variance_l1(poet_static, c0).w;
    PortfolioOptions popt;
    for (int d = 0; d < cfg.n_out; ++d) {
      w_mogi[d] = min_variance_l1(forecasts[d], c0, popt).w;
      popt.w0 = w_mogi[d];  // consecutive forecasts are close, warm start
      w_poet[d] = wp;
    }
    rr.mogi.push_back(oos_risk(w_mogi, grids, overnight));
    rr.poet.push_back(oos_risk(w_poet, grids, overnight));
  }
  return rr;
}

}  // namespace harness

inline void run_simulate(const ExperimentConfig& cfg) {
  auto panels = harness::simulate_design(cfg, cfg.n, cfg.seed);
  RealizedSeries series = harness::measure_panels(panels, cfg);
  std::filesystem::create_directories(cfg.out_dir);
  save_realized_series(series, cfg.out_dir + "/series.csv");
  save_realized_series(realized_from_oracle(panels), cfg.out_dir + "/oracle_series.csv");
  harness::write_manifest(cfg);
}

inline FitResult run_estimate(const ExperimentConfig& cfg) {
  const std::string path = cfg.data_path.empty() ? cfg.out_dir + "/series.csv" : cfg.data_path;
  RealizedSeries series = load_realized_series(path, cfg.p);
  WlseOptions opt;
  opt.compute_covariance = cfg.compute_covariance;
  FitResult fit = fit_wlse(series, cfg.tau, opt);
  write_json(cfg.out_dir + "/fit.json", harness::fit_to_json(fit));
  harness::write_manifest(cfg);
  return fit;
}

// Data mode: one whole-day forecast from a saved series and a saved fit.
// Simulation mode (no data_path): per-rep forecast errors of the overnight
// model against the exact conditional mean, next to the no-overnight and
// naive benchmarks.
inline void run_forecast(const ExperimentConfig& cfg) {
  if (!cfg.data_path.empty()) {
    RealizedSeries series = load_realized_series(cfg.data_path, cfg.p);
    std::ifstream in(cfg.params_path);
    if (!in) throw std::runtime_error("run_forecast: cannot open " + cfg.params_path);
    nlohmann::json j;
    in >> j;
    GarchParams theta = garch_params_from_json(j.contains("theta") ? j.at("theta") : j);
    Mat f = forecast_next(theta, series, cfg.tau);
    std::ofstream out = open_out(cfg.out_dir + "/forecast.csv");
    out << "i,j,value\n";
    out.precision(17);
    for (int i = 0; i < cfg.p; ++i)
      for (int jj = i; jj < cfg.p; ++jj) out << i << "," << jj << "," << f(i, jj) << "\n";
    harness::write_manifest(cfg);
    return;
  }

  if (cfg.design != "small") throw std::invalid_argument("run_forecast: simulation mode uses the small design");
  std::vector<harness::ForecastErrors> rows(cfg.reps);
  harness::parallel_for(cfg.reps, cfg.threads, [&](int rep) {
    rows[rep] = harness::forecast_rep(cfg, harness::rep_seed(cfg.seed, rep));
  });

  std::ofstream out = open_out(cfg.out_dir + "/forecast.csv");
  out << "rep,err_mogi,err_mgi,err_naive\n";
  double sm = 0, sg = 0, sn = 0;
  int win_mgi = 0, win_naive = 0;
  for (int rep = 0; rep < cfg.reps; ++rep) {
    const harness::ForecastErrors& r = rows[rep];
    out << rep << "," << r.mogi << "," << r.mgi << "," << r.naive << "\n";
    sm += r.mogi;
    sg += r.mgi;
    sn += r.naive;
    win_mgi += r.mogi < r.mgi;
    win_naive += r.mogi < r.naive;
  }
  std::ofstream means = open_out(cfg.out_dir + "/means.csv");
  means << "metric,value\n";
  means << "mean_err_mogi," << sm / cfg.reps << "\n";
  means << "mean_err_mgi," << sg / cfg.reps << "\n";
  means << "mean_err_naive," << sn / cfg.reps << "\n";
  means << "win_rate_vs_mgi," << static_cast<double>(win_mgi) / cfg.reps << "\n";
  means << "win_rate_vs_naive," << static_cast<double>(win_naive) / cfg.reps << "\n";
  harness::write_manifest(cfg);
}

namespace harness {

inline void replicate_small(const ExperimentConfig& cfg) {
  const GarchParams truth = garch_truth(small_design(), cfg.tau);
  std::vector<std::vector<BlockError>> all(cfg.reps);
  parallel_for(cfg.reps, cfg.threads, [&](int rep) {
    auto panels = simulate_design(cfg, cfg.n, rep_seed(cfg.seed, rep));
    RealizedSeries series = measure_panels(panels, cfg);
    FitResult fit = fit_wlse(series, cfg.tau);
    all[rep] = block_errors(fit.theta, truth);
  });

  std::ofstream out = open_out(cfg.out_dir + "/metrics.csv");
  out << "rep,block,norm,error\n";
  std::map<std::pair<std::string, std::string>, double> acc;
  for (int rep = 0; rep < cfg.reps; ++rep)
    for (const BlockError& e : all[rep]) {
      out << rep << "," << e.block << "," << e.norm << "," << e.value << "\n";
      acc[{e.block, e.norm}] += e.value;
    }
  std::ofstream means = open_out(cfg.out_dir + "/means.csv");
  means << "block,norm,mean_error\n";
  for (const auto& [key, total] : acc)
    means << key.first << "," << key.second << "," << total / cfg.reps << "\n";
  write_manifest(cfg);
}

inline void replicate_factor(const ExperimentConfig& cfg) {
  std::vector<std::vector<std::pair<std::string, double>>> all(cfg.reps);
  parallel_for(cfg.reps, cfg.threads,
               [&](int rep) { all[rep] = factor_rep(cfg, rep_seed(cfg.seed, rep)); });

  std::ofstream out = open_out(cfg.out_dir + "/metrics.csv");
  out << "rep,metric,value\n";
  std::map<std::string, double> acc;
  for (int rep = 0; rep < cfg.reps; ++rep)
    for (const auto& [name, value] : all[rep]) {
      out << rep << "," << name << "," << value << "\n";
      acc[name] += value;
    }
  std::ofstream means = open_out(cfg.out_dir + "/means.csv");
  means << "metric,mean\n";
  for (const auto& [name, total] : acc) means << name << "," << total / cfg.reps << "\n";
  write_manifest(cfg);
}

}  // namespace harness

inline void run_replicate(const ExperimentConfig& cfg) {
  if (cfg.design == "small") {
    harness::replicate_small(cfg);
    return;
  }
  if (cfg.design == "factor") {
    harness::replicate_factor(cfg);
    return;
  }
  throw std::invalid_argument("run_replicate: unknown design " + cfg.design);
}

// Rolling one-day-ahead minimum-variance backtest on the factor design.
// The overnight factor model refits nothing out of sample: loadings, fitted
// dynamics, and the sparse idiosyncratic part stay fixed while the forecast
// recursion absorbs each new day. The baseline holds one static thresholded
// volatility matrix for the whole window.
inline void run_backtest(const ExperimentConfig& cfg) {
  if (cfg.design != "factor") throw std::invalid_argument("run_backtest: factor design required");
  std::vector<harness::BacktestRisks> results(cfg.reps);
  harness::parallel_for(cfg.reps, cfg.threads, [&](int rep) {
    results[rep] = harness::backtest_rep(cfg, harness::rep_seed(cfg.seed, rep));
  });

  std::ofstream out = open_out(cfg.out_dir + "/backtest.csv");
  out << "rep,method,c0,risk\n";
  const std::size_t nc = cfg.c0_grid.size();
  std::vector<double> sum_mogi(nc, 0.0), sum_poet(nc, 0.0);
  std::vector<int> wins(nc, 0);
  for (int rep = 0; rep < cfg.reps; ++rep)
    for (std::size_t c = 0; c < nc; ++c) {
      out << rep << ",mogi," << cfg.c0_grid[c] << "," << results[rep].mogi[c] << "\n";
      out << rep << ",poet_static," << cfg.c0_grid[c] << "," << results[rep].poet[c] << "\n";
      sum_mogi[c] += results[rep].mogi[c];
      sum_poet[c] += results[rep].poet[c];
      wins[c] += results[rep].mogi[c] <= results[rep].poet[c];
    }
  std::ofstream means = open_out(cfg.out_dir + "/means.csv");
  means << "c0,mean_risk_mogi,mean_risk_poet,win_rate\n";
  for (std::size_t c = 0; c < nc; ++c)
    means << cfg.c0_grid[c] << "," << sum_mogi[c] / cfg.reps << "," << sum_poet[c] / cfg.reps
          << "," << static_cast<double>(wins[c]) / cfg.reps << "\n";
  harness::write_manifest(cfg);
}

inline void run_experiment(const ExperimentConfig& cfg) {
  if (cfg.mode == "simulate")
    run_simulate(cfg);
  else if (cfg.mode == "estimate")
    run_estimate(cfg);
  else if (cfg.mode == "forecast")
    run_forecast(cfg);
  else if (cfg.mode == "replicate")
    run_replicate(cfg);
  else if (cfg.mode == "backtest")
    run_backtest(cfg);
  else
    throw std::invalid_argument("run_experiment: unknown mode " + cfg.mode);
}

}  // namespace mogi

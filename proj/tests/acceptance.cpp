// Acceptance gate: one pass/fail line per criterion. Run with no arguments
// for the full gate or with criterion numbers to run a subset. Replication
// counts can be overridden through MOGI_C<k>_REPS for quick smoke runs; the
// defaults are the binding ones.

#include <array>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <random>
#include <set>
#include <sstream>
#include <unsupported/Eigen/MatrixFunctions>

#include "mogi/harness.hpp"

using namespace mogi;

namespace {

using Clock = std::chrono::steady_clock;

int env_int(const char* name, int def) {
  const char* v = std::getenv(name);
  return v ? std::atoi(v) : def;
}

int env_threads() { return env_int("MOGI_ACCEPT_THREADS", 1); }

Vec round4(const Vec& v) {
  Vec out = v;
  for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = std::round(v[i] * 1e4) / 1e4;
  return out;
}

bool match4(const Vec& got, const Vec& want, const char* label, std::string& detail) {
  Vec r = round4(got);
  // rounding the target too guards against -0.0000 style representations
  if ((r - round4(want)).cwiseAbs().maxCoeff() < 1e-12) return true;
  std::ostringstream os;
  os << label << " mismatch, got (";
  for (Eigen::Index i = 0; i < r.size(); ++i) os << (i ? ", " : "") << r[i];
  os << ")";
  detail += os.str();
  return false;
}

// ---------------------------------------------------------------------------
// criterion 1: printed coefficient reproduction to 4 decimals

bool criterion1(std::string& detail) {
  bool ok = true;
  {
    StructuralParams s = replication::study_small();
    CoefficientSet cs = derive_coefficients(s, s.tau);
    ok &= match4(vech(cs.H.omega_g), replication::vec6(0.0044, 0.0022, 0.0014, 0.0070, 0.0010, 0.0067),
                 "small omega_H_g", detail);
    ok &= match4(vech(cs.L.omega_g), replication::vec6(0.0018, 0.0011, 0.0000, 0.0044, -0.0001, 0.0031),
                 "small omega_L_g", detail);
    ok &= match4(vech(cs.day.omega_g), replication::vec6(0.0039, 0.0018, 0.0008, 0.0066, 0.0002, 0.0054),
                 "small omega_g", detail);
    GarchParams g = garch_truth(s, s.tau);
    ok &= match4(vech(g.gamma_H), replication::vec6(0.4, 0.1, 0, 0.5, 0, 0.3), "small gamma_H", detail);
    ok &= match4(vech(g.gamma_L), replication::vec6(0.7, 0, 0, 0.6, 0, 0.8), "small gamma_L", detail);
    ok &= match4(vech(g.beta_H), replication::vec6(0.8, -0.1, 0.1, 0.7, -0.1, 0.6), "small beta_H", detail);
    ok &= match4(vech(g.beta_L), replication::vec6(0.2, 0, 0, 0.3, -0.1, 0.2), "small beta_L", detail);
  }
  {
    StructuralParams s = replication::study_factor();
    CoefficientSet cs = derive_coefficients(s, s.tau);
    ok &= match4(vech(cs.H.omega_g), replication::vec6(0.0089, 0, 0, 0.0045, 0, 0.0018),
                 "factor omega_H_g", detail);
    ok &= match4(vech(cs.L.omega_g), replication::vec6(0.0075, 0, 0, 0.0031, 0, 0.0018),
                 "factor omega_L_g", detail);
    ok &= match4(vech(cs.day.omega_g), replication::vec6(0.0100, 0, 0, 0.0044, 0, 0.0024),
                 "factor omega_g", detail);
  }
  return ok;
}

// ---------------------------------------------------------------------------
// criterion 2: martingale differences of both regimes center on zero

bool criterion2(std::string& detail) {
  const StructuralParams s = harness::small_design();
  const double tau = s.tau;
  const int n = 500, m = 780;
  auto panels = simulate_mogi(s, n, m, 20260823ULL);
  RealizedSeries orc = realized_from_oracle(panels);

  auto k = mogi::detail::regime_kron(s.gamma_H, s.gamma_L, s.beta_H, s.beta_L);
  const Mat nu2 = s.nu * s.nu.transpose();
  const Vec c_H = tau * (2.0 * k.sH.rho3 * k.R_H * vec(s.omega_H1) - k.sH.rho2 * vec(s.omega_H2) +
                         (k.sH.rho2 - 2.0 * k.sH.rho3) * vec(nu2));
  const Vec c_L = (1.0 - tau) * (2.0 * k.sL.rho3 * k.R_L * vec(s.omega_L1) -
                                 k.sL.rho2 * vec(s.omega_L2));

  const int h = vech_len(s.p);
  Mat dH(n, h), dL(n, h);
  for (int kk = 0; kk < n; ++kk) {
    const Vec mean_H = c_H + tau * k.vr_H * vec(panels[kk].sigma_day_start);
    const Vec mean_L = c_L + (1.0 - tau) * k.vr_L * vec(panels[kk].sigma_close);
    const Vec r = orc.r_mu(kk, s.mu, tau);
    dH.row(kk) = (vech(orc.rv[kk]) - vech(unvec(mean_H, s.p))).transpose();
    dL.row(kk) = (vech(Mat(r * r.transpose())) - vech(unvec(mean_L, s.p))).transpose();
  }

  bool ok = true;
  double worst = 0.0;
  for (const Mat* d : {&dH, &dL})
    for (int j = 0; j < h; ++j) {
      const double mean = d->col(j).mean();
      const double sd = std::sqrt((d->col(j).array() - mean).square().sum() / (n - 1));
      const double z = std::abs(mean) / (sd / std::sqrt(static_cast<double>(n)));
      worst = std::max(worst, z);
      ok &= z <= 3.0;
    }
  std::ostringstream os;
  os << "max |z| = " << worst << " over " << 2 * h << " components";
  detail += os.str();
  return ok;
}

// ---------------------------------------------------------------------------
// criterion 3: consistency trend and convergence rate of the dynamics blocks

struct C3Config {
  int n, m;
};

bool criterion3(std::string& detail) {
  const int reps = env_int("MOGI_C3_REPS", 100);
  // first three are the headline ladder; the last two fill the m = 2340
  // column so the rate in n is measured at a fixed intraday frequency
  const std::vector<C3Config> configs{{125, 390}, {250, 780}, {500, 2340}, {125, 2340}, {250, 2340}};
  const char* blocks[4] = {"gamma_H", "gamma_L", "beta_H", "beta_L"};
  const GarchParams truth = garch_truth(harness::small_design(), 6.5 / 24.0);

  std::vector<std::array<double, 4>> mean_err(configs.size(), {0, 0, 0, 0});
  for (std::size_t c = 0; c < configs.size(); ++c) {
    ExperimentConfig cfg;
    cfg.design = "small";
    cfg.n = configs[c].n;
    cfg.m = configs[c].m;
    cfg.seed = 300 + static_cast<std::uint64_t>(c);
    std::vector<std::array<double, 4>> errs(reps);
    harness::parallel_for(reps, env_threads(), [&](int rep) {
      auto panels = harness::simulate_design(cfg, cfg.n, harness::rep_seed(cfg.seed, rep));
      RealizedSeries series = harness::measure_panels(panels, cfg);
      WlseOptions opt;
      opt.extra_starts = 0;  // single stage-2 start keeps the sweep tractable
      FitResult fit = fit_wlse(series, cfg.tau, opt);
      errs[rep] = {(fit.theta.gamma_H - truth.gamma_H).norm(),
                   (fit.theta.gamma_L - truth.gamma_L).norm(),
                   (fit.theta.beta_H - truth.beta_H).norm(),
                   (fit.theta.beta_L - truth.beta_L).norm()};
    });
    for (int rep = 0; rep < reps; ++rep)
      for (int b = 0; b < 4; ++b) mean_err[c][b] += errs[rep][b] / reps;
  }

  bool ok = true;
  std::ostringstream os;
  for (int b = 0; b < 4; ++b) {
    const bool mono = mean_err[0][b] > mean_err[1][b] && mean_err[1][b] > mean_err[2][b];
    ok &= mono;
    os << blocks[b] << " (" << mean_err[0][b] << " > " << mean_err[1][b] << " > "
       << mean_err[2][b] << (mono ? ") " : ") VIOLATED ");
  }

  // log-log slope in n at m = 2340 over the block-average error
  const double ns[3] = {125, 500, 250};
  const std::size_t idx[3] = {3, 2, 4};
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < 3; ++i) {
    double e = 0;
    for (int b = 0; b < 4; ++b) e += mean_err[idx[i]][b] / 4.0;
    const double x = std::log(ns[i]), y = std::log(e);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double slope = (3 * sxy - sx * sy) / (3 * sxx - sx * sx);
  ok &= slope >= -0.75 && slope <= -0.25;
  os << "slope = " << slope;
  detail += os.str();
  return ok;
}

// ---------------------------------------------------------------------------
// criterion 4: forecast ordering against the exact conditional mean

bool criterion4(std::string& detail) {
  const int reps = env_int("MOGI_C4_REPS", 100);
  ExperimentConfig cfg;
  cfg.design = "small";
  cfg.n = 250;
  cfg.m = 780;
  cfg.seed = 400;
  std::vector<harness::ForecastErrors> rows(reps);
  harness::parallel_for(reps, env_threads(), [&](int rep) {
    rows[rep] = harness::forecast_rep(cfg, harness::rep_seed(cfg.seed, rep));
  });
  int win_mgi = 0, win_naive = 0;
  for (const auto& r : rows) {
    win_mgi += r.mogi < r.mgi;
    win_naive += r.mogi < r.naive;
  }
  const double f_mgi = static_cast<double>(win_mgi) / reps;
  const double f_naive = static_cast<double>(win_naive) / reps;
  std::ostringstream os;
  os << "win rate vs scaled-MGI " << f_mgi << ", vs naive " << f_naive << " (need >= 0.8)";
  detail += os.str();
  return f_mgi >= 0.8 && f_naive >= 0.8;
}

// ---------------------------------------------------------------------------
// criterion 5: high-dimensional factor pipeline quality and trends

bool criterion5(std::string& detail) {
  const int reps = env_int("MOGI_C5_REPS", 20);
  const C3Config scales[2] = {{125, 390}, {250, 780}};
  double cosine[2] = {0, 0}, poet[2] = {0, 0}, fore[2] = {0, 0};
  int rank_ok = 0;

  for (int s = 0; s < 2; ++s) {
    ExperimentConfig cfg;
    cfg.design = "factor";
    cfg.p = 50;
    cfg.r = 3;
    cfg.n = scales[s].n;
    cfg.m = scales[s].m;
    cfg.r_max = 10;
    cfg.seed = 500 + static_cast<std::uint64_t>(s);
    std::vector<std::vector<std::pair<std::string, double>>> rows(reps);
    harness::parallel_for(reps, env_threads(), [&](int rep) {
      rows[rep] = harness::factor_rep(cfg, harness::rep_seed(cfg.seed, rep));
    });
    for (int rep = 0; rep < reps; ++rep)
      for (const auto& [name, value] : rows[rep]) {
        if (name == "subspace_cosine") cosine[s] += value / reps;
        if (name == "rank_hat") rank_ok += value == 3.0;
        if (name == "poet_max_err") poet[s] += value / reps;
        if (name == "forecast_rel_err") fore[s] += value / reps;
      }
  }

  const double rank_frac = static_cast<double>(rank_ok) / (2 * reps);
  const bool ok = cosine[0] >= 0.95 && cosine[1] >= 0.95 && rank_frac >= 0.9 &&
                  poet[1] < poet[0] && fore[1] < fore[0];
  std::ostringstream os;
  os << "cosine " << cosine[0] << "/" << cosine[1] << ", rank rate " << rank_frac << ", poet "
     << poet[0] << " -> " << poet[1] << ", forecast " << fore[0] << " -> " << fore[1];
  detail += os.str();
  return ok;
}

// ---------------------------------------------------------------------------
// criterion 6: exact and near-exact oracles

Mat prvm_brute(const Mat& panel, int w, double phi) {
  const int p = static_cast<int>(panel.rows());
  const int m = static_cast<int>(panel.cols()) - 1;
  auto g = [](double x) { return std::min(x, 1.0 - x); };
  auto incr = [&](int i, int l) { return panel(i, l) - panel(i, l - 1); };
  Mat out = Mat::Zero(p, p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) {
      double acc = 0.0;
      for (int u = 1; u <= m - w + 1; ++u) {
        double xbar_i = 0.0, xbar_j = 0.0, xhat = 0.0;
        for (int t = 1; t <= w - 1; ++t) {
          xbar_i += g(static_cast<double>(t) / w) * incr(i, u + t);
          xbar_j += g(static_cast<double>(t) / w) * incr(j, u + t);
        }
        for (int t = 1; t <= w; ++t) {
          double dg = g(static_cast<double>(t) / w) - g(static_cast<double>(t - 1) / w);
          xhat += dg * dg * incr(i, u + t - 1) * incr(j, u + t - 1);
        }
        acc += xbar_i * xbar_j - 0.5 * xhat;
      }
      out(i, j) = acc / (w * phi);
    }
  return 0.5 * (out + out.transpose());
}

bool criterion6(std::string& detail) {
  bool ok = true;
  std::mt19937_64 rng(6006);
  std::normal_distribution<double> nd;

  // pre-averaging against the direct double loop
  for (int trial = 0; trial < 3 && ok; ++trial) {
    Mat panel(2, 13);
    for (int i = 0; i < 2; ++i) {
      panel(i, 0) = 10.0 + nd(rng);
      for (int l = 1; l <= 12; ++l) panel(i, l) = panel(i, l - 1) + 0.01 * nd(rng);
    }
    PrvmOptions opt;
    opt.window = 3;
    if ((prvm(panel, opt) - prvm_brute(panel, 3, opt.phi)).cwiseAbs().maxCoeff() >= 1e-12) {
      ok = false;
      detail += "prvm brute-force mismatch ";
    }
  }

  // series identity B rho1 = e^B - I
  for (int d : {4, 9}) {
    Mat B(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) B(i, j) = nd(rng);
    B *= 0.9 / spectral_norm(B);
    VarrhoSeries s = varrho_series(B);
    Mat gap = B * s.rho1 - (B.exp() - Mat::Identity(d, d));
    if (gap.cwiseAbs().maxCoeff() >= 1e-10) {
      ok = false;
      detail += "varrho exponential identity violated ";
    }
  }

  // long-only grid oracle at c0 = 1
  Mat A(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) A(i, j) = nd(rng);
  Mat gamma = A * A.transpose() + 0.5 * Mat::Identity(3, 3);
  const int steps = 2000;
  Vec best(3);
  double best_f = std::numeric_limits<double>::infinity();
  for (int a = 0; a <= steps; ++a)
    for (int b = 0; b <= steps - a; ++b) {
      Vec w(3);
      w << static_cast<double>(a) / steps, static_cast<double>(b) / steps,
          static_cast<double>(steps - a - b) / steps;
      const double f = w.dot(gamma * w);
      if (f < best_f) {
        best_f = f;
        best = w;
      }
    }
  if ((min_variance_l1(gamma, 1.0).w - best).cwiseAbs().maxCoeff() >= 1e-3) {
    ok = false;
    detail += "grid oracle mismatch at c0 = 1 ";
  }

  // analytic inverse-variance weights on a diagonal matrix
  Vec d3(3);
  d3 << 1.0, 2.0, 4.0;
  Vec inv = d3.cwiseInverse();
  Vec want = inv / inv.sum();
  if ((min_variance_l1(Mat(d3.asDiagonal()), 2.0).w - want).cwiseAbs().maxCoeff() >= 1e-6) {
    ok = false;
    detail += "diagonal analytic weights mismatch ";
  }
  if (ok) detail += "all oracles agree";
  return ok;
}

// ---------------------------------------------------------------------------
// criterion 7: sandwich interval coverage for gamma_H(1,1) at p = 2

StructuralParams coverage_design() {
  StructuralParams s3 = replication::study_small();
  StructuralParams s;
  s.p = 2;
  s.tau = s3.tau;
  s.omega_H1 = s3.omega_H1.topLeftCorner(2, 2);
  s.omega_H2 = s3.omega_H2.topLeftCorner(2, 2);
  s.omega_L1 = s3.omega_L1.topLeftCorner(2, 2);
  s.omega_L2 = s3.omega_L2.topLeftCorner(2, 2);
  s.gamma_H = s3.gamma_H.topLeftCorner(2, 2);
  s.gamma_L = s3.gamma_L.topLeftCorner(2, 2);
  s.beta_H = s3.beta_H.topLeftCorner(2, 2);
  s.beta_L = s3.beta_L.topLeftCorner(2, 2);
  s.nu = s3.nu.topLeftCorner(2, 2);
  s.mu = Vec::Zero(2);
  s.rho = 0.3 * Mat::Identity(2, 2);
  s.x0 = Vec::Constant(2, 10.0);
  s.sigma0 = derive_coefficients(s, s.tau).day.omega_g;
  return s;
}

bool criterion7(std::string& detail) {
  const int reps = env_int("MOGI_C7_REPS", 200);
  const StructuralParams s = coverage_design();
  const double truth = s.gamma_H(0, 0);
  const int idx = 2 * vech_len(2);  // gamma_H(1,1) position in the natural vector

  std::vector<int> covered(reps, 0);
  harness::parallel_for(reps, env_threads(), [&](int rep) {
    SimulateOptions sopt;
    sopt.fine_factor = 3;
    auto panels = simulate_mogi(s, 500, 2340, harness::rep_seed(700, rep), sopt);
    RealizedSeries series = realized_from_panels(panels, {}, false);
    WlseOptions opt;
    opt.compute_covariance = true;
    FitResult fit = fit_wlse(series, s.tau, opt);
    const double est = fit.theta.gamma_H(0, 0);
    const double se = std::sqrt(std::max(0.0, (*fit.covariance)(idx, idx)));
    covered[rep] = std::abs(est - truth) <= 1.96 * se;
  });
  double rate = 0.0;
  for (int c : covered) rate += static_cast<double>(c) / reps;
  std::ostringstream os;
  os << "coverage " << rate << " over " << reps << " reps (need [0.85, 0.99])";
  detail += os.str();
  return rate >= 0.85 && rate <= 0.99;
}

// ---------------------------------------------------------------------------
// criterion 8: backtest risk ordering on simulated factor data

bool criterion8(std::string& detail) {
  const int reps = env_int("MOGI_C8_REPS", 50);
  ExperimentConfig cfg;
  cfg.design = "factor";
  cfg.p = 50;
  cfg.r = 3;
  cfg.n = 125;
  cfg.n_out = 42;
  cfg.m = 390;
  cfg.seed = 800;
  std::vector<harness::BacktestRisks> rows(reps);
  harness::parallel_for(reps, env_threads(), [&](int rep) {
    rows[rep] = harness::backtest_rep(cfg, harness::rep_seed(cfg.seed, rep));
  });
  int wins = 0;
  for (const auto& r : rows) {
    bool all = true;
    for (std::size_t c = 0; c < cfg.c0_grid.size(); ++c) all &= r.mogi[c] <= r.poet[c];
    wins += all;
  }
  const double rate = static_cast<double>(wins) / reps;
  std::ostringstream os;
  os << "dominance rate " << rate << " over " << reps << " reps (need >= 0.7)";
  detail += os.str();
  return rate >= 0.7;
}

}  // namespace

int main(int argc, char** argv) {
  struct Entry {
    int id;
    const char* name;
    bool (*fn)(std::string&);
  };
  const Entry entries[] = {
      {1, "coefficient reproduction", criterion1}, {2, "martingale property", criterion2},
      {3, "consistency trend", criterion3},        {4, "forecast ordering", criterion4},
      {5, "high-dim pipeline", criterion5},        {6, "estimator oracles", criterion6},
      {7, "sandwich coverage", criterion7},        {8, "backtest ordering", criterion8}};

  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  bool all_ok = true;
  for (const Entry& e : entries) {
    if (!selected.empty() && !selected.count(e.id)) continue;
    std::string detail;
    const auto t0 = Clock::now();
    bool ok = false;
    try {
      ok = e.fn(detail);
    } catch (const std::exception& ex) {
      detail += std::string("exception: ") + ex.what();
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    std::printf("criterion %d (%s): %s - %s [%.1fs]\n", e.id, e.name, ok ? "PASS" : "FAIL",
                detail.c_str(), secs);
    std::fflush(stdout);
    all_ok &= ok;
  }
  return all_ok ? 0 : 1;
}

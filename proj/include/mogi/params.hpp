#pragma once

// Parameter types for the multivariate overnight GARCH-Ito model: the full
// generative set (simulation ground truth) and the estimable vector.

#include <nlohmann/json.hpp>

#include "mogi/linalg.hpp"

namespace mogi {

// Full generative parameter set. The gamma/beta matrices are stored as
// general p x p; the replication configs construct them lower-triangular
// from their vech vectors, matching the estimable parameterization.
struct StructuralParams {
  int p = 0;
  double tau = 6.5 / 24.0;
  Mat omega_H1, omega_H2, omega_L1, omega_L2;  // positive definite
  Mat gamma_H, gamma_L, beta_H, beta_L;
  Mat nu;
  Vec mu;      // drift, per-day units
  Mat rho;     // cross-correlation of the two Brownian motions
  Mat sigma0;  // initial spot volatility
  Vec x0;      // initial log price

  void validate() const {
    auto check_pd = [&](const Mat& M, const char* name) {
      if (M.rows() != p || M.cols() != p)
        throw std::invalid_argument(std::string(name) + ": dimension mismatch");
      Eigen::LLT<Mat> llt(symmetrize(M));
      if (llt.info() != Eigen::Success)
        throw std::invalid_argument(std::string(name) + ": not positive definite");
    };
    if (p <= 0) throw std::invalid_argument("StructuralParams: p must be positive");
    if (!(tau > 0.0 && tau < 1.0)) throw std::invalid_argument("StructuralParams: tau in (0,1) required");
    check_pd(omega_H1, "omega_H1");
    check_pd(omega_H2, "omega_H2");
    check_pd(omega_L1, "omega_L1");
    check_pd(omega_L2, "omega_L2");
    if (spectral_norm(kron(beta_H, beta_H)) >= 1.0)
      throw std::invalid_argument("StructuralParams: ||beta_H (x) beta_H|| must be < 1");
    if (spectral_norm(kron(beta_L, beta_L)) >= 1.0)
      throw std::invalid_argument("StructuralParams: ||beta_L (x) beta_L|| must be < 1");
    if (rho.size() > 0 && rho.cwiseAbs().maxCoeff() > 1.0)
      throw std::invalid_argument("StructuralParams: rho entries must lie in [-1,1]");
  }
};

// Estimable parameter vector theta of the weighted least squares fit:
// intercepts are free positive definite matrices, gamma/beta are lower
// triangular with positive (1,1) entries.
struct GarchParams {
  int p = 0;
  Mat omega_H_g, omega_L_g;  // positive definite intercepts
  Mat gamma_H, gamma_L, beta_H, beta_L;  // lower triangular
  Vec mu;

  static GarchParams from_vech(int p, const Vec& w_H, const Vec& w_L, const Vec& g_H,
                               const Vec& g_L, const Vec& b_H, const Vec& b_L, const Vec& mu) {
    GarchParams out;
    out.p = p;
    out.omega_H_g = unvech(w_H, p);
    out.omega_L_g = unvech(w_L, p);
    out.gamma_H = unvech_lower(g_H, p);
    out.gamma_L = unvech_lower(g_L, p);
    out.beta_H = unvech_lower(b_H, p);
    out.beta_L = unvech_lower(b_L, p);
    out.mu = mu;
    return out;
  }

  bool stable() const {
    return spectral_norm(gamma_H) < 1.0 && spectral_norm(gamma_L) < 1.0 &&
           spectral_norm(beta_H) < 1.0 && spectral_norm(beta_L) < 1.0;
  }
};

inline nlohmann::json to_json(const GarchParams& g) {
  auto vv = [](const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
  return nlohmann::json{{"p", g.p},
                        {"vech_omega_H_g", vv(vech(g.omega_H_g))},
                        {"vech_omega_L_g", vv(vech(g.omega_L_g))},
                        {"vech_gamma_H", vv(vech(g.gamma_H))},
                        {"vech_gamma_L", vv(vech(g.gamma_L))},
                        {"vech_beta_H", vv(vech(g.beta_H))},
                        {"vech_beta_L", vv(vech(g.beta_L))},
                        {"mu", vv(g.mu)}};
}

inline GarchParams garch_params_from_json(const nlohmann::json& j) {
  auto gv = [&](const char* key) {
    auto v = j.at(key).get<std::vector<double>>();
    return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size())).eval();
  };
  const int p = j.at("p").get<int>();
  return GarchParams::from_vech(p, gv("vech_omega_H_g"), gv("vech_omega_L_g"),
                                gv("vech_gamma_H"), gv("vech_gamma_L"), gv("vech_beta_H"),
                                gv("vech_beta_L"), gv("mu"));
}

}  // namespace mogi

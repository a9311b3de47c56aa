#pragma once

#include <vector>

#include <Eigen/Core>

#include "semibvm/dataset.hpp"
#include "semibvm/samplers.hpp"

namespace semibvm {

inline constexpr Eigen::Index kMinSummaryDraws = 100;

struct PosteriorSummary {
  Eigen::VectorXd median;
  std::vector<double> levels;
  /// quantiles(s, k) is the levels[k]-th marginal posterior quantile of theta_s.
  Eigen::MatrixXd quantiles;
  Eigen::MatrixXd ci95; // p x 2: 2.5% and 97.5% quantiles
  /// Quantile-based reconstruction of the efficient asymptotic variance.
  Eigen::MatrixXd vhat;
  /// sqrt(vhat_ss / n).
  Eigen::VectorXd se;
  /// Set when some vhat diagonal entry is not strictly positive.
  bool degenerate = false;

  double quantile(Eigen::Index s, double level) const;
};

/// Marginal quantiles (type-7 interpolation), 95% intervals and the
/// quantile-based variance estimate
///   vhat_ss  = [sqrt(n) (q_{1-alpha/2} - q_{alpha/2}) / (2 z_{1-alpha/2})]^2,
///   vhat_ss' = (W(theta_s + theta_s') - vhat_ss - vhat_s's') / 2,
/// where W(.) is the same width-based variance applied to the sum.
PosteriorSummary summarize(const McmcTrace &trace, const std::vector<double> &levels,
                           double vhat_alpha = 0.05);

/// Same, from raw draws (rows = draws) and a sample size n.
PosteriorSummary summarize_draws(const Eigen::MatrixXd &draws, Eigen::Index n_obs,
                                 const std::vector<double> &levels,
                                 double vhat_alpha = 0.05);

enum class OracleSource { AnalyticPLM, AnalyticGPLMLogistic };

struct OracleQuantities {
  Eigen::VectorXd theta0;
  Eigen::MatrixXd efficient_info; // per-observation efficient information
  Eigen::VectorXd delta_n;
  OracleSource source = OracleSource::AnalyticPLM;
};

/// Efficient information (1/n) sum (U_i - E[U|V_i])^{x2} / sigma^2 and
/// Delta_n = n^{-1/2} sum I^{-1} w_i (U_i - E[U|V_i]) / sigma^2 with
/// w_i = Y_i - theta0^T U_i - eta0(V_i). sigma defaults to the dataset's
/// ground-truth noise sd.
OracleQuantities oracle_plm(const Dataset &data);
OracleQuantities oracle_plm(const Dataset &data, double noise_sd);

/// Logistic analogue: I = (1/n) sum f0(T_i) (U_i + h*(V_i))^{x2},
/// Delta_n = n^{-1/2} sum I^{-1} W_i (U_i + h*(V_i)), W_i = Y_i - F(g0(T_i)).
/// `h_star` holds h*(V_i) row-wise.
OracleQuantities oracle_gplm_logistic(const Dataset &data, const Eigen::MatrixXd &h_star);

/// Per-coordinate KS distance between the theta_s draws and
/// N(theta0_s + Delta_{n,s}/sqrt(n), (I^{-1})_{ss} / n).
Eigen::VectorXd bvm_distance(const McmcTrace &trace, const OracleQuantities &oracle);
Eigen::VectorXd bvm_distance(const Eigen::MatrixXd &draws, Eigen::Index n_obs,
                             const OracleQuantities &oracle);

} // namespace semibvm

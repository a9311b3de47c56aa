#include "semibvm/summaries.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "semibvm/error.hpp"
#include "semibvm/stats.hpp"

namespace semibvm {

double PosteriorSummary::quantile(Eigen::Index s, double level) const {
  for (std::size_t k = 0; k < levels.size(); ++k) {
    if (std::abs(levels[k] - level) < 1e-12) {
      return quantiles(s, static_cast<Eigen::Index>(k));
    }
  }
  fail(ErrorKind::InvalidInput, "quantile level was not requested in the summary");
}

namespace {

std::vector<double> sorted_column(const Eigen::VectorXd &col) {
  std::vector<double> v(col.data(), col.data() + col.size());
  std::sort(v.begin(), v.end());
  return v;
}

double width_variance(const std::vector<double> &sorted, double n, double alpha) {
  const double z = stats::normal_quantile(1.0 - alpha / 2.0);
  const double width =
      stats::quantile_sorted(sorted, 1.0 - alpha / 2.0) - stats::quantile_sorted(sorted, alpha / 2.0);
  const double root = std::sqrt(n) * width / (2.0 * z);
  return root * root;
}

} // namespace

PosteriorSummary summarize_draws(const Eigen::MatrixXd &draws, Eigen::Index n_obs,
                                 const std::vector<double> &levels, double vhat_alpha) {
  if (draws.rows() < kMinSummaryDraws) {
    fail(ErrorKind::InvalidInput, "need at least " + std::to_string(kMinSummaryDraws) +
                                      " kept draws for reliable quantiles, got " +
                                      std::to_string(draws.rows()));
  }
  if (n_obs < 1) {
    fail(ErrorKind::InvalidInput, "sample size must be positive");
  }
  for (double level : levels) {
    if (!(level > 0.0 && level < 1.0)) {
      fail(ErrorKind::InvalidInput, "quantile levels must lie in (0,1)");
    }
  }
  if (!(vhat_alpha > 0.0 && vhat_alpha < 1.0)) {
    fail(ErrorKind::InvalidInput, "variance reconstruction level must lie in (0,1)");
  }
  if (!draws.allFinite()) {
    fail(ErrorKind::InvalidInput, "draws contain non-finite values");
  }

  const Eigen::Index p = draws.cols();
  const double n = static_cast<double>(n_obs);
  PosteriorSummary out;
  out.levels = levels;
  std::sort(out.levels.begin(), out.levels.end());
  out.median.resize(p);
  out.quantiles.resize(p, static_cast<Eigen::Index>(out.levels.size()));
  out.ci95.resize(p, 2);
  out.vhat.resize(p, p);
  out.se.resize(p);

  std::vector<std::vector<double>> sorted(static_cast<std::size_t>(p));
  for (Eigen::Index s = 0; s < p; ++s) {
    auto &col = sorted[static_cast<std::size_t>(s)];
    col = sorted_column(draws.col(s));
    out.median[s] = stats::quantile_sorted(col, 0.5);
    for (std::size_t k = 0; k < out.levels.size(); ++k) {
      out.quantiles(s, static_cast<Eigen::Index>(k)) = stats::quantile_sorted(col, out.levels[k]);
    }
    out.ci95(s, 0) = stats::quantile_sorted(col, 0.025);
    out.ci95(s, 1) = stats::quantile_sorted(col, 0.975);
    out.vhat(s, s) = width_variance(col, n, vhat_alpha);
  }
  for (Eigen::Index s = 0; s < p; ++s) {
    for (Eigen::Index t = s + 1; t < p; ++t) {
      const auto pair_sum = sorted_column(draws.col(s) + draws.col(t));
      const double v = 0.5 * (width_variance(pair_sum, n, vhat_alpha) - out.vhat(s, s) -
                              out.vhat(t, t));
      out.vhat(s, t) = v;
      out.vhat(t, s) = v;
    }
  }
  for (Eigen::Index s = 0; s < p; ++s) {
    out.degenerate = out.degenerate || !(out.vhat(s, s) > 0.0);
    out.se[s] = std::sqrt(std::max(out.vhat(s, s), 0.0) / n);
  }
  return out;
}

PosteriorSummary summarize(const McmcTrace &trace, const std::vector<double> &levels,
                           double vhat_alpha) {
  return summarize_draws(trace.theta, trace.n_obs, levels, vhat_alpha);
}

namespace {

OracleQuantities finish_oracle(Eigen::MatrixXd info, const Eigen::MatrixXd &score_terms,
                               Eigen::VectorXd theta0, OracleSource source) {
  // score_terms: n x p rows of the per-observation efficient score.
  info = 0.5 * (info + info.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(info);
  if (!(eig.eigenvalues().minCoeff() >= 1e-10)) {
    fail(ErrorKind::DegenerateDesign, "efficient information matrix is singular");
  }
  const double n = static_cast<double>(score_terms.rows());
  OracleQuantities out;
  out.theta0 = std::move(theta0);
  out.delta_n = info.llt().solve(score_terms.colwise().sum().transpose()) / std::sqrt(n);
  out.efficient_info = std::move(info);
  out.source = source;
  return out;
}

const GroundTruth &require_truth(const Dataset &data) {
  if (!data.truth) {
    fail(ErrorKind::InvalidInput, "oracle quantities need ground truth");
  }
  return *data.truth;
}

} // namespace

OracleQuantities oracle_plm(const Dataset &data) {
  return oracle_plm(data, require_truth(data).noise_sd);
}

OracleQuantities oracle_plm(const Dataset &data, double noise_sd) {
  data.validate();
  const GroundTruth &truth = require_truth(data);
  if (!(noise_sd > 0.0)) {
    fail(ErrorKind::InvalidInput, "oracle noise sd must be positive");
  }
  if (!truth.cond_mean_u || truth.theta0.size() != data.p() ||
      truth.eta0_at_design.size() != data.n()) {
    fail(ErrorKind::InvalidInput, "ground truth is incomplete for the PLM oracle");
  }
  const Eigen::Index n = data.n();
  const Eigen::Index p = data.p();
  const double var = noise_sd * noise_sd;
  Eigen::MatrixXd centred(n, p);
  Eigen::MatrixXd score(n, p);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::VectorXd m = truth.cond_mean_u(data.v.row(i).transpose());
    centred.row(i) = data.u.row(i) - m.transpose();
    const double w = data.y[i] - data.u.row(i).dot(truth.theta0) - truth.eta0_at_design[i];
    score.row(i) = w * centred.row(i) / var;
  }
  Eigen::MatrixXd info = centred.transpose() * centred / (static_cast<double>(n) * var);
  return finish_oracle(std::move(info), score, truth.theta0, OracleSource::AnalyticPLM);
}

OracleQuantities oracle_gplm_logistic(const Dataset &data, const Eigen::MatrixXd &h_star) {
  data.validate();
  const GroundTruth &truth = require_truth(data);
  if (h_star.rows() != data.n() || h_star.cols() != data.p()) {
    fail(ErrorKind::InvalidInput, "least favorable direction has the wrong shape");
  }
  const Eigen::Index n = data.n();
  const Eigen::Index p = data.p();
  Eigen::MatrixXd info = Eigen::MatrixXd::Zero(p, p);
  Eigen::MatrixXd score(n, p);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double g = data.u.row(i).dot(truth.theta0) + truth.eta0_at_design[i];
    const double prob = 1.0 / (1.0 + std::exp(-g));
    const double f = prob * (1.0 - prob);
    const Eigen::RowVectorXd direction = data.u.row(i) + h_star.row(i);
    info += f * direction.transpose() * direction;
    score.row(i) = (data.y[i] - prob) * direction;
  }
  info /= static_cast<double>(n);
  return finish_oracle(std::move(info), score, truth.theta0,
                       OracleSource::AnalyticGPLMLogistic);
}

Eigen::VectorXd bvm_distance(const Eigen::MatrixXd &draws, Eigen::Index n_obs,
                             const OracleQuantities &oracle) {
  const Eigen::Index p = draws.cols();
  if (oracle.theta0.size() != p || oracle.delta_n.size() != p ||
      oracle.efficient_info.rows() != p) {
    fail(ErrorKind::InvalidInput, "trace and oracle disagree in dimension");
  }
  if (draws.rows() < 1 || n_obs < 1) {
    fail(ErrorKind::InvalidInput, "BvM distance needs draws and a positive sample size");
  }
  const double n = static_cast<double>(n_obs);
  const Eigen::MatrixXd inverse =
      oracle.efficient_info.llt().solve(Eigen::MatrixXd::Identity(p, p));
  Eigen::VectorXd ks(p);
  for (Eigen::Index s = 0; s < p; ++s) {
    const double centre = oracle.theta0[s] + oracle.delta_n[s] / std::sqrt(n);
    const double sd = std::sqrt(inverse(s, s) / n);
    std::vector<double> col(draws.col(s).data(), draws.col(s).data() + draws.rows());
    ks[s] = stats::ks_statistic(std::move(col), [&](double x) {
      return stats::normal_cdf((x - centre) / sd);
    });
  }
  return ks;
}

Eigen::VectorXd bvm_distance(const McmcTrace &trace, const OracleQuantities &oracle) {
  return bvm_distance(trace.theta, trace.n_obs, oracle);
}

} // namespace semibvm

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>

#include <Eigen/Core>

#include "semibvm/dataset.hpp"
#include "semibvm/priors.hpp"
#include "semibvm/rng.hpp"

namespace semibvm {

struct McmcConfig {
  int iterations = 10000;
  int burn_in = 5000;
  /// Random-walk scale of the log inverse-bandwidth proposal.
  double rw_sd_log_a = 0.3;
  std::uint64_t seed = 0;
  /// Optional starting values; default theta = 0, a = n^{1/(4+d)}.
  std::optional<Eigen::VectorXd> initial_theta;
  std::optional<double> initial_a;
  /// Keep per-iteration nuisance draws (needed for eta summaries).
  bool store_eta = true;

  void validate() const;
  int kept() const { return iterations - burn_in; }
};

/// Post-burn-in draws. Row k of every matrix is the same iteration.
struct McmcTrace {
  Eigen::MatrixXd theta;         // kept x p
  Eigen::MatrixXd eta_at_design; // kept x n (empty when not stored)
  Eigen::VectorXd a;             // kept
  Eigen::VectorXd noise_sd;      // kept
  double accept_rate_a = 0.0;
  double accept_rate_theta = 1.0;
  Eigen::Index n_obs = 0;

  Eigen::Index draws() const { return theta.rows(); }
  Eigen::Index p() const { return theta.cols(); }
  /// Posterior mean of eta at the design points.
  Eigen::VectorXd eta_mean() const;
};

/// Effective covariate: U for independent priors, U + h_n(V) for dependent.
Eigen::MatrixXd effective_covariate(const Dataset &data, const PriorSpec &prior);

/// Closed-form Gaussian posterior of theta at a fixed inverse bandwidth with
/// the GP nuisance integrated out.
struct ConjugateThetaPosterior {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
};
ConjugateThetaPosterior conjugate_theta_posterior(const Dataset &data,
                                                  const PriorSpec &prior, double a);

/// Blocked Gibbs sampler for the Gaussian partially linear model. Each sweep:
/// Metropolis on log a against p(Y | theta, a) with the nuisance integrated
/// out (adaptive priors only), theta | a, Y from its Gaussian conditional,
/// then the nuisance at the design points | theta, a, Y.
McmcTrace fit_plm(const Dataset &data, const PriorSpec &prior, const McmcConfig &mcmc);

/// Metropolis-within-Gibbs for the partially linear logistic model:
/// elliptical slice on the latent GP, adaptive random walk on theta (frozen
/// after burn-in), whitened Metropolis on a.
McmcTrace fit_gplm_logistic(const Dataset &data, const PriorSpec &prior,
                            const McmcConfig &mcmc);

/// Bernoulli log-likelihood with logits `eta`.
double logistic_loglik(const Eigen::VectorXd &y, const Eigen::VectorXd &eta);

/// One elliptical slice sampling update of `current` ~ N(0, L L^T) times
/// exp(loglik). `current_loglik` is updated in place.
Eigen::VectorXd elliptical_slice(const Eigen::VectorXd &current,
                                 const Eigen::MatrixXd &prior_lower,
                                 const std::function<double(const Eigen::VectorXd &)> &loglik,
                                 double &current_loglik, Rng &rng);

/// One row per kept draw: theta coordinates, a, then the first `eta_columns`
/// nuisance values.
void write_trace_csv(const McmcTrace &trace, std::ostream &out, int eta_columns = 10);

} // namespace semibvm

#include "semibvm/samplers.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>

#include <Eigen/Cholesky>

#include "semibvm/error.hpp"
#include "semibvm/kernels.hpp"

namespace semibvm {

void McmcConfig::validate() const {
  if (iterations < 1) {
    fail(ErrorKind::InvalidInput, "iterations must be positive");
  }
  if (burn_in < 0 || burn_in >= iterations) {
    fail(ErrorKind::InvalidInput, "burn-in must satisfy 0 <= burn_in < iterations");
  }
  if (!(rw_sd_log_a > 0.0)) {
    fail(ErrorKind::InvalidInput, "random-walk scale on log a must be positive");
  }
  if (initial_a && !(*initial_a > 0.0)) {
    fail(ErrorKind::InvalidInput, "initial inverse bandwidth must be positive");
  }
}

Eigen::VectorXd McmcTrace::eta_mean() const {
  if (eta_at_design.rows() == 0) {
    fail(ErrorKind::ContractViolation, "trace does not hold nuisance draws");
  }
  return eta_at_design.colwise().mean().transpose();
}

Eigen::MatrixXd effective_covariate(const Dataset &data, const PriorSpec &prior) {
  if (const auto *dep = std::get_if<DependentStructure>(&prior.structure)) {
    return data.u + dep->lfd.at_design;
  }
  return data.u;
}

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

Eigen::MatrixXd squared_distances(const Eigen::MatrixXd &v) {
  const Eigen::Index n = v.rows();
  Eigen::MatrixXd d2(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      d2(i, j) = (v.row(i) - v.row(j)).squaredNorm();
    }
  }
  return d2;
}

Eigen::MatrixXd kernel_from_distances(const Eigen::MatrixXd &d2, double a) {
  return (-(a * a) * d2.array()).exp().matrix();
}

/// Everything that depends on (a, sigma) in the nuisance-marginal likelihood
/// N(Y; X theta, K_a + sigma^2 I).
struct MarginalState {
  double a = 0.0;
  double noise_var = 0.0;
  Eigen::MatrixXd kernel;
  Eigen::LLT<Eigen::MatrixXd> sigma_llt;
  double log_det = 0.0;
  Eigen::MatrixXd whitened_x; // L^{-1} X
  Eigen::VectorXd whitened_y; // L^{-1} Y
  std::optional<GramMatrix> kernel_factor;

  double loglik(const Eigen::VectorXd &theta) const {
    const double n = static_cast<double>(whitened_y.size());
    const double quad = (whitened_y - whitened_x * theta).squaredNorm();
    return -0.5 * (n * kLog2Pi + log_det + quad);
  }
};

MarginalState build_marginal(const Eigen::MatrixXd &d2, const Eigen::MatrixXd &x,
                             const Eigen::VectorXd &y, double a, double noise_var) {
  MarginalState s;
  s.a = a;
  s.noise_var = noise_var;
  s.kernel = kernel_from_distances(d2, a);
  Eigen::MatrixXd sigma = s.kernel;
  sigma.diagonal().array() += noise_var + kDefaultJitter;
  s.sigma_llt.compute(sigma);
  if (s.sigma_llt.info() != Eigen::Success) {
    fail(ErrorKind::Numerical, "Cholesky of K_a + sigma^2 I failed at a = " +
                                   std::to_string(a));
  }
  const auto lower = s.sigma_llt.matrixL();
  s.log_det = 2.0 * s.sigma_llt.matrixLLT().diagonal().array().log().sum();
  s.whitened_x = lower.solve(x);
  s.whitened_y = lower.solve(y);
  return s;
}

const GramMatrix &kernel_factor(MarginalState &s) {
  if (!s.kernel_factor) {
    s.kernel_factor = factorize_covariance(s.kernel);
  }
  return *s.kernel_factor;
}

Eigen::VectorXd draw_theta(const MarginalState &s, double precision, Rng &rng) {
  const Eigen::Index p = s.whitened_x.cols();
  Eigen::MatrixXd post_precision = s.whitened_x.transpose() * s.whitened_x;
  post_precision.diagonal().array() += precision;
  Eigen::LLT<Eigen::MatrixXd> llt(post_precision);
  if (llt.info() != Eigen::Success) {
    fail(ErrorKind::Numerical, "theta posterior precision is not positive definite");
  }
  const Eigen::VectorXd mean = llt.solve(s.whitened_x.transpose() * s.whitened_y);
  const Eigen::VectorXd z = rng.normal_vector(p);
  return mean + llt.matrixU().solve(z);
}

/// xi | theta, a, Y via Matheron's rule: prior draw corrected by the
/// posterior update applied to a simulated residual.
Eigen::VectorXd draw_nuisance(MarginalState &s, const Eigen::VectorXd &residual,
                              Rng &rng) {
  const GramMatrix &factor = kernel_factor(s);
  const Eigen::Index n = residual.size();
  const Eigen::VectorXd prior_draw =
      factor.lower().triangularView<Eigen::Lower>() * rng.normal_vector(n);
  const Eigen::VectorXd noise = std::sqrt(s.noise_var) * rng.normal_vector(n);
  const Eigen::VectorXd gap = residual - prior_draw - noise;
  // K Sigma^{-1} = I - (sigma^2 + jitter) Sigma^{-1}.
  const Eigen::VectorXd solved = s.sigma_llt.solve(gap);
  return prior_draw + gap - (s.noise_var + kDefaultJitter) * solved;
}

double initial_bandwidth(const PriorSpec &prior, const McmcConfig &mcmc, Eigen::Index n,
                         Eigen::Index d) {
  if (const auto *fixed = std::get_if<FixedBandwidth>(&prior.bandwidth)) {
    return fixed->a;
  }
  double a = mcmc.initial_a ? *mcmc.initial_a
                            : bandwidth_nonadaptive(static_cast<double>(n), 2.0,
                                                    static_cast<int>(d));
  const double t0 = std::get<AdaptiveBandwidth>(prior.bandwidth).t0;
  if (a < t0) {
    a = t0 * 1.01;
  }
  return a;
}

Eigen::VectorXd initial_theta(const McmcConfig &mcmc, Eigen::Index p) {
  if (mcmc.initial_theta) {
    if (mcmc.initial_theta->size() != p) {
      fail(ErrorKind::InvalidInput, "initial theta has the wrong length");
    }
    return *mcmc.initial_theta;
  }
  return Eigen::VectorXd::Zero(p);
}

McmcTrace allocate_trace(const McmcConfig &mcmc, Eigen::Index n, Eigen::Index p) {
  McmcTrace trace;
  const int kept = mcmc.kept();
  trace.theta.resize(kept, p);
  if (mcmc.store_eta) {
    trace.eta_at_design.resize(kept, n);
  }
  trace.a.resize(kept);
  trace.noise_sd.resize(kept);
  trace.n_obs = n;
  return trace;
}

void check_finite(double value, int iteration, const char *what) {
  if (!std::isfinite(value)) {
    fail(ErrorKind::Numerical, std::string("non-finite ") + what + " at iteration " +
                                   std::to_string(iteration));
  }
}

} // namespace

ConjugateThetaPosterior conjugate_theta_posterior(const Dataset &data,
                                                  const PriorSpec &prior, double a) {
  data.validate();
  prior.validate(data.n(), data.p());
  const Eigen::MatrixXd x = effective_covariate(data, prior);
  const MarginalState s = build_marginal(squared_distances(data.v), x, data.y, a,
                                         prior.noise_sd * prior.noise_sd);
  Eigen::MatrixXd precision = s.whitened_x.transpose() * s.whitened_x;
  precision.diagonal().array() += prior.theta_precision;
  Eigen::LLT<Eigen::MatrixXd> llt(precision);
  ConjugateThetaPosterior post;
  post.covariance = llt.solve(Eigen::MatrixXd::Identity(x.cols(), x.cols()));
  post.mean = llt.solve(s.whitened_x.transpose() * s.whitened_y);
  return post;
}

McmcTrace fit_plm(const Dataset &data, const PriorSpec &prior, const McmcConfig &mcmc) {
  data.validate();
  prior.validate(data.n(), data.p());
  mcmc.validate();

  const Eigen::Index n = data.n();
  const Eigen::Index p = data.p();
  const int d = static_cast<int>(data.d());
  const Eigen::MatrixXd x = effective_covariate(data, prior);
  const Eigen::MatrixXd d2 = squared_distances(data.v);
  const bool adaptive = prior.is_adaptive();
  Rng rng(mcmc.seed);

  double noise_var = prior.noise_sd * prior.noise_sd;
  Eigen::VectorXd theta = initial_theta(mcmc, p);
  MarginalState state =
      build_marginal(d2, x, data.y, initial_bandwidth(prior, mcmc, n, data.d()), noise_var);
  double log_prior_a = adaptive ? log_prior_inverse_bandwidth(state.a, prior, d) : 0.0;

  McmcTrace trace = allocate_trace(mcmc, n, p);
  long accepted = 0;
  long proposed = 0;

  for (int it = 0; it < mcmc.iterations; ++it) {
    if (adaptive) {
      const double proposal = state.a * std::exp(mcmc.rw_sd_log_a * rng.normal());
      const double log_prior_prop = log_prior_inverse_bandwidth(proposal, prior, d);
      const double u = rng.uniform();
      ++proposed;
      if (std::isfinite(log_prior_prop)) {
        MarginalState candidate = build_marginal(d2, x, data.y, proposal, noise_var);
        const double current = state.loglik(theta) + log_prior_a + std::log(state.a);
        const double next = candidate.loglik(theta) + log_prior_prop + std::log(proposal);
        check_finite(next, it, "marginal likelihood");
        if (std::log(u) < next - current) {
          state = std::move(candidate);
          log_prior_a = log_prior_prop;
          ++accepted;
        }
      }
    }

    theta = draw_theta(state, prior.theta_precision, rng);

    const Eigen::VectorXd residual = data.y - x * theta;
    const Eigen::VectorXd xi = draw_nuisance(state, residual, rng);
    check_finite(xi.sum(), it, "nuisance draw");

    if (prior.noise_prior) {
      const double shape = prior.noise_prior->shape + 0.5 * static_cast<double>(n);
      const double scale =
          prior.noise_prior->scale + 0.5 * (residual - xi).squaredNorm();
      std::gamma_distribution<double> gamma(shape, 1.0 / scale);
      noise_var = 1.0 / gamma(rng.engine());
      state = build_marginal(d2, x, data.y, state.a, noise_var);
    }

    if (it >= mcmc.burn_in) {
      const int row = it - mcmc.burn_in;
      trace.theta.row(row) = theta.transpose();
      trace.a[row] = state.a;
      trace.noise_sd[row] = std::sqrt(noise_var);
      if (mcmc.store_eta) {
        Eigen::VectorXd eta = xi;
        if (prior.is_dependent()) {
          eta += prior_mean_shift(theta, prior);
        }
        trace.eta_at_design.row(row) = eta.transpose();
      }
    }
  }
  trace.accept_rate_a =
      proposed > 0 ? static_cast<double>(accepted) / static_cast<double>(proposed) : 0.0;
  return trace;
}

double logistic_loglik(const Eigen::VectorXd &y, const Eigen::VectorXd &eta) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double e = eta[i];
    // log(1 + exp(e)) without overflow.
    const double softplus = e > 0.0 ? e + std::log1p(std::exp(-e)) : std::log1p(std::exp(e));
    total += y[i] * e - softplus;
  }
  return total;
}

Eigen::VectorXd elliptical_slice(const Eigen::VectorXd &current,
                                 const Eigen::MatrixXd &prior_lower,
                                 const std::function<double(const Eigen::VectorXd &)> &loglik,
                                 double &current_loglik, Rng &rng) {
  const Eigen::VectorXd nu =
      prior_lower.triangularView<Eigen::Lower>() * rng.normal_vector(current.size());
  const double threshold = current_loglik + std::log(rng.uniform());
  double angle = 2.0 * std::numbers::pi * rng.uniform();
  double lo = angle - 2.0 * std::numbers::pi;
  double hi = angle;
  for (int guard = 0; guard < 10000; ++guard) {
    Eigen::VectorXd proposal = current * std::cos(angle) + nu * std::sin(angle);
    const double ll = loglik(proposal);
    if (ll > threshold) {
      current_loglik = ll;
      return proposal;
    }
    if (angle < 0.0) {
      lo = angle;
    } else {
      hi = angle;
    }
    angle = lo + (hi - lo) * rng.uniform();
  }
  fail(ErrorKind::Numerical, "elliptical slice sampler failed to shrink onto a point");
}

McmcTrace fit_gplm_logistic(const Dataset &data, const PriorSpec &prior,
                            const McmcConfig &mcmc) {
  data.validate();
  prior.validate(data.n(), data.p());
  mcmc.validate();
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    if (data.y[i] != 0.0 && data.y[i] != 1.0) {
      fail(ErrorKind::InvalidInput, "logistic responses must be 0 or 1");
    }
  }

  const Eigen::Index n = data.n();
  const Eigen::Index p = data.p();
  const int d = static_cast<int>(data.d());
  const Eigen::MatrixXd x = effective_covariate(data, prior);
  const bool adaptive = prior.is_adaptive();
  Rng rng(mcmc.seed);

  Eigen::VectorXd theta = initial_theta(mcmc, p);
  Eigen::VectorXd xi = Eigen::VectorXd::Zero(n);
  double a = initial_bandwidth(prior, mcmc, n, data.d());
  GramMatrix factor = gram(data.v, KernelConfig{a});
  double log_prior_a = adaptive ? log_prior_inverse_bandwidth(a, prior, d) : 0.0;

  Eigen::VectorXd linear = x * theta;
  double loglik = logistic_loglik(data.y, linear + xi);
  double theta_step = 0.1;
  long window_accepts = 0;
  long window_size = 0;
  long theta_accepts = 0;
  long theta_kept = 0;
  long a_accepts = 0;
  long a_proposed = 0;

  McmcTrace trace = allocate_trace(mcmc, n, p);

  for (int it = 0; it < mcmc.iterations; ++it) {
    // (1) latent GP values.
    auto xi_loglik = [&](const Eigen::VectorXd &candidate) {
      return logistic_loglik(data.y, linear + candidate);
    };
    xi = elliptical_slice(xi, factor.lower(), xi_loglik, loglik, rng);

    // (2) theta, isotropic random walk.
    {
      const Eigen::VectorXd proposal = theta + theta_step * rng.normal_vector(p);
      const Eigen::VectorXd proposal_linear = x * proposal;
      const double proposal_ll = logistic_loglik(data.y, proposal_linear + xi);
      const double log_ratio = proposal_ll + log_prior_theta(proposal, prior) - loglik -
                               log_prior_theta(theta, prior);
      const bool accept = std::log(rng.uniform()) < log_ratio;
      if (accept) {
        theta = proposal;
        linear = proposal_linear;
        loglik = proposal_ll;
      }
      if (it < mcmc.burn_in) {
        window_accepts += accept ? 1 : 0;
        if (++window_size == 50) {
          const double rate = static_cast<double>(window_accepts) / 50.0;
          if (rate < 0.25) {
            theta_step *= 0.8;
          } else if (rate > 0.40) {
            theta_step *= 1.25;
          }
          window_accepts = 0;
          window_size = 0;
        }
      } else {
        theta_accepts += accept ? 1 : 0;
        ++theta_kept;
      }
    }

    // (3) whitened bandwidth move: xi' = L_{a'} L_a^{-1} xi.
    if (adaptive) {
      const double proposal = a * std::exp(mcmc.rw_sd_log_a * rng.normal());
      const double log_prior_prop = log_prior_inverse_bandwidth(proposal, prior, d);
      const double u = rng.uniform();
      ++a_proposed;
      if (std::isfinite(log_prior_prop)) {
        GramMatrix candidate = gram(data.v, KernelConfig{proposal});
        const Eigen::VectorXd white =
            factor.lower().triangularView<Eigen::Lower>().solve(xi);
        const Eigen::VectorXd moved =
            candidate.lower().triangularView<Eigen::Lower>() * white;
        const double moved_ll = logistic_loglik(data.y, linear + moved);
        const double log_ratio = moved_ll - loglik + log_prior_prop - log_prior_a +
                                 std::log(proposal) - std::log(a);
        if (std::log(u) < log_ratio) {
          a = proposal;
          factor = std::move(candidate);
          xi = moved;
          loglik = moved_ll;
          log_prior_a = log_prior_prop;
          ++a_accepts;
        }
      }
    }
    check_finite(loglik, it, "logistic likelihood");

    if (it >= mcmc.burn_in) {
      const int row = it - mcmc.burn_in;
      trace.theta.row(row) = theta.transpose();
      trace.a[row] = a;
      trace.noise_sd[row] = 1.0;
      if (mcmc.store_eta) {
        Eigen::VectorXd eta = xi;
        if (prior.is_dependent()) {
          eta += prior_mean_shift(theta, prior);
        }
        trace.eta_at_design.row(row) = eta.transpose();
      }
    }
  }
  trace.accept_rate_a =
      a_proposed > 0 ? static_cast<double>(a_accepts) / static_cast<double>(a_proposed) : 0.0;
  trace.accept_rate_theta =
      theta_kept > 0 ? static_cast<double>(theta_accepts) / static_cast<double>(theta_kept)
                     : 0.0;
  return trace;
}

void write_trace_csv(const McmcTrace &trace, std::ostream &out, int eta_columns) {
  const Eigen::Index eta_cols =
      std::min<Eigen::Index>(eta_columns, trace.eta_at_design.cols());
  for (Eigen::Index s = 0; s < trace.p(); ++s) {
    out << (s == 0 ? "" : ",") << "theta" << s + 1;
  }
  out << ",a";
  for (Eigen::Index i = 0; i < eta_cols; ++i) {
    out << ",eta" << i + 1;
  }
  out << '\n' << std::setprecision(10);
  for (Eigen::Index k = 0; k < trace.draws(); ++k) {
    for (Eigen::Index s = 0; s < trace.p(); ++s) {
      out << (s == 0 ? "" : ",") << trace.theta(k, s);
    }
    out << ',' << trace.a[k];
    for (Eigen::Index i = 0; i < eta_cols; ++i) {
      out << ',' << trace.eta_at_design(k, i);
    }
    out << '\n';
  }
}

} // namespace semibvm

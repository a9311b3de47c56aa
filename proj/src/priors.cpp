#include "semibvm/priors.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/special_functions/gamma.hpp>

#include "semibvm/error.hpp"

namespace semibvm {

void PriorSpec::validate(Eigen::Index rows, Eigen::Index p) const {
  if (!(theta_precision > 0.0)) {
    fail(ErrorKind::InvalidInput, "theta prior precision must be positive");
  }
  if (!(noise_sd > 0.0) || !std::isfinite(noise_sd)) {
    fail(ErrorKind::InvalidInput, "noise sd must be positive and finite");
  }
  if (noise_prior && !(noise_prior->shape > 0.0 && noise_prior->scale > 0.0)) {
    fail(ErrorKind::InvalidInput, "inverse-gamma noise hyperparameters must be positive");
  }
  if (const auto *fixed = std::get_if<FixedBandwidth>(&bandwidth)) {
    if (!(fixed->a > 0.0)) {
      fail(ErrorKind::InvalidInput, "fixed inverse bandwidth must be positive");
    }
  } else {
    const auto &adaptive = std::get<AdaptiveBandwidth>(bandwidth);
    if (!(adaptive.a0 > 0.0 && adaptive.b0 > 0.0)) {
      fail(ErrorKind::InvalidInput, "gamma hyperparameters a0, b0 must be positive");
    }
    if (!(adaptive.t0 >= 0.0)) {
      fail(ErrorKind::InvalidInput, "bandwidth truncation must be nonnegative");
    }
  }
  if (const auto *dep = std::get_if<DependentStructure>(&structure)) {
    if (!dep->lfd.at_design.allFinite()) {
      fail(ErrorKind::InvalidInput, "dependent prior direction has non-finite entries");
    }
    if (rows > 0 && dep->lfd.at_design.rows() != rows) {
      fail(ErrorKind::InvalidInput,
           "dependent prior direction has " + std::to_string(dep->lfd.at_design.rows()) +
               " rows but the dataset has " + std::to_string(rows));
    }
    if (p > 0 && dep->lfd.at_design.cols() != p) {
      fail(ErrorKind::InvalidInput, "dependent prior direction has wrong column count");
    }
  }
}

double log_prior_inverse_bandwidth(double a, const PriorSpec &spec, int d) {
  const auto *adaptive = std::get_if<AdaptiveBandwidth>(&spec.bandwidth);
  if (adaptive == nullptr) {
    fail(ErrorKind::ContractViolation, "bandwidth prior is fixed, not adaptive");
  }
  if (!(a > 0.0) || !std::isfinite(a)) {
    fail(ErrorKind::InvalidInput, "inverse bandwidth must be positive");
  }
  if (d < 1) {
    fail(ErrorKind::InvalidInput, "covariate dimension must be at least 1");
  }
  if (a < adaptive->t0) {
    return -std::numeric_limits<double>::infinity();
  }
  const double dd = static_cast<double>(d);
  const double shape = adaptive->a0;
  const double rate = adaptive->b0;
  // Mass of Ga(a0, b0) above t0^d.
  const double log_mass =
      adaptive->t0 > 0.0
          ? std::log(boost::math::gamma_q(shape, rate * std::pow(adaptive->t0, dd)))
          : 0.0;
  return std::log(dd) + shape * std::log(rate) - std::lgamma(shape) +
         (dd * shape - 1.0) * std::log(a) - rate * std::pow(a, dd) - log_mass;
}

Eigen::VectorXd prior_mean_shift(const Eigen::VectorXd &theta, const PriorSpec &spec) {
  const auto *dep = std::get_if<DependentStructure>(&spec.structure);
  if (dep == nullptr) {
    fail(ErrorKind::ContractViolation, "prior mean shift requires a dependent prior");
  }
  if (dep->lfd.at_design.cols() != theta.size()) {
    fail(ErrorKind::InvalidInput, "theta length does not match the direction width");
  }
  return dep->lfd.at_design * theta;
}

double log_prior_theta(const Eigen::VectorXd &theta, const PriorSpec &spec) {
  const double p = static_cast<double>(theta.size());
  return 0.5 * p * std::log(spec.theta_precision / (2.0 * std::numbers::pi)) -
         0.5 * spec.theta_precision * theta.squaredNorm();
}

double log_gaussian_density(const Eigen::VectorXd &x, const Eigen::VectorXd &mean,
                            const GramMatrix &gram) {
  if (x.size() != gram.size() || mean.size() != gram.size()) {
    fail(ErrorKind::InvalidInput, "Gaussian density arguments disagree in size");
  }
  const Eigen::VectorXd z =
      gram.lower().triangularView<Eigen::Lower>().solve(x - mean);
  const double log_det = 2.0 * gram.lower().diagonal().array().log().sum();
  const double n = static_cast<double>(x.size());
  return -0.5 * (n * std::log(2.0 * std::numbers::pi) + log_det + z.squaredNorm());
}

double log_prior_joint(const Eigen::VectorXd &theta, const Eigen::VectorXd &eta,
                       const GramMatrix &gram, const PriorSpec &spec) {
  const Eigen::VectorXd centre = spec.is_dependent()
                                     ? prior_mean_shift(theta, spec)
                                     : Eigen::VectorXd::Zero(eta.size());
  return log_prior_theta(theta, spec) + log_gaussian_density(eta, centre, gram);
}

} // namespace semibvm

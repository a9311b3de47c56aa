#pragma once

#include <optional>
#include <variant>

#include <Eigen/Core>

#include "semibvm/kernels.hpp"
#include "semibvm/lfd.hpp"

namespace semibvm {

/// theta and eta a priori independent.
struct IndependentStructure {};

/// eta | theta centred at theta^T h_n(V) (bias-corrected prior).
struct DependentStructure {
  LfdEstimate lfd;
};

using PriorStructure = std::variant<IndependentStructure, DependentStructure>;

struct FixedBandwidth {
  double a = 1.0;
};

/// a^d ~ Gamma(shape a0, rate b0), restricted to a >= t0.
struct AdaptiveBandwidth {
  double a0 = 1.0;
  double b0 = 1.0;
  double t0 = 0.0;
};

using BandwidthPrior = std::variant<FixedBandwidth, AdaptiveBandwidth>;

/// Conjugate sigma^2 ~ InvGamma(shape, scale); only used when enabled.
struct NoiseVariancePrior {
  double shape = 2.0;
  double scale = 0.25;
};

struct PriorSpec {
  /// theta ~ N(0, I / theta_precision).
  double theta_precision = 0.01;
  PriorStructure structure = IndependentStructure{};
  BandwidthPrior bandwidth = AdaptiveBandwidth{};
  /// Observation noise sd; treated as known unless `noise_prior` is set.
  double noise_sd = 0.5;
  std::optional<NoiseVariancePrior> noise_prior;

  bool is_dependent() const {
    return std::holds_alternative<DependentStructure>(structure);
  }
  bool is_adaptive() const {
    return std::holds_alternative<AdaptiveBandwidth>(bandwidth);
  }

  /// Checks hyperparameters; `rows` > 0 additionally checks the dependent
  /// direction against the dataset size.
  void validate(Eigen::Index rows = 0, Eigen::Index p = 0) const;
};

/// Log density of a induced by a^d ~ Ga(a0, b0) truncated to a >= t0,
/// normalized over [t0, inf). Returns -inf below the truncation point.
double log_prior_inverse_bandwidth(double a, const PriorSpec &spec, int d);

/// theta^T h_n(V_i) for every design row.
Eigen::VectorXd prior_mean_shift(const Eigen::VectorXd &theta, const PriorSpec &spec);

double log_prior_theta(const Eigen::VectorXd &theta, const PriorSpec &spec);

/// log N(x; mean, gram.values()).
double log_gaussian_density(const Eigen::VectorXd &x, const Eigen::VectorXd &mean,
                            const GramMatrix &gram);

/// Joint log prior of (theta, eta at design) for a fixed Gram matrix.
double log_prior_joint(const Eigen::VectorXd &theta, const Eigen::VectorXd &eta,
                       const GramMatrix &gram, const PriorSpec &spec);

} // namespace semibvm

#pragma once

#include <vector>

#include <Eigen/Core>

#include "semibvm/rng.hpp"

namespace semibvm {

/// Squared-exponential covariance K^a(x,y) = exp(-a^2 |x-y|^2), i.e. the base
/// kernel exp(-|x-y|^2) evaluated at the scaled points (ax, ay).
struct KernelConfig {
  double inverse_bandwidth = 1.0;
};

inline constexpr double kDefaultJitter = 1e-8;
inline constexpr double kMaxJitter = 1e-4;

/// Kernel matrix without any diagonal augmentation. Rows of `points` are
/// observations.
Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd &points,
                              const KernelConfig &cfg);

/// Cross-covariance between two point sets.
Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd &left,
                              const Eigen::MatrixXd &right,
                              const KernelConfig &cfg);

/// Jittered Gram matrix together with its lower Cholesky factor.
class GramMatrix {
public:
  GramMatrix(Eigen::MatrixXd values, double jitter, Eigen::MatrixXd lower)
      : values_(std::move(values)), jitter_(jitter), lower_(std::move(lower)) {}

  /// Kernel values with `jitter()` added to the diagonal.
  const Eigen::MatrixXd &values() const { return values_; }
  double jitter() const { return jitter_; }
  const Eigen::MatrixXd &lower() const { return lower_; }
  Eigen::Index size() const { return values_.rows(); }

private:
  Eigen::MatrixXd values_;
  double jitter_;
  Eigen::MatrixXd lower_;
};

/// Builds the Gram matrix at `points` and factorizes it. The jitter starts at
/// `jitter` and doubles until the factorization succeeds or exceeds
/// `max_jitter`, in which case a numerical error is raised.
GramMatrix gram(const Eigen::MatrixXd &points, const KernelConfig &cfg,
                double jitter = kDefaultJitter, double max_jitter = kMaxJitter);

/// Factorizes an arbitrary covariance with the same escalation policy.
GramMatrix factorize_covariance(Eigen::MatrixXd covariance,
                                double jitter = kDefaultJitter,
                                double max_jitter = kMaxJitter);

/// Inverse bandwidth n^{1/(2 alpha + d)} matched to alpha-smooth functions.
double bandwidth_nonadaptive(double n, double alpha, int d);

/// mean + L z with z standard normal.
Eigen::VectorXd sample_gp_path(const GramMatrix &gram, const Eigen::VectorXd &mean,
                               Rng &rng);

/// Conditional mean of the GP at `targets` given exact values at `points`.
Eigen::VectorXd predict_gp_mean(const GramMatrix &gram, const Eigen::MatrixXd &points,
                                const Eigen::VectorXd &values,
                                const Eigen::MatrixXd &targets,
                                const KernelConfig &cfg);

struct RLPath {
  std::vector<double> grid;
  std::vector<double> values;
};

inline constexpr int kDefaultRefinement = 10;

/// Draws r(t) = int_0^t (t-u)^{1/2} dW_u + Z_0 + Z_1 t + Z_2 t^2 on `grid`.
/// The stochastic integral uses left-endpoint weights on a grid refined
/// `refinement` times between consecutive points (and between 0 and grid[0]).
RLPath sample_riemann_liouville(const std::vector<double> &grid, Rng &rng,
                                int refinement = kDefaultRefinement);

} // namespace semibvm

#pragma once

#include <functional>
#include <optional>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "semibvm/dataset.hpp"
#include "semibvm/rng.hpp"

namespace semibvm {

/// Least favorable direction evaluated at the design points, signed so that
/// it is the quantity added to the nuisance prior mean (theta^T h). For the
/// partially linear model this targets -E[U | V].
struct LfdEstimate {
  Eigen::MatrixXd at_design; // n x p
  /// Per-coordinate smoothing bandwidth; empty for exact (analytic) values.
  std::optional<Eigen::VectorXd> bandwidth;
};

/// h*(V_i) = -E[U | V = V_i].
LfdEstimate lfd_plm_analytic(const ConditionalMean &cond_mean_u,
                             const Eigen::MatrixXd &v);

enum class Link { Identity, Logit, ExpHazard };

/// f(g) * l(g) with f = F' and l = f / Var(F(g)) for the quasi-likelihood of
/// each link.
double link_weight(Link link, double g);

/// (u, v) -> g0(u, v) = theta0^T u + eta0(v).
using LinearPredictor =
    std::function<double(const Eigen::VectorXd &, const Eigen::VectorXd &)>;

struct WeightedPoint {
  Eigen::VectorXd u;
  double weight;
};

/// Conditional law of U given V = v, either as a sampler (Monte Carlo) or as
/// a finite set of weighted support points (exact or quadrature).
using ConditionalSampler = std::function<Eigen::VectorXd(const Eigen::VectorXd &, Rng &)>;
using ConditionalSupport = std::function<std::vector<WeightedPoint>(const Eigen::VectorXd &)>;
using ConditionalLaw = std::variant<ConditionalSampler, ConditionalSupport>;

inline constexpr int kDefaultLfdDraws = 10000;

/// h*(v) = -E[U w(T) | V=v] / E[w(T) | V=v], w = link_weight(g0(T)).
/// `rng` is only consumed for sampler laws.
LfdEstimate lfd_gplm_analytic(Link link, const LinearPredictor &g0,
                              const ConditionalLaw &law, const Eigen::MatrixXd &v,
                              Rng &rng, int draws = kDefaultLfdDraws);

/// U | V=v ~ N(mean(v), sd^2 I) represented by a tensor Gauss-Hermite rule.
ConditionalSupport gaussian_conditional_support(ConditionalMean mean, double sd,
                                                int nodes = 24);

/// Gauss-Hermite rule for the standard normal: nodes and probability weights.
std::pair<Eigen::VectorXd, Eigen::VectorXd> gauss_hermite_normal(int nodes);

/// Normal-reference bandwidth sd(V_k) * (4 / ((d+2) n))^{1/(d+4)} per column.
Eigen::VectorXd normal_reference_bandwidth(const Eigen::MatrixXd &v);

/// Gaussian-kernel Nadaraya-Watson estimate of -E[U | V] at the design.
/// `bandwidth` overrides the normal-reference rule for every coordinate.
LfdEstimate nadaraya_watson(const Eigen::MatrixXd &u, const Eigen::MatrixXd &v,
                            std::optional<double> bandwidth = std::nullopt);

} // namespace semibvm

#pragma once

#include <functional>
#include <istream>
#include <optional>
#include <ostream>
#include <string>

#include <Eigen/Core>

namespace semibvm {

/// v -> E[U | V = v], a p-vector.
using ConditionalMean = std::function<Eigen::VectorXd(const Eigen::VectorXd &)>;
/// v -> eta(v).
using NuisanceFunction = std::function<double(const Eigen::VectorXd &)>;

enum class LikelihoodKind { Gaussian, Logistic };

/// Known generating truth for simulated data.
struct GroundTruth {
  Eigen::VectorXd theta0;
  Eigen::VectorXd eta0_at_design;
  NuisanceFunction eta0;
  ConditionalMean cond_mean_u;
  LikelihoodKind likelihood = LikelihoodKind::Gaussian;
  double noise_sd = 0.0;
};

struct Dataset {
  Eigen::MatrixXd u; // n x p
  Eigen::MatrixXd v; // n x d
  Eigen::VectorXd y; // n
  std::optional<GroundTruth> truth;

  Eigen::Index n() const { return y.size(); }
  Eigen::Index p() const { return u.cols(); }
  Eigen::Index d() const { return v.cols(); }

  /// Throws invalid-input when shapes disagree or values are non-finite.
  void validate() const;
};

/// CSV with header `y,u1..up,v1..vd`.
Dataset read_dataset_csv(std::istream &in);
Dataset read_dataset_csv(const std::string &path);
void write_dataset_csv(const Dataset &data, std::ostream &out);

} // namespace semibvm

#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "semibvm/harness.hpp"
#include "semibvm/priors.hpp"
#include "semibvm/samplers.hpp"

namespace semibvm {

/// How to build the prior for a `fit` run. The dependent direction is
/// estimated from the data being fitted, so it is described rather than stored.
struct FitConfig {
  LikelihoodKind likelihood = LikelihoodKind::Gaussian;
  bool dependent = true;
  std::optional<double> nw_bandwidth;
  double theta_precision = 0.01;
  BandwidthPrior bandwidth = AdaptiveBandwidth{};
  double noise_sd = 0.5;
  std::optional<NoiseVariancePrior> noise_prior;
  McmcConfig mcmc{};
};

PriorSpec build_fit_prior(const FitConfig &cfg, const Dataset &data);

nlohmann::json to_json(const McmcConfig &cfg);
McmcConfig mcmc_from_json(const nlohmann::json &j, McmcConfig defaults = {});

nlohmann::json to_json(const FitConfig &cfg);
FitConfig fit_config_from_json(const nlohmann::json &j);

nlohmann::json to_json(const ExperimentConfig &cfg);
/// Missing keys keep the desk-scale defaults.
ExperimentConfig experiment_config_from_json(const nlohmann::json &j);

nlohmann::json load_json_file(const std::string &path);

} // namespace semibvm

#include "semibvm/config.hpp"

#include <fstream>

#include "semibvm/error.hpp"
#include "semibvm/lfd.hpp"

namespace semibvm {

using nlohmann::json;

namespace {

template <typename T> T get_or(const json &j, const char *key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) {
    return fallback;
  }
  try {
    return j.at(key).get<T>();
  } catch (const json::exception &e) {
    fail(ErrorKind::InvalidInput, std::string("config key '") + key + "': " + e.what());
  }
}

void reject_unknown_keys(const json &j, std::initializer_list<const char *> known,
                         const char *where) {
  if (!j.is_object()) {
    fail(ErrorKind::InvalidInput, std::string(where) + " must be a JSON object");
  }
  for (const auto &item : j.items()) {
    bool ok = false;
    for (const char *k : known) {
      ok = ok || item.key() == k;
    }
    if (!ok) {
      fail(ErrorKind::InvalidInput,
           std::string("unknown key '") + item.key() + "' in " + where);
    }
  }
}

json bandwidth_to_json(const BandwidthPrior &bw) {
  if (const auto *fixed = std::get_if<FixedBandwidth>(&bw)) {
    return {{"type", "fixed"}, {"a", fixed->a}};
  }
  const auto &ad = std::get<AdaptiveBandwidth>(bw);
  return {{"type", "adaptive"}, {"a0", ad.a0}, {"b0", ad.b0}, {"t0", ad.t0}};
}

BandwidthPrior bandwidth_from_json(const json &j) {
  reject_unknown_keys(j, {"type", "a", "a0", "b0", "t0"}, "bandwidth");
  const auto type = get_or<std::string>(j, "type", "adaptive");
  if (type == "fixed") {
    if (!j.contains("a")) {
      fail(ErrorKind::InvalidInput, "fixed bandwidth needs 'a'");
    }
    return FixedBandwidth{get_or<double>(j, "a", 1.0)};
  }
  if (type != "adaptive") {
    fail(ErrorKind::InvalidInput, "bandwidth type must be 'fixed' or 'adaptive'");
  }
  return AdaptiveBandwidth{get_or<double>(j, "a0", 1.0), get_or<double>(j, "b0", 1.0),
                           get_or<double>(j, "t0", 0.0)};
}

} // namespace

json to_json(const McmcConfig &cfg) {
  json j = {{"iterations", cfg.iterations},
            {"burn_in", cfg.burn_in},
            {"rw_sd_log_a", cfg.rw_sd_log_a},
            {"seed", cfg.seed}};
  if (cfg.initial_a) {
    j["initial_a"] = *cfg.initial_a;
  }
  return j;
}

McmcConfig mcmc_from_json(const json &j, McmcConfig defaults) {
  reject_unknown_keys(j, {"iterations", "burn_in", "rw_sd_log_a", "seed", "initial_a"}, "mcmc");
  McmcConfig cfg = defaults;
  cfg.iterations = get_or<int>(j, "iterations", cfg.iterations);
  cfg.burn_in = get_or<int>(j, "burn_in", cfg.burn_in);
  cfg.rw_sd_log_a = get_or<double>(j, "rw_sd_log_a", cfg.rw_sd_log_a);
  cfg.seed = get_or<std::uint64_t>(j, "seed", cfg.seed);
  if (j.contains("initial_a")) {
    cfg.initial_a = get_or<double>(j, "initial_a", 1.0);
  }
  cfg.validate();
  return cfg;
}

json to_json(const FitConfig &cfg) {
  json j = {{"likelihood", cfg.likelihood == LikelihoodKind::Gaussian ? "gaussian" : "logistic"},
            {"structure", cfg.dependent ? "dependent" : "independent"},
            {"theta_precision", cfg.theta_precision},
            {"bandwidth", bandwidth_to_json(cfg.bandwidth)},
            {"noise_sd", cfg.noise_sd},
            {"mcmc", to_json(cfg.mcmc)}};
  if (cfg.nw_bandwidth) {
    j["nw_bandwidth"] = *cfg.nw_bandwidth;
  }
  if (cfg.noise_prior) {
    j["noise_prior"] = {{"shape", cfg.noise_prior->shape}, {"scale", cfg.noise_prior->scale}};
  }
  return j;
}

FitConfig fit_config_from_json(const json &j) {
  reject_unknown_keys(j,
                      {"likelihood", "structure", "nw_bandwidth", "theta_precision",
                       "bandwidth", "noise_sd", "noise_prior", "mcmc"},
                      "prior config");
  FitConfig cfg;
  const auto likelihood = get_or<std::string>(j, "likelihood", "gaussian");
  if (likelihood == "gaussian") {
    cfg.likelihood = LikelihoodKind::Gaussian;
  } else if (likelihood == "logistic") {
    cfg.likelihood = LikelihoodKind::Logistic;
  } else {
    fail(ErrorKind::InvalidInput, "likelihood must be 'gaussian' or 'logistic'");
  }
  const auto structure = get_or<std::string>(j, "structure", "dependent");
  if (structure != "dependent" && structure != "independent") {
    fail(ErrorKind::InvalidInput, "structure must be 'dependent' or 'independent'");
  }
  cfg.dependent = structure == "dependent";
  if (j.contains("nw_bandwidth")) {
    cfg.nw_bandwidth = get_or<double>(j, "nw_bandwidth", 1.0);
  }
  cfg.theta_precision = get_or<double>(j, "theta_precision", cfg.theta_precision);
  if (j.contains("bandwidth")) {
    cfg.bandwidth = bandwidth_from_json(j.at("bandwidth"));
  }
  cfg.noise_sd = get_or<double>(j, "noise_sd", cfg.noise_sd);
  if (j.contains("noise_prior")) {
    const auto &np = j.at("noise_prior");
    reject_unknown_keys(np, {"shape", "scale"}, "noise_prior");
    cfg.noise_prior = NoiseVariancePrior{get_or<double>(np, "shape", 2.0),
                                         get_or<double>(np, "scale", 0.25)};
  }
  if (j.contains("mcmc")) {
    cfg.mcmc = mcmc_from_json(j.at("mcmc"));
  }
  return cfg;
}

PriorSpec build_fit_prior(const FitConfig &cfg, const Dataset &data) {
  PriorSpec prior;
  prior.theta_precision = cfg.theta_precision;
  prior.bandwidth = cfg.bandwidth;
  prior.noise_sd = cfg.noise_sd;
  prior.noise_prior = cfg.noise_prior;
  if (cfg.dependent) {
    prior.structure = DependentStructure{nadaraya_watson(data.u, data.v, cfg.nw_bandwidth)};
  }
  prior.validate(data.n(), data.p());
  return prior;
}

json to_json(const ExperimentConfig &cfg) {
  json j = {{"model", to_string(cfg.model)},
            {"prior_setup", to_string(cfg.prior_setup)},
            {"n", cfg.n},
            {"replicates", cfg.replicates},
            {"mcmc", to_json(cfg.mcmc)},
            {"output_dir", cfg.output_dir},
            {"threads", cfg.threads},
            {"theta_precision", cfg.theta_precision},
            {"a0", cfg.a0},
            {"b0", cfg.b0},
            {"t0", cfg.t0}};
  if (cfg.noise_sd) {
    j["noise_sd"] = *cfg.noise_sd;
  }
  return j;
}

ExperimentConfig experiment_config_from_json(const json &j) {
  reject_unknown_keys(j,
                      {"model", "prior_setup", "n", "replicates", "mcmc", "output_dir",
                       "threads", "theta_precision", "a0", "b0", "t0", "noise_sd"},
                      "experiment config");
  ExperimentConfig cfg = desk_scale_config();
  if (j.contains("model")) {
    cfg.model = parse_model(get_or<std::string>(j, "model", "M1"));
  }
  if (j.contains("prior_setup")) {
    cfg.prior_setup = parse_prior_setup(get_or<std::string>(j, "prior_setup", "P2"));
  }
  cfg.n = get_or<Eigen::Index>(j, "n", cfg.n);
  cfg.replicates = get_or<int>(j, "replicates", cfg.replicates);
  if (j.contains("mcmc")) {
    cfg.mcmc = mcmc_from_json(j.at("mcmc"), cfg.mcmc);
  }
  cfg.output_dir = get_or<std::string>(j, "output_dir", cfg.output_dir);
  cfg.threads = get_or<int>(j, "threads", cfg.threads);
  cfg.theta_precision = get_or<double>(j, "theta_precision", cfg.theta_precision);
  cfg.a0 = get_or<double>(j, "a0", cfg.a0);
  cfg.b0 = get_or<double>(j, "b0", cfg.b0);
  cfg.t0 = get_or<double>(j, "t0", cfg.t0);
  if (j.contains("noise_sd")) {
    cfg.noise_sd = get_or<double>(j, "noise_sd", 0.5);
  }
  cfg.validate();
  return cfg;
}

json load_json_file(const std::string &path) {
  std::ifstream in(path);
  if (!in) {
    fail(ErrorKind::Io, "cannot open " + path);
  }
  try {
    return json::parse(in, nullptr, true, true);
  } catch (const json::parse_error &e) {
    fail(ErrorKind::InvalidInput, path + ": " + e.what());
  }
}

} // namespace semibvm

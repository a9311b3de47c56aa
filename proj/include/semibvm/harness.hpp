#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "semibvm/dataset.hpp"
#include "semibvm/rng.hpp"
#include "semibvm/samplers.hpp"

namespace semibvm {

enum class Model { M1, M2, M3, M4, LogisticDemo };
enum class PriorSetup { P1, P2, P3 };

std::string to_string(Model model);
std::string to_string(PriorSetup setup);
Model parse_model(const std::string &name);
PriorSetup parse_prior_setup(const std::string &name);

inline constexpr double kTrueTheta = 0.5;
inline constexpr double kModelNoiseSd = 0.5;

/// Simulates one dataset with ground truth. V ~ N(0,1); theta0 = 0.5.
///   M1: eta0 = exp(v),   E[U|V] = 0.5|v|^3     M2: eta0 = exp(v),   E[U|V] = 0.5 v^3
///   M3: eta0 = exp(|v|), E[U|V] = 0.5|v|^3     M4: eta0 = exp(|v|), E[U|V] = 0.5 v^3
/// U | V ~ N(E[U|V], 1), Y = 0.5 U + eta0(V) + N(0, noise_sd^2).
/// LogisticDemo: U | V ~ N(0.5 v, 1), eta0 = sin, Y ~ Bernoulli(logistic(0.5 U + sin V)).
Dataset generate(Model model, Eigen::Index n, Rng &rng, double noise_sd = kModelNoiseSd);

struct ExperimentConfig {
  Model model = Model::M1;
  PriorSetup prior_setup = PriorSetup::P2;
  Eigen::Index n = 100;
  int replicates = 50;
  /// `mcmc.seed` is the base seed; replicate r uses stream r of it.
  McmcConfig mcmc{4000, 2000, 0.3, 7, std::nullopt, std::nullopt, true};
  std::string output_dir = ".";
  /// Overrides the generator's noise sd (the prior uses the same value).
  std::optional<double> noise_sd;
  /// Worker count; 0 means SEMIBVM_THREADS or 1. SEMIBVM_THREADS caps it.
  int threads = 0;
  double theta_precision = 0.01;
  double a0 = 1.0;
  double b0 = 1.0;
  double t0 = 0.0;

  void validate() const;
};

/// Desk-scale defaults: 50 replicates, 4000 iterations, 2000 burn-in.
ExperimentConfig desk_scale_config();
/// 100 replicates, 10000 iterations, 5000 burn-in.
void apply_paper_scale(ExperimentConfig &cfg);

struct ReplicateRecord {
  bool ok = false;
  std::string error;
  Eigen::VectorXd theta_hat;
  double squared_error_theta = 0.0;
  double eta_error_n = 0.0;
  double se = 0.0;
  double coverage = 0.0;
  double ks = 0.0;
  double accept_rate_a = 0.0;
};

struct ReplicateReport {
  Model model = Model::M1;
  PriorSetup prior_setup = PriorSetup::P1;
  Eigen::Index n = 0;
  int replicates = 0;
  int failures = 0;
  double rmse_theta = 0.0;
  double se = 0.0;
  double rmse_eta = 0.0;
  double cr95 = 0.0;
  double ks_median = 0.0;
  double accept_rate_a = 0.0;
  std::vector<ReplicateRecord> records;
};

/// Effective worker count after applying the SEMIBVM_THREADS cap.
int resolve_threads(int requested);

/// Builds the prior for a setup from simulated data (P1 independent,
/// P2 Nadaraya-Watson dependent, P3 analytic dependent; all adaptive).
PriorSpec build_prior(PriorSetup setup, const Dataset &data, const ExperimentConfig &cfg);

/// Runs one replicate end to end; never throws (errors land in the record).
ReplicateRecord run_replicate(const ExperimentConfig &cfg, int replicate);

ReplicateReport run_experiment(const ExperimentConfig &cfg);

/// Aggregates replicate records in index order.
ReplicateReport aggregate(const ExperimentConfig &cfg, std::vector<ReplicateRecord> records);

struct TableOptions {
  int table = 1;
  bool paper_scale = false;
  std::uint64_t seed = 7;
  int threads = 0;
  std::optional<int> replicates;
  std::optional<int> iterations;
  std::optional<int> burn_in;
  std::vector<Eigen::Index> sample_sizes{50, 100, 200, 400};
};

/// Experiment configurations for every cell of table 1 (M1, M2) or
/// table 2 (M3, M4), ordered by n, model, prior. Priors within a (model, n)
/// cell share datasets.
std::vector<ExperimentConfig> table_configs(const TableOptions &options);
std::vector<ReplicateReport> reproduce_table(const TableOptions &options);

} // namespace semibvm

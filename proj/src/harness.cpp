#include "semibvm/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <thread>

#include "semibvm/error.hpp"
#include "semibvm/lfd.hpp"
#include "semibvm/stats.hpp"
#include "semibvm/summaries.hpp"

namespace semibvm {

std::string to_string(Model model) {
  switch (model) {
  case Model::M1:
    return "M1";
  case Model::M2:
    return "M2";
  case Model::M3:
    return "M3";
  case Model::M4:
    return "M4";
  case Model::LogisticDemo:
    return "LogisticDemo";
  }
  return "?";
}

std::string to_string(PriorSetup setup) {
  switch (setup) {
  case PriorSetup::P1:
    return "P1";
  case PriorSetup::P2:
    return "P2";
  case PriorSetup::P3:
    return "P3";
  }
  return "?";
}

Model parse_model(const std::string &name) {
  for (Model m : {Model::M1, Model::M2, Model::M3, Model::M4, Model::LogisticDemo}) {
    if (to_string(m) == name) {
      return m;
    }
  }
  fail(ErrorKind::InvalidInput, "unknown model '" + name + "'");
}

PriorSetup parse_prior_setup(const std::string &name) {
  for (PriorSetup s : {PriorSetup::P1, PriorSetup::P2, PriorSetup::P3}) {
    if (to_string(s) == name) {
      return s;
    }
  }
  fail(ErrorKind::InvalidInput, "unknown prior setup '" + name + "'");
}

namespace {

bool smooth_nuisance(Model m) { return m == Model::M1 || m == Model::M2; }
bool abs_cube_mean(Model m) { return m == Model::M1 || m == Model::M3; }

} // namespace

Dataset generate(Model model, Eigen::Index n, Rng &rng, double noise_sd) {
  if (n < 1) {
    fail(ErrorKind::InvalidInput, "sample size must be at least 1");
  }
  if (!(noise_sd >= 0.0)) {
    fail(ErrorKind::InvalidInput, "noise sd must be nonnegative");
  }
  GroundTruth truth;
  truth.theta0 = Eigen::VectorXd::Constant(1, kTrueTheta);
  if (model == Model::LogisticDemo) {
    truth.eta0 = [](const Eigen::VectorXd &v) { return std::sin(v[0]); };
    truth.cond_mean_u = [](const Eigen::VectorXd &v) {
      return Eigen::VectorXd::Constant(1, 0.5 * v[0]);
    };
    truth.likelihood = LikelihoodKind::Logistic;
    truth.noise_sd = 1.0;
  } else {
    if (smooth_nuisance(model)) {
      truth.eta0 = [](const Eigen::VectorXd &v) { return std::exp(v[0]); };
    } else {
      truth.eta0 = [](const Eigen::VectorXd &v) { return std::exp(std::abs(v[0])); };
    }
    if (abs_cube_mean(model)) {
      truth.cond_mean_u = [](const Eigen::VectorXd &v) {
        return Eigen::VectorXd::Constant(1, 0.5 * std::pow(std::abs(v[0]), 3));
      };
    } else {
      truth.cond_mean_u = [](const Eigen::VectorXd &v) {
        return Eigen::VectorXd::Constant(1, 0.5 * v[0] * v[0] * v[0]);
      };
    }
    truth.likelihood = LikelihoodKind::Gaussian;
    truth.noise_sd = noise_sd;
  }

  Dataset data;
  data.u.resize(n, 1);
  data.v.resize(n, 1);
  data.y.resize(n);
  truth.eta0_at_design.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::VectorXd v(1);
    v[0] = rng.normal();
    const double u = truth.cond_mean_u(v)[0] + rng.normal();
    const double eta = truth.eta0(v);
    const double g = kTrueTheta * u + eta;
    data.v(i, 0) = v[0];
    data.u(i, 0) = u;
    truth.eta0_at_design[i] = eta;
    if (model == Model::LogisticDemo) {
      const double prob = 1.0 / (1.0 + std::exp(-g));
      data.y[i] = rng.uniform() < prob ? 1.0 : 0.0;
    } else {
      data.y[i] = g + noise_sd * rng.normal();
    }
  }
  data.truth = std::move(truth);
  return data;
}

void ExperimentConfig::validate() const {
  if (replicates < 1) {
    fail(ErrorKind::InvalidInput, "replicates must be at least 1");
  }
  if (n < 2) {
    fail(ErrorKind::InvalidInput, "experiments need n >= 2");
  }
  if (noise_sd && !(*noise_sd > 0.0)) {
    fail(ErrorKind::InvalidInput, "noise sd override must be positive");
  }
  if (threads < 0) {
    fail(ErrorKind::InvalidInput, "thread count must be nonnegative");
  }
  mcmc.validate();
}

ExperimentConfig desk_scale_config() { return ExperimentConfig{}; }

void apply_paper_scale(ExperimentConfig &cfg) {
  cfg.replicates = 100;
  cfg.mcmc.iterations = 10000;
  cfg.mcmc.burn_in = 5000;
}

int resolve_threads(int requested) {
  int threads = requested;
  int cap = 0;
  if (const char *env = std::getenv("SEMIBVM_THREADS")) {
    cap = std::atoi(env);
  }
  if (threads <= 0) {
    threads = cap > 0 ? cap : 1;
  }
  if (cap > 0) {
    threads = std::min(threads, cap);
  }
  return std::max(threads, 1);
}

PriorSpec build_prior(PriorSetup setup, const Dataset &data, const ExperimentConfig &cfg) {
  PriorSpec prior;
  prior.theta_precision = cfg.theta_precision;
  prior.bandwidth = AdaptiveBandwidth{cfg.a0, cfg.b0, cfg.t0};
  prior.noise_sd = cfg.noise_sd.value_or(kModelNoiseSd);
  const bool logistic =
      data.truth && data.truth->likelihood == LikelihoodKind::Logistic;
  switch (setup) {
  case PriorSetup::P1:
    prior.structure = IndependentStructure{};
    break;
  case PriorSetup::P2:
    prior.structure = DependentStructure{nadaraya_watson(data.u, data.v)};
    break;
  case PriorSetup::P3: {
    if (!data.truth) {
      fail(ErrorKind::InvalidInput, "prior setup P3 needs the true E[U|V]");
    }
    if (logistic) {
      const GroundTruth &truth = *data.truth;
      const LinearPredictor g0 = [&truth](const Eigen::VectorXd &u, const Eigen::VectorXd &v) {
        return u.dot(truth.theta0) + truth.eta0(v);
      };
      Rng unused(0);
      prior.structure = DependentStructure{
          lfd_gplm_analytic(Link::Logit, g0,
                            gaussian_conditional_support(truth.cond_mean_u, 1.0), data.v,
                            unused)};
    } else {
      prior.structure = DependentStructure{lfd_plm_analytic(data.truth->cond_mean_u, data.v)};
    }
    break;
  }
  }
  if (logistic) {
    prior.noise_sd = 1.0;
  }
  return prior;
}

ReplicateRecord run_replicate(const ExperimentConfig &cfg, int replicate) {
  ReplicateRecord record;
  try {
    const std::uint64_t seed =
        stream_seed(cfg.mcmc.seed, static_cast<std::uint64_t>(replicate));
    Rng data_rng(stream_seed(seed, 0));
    const Dataset data =
        generate(cfg.model, cfg.n, data_rng, cfg.noise_sd.value_or(kModelNoiseSd));
    const PriorSpec prior = build_prior(cfg.prior_setup, data, cfg);
    McmcConfig mcmc = cfg.mcmc;
    mcmc.seed = stream_seed(seed, 1);
    mcmc.store_eta = true;

    const bool logistic = cfg.model == Model::LogisticDemo;
    const McmcTrace trace =
        logistic ? fit_gplm_logistic(data, prior, mcmc) : fit_plm(data, prior, mcmc);
    const PosteriorSummary summary = summarize(trace, {0.025, 0.5, 0.975});
    const GroundTruth &truth = *data.truth;

    OracleQuantities oracle;
    if (logistic) {
      const LinearPredictor g0 = [&truth](const Eigen::VectorXd &u, const Eigen::VectorXd &v) {
        return u.dot(truth.theta0) + truth.eta0(v);
      };
      Rng unused(0);
      const LfdEstimate h = lfd_gplm_analytic(
          Link::Logit, g0, gaussian_conditional_support(truth.cond_mean_u, 1.0), data.v,
          unused);
      oracle = oracle_gplm_logistic(data, h.at_design);
    } else {
      oracle = oracle_plm(data);
    }

    record.theta_hat = summary.median;
    record.squared_error_theta = (summary.median - truth.theta0).squaredNorm();
    const Eigen::VectorXd eta_err = trace.eta_mean() - truth.eta0_at_design;
    record.eta_error_n = std::sqrt(eta_err.squaredNorm() / static_cast<double>(cfg.n));
    record.se = summary.se.mean();
    double covered = 0.0;
    for (Eigen::Index s = 0; s < summary.ci95.rows(); ++s) {
      covered += (summary.ci95(s, 0) <= truth.theta0[s] && truth.theta0[s] <= summary.ci95(s, 1))
                     ? 1.0
                     : 0.0;
    }
    record.coverage = covered / static_cast<double>(summary.ci95.rows());
    record.ks = bvm_distance(trace, oracle).mean();
    record.accept_rate_a = trace.accept_rate_a;
    record.ok = true;
  } catch (const std::exception &e) {
    record.ok = false;
    record.error = e.what();
  }
  return record;
}

ReplicateReport aggregate(const ExperimentConfig &cfg, std::vector<ReplicateRecord> records) {
  ReplicateReport report;
  report.model = cfg.model;
  report.prior_setup = cfg.prior_setup;
  report.n = cfg.n;
  report.replicates = static_cast<int>(records.size());
  double sq_theta = 0.0;
  double sq_eta = 0.0;
  double se = 0.0;
  double cover = 0.0;
  double accept = 0.0;
  std::vector<double> ks;
  for (std::size_t r = 0; r < records.size(); ++r) {
    const auto &rec = records[r];
    if (!rec.ok) {
      ++report.failures;
      std::cerr << "warning: " << to_string(cfg.model) << '/' << to_string(cfg.prior_setup)
                << " n=" << cfg.n << " replicate " << r << " failed: " << rec.error << '\n';
      continue;
    }
    sq_theta += rec.squared_error_theta;
    sq_eta += rec.eta_error_n * rec.eta_error_n;
    se += rec.se;
    cover += rec.coverage;
    accept += rec.accept_rate_a;
    ks.push_back(rec.ks);
  }
  if (static_cast<double>(report.failures) > 0.05 * static_cast<double>(records.size())) {
    fail(ErrorKind::Experiment, std::to_string(report.failures) + " of " +
                                    std::to_string(records.size()) + " replicates failed");
  }
  const double ok = static_cast<double>(ks.size());
  report.rmse_theta = std::sqrt(sq_theta / ok);
  report.rmse_eta = std::sqrt(sq_eta / ok);
  report.se = se / ok;
  report.cr95 = cover / ok;
  report.accept_rate_a = accept / ok;
  report.ks_median = stats::quantile(ks, 0.5);
  report.records = std::move(records);
  return report;
}

ReplicateReport run_experiment(const ExperimentConfig &cfg) {
  cfg.validate();
  const int workers = std::min(resolve_threads(cfg.threads), cfg.replicates);
  std::vector<ReplicateRecord> records(static_cast<std::size_t>(cfg.replicates));
  std::atomic<int> next{0};
  auto work = [&] {
    for (int r = next++; r < cfg.replicates; r = next++) {
      records[static_cast<std::size_t>(r)] = run_replicate(cfg, r);
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back(work);
    }
  }
  return aggregate(cfg, std::move(records));
}

std::vector<ExperimentConfig> table_configs(const TableOptions &options) {
  if (options.table != 1 && options.table != 2) {
    fail(ErrorKind::InvalidInput, "table must be 1 or 2");
  }
  const std::vector<Model> models = options.table == 1 ? std::vector{Model::M1, Model::M2}
                                                       : std::vector{Model::M3, Model::M4};
  std::vector<ExperimentConfig> cells;
  for (Eigen::Index n : options.sample_sizes) {
    for (Model model : models) {
      for (PriorSetup setup : {PriorSetup::P1, PriorSetup::P2, PriorSetup::P3}) {
        ExperimentConfig cfg = desk_scale_config();
        if (options.paper_scale) {
          apply_paper_scale(cfg);
        }
        cfg.model = model;
        cfg.prior_setup = setup;
        cfg.n = n;
        cfg.threads = options.threads;
        cfg.mcmc.seed = stream_seed(options.seed, static_cast<std::uint64_t>(n) * 16 +
                                                      static_cast<std::uint64_t>(model));
        if (options.replicates) {
          cfg.replicates = *options.replicates;
        }
        if (options.iterations) {
          cfg.mcmc.iterations = *options.iterations;
        }
        if (options.burn_in) {
          cfg.mcmc.burn_in = *options.burn_in;
        }
        cells.push_back(cfg);
      }
    }
  }
  return cells;
}

std::vector<ReplicateReport> reproduce_table(const TableOptions &options) {
  std::vector<ReplicateReport> reports;
  for (const auto &cfg : table_configs(options)) {
    reports.push_back(run_experiment(cfg));
  }
  return reports;
}

} // namespace semibvm

#include <fstream>
#include <iomanip>
#include <iostream>

#include <CLI11.hpp>

#include "semibvm/config.hpp"
#include "semibvm/error.hpp"
#include "semibvm/harness.hpp"
#include "semibvm/report.hpp"
#include "semibvm/samplers.hpp"
#include "semibvm/summaries.hpp"

using namespace semibvm;

namespace {

void write_reports(const std::vector<ReplicateReport> &reports, const std::string &dir) {
  const auto csv = emit_report(reports, ReportFormat::Csv, dir);
  emit_report(reports, ReportFormat::Markdown, dir);
  std::cout << render_report(reports, ReportFormat::Markdown);
  std::cerr << "wrote " << csv.string() << '\n';
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Semiparametric Bayesian inference for partially linear models"};
  app.require_subcommand(1);

  // simulate
  auto *simulate = app.add_subcommand("simulate", "Run a replicate study for one cell");
  std::string config_path;
  std::string model_name = "M1";
  std::string prior_name = "P2";
  Eigen::Index n = 100;
  int replicates = 50;
  std::uint64_t seed = 7;
  std::string out_dir = "out";
  int iterations = 0;
  int burn_in = -1;
  int threads = 0;
  double noise_sd = 0.0;
  bool paper_scale = false;
  simulate->add_option("--config", config_path, "JSON experiment config (flags override it)");
  auto *model_opt = simulate->add_option("--model", model_name, "M1, M2, M3, M4 or LogisticDemo");
  auto *prior_opt = simulate->add_option("--prior", prior_name, "P1, P2 or P3");
  auto *n_opt = simulate->add_option("--n", n, "sample size");
  auto *reps_opt = simulate->add_option("--replicates", replicates, "number of datasets");
  auto *seed_opt = simulate->add_option("--seed", seed, "base seed");
  auto *out_opt = simulate->add_option("--out", out_dir, "output directory");
  simulate->add_option("--iterations", iterations, "MCMC iterations");
  simulate->add_option("--burn-in", burn_in, "MCMC burn-in");
  simulate->add_option("--threads", threads, "worker threads (capped by SEMIBVM_THREADS)");
  simulate->add_option("--noise-sd", noise_sd, "override the generator noise sd");
  simulate->add_flag("--paper-scale", paper_scale, "100 replicates, 10000/5000 iterations");

  // fit
  auto *fit = app.add_subcommand("fit", "Fit one dataset and export the trace");
  std::string data_path;
  std::string prior_config;
  std::string trace_path = "trace.csv";
  int eta_columns = 10;
  fit->add_option("--data", data_path, "CSV with header y,u1..up,v1..vd")->required();
  fit->add_option("--prior-config", prior_config, "JSON prior/MCMC config");
  fit->add_option("--out", trace_path, "trace CSV path");
  fit->add_option("--eta-columns", eta_columns, "nuisance columns in the trace")
      ->check(CLI::NonNegativeNumber);

  // reproduce-table
  auto *table = app.add_subcommand("reproduce-table", "Run every cell of a simulation table");
  TableOptions table_opts;
  std::string table_out;
  int table_reps = 0;
  int table_iters = 0;
  int table_burn = -1;
  table->add_option("--table", table_opts.table, "1 (M1, M2) or 2 (M3, M4)")
      ->required()
      ->check(CLI::IsMember({1, 2}));
  table->add_flag("--paper-scale", table_opts.paper_scale, "100 replicates, 10000/5000 iterations");
  table->add_option("--seed", table_opts.seed, "base seed");
  table->add_option("--threads", table_opts.threads, "worker threads");
  table->add_option("--out", table_out, "output directory (default table<k>)");
  table->add_option("--replicates", table_reps, "override the replicate count");
  table->add_option("--iterations", table_iters, "override MCMC iterations");
  table->add_option("--burn-in", table_burn, "override MCMC burn-in");
  table->add_option("--sizes", table_opts.sample_sizes, "sample sizes (default 50 100 200 400)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) {
      ExperimentConfig cfg = config_path.empty()
                                 ? desk_scale_config()
                                 : experiment_config_from_json(load_json_file(config_path));
      if (paper_scale) {
        apply_paper_scale(cfg);
      }
      if (config_path.empty() || model_opt->count()) {
        cfg.model = parse_model(model_name);
      }
      if (config_path.empty() || prior_opt->count()) {
        cfg.prior_setup = parse_prior_setup(prior_name);
      }
      if (config_path.empty() || n_opt->count()) {
        cfg.n = n;
      }
      if (reps_opt->count()) {
        cfg.replicates = replicates;
      }
      if (config_path.empty() || seed_opt->count()) {
        cfg.mcmc.seed = seed;
      }
      if (config_path.empty() || out_opt->count()) {
        cfg.output_dir = out_dir;
      }
      if (iterations > 0) {
        cfg.mcmc.iterations = iterations;
      }
      if (burn_in >= 0) {
        cfg.mcmc.burn_in = burn_in;
      }
      if (threads > 0) {
        cfg.threads = threads;
      }
      if (noise_sd > 0.0) {
        cfg.noise_sd = noise_sd;
      }
      write_reports({run_experiment(cfg)}, cfg.output_dir);
    } else if (fit->parsed()) {
      const Dataset data = read_dataset_csv(data_path);
      const FitConfig cfg =
          prior_config.empty() ? FitConfig{} : fit_config_from_json(load_json_file(prior_config));
      const PriorSpec prior = build_fit_prior(cfg, data);
      const McmcTrace trace = cfg.likelihood == LikelihoodKind::Logistic
                                  ? fit_gplm_logistic(data, prior, cfg.mcmc)
                                  : fit_plm(data, prior, cfg.mcmc);
      std::ofstream out(trace_path);
      if (!out) {
        fail(ErrorKind::Io, "cannot write " + trace_path);
      }
      write_trace_csv(trace, out, eta_columns);
      const PosteriorSummary summary = summarize(trace, {0.025, 0.5, 0.975});
      std::cout << std::setprecision(6);
      for (Eigen::Index s = 0; s < summary.median.size(); ++s) {
        std::cout << "theta" << s + 1 << ": median " << summary.median[s] << ", 95% CI ["
                  << summary.ci95(s, 0) << ", " << summary.ci95(s, 1) << "], se "
                  << summary.se[s] << '\n';
      }
      std::cout << "acceptance rate (a): " << trace.accept_rate_a << '\n';
    } else if (table->parsed()) {
      if (table_reps > 0) {
        table_opts.replicates = table_reps;
      }
      if (table_iters > 0) {
        table_opts.iterations = table_iters;
      }
      if (table_burn >= 0) {
        table_opts.burn_in = table_burn;
      }
      std::vector<ReplicateReport> reports;
      for (const auto &cfg : table_configs(table_opts)) {
        std::cerr << "running " << to_string(cfg.model) << '/' << to_string(cfg.prior_setup)
                  << " n=" << cfg.n << '\n';
        reports.push_back(run_experiment(cfg));
      }
      write_reports(reports,
                    table_out.empty() ? "table" + std::to_string(table_opts.table) : table_out);
    }
  } catch (const Error &e) {
    std::cerr << "semibvm: " << e.what() << '\n';
    return 2;
  } catch (const std::exception &e) {
    std::cerr << "semibvm: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

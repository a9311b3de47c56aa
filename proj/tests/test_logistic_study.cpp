#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "semibvm/harness.hpp"
#include "semibvm/kernels.hpp"
#include "semibvm/lfd.hpp"
#include "semibvm/samplers.hpp"
#include "semibvm/stats.hpp"

using namespace semibvm;

// n = 500, theta0 = 0.5, eta0 = sin, dependent prior built from the true
// conditional law. The posterior median should sit within three posterior
// standard deviations of theta0 in at least 90 of 100 seeded replicates.
TEST_CASE("logistic self-consistency study") {
  constexpr int kReplicates = 100;
  constexpr Eigen::Index kN = 500;
  int hits = 0;
  for (int r = 0; r < kReplicates; ++r) {
    const std::uint64_t seed = stream_seed(2024, static_cast<std::uint64_t>(r));
    Rng data_rng(stream_seed(seed, 0));
    const Dataset data = generate(Model::LogisticDemo, kN, data_rng);
    const GroundTruth &truth = *data.truth;
    const LinearPredictor g0 = [&truth](const Eigen::VectorXd &u, const Eigen::VectorXd &v) {
      return u.dot(truth.theta0) + truth.eta0(v);
    };
    Rng unused(0);
    PriorSpec prior;
    prior.structure = DependentStructure{lfd_gplm_analytic(
        Link::Logit, g0, gaussian_conditional_support(truth.cond_mean_u, 1.0), data.v, unused)};
    prior.bandwidth = FixedBandwidth{bandwidth_nonadaptive(static_cast<double>(kN), 2.0, 1)};
    McmcConfig mcmc;
    mcmc.iterations = 2000;
    mcmc.burn_in = 1000;
    mcmc.seed = stream_seed(seed, 1);
    mcmc.store_eta = false;
    const McmcTrace trace = fit_gplm_logistic(data, prior, mcmc);
    const std::vector<double> draws(trace.theta.col(0).data(),
                                    trace.theta.col(0).data() + trace.draws());
    const double median = stats::quantile(draws, 0.5);
    const double sd = std::sqrt(stats::variance(draws));
    hits += std::abs(median - kTrueTheta) <= 3.0 * sd ? 1 : 0;
  }
  INFO("replicates within 3 sd: " << hits);
  CHECK(hits >= 90);
}

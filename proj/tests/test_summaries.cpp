#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Cholesky>

#include "semibvm/error.hpp"
#include "semibvm/harness.hpp"
#include "semibvm/stats.hpp"
#include "semibvm/summaries.hpp"

using namespace semibvm;

namespace {

Eigen::MatrixXd normal_draws(Eigen::Index rows, double mean, double sd, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd d(rows, 1);
  for (Eigen::Index i = 0; i < rows; ++i) {
    d(i, 0) = mean + sd * rng.normal();
  }
  return d;
}

Dataset scalar_design(const std::vector<double> &w) {
  // U - E[U|V] = 1 exactly, unit noise sd: I = 1 and Delta = sum(w)/sqrt(n).
  const auto n = static_cast<Eigen::Index>(w.size());
  Dataset data;
  data.u.resize(n, 1);
  data.v.resize(n, 1);
  data.y.resize(n);
  GroundTruth truth;
  truth.theta0 = Eigen::VectorXd::Constant(1, 0.5);
  truth.eta0_at_design.resize(n);
  truth.eta0 = [](const Eigen::VectorXd &v) { return std::cos(v[0]); };
  truth.cond_mean_u = [](const Eigen::VectorXd &v) { return Eigen::VectorXd::Constant(1, v[0]); };
  truth.noise_sd = 1.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double v = 0.1 * static_cast<double>(i);
    data.v(i, 0) = v;
    data.u(i, 0) = v + 1.0;
    truth.eta0_at_design[i] = std::cos(v);
    data.y[i] = 0.5 * data.u(i, 0) + std::cos(v) + w[static_cast<std::size_t>(i)];
  }
  data.truth = std::move(truth);
  return data;
}

} // namespace

TEST_CASE("variance reconstruction recovers sigma^2 from exact normal draws") {
  const double n = 400.0;
  const double sigma = 0.7;
  const Eigen::MatrixXd draws = normal_draws(1000000, 0.5, sigma / std::sqrt(n), 1);
  const PosteriorSummary s = summarize_draws(draws, 400, {0.5});
  CHECK(s.vhat(0, 0) == doctest::Approx(sigma * sigma).epsilon(0.01));
  CHECK(s.se[0] == doctest::Approx(sigma / std::sqrt(n)).epsilon(0.01));
  CHECK_FALSE(s.degenerate);
}

TEST_CASE("off-diagonal variance uses the pair sum") {
  const double n = 100.0;
  Eigen::Matrix2d c;
  c << 1.0, 0.6, 0.6, 2.0;
  const Eigen::Matrix2d l = c.llt().matrixL();
  Rng rng(2);
  Eigen::MatrixXd draws(1000000, 2);
  for (Eigen::Index i = 0; i < draws.rows(); ++i) {
    Eigen::Vector2d z(rng.normal(), rng.normal());
    draws.row(i) = (l * z).transpose() / std::sqrt(n);
  }
  const PosteriorSummary s = summarize_draws(draws, 100, {0.5});
  CHECK(s.vhat(0, 1) == s.vhat(1, 0));
  CHECK(s.vhat(0, 0) == doctest::Approx(1.0).epsilon(0.01));
  CHECK(s.vhat(1, 1) == doctest::Approx(2.0).epsilon(0.01));
  CHECK(s.vhat(0, 1) == doctest::Approx(0.6).epsilon(0.03));
}

TEST_CASE("constant draws are flagged degenerate") {
  const Eigen::MatrixXd draws = Eigen::MatrixXd::Constant(200, 1, 1.25);
  const PosteriorSummary s = summarize_draws(draws, 50, {0.1, 0.5, 0.9});
  CHECK(s.median[0] == 1.25);
  CHECK((s.quantiles.array() == 1.25).all());
  CHECK(s.ci95(0, 0) == 1.25);
  CHECK(s.ci95(0, 1) == 1.25);
  CHECK(s.vhat(0, 0) == 0.0);
  CHECK(s.degenerate);
}

TEST_CASE("symmetric draws") {
  Eigen::MatrixXd half = normal_draws(5000, 0.0, 1.0, 3);
  Eigen::MatrixXd draws(10000, 1);
  draws << 2.0 + half.array(), 2.0 - half.array();
  const PosteriorSummary s = summarize_draws(draws, 10, {0.5});
  CHECK(s.median[0] == doctest::Approx(2.0).epsilon(1e-12));
  const Eigen::MatrixXd reflected = (4.0 - draws.array()).matrix();
  const PosteriorSummary r = summarize_draws(reflected, 10, {0.5});
  CHECK(r.vhat(0, 0) == doctest::Approx(s.vhat(0, 0)).epsilon(1e-12));
  // Reflection about any point, not just the centre of symmetry.
  const Eigen::MatrixXd skew = normal_draws(3000, 0.0, 1.0, 4).array().exp().matrix();
  const PosteriorSummary a = summarize_draws(skew, 10, {0.5});
  const PosteriorSummary b = summarize_draws((-skew).eval(), 10, {0.5});
  CHECK(a.vhat(0, 0) == doctest::Approx(b.vhat(0, 0)).epsilon(1e-12));
  CHECK(a.median[0] == doctest::Approx(-b.median[0]).epsilon(1e-12));
}

TEST_CASE("summaries ignore draw order") {
  Eigen::MatrixXd draws(500, 2);
  Rng rng(5);
  for (Eigen::Index i = 0; i < 500; ++i) {
    draws(i, 0) = rng.normal();
    draws(i, 1) = draws(i, 0) + rng.uniform();
  }
  std::vector<Eigen::Index> order(500);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng.engine());
  Eigen::MatrixXd shuffled(500, 2);
  for (Eigen::Index i = 0; i < 500; ++i) {
    shuffled.row(i) = draws.row(order[static_cast<std::size_t>(i)]);
  }
  const std::vector<double> levels{0.05, 0.25, 0.5, 0.75, 0.95};
  const PosteriorSummary a = summarize_draws(draws, 30, levels);
  const PosteriorSummary b = summarize_draws(shuffled, 30, levels);
  CHECK(a.quantiles == b.quantiles);
  CHECK(a.vhat == b.vhat);
  CHECK(a.median == b.median);
}

TEST_CASE("quantiles are monotone in the level") {
  Rng rng(6);
  std::vector<double> levels;
  for (int k = 1; k < 100; ++k) {
    levels.push_back(k / 100.0);
  }
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::MatrixXd draws(150 + trial * 13, 3);
    for (Eigen::Index i = 0; i < draws.rows(); ++i) {
      draws(i, 0) = rng.normal();
      draws(i, 1) = std::floor(3.0 * rng.uniform()); // heavy ties
      draws(i, 2) = std::exp(3.0 * rng.normal());
    }
    const PosteriorSummary s = summarize_draws(draws, 40, levels);
    for (Eigen::Index c = 0; c < 3; ++c) {
      for (Eigen::Index k = 1; k < s.quantiles.cols(); ++k) {
        CHECK(s.quantiles(c, k) >= s.quantiles(c, k - 1));
      }
      CHECK(s.median[c] == s.quantile(c, 0.5));
      CHECK(s.ci95(c, 0) <= s.median[c]);
      CHECK(s.median[c] <= s.ci95(c, 1));
    }
  }
}

TEST_CASE("variance reconstruction does not depend on alpha") {
  const Eigen::MatrixXd draws = normal_draws(200000, 1.0, 0.1, 7);
  const double v05 = summarize_draws(draws, 100, {0.5}, 0.05).vhat(0, 0);
  const double v10 = summarize_draws(draws, 100, {0.5}, 0.10).vhat(0, 0);
  CHECK(v05 == doctest::Approx(v10).epsilon(0.02));
}

TEST_CASE("summary input checks") {
  CHECK_THROWS_AS(summarize_draws(Eigen::MatrixXd::Zero(99, 1), 10, {0.5}), Error);
  CHECK_NOTHROW(summarize_draws(Eigen::MatrixXd::Zero(100, 1), 10, {0.5}));
  CHECK_THROWS_AS(summarize_draws(Eigen::MatrixXd::Zero(200, 1), 10, {0.0}), Error);
  CHECK_THROWS_AS(summarize_draws(Eigen::MatrixXd::Zero(200, 1), 10, {0.5}, 1.0), Error);
  CHECK_THROWS_AS(summarize_draws(Eigen::MatrixXd::Zero(200, 1), 0, {0.5}), Error);
  const PosteriorSummary s = summarize_draws(normal_draws(200, 0, 1, 1), 10, {0.5});
  CHECK_THROWS_AS(s.quantile(0, 0.3), Error);
}

TEST_CASE("oracle with zero residuals") {
  Rng rng(8);
  Dataset data = generate(Model::M1, 50, rng, 0.0);
  const OracleQuantities o = oracle_plm(data, 0.5);
  CHECK(o.delta_n.cwiseAbs().maxCoeff() < 1e-12);
  CHECK(o.source == OracleSource::AnalyticPLM);
  CHECK(o.theta0[0] == 0.5);
}

TEST_CASE("oracle scalar reduction") {
  const std::vector<double> w{0.3, -1.2, 0.4, 2.0, -0.1, 0.05, 0.7};
  const OracleQuantities o = oracle_plm(scalar_design(w));
  CHECK(o.efficient_info(0, 0) == doctest::Approx(1.0));
  const double sum = std::accumulate(w.begin(), w.end(), 0.0);
  CHECK(o.delta_n[0] == doctest::Approx(sum / std::sqrt(7.0)));
}

TEST_CASE("oracle matches a row-by-row evaluation on M1") {
  Rng rng(2718);
  const Dataset data = generate(Model::M1, 10, rng);
  const OracleQuantities o = oracle_plm(data);
  double ss = 0.0;
  double score = 0.0;
  for (int i = 0; i < 10; ++i) {
    const double v = data.v(i, 0);
    const double c = data.u(i, 0) - 0.5 * std::abs(v) * v * v;
    const double w = data.y[i] - 0.5 * data.u(i, 0) - std::exp(v);
    ss += c * c;
    score += w * c;
  }
  const double info = ss / (10.0 * 0.25);
  const double delta = (score / 0.25) / info / std::sqrt(10.0);
  CHECK(o.efficient_info(0, 0) == doctest::Approx(info).epsilon(1e-12));
  CHECK(o.delta_n[0] == doctest::Approx(delta).epsilon(1e-12));
}

TEST_CASE("oracle rejects a singular design") {
  Dataset data = scalar_design({0.1, 0.2, 0.3});
  data.u.col(0) = data.v.col(0); // U = E[U|V] exactly
  CHECK_THROWS_AS(oracle_plm(data), Error);
  try {
    oracle_plm(data);
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::DegenerateDesign);
  }
  Dataset bare = data;
  bare.truth.reset();
  CHECK_THROWS_AS(oracle_plm(bare), Error);
}

TEST_CASE("standardized Delta_n is standard normal across datasets") {
  constexpr int kDatasets = 1000;
  std::vector<double> z;
  z.reserve(kDatasets);
  for (int r = 0; r < kDatasets; ++r) {
    Rng rng(stream_seed(99, static_cast<std::uint64_t>(r)));
    const Dataset data = generate(Model::M1, 100, rng);
    const OracleQuantities o = oracle_plm(data);
    z.push_back(o.delta_n[0] * std::sqrt(o.efficient_info(0, 0)));
  }
  const double d = stats::ks_statistic(z, stats::normal_cdf);
  INFO("KS = " << d);
  CHECK(stats::ks_pvalue(d, z.size()) > 0.01);
}

TEST_CASE("logistic oracle") {
  Rng rng(10);
  const Dataset data = generate(Model::LogisticDemo, 200, rng);
  const Eigen::MatrixXd h = -0.5 * data.v;
  const OracleQuantities o = oracle_gplm_logistic(data, h);
  double info = 0.0;
  double score = 0.0;
  for (Eigen::Index i = 0; i < 200; ++i) {
    const double g = 0.5 * data.u(i, 0) + std::sin(data.v(i, 0));
    const double p = 1.0 / (1.0 + std::exp(-g));
    const double dir = data.u(i, 0) - 0.5 * data.v(i, 0);
    info += p * (1.0 - p) * dir * dir;
    score += (data.y[i] - p) * dir;
  }
  info /= 200.0;
  CHECK(o.efficient_info(0, 0) == doctest::Approx(info));
  CHECK(o.delta_n[0] == doctest::Approx(score / info / std::sqrt(200.0)));
  CHECK(o.source == OracleSource::AnalyticGPLMLogistic);
  CHECK_THROWS_AS(oracle_gplm_logistic(data, Eigen::MatrixXd::Zero(3, 1)), Error);
}

TEST_CASE("KS distance to the limit law") {
  OracleQuantities o;
  o.theta0 = Eigen::VectorXd::Constant(1, 0.5);
  o.efficient_info = Eigen::MatrixXd::Constant(1, 1, 4.0);
  o.delta_n = Eigen::VectorXd::Constant(1, 0.8);
  const Eigen::Index n = 100;
  const double centre = 0.5 + 0.8 / 10.0;
  const double sd = std::sqrt(0.25 / 100.0);
  const Eigen::Index draws = 10000;
  const Eigen::MatrixXd exact = normal_draws(draws, centre, sd, 11);
  CHECK(bvm_distance(exact, n, o)[0] < 1.63 / std::sqrt(static_cast<double>(draws)));
  const Eigen::MatrixXd shifted = (exact.array() + 3.0 * sd).matrix();
  const double ks = bvm_distance(shifted, n, o)[0];
  // Analytic KS between N(0,1) and N(3,1) is 2 Phi(1.5) - 1.
  CHECK(ks > 0.6);
  CHECK(ks == doctest::Approx(2.0 * stats::normal_cdf(1.5) - 1.0).epsilon(0.02));
  CHECK_THROWS_AS(bvm_distance(Eigen::MatrixXd::Zero(10, 2), n, o), Error);
}

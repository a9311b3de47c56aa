#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/LU>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "semibvm/error.hpp"
#include "semibvm/priors.hpp"

using namespace semibvm;

namespace {

PriorSpec adaptive(double a0, double b0, double t0) {
  PriorSpec spec;
  spec.bandwidth = AdaptiveBandwidth{a0, b0, t0};
  return spec;
}

PriorSpec dependent_with(const Eigen::MatrixXd &direction) {
  PriorSpec spec;
  spec.structure = DependentStructure{LfdEstimate{direction, std::nullopt}};
  return spec;
}

} // namespace

TEST_CASE("inverse-bandwidth prior log ratios") {
  const PriorSpec unit = adaptive(1.0, 1.0, 0.0);
  CHECK(log_prior_inverse_bandwidth(1.0, unit, 1) - log_prior_inverse_bandwidth(2.0, unit, 1) ==
        doctest::Approx(1.0));
  CHECK(log_prior_inverse_bandwidth(1.0, unit, 2) - log_prior_inverse_bandwidth(2.0, unit, 2) ==
        doctest::Approx(-std::log(2.0) + 3.0));
  // Unit exponential density at a = 1 for d = 1.
  CHECK(log_prior_inverse_bandwidth(1.0, unit, 1) == doctest::Approx(-1.0));
}

TEST_CASE("inverse-bandwidth prior truncation and errors") {
  const PriorSpec truncated = adaptive(1.0, 1.0, 0.8);
  CHECK(log_prior_inverse_bandwidth(0.5, truncated, 1) ==
        -std::numeric_limits<double>::infinity());
  CHECK(std::isfinite(log_prior_inverse_bandwidth(0.9, truncated, 1)));
  CHECK_THROWS_AS(log_prior_inverse_bandwidth(0.0, truncated, 1), Error);
  CHECK_THROWS_AS(log_prior_inverse_bandwidth(-1.0, truncated, 1), Error);

  PriorSpec fixed;
  fixed.bandwidth = FixedBandwidth{2.0};
  try {
    log_prior_inverse_bandwidth(1.0, fixed, 1);
    FAIL("expected contract violation");
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::ContractViolation);
  }
}

TEST_CASE("inverse-bandwidth prior integrates to one above the truncation point") {
  struct Case {
    double a0, b0, t0;
    int d;
  };
  for (const Case c : {Case{1, 1, 0, 1}, Case{1, 1, 0, 2}, Case{2.5, 0.7, 0, 3},
                       Case{1, 1, 0.5, 1}, Case{2, 1.5, 0.8, 2}}) {
    const PriorSpec spec = adaptive(c.a0, c.b0, c.t0);
    auto density = [&](double a) { return std::exp(log_prior_inverse_bandwidth(a, spec, c.d)); };
    double total = 0.0;
    if (c.t0 > 0.0) {
      boost::math::quadrature::exp_sinh<double> tail;
      total = tail.integrate([&](double x) { return density(c.t0 + x); }, 0.0,
                             std::numeric_limits<double>::infinity());
    } else {
      boost::math::quadrature::tanh_sinh<double> head;
      boost::math::quadrature::exp_sinh<double> tail;
      total = head.integrate(density, 0.0, 1.0) +
              tail.integrate([&](double x) { return density(1.0 + x); }, 0.0,
                             std::numeric_limits<double>::infinity());
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("prior mean shift") {
  Eigen::MatrixXd direction(3, 1);
  direction << -1.0, -0.5, 0.0;
  const PriorSpec spec = dependent_with(direction);
  CHECK(prior_mean_shift(Eigen::VectorXd::Zero(1), spec).cwiseAbs().maxCoeff() == 0.0);
  const Eigen::VectorXd shift = prior_mean_shift(Eigen::VectorXd::Constant(1, 2.0), spec);
  CHECK(shift[0] == -2.0);
  CHECK(shift[1] == -1.0);
  CHECK(shift[2] == 0.0);
  CHECK((prior_mean_shift(Eigen::VectorXd::Constant(1, 0.5), spec) - 0.5 * direction.col(0))
            .cwiseAbs()
            .maxCoeff() == 0.0);

  PriorSpec independent;
  try {
    prior_mean_shift(Eigen::VectorXd::Zero(1), independent);
    FAIL("expected contract violation");
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::ContractViolation);
  }
}

TEST_CASE("dependent joint prior separates after recentring") {
  Rng rng(12);
  const int n = 6;
  const Eigen::MatrixXd v = Eigen::MatrixXd::NullaryExpr(n, 1, [&] { return rng.normal(); });
  const Eigen::MatrixXd direction =
      Eigen::MatrixXd::NullaryExpr(n, 2, [&] { return rng.normal(); });
  PriorSpec spec = dependent_with(direction);
  spec.theta_precision = 0.3;
  const GramMatrix g = gram(v, KernelConfig{0.9});
  const Eigen::MatrixXd cov = g.values();
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::VectorXd theta = rng.normal_vector(2);
    const Eigen::VectorXd eta = rng.normal_vector(n);
    // Independent evaluation with an explicit inverse and determinant.
    const Eigen::VectorXd xi = eta - direction * theta;
    const double log_gp = -0.5 * (n * std::log(2.0 * std::numbers::pi) +
                                  std::log(cov.determinant()) + xi.dot(cov.inverse() * xi));
    const double log_theta = std::log(0.3 / (2.0 * std::numbers::pi)) -
                             0.5 * 0.3 * theta.squaredNorm();
    CHECK(log_prior_joint(theta, eta, g, spec) ==
          doctest::Approx(log_theta + log_gp).epsilon(1e-8));
  }
}

TEST_CASE("prior validation") {
  PriorSpec spec;
  CHECK_NOTHROW(spec.validate());
  spec.theta_precision = 0.0;
  CHECK_THROWS_AS(spec.validate(), Error);
  spec = PriorSpec{};
  spec.bandwidth = AdaptiveBandwidth{0.0, 1.0, 0.0};
  CHECK_THROWS_AS(spec.validate(), Error);
  spec = PriorSpec{};
  spec.bandwidth = FixedBandwidth{-1.0};
  CHECK_THROWS_AS(spec.validate(), Error);
  spec = dependent_with(Eigen::MatrixXd::Zero(4, 1));
  CHECK_NOTHROW(spec.validate(4, 1));
  CHECK_THROWS_AS(spec.validate(5, 1), Error);
}

#include <doctest.h>

#include <cmath>
#include <vector>

#include "semibvm/error.hpp"
#include "semibvm/rng.hpp"
#include "semibvm/stats.hpp"

using namespace semibvm;

TEST_CASE("type-7 quantiles interpolate between order statistics") {
  const std::vector<double> x{4.0, 1.0, 3.0, 2.0};
  CHECK(stats::quantile(x, 0.5) == doctest::Approx(2.5));
  CHECK(stats::quantile(x, 0.25) == doctest::Approx(1.75));
  CHECK(stats::quantile(x, 0.0) == 1.0);
  CHECK(stats::quantile(x, 1.0) == 4.0);
  CHECK_THROWS_AS(stats::quantile({}, 0.5), Error);
}

TEST_CASE("normal quantile inverts the cdf") {
  for (double p : {0.001, 0.025, 0.3, 0.5, 0.975}) {
    CHECK(stats::normal_cdf(stats::normal_quantile(p)) == doctest::Approx(p).epsilon(1e-12));
  }
  CHECK(stats::normal_quantile(0.975) == doctest::Approx(1.959963985));
}

TEST_CASE("KS critical value matches the classical 1.63/sqrt(n) at 1%") {
  CHECK(stats::ks_critical_value(10000, 0.01) * 100.0 == doctest::Approx(1.628).epsilon(0.01));
  CHECK(stats::ks_critical_value(10000, 0.05) * 100.0 == doctest::Approx(1.358).epsilon(0.01));
}

TEST_CASE("KS statistic of a single point against the uniform") {
  // One sample at 0.3: sup is max(1 - 0.3, 0.3) = 0.7.
  const double d = stats::ks_statistic({0.3}, [](double x) { return x; });
  CHECK(d == doctest::Approx(0.7));
}

TEST_CASE("effective sample size of iid and AR(1) chains") {
  Rng rng(3);
  const int n = 20000;
  std::vector<double> iid(n);
  std::vector<double> ar(n);
  double prev = 0.0;
  const double rho = 0.9;
  for (int i = 0; i < n; ++i) {
    iid[i] = rng.normal();
    prev = rho * prev + std::sqrt(1 - rho * rho) * rng.normal();
    ar[i] = prev;
  }
  CHECK(stats::effective_sample_size(iid) == doctest::Approx(n).epsilon(0.15));
  const double expected = n * (1 - rho) / (1 + rho);
  CHECK(stats::effective_sample_size(ar) == doctest::Approx(expected).epsilon(0.3));
}

TEST_CASE("spearman correlation") {
  const std::vector<double> x{1, 2, 3, 4, 5};
  const std::vector<double> y{2, 4, 9, 16, 100};
  const std::vector<double> z{5, 4, 3, 2, 1};
  CHECK(stats::spearman(x, y) == doctest::Approx(1.0));
  CHECK(stats::spearman(x, z) == doctest::Approx(-1.0));
}

TEST_CASE("stream seeds do not depend on scheduling") {
  CHECK(stream_seed(7, 3) == stream_seed(7, 3));
  CHECK(stream_seed(7, 3) != stream_seed(7, 4));
  CHECK(stream_seed(7, 3) != stream_seed(8, 3));
  Rng a(11);
  Rng b(11);
  for (int i = 0; i < 10; ++i) {
    CHECK(a.normal() == b.normal());
  }
}

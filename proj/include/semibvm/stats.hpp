#pragma once

#include <functional>
#include <span>
#include <vector>

namespace semibvm::stats {

double normal_cdf(double x);
double normal_quantile(double p);

/// Empirical quantile with linear interpolation between order statistics
/// (Hyndman-Fan type 7). `sorted` must be ascending and nonempty.
double quantile_sorted(std::span<const double> sorted, double level);
double quantile(std::vector<double> values, double level);

/// Two-sided Kolmogorov-Smirnov distance sup|F_n - F|.
double ks_statistic(std::vector<double> samples,
                    const std::function<double(double)> &cdf);

/// Asymptotic critical value of the one-sample KS statistic.
double ks_critical_value(std::size_t n, double level);

/// Asymptotic p-value of sqrt(n)*D under the null.
double ks_pvalue(double statistic, std::size_t n);

double mean(std::span<const double> x);
double variance(std::span<const double> x);
double skewness(std::span<const double> x);

/// Effective sample size from Geyer's initial positive sequence estimator.
double effective_sample_size(std::span<const double> x);

/// Spearman rank correlation with average ranks for ties.
double spearman(std::span<const double> x, std::span<const double> y);

} // namespace semibvm::stats

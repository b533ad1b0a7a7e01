#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace cyber::stats {

double mean(std::span<const double> x);
/// Unbiased sample variance. Computed on data shifted by x[0] so that a
/// constant sample yields exactly zero.
double variance(std::span<const double> x);
double standard_error(std::span<const double> x);
double covariance(std::span<const double> x, std::span<const double> y);
double pearson(std::span<const double> x, std::span<const double> y);
/// Spearman rank correlation with average ranks for ties.
double spearman(std::span<const double> x, std::span<const double> y);
/// Kendall's tau-b in O(n log n) (Knight's algorithm).
double kendall_tau(std::span<const double> x, std::span<const double> y);

std::vector<double> average_ranks(std::span<const double> x);

/// sup_x |F_n(x) - F(x)| for a continuous reference cdf.
double ks_statistic(std::span<const double> sample, const std::function<double(double)>& cdf);
/// Asymptotic one-sample Kolmogorov-Smirnov critical value.
double ks_critical(std::size_t n, double alpha);

struct ChiSquareResult {
    double statistic = 0.0;
    int dof = 0;
    double p_value = 1.0;
};

/// Two-sample homogeneity test on integer-valued observations. Adjacent
/// values are pooled until each bin has pooled count >= min_bin_count.
ChiSquareResult chi_square_two_sample(std::span<const std::int64_t> a,
                                      std::span<const std::int64_t> b,
                                      double min_bin_count = 10.0);

/// Goodness of fit of observed counts against expected cell probabilities.
ChiSquareResult chi_square_goodness_of_fit(std::span<const std::int64_t> observed,
                                           std::span<const double> probabilities);

}  // namespace cyber::stats

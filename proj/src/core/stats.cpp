#include "cyber/core/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include <boost/math/distributions/chi_squared.hpp>

#include "cyber/core/errors.hpp"

namespace cyber::stats {

double mean(std::span<const double> x)
{
    require(!x.empty(), "mean of empty sample");
    const double shift = x[0];
    double acc = 0.0;
    for (double v : x) acc += v - shift;
    return shift + acc / static_cast<double>(x.size());
}

double variance(std::span<const double> x)
{
    require(x.size() >= 2, "variance needs at least two observations");
    const double shift = x[0];
    double s = 0.0, ss = 0.0;
    for (double v : x) {
        const double d = v - shift;
        s += d;
        ss += d * d;
    }
    const double n = static_cast<double>(x.size());
    return std::max(0.0, (ss - s * s / n) / (n - 1.0));
}

double standard_error(std::span<const double> x)
{
    return std::sqrt(variance(x) / static_cast<double>(x.size()));
}

double covariance(std::span<const double> x, std::span<const double> y)
{
    require(x.size() == y.size() && x.size() >= 2, "covariance needs aligned samples of size >= 2");
    const double sx = x[0], sy = y[0];
    double a = 0.0, b = 0.0, ab = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - sx, dy = y[i] - sy;
        a += dx;
        b += dy;
        ab += dx * dy;
    }
    const double n = static_cast<double>(x.size());
    return (ab - a * b / n) / (n - 1.0);
}

double pearson(std::span<const double> x, std::span<const double> y)
{
    const double vx = variance(x), vy = variance(y);
    if (vx == 0.0 || vy == 0.0) return 0.0;
    return covariance(x, y) / std::sqrt(vx * vy);
}

std::vector<double> average_ranks(std::span<const double> x)
{
    std::vector<std::size_t> idx(x.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return x[a] < x[b]; });
    std::vector<double> ranks(x.size());
    std::size_t i = 0;
    while (i < idx.size()) {
        std::size_t j = i;
        while (j + 1 < idx.size() && x[idx[j + 1]] == x[idx[i]]) ++j;
        const double r = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = r;
        i = j + 1;
    }
    return ranks;
}

double spearman(std::span<const double> x, std::span<const double> y)
{
    const auto rx = average_ranks(x);
    const auto ry = average_ranks(y);
    return pearson(rx, ry);
}

namespace {

// Merge sort on y counting exchanges (discordant swaps).
std::uint64_t merge_count(std::vector<double>& v, std::vector<double>& buf, std::size_t lo, std::size_t hi)
{
    if (hi - lo < 2) return 0;
    const std::size_t mid = lo + (hi - lo) / 2;
    std::uint64_t swaps = merge_count(v, buf, lo, mid) + merge_count(v, buf, mid, hi);
    std::size_t i = lo, j = mid, k = lo;
    while (i < mid && j < hi) {
        if (v[j] < v[i]) {
            swaps += mid - i;
            buf[k++] = v[j++];
        } else {
            buf[k++] = v[i++];
        }
    }
    while (i < mid) buf[k++] = v[i++];
    while (j < hi) buf[k++] = v[j++];
    std::copy(buf.begin() + static_cast<std::ptrdiff_t>(lo), buf.begin() + static_cast<std::ptrdiff_t>(hi),
              v.begin() + static_cast<std::ptrdiff_t>(lo));
    return swaps;
}

std::uint64_t tied_pairs(const std::vector<double>& sorted)
{
    std::uint64_t total = 0, run = 1;
    for (std::size_t i = 1; i <= sorted.size(); ++i) {
        if (i < sorted.size() && sorted[i] == sorted[i - 1]) {
            ++run;
        } else {
            total += run * (run - 1) / 2;
            run = 1;
        }
    }
    return total;
}

}  // namespace

double kendall_tau(std::span<const double> x, std::span<const double> y)
{
    require(x.size() == y.size() && x.size() >= 2, "kendall_tau needs aligned samples of size >= 2");
    const std::size_t n = x.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) {
        return x[a] < x[b] || (x[a] == x[b] && y[a] < y[b]);
    });
    std::vector<double> xs(n), ys(n);
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = x[idx[i]];
        ys[i] = y[idx[i]];
    }
    const std::uint64_t n0 = static_cast<std::uint64_t>(n) * (n - 1) / 2;
    const std::uint64_t n1 = tied_pairs(xs);
    std::uint64_t n3 = 0;
    {
        std::uint64_t run = 1;
        for (std::size_t i = 1; i <= n; ++i) {
            if (i < n && xs[i] == xs[i - 1] && ys[i] == ys[i - 1]) {
                ++run;
            } else {
                n3 += run * (run - 1) / 2;
                run = 1;
            }
        }
    }
    std::vector<double> buf(n);
    const std::uint64_t swaps = merge_count(ys, buf, 0, n);
    const std::uint64_t n2 = tied_pairs(ys);
    const double num = static_cast<double>(n0) - static_cast<double>(n1) - static_cast<double>(n2) +
                       static_cast<double>(n3) - 2.0 * static_cast<double>(swaps);
    const double den = std::sqrt(static_cast<double>(n0 - n1) * static_cast<double>(n0 - n2));
    return den == 0.0 ? 0.0 : num / den;
}

double ks_statistic(std::span<const double> sample, const std::function<double(double)>& cdf)
{
    require(!sample.empty(), "ks_statistic of empty sample");
    std::vector<double> s(sample.begin(), sample.end());
    std::sort(s.begin(), s.end());
    const double n = static_cast<double>(s.size());
    double d = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double f = cdf(s[i]);
        d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
    }
    return d;
}

double ks_critical(std::size_t n, double alpha)
{
    // Asymptotic Kolmogorov quantile sqrt(-ln(alpha/2)/2), with the usual
    // finite-sample correction.
    const double c = std::sqrt(-0.5 * std::log(alpha / 2.0));
    const double rn = std::sqrt(static_cast<double>(n));
    return c / (rn + 0.12 + 0.11 / rn);
}

namespace {

double chi_square_upper_tail(double statistic, int dof)
{
    if (dof <= 0) return 1.0;
    boost::math::chi_squared dist(dof);
    return boost::math::cdf(boost::math::complement(dist, statistic));
}

}  // namespace

ChiSquareResult chi_square_two_sample(std::span<const std::int64_t> a, std::span<const std::int64_t> b,
                                      double min_bin_count)
{
    require(!a.empty() && !b.empty(), "chi_square_two_sample needs nonempty samples");
    std::map<std::int64_t, std::pair<double, double>> counts;
    for (auto v : a) counts[v].first += 1.0;
    for (auto v : b) counts[v].second += 1.0;

    std::vector<std::pair<double, double>> bins;
    std::pair<double, double> acc{0.0, 0.0};
    for (const auto& [value, c] : counts) {
        acc.first += c.first;
        acc.second += c.second;
        if (acc.first + acc.second >= min_bin_count) {
            bins.push_back(acc);
            acc = {0.0, 0.0};
        }
    }
    if (acc.first + acc.second > 0.0) {
        if (bins.empty()) {
            bins.push_back(acc);
        } else {
            bins.back().first += acc.first;
            bins.back().second += acc.second;
        }
    }
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    const double n = na + nb;
    ChiSquareResult r;
    for (const auto& [ca, cb] : bins) {
        const double tot = ca + cb;
        const double ea = tot * na / n, eb = tot * nb / n;
        r.statistic += (ca - ea) * (ca - ea) / ea + (cb - eb) * (cb - eb) / eb;
    }
    r.dof = static_cast<int>(bins.size()) - 1;
    r.p_value = chi_square_upper_tail(r.statistic, r.dof);
    return r;
}

ChiSquareResult chi_square_goodness_of_fit(std::span<const std::int64_t> observed,
                                           std::span<const double> probabilities)
{
    require(observed.size() == probabilities.size() && !observed.empty(),
            "chi_square_goodness_of_fit needs aligned cells");
    double n = 0.0;
    for (auto o : observed) n += static_cast<double>(o);
    ChiSquareResult r;
    int cells = 0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        const double e = n * probabilities[i];
        if (e <= 0.0) continue;
        const double d = static_cast<double>(observed[i]) - e;
        r.statistic += d * d / e;
        ++cells;
    }
    r.dof = cells - 1;
    r.p_value = chi_square_upper_tail(r.statistic, r.dof);
    return r;
}

}  // namespace cyber::stats

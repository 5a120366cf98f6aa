#include "graderalign/stat_lab.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace graderalign {

namespace {

bool is_constant(const std::vector<double>& xs) {
    return std::all_of(xs.begin(), xs.end(), [&](double x) { return x == xs.front(); });
}

double pearson(const std::vector<double>& xs, const std::vector<double>& ys) {
    const std::size_t n = xs.size();
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double num = 0, dx = 0, dy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        num += (xs[i] - mx) * (ys[i] - my);
        dx += (xs[i] - mx) * (xs[i] - mx);
        dy += (ys[i] - my) * (ys[i] - my);
    }
    return num / std::sqrt(dx * dy);
}

}  // namespace

SummaryStat mean_std(const std::vector<double>& xs) {
    if (xs.empty()) throw std::invalid_argument("mean_std: empty list");
    SummaryStat s;
    s.n = static_cast<int>(xs.size());
    s.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / s.n;
    double acc = 0;
    for (double x : xs) acc += (x - s.mean) * (x - s.mean);
    s.std = std::sqrt(acc / s.n);
    return s;
}

double t_tail(double t, double df) {
    if (!(df > 0)) throw std::invalid_argument("t_tail: df must be positive");
    if (t == 0) return 1.0;
    boost::math::students_t_distribution<double> dist(df);
    return 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t)));
}

TTestResult paired_t_test(const std::vector<double>& a, const std::vector<double>& b,
                          double alpha) {
    if (a.size() != b.size() || a.size() < 2)
        throw std::invalid_argument("paired_t_test: samples must be equal-length with n >= 2");

    const std::size_t n = a.size();
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = a[i] - b[i];

    const double mean = std::accumulate(d.begin(), d.end(), 0.0) / n;
    double acc = 0;
    for (double x : d) acc += (x - mean) * (x - mean);
    const double sd = std::sqrt(acc / (n - 1));

    TTestResult res;
    res.alpha = alpha;
    res.df = static_cast<double>(n - 1);
    if (sd == 0) {
        if (mean == 0) {
            res.t = 0;
            res.p_two_tailed = 1.0;
        } else {
            res.t = mean > 0 ? std::numeric_limits<double>::infinity()
                             : -std::numeric_limits<double>::infinity();
            res.p_two_tailed = 0.0;
            res.degenerate = true;
        }
    } else {
        res.t = mean / (sd / std::sqrt(static_cast<double>(n)));
        res.p_two_tailed = t_tail(res.t, res.df);
    }
    res.reject_at_alpha = res.p_two_tailed < alpha;
    return res;
}

TTestResult independent_t_test(const std::vector<double>& a, const std::vector<double>& b,
                               double alpha) {
    if (a.size() < 2 || b.size() < 2)
        throw std::invalid_argument("independent_t_test: both samples need n >= 2");
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    const double ma = std::accumulate(a.begin(), a.end(), 0.0) / na;
    const double mb = std::accumulate(b.begin(), b.end(), 0.0) / nb;
    double va = 0, vb = 0;
    for (double x : a) va += (x - ma) * (x - ma);
    for (double x : b) vb += (x - mb) * (x - mb);
    const double pooled = (va + vb) / (na + nb - 2);

    TTestResult res;
    res.alpha = alpha;
    res.df = na + nb - 2;
    if (pooled == 0) {
        if (ma == mb) {
            res.t = 0;
            res.p_two_tailed = 1.0;
        } else {
            res.t = (ma > mb ? 1 : -1) * std::numeric_limits<double>::infinity();
            res.p_two_tailed = 0.0;
            res.degenerate = true;
        }
    } else {
        res.t = (ma - mb) / std::sqrt(pooled * (1 / na + 1 / nb));
        res.p_two_tailed = t_tail(res.t, res.df);
    }
    res.reject_at_alpha = res.p_two_tailed < alpha;
    return res;
}

std::vector<double> average_ranks(const std::vector<double>& xs) {
    const std::size_t n = xs.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return xs[i] < xs[j]; });

    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && xs[order[j + 1]] == xs[order[i]]) ++j;
        const double avg = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

SpearmanResult spearman(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 3)
        throw std::invalid_argument("spearman: need equal-length vectors with n >= 3");
    if (is_constant(xs) || is_constant(ys))
        throw std::invalid_argument("spearman: correlation undefined for a constant vector");

    SpearmanResult res;
    res.n = static_cast<int>(xs.size());
    const auto rx = average_ranks(xs);
    const auto ry = average_ranks(ys);
    res.rho = std::clamp(pearson(rx, ry), -1.0, 1.0);

    if (std::fabs(res.rho) == 1.0) {
        res.p_value = 0.0;
    } else {
        const double df = res.n - 2;
        const double t = res.rho * std::sqrt(df / (1.0 - res.rho * res.rho));
        res.p_value = t_tail(t, df);
    }
    return res;
}

double spearman_exact_p(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 3 || xs.size() > 8)
        throw std::invalid_argument("spearman_exact_p: need 3 <= n <= 8");
    if (is_constant(xs) || is_constant(ys))
        throw std::invalid_argument("spearman_exact_p: constant vector");

    const auto rx = average_ranks(xs);
    auto ry = average_ranks(ys);
    const double observed = std::fabs(pearson(rx, ry));

    std::vector<double> perm = ry;
    std::sort(perm.begin(), perm.end());
    std::size_t total = 0, at_least = 0;
    do {
        ++total;
        if (std::fabs(pearson(rx, perm)) >= observed - 1e-12) ++at_least;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return static_cast<double>(at_least) / static_cast<double>(total);
}

}  // namespace graderalign

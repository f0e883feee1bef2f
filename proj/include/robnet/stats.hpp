#ifndef ROBNET_STATS_HPP
#define ROBNET_STATS_HPP

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace robnet {

namespace stats_detail {

// Regularized upper incomplete gamma Q(a, x); series for x < a+1, continued
// fraction otherwise.
inline double gamma_q(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_q: domain");
    if (x == 0.0) return 1.0;
    double gln = std::lgamma(a);
    if (x < a + 1.0) {
        double ap = a, sum = 1.0 / a, del = sum;
        for (int i = 0; i < 500; ++i) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::abs(del) < std::abs(sum) * 1e-15) break;
        }
        return 1.0 - sum * std::exp(-x + a * std::log(x) - gln);
    }
    // Lentz continued fraction
    const double tiny = 1e-300;
    double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
    for (int i = 1; i < 500; ++i) {
        double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-15) break;
    }
    return std::exp(-x + a * std::log(x) - gln) * h;
}

} // namespace stats_detail

// Upper-tail p-value of the chi-square distribution.
inline double chi_square_sf(double x, int df) {
    if (df < 1) throw std::invalid_argument("chi_square_sf: df < 1");
    if (x <= 0.0) return 1.0;
    return stats_detail::gamma_q(static_cast<double>(df) / 2.0, x / 2.0);
}

struct KruskalWallisResult {
    double h = 0.0;
    double p_value = 1.0;
    bool significant = false; // at alpha = 0.05
    bool degenerate = false;  // all values identical
};

// Rank-based H with tie correction; significance via chi-square with k-1
// degrees of freedom at alpha = 0.05.
inline KruskalWallisResult kruskal_wallis(const std::vector<std::vector<double>>& groups) {
    if (groups.size() < 2) throw std::invalid_argument("kruskal_wallis: need >= 2 groups");
    std::vector<std::pair<double, std::size_t>> pooled; // (value, group)
    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
        if (groups[gi].empty()) throw std::invalid_argument("kruskal_wallis: empty group");
        for (double v : groups[gi]) pooled.emplace_back(v, gi);
    }
    const auto n = static_cast<double>(pooled.size());
    std::sort(pooled.begin(), pooled.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    KruskalWallisResult res;
    if (pooled.front().first == pooled.back().first) {
        res.degenerate = true;
        return res;
    }
    // midranks and tie correction
    std::vector<double> rank_sum(groups.size(), 0.0);
    double tie_term = 0.0;
    std::size_t i = 0;
    while (i < pooled.size()) {
        std::size_t j = i;
        while (j < pooled.size() && pooled[j].first == pooled[i].first) ++j;
        double mid = (static_cast<double>(i) + static_cast<double>(j - 1)) / 2.0 + 1.0;
        auto t = static_cast<double>(j - i);
        tie_term += t * t * t - t;
        for (std::size_t k = i; k < j; ++k) rank_sum[pooled[k].second] += mid;
        i = j;
    }
    double h = 0.0;
    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
        auto ni = static_cast<double>(groups[gi].size());
        h += rank_sum[gi] * rank_sum[gi] / ni;
    }
    h = 12.0 / (n * (n + 1.0)) * h - 3.0 * (n + 1.0);
    double correction = 1.0 - tie_term / (n * n * n - n);
    if (correction > 0.0) h /= correction;
    res.h = h;
    res.p_value = chi_square_sf(h, static_cast<int>(groups.size()) - 1);
    res.significant = res.p_value < 0.05;
    return res;
}

inline double median(std::vector<double> v) {
    if (v.empty()) throw std::invalid_argument("median: empty");
    std::sort(v.begin(), v.end());
    std::size_t mid = v.size() / 2;
    return v.size() % 2 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

inline double mean(const std::vector<double>& v) {
    if (v.empty()) throw std::invalid_argument("mean: empty");
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

} // namespace robnet

#endif // ROBNET_STATS_HPP

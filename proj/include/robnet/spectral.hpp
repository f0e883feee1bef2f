#ifndef ROBNET_SPECTRAL_HPP
#define ROBNET_SPECTRAL_HPP

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "robnet/graph.hpp"
#include "robnet/metrics.hpp"

namespace robnet {

using Matrix = std::vector<std::vector<double>>;

// All eigenvalues of a real symmetric matrix, ascending. Cyclic Jacobi
// rotations, off-diagonal norm tolerance 1e-12 relative.
inline std::vector<double> symmetric_eigenvalues(Matrix a) {
    const std::size_t n = a.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (a[i].size() != n) throw std::invalid_argument("symmetric_eigenvalues: not square");
        for (std::size_t j = i + 1; j < n; ++j)
            if (std::abs(a[i][j] - a[j][i]) > 1e-12 * std::max(1.0, std::abs(a[i][j])))
                throw std::invalid_argument("symmetric_eigenvalues: not symmetric");
    }
    if (n == 0) return {};
    double scale = 0.0;
    for (const auto& row : a)
        for (double x : row) scale = std::max(scale, std::abs(x));
    scale = std::max(scale, 1.0);
    const double tol = 1e-12 * scale;

    for (int sweep = 0; sweep < 200; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) off += a[i][j] * a[i][j];
        if (std::sqrt(off) < tol) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                double apq = a[p][q];
                if (std::abs(apq) < 1e-300) continue;
                double theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                double t = (theta >= 0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    double akp = a[k][p], akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    double apk = a[p][k], aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    std::vector<double> eig(n);
    for (std::size_t i = 0; i < n; ++i) eig[i] = a[i][i];
    std::sort(eig.begin(), eig.end());
    return eig;
}

inline Matrix adjacency_matrix(const Graph& g) {
    auto n = static_cast<std::size_t>(g.n());
    Matrix a(n, std::vector<double>(n, 0.0));
    for (auto [u, v] : g.edges()) {
        a[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)] = 1.0;
        a[static_cast<std::size_t>(v)][static_cast<std::size_t>(u)] = 1.0;
    }
    return a;
}

inline Matrix laplacian_matrix(const Graph& g) {
    Matrix a = adjacency_matrix(g);
    const std::size_t n = a.size();
    Matrix l(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        double deg = std::accumulate(a[i].begin(), a[i].end(), 0.0);
        l[i][i] = deg;
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) l[i][j] = -a[i][j];
    }
    return l;
}

// The six classical robustness measures. EF and ST require connectivity; the
// flags mark them undefined otherwise (AC is reported as 0 then).
struct SpectralReport {
    double ac = 0.0;      // algebraic connectivity, mu_2
    double ef = 0.0;      // effective resistance, N * sum_{i>=2} 1/mu_i
    double nc = 0.0;      // natural connectivity, ln(mean of e^lambda)
    double sg = 0.0;      // spectral gap, lambda_1 - lambda_2
    double sr = 0.0;      // spectral radius, lambda_1
    double st_log = 0.0;  // ln of spanning tree count
    bool ef_defined = false;
    bool st_defined = false;
};

inline SpectralReport spectral_measures(const Graph& g) {
    if (g.directed()) throw std::invalid_argument("spectral_measures: undirected graphs only");
    if (g.n() < 2) throw std::invalid_argument("spectral_measures: need n >= 2");
    SpectralReport r;
    const auto n = static_cast<double>(g.n());
    std::vector<double> lap = symmetric_eigenvalues(laplacian_matrix(g));
    std::vector<double> adj = symmetric_eigenvalues(adjacency_matrix(g));

    bool connected = is_weakly_connected(g);
    r.ac = connected ? lap[1] : 0.0;
    if (connected) {
        double inv = 0.0, st = 0.0;
        for (std::size_t i = 1; i < lap.size(); ++i) {
            inv += 1.0 / lap[i];
            st += std::log(lap[i]);
        }
        r.ef = n * inv;
        r.st_log = st - std::log(n);
        r.ef_defined = r.st_defined = true;
    }
    // log-sum-exp over adjacency eigenvalues
    double lmax = adj.back();
    double sum = 0.0;
    for (double l : adj) sum += std::exp(l - lmax);
    r.nc = lmax + std::log(sum) - std::log(n);
    r.sr = adj.back();
    r.sg = adj[adj.size() - 1] - adj[adj.size() - 2];
    return r;
}

enum class RankDirection { HigherBetter, LowerBetter };

// Dense 1-based ranks, ties by input order; NaN (undefined) values rank last.
inline std::vector<int> robustness_rank(const std::vector<double>& values,
                                        RankDirection direction) {
    if (values.size() < 2) throw std::invalid_argument("robustness_rank: need >= 2 values");
    std::vector<std::size_t> idx(values.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        bool na = std::isnan(values[a]), nb = std::isnan(values[b]);
        if (na != nb) return nb; // defined values first
        if (na && nb) return false;
        if (values[a] == values[b]) return false;
        return direction == RankDirection::HigherBetter ? values[a] > values[b]
                                                        : values[a] < values[b];
    });
    std::vector<int> rank(values.size());
    for (std::size_t pos = 0; pos < idx.size(); ++pos)
        rank[idx[pos]] = static_cast<int>(pos) + 1;
    return rank;
}

// Mean |predicted rank - true rank|.
inline double mean_rank_error(const std::vector<int>& predicted, const std::vector<int>& truth) {
    if (predicted.size() != truth.size())
        throw std::invalid_argument("mean_rank_error: length mismatch");
    double sum = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i)
        sum += std::abs(predicted[i] - truth[i]);
    return predicted.empty() ? 0.0 : sum / static_cast<double>(predicted.size());
}

} // namespace robnet

#endif // ROBNET_SPECTRAL_HPP

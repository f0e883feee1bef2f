#ifndef ROBNET_METRICS_HPP
#define ROBNET_METRICS_HPP

#include <algorithm>
#include <cmath>
#include <iterator>
#include <optional>
#include <queue>
#include <stack>
#include <vector>

#include "robnet/graph.hpp"

namespace robnet {

namespace detail {

// Undirected neighborhood of v (union of out and in), deduplicated.
inline std::vector<NodeId> undirected_neighbors(const Graph& g, NodeId v) {
    if (!g.directed()) {
        auto sp = g.out_neighbors(v);
        return {sp.begin(), sp.end()};
    }
    std::vector<NodeId> nb;
    auto o = g.out_neighbors(v);
    auto i = g.in_neighbors(v);
    nb.reserve(o.size() + i.size());
    std::merge(o.begin(), o.end(), i.begin(), i.end(), std::back_inserter(nb));
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
    return nb;
}

} // namespace detail

// Triangle density among neighbors, always on the underlying undirected graph.
// Zero when the node has fewer than two neighbors.
inline double clustering_coefficient(const Graph& g, NodeId v) {
    std::vector<NodeId> nb = detail::undirected_neighbors(g, v);
    std::size_t k = nb.size();
    if (k < 2) return 0.0;
    std::size_t links = 0;
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = a + 1; b < k; ++b)
            if (g.has_edge(nb[a], nb[b]) || g.has_edge(nb[b], nb[a])) ++links;
    return 2.0 * static_cast<double>(links) / (static_cast<double>(k) * static_cast<double>(k - 1));
}

// Brandes shortest-path betweenness, unnormalized, endpoints excluded.
// Directed graphs follow edge directions; undirected pair counts are halved
// so each unordered pair contributes once.
inline std::vector<double> betweenness(const Graph& g) {
    const NodeId n = g.n();
    std::vector<double> bc(static_cast<std::size_t>(n), 0.0);
    std::vector<NodeId> dist(static_cast<std::size_t>(n));
    std::vector<double> sigma(static_cast<std::size_t>(n));
    std::vector<double> delta(static_cast<std::size_t>(n));
    std::vector<std::vector<NodeId>> pred(static_cast<std::size_t>(n));
    std::vector<NodeId> order;
    order.reserve(static_cast<std::size_t>(n));
    std::queue<NodeId> q;

    for (NodeId s = 0; s < n; ++s) {
        std::fill(dist.begin(), dist.end(), -1);
        std::fill(sigma.begin(), sigma.end(), 0.0);
        std::fill(delta.begin(), delta.end(), 0.0);
        for (auto& p : pred) p.clear();
        order.clear();
        dist[static_cast<std::size_t>(s)] = 0;
        sigma[static_cast<std::size_t>(s)] = 1.0;
        q.push(s);
        while (!q.empty()) {
            NodeId v = q.front();
            q.pop();
            order.push_back(v);
            for (NodeId w : g.out_neighbors(v)) {
                auto wi = static_cast<std::size_t>(w);
                if (dist[wi] < 0) {
                    dist[wi] = dist[static_cast<std::size_t>(v)] + 1;
                    q.push(w);
                }
                if (dist[wi] == dist[static_cast<std::size_t>(v)] + 1) {
                    sigma[wi] += sigma[static_cast<std::size_t>(v)];
                    pred[wi].push_back(v);
                }
            }
        }
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            NodeId w = *it;
            auto wi = static_cast<std::size_t>(w);
            for (NodeId v : pred[wi]) {
                auto vi = static_cast<std::size_t>(v);
                delta[vi] += sigma[vi] / sigma[wi] * (1.0 + delta[wi]);
            }
            if (w != s) bc[wi] += delta[wi];
        }
    }
    if (!g.directed())
        for (auto& x : bc) x *= 0.5;
    return bc;
}

// Size of the largest weakly connected component among alive nodes.
inline NodeId largest_connected_component(const Graph& g, const NodeMask& mask) {
    const NodeId n = g.n();
    std::vector<char> seen(static_cast<std::size_t>(n), false);
    NodeId best = 0;
    std::vector<NodeId> stack;
    for (NodeId s = 0; s < n; ++s) {
        auto si = static_cast<std::size_t>(s);
        if (seen[si] || !mask.alive(s)) continue;
        NodeId count = 0;
        seen[si] = true;
        stack.push_back(s);
        while (!stack.empty()) {
            NodeId v = stack.back();
            stack.pop_back();
            ++count;
            auto visit = [&](NodeId w) {
                auto wi = static_cast<std::size_t>(w);
                if (!seen[wi] && mask.alive(w)) {
                    seen[wi] = true;
                    stack.push_back(w);
                }
            };
            for (NodeId w : g.out_neighbors(v)) visit(w);
            if (g.directed())
                for (NodeId w : g.in_neighbors(v)) visit(w);
        }
        best = std::max(best, count);
    }
    return best;
}

inline NodeId largest_connected_component(const Graph& g) {
    return largest_connected_component(g, NodeMask(g.n()));
}

inline bool is_weakly_connected(const Graph& g) {
    return g.n() == 0 || largest_connected_component(g) == g.n();
}

// Newman degree-degree Pearson correlation over edges, total degrees.
// Undirected edges contribute both orientations. Degenerate (zero variance)
// inputs yield nullopt.
inline std::optional<double> assortativity(const Graph& g) {
    if (g.m() == 0) return std::nullopt;
    double sxy = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, syy = 0.0;
    double cnt = 0.0;
    auto add = [&](double a, double b) {
        sxy += a * b;
        sx += a;
        sy += b;
        sxx += a * a;
        syy += b * b;
        cnt += 1.0;
    };
    for (const auto& [u, v] : g.edges()) {
        double du = g.degree(u), dv = g.degree(v);
        add(du, dv);
        if (!g.directed()) add(dv, du);
    }
    double cov = sxy / cnt - (sx / cnt) * (sy / cnt);
    double vx = sxx / cnt - (sx / cnt) * (sx / cnt);
    double vy = syy / cnt - (sy / cnt) * (sy / cnt);
    if (vx <= 0.0 || vy <= 0.0) return std::nullopt;
    return cov / std::sqrt(vx * vy);
}

} // namespace robnet

#endif // ROBNET_METRICS_HPP

#ifndef ROBNET_ATTACK_HPP
#define ROBNET_ATTACK_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "robnet/graph.hpp"
#include "robnet/metrics.hpp"
#include "robnet/rng.hpp"

namespace robnet {

enum class AttackKind { RA, TD, TB };

inline const char* to_string(AttackKind k) {
    switch (k) {
        case AttackKind::RA: return "ra";
        case AttackKind::TD: return "td";
        case AttackKind::TB: return "tb";
    }
    return "?";
}

inline AttackKind attack_from_string(const std::string& s) {
    if (s == "ra" || s == "RA") return AttackKind::RA;
    if (s == "td" || s == "TD") return AttackKind::TD;
    if (s == "tb" || s == "TB") return AttackKind::TB;
    throw std::invalid_argument("unknown attack kind: " + s);
}

struct AttackStrategy {
    AttackKind kind = AttackKind::RA;
    bool recompute = true;       // re-rank after every removal (TD/TB)
    std::uint64_t seed = 0;      // RA only
};

enum class RobustnessMetric { Connectivity, Controllability };

inline const char* to_string(RobustnessMetric m) {
    return m == RobustnessMetric::Connectivity ? "conn" : "ctrl";
}

inline RobustnessMetric metric_from_string(const std::string& s) {
    if (s == "conn" || s == "connectivity") return RobustnessMetric::Connectivity;
    if (s == "ctrl" || s == "controllability") return RobustnessMetric::Controllability;
    throw std::invalid_argument("unknown metric: " + s);
}

struct RobustnessCurve {
    RobustnessMetric metric = RobustnessMetric::Connectivity;
    NodeId n = 0;                 // original node count
    std::vector<double> values;   // v(i), i = 0..n-1, measured after i removals
};

struct PredictionError {
    std::vector<double> pointwise;
    double mean = 0.0;
};

// --- maximum matching (directed controllability) ------------------------

// Hopcroft-Karp on the bipartite split graph: out-copy of u links to the
// in-copy of v for every edge u->v. Returns |E*|.
inline NodeId max_matching_directed(const Graph& g) {
    if (!g.directed()) throw std::invalid_argument("max_matching_directed: graph is undirected");
    const NodeId n = g.n();
    const NodeId NIL = -1;
    std::vector<NodeId> match_l(static_cast<std::size_t>(n), NIL);
    std::vector<NodeId> match_r(static_cast<std::size_t>(n), NIL);
    std::vector<NodeId> dist(static_cast<std::size_t>(n));
    const NodeId INF = std::numeric_limits<NodeId>::max();

    auto bfs = [&]() {
        std::queue<NodeId> q;
        bool found = false;
        for (NodeId u = 0; u < n; ++u) {
            auto ui = static_cast<std::size_t>(u);
            if (match_l[ui] == NIL) {
                dist[ui] = 0;
                q.push(u);
            } else {
                dist[ui] = INF;
            }
        }
        while (!q.empty()) {
            NodeId u = q.front();
            q.pop();
            for (NodeId v : g.out_neighbors(u)) {
                NodeId w = match_r[static_cast<std::size_t>(v)];
                if (w == NIL) {
                    found = true;
                } else if (dist[static_cast<std::size_t>(w)] == INF) {
                    dist[static_cast<std::size_t>(w)] = dist[static_cast<std::size_t>(u)] + 1;
                    q.push(w);
                }
            }
        }
        return found;
    };
    std::function<bool(NodeId)> dfs = [&](NodeId u) {
        for (NodeId v : g.out_neighbors(u)) {
            NodeId w = match_r[static_cast<std::size_t>(v)];
            if (w == NIL || (dist[static_cast<std::size_t>(w)] ==
                                 dist[static_cast<std::size_t>(u)] + 1 &&
                             dfs(w))) {
                match_l[static_cast<std::size_t>(u)] = v;
                match_r[static_cast<std::size_t>(v)] = u;
                return true;
            }
        }
        dist[static_cast<std::size_t>(u)] = std::numeric_limits<NodeId>::max();
        return false;
    };

    NodeId matching = 0;
    while (bfs())
        for (NodeId u = 0; u < n; ++u)
            if (match_l[static_cast<std::size_t>(u)] == NIL && dfs(u)) ++matching;
    return matching;
}

// --- adjacency rank (undirected controllability) -------------------------

namespace rank_detail {

// p = 2^61 - 1
constexpr std::uint64_t kPrime = 2305843009213693951ULL;

inline std::uint64_t mulmod(std::uint64_t a, std::uint64_t b) {
    return static_cast<std::uint64_t>(
        static_cast<unsigned __int128>(a) * b % kPrime);
}

inline std::uint64_t powmod(std::uint64_t a, std::uint64_t e) {
    std::uint64_t r = 1;
    while (e) {
        if (e & 1) r = mulmod(r, a);
        a = mulmod(a, a);
        e >>= 1;
    }
    return r;
}

inline std::uint64_t invmod(std::uint64_t a) { return powmod(a, kPrime - 2); }

} // namespace rank_detail

// Rank over F_p with p = 2^61 - 1. For 0/1 symmetric matrices this equals the
// rational rank unless a nonzero minor vanishes mod p; the rational oracle in
// the test suite validates small cases.
inline int modular_rank(std::vector<std::vector<std::uint64_t>> a) {
    using namespace rank_detail;
    const std::size_t n = a.size();
    int rank = 0;
    std::size_t row = 0;
    for (std::size_t col = 0; col < n && row < n; ++col) {
        std::size_t piv = row;
        while (piv < n && a[piv][col] == 0) ++piv;
        if (piv == n) continue;
        std::swap(a[piv], a[row]);
        std::uint64_t inv = invmod(a[row][col]);
        for (std::size_t j = col; j < n; ++j) a[row][j] = mulmod(a[row][j], inv);
        for (std::size_t i = row + 1; i < n; ++i) {
            std::uint64_t f = a[i][col];
            if (f == 0) continue;
            for (std::size_t j = col; j < n; ++j) {
                std::uint64_t sub = mulmod(f, a[row][j]);
                a[i][j] = (a[i][j] >= sub) ? a[i][j] - sub : a[i][j] + kPrime - sub;
            }
        }
        ++row;
        ++rank;
    }
    return rank;
}

inline int adjacency_rank(const Graph& g) {
    auto n = static_cast<std::size_t>(g.n());
    std::vector<std::vector<std::uint64_t>> a(n, std::vector<std::uint64_t>(n, 0));
    for (auto [u, v] : g.edges()) {
        a[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)] = 1;
        a[static_cast<std::size_t>(v)][static_cast<std::size_t>(u)] = 1;
    }
    return modular_rank(std::move(a));
}

// N_D = max{1, N - rank(A)} for undirected graphs.
inline NodeId driver_count_undirected(const Graph& g) {
    if (g.directed()) throw std::invalid_argument("driver_count_undirected: graph is directed");
    return std::max<NodeId>(1, g.n() - adjacency_rank(g));
}

// N_D = max{1, N - |E*|} for directed graphs.
inline NodeId driver_count_directed(const Graph& g) {
    return std::max<NodeId>(1, g.n() - max_matching_directed(g));
}

inline NodeId driver_count(const Graph& g) {
    return g.directed() ? driver_count_directed(g) : driver_count_undirected(g);
}

// --- attack sequences ----------------------------------------------------

namespace attack_detail {

inline NodeId argmax_alive(const NodeMask& mask, const std::vector<double>& score) {
    NodeId best = -1;
    double best_score = -std::numeric_limits<double>::infinity();
    for (NodeId v = 0; v < mask.size(); ++v) {
        if (!mask.alive(v)) continue;
        double sv = score[static_cast<std::size_t>(v)];
        if (sv > best_score) { // ties break by smallest id
            best_score = sv;
            best = v;
        }
    }
    return best;
}

inline std::vector<double> masked_degree(const Graph& g, const NodeMask& mask) {
    std::vector<double> deg(static_cast<std::size_t>(g.n()), 0.0);
    for (auto [u, v] : g.edges()) {
        if (!mask.alive(u) || !mask.alive(v)) continue;
        deg[static_cast<std::size_t>(u)] += 1.0;
        deg[static_cast<std::size_t>(v)] += 1.0;
    }
    return deg;
}

inline std::vector<double> masked_betweenness(const Graph& g, const NodeMask& mask) {
    auto sub = induced_subgraph(g, mask);
    std::vector<double> local = betweenness(sub.graph);
    std::vector<double> full(static_cast<std::size_t>(g.n()), 0.0);
    for (std::size_t i = 0; i < sub.id_map.size(); ++i)
        full[static_cast<std::size_t>(sub.id_map[i])] = local[i];
    return full;
}

} // namespace attack_detail

// Next node to remove under the strategy. RA draws require the caller-owned
// rng so a whole attack run shares one stream.
inline NodeId next_target(const Graph& g, const NodeMask& mask,
                          const AttackStrategy& strategy, Rng& rng) {
    if (mask.alive_count() == 0) throw std::invalid_argument("next_target: no alive node");
    switch (strategy.kind) {
        case AttackKind::RA: {
            auto pick = rng.below(static_cast<std::uint64_t>(mask.alive_count()));
            for (NodeId v = 0; v < mask.size(); ++v)
                if (mask.alive(v) && pick-- == 0) return v;
            return -1; // unreachable
        }
        case AttackKind::TD:
            return attack_detail::argmax_alive(mask, attack_detail::masked_degree(g, mask));
        case AttackKind::TB:
            return attack_detail::argmax_alive(mask, attack_detail::masked_betweenness(g, mask));
    }
    return -1;
}

inline NodeId next_target(const Graph& g, const NodeMask& mask, const AttackStrategy& strategy) {
    Rng rng(strategy.seed);
    return next_target(g, mask, strategy, rng);
}

// Full removal order for the strategy (length n).
inline std::vector<NodeId> attack_order(const Graph& g, const AttackStrategy& strategy) {
    NodeMask mask(g.n());
    Rng rng(strategy.seed);
    std::vector<NodeId> order;
    order.reserve(static_cast<std::size_t>(g.n()));
    std::vector<double> static_score;
    if (!strategy.recompute && strategy.kind != AttackKind::RA) {
        static_score = strategy.kind == AttackKind::TD
                           ? attack_detail::masked_degree(g, mask)
                           : attack_detail::masked_betweenness(g, mask);
    }
    while (mask.alive_count() > 0) {
        NodeId v;
        if (!static_score.empty()) {
            v = attack_detail::argmax_alive(mask, static_score);
            static_score[static_cast<std::size_t>(v)] =
                -std::numeric_limits<double>::infinity();
        } else {
            v = next_target(g, mask, strategy, rng);
        }
        order.push_back(v);
        mask.remove(v);
    }
    return order;
}

// p(i) = N_LCC(i) / (N - i), i = 0..N-1; p(0) is the intact network.
inline RobustnessCurve connectivity_curve(const Graph& g, const AttackStrategy& strategy) {
    if (g.n() < 2) throw std::invalid_argument("connectivity_curve: need n >= 2");
    RobustnessCurve curve{RobustnessMetric::Connectivity, g.n(), {}};
    curve.values.reserve(static_cast<std::size_t>(g.n()));
    NodeMask mask(g.n());
    Rng rng(strategy.seed);
    std::vector<double> static_score;
    if (!strategy.recompute && strategy.kind != AttackKind::RA) {
        static_score = strategy.kind == AttackKind::TD
                           ? attack_detail::masked_degree(g, mask)
                           : attack_detail::masked_betweenness(g, mask);
    }
    for (NodeId i = 0; i < g.n(); ++i) {
        curve.values.push_back(static_cast<double>(largest_connected_component(g, mask)) /
                               static_cast<double>(g.n() - i));
        if (i + 1 == g.n()) break;
        NodeId v;
        if (!static_score.empty()) {
            v = attack_detail::argmax_alive(mask, static_score);
            static_score[static_cast<std::size_t>(v)] =
                -std::numeric_limits<double>::infinity();
        } else {
            v = next_target(g, mask, strategy, rng);
        }
        mask.remove(v);
    }
    return curve;
}

// q(i) = N_D(i) / (N - i); driver count via maximum matching (directed) or
// adjacency rank (undirected), recomputed from scratch on the masked graph.
inline RobustnessCurve controllability_curve(const Graph& g, const AttackStrategy& strategy) {
    if (g.n() < 2) throw std::invalid_argument("controllability_curve: need n >= 2");
    RobustnessCurve curve{RobustnessMetric::Controllability, g.n(), {}};
    curve.values.reserve(static_cast<std::size_t>(g.n()));
    NodeMask mask(g.n());
    Rng rng(strategy.seed);
    std::vector<double> static_score;
    if (!strategy.recompute && strategy.kind != AttackKind::RA) {
        static_score = strategy.kind == AttackKind::TD
                           ? attack_detail::masked_degree(g, mask)
                           : attack_detail::masked_betweenness(g, mask);
    }
    for (NodeId i = 0; i < g.n(); ++i) {
        auto sub = induced_subgraph(g, mask);
        curve.values.push_back(static_cast<double>(driver_count(sub.graph)) /
                               static_cast<double>(g.n() - i));
        if (i + 1 == g.n()) break;
        NodeId v;
        if (!static_score.empty()) {
            v = attack_detail::argmax_alive(mask, static_score);
            static_score[static_cast<std::size_t>(v)] =
                -std::numeric_limits<double>::infinity();
        } else {
            v = next_target(g, mask, strategy, rng);
        }
        mask.remove(v);
    }
    return curve;
}

inline RobustnessCurve simulate_curve(const Graph& g, RobustnessMetric metric,
                                      const AttackStrategy& strategy) {
    return metric == RobustnessMetric::Connectivity ? connectivity_curve(g, strategy)
                                                    : controllability_curve(g, strategy);
}

// Pointwise |s_t - s_a| and its mean.
inline PredictionError prediction_error(const std::vector<double>& truth,
                                        const std::vector<double>& pred) {
    if (truth.size() != pred.size())
        throw std::invalid_argument("prediction_error: length mismatch");
    PredictionError err;
    err.pointwise.reserve(truth.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        double d = std::abs(truth[i] - pred[i]);
        err.pointwise.push_back(d);
        sum += d;
    }
    err.mean = truth.empty() ? 0.0 : sum / static_cast<double>(truth.size());
    return err;
}

inline PredictionError prediction_error(const RobustnessCurve& truth,
                                        const RobustnessCurve& pred) {
    return prediction_error(truth.values, pred.values);
}

// --- curve CSV -----------------------------------------------------------

inline void save_curve(const RobustnessCurve& c, std::ostream& os) {
    os << "delta,value\n";
    char buf[64];
    for (std::size_t i = 0; i < c.values.size(); ++i) {
        double delta = static_cast<double>(i) / static_cast<double>(c.n);
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", delta, c.values[i]);
        os << buf;
    }
}

inline void save_curve(const RobustnessCurve& c, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    save_curve(c, f);
}

inline RobustnessCurve load_curve(std::istream& is, RobustnessMetric metric) {
    std::string line;
    if (!std::getline(is, line) || line != "delta,value")
        throw std::runtime_error("curve file: bad header");
    RobustnessCurve c{metric, 0, {}};
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        auto comma = line.find(',');
        if (comma == std::string::npos) throw std::runtime_error("curve file: bad row");
        c.values.push_back(std::stod(line.substr(comma + 1)));
    }
    c.n = static_cast<NodeId>(c.values.size());
    return c;
}

inline RobustnessCurve load_curve(const std::string& path, RobustnessMetric metric) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open: " + path);
    return load_curve(f, metric);
}

} // namespace robnet

#endif // ROBNET_ATTACK_HPP

#ifndef ROBNET_GEN_HPP
#define ROBNET_GEN_HPP

#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "robnet/graph.hpp"
#include "robnet/metrics.hpp"
#include "robnet/rng.hpp"

namespace robnet {

enum class NetModel { ER, BA, SF, OS, SWNW, SWWS, QS, RH, RT };

inline const char* to_string(NetModel m) {
    switch (m) {
        case NetModel::ER: return "ER";
        case NetModel::BA: return "BA";
        case NetModel::SF: return "SF";
        case NetModel::OS: return "OS";
        case NetModel::SWNW: return "SW-NW";
        case NetModel::SWWS: return "SW-WS";
        case NetModel::QS: return "QS";
        case NetModel::RH: return "RH";
        case NetModel::RT: return "RT";
    }
    return "?";
}

inline NetModel model_from_string(const std::string& s) {
    static const std::map<std::string, NetModel> table = {
        {"ER", NetModel::ER},       {"er", NetModel::ER},
        {"BA", NetModel::BA},       {"ba", NetModel::BA},
        {"SF", NetModel::SF},       {"sf", NetModel::SF},
        {"OS", NetModel::OS},       {"os", NetModel::OS},
        {"SW-NW", NetModel::SWNW},  {"sw-nw", NetModel::SWNW}, {"swnw", NetModel::SWNW},
        {"SW-WS", NetModel::SWWS},  {"sw-ws", NetModel::SWWS}, {"swws", NetModel::SWWS},
        {"QS", NetModel::QS},       {"qs", NetModel::QS},
        {"RH", NetModel::RH},       {"rh", NetModel::RH},
        {"RT", NetModel::RT},       {"rt", NetModel::RT}};
    auto it = table.find(s);
    if (it == table.end()) throw std::invalid_argument("unknown network model: " + s);
    return it->second;
}

struct GenSpec {
    NetModel model = NetModel::ER;
    NodeId n = 0;
    std::size_t m = 0;
    bool directed = false;
    double sigma = 0.5;   // SF/OS weight exponent, gamma = 1 + 1/sigma
    double theta = 1.0;   // SF/OS weight offset, theta << n
    int k = 2;            // SW nearest-neighbor radius
    double q = -1.0;      // QS snapback probability; <0 derives it from m
    double beta = 0.1;    // SW-WS rewiring probability
    std::uint64_t seed = 0;
};

namespace gen_detail {

inline std::size_t max_edges(NodeId n, bool directed) {
    auto nn = static_cast<std::size_t>(n);
    return directed ? nn * (nn - 1) : nn * (nn - 1) / 2;
}

inline Edge canonical(NodeId u, NodeId v, bool directed) {
    if (!directed && u > v) std::swap(u, v);
    return {u, v};
}

struct EdgeSet {
    bool directed;
    std::set<Edge> edges;

    bool add(NodeId u, NodeId v) {
        if (u == v) return false;
        return edges.insert(canonical(u, v, directed)).second;
    }
    bool contains(NodeId u, NodeId v) const {
        if (u == v) return false;
        return edges.count(canonical(u, v, directed)) > 0;
    }
    std::vector<Edge> to_vector() const { return {edges.begin(), edges.end()}; }
};

// Uniform random node pair that is not yet an edge.
inline void add_random_edge(EdgeSet& es, NodeId n, Rng& rng) {
    while (true) {
        auto u = static_cast<NodeId>(rng.below(static_cast<std::uint64_t>(n)));
        auto v = static_cast<NodeId>(rng.below(static_cast<std::uint64_t>(n)));
        if (es.add(u, v)) return;
    }
}

} // namespace gen_detail

// Uniformly-random edge additions/removals until exactly m_target edges;
// protected edges are never removed.
inline Graph adjust_edge_count(const Graph& g, std::size_t m_target,
                               const std::vector<Edge>& protected_edges, Rng& rng) {
    using namespace gen_detail;
    if (m_target > max_edges(g.n(), g.directed()))
        throw std::invalid_argument("adjust_edge_count: target exceeds maximum");
    std::set<Edge> prot;
    for (auto [u, v] : protected_edges) prot.insert(canonical(u, v, g.directed()));
    if (m_target < prot.size())
        throw std::invalid_argument("adjust_edge_count: target below protected edge count");

    EdgeSet es{g.directed(), {g.edges().begin(), g.edges().end()}};
    while (es.edges.size() < m_target) add_random_edge(es, g.n(), rng);
    if (es.edges.size() > m_target) {
        std::vector<Edge> removable;
        for (const auto& e : es.edges)
            if (!prot.count(e)) removable.push_back(e);
        std::size_t excess = es.edges.size() - m_target;
        if (excess > removable.size())
            throw std::invalid_argument("adjust_edge_count: not enough removable edges");
        rng.shuffle(removable);
        for (std::size_t i = 0; i < excess; ++i) es.edges.erase(removable[i]);
    }
    return Graph(g.n(), g.directed(), es.to_vector());
}

inline Graph adjust_edge_count(const Graph& g, std::size_t m_target, Rng& rng) {
    return adjust_edge_count(g, m_target, {}, rng);
}

// Orientation change. undirected -> directed assigns a uniform random
// direction per edge, except forced pairs which keep the given orientation.
// directed -> undirected drops directions and deduplicates.
inline Graph set_direction(const Graph& g, bool directed,
                           const std::vector<Edge>& forced, Rng& rng) {
    using namespace gen_detail;
    if (directed == g.directed())
        return g;
    std::vector<Edge> out;
    if (!directed) {
        std::set<Edge> dedup;
        for (auto [u, v] : g.edges()) dedup.insert(canonical(u, v, false));
        out.assign(dedup.begin(), dedup.end());
    } else {
        std::set<Edge> forced_set(forced.begin(), forced.end());
        for (auto [u, v] : g.edges()) {
            if (forced_set.count({u, v})) out.emplace_back(u, v);
            else if (forced_set.count({v, u})) out.emplace_back(v, u);
            else if (rng.below(2)) out.emplace_back(v, u);
            else out.emplace_back(u, v);
        }
    }
    return Graph(g.n(), directed, std::move(out));
}

inline Graph set_direction(const Graph& g, bool directed, Rng& rng) {
    return set_direction(g, directed, {}, rng);
}

namespace gen_detail {

inline Graph gen_er(const GenSpec& s, Rng& rng) {
    EdgeSet es{s.directed, {}};
    while (es.edges.size() < s.m) add_random_edge(es, s.n, rng);
    return Graph(s.n, s.directed, es.to_vector());
}

// Preferential attachment from a 3-clique; exact m via adjustment.
inline Graph gen_ba(const GenSpec& s, Rng& rng) {
    const NodeId m0 = std::min<NodeId>(3, s.n);
    EdgeSet es{false, {}};
    std::vector<NodeId> stubs; // node repeated once per endpoint
    for (NodeId u = 0; u < m0; ++u)
        for (NodeId v = u + 1; v < m0; ++v)
            if (es.add(u, v)) {
                stubs.push_back(u);
                stubs.push_back(v);
            }
    std::size_t per_node = 1;
    if (s.n > m0)
        per_node = std::max<std::size_t>(
            1, (s.m + static_cast<std::size_t>(s.n - m0) / 2) / static_cast<std::size_t>(s.n - m0));
    for (NodeId v = m0; v < s.n; ++v) {
        std::size_t added = 0, attempts = 0;
        while (added < per_node && attempts < 50 * per_node + 50) {
            ++attempts;
            NodeId target = stubs.empty()
                ? static_cast<NodeId>(rng.below(static_cast<std::uint64_t>(v)))
                : stubs[rng.below(stubs.size())];
            if (target != v && es.add(v, target)) {
                stubs.push_back(v);
                stubs.push_back(target);
                ++added;
            }
        }
    }
    return Graph(s.n, false, es.to_vector());
}

// Static scale-free model: endpoints drawn with probability proportional to
// w_i = (i + theta)^{-sigma}, i = 1..n.
inline Graph gen_sf(const GenSpec& s, Rng& rng) {
    std::vector<double> cum(static_cast<std::size_t>(s.n));
    double acc = 0.0;
    for (NodeId i = 0; i < s.n; ++i) {
        acc += std::pow(static_cast<double>(i + 1) + s.theta, -s.sigma);
        cum[static_cast<std::size_t>(i)] = acc;
    }
    auto draw = [&]() {
        double x = rng.uniform() * acc;
        auto it = std::lower_bound(cum.begin(), cum.end(), x);
        return static_cast<NodeId>(it - cum.begin());
    };
    EdgeSet es{false, {}};
    std::size_t stall = 0;
    while (es.edges.size() < s.m) {
        if (es.add(draw(), draw())) stall = 0;
        else if (++stall > 200 * s.m + 1000) {
            // weight draws saturated; finish uniformly
            add_random_edge(es, s.n, rng);
            stall = 0;
        }
    }
    return Graph(s.n, false, es.to_vector());
}

// Onion-structured SF: 2n degree-preserving double-edge swap attempts,
// each accepted only if assortativity strictly increases.
inline Graph gen_os(const GenSpec& s, Rng& rng) {
    Graph g = gen_sf(s, rng);
    EdgeSet es{false, {g.edges().begin(), g.edges().end()}};
    std::vector<NodeId> deg(static_cast<std::size_t>(s.n), 0);
    for (auto [u, v] : es.edges) {
        ++deg[static_cast<std::size_t>(u)];
        ++deg[static_cast<std::size_t>(v)];
    }
    // Assortativity from degree sums over edges; degrees are swap-invariant.
    auto stats = [&](const std::set<Edge>& edges) {
        double sxy = 0.0;
        for (auto [u, v] : edges)
            sxy += static_cast<double>(deg[static_cast<std::size_t>(u)]) *
                   static_cast<double>(deg[static_cast<std::size_t>(v)]);
        return sxy; // other moments are invariant under swaps
    };
    double sxy = stats(es.edges);
    std::vector<Edge> edge_vec = es.to_vector();
    const std::size_t attempts = 2 * static_cast<std::size_t>(s.n);
    for (std::size_t t = 0; t < attempts && edge_vec.size() >= 2; ++t) {
        std::size_t i = rng.below(edge_vec.size());
        std::size_t j = rng.below(edge_vec.size());
        if (i == j) continue;
        auto [a, b] = edge_vec[i];
        auto [c, d] = edge_vec[j];
        // candidate rewiring (a,b),(c,d) -> (a,d),(c,b)
        if (rng.below(2)) std::swap(c, d);
        if (a == d || c == b) continue;
        if (es.contains(a, d) || es.contains(c, b)) continue;
        auto dd = [&](NodeId x) { return static_cast<double>(deg[static_cast<std::size_t>(x)]); };
        double delta = dd(a) * dd(d) + dd(c) * dd(b) - dd(a) * dd(b) - dd(c) * dd(d);
        if (delta <= 0.0) continue; // accept only strict assortativity increase
        es.edges.erase(canonical(a, b, false));
        es.edges.erase(canonical(c, d, false));
        es.add(a, d);
        es.add(c, b);
        edge_vec[i] = canonical(a, d, false);
        edge_vec[j] = canonical(c, b, false);
        sxy += delta;
    }
    (void)sxy;
    return Graph(s.n, false, es.to_vector());
}

inline std::vector<Edge> ring_edges(NodeId n) {
    std::vector<Edge> loop;
    for (NodeId i = 0; i + 1 < n; ++i) loop.emplace_back(i, i + 1);
    if (n > 2) loop.emplace_back(0, n - 1);
    return loop;
}

// Ring lattice: distance-1 loop plus neighbors at distances 2..k.
inline Graph ring_lattice(NodeId n, int k) {
    EdgeSet es{false, {}};
    for (auto [u, v] : ring_edges(n)) es.add(u, v);
    for (int d = 2; d <= k; ++d)
        for (NodeId i = 0; i < n; ++i)
            es.add(i, static_cast<NodeId>((i + d) % n));
    return Graph(n, false, es.to_vector());
}

inline Graph gen_swnw(const GenSpec& s, Rng& rng) {
    Graph g = ring_lattice(s.n, s.k);
    // shortcut additions only; the exact count is settled by adjustment
    if (s.m > g.m()) {
        EdgeSet es{false, {g.edges().begin(), g.edges().end()}};
        while (es.edges.size() < s.m) add_random_edge(es, s.n, rng);
        g = Graph(s.n, false, es.to_vector());
    }
    return g;
}

inline Graph gen_swws(const GenSpec& s, Rng& rng) {
    Graph lattice = ring_lattice(s.n, s.k);
    std::vector<Edge> loop_edges = ring_edges(s.n);
    std::set<Edge> loop(loop_edges.begin(), loop_edges.end());
    EdgeSet es{false, {lattice.edges().begin(), lattice.edges().end()}};
    // Rewire each non-loop lattice edge with probability beta; the loop stays
    // so the graph remains connected.
    for (auto [u, v] : lattice.edges()) {
        if (loop.count({u, v})) continue;
        if (!rng.bernoulli(s.beta)) continue;
        for (int tries = 0; tries < 100; ++tries) {
            auto w = static_cast<NodeId>(rng.below(static_cast<std::uint64_t>(s.n)));
            if (w != u && !es.contains(u, w)) {
                es.edges.erase(canonical(u, v, false));
                es.add(u, w);
                break;
            }
        }
    }
    return Graph(s.n, false, es.to_vector());
}

// Directed backbone chain 0->1->...->n-1 with snapback edges i->j (j<i),
// each added with probability q.
inline Graph gen_qs(const GenSpec& s, Rng& rng) {
    double q = s.q;
    if (q < 0.0) {
        double pairs = static_cast<double>(s.n) * (s.n - 1) / 2.0;
        q = pairs > 0 ? std::clamp((static_cast<double>(s.m) - (s.n - 1)) / pairs, 0.0, 1.0) : 0.0;
    }
    EdgeSet es{true, {}};
    for (NodeId i = 0; i + 1 < s.n; ++i) es.add(i, i + 1);
    for (NodeId i = 2; i < s.n; ++i)
        for (NodeId j = 0; j + 1 < i; ++j)
            if (rng.bernoulli(q)) es.add(i, j);
    return Graph(s.n, true, es.to_vector());
}

// Chains of shared-node motifs (triangles or hexagons), then random motifs
// on already-used nodes once every node has been touched.
inline Graph gen_motif(const GenSpec& s, int motif_len, Rng& rng) {
    EdgeSet es{s.directed, {}};
    if (s.n < motif_len) return Graph(s.n, s.directed, {});
    std::vector<NodeId> unused(static_cast<std::size_t>(s.n));
    for (NodeId i = 0; i < s.n; ++i) unused[static_cast<std::size_t>(i)] = i;
    rng.shuffle(unused);
    NodeId anchor = unused.back();
    unused.pop_back();
    std::size_t guard = 0;
    while (es.edges.size() + static_cast<std::size_t>(motif_len) <= s.m &&
           guard++ < 50 * s.m + 100) {
        std::vector<NodeId> cyc{anchor};
        while (static_cast<int>(cyc.size()) < motif_len) {
            NodeId v;
            if (!unused.empty()) {
                v = unused.back();
                unused.pop_back();
            } else {
                v = static_cast<NodeId>(rng.below(static_cast<std::uint64_t>(s.n)));
            }
            if (std::find(cyc.begin(), cyc.end(), v) == cyc.end()) cyc.push_back(v);
        }
        for (int i = 0; i < motif_len; ++i)
            es.add(cyc[static_cast<std::size_t>(i)],
                   cyc[static_cast<std::size_t>((i + 1) % motif_len)]);
        anchor = cyc[static_cast<std::size_t>(motif_len - 1)];
    }
    return Graph(s.n, s.directed, es.to_vector());
}

} // namespace gen_detail

inline std::size_t max_edges(NodeId n, bool directed) {
    return gen_detail::max_edges(n, directed);
}

// Smallest m compatible with the model's mandatory structure.
inline std::size_t min_edges(NetModel model, NodeId n, bool /*directed*/) {
    if (n < 2) return 0;
    if (model == NetModel::QS) return static_cast<std::size_t>(n) - 1;
    if (model == NetModel::SWNW || model == NetModel::SWWS)
        return static_cast<std::size_t>(n > 2 ? n : n - 1);
    return 0;
}

inline void validate(const GenSpec& s) {
    if (s.n < 1) throw std::invalid_argument("gen: n must be positive");
    if (s.m > max_edges(s.n, s.directed))
        throw std::invalid_argument("gen: m exceeds maximum possible edges");
    if (s.sigma < 0.0 || s.sigma >= 1.0) throw std::invalid_argument("gen: sigma must be in [0,1)");
    if (s.theta < 0.0) throw std::invalid_argument("gen: theta must be >= 0");
    if (s.k < 1) throw std::invalid_argument("gen: k must be >= 1");
    if (s.beta < 0.0 || s.beta > 1.0) throw std::invalid_argument("gen: beta must be in [0,1]");
    if (s.m < min_edges(s.model, s.n, s.directed))
        throw std::invalid_argument("gen: m below the model's mandatory structure");
}

// Generate a network with exactly s.n nodes and s.m edges.
inline Graph generate(const GenSpec& s) {
    using namespace gen_detail;
    validate(s);
    Rng rng(s.seed);
    Graph g;
    std::vector<Edge> protected_edges;  // in final orientation
    std::vector<Edge> forced;           // mandated directed patterns
    switch (s.model) {
        case NetModel::ER:
            g = gen_er(s, rng);
            break;
        case NetModel::BA:
            g = gen_ba(s, rng);
            break;
        case NetModel::SF:
            g = gen_sf(s, rng);
            break;
        case NetModel::OS:
            g = gen_os(s, rng);
            break;
        case NetModel::SWNW:
        case NetModel::SWWS: {
            g = s.model == NetModel::SWNW ? gen_swnw(s, rng) : gen_swws(s, rng);
            // directed loop 0->1->...->n-1->0
            for (NodeId i = 0; i + 1 < s.n; ++i) forced.emplace_back(i, i + 1);
            if (s.n > 2) forced.emplace_back(s.n - 1, 0);
            if (s.directed) protected_edges = forced;
            else protected_edges = ring_edges(s.n);
            break;
        }
        case NetModel::QS: {
            g = gen_qs(s, rng);
            for (NodeId i = 0; i + 1 < s.n; ++i) protected_edges.emplace_back(i, i + 1);
            if (!s.directed) g = set_direction(g, false, rng);
            break;
        }
        case NetModel::RH:
            g = gen_motif(s, 6, rng);
            break;
        case NetModel::RT:
            g = gen_motif(s, 3, rng);
            break;
    }
    if (g.directed() != s.directed) g = set_direction(g, s.directed, forced, rng);
    return adjust_edge_count(g, s.m, protected_edges, rng);
}

} // namespace robnet

#endif // ROBNET_GEN_HPP

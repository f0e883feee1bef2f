#ifndef ROBNET_GRAPH_HPP
#define ROBNET_GRAPH_HPP

#include <algorithm>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace robnet {

using NodeId = std::int32_t;
using Edge = std::pair<NodeId, NodeId>;

enum class DegreeMode { In, Out, Total };

// Immutable sparse graph. Undirected edges are stored once, canonically with
// u < v; adjacency lists carry both endpoints. No self-loops, no duplicates.
class Graph {
public:
    Graph() : n_(0), directed_(false) {}

    Graph(NodeId n, bool directed, std::vector<Edge> edges)
        : n_(n), directed_(directed) {
        if (n < 0) throw std::invalid_argument("Graph: negative node count");
        for (auto& [u, v] : edges) {
            if (u < 0 || u >= n || v < 0 || v >= n)
                throw std::invalid_argument("Graph: endpoint out of range");
            if (u == v) throw std::invalid_argument("Graph: self-loop");
            if (!directed && u > v) std::swap(u, v);
        }
        std::sort(edges.begin(), edges.end());
        if (std::adjacent_find(edges.begin(), edges.end()) != edges.end())
            throw std::invalid_argument("Graph: duplicate edge");
        edges_ = std::move(edges);
        out_.assign(static_cast<std::size_t>(n_), {});
        in_.assign(static_cast<std::size_t>(n_), {});
        for (const auto& [u, v] : edges_) {
            out_[static_cast<std::size_t>(u)].push_back(v);
            in_[static_cast<std::size_t>(v)].push_back(u);
            if (!directed_) {
                out_[static_cast<std::size_t>(v)].push_back(u);
                in_[static_cast<std::size_t>(u)].push_back(v);
            }
        }
        for (auto& a : out_) std::sort(a.begin(), a.end());
        for (auto& a : in_) std::sort(a.begin(), a.end());
    }

    NodeId n() const { return n_; }
    std::size_t m() const { return edges_.size(); }
    bool directed() const { return directed_; }
    const std::vector<Edge>& edges() const { return edges_; }

    // Out-neighbors; for undirected graphs this is the full neighborhood.
    std::span<const NodeId> out_neighbors(NodeId v) const {
        return out_[check(v)];
    }
    std::span<const NodeId> in_neighbors(NodeId v) const {
        return in_[check(v)];
    }

    bool has_edge(NodeId u, NodeId v) const {
        if (u < 0 || v < 0 || u >= n_ || v >= n_ || u == v) return false;
        if (!directed_ && u > v) std::swap(u, v);
        return std::binary_search(edges_.begin(), edges_.end(), Edge{u, v});
    }

    NodeId degree(NodeId v, DegreeMode mode = DegreeMode::Total) const {
        std::size_t i = check(v);
        switch (mode) {
            case DegreeMode::Out: return static_cast<NodeId>(out_[i].size());
            case DegreeMode::In: return static_cast<NodeId>(in_[i].size());
            case DegreeMode::Total:
                if (!directed_) return static_cast<NodeId>(out_[i].size());
                return static_cast<NodeId>(out_[i].size() + in_[i].size());
        }
        return 0;
    }

    double average_degree() const {
        if (n_ == 0) return 0.0;
        double mm = static_cast<double>(m());
        return directed_ ? mm / n_ : 2.0 * mm / n_;
    }

private:
    std::size_t check(NodeId v) const {
        if (v < 0 || v >= n_) throw std::out_of_range("Graph: invalid node id");
        return static_cast<std::size_t>(v);
    }

    NodeId n_;
    bool directed_;
    std::vector<Edge> edges_;
    std::vector<std::vector<NodeId>> out_;
    std::vector<std::vector<NodeId>> in_;
};

// Tracks node removals without mutating the graph.
class NodeMask {
public:
    explicit NodeMask(NodeId n) : alive_(static_cast<std::size_t>(n), true), alive_count_(n) {}

    bool alive(NodeId v) const { return alive_[static_cast<std::size_t>(v)]; }
    NodeId alive_count() const { return alive_count_; }
    NodeId size() const { return static_cast<NodeId>(alive_.size()); }

    void remove(NodeId v) {
        auto i = static_cast<std::size_t>(v);
        if (v < 0 || i >= alive_.size()) throw std::out_of_range("NodeMask: invalid node id");
        if (!alive_[i]) throw std::invalid_argument("NodeMask: node already removed");
        alive_[i] = false;
        --alive_count_;
    }

    std::vector<NodeId> alive_nodes() const {
        std::vector<NodeId> out;
        out.reserve(static_cast<std::size_t>(alive_count_));
        for (std::size_t i = 0; i < alive_.size(); ++i)
            if (alive_[i]) out.push_back(static_cast<NodeId>(i));
        return out;
    }

private:
    std::vector<char> alive_;
    NodeId alive_count_;
};

// Graph on the alive nodes, ids compacted; id_map[new] = original.
struct InducedSubgraph {
    Graph graph;
    std::vector<NodeId> id_map;
};

inline InducedSubgraph induced_subgraph(const Graph& g, const NodeMask& mask) {
    std::vector<NodeId> fwd(static_cast<std::size_t>(g.n()), -1);
    std::vector<NodeId> id_map = mask.alive_nodes();
    for (std::size_t i = 0; i < id_map.size(); ++i)
        fwd[static_cast<std::size_t>(id_map[i])] = static_cast<NodeId>(i);
    std::vector<Edge> edges;
    for (const auto& [u, v] : g.edges()) {
        NodeId nu = fwd[static_cast<std::size_t>(u)];
        NodeId nv = fwd[static_cast<std::size_t>(v)];
        if (nu >= 0 && nv >= 0) edges.emplace_back(nu, nv);
    }
    return {Graph(static_cast<NodeId>(id_map.size()), g.directed(), std::move(edges)),
            std::move(id_map)};
}

} // namespace robnet

#endif // ROBNET_GRAPH_HPP

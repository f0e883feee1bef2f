#ifndef ROBNET_LFR_HPP
#define ROBNET_LFR_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <queue>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "robnet/graph.hpp"
#include "robnet/metrics.hpp"

namespace robnet {

enum class NodeAttribute { Degree, ClusteringCoefficient, Betweenness };

inline const char* to_string(NodeAttribute a) {
    switch (a) {
        case NodeAttribute::Degree: return "deg";
        case NodeAttribute::ClusteringCoefficient: return "cc";
        case NodeAttribute::Betweenness: return "bet";
    }
    return "?";
}

inline NodeAttribute attribute_from_string(const std::string& s) {
    if (s == "deg" || s == "degree") return NodeAttribute::Degree;
    if (s == "cc" || s == "clustering") return NodeAttribute::ClusteringCoefficient;
    if (s == "bet" || s == "betweenness") return NodeAttribute::Betweenness;
    throw std::invalid_argument("unknown node attribute: " + s);
}

enum class Labeling { Degree, Betweenness };

struct LfrConfig {
    int w = 500;
    int g = 10;
    Labeling labeling = Labeling::Degree;
    std::vector<NodeAttribute> attributes = {NodeAttribute::Degree,
                                             NodeAttribute::ClusteringCoefficient};
    // Betweenness on directed graphs is directed by default; set to rank and
    // embed the symmetrized value instead.
    bool undirected_betweenness = false;

    int h() const { return static_cast<int>(attributes.size()); }
};

// W receptive fields of shape g x h, selection order, all-zero padding for
// ranks beyond N. Entries are normalized to [0,1].
struct ReceptiveFieldTensor {
    int w = 0, g = 0, h = 0;
    NodeId source_n = 0;
    std::vector<float> data; // (field, row, col) order, w*g*h entries

    float at(int field, int row, int col) const {
        return data[(static_cast<std::size_t>(field) * g + row) * h + col];
    }
};

namespace lfr_detail {

struct NodeScores {
    std::vector<double> label;                    // ranking score
    std::vector<std::vector<double>> attributes;  // normalized, per attribute
};

inline NodeScores compute_scores(const Graph& g, const LfrConfig& cfg) {
    auto n = static_cast<std::size_t>(g.n());
    NodeScores s;
    std::vector<double> deg(n), cc, bet;
    for (NodeId v = 0; v < g.n(); ++v)
        deg[static_cast<std::size_t>(v)] = static_cast<double>(g.degree(v));
    bool need_cc = false, need_bet = cfg.labeling == Labeling::Betweenness;
    for (auto a : cfg.attributes) {
        if (a == NodeAttribute::ClusteringCoefficient) need_cc = true;
        if (a == NodeAttribute::Betweenness) need_bet = true;
    }
    if (need_cc) {
        cc.resize(n);
        for (NodeId v = 0; v < g.n(); ++v)
            cc[static_cast<std::size_t>(v)] = clustering_coefficient(g, v);
    }
    if (need_bet) {
        if (g.directed() && cfg.undirected_betweenness) {
            Graph sym(g.n(), false, [&] {
                std::set<Edge> dedup;
                for (auto [u, v] : g.edges())
                    dedup.insert(u < v ? Edge{u, v} : Edge{v, u});
                return std::vector<Edge>(dedup.begin(), dedup.end());
            }());
            bet = betweenness(sym);
        } else {
            bet = betweenness(g);
        }
    }
    s.label = cfg.labeling == Labeling::Degree ? deg : bet;

    double nn = static_cast<double>(g.n());
    double deg_norm = std::max(1.0, nn - 1.0);
    double bet_norm = g.directed() && !cfg.undirected_betweenness
                          ? std::max(1.0, (nn - 1.0) * (nn - 2.0))
                          : std::max(1.0, (nn - 1.0) * (nn - 2.0) / 2.0);
    for (auto a : cfg.attributes) {
        std::vector<double> col(n);
        for (std::size_t i = 0; i < n; ++i) {
            switch (a) {
                case NodeAttribute::Degree: col[i] = deg[i] / deg_norm; break;
                case NodeAttribute::ClusteringCoefficient: col[i] = cc[i]; break;
                case NodeAttribute::Betweenness:
                    col[i] = std::min(1.0, bet[i] / bet_norm);
                    break;
            }
        }
        s.attributes.push_back(std::move(col));
    }
    return s;
}

} // namespace lfr_detail

// Top-W nodes by labeling score, ties by smaller id.
inline std::vector<NodeId> select_nodes(const Graph& g, const LfrConfig& cfg) {
    auto scores = lfr_detail::compute_scores(g, cfg);
    std::vector<NodeId> nodes(static_cast<std::size_t>(g.n()));
    for (NodeId v = 0; v < g.n(); ++v) nodes[static_cast<std::size_t>(v)] = v;
    std::stable_sort(nodes.begin(), nodes.end(), [&](NodeId a, NodeId b) {
        double sa = scores.label[static_cast<std::size_t>(a)];
        double sb = scores.label[static_cast<std::size_t>(b)];
        if (sa != sb) return sa > sb;
        return a < b;
    });
    if (nodes.size() > static_cast<std::size_t>(cfg.w)) nodes.resize(static_cast<std::size_t>(cfg.w));
    return nodes;
}

// BFS ring-by-ring collection (underlying undirected graph) until at least
// g_size nodes are gathered or the component is exhausted. Whole rings are
// added, so the result may exceed g_size. Distances from the root included.
struct Neighborhood {
    std::vector<NodeId> nodes;
    std::vector<int> dist; // parallel to nodes
};

inline Neighborhood assemble_neighborhood(const Graph& g, NodeId root, int g_size) {
    Neighborhood nb;
    std::vector<int> dist(static_cast<std::size_t>(g.n()), -1);
    std::vector<NodeId> frontier{root};
    dist[static_cast<std::size_t>(root)] = 0;
    nb.nodes.push_back(root);
    nb.dist.push_back(0);
    int d = 0;
    while (static_cast<int>(nb.nodes.size()) < g_size && !frontier.empty()) {
        ++d;
        std::vector<NodeId> next;
        for (NodeId v : frontier) {
            auto visit = [&](NodeId w) {
                auto wi = static_cast<std::size_t>(w);
                if (dist[wi] < 0) {
                    dist[wi] = d;
                    next.push_back(w);
                }
            };
            for (NodeId w : g.out_neighbors(v)) visit(w);
            if (g.directed())
                for (NodeId w : g.in_neighbors(v)) visit(w);
        }
        std::sort(next.begin(), next.end());
        next.erase(std::unique(next.begin(), next.end()), next.end());
        for (NodeId w : next) {
            nb.nodes.push_back(w);
            nb.dist.push_back(d);
        }
        frontier = std::move(next);
    }
    return nb;
}

namespace lfr_detail {

// One g x h field: root first, then neighbors by (distance asc, label score
// desc, id asc); rows past the available nodes stay zero.
inline void normalize_field_into(const Graph& g, const Neighborhood& nb,
                                 const LfrConfig& cfg, const NodeScores& scores,
                                 float* out) {
    struct Entry {
        NodeId node;
        int dist;
    };
    std::vector<Entry> entries;
    entries.reserve(nb.nodes.size());
    for (std::size_t i = 1; i < nb.nodes.size(); ++i)
        entries.push_back({nb.nodes[i], nb.dist[i]});
    std::stable_sort(entries.begin(), entries.end(), [&](const Entry& a, const Entry& b) {
        if (a.dist != b.dist) return a.dist < b.dist;
        double sa = scores.label[static_cast<std::size_t>(a.node)];
        double sb = scores.label[static_cast<std::size_t>(b.node)];
        if (sa != sb) return sa > sb;
        return a.node < b.node;
    });
    const int h = cfg.h();
    auto write_row = [&](int row, NodeId v) {
        for (int c = 0; c < h; ++c)
            out[static_cast<std::size_t>(row) * h + c] =
                static_cast<float>(scores.attributes[static_cast<std::size_t>(c)]
                                                    [static_cast<std::size_t>(v)]);
    };
    write_row(0, nb.nodes[0]);
    for (int row = 1; row < cfg.g && static_cast<std::size_t>(row - 1) < entries.size(); ++row)
        write_row(row, entries[static_cast<std::size_t>(row - 1)].node);
    (void)g;
}

} // namespace lfr_detail

inline std::vector<float> normalize_field(const Graph& g, NodeId root,
                                          const Neighborhood& nb, const LfrConfig& cfg) {
    if (nb.nodes.empty() || nb.nodes[0] != root)
        throw std::invalid_argument("normalize_field: root must head the candidate set");
    auto scores = lfr_detail::compute_scores(g, cfg);
    std::vector<float> out(static_cast<std::size_t>(cfg.g) * cfg.h(), 0.0f);
    lfr_detail::normalize_field_into(g, nb, cfg, scores, out.data());
    return out;
}

// Whole SAN pipeline: select, assemble, normalize, pad.
inline ReceptiveFieldTensor encode(const Graph& g, const LfrConfig& cfg) {
    ReceptiveFieldTensor t;
    t.w = cfg.w;
    t.g = cfg.g;
    t.h = cfg.h();
    t.source_n = g.n();
    t.data.assign(static_cast<std::size_t>(t.w) * t.g * t.h, 0.0f);
    auto scores = lfr_detail::compute_scores(g, cfg);
    std::vector<NodeId> selected = select_nodes(g, cfg);
    for (std::size_t i = 0; i < selected.size(); ++i) {
        Neighborhood nb = assemble_neighborhood(g, selected[i], cfg.g);
        lfr_detail::normalize_field_into(g, nb, cfg, scores,
                                         t.data.data() + i * static_cast<std::size_t>(t.g) * t.h);
    }
    return t;
}

// Row-major square of side ceil(sqrt(w*g*h)), flattened in (field,row,col)
// order, zero-padded at the tail.
struct SquareImage {
    int side = 0;
    std::vector<float> data; // side*side
};

inline int square_side(int w, int g, int h) {
    auto total = static_cast<double>(w) * g * h;
    return static_cast<int>(std::ceil(std::sqrt(total)));
}

inline SquareImage reshape_square(const ReceptiveFieldTensor& t) {
    SquareImage img;
    img.side = square_side(t.w, t.g, t.h);
    img.data.assign(static_cast<std::size_t>(img.side) * img.side, 0.0f);
    std::copy(t.data.begin(), t.data.end(), img.data.begin());
    return img;
}

// --- tensor binary format ------------------------------------------------
// magic RNETLFR1, then w,g,h as u32 LE, then w*g*h f32 LE in
// (field,row,col) order.

namespace lfr_detail {

inline void put_u32(std::ostream& os, std::uint32_t x) {
    char b[4] = {static_cast<char>(x & 0xff), static_cast<char>((x >> 8) & 0xff),
                 static_cast<char>((x >> 16) & 0xff), static_cast<char>((x >> 24) & 0xff)};
    os.write(b, 4);
}

inline std::uint32_t get_u32(std::istream& is) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    if (!is) throw std::runtime_error("tensor file: truncated");
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

inline void put_f32(std::ostream& os, float f) {
    std::uint32_t x;
    std::memcpy(&x, &f, 4);
    put_u32(os, x);
}

inline float get_f32(std::istream& is) {
    std::uint32_t x = get_u32(is);
    float f;
    std::memcpy(&f, &x, 4);
    return f;
}

} // namespace lfr_detail

inline void save_tensor(const ReceptiveFieldTensor& t, std::ostream& os) {
    os.write("RNETLFR1", 8);
    lfr_detail::put_u32(os, static_cast<std::uint32_t>(t.w));
    lfr_detail::put_u32(os, static_cast<std::uint32_t>(t.g));
    lfr_detail::put_u32(os, static_cast<std::uint32_t>(t.h));
    for (float f : t.data) lfr_detail::put_f32(os, f);
}

inline void save_tensor(const ReceptiveFieldTensor& t, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    save_tensor(t, f);
}

inline ReceptiveFieldTensor load_tensor(std::istream& is) {
    char magic[8];
    is.read(magic, 8);
    if (!is || std::string(magic, 8) != "RNETLFR1")
        throw std::runtime_error("tensor file: bad magic");
    ReceptiveFieldTensor t;
    t.w = static_cast<int>(lfr_detail::get_u32(is));
    t.g = static_cast<int>(lfr_detail::get_u32(is));
    t.h = static_cast<int>(lfr_detail::get_u32(is));
    auto total = static_cast<std::size_t>(t.w) * t.g * t.h;
    t.data.resize(total);
    for (auto& f : t.data) f = lfr_detail::get_f32(is);
    return t;
}

inline ReceptiveFieldTensor load_tensor(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open: " + path);
    return load_tensor(f);
}

} // namespace robnet

#endif // ROBNET_LFR_HPP

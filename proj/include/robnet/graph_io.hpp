#ifndef ROBNET_GRAPH_IO_HPP
#define ROBNET_GRAPH_IO_HPP

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "robnet/graph.hpp"

namespace robnet {

// Graph text format v1:
//   #robnet-graph v1 directed=<0|1> n=<N> m=<M>
// followed by exactly M lines "<u> <v>", 0-based, LF endings.

inline void save_graph(const Graph& g, std::ostream& os) {
    os << "#robnet-graph v1 directed=" << (g.directed() ? 1 : 0)
       << " n=" << g.n() << " m=" << g.m() << "\n";
    for (const auto& [u, v] : g.edges()) os << u << " " << v << "\n";
}

inline void save_graph(const Graph& g, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    save_graph(g, f);
}

inline Graph load_graph(std::istream& is) {
    std::string header;
    if (!std::getline(is, header)) throw std::runtime_error("graph file: empty");
    long long directed = -1, n = -1, m = -1;
    {
        std::istringstream hs(header);
        std::string magic, tok;
        hs >> magic;
        if (magic != "#robnet-graph") throw std::runtime_error("graph file: bad magic");
        hs >> tok;
        if (tok != "v1") throw std::runtime_error("graph file: unsupported version");
        while (hs >> tok) {
            auto eq = tok.find('=');
            if (eq == std::string::npos) throw std::runtime_error("graph file: bad header field");
            std::string key = tok.substr(0, eq);
            long long val = std::stoll(tok.substr(eq + 1));
            if (key == "directed") directed = val;
            else if (key == "n") n = val;
            else if (key == "m") m = val;
            else throw std::runtime_error("graph file: unknown header field " + key);
        }
    }
    if (directed < 0 || directed > 1 || n < 0 || m < 0)
        throw std::runtime_error("graph file: incomplete header");
    std::vector<Edge> edges;
    edges.reserve(static_cast<std::size_t>(m));
    std::string line;
    for (long long i = 0; i < m; ++i) {
        if (!std::getline(is, line)) throw std::runtime_error("graph file: truncated edge list");
        std::istringstream ls(line);
        long long u, v;
        if (!(ls >> u >> v)) throw std::runtime_error("graph file: malformed edge line");
        edges.emplace_back(static_cast<NodeId>(u), static_cast<NodeId>(v));
    }
    // Graph ctor rejects self-loops, duplicates, out-of-range ids.
    return Graph(static_cast<NodeId>(n), directed == 1, std::move(edges));
}

inline Graph load_graph(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open: " + path);
    return load_graph(f);
}

} // namespace robnet

#endif // ROBNET_GRAPH_IO_HPP

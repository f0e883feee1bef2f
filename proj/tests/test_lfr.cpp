#include <catch2/catch_amalgamated.hpp>

#include <queue>
#include <set>
#include <sstream>

#include "robnet/gen.hpp"
#include "robnet/lfr.hpp"

using namespace robnet;

namespace {

LfrConfig config(int w, int g) {
    LfrConfig cfg;
    cfg.w = w;
    cfg.g = g;
    return cfg;
}

// plain BFS reference for neighborhood collection
std::set<NodeId> bfs_oracle(const Graph& g, NodeId root, int want) {
    std::set<NodeId> out{root};
    std::vector<int> dist(static_cast<std::size_t>(g.n()), -1);
    dist[static_cast<std::size_t>(root)] = 0;
    std::queue<NodeId> q;
    q.push(root);
    int ring = 0;
    while (static_cast<int>(out.size()) < want) {
        // gather the next full ring
        std::set<NodeId> next;
        std::queue<NodeId> q2;
        for (NodeId v = 0; v < g.n(); ++v)
            if (dist[static_cast<std::size_t>(v)] == ring) q2.push(v);
        while (!q2.empty()) {
            NodeId v = q2.front();
            q2.pop();
            auto visit = [&](NodeId w) {
                if (dist[static_cast<std::size_t>(w)] < 0) {
                    dist[static_cast<std::size_t>(w)] = ring + 1;
                    next.insert(w);
                }
            };
            for (NodeId w : g.out_neighbors(v)) visit(w);
            if (g.directed())
                for (NodeId w : g.in_neighbors(v)) visit(w);
        }
        if (next.empty()) break;
        out.insert(next.begin(), next.end());
        ++ring;
    }
    return out;
}

} // namespace

TEST_CASE("node selection ranks by score with id tie-break") {
    // star S5: hub 0 has degree 5, leaves tie at 1
    Graph star(6, false, {{0, 1}, {0, 2}, {0, 3}, {0, 4}, {0, 5}});
    std::vector<NodeId> sel = select_nodes(star, config(3, 4));
    CHECK(sel == std::vector<NodeId>{0, 1, 2});
    // N < W: all nodes, no padding entries here
    std::vector<NodeId> all = select_nodes(star, config(10, 4));
    CHECK(all.size() == 6);
    CHECK(all[0] == 0);
}

TEST_CASE("selection follows a relabeling") {
    // path 0-1-2-3-4: degree scores 1,2,2,2,1
    Graph p(5, false, {{0, 1}, {1, 2}, {2, 3}, {3, 4}});
    std::vector<NodeId> sel = select_nodes(p, config(3, 3));
    CHECK(sel == std::vector<NodeId>{1, 2, 3});
    // relabeled copy: map i -> 4-i
    Graph q(5, false, {{4, 3}, {3, 2}, {2, 1}, {1, 0}});
    std::vector<NodeId> sel2 = select_nodes(q, config(3, 3));
    CHECK(sel2 == std::vector<NodeId>{1, 2, 3}); // same score multiset
}

TEST_CASE("neighborhood assembly gathers whole BFS rings") {
    Graph chain(5, false, {{0, 1}, {1, 2}, {2, 3}, {3, 4}});
    Neighborhood nb = assemble_neighborhood(chain, 2, 3);
    std::set<NodeId> got(nb.nodes.begin(), nb.nodes.end());
    CHECK(got == std::set<NodeId>{1, 2, 3});
    CHECK(nb.nodes[0] == 2);
    CHECK(nb.dist[0] == 0);

    Graph isolated(3, false, {{1, 2}});
    Neighborhood solo = assemble_neighborhood(isolated, 0, 4);
    CHECK(solo.nodes == std::vector<NodeId>{0});

    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        GenSpec s;
        s.model = NetModel::ER;
        s.n = 20;
        s.m = 30;
        s.directed = seed % 2 == 1;
        s.seed = seed;
        Graph g = generate(s);
        for (NodeId root : {NodeId(0), NodeId(7), NodeId(19)}) {
            Neighborhood fast = assemble_neighborhood(g, root, 6);
            std::set<NodeId> got2(fast.nodes.begin(), fast.nodes.end());
            CHECK(got2 == bfs_oracle(g, root, 6));
        }
    }
}

TEST_CASE("field normalization on hand examples") {
    // K3: every node degree 2 (= N-1), cc 1
    Graph k3(3, false, {{0, 1}, {1, 2}, {0, 2}});
    LfrConfig cfg = config(3, 3);
    Neighborhood nb = assemble_neighborhood(k3, 0, 3);
    std::vector<float> field = normalize_field(k3, 0, nb, cfg);
    REQUIRE(field.size() == 6); // g=3, h=2
    CHECK(field[0] == Catch::Approx(1.0)); // deg 2/(3-1)
    CHECK(field[1] == Catch::Approx(1.0)); // cc
    CHECK(field[2] == Catch::Approx(1.0));
    CHECK(field[4] == Catch::Approx(1.0));

    // isolated root: zero attributes, zero rows below
    Graph iso(4, false, {{1, 2}});
    Neighborhood solo = assemble_neighborhood(iso, 0, 3);
    std::vector<float> zero_field = normalize_field(iso, 0, solo, cfg);
    for (float x : zero_field) CHECK(x == 0.0f);

    CHECK_THROWS_AS(normalize_field(iso, 1, solo, cfg), std::invalid_argument);
}

TEST_CASE("neighbors order by distance, then score, then id") {
    //       3
    //       |
    //   1 - 0 - 2 - 4, with 2 also tied to 5: deg(1)=1, deg(2)=3, deg(3)=1
    Graph g(6, false, {{0, 1}, {0, 2}, {0, 3}, {2, 4}, {2, 5}});
    LfrConfig cfg = config(6, 6);
    Neighborhood nb = assemble_neighborhood(g, 0, 6);
    std::vector<float> field = normalize_field(g, 0, nb, cfg);
    // row 0 root; ring 1 sorted: 2 (deg 3), then 1, 3 (deg 1, id order); ring 2: 4, 5
    std::vector<double> want_deg = {3.0 / 5, 3.0 / 5, 1.0 / 5, 1.0 / 5, 1.0 / 5, 1.0 / 5};
    for (int row = 0; row < 6; ++row)
        CHECK(field[static_cast<std::size_t>(row) * 2] ==
              Catch::Approx(want_deg[static_cast<std::size_t>(row)]));
}

TEST_CASE("encode pads with all-zero fields and bounds every entry") {
    Graph k2(2, false, {{0, 1}});
    ReceptiveFieldTensor t = encode(k2, config(5, 3));
    CHECK(t.data.size() == 5u * 3u * 2u);
    CHECK(t.source_n == 2);
    for (int f = 2; f < 5; ++f) // fields beyond N are padding
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 2; ++c) CHECK(t.at(f, r, c) == 0.0f);

    GenSpec s;
    s.model = NetModel::BA;
    s.n = 40;
    s.m = 100;
    s.seed = 2;
    Graph g = generate(s);
    ReceptiveFieldTensor big = encode(g, config(30, 8));
    CHECK(big.data.size() == 30u * 8u * 2u);
    for (float x : big.data) {
        CHECK(x >= 0.0f);
        CHECK(x <= 1.0f);
    }
    // pure function
    ReceptiveFieldTensor again = encode(g, config(30, 8));
    CHECK(big.data == again.data);
}

TEST_CASE("betweenness attribute and labeling variants work") {
    GenSpec s;
    s.model = NetModel::ER;
    s.n = 25;
    s.m = 60;
    s.directed = true;
    s.seed = 6;
    Graph g = generate(s);
    LfrConfig cfg = config(10, 5);
    cfg.labeling = Labeling::Betweenness;
    cfg.attributes = {NodeAttribute::Degree, NodeAttribute::Betweenness};
    ReceptiveFieldTensor t = encode(g, cfg);
    for (float x : t.data) {
        CHECK(x >= 0.0f);
        CHECK(x <= 1.0f);
    }
    cfg.undirected_betweenness = true;
    ReceptiveFieldTensor t2 = encode(g, cfg);
    CHECK(t2.data.size() == t.data.size());
}

TEST_CASE("square reshape side and padding") {
    CHECK(square_side(500, 10, 2) == 100);  // exactly 10000 elements
    CHECK(square_side(1000, 10, 2) == 142); // ceil(sqrt(20000))
    CHECK(142 * 142 - 20000 == 164);

    Graph k3(3, false, {{0, 1}, {1, 2}, {0, 2}});
    ReceptiveFieldTensor t = encode(k3, config(5, 3));
    SquareImage img = reshape_square(t);
    CHECK(img.side == square_side(5, 3, 2)); // ceil(sqrt(30)) = 6
    CHECK(img.data.size() == 36);
    // prefix recovers the tensor; tail is zero
    for (std::size_t i = 0; i < t.data.size(); ++i) CHECK(img.data[i] == t.data[i]);
    for (std::size_t i = t.data.size(); i < img.data.size(); ++i) CHECK(img.data[i] == 0.0f);
}

TEST_CASE("nodes ranked far below W do not affect the tensor") {
    // hub + triangle, plus a disconnected pendant chain 9-10-11; removing the
    // low-rank leaf 11 leaves the top-W fields intact (degree column modulo
    // the N-1 normalization, cc column exactly)
    std::vector<Edge> edges;
    for (NodeId v = 1; v <= 8; ++v) edges.emplace_back(0, v);
    edges.emplace_back(1, 2);
    edges.emplace_back(2, 3);
    edges.emplace_back(1, 3);
    edges.emplace_back(9, 10);
    edges.emplace_back(10, 11);
    Graph g(12, false, edges);
    LfrConfig cfg = config(4, 3);
    ReceptiveFieldTensor with = encode(g, cfg);
    NodeMask mask(12);
    mask.remove(11);
    ReceptiveFieldTensor without = encode(induced_subgraph(g, mask).graph, cfg);
    REQUIRE(with.data.size() == without.data.size());
    for (int f = 0; f < 4; ++f)
        for (int r = 0; r < 3; ++r) {
            CHECK(with.at(f, r, 0) * 11.0 == Catch::Approx(without.at(f, r, 0) * 10.0).margin(1e-6));
            CHECK(with.at(f, r, 1) == without.at(f, r, 1));
        }
}

TEST_CASE("tensor binary format round-trips") {
    GenSpec s;
    s.model = NetModel::SF;
    s.n = 30;
    s.m = 70;
    s.seed = 12;
    ReceptiveFieldTensor t = encode(generate(s), config(20, 6));
    std::stringstream ss;
    save_tensor(t, ss);
    // header: 8-byte magic + 3 u32 + payload
    CHECK(ss.str().size() == 8 + 12 + t.data.size() * 4);
    ReceptiveFieldTensor back = load_tensor(ss);
    CHECK(back.w == t.w);
    CHECK(back.g == t.g);
    CHECK(back.h == t.h);
    CHECK(back.data == t.data);
    std::stringstream bad("NOTMAGIC");
    CHECK_THROWS(load_tensor(bad));
}

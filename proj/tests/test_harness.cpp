#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "robnet/harness.hpp"
#include "robnet/stats.hpp"

using namespace robnet;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& tag) {
    fs::path p = fs::temp_directory_path() / ("robnet_test_" + tag);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string file_bytes(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

DatasetSpec tiny_spec() {
    DatasetSpec spec;
    spec.models = {NetModel::ER, NetModel::BA};
    spec.n_min = 20;
    spec.n_max = 26;
    spec.train_count = 4;
    spec.validation_count = 1;
    spec.test_count = 3;
    spec.seed = 77;
    return spec;
}

} // namespace

TEST_CASE("chi-square survival function sanity") {
    CHECK(chi_square_sf(3.841, 1) == Catch::Approx(0.05).margin(2e-4));
    CHECK(chi_square_sf(5.991, 2) == Catch::Approx(0.05).margin(2e-4));
    CHECK(chi_square_sf(0.0, 3) == 1.0);
    CHECK(chi_square_sf(100.0, 2) < 1e-10);
    CHECK_THROWS_AS(chi_square_sf(1.0, 0), std::invalid_argument);
}

TEST_CASE("kruskal-wallis matches the hand-computed example") {
    // groups [1,2,3], [4,5,6]: rank sums 6 and 15, H = 12/42*(12+75) - 21
    KruskalWallisResult r = kruskal_wallis({{1, 2, 3}, {4, 5, 6}});
    CHECK(r.h == Catch::Approx(3.857142857).margin(1e-6));
    CHECK_FALSE(r.degenerate);
    CHECK(r.p_value == Catch::Approx(chi_square_sf(r.h, 1)));

    // interleaved identical groups: symmetric, not significant
    KruskalWallisResult sym = kruskal_wallis({{1, 2}, {1, 2}});
    CHECK_FALSE(sym.significant);

    // all identical: degenerate
    KruskalWallisResult deg = kruskal_wallis({{2, 2}, {2, 2, 2}});
    CHECK(deg.degenerate);
    CHECK_FALSE(deg.significant);

    CHECK_THROWS_AS(kruskal_wallis({{1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(kruskal_wallis({{1.0}, {}}), std::invalid_argument);
}

TEST_CASE("kruskal-wallis is invariant under monotone transforms") {
    std::vector<std::vector<double>> groups = {{0.1, 0.9, 2.3, 1.1},
                                               {3.0, 2.8, 0.4, 1.9},
                                               {5.5, 0.2, 2.2, 4.1}};
    KruskalWallisResult base = kruskal_wallis(groups);
    auto transformed = groups;
    for (auto& g : transformed)
        for (auto& v : g) v = std::exp(v);
    KruskalWallisResult expd = kruskal_wallis(transformed);
    CHECK(expd.h == Catch::Approx(base.h).margin(1e-12));
    CHECK(expd.significant == base.significant);
    for (auto& g : transformed)
        for (auto& v : g) v = std::log(v); // back to base, then log again
    for (auto& g : transformed)
        for (auto& v : g) v = std::log(v + 10.0);
    KruskalWallisResult logd = kruskal_wallis(transformed);
    CHECK(logd.h == Catch::Approx(base.h).margin(1e-12));
}

TEST_CASE("median and mean helpers") {
    CHECK(median({3.0, 1.0, 2.0}) == 2.0);
    CHECK(median({4.0, 1.0, 2.0, 3.0}) == 2.5);
    CHECK(mean({1.0, 2.0, 3.0}) == 2.0);
    CHECK_THROWS_AS(median({}), std::invalid_argument);
}

TEST_CASE("dataset builds the requested records with valid files") {
    fs::path dir = temp_dir("build");
    DatasetManifest man = build_dataset(tiny_spec(), dir.string());
    CHECK(man.records.size() == 2 * (4 + 1 + 3));
    int train = 0, val = 0, test = 0;
    for (const auto& r : man.records) {
        CHECK(fs::exists(man.resolve(r.graph_path)));
        CHECK(fs::exists(man.resolve(r.curve_path)));
        CHECK(r.n >= 20);
        CHECK(r.n <= 26);
        if (r.split == "train") ++train;
        if (r.split == "validation") ++val;
        if (r.split == "test") ++test;
        // realized average degree within the configured band (after clamping)
        Graph g = load_graph(man.resolve(r.graph_path).string());
        auto band = default_degree_range(r.model);
        CHECK(g.average_degree() >= band.first - 0.2);
        CHECK(g.average_degree() <= band.second + 0.2);
    }
    CHECK(train == 8);
    CHECK(val == 2);
    CHECK(test == 6);
    fs::remove_all(dir);
}

TEST_CASE("same seed gives byte-identical manifests and files") {
    fs::path d1 = temp_dir("det1"), d2 = temp_dir("det2");
    DatasetManifest m1 = build_dataset(tiny_spec(), d1.string());
    DatasetManifest m2 = build_dataset(tiny_spec(), d2.string());
    save_manifest(m1, (d1 / "manifest.txt").string());
    save_manifest(m2, (d2 / "manifest.txt").string());
    CHECK(file_bytes(d1 / "manifest.txt") == file_bytes(d2 / "manifest.txt"));
    for (const auto& r : m1.records) {
        CHECK(file_bytes(d1 / r.graph_path) == file_bytes(d2 / r.graph_path));
        CHECK(file_bytes(d1 / r.curve_path) == file_bytes(d2 / r.curve_path));
    }
    // a multi-worker build produces the same bytes as the sequential one
    fs::path d3 = temp_dir("det3");
    DatasetSpec par = tiny_spec();
    par.workers = 3;
    DatasetManifest m3 = build_dataset(par, d3.string());
    save_manifest(m3, (d3 / "manifest.txt").string());
    CHECK(file_bytes(d1 / "manifest.txt") == file_bytes(d3 / "manifest.txt"));
    fs::remove_all(d1);
    fs::remove_all(d2);
    fs::remove_all(d3);
}

TEST_CASE("manifest loading validates its records") {
    fs::path dir = temp_dir("load");
    DatasetSpec spec = tiny_spec();
    spec.train_count = 2;
    spec.validation_count = 0;
    spec.test_count = 1;
    DatasetManifest man = build_dataset(spec, dir.string());
    save_manifest(man, (dir / "manifest.txt").string());
    DatasetManifest back = load_manifest((dir / "manifest.txt").string());
    CHECK(back.records.size() == man.records.size());
    for (std::size_t i = 0; i < man.records.size(); ++i) {
        CHECK(back.records[i].id == man.records[i].id);
        CHECK(back.records[i].model == man.records[i].model);
        CHECK(back.records[i].split == man.records[i].split);
    }
    // missing file detected
    fs::remove(dir / man.records[0].graph_path);
    CHECK_THROWS(load_manifest((dir / "manifest.txt").string()));
    fs::remove_all(dir);
}

TEST_CASE("simulation predictor scores zero against itself") {
    fs::path dir = temp_dir("sim0");
    DatasetSpec spec = tiny_spec();
    spec.models = {NetModel::ER};
    DatasetManifest man = build_dataset(spec, dir.string());
    auto table = run_experiment(man, {make_simulation_predictor(50)}, AttackKind::RA,
                                RobustnessMetric::Connectivity, 50);
    REQUIRE(table.size() == 1);
    CHECK(table[0].mean_error == 0.0);
    CHECK(table[0].seconds > 0.0);
    for (double e : table[0].pointwise) CHECK(e == 0.0);
    fs::remove_all(dir);
}

TEST_CASE("constant predictor against all-ones curves errs by the offset") {
    // complete graphs: LCC fraction is 1 after every removal
    fs::path dir = temp_dir("const");
    std::vector<Edge> edges;
    for (NodeId u = 0; u < 10; ++u)
        for (NodeId v = u + 1; v < 10; ++v) edges.emplace_back(u, v);
    Graph kn(10, false, edges);
    DatasetManifest man;
    man.dir = dir;
    for (int i = 0; i < 3; ++i) {
        RobustnessCurve c = connectivity_curve(kn, {AttackKind::RA, true, static_cast<std::uint64_t>(i)});
        ManifestRecord r;
        r.id = i;
        r.model = NetModel::ER;
        r.n = 10;
        r.m = static_cast<std::int64_t>(kn.m());
        r.split = "test";
        r.graph_path = "g" + std::to_string(i) + ".txt";
        r.curve_path = "c" + std::to_string(i) + ".csv";
        save_graph(kn, (dir / r.graph_path).string());
        save_curve(c, (dir / r.curve_path).string());
        man.records.push_back(r);
    }
    auto table = run_experiment(man, {make_constant_predictor(0.5, 40)}, AttackKind::RA,
                                RobustnessMetric::Connectivity, 40);
    REQUIRE(table.size() == 1);
    CHECK(table[0].mean_error == Catch::Approx(0.5).margin(1e-12));
    fs::remove_all(dir);
}

TEST_CASE("experiment tables are reproducible") {
    fs::path dir = temp_dir("repro");
    DatasetManifest man = build_dataset(tiny_spec(), dir.string());
    std::vector<CurvePredictor> preds{make_mean_curve_predictor(man, 30)};
    auto t1 = run_experiment(man, preds, AttackKind::RA, RobustnessMetric::Connectivity, 30);
    auto t2 = run_experiment(man, preds, AttackKind::RA, RobustnessMetric::Connectivity, 30);
    REQUIRE(t1.size() == t2.size());
    for (std::size_t i = 0; i < t1.size(); ++i) {
        CHECK(t1[i].mean_error == t2[i].mean_error);
        CHECK(t1[i].pointwise == t2[i].pointwise);
    }
    fs::remove_all(dir);
}

TEST_CASE("rank table: truth method scores zero, reversal is enumerable") {
    fs::path dir = temp_dir("rank");
    DatasetSpec spec = tiny_spec();
    spec.models = {NetModel::ER};
    spec.test_count = 5;
    DatasetManifest man = build_dataset(spec, dir.string());
    RankMethod truth = make_truth_rank_method(40);
    RankMethod reversed{"reversed", RankDirection::LowerBetter, truth.score};
    auto table = rank_error_table(man, {truth, reversed}, 40);
    REQUIRE(table.size() == 2);
    CHECK(table[0].method == "sim");
    CHECK(table[0].mean_rank_error == 0.0);
    // reversing L=5 distinct scores: mean |rank gap| = 2.4 = ceil(25/2)/5 ... 12/5
    CHECK(table[1].mean_rank_error == Catch::Approx(12.0 / 5.0));
    fs::remove_all(dir);
}

TEST_CASE("reversal rank error closed form at L=5") {
    std::vector<int> fwd{1, 2, 3, 4, 5}, rev{5, 4, 3, 2, 1};
    CHECK(mean_rank_error(rev, fwd) == Catch::Approx(2.4));
    // ceil(L^2/2)/L for L=5: ceil(12.5)=13? enumeration gives 12/5; the sum of
    // |L+1-2i| over i is 12 for L=5
    double sum = 0;
    for (int i = 1; i <= 5; ++i) sum += std::abs(5 + 1 - 2 * i);
    CHECK(sum / 5.0 == Catch::Approx(2.4));
}

TEST_CASE("spectral rank methods flag undefined scores") {
    fs::path dir = temp_dir("specrank");
    // two connected graphs and one disconnected one
    DatasetManifest man;
    man.dir = dir;
    auto put = [&](int id, const Graph& g) {
        RobustnessCurve c = connectivity_curve(g, {AttackKind::RA, true, 1});
        ManifestRecord r;
        r.id = id;
        r.model = NetModel::ER;
        r.n = g.n();
        r.m = static_cast<std::int64_t>(g.m());
        r.split = "test";
        r.graph_path = "g" + std::to_string(id) + ".txt";
        r.curve_path = "c" + std::to_string(id) + ".csv";
        save_graph(g, (dir / r.graph_path).string());
        save_curve(c, (dir / r.curve_path).string());
        man.records.push_back(r);
    };
    put(0, Graph(6, false, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {0, 5}}));
    put(1, Graph(6, false, {{0, 1}, {0, 2}, {0, 3}, {0, 4}, {0, 5}, {1, 2}}));
    put(2, Graph(6, false, {{0, 1}, {2, 3}, {4, 5}})); // disconnected
    auto table = rank_error_table(man, {make_spectral_rank_method(SpectralMeasure::EF),
                                        make_spectral_rank_method(SpectralMeasure::SR)},
                                  40);
    REQUIRE(table.size() == 2);
    CHECK(table[0].method == "ef");
    CHECK(table[0].has_undefined);
    CHECK_FALSE(table[1].has_undefined);
    fs::remove_all(dir);
}

TEST_CASE("bench rows report positive medians") {
    Graph g = generate([] {
        GenSpec s;
        s.model = NetModel::ER;
        s.n = 30;
        s.m = 60;
        s.seed = 9;
        return s;
    }());
    BenchRow row = bench_stage("sim", 5, [&](int i) {
        connectivity_curve(g, {AttackKind::RA, true, static_cast<std::uint64_t>(i)});
    });
    CHECK(row.median_seconds > 0.0);
    CHECK(row.runs == 5);
}

TEST_CASE("plot data averages curves with matching error columns") {
    fs::path dir = temp_dir("plots");
    DatasetSpec spec = tiny_spec();
    spec.models = {NetModel::ER};
    DatasetManifest man = build_dataset(spec, dir.string());
    std::stringstream out;
    emit_plot_data(man, {make_simulation_predictor(25)}, AttackKind::RA,
                   RobustnessMetric::Connectivity, 25, out);
    std::string header;
    std::getline(out, header);
    CHECK(header == "delta,sim,sim_pred,sim_err");
    int rows = 0;
    std::string line;
    while (std::getline(out, line)) {
        ++rows;
        // sim column equals prediction, error column is zero
        std::stringstream ls(line);
        std::string delta, sim, pred, err;
        std::getline(ls, delta, ',');
        std::getline(ls, sim, ',');
        std::getline(ls, pred, ',');
        std::getline(ls, err, ',');
        CHECK(sim == pred);
        CHECK(std::stod(err) == 0.0);
    }
    CHECK(rows == 25);
    CHECK_THROWS(emit_plot_data(man, {}, AttackKind::TB, RobustnessMetric::Controllability, 25,
                                out));
    fs::remove_all(dir);
}

TEST_CASE("mean-curve predictor averages the training curves") {
    fs::path dir = temp_dir("meancurve");
    DatasetManifest man;
    man.dir = dir;
    Graph p4(4, false, {{0, 1}, {1, 2}, {2, 3}});
    Graph k4(4, false, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}});
    auto put = [&](int id, const Graph& g, const std::string& split) {
        RobustnessCurve c = connectivity_curve(g, {AttackKind::TD, true, 0});
        ManifestRecord r;
        r.id = id;
        r.model = NetModel::ER;
        r.n = g.n();
        r.m = static_cast<std::int64_t>(g.m());
        r.split = split;
        r.attack = AttackKind::TD;
        r.graph_path = "g" + std::to_string(id) + ".txt";
        r.curve_path = "c" + std::to_string(id) + ".csv";
        save_graph(g, (dir / r.graph_path).string());
        save_curve(c, (dir / r.curve_path).string());
        man.records.push_back(r);
    };
    put(0, p4, "train");
    put(1, k4, "train");
    put(2, k4, "test");
    CurvePredictor mean_pred = make_mean_curve_predictor(man, 20);
    std::vector<double> got = mean_pred.predict(man, man.records[2]);
    std::vector<double> a = record_truth_resampled(man, man.records[0], 20);
    std::vector<double> b = record_truth_resampled(man, man.records[1], 20);
    for (std::size_t i = 0; i < got.size(); ++i)
        CHECK(got[i] == Catch::Approx(0.5 * (a[i] + b[i])).margin(1e-15));
    fs::remove_all(dir);
}

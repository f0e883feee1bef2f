#ifndef ROBNET_HARNESS_HPP
#define ROBNET_HARNESS_HPP

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "robnet/attack.hpp"
#include "robnet/gen.hpp"
#include "robnet/graph_io.hpp"
#include "robnet/lfr.hpp"
#include "robnet/nn.hpp"
#include "robnet/spectral.hpp"
#include "robnet/stats.hpp"

namespace robnet {

// --- dataset manifest ------------------------------------------------------
// Line-delimited text schema, one record per line after the header:
//   id model n m directed seed split attack metric graph_file curve_file
// File names are relative to the manifest's directory.

struct ManifestRecord {
    int id = 0;
    NetModel model = NetModel::ER;
    NodeId n = 0;
    std::int64_t m = 0;
    bool directed = false;
    std::uint64_t seed = 0;
    std::string split; // train | validation | test
    AttackKind attack = AttackKind::RA;
    RobustnessMetric metric = RobustnessMetric::Connectivity;
    std::string graph_path;
    std::string curve_path;
};

struct DatasetManifest {
    std::filesystem::path dir; // base for relative record paths
    std::vector<ManifestRecord> records;

    std::filesystem::path resolve(const std::string& rel) const { return dir / rel; }
};

inline void save_manifest(const DatasetManifest& man, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << "#robnet-manifest v1\n";
    for (const auto& r : man.records) {
        f << r.id << " " << to_string(r.model) << " " << r.n << " " << r.m << " "
          << (r.directed ? 1 : 0) << " " << r.seed << " " << r.split << " "
          << to_string(r.attack) << " " << to_string(r.metric) << " " << r.graph_path << " "
          << r.curve_path << "\n";
    }
}

inline DatasetManifest load_manifest(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open: " + path);
    std::string line;
    if (!std::getline(f, line) || line != "#robnet-manifest v1")
        throw std::runtime_error("manifest: bad header");
    DatasetManifest man;
    man.dir = std::filesystem::path(path).parent_path();
    std::map<int, bool> seen;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        ManifestRecord r;
        std::string model, directed, attack, metric;
        if (!(ls >> r.id >> model >> r.n >> r.m >> directed >> r.seed >> r.split >> attack >>
              metric >> r.graph_path >> r.curve_path))
            throw std::runtime_error("manifest: bad record line");
        r.model = model_from_string(model);
        r.directed = directed == "1";
        r.attack = attack_from_string(attack);
        r.metric = metric_from_string(metric);
        if (seen[r.id]) throw std::runtime_error("manifest: duplicate id");
        seen[r.id] = true;
        if (!std::filesystem::exists(man.resolve(r.graph_path)))
            throw std::runtime_error("manifest: missing graph file " + r.graph_path);
        if (!std::filesystem::exists(man.resolve(r.curve_path)))
            throw std::runtime_error("manifest: missing curve file " + r.curve_path);
        man.records.push_back(std::move(r));
    }
    for (const auto& r : man.records) {
        RobustnessCurve c = load_curve(man.resolve(r.curve_path).string(), r.metric);
        if (c.n != r.n) throw std::runtime_error("manifest: curve length mismatch for record");
    }
    return man;
}

// --- dataset construction --------------------------------------------------

// Desk-scale average-degree ranges; sparse motif chains get lower bands.
inline std::pair<double, double> default_degree_range(NetModel model) {
    switch (model) {
        case NetModel::SWNW:
        case NetModel::SWWS: return {2.5, 5.0};
        case NetModel::RH: return {2.0, 4.0};
        case NetModel::RT: return {1.5, 3.0};
        default: return {3.0, 6.0};
    }
}

struct DatasetSpec {
    std::vector<NetModel> models = {NetModel::ER, NetModel::BA, NetModel::SWNW, NetModel::QS};
    NodeId n_min = 80, n_max = 120;
    int train_count = 200;
    int validation_count = 0;
    int test_count = 40;
    bool directed = false;
    AttackKind attack = AttackKind::RA;
    RobustnessMetric metric = RobustnessMetric::Connectivity;
    std::uint64_t seed = 0;
    int workers = 1;
    // empty = default_degree_range per model
    std::map<NetModel, std::pair<double, double>> degree_ranges;
};

// Generates, attacks, and stores every record under out_dir. Deterministic
// per (spec.seed, record index); records are independent, so the worker pool
// fans them out and the keyed merge keeps the manifest order fixed.
inline DatasetManifest build_dataset(const DatasetSpec& spec, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    DatasetManifest man;
    man.dir = out_dir;
    Rng master(spec.seed);

    struct Job {
        NetModel model;
        std::string split;
        std::uint64_t stream;
        int id;
    };
    std::vector<Job> jobs;
    std::uint64_t stream = 0;
    int id = 0;
    for (NetModel model : spec.models) {
        for (int i = 0; i < spec.train_count; ++i) jobs.push_back({model, "train", stream++, id++});
        for (int i = 0; i < spec.validation_count; ++i)
            jobs.push_back({model, "validation", stream++, id++});
        for (int i = 0; i < spec.test_count; ++i) jobs.push_back({model, "test", stream++, id++});
    }

    man.records.resize(jobs.size());
    auto run_job = [&](const Job& job) {
        Rng rng = master.derive(job.stream);
        NodeId n = spec.n_min + static_cast<NodeId>(rng.below(
                                    static_cast<std::uint64_t>(spec.n_max - spec.n_min + 1)));
        auto range = spec.degree_ranges.count(job.model) ? spec.degree_ranges.at(job.model)
                                                         : default_degree_range(job.model);
        double k = rng.uniform(range.first, range.second);
        auto m = static_cast<std::size_t>(std::llround(k * n / 2.0));
        GenSpec gs;
        gs.model = job.model;
        gs.n = n;
        gs.directed = spec.directed;
        gs.seed = rng.next_u64();
        gs.m = std::clamp(m, min_edges(job.model, n, spec.directed),
                          max_edges(n, spec.directed));

        Graph g = generate(gs);
        AttackStrategy strategy{spec.attack, true, rng.next_u64()};
        RobustnessCurve curve = simulate_curve(g, spec.metric, strategy);

        ManifestRecord r;
        r.id = job.id;
        r.model = job.model;
        r.n = g.n();
        r.m = static_cast<std::int64_t>(g.edges().size());
        r.directed = g.directed();
        r.seed = gs.seed;
        r.split = job.split;
        r.attack = spec.attack;
        r.metric = spec.metric;
        r.graph_path = "g" + std::to_string(r.id) + ".txt";
        r.curve_path = "c" + std::to_string(r.id) + ".csv";
        save_graph(g, (man.dir / r.graph_path).string());
        save_curve(curve, (man.dir / r.curve_path).string());
        man.records[static_cast<std::size_t>(job.id)] = std::move(r);
    };

    int workers = std::max(1, spec.workers);
    if (workers == 1) {
        for (const auto& job : jobs) run_job(job);
    } else {
        std::vector<std::thread> pool;
        std::atomic<std::size_t> next{0};
        for (int t = 0; t < workers; ++t)
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < jobs.size(); i = next.fetch_add(1))
                    run_job(jobs[i]);
            });
        for (auto& t : pool) t.join();
    }
    return man;
}

// --- predictors and experiments --------------------------------------------

// A predictor maps a record to a robustness curve on the fixed output grid.
struct CurvePredictor {
    std::string name;
    std::function<std::vector<double>(const DatasetManifest&, const ManifestRecord&)> predict;
};

inline std::vector<double> record_truth_resampled(const DatasetManifest& man,
                                                  const ManifestRecord& r, int len) {
    RobustnessCurve c = load_curve(man.resolve(r.curve_path).string(), r.metric);
    return nn::resample_curve(c, len);
}

inline CurvePredictor make_simulation_predictor(int len) {
    return {"sim", [len](const DatasetManifest& man, const ManifestRecord& r) {
                return record_truth_resampled(man, r, len);
            }};
}

inline CurvePredictor make_constant_predictor(double value, int len) {
    return {"const", [value, len](const DatasetManifest&, const ManifestRecord&) {
                return std::vector<double>(static_cast<std::size_t>(len), value);
            }};
}

// Predicts the average resampled curve of the manifest's training split.
inline CurvePredictor make_mean_curve_predictor(const DatasetManifest& man, int len) {
    std::vector<double> mean_curve(static_cast<std::size_t>(len), 0.0);
    std::size_t count = 0;
    for (const auto& r : man.records) {
        if (r.split != "train") continue;
        std::vector<double> c = record_truth_resampled(man, r, len);
        for (std::size_t i = 0; i < c.size(); ++i) mean_curve[i] += c[i];
        ++count;
    }
    if (count == 0) throw std::invalid_argument("mean-curve predictor: no training records");
    for (auto& v : mean_curve) v /= static_cast<double>(count);
    return {"mean-curve", [mean_curve](const DatasetManifest&, const ManifestRecord&) {
                return mean_curve;
            }};
}

// How a graph is presented to a network: LFR square image, LFR 1D sequence,
// or raw adjacency image.
enum class InputEncoding { LfrImage, LfrSequence, Adjacency };

template <typename S>
nn::Tensor<S> encode_input(const Graph& g, InputEncoding enc, const LfrConfig& cfg,
                           int input_side) {
    switch (enc) {
        case InputEncoding::LfrImage:
            return nn::image_to_tensor<S>(reshape_square(encode(g, cfg)));
        case InputEncoding::LfrSequence:
            return nn::lfr_to_sequence_tensor<S>(encode(g, cfg));
        case InputEncoding::Adjacency:
            return nn::adjacency_image<S>(g, input_side);
    }
    throw std::invalid_argument("encode_input: bad encoding");
}

template <typename S>
CurvePredictor make_model_predictor(std::string name, nn::Model<S>& model, InputEncoding enc,
                                    LfrConfig cfg) {
    int side = model.config().in_h;
    return {std::move(name), [&model, enc, cfg, side](const DatasetManifest& man,
                                                      const ManifestRecord& r) {
                Graph g = load_graph(man.resolve(r.graph_path).string());
                std::vector<S> y = model.forward(encode_input<S>(g, enc, cfg, side));
                return std::vector<double>(y.begin(), y.end());
            }};
}

struct ExperimentRecord {
    NetModel model = NetModel::ER;
    std::string predictor;
    double mean_error = 0.0;            // xi-bar over test records
    std::vector<double> pointwise;      // mean |error| per grid point
    double seconds = 0.0;               // prediction wall clock
};

// Per-model x per-predictor mean errors over the manifest's test records for
// one attack/metric cell.
inline std::vector<ExperimentRecord> run_experiment(const DatasetManifest& man,
                                                    const std::vector<CurvePredictor>& predictors,
                                                    AttackKind attack, RobustnessMetric metric,
                                                    int len) {
    std::vector<ExperimentRecord> table;
    std::vector<NetModel> models;
    for (const auto& r : man.records) {
        if (r.split != "test" || r.attack != attack || r.metric != metric) continue;
        if (std::find(models.begin(), models.end(), r.model) == models.end())
            models.push_back(r.model);
    }
    for (NetModel model : models) {
        for (const auto& p : predictors) {
            ExperimentRecord cell;
            cell.model = model;
            cell.predictor = p.name;
            cell.pointwise.assign(static_cast<std::size_t>(len), 0.0);
            std::size_t count = 0;
            auto t0 = std::chrono::steady_clock::now();
            for (const auto& r : man.records) {
                if (r.split != "test" || r.attack != attack || r.metric != metric ||
                    r.model != model)
                    continue;
                std::vector<double> truth = record_truth_resampled(man, r, len);
                std::vector<double> pred = p.predict(man, r);
                PredictionError err = prediction_error(truth, pred);
                for (std::size_t i = 0; i < err.pointwise.size(); ++i)
                    cell.pointwise[i] += err.pointwise[i];
                cell.mean_error += err.mean;
                ++count;
            }
            auto t1 = std::chrono::steady_clock::now();
            if (count == 0) continue;
            cell.mean_error /= static_cast<double>(count);
            for (auto& v : cell.pointwise) v /= static_cast<double>(count);
            cell.seconds = std::chrono::duration<double>(t1 - t0).count();
            table.push_back(std::move(cell));
        }
    }
    return table;
}

inline void save_experiment_csv(const std::vector<ExperimentRecord>& table, std::ostream& os) {
    os << "model,predictor,mean_error,seconds\n";
    char buf[96];
    for (const auto& row : table) {
        std::snprintf(buf, sizeof buf, "%s,%s,%.17g,%.6f\n", to_string(row.model),
                      row.predictor.c_str(), row.mean_error, row.seconds);
        os << buf;
    }
}

// --- ranking table ----------------------------------------------------------

// A scalar method for ranking networks by robustness.
struct RankMethod {
    std::string name;
    RankDirection direction = RankDirection::HigherBetter;
    std::function<double(const DatasetManifest&, const ManifestRecord&)> score;
};

inline double curve_mean_scalar(const std::vector<double>& curve) {
    double s = 0.0;
    for (double v : curve) s += v;
    return curve.empty() ? 0.0 : s / static_cast<double>(curve.size());
}

inline RankMethod make_truth_rank_method(int len) {
    return {"sim", RankDirection::HigherBetter,
            [len](const DatasetManifest& man, const ManifestRecord& r) {
                return curve_mean_scalar(record_truth_resampled(man, r, len));
            }};
}

inline RankMethod make_predictor_rank_method(const CurvePredictor& p) {
    return {p.name, RankDirection::HigherBetter,
            [p](const DatasetManifest& man, const ManifestRecord& r) {
                return curve_mean_scalar(p.predict(man, r));
            }};
}

enum class SpectralMeasure { AC, EF, NC, SG, SR, ST };

inline const char* to_string(SpectralMeasure m) {
    switch (m) {
        case SpectralMeasure::AC: return "ac";
        case SpectralMeasure::EF: return "ef";
        case SpectralMeasure::NC: return "nc";
        case SpectralMeasure::SG: return "sg";
        case SpectralMeasure::SR: return "sr";
        case SpectralMeasure::ST: return "st";
    }
    return "?";
}

inline RankMethod make_spectral_rank_method(SpectralMeasure m) {
    RankDirection dir =
        m == SpectralMeasure::EF ? RankDirection::LowerBetter : RankDirection::HigherBetter;
    return {to_string(m), dir, [m](const DatasetManifest& man, const ManifestRecord& r) {
                Graph g = load_graph(man.resolve(r.graph_path).string());
                SpectralReport rep = spectral_measures(g);
                double nan = std::numeric_limits<double>::quiet_NaN();
                switch (m) {
                    case SpectralMeasure::AC: return rep.ac;
                    case SpectralMeasure::EF: return rep.ef_defined ? rep.ef : nan;
                    case SpectralMeasure::NC: return rep.nc;
                    case SpectralMeasure::SG: return rep.sg;
                    case SpectralMeasure::SR: return rep.sr;
                    case SpectralMeasure::ST: return rep.st_defined ? rep.st_log : nan;
                }
                return nan;
            }};
}

struct RankErrorCell {
    NetModel model = NetModel::ER;
    std::string method;
    double mean_rank_error = 0.0;
    bool has_undefined = false; // some scores were undefined and ranked last
};

// Mean |predicted rank - simulated rank| per (model, method) over undirected
// connectivity test records. Truth ranks come from the mean of the simulated
// curve.
inline std::vector<RankErrorCell> rank_error_table(const DatasetManifest& man,
                                                   const std::vector<RankMethod>& methods,
                                                   int len) {
    std::vector<RankErrorCell> table;
    std::vector<NetModel> models;
    for (const auto& r : man.records) {
        if (r.split != "test" || r.metric != RobustnessMetric::Connectivity || r.directed)
            continue;
        if (std::find(models.begin(), models.end(), r.model) == models.end())
            models.push_back(r.model);
    }
    RankMethod truth = make_truth_rank_method(len);
    for (NetModel model : models) {
        std::vector<const ManifestRecord*> group;
        for (const auto& r : man.records)
            if (r.split == "test" && r.metric == RobustnessMetric::Connectivity && !r.directed &&
                r.model == model)
                group.push_back(&r);
        if (group.size() < 2) continue;
        std::vector<double> truth_scores;
        for (const auto* r : group) truth_scores.push_back(truth.score(man, *r));
        std::vector<int> truth_rank = robustness_rank(truth_scores, truth.direction);
        for (const auto& method : methods) {
            RankErrorCell cell;
            cell.model = model;
            cell.method = method.name;
            std::vector<double> scores;
            for (const auto* r : group) scores.push_back(method.score(man, *r));
            for (double s : scores)
                if (std::isnan(s)) cell.has_undefined = true;
            std::vector<int> rank = robustness_rank(scores, method.direction);
            cell.mean_rank_error = mean_rank_error(rank, truth_rank);
            table.push_back(std::move(cell));
        }
    }
    return table;
}

inline void save_rank_table_csv(const std::vector<RankErrorCell>& table, std::ostream& os) {
    os << "model,method,mean_rank_error,has_undefined\n";
    char buf[96];
    for (const auto& row : table) {
        std::snprintf(buf, sizeof buf, "%s,%s,%.17g,%d\n", to_string(row.model),
                      row.method.c_str(), row.mean_rank_error, row.has_undefined ? 1 : 0);
        os << buf;
    }
}

// --- benchmarking ------------------------------------------------------------

struct BenchRow {
    std::string stage;
    double median_seconds = 0.0;
    int runs = 0;
};

template <typename F>
BenchRow bench_stage(const std::string& stage, int runs, F&& body) {
    std::vector<double> times;
    times.reserve(static_cast<std::size_t>(runs));
    for (int i = 0; i < runs; ++i) {
        auto t0 = std::chrono::steady_clock::now();
        body(i);
        auto t1 = std::chrono::steady_clock::now();
        times.push_back(std::chrono::duration<double>(t1 - t0).count());
    }
    return {stage, median(times), runs};
}

inline void save_bench_csv(const std::vector<BenchRow>& rows, std::ostream& os) {
    os << "stage,median_seconds,runs\n";
    char buf[96];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%s,%.9f,%d\n", r.stage.c_str(), r.median_seconds, r.runs);
        os << buf;
    }
}

// --- plot data ---------------------------------------------------------------

// One CSV per (attack, metric): delta, mean simulated curve, then per
// predictor the mean prediction and mean |error|, averaged over test records.
inline void emit_plot_data(const DatasetManifest& man,
                           const std::vector<CurvePredictor>& predictors, AttackKind attack,
                           RobustnessMetric metric, int len, std::ostream& os) {
    std::vector<double> sim(static_cast<std::size_t>(len), 0.0);
    std::vector<std::vector<double>> pred(predictors.size(),
                                          std::vector<double>(static_cast<std::size_t>(len), 0.0));
    std::vector<std::vector<double>> err = pred;
    std::size_t count = 0;
    for (const auto& r : man.records) {
        if (r.split != "test" || r.attack != attack || r.metric != metric) continue;
        std::vector<double> truth = record_truth_resampled(man, r, len);
        for (std::size_t i = 0; i < truth.size(); ++i) sim[i] += truth[i];
        for (std::size_t pi = 0; pi < predictors.size(); ++pi) {
            std::vector<double> p = predictors[pi].predict(man, r);
            for (std::size_t i = 0; i < p.size(); ++i) {
                pred[pi][i] += p[i];
                err[pi][i] += std::abs(p[i] - truth[i]);
            }
        }
        ++count;
    }
    if (count == 0) throw std::invalid_argument("emit_plot_data: no matching test records");
    os << "delta,sim";
    for (const auto& p : predictors) os << "," << p.name << "_pred," << p.name << "_err";
    os << "\n";
    char buf[64];
    for (int i = 0; i < len; ++i) {
        double delta = static_cast<double>(i) / (len - 1);
        std::snprintf(buf, sizeof buf, "%.17g", delta);
        os << buf;
        auto ui = static_cast<std::size_t>(i);
        std::snprintf(buf, sizeof buf, ",%.17g", sim[ui] / static_cast<double>(count));
        os << buf;
        for (std::size_t pi = 0; pi < predictors.size(); ++pi) {
            std::snprintf(buf, sizeof buf, ",%.17g", pred[pi][ui] / static_cast<double>(count));
            os << buf;
            std::snprintf(buf, sizeof buf, ",%.17g", err[pi][ui] / static_cast<double>(count));
            os << buf;
        }
        os << "\n";
    }
}

// --- training data assembly --------------------------------------------------

template <typename S>
std::vector<nn::Sample<S>> dataset_samples(const DatasetManifest& man, const std::string& split,
                                           InputEncoding enc, const LfrConfig& cfg,
                                           int input_side, int len) {
    std::vector<nn::Sample<S>> samples;
    for (const auto& r : man.records) {
        if (r.split != split) continue;
        Graph g = load_graph(man.resolve(r.graph_path).string());
        nn::Sample<S> s;
        s.input = encode_input<S>(g, enc, cfg, input_side);
        std::vector<double> target = record_truth_resampled(man, r, len);
        s.target.assign(target.begin(), target.end());
        samples.push_back(std::move(s));
    }
    return samples;
}

} // namespace robnet

#endif // ROBNET_HARNESS_HPP

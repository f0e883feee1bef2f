// Command-line front end: dataset construction, attack simulation, receptive
// field encoding, CNN training/prediction, spectral measures, ranking tables,
// benchmarks, and plot-data emission.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "robnet/harness.hpp"

namespace fs = std::filesystem;
using namespace robnet;

namespace {

struct GlobalOpts {
    std::uint64_t seed = 0;
    int workers = 1;
    std::string out_dir = ".";
};

struct LfrOpts {
    int w = 100;
    int g = 8;
    std::string labeling = "deg";
    std::string attrs = "deg,cc";
    bool undirected_betweenness = false;
};

void add_lfr_flags(CLI::App* cmd, LfrOpts& o) {
    cmd->add_option("--lfr-w", o.w, "receptive field count W");
    cmd->add_option("--lfr-g", o.g, "receptive field size g");
    cmd->add_option("--labeling", o.labeling, "node ranking score: deg|bet");
    cmd->add_option("--attrs", o.attrs, "comma-separated attributes: deg,cc,bet");
    cmd->add_flag("--undirected-betweenness", o.undirected_betweenness,
                  "symmetrize directed graphs before betweenness");
}

LfrConfig to_config(const LfrOpts& o) {
    LfrConfig cfg;
    cfg.w = o.w;
    cfg.g = o.g;
    cfg.labeling = o.labeling == "bet" ? Labeling::Betweenness : Labeling::Degree;
    cfg.attributes.clear();
    std::stringstream ss(o.attrs);
    std::string tok;
    while (std::getline(ss, tok, ','))
        if (!tok.empty()) cfg.attributes.push_back(attribute_from_string(tok));
    if (cfg.attributes.empty()) throw CLI::ValidationError("--attrs", "needs >= 1 attribute");
    cfg.undirected_betweenness = o.undirected_betweenness;
    return cfg;
}

InputEncoding encoding_from_string(const std::string& s) {
    if (s == "lfr-image") return InputEncoding::LfrImage;
    if (s == "lfr-sequence") return InputEncoding::LfrSequence;
    if (s == "adjacency") return InputEncoding::Adjacency;
    throw CLI::ValidationError("--encoding", "expected lfr-image|lfr-sequence|adjacency");
}

std::ofstream open_out(const GlobalOpts& g, const std::string& name) {
    fs::create_directories(g.out_dir);
    fs::path p = fs::path(g.out_dir) / name;
    std::ofstream f(p, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + p.string());
    std::cout << p.string() << "\n";
    return f;
}

nn::ModelConfig preset_config(nn::Preset preset, const LfrConfig& cfg, int input_side,
                              int output_len, std::uint64_t seed) {
    switch (preset) {
        case nn::Preset::LfrCnn:
            return nn::preset_lfr_cnn(input_side > 0 ? input_side
                                                     : square_side(cfg.w, cfg.g, cfg.h()),
                                      output_len, seed);
        case nn::Preset::Pcr:
            return nn::preset_pcr(input_side > 0 ? input_side : 128, output_len, 7, seed);
        case nn::Preset::Patchy1d:
            return nn::preset_patchy1d(cfg.w, cfg.g, cfg.h(), output_len, seed);
    }
    throw std::runtime_error("bad preset");
}

InputEncoding default_encoding(nn::Preset preset) {
    switch (preset) {
        case nn::Preset::LfrCnn: return InputEncoding::LfrImage;
        case nn::Preset::Pcr: return InputEncoding::Adjacency;
        case nn::Preset::Patchy1d: return InputEncoding::LfrSequence;
    }
    return InputEncoding::LfrImage;
}

// "name:encoding:checkpoint" triples on the command line.
struct PredictorSpec {
    std::string name;
    InputEncoding encoding;
    std::string checkpoint;
};

PredictorSpec parse_predictor(const std::string& s) {
    auto c1 = s.find(':');
    auto c2 = s.find(':', c1 == std::string::npos ? c1 : c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
        throw CLI::ValidationError("--predictor", "expected name:encoding:checkpoint");
    return {s.substr(0, c1), encoding_from_string(s.substr(c1 + 1, c2 - c1 - 1)),
            s.substr(c2 + 1)};
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"complex-network robustness toolkit"};
    app.require_subcommand(1);
    GlobalOpts g;
    app.add_option("--seed", g.seed, "master seed")->capture_default_str();
    app.add_option("--workers", g.workers, "worker pool size")->capture_default_str();
    app.add_option("--out-dir", g.out_dir, "output directory")->capture_default_str();

    // gen
    auto* gen_cmd = app.add_subcommand("gen", "generate a synthetic network");
    std::string gen_model = "ER", gen_out = "graph.txt";
    GenSpec gs;
    gen_cmd->add_option("--model", gen_model, "ER|BA|SF|OS|SW-NW|SW-WS|QS|RH|RT")->required();
    gen_cmd->add_option("-n,--nodes", gs.n, "node count")->required();
    gen_cmd->add_option("-m,--edges", gs.m, "edge count")->required();
    gen_cmd->add_flag("--directed", gs.directed, "directed output");
    gen_cmd->add_option("--sigma", gs.sigma, "SF/OS weight exponent");
    gen_cmd->add_option("--theta", gs.theta, "SF/OS weight offset");
    gen_cmd->add_option("-k", gs.k, "SW nearest-neighbor radius");
    gen_cmd->add_option("-q", gs.q, "QS snapback probability (<0 derives from m)");
    gen_cmd->add_option("--beta", gs.beta, "SW-WS rewiring probability");
    gen_cmd->add_option("-o,--output", gen_out, "output graph file");

    // simulate
    auto* sim_cmd = app.add_subcommand("simulate", "attack a network, output its curve");
    std::string sim_graph, sim_metric = "conn", sim_attack = "ra", sim_out = "curve.csv";
    bool static_rank = false;
    sim_cmd->add_option("--graph", sim_graph, "graph file")->required();
    sim_cmd->add_option("--metric", sim_metric, "conn|ctrl");
    sim_cmd->add_option("--attack", sim_attack, "ra|td|tb");
    sim_cmd->add_flag("--static-rank", static_rank, "rank targets once instead of per removal");
    sim_cmd->add_option("-o,--output", sim_out, "output curve CSV");

    // lfr
    auto* lfr_cmd = app.add_subcommand("lfr", "encode a graph into receptive fields");
    std::string lfr_graph, lfr_out = "tensor.bin";
    LfrOpts lfr_opts;
    lfr_cmd->add_option("--graph", lfr_graph, "graph file")->required();
    add_lfr_flags(lfr_cmd, lfr_opts);
    lfr_cmd->add_option("-o,--output", lfr_out, "output tensor file");

    // dataset
    auto* ds_cmd = app.add_subcommand("dataset", "build a seeded dataset manifest");
    DatasetSpec ds;
    std::string ds_models = "ER,BA,SW-NW,QS", ds_attack = "ra", ds_metric = "conn";
    ds_cmd->add_option("--models", ds_models, "comma-separated model list");
    ds_cmd->add_option("--n-min", ds.n_min, "minimum node count");
    ds_cmd->add_option("--n-max", ds.n_max, "maximum node count");
    ds_cmd->add_option("--train", ds.train_count, "training records per model");
    ds_cmd->add_option("--validation", ds.validation_count, "validation records per model");
    ds_cmd->add_option("--test", ds.test_count, "test records per model");
    ds_cmd->add_flag("--directed", ds.directed, "directed networks");
    ds_cmd->add_option("--attack", ds_attack, "ra|td|tb");
    ds_cmd->add_option("--metric", ds_metric, "conn|ctrl");

    // train
    auto* train_cmd = app.add_subcommand("train", "train a CNN on a dataset");
    std::string tr_manifest, tr_preset = "lfr-cnn", tr_loss = "squared",
                tr_out = "model.ckpt";
    LfrOpts tr_lfr;
    nn::TrainOptions tr_opts;
    int tr_input_side = 0, tr_output_len = 100;
    double tr_lr = 1e-3;
    train_cmd->add_option("--manifest", tr_manifest, "dataset manifest")->required();
    train_cmd->add_option("--preset", tr_preset, "lfr-cnn|pcr|patchy1d");
    train_cmd->add_option("--epochs", tr_opts.epochs, "training epochs");
    train_cmd->add_option("--batch", tr_opts.batch_size, "minibatch size");
    train_cmd->add_option("--patience", tr_opts.patience, "early-stop patience");
    train_cmd->add_option("--lr", tr_lr, "learning rate");
    train_cmd->add_option("--loss", tr_loss, "squared|absolute");
    train_cmd->add_option("--input-side", tr_input_side, "image side (0 = derived)");
    train_cmd->add_option("--output-len", tr_output_len, "output grid length");
    add_lfr_flags(train_cmd, tr_lfr);
    train_cmd->add_option("-o,--output", tr_out, "checkpoint file");

    // predict
    auto* pred_cmd = app.add_subcommand("predict", "predict a robustness curve");
    std::string pr_ckpt, pr_graph, pr_encoding = "lfr-image", pr_metric = "conn",
                pr_out = "pred.csv";
    LfrOpts pr_lfr;
    pred_cmd->add_option("--checkpoint", pr_ckpt, "trained checkpoint")->required();
    pred_cmd->add_option("--graph", pr_graph, "graph file")->required();
    pred_cmd->add_option("--encoding", pr_encoding, "lfr-image|lfr-sequence|adjacency");
    pred_cmd->add_option("--metric", pr_metric, "conn|ctrl label for the output");
    add_lfr_flags(pred_cmd, pr_lfr);
    pred_cmd->add_option("-o,--output", pr_out, "output curve CSV");

    // evaluate
    auto* eval_cmd = app.add_subcommand("evaluate", "per-model mean errors on the test split");
    std::string ev_manifest, ev_attack = "ra", ev_metric = "conn";
    std::vector<std::string> ev_predictors;
    LfrOpts ev_lfr;
    int ev_len = 100;
    eval_cmd->add_option("--manifest", ev_manifest, "dataset manifest")->required();
    eval_cmd->add_option("--attack", ev_attack, "ra|td|tb");
    eval_cmd->add_option("--metric", ev_metric, "conn|ctrl");
    eval_cmd->add_option("--predictor", ev_predictors,
                         "name:encoding:checkpoint (repeatable)");
    eval_cmd->add_option("--output-len", ev_len, "comparison grid length");
    add_lfr_flags(eval_cmd, ev_lfr);

    // spectral
    auto* spec_cmd = app.add_subcommand("spectral", "six spectral robustness measures");
    std::string sp_graph;
    spec_cmd->add_option("--graph", sp_graph, "undirected graph file")->required();

    // rank-table
    auto* rank_cmd = app.add_subcommand("rank-table", "mean rank errors per model and method");
    std::string rk_manifest;
    std::vector<std::string> rk_predictors;
    LfrOpts rk_lfr;
    int rk_len = 100;
    rank_cmd->add_option("--manifest", rk_manifest, "dataset manifest")->required();
    rank_cmd->add_option("--predictor", rk_predictors,
                         "name:encoding:checkpoint (repeatable)");
    rank_cmd->add_option("--output-len", rk_len, "scalarization grid length");
    add_lfr_flags(rank_cmd, rk_lfr);

    // bench
    auto* bench_cmd = app.add_subcommand("bench", "median per-stage wall-clock table");
    NodeId bn_n = 200;
    int bn_runs = 20;
    LfrOpts bn_lfr;
    bench_cmd->add_option("-n,--nodes", bn_n, "benchmark network size");
    bench_cmd->add_option("--runs", bn_runs, "runs per stage (median reported)");
    add_lfr_flags(bench_cmd, bn_lfr);

    // plots
    auto* plots_cmd = app.add_subcommand("plots", "mean curve CSV bundle per attack x metric");
    std::string pl_manifest;
    std::vector<std::string> pl_predictors;
    LfrOpts pl_lfr;
    int pl_len = 100;
    plots_cmd->add_option("--manifest", pl_manifest, "dataset manifest")->required();
    plots_cmd->add_option("--predictor", pl_predictors,
                          "name:encoding:checkpoint (repeatable)");
    plots_cmd->add_option("--output-len", pl_len, "grid length");
    add_lfr_flags(plots_cmd, pl_lfr);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen_cmd) {
            gs.model = model_from_string(gen_model);
            gs.seed = g.seed;
            Graph graph = generate(gs);
            auto f = open_out(g, gen_out);
            save_graph(graph, f);
        } else if (*sim_cmd) {
            Graph graph = load_graph(sim_graph);
            AttackStrategy strategy{attack_from_string(sim_attack), !static_rank, g.seed};
            RobustnessCurve curve =
                simulate_curve(graph, metric_from_string(sim_metric), strategy);
            auto f = open_out(g, sim_out);
            save_curve(curve, f);
        } else if (*lfr_cmd) {
            Graph graph = load_graph(lfr_graph);
            ReceptiveFieldTensor t = encode(graph, to_config(lfr_opts));
            fs::create_directories(g.out_dir);
            save_tensor(t, (fs::path(g.out_dir) / lfr_out).string());
            std::cout << (fs::path(g.out_dir) / lfr_out).string() << "\n";
        } else if (*ds_cmd) {
            std::stringstream ss(ds_models);
            std::string tok;
            ds.models.clear();
            while (std::getline(ss, tok, ','))
                if (!tok.empty()) ds.models.push_back(model_from_string(tok));
            ds.attack = attack_from_string(ds_attack);
            ds.metric = metric_from_string(ds_metric);
            ds.seed = g.seed;
            ds.workers = g.workers;
            DatasetManifest man = build_dataset(ds, g.out_dir);
            save_manifest(man, (fs::path(g.out_dir) / "manifest.txt").string());
            std::cout << (fs::path(g.out_dir) / "manifest.txt").string() << " ("
                      << man.records.size() << " records)\n";
        } else if (*train_cmd) {
            DatasetManifest man = load_manifest(tr_manifest);
            LfrConfig cfg = to_config(tr_lfr);
            nn::Preset preset = nn::preset_from_string(tr_preset);
            nn::ModelConfig mc = preset_config(preset, cfg, tr_input_side, tr_output_len, g.seed);
            mc.loss = tr_loss == "absolute" ? nn::LossKind::Absolute : nn::LossKind::Squared;
            mc.adam.lr = tr_lr;
            nn::ModelF model(mc);
            InputEncoding enc = default_encoding(preset);
            auto train_set =
                dataset_samples<float>(man, "train", enc, cfg, mc.in_h, tr_output_len);
            auto val_set =
                dataset_samples<float>(man, "validation", enc, cfg, mc.in_h, tr_output_len);
            tr_opts.shuffle_seed = g.seed + 1;
            std::vector<nn::EpochLog> log = nn::train(model, train_set, val_set, tr_opts);
            for (std::size_t e = 0; e < log.size(); ++e)
                std::printf("epoch %zu train %.6f val %.6f\n", e + 1, log[e].train_loss,
                            log[e].val_loss);
            fs::create_directories(g.out_dir);
            nn::save_checkpoint(model, (fs::path(g.out_dir) / tr_out).string());
            std::cout << (fs::path(g.out_dir) / tr_out).string() << "\n";
        } else if (*pred_cmd) {
            nn::ModelF model = nn::load_checkpoint<float>(pr_ckpt);
            Graph graph = load_graph(pr_graph);
            nn::Tensor<float> input = encode_input<float>(
                graph, encoding_from_string(pr_encoding), to_config(pr_lfr),
                model.config().in_h);
            RobustnessCurve curve =
                nn::predict_curve(model, input, metric_from_string(pr_metric));
            auto f = open_out(g, pr_out);
            save_curve(curve, f);
        } else if (*eval_cmd) {
            DatasetManifest man = load_manifest(ev_manifest);
            LfrConfig cfg = to_config(ev_lfr);
            std::vector<nn::ModelF> models;
            std::vector<PredictorSpec> specs;
            for (const auto& s : ev_predictors) specs.push_back(parse_predictor(s));
            models.reserve(specs.size());
            std::vector<CurvePredictor> preds{make_mean_curve_predictor(man, ev_len)};
            for (const auto& s : specs) {
                models.push_back(nn::load_checkpoint<float>(s.checkpoint));
                preds.push_back(
                    make_model_predictor(s.name, models.back(), s.encoding, cfg));
            }
            auto table = run_experiment(man, preds, attack_from_string(ev_attack),
                                        metric_from_string(ev_metric), ev_len);
            auto f = open_out(g, "evaluate.csv");
            save_experiment_csv(table, f);
        } else if (*spec_cmd) {
            Graph graph = load_graph(sp_graph);
            SpectralReport r = spectral_measures(graph);
            std::printf("measure,value,defined\n");
            std::printf("ac,%.17g,1\n", r.ac);
            std::printf("ef,%.17g,%d\n", r.ef, r.ef_defined ? 1 : 0);
            std::printf("nc,%.17g,1\n", r.nc);
            std::printf("sg,%.17g,1\n", r.sg);
            std::printf("sr,%.17g,1\n", r.sr);
            std::printf("st_log,%.17g,%d\n", r.st_log, r.st_defined ? 1 : 0);
        } else if (*rank_cmd) {
            DatasetManifest man = load_manifest(rk_manifest);
            LfrConfig cfg = to_config(rk_lfr);
            std::vector<nn::ModelF> models;
            std::vector<PredictorSpec> specs;
            for (const auto& s : rk_predictors) specs.push_back(parse_predictor(s));
            models.reserve(specs.size());
            std::vector<RankMethod> methods;
            for (const auto& s : specs) {
                models.push_back(nn::load_checkpoint<float>(s.checkpoint));
                methods.push_back(make_predictor_rank_method(
                    make_model_predictor(s.name, models.back(), s.encoding, cfg)));
            }
            for (auto m : {SpectralMeasure::AC, SpectralMeasure::EF, SpectralMeasure::NC,
                           SpectralMeasure::SG, SpectralMeasure::SR, SpectralMeasure::ST})
                methods.push_back(make_spectral_rank_method(m));
            auto table = rank_error_table(man, methods, rk_len);
            auto f = open_out(g, "rank_table.csv");
            save_rank_table_csv(table, f);
        } else if (*bench_cmd) {
            LfrConfig cfg = to_config(bn_lfr);
            GenSpec spec;
            spec.model = NetModel::ER;
            spec.n = bn_n;
            spec.m = static_cast<std::size_t>(bn_n) * 2;
            spec.directed = false;
            spec.seed = g.seed;
            Graph graph = generate(spec);
            int side = square_side(cfg.w, cfg.g, cfg.h());
            nn::ModelF cnn(nn::preset_lfr_cnn(side, 100, g.seed));
            nn::ModelF pcr(nn::preset_pcr(128, 100, 7, g.seed));
            nn::Tensor<float> lfr_input =
                nn::image_to_tensor<float>(reshape_square(encode(graph, cfg)));
            nn::Tensor<float> adj_input = nn::adjacency_image<float>(graph, 128);
            std::vector<BenchRow> rows;
            rows.push_back(bench_stage("sim-conn", bn_runs, [&](int i) {
                connectivity_curve(graph, {AttackKind::RA, true, g.seed + static_cast<std::uint64_t>(i)});
            }));
            rows.push_back(bench_stage("sim-ctrl", bn_runs, [&](int i) {
                controllability_curve(graph, {AttackKind::RA, true, g.seed + static_cast<std::uint64_t>(i)});
            }));
            rows.push_back(bench_stage("lfr-encode", bn_runs, [&](int) { encode(graph, cfg); }));
            rows.push_back(
                bench_stage("cnn-inference", bn_runs, [&](int) { cnn.forward(lfr_input); }));
            rows.push_back(
                bench_stage("pcr-inference", bn_runs, [&](int) { pcr.forward(adj_input); }));
            auto f = open_out(g, "bench.csv");
            save_bench_csv(rows, f);
        } else if (*plots_cmd) {
            DatasetManifest man = load_manifest(pl_manifest);
            LfrConfig cfg = to_config(pl_lfr);
            std::vector<nn::ModelF> models;
            std::vector<PredictorSpec> specs;
            for (const auto& s : pl_predictors) specs.push_back(parse_predictor(s));
            models.reserve(specs.size());
            std::vector<CurvePredictor> preds;
            for (const auto& s : specs) {
                models.push_back(nn::load_checkpoint<float>(s.checkpoint));
                preds.push_back(
                    make_model_predictor(s.name, models.back(), s.encoding, cfg));
            }
            std::vector<std::pair<AttackKind, RobustnessMetric>> cells;
            for (const auto& r : man.records) {
                if (r.split != "test") continue;
                auto cell = std::make_pair(r.attack, r.metric);
                if (std::find(cells.begin(), cells.end(), cell) == cells.end())
                    cells.push_back(cell);
            }
            for (auto [attack, metric] : cells) {
                std::string name = std::string("plot_") + to_string(attack) + "_" +
                                   to_string(metric) + ".csv";
                auto f = open_out(g, name);
                emit_plot_data(man, preds, attack, metric, pl_len, f);
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

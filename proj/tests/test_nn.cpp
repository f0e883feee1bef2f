#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "robnet/nn.hpp"

using namespace robnet;
using namespace robnet::nn;

namespace {

template <typename S>
Tensor<S> random_tensor(int c, int h, int w, Rng& rng) {
    Tensor<S> t(c, h, w);
    for (auto& x : t.v) x = static_cast<S>(rng.uniform(-1.0, 1.0));
    return t;
}

std::vector<double*> param_pointers(Model<double>& m) {
    std::vector<double*> out;
    m.for_each_param([&](std::span<double> p, std::span<double>) {
        for (auto& x : p) out.push_back(&x);
    });
    return out;
}

std::vector<double> param_gradients(Model<double>& m) {
    std::vector<double> out;
    m.for_each_param([&](std::span<double>, std::span<double> g) {
        out.insert(out.end(), g.begin(), g.end());
    });
    return out;
}

// max relative error between analytic and central finite-difference gradients
double gradient_check(ModelConfig config, std::uint64_t seed) {
    Model<double> m(config);
    Rng rng(seed);
    Tensor<double> x = random_tensor<double>(config.in_c, config.in_h, config.in_w, rng);
    std::vector<double> target(static_cast<std::size_t>(config.output_len));
    for (auto& t : target) t = rng.uniform();

    m.zero_grads();
    std::vector<double> pred = m.forward_raw(x);
    m.backward(loss_gradient(pred, target, config.loss));
    std::vector<double> analytic = param_gradients(m);
    std::vector<double*> params = param_pointers(m);

    Rng pick(seed + 1);
    double worst = 0.0;
    const double eps = 1e-3;
    for (int trial = 0; trial < 25; ++trial) {
        std::size_t i = pick.below(params.size());
        double saved = *params[i];
        *params[i] = saved + eps;
        double up = loss_value(m.forward_raw(x), target, config.loss);
        *params[i] = saved - eps;
        double down = loss_value(m.forward_raw(x), target, config.loss);
        *params[i] = saved;
        double numeric = (up - down) / (2.0 * eps);
        double denom = std::max({std::abs(numeric), std::abs(analytic[i]), 1e-6});
        worst = std::max(worst, std::abs(numeric - analytic[i]) / denom);
    }
    return worst;
}

} // namespace

TEST_CASE("loss values and gradients") {
    std::vector<double> p{0.2, 0.5, 0.9}, t{0.2, 0.5, 0.9};
    CHECK(loss_value(p, t, LossKind::Squared) == 0.0);
    for (auto& x : p) x += 0.1;
    CHECK(loss_value(p, t, LossKind::Squared) == Catch::Approx(0.01));
    CHECK(loss_value(p, t, LossKind::Absolute) == Catch::Approx(0.1));
    CHECK_THROWS_AS(loss_value(p, std::vector<double>{1.0}, LossKind::Squared),
                    std::invalid_argument);

    // independent re-summation
    Rng rng(5);
    std::vector<double> a(64), b(64);
    for (std::size_t i = 0; i < 64; ++i) {
        a[i] = rng.uniform();
        b[i] = rng.uniform();
    }
    double sum = 0;
    for (std::size_t i = 0; i < 64; ++i) sum += (a[i] - b[i]) * (a[i] - b[i]);
    CHECK(loss_value(a, b, LossKind::Squared) == Catch::Approx(sum / 64.0).margin(1e-12));
}

TEST_CASE("dense layer gradients match finite differences") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng shape(seed);
        int in = 2 + static_cast<int>(shape.below(10));
        int out = 2 + static_cast<int>(shape.below(6));
        ModelConfig c;
        c.in_c = in;
        c.in_h = c.in_w = 1;
        c.output_len = out;
        c.seed = seed + 100;
        c.layers = {LayerSpec::dense(out)};
        CHECK(gradient_check(c, seed) < 1e-4);
    }
}

TEST_CASE("conv2d gradients match finite differences") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng shape(seed);
        int side = 4 + static_cast<int>(shape.below(5));
        int k = 1 + static_cast<int>(shape.below(3));
        int in_c = 1 + static_cast<int>(shape.below(3));
        int out_c = 1 + static_cast<int>(shape.below(4));
        int stride = 1 + static_cast<int>(shape.below(2));
        ModelConfig c;
        c.in_c = in_c;
        c.in_h = c.in_w = side;
        c.output_len = 3;
        c.seed = seed + 200;
        LayerSpec conv = LayerSpec::conv2d(out_c, k, stride, k / 2);
        c.layers = {conv, LayerSpec::flatten(), LayerSpec::dense(3)};
        CHECK(gradient_check(c, seed) < 1e-4);
    }
}

TEST_CASE("conv1d gradients match finite differences") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng shape(seed);
        int len = 12 + static_cast<int>(shape.below(20));
        int k = 2 + static_cast<int>(shape.below(4));
        ModelConfig c;
        c.in_c = 1 + static_cast<int>(shape.below(3));
        c.in_h = 1;
        c.in_w = len;
        c.output_len = 2;
        c.seed = seed + 300;
        c.layers = {LayerSpec::conv1d(3, k, 1, k / 2), LayerSpec::flatten(),
                    LayerSpec::dense(2)};
        CHECK(gradient_check(c, seed) < 1e-4);
    }
}

TEST_CASE("relu and maxpool gradients match finite differences") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng shape(seed);
        int side = 5 + static_cast<int>(shape.below(6));
        ModelConfig c;
        c.in_c = 1;
        c.in_h = c.in_w = side;
        c.output_len = 3;
        c.seed = seed + 400;
        c.layers = {LayerSpec::conv2d(2, 3, 1, 1), LayerSpec::relu(),
                    LayerSpec::maxpool(2, 2, 2, 2), LayerSpec::flatten(), LayerSpec::dense(3)};
        CHECK(gradient_check(c, seed) < 1e-4);
    }
}

TEST_CASE("maxpool uses ceil sides with zero padding") {
    // 5x5 input pools to 3x3; the padded corner window is all out-of-bounds
    // except one negative cell, so the implicit zero wins
    LayerSpec spec = LayerSpec::maxpool(2, 2, 2, 2);
    MaxPoolLayer<double> pool(spec, 1, 5, 5);
    CHECK(pool.out_h() == 3);
    CHECK(pool.out_w() == 3);
    Tensor<double> x(1, 5, 5);
    for (auto& v : x.v) v = -1.0;
    x.at(0, 0, 0) = 7.0;
    Tensor<double> y = pool.forward(x);
    CHECK(y.at(0, 0, 0) == 7.0);
    CHECK(y.at(0, 2, 2) == 0.0); // padding beats the -1 cells
    CHECK(y.at(0, 1, 1) == -1.0); // interior window: no padding involved
    // gradient flows only to the argmax cells, none into padding
    Tensor<double> dy(1, 3, 3);
    for (auto& v : dy.v) v = 1.0;
    Tensor<double> dx = pool.backward(dy);
    CHECK(dx.at(0, 0, 0) == 1.0);
    double total = 0;
    for (double v : dx.v) total += v;
    CHECK(total == 4.0); // only the 4 fully in-bounds windows route gradient
}

TEST_CASE("pooled feature map sides follow the ceil halving rule") {
    for (int side : {64, 100, 142}) {
        int s = side;
        std::vector<int> expected;
        for (int i = 0; i < 3; ++i) {
            s = (s + 1) / 2;
            expected.push_back(s);
        }
        LayerSpec spec = LayerSpec::maxpool(2, 2, 2, 2);
        int cur = side;
        for (int i = 0; i < 3; ++i) {
            MaxPoolLayer<double> pool(spec, 1, cur, cur);
            CHECK(pool.out_h() == expected[static_cast<std::size_t>(i)]);
            cur = pool.out_h();
        }
    }
    // side 100 walks 50, 25, 13
    CHECK((100 + 1) / 2 == 50);
    CHECK((50 + 1) / 2 == 25);
    CHECK((25 + 1) / 2 == 13);
}

TEST_CASE("identity convolution forwards the input") {
    ModelConfig c;
    c.in_c = 1;
    c.in_h = c.in_w = 2;
    c.output_len = 4;
    c.seed = 0;
    c.layers = {LayerSpec::conv2d(1, 1, 1, 0), LayerSpec::flatten(), LayerSpec::dense(4)};
    Model<double> m(c);
    // force conv to identity and dense to identity
    m.for_each_param([&](std::span<double> p, std::span<double>) {
        std::fill(p.begin(), p.end(), 0.0);
    });
    bool conv_weight_set = false;
    m.for_each_param([&](std::span<double> p, std::span<double>) {
        if (!conv_weight_set && p.size() == 1) {
            p[0] = 1.0;
            conv_weight_set = true;
        }
        if (p.size() == 16) // dense 4x4 identity
            for (int i = 0; i < 4; ++i) p[static_cast<std::size_t>(i) * 4 + i] = 1.0;
    });
    Tensor<double> x(1, 2, 2);
    x.v = {0.1, 0.2, 0.3, 0.4};
    std::vector<double> y = m.forward_raw(x);
    CHECK(y == std::vector<double>{0.1, 0.2, 0.3, 0.4});
}

TEST_CASE("preset parameter counts sit in the published bands") {
    Model<float> lfr(preset_lfr_cnn(100, 100, 1));
    CHECK(lfr.parameter_count() == 5743268u);
    CHECK(lfr.parameter_count() >= 4.5e6);
    CHECK(lfr.parameter_count() <= 7.5e6);

    Model<float> patchy(preset_patchy1d(500, 10, 2, 100, 1));
    CHECK(patchy.parameter_count() == 506996u);
    CHECK(patchy.parameter_count() >= 3.8e5);
    CHECK(patchy.parameter_count() <= 6.4e5);

    Model<float> pcr(preset_pcr(1000, 100, 7, 1));
    CHECK(pcr.parameter_count() == 23360676u);
    CHECK(pcr.parameter_count() >= 1.8e7);
    CHECK(pcr.parameter_count() <= 3.0e7);
}

TEST_CASE("builds are deterministic per seed") {
    Model<float> a(preset_patchy1d(50, 6, 2, 20, 9));
    Model<float> b(preset_patchy1d(50, 6, 2, 20, 9));
    Model<float> c(preset_patchy1d(50, 6, 2, 20, 10));
    std::vector<float> wa, wb, wc;
    a.for_each_param([&](std::span<float> p, std::span<float>) { wa.insert(wa.end(), p.begin(), p.end()); });
    b.for_each_param([&](std::span<float> p, std::span<float>) { wb.insert(wb.end(), p.begin(), p.end()); });
    c.for_each_param([&](std::span<float> p, std::span<float>) { wc.insert(wc.end(), p.begin(), p.end()); });
    CHECK(wa == wb);
    CHECK(wa != wc);
}

TEST_CASE("model rejects invalid configurations") {
    ModelConfig c;
    c.in_c = 1;
    c.in_h = c.in_w = 8;
    c.output_len = 10;
    c.layers = {LayerSpec::flatten(), LayerSpec::dense(7)}; // 7 != 10
    CHECK_THROWS_AS(Model<float>(c), std::invalid_argument);
    ModelConfig big;
    big.in_c = 1;
    big.in_h = big.in_w = 3;
    big.output_len = 2;
    big.layers = {LayerSpec::conv2d(4, 7, 1, 0), LayerSpec::flatten(), LayerSpec::dense(2)};
    CHECK_THROWS_AS(Model<float>(big), std::invalid_argument);
}

TEST_CASE("forward clamps to [0,1], forward_raw does not") {
    ModelConfig c;
    c.in_c = 2;
    c.in_h = c.in_w = 1;
    c.output_len = 2;
    c.seed = 3;
    c.layers = {LayerSpec::dense(2)};
    Model<double> m(c);
    m.for_each_param([&](std::span<double> p, std::span<double>) {
        for (auto& x : p) x = 5.0;
    });
    Tensor<double> x(2, 1, 1);
    x.v = {1.0, 1.0};
    std::vector<double> raw = m.forward_raw(x);
    CHECK(raw[0] == Catch::Approx(15.0));
    std::vector<double> clamped = m.forward(x);
    CHECK(clamped[0] == 1.0);
    CHECK(clamped[1] == 1.0);
}

TEST_CASE("adam leaves weights unchanged at zero gradient") {
    ModelConfig c;
    c.in_c = 3;
    c.in_h = c.in_w = 1;
    c.output_len = 3;
    c.seed = 8;
    c.layers = {LayerSpec::dense(3)};
    Model<double> m(c);
    std::vector<double> before;
    m.for_each_param([&](std::span<double> p, std::span<double>) {
        before.insert(before.end(), p.begin(), p.end());
    });
    m.zero_grads();
    m.adam_step();
    std::vector<double> after;
    m.for_each_param([&](std::span<double> p, std::span<double>) {
        after.insert(after.end(), p.begin(), p.end());
    });
    CHECK(before == after);
    CHECK(m.step_count() == 1);
}

TEST_CASE("a single sample can be overfit") {
    ModelConfig c;
    c.in_c = 1;
    c.in_h = c.in_w = 6;
    c.output_len = 5;
    c.seed = 17;
    c.layers = {LayerSpec::conv2d(4, 3, 1, 1), LayerSpec::relu(), LayerSpec::maxpool(2, 2, 2, 2),
                LayerSpec::flatten(), LayerSpec::dense(5)};
    Model<double> m(c);
    Rng rng(4);
    Tensor<double> x = random_tensor<double>(1, 6, 6, rng);
    std::vector<double> target{0.9, 0.7, 0.5, 0.3, 0.1};
    double first = 0;
    for (int step = 0; step < 400; ++step) {
        m.zero_grads();
        std::vector<double> pred = m.forward_raw(x);
        if (step == 0) first = loss_value(pred, target, LossKind::Squared);
        m.backward(loss_gradient(pred, target, LossKind::Squared));
        m.adam_step();
    }
    double last = loss_value(m.forward_raw(x), target, LossKind::Squared);
    CHECK(last < 1e-4);
    CHECK(last < first);
}

TEST_CASE("training loop is deterministic and early-stops") {
    ModelConfig c;
    c.in_c = 1;
    c.in_h = 1;
    c.in_w = 8;
    c.output_len = 4;
    c.seed = 21;
    c.layers = {LayerSpec::flatten(), LayerSpec::dense(4)};
    Rng rng(31);
    std::vector<Sample<double>> train_set, val_set;
    for (int i = 0; i < 12; ++i) {
        Sample<double> s;
        s.input = random_tensor<double>(1, 1, 8, rng);
        s.target = {0.1, 0.4, 0.6, 0.9};
        (i < 9 ? train_set : val_set).push_back(std::move(s));
    }
    TrainOptions opt;
    opt.epochs = 30;
    opt.batch_size = 4;
    opt.patience = 3;
    Model<double> m1(c), m2(c);
    auto log1 = train(m1, train_set, val_set, opt);
    auto log2 = train(m2, train_set, val_set, opt);
    REQUIRE(log1.size() == log2.size());
    for (std::size_t e = 0; e < log1.size(); ++e) {
        CHECK(log1[e].train_loss == log2[e].train_loss);
        CHECK(log1[e].val_loss == log2[e].val_loss);
    }
    CHECK(log1.back().train_loss < log1.front().train_loss);
    CHECK_THROWS_AS(train(m1, {}, {}, opt), std::invalid_argument);
}

TEST_CASE("resample_curve interpolates onto the output grid") {
    RobustnessCurve constant{RobustnessMetric::Connectivity, 10,
                             std::vector<double>(10, 0.75)};
    for (double v : resample_curve(constant, 37)) CHECK(v == Catch::Approx(0.75));

    // linear curve v(delta) = delta lands exactly on j/(len-1)
    RobustnessCurve linear{RobustnessMetric::Connectivity, 20, {}};
    for (int i = 0; i < 20; ++i) linear.values.push_back(i / 20.0);
    std::vector<double> out = resample_curve(linear, 50);
    for (int j = 0; j < 50; ++j)
        CHECK(out[static_cast<std::size_t>(j)] == Catch::Approx(j / 49.0).margin(1e-12));

    CHECK_THROWS_AS(resample_curve({RobustnessMetric::Connectivity, 1, {1.0}}, 10),
                    std::invalid_argument);
    CHECK_THROWS_AS(resample_curve(linear, 1), std::invalid_argument);
}

TEST_CASE("checkpoints round-trip bytes and behavior") {
    Model<float> m(preset_patchy1d(20, 4, 2, 10, 5));
    std::stringstream s1;
    save_checkpoint(m, s1);
    std::stringstream copy(s1.str());
    Model<float> back = load_checkpoint<float>(copy);
    std::stringstream s2;
    save_checkpoint(back, s2);
    CHECK(s1.str() == s2.str());

    Rng rng(2);
    Tensor<float> x = random_tensor<float>(2, 1, 80, rng);
    CHECK(m.forward(x) == back.forward(x));

    std::stringstream bad("XXXXXXXX\n");
    CHECK_THROWS(load_checkpoint<float>(bad));
}

TEST_CASE("lfr tensor maps into the sequence layout channel-major") {
    ReceptiveFieldTensor t;
    t.w = 2;
    t.g = 2;
    t.h = 2;
    t.source_n = 4;
    t.data = {1, 2, 3, 4, 5, 6, 7, 8}; // (field,row,col)
    Tensor<float> seq = lfr_to_sequence_tensor<float>(t);
    CHECK(seq.c == 2);
    CHECK(seq.w == 4);
    // channel 0 = attribute 0 across (field*g + row)
    CHECK(seq.at(0, 0, 0) == 1.0f);
    CHECK(seq.at(0, 0, 1) == 3.0f);
    CHECK(seq.at(0, 0, 2) == 5.0f);
    CHECK(seq.at(1, 0, 3) == 8.0f);
}

TEST_CASE("adjacency image keeps exact entries at native size") {
    Graph g(3, false, {{0, 1}, {1, 2}});
    Tensor<float> img = adjacency_image<float>(g, 3);
    CHECK(img.at(0, 0, 1) == 1.0f);
    CHECK(img.at(0, 1, 0) == 1.0f);
    CHECK(img.at(0, 0, 2) == 0.0f);
    // resampled image stays within [0,1]
    Tensor<float> up = adjacency_image<float>(g, 7);
    for (float v : up.v) {
        CHECK(v >= 0.0f);
        CHECK(v <= 1.0f);
    }
}

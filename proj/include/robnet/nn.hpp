#ifndef ROBNET_NN_HPP
#define ROBNET_NN_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <memory>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "robnet/attack.hpp"
#include "robnet/lfr.hpp"
#include "robnet/rng.hpp"

namespace robnet::nn {

// --- tensors and small GEMM ------------------------------------------------

template <typename S>
struct Tensor {
    int c = 0, h = 0, w = 0;
    std::vector<S> v;

    Tensor() = default;
    Tensor(int c_, int h_, int w_) : c(c_), h(h_), w(w_), v(static_cast<std::size_t>(c_) * h_ * w_, S(0)) {}

    std::size_t size() const { return v.size(); }
    S& at(int ci, int y, int x) { return v[(static_cast<std::size_t>(ci) * h + y) * w + x]; }
    S at(int ci, int y, int x) const { return v[(static_cast<std::size_t>(ci) * h + y) * w + x]; }
};

namespace detail {

// C(MxN) += A(MxK) * B(KxN), row-major
template <typename S>
void gemm_nn(int M, int K, int N, const S* A, const S* B, S* C) {
    for (int i = 0; i < M; ++i) {
        const S* a = A + static_cast<std::size_t>(i) * K;
        S* c = C + static_cast<std::size_t>(i) * N;
        for (int k = 0; k < K; ++k) {
            S aik = a[k];
            if (aik == S(0)) continue;
            const S* b = B + static_cast<std::size_t>(k) * N;
            for (int j = 0; j < N; ++j) c[j] += aik * b[j];
        }
    }
}

// C(MxN) += A(MxK) * B^T where B is (NxK)
template <typename S>
void gemm_nt(int M, int K, int N, const S* A, const S* B, S* C) {
    for (int i = 0; i < M; ++i) {
        const S* a = A + static_cast<std::size_t>(i) * K;
        S* c = C + static_cast<std::size_t>(i) * N;
        for (int j = 0; j < N; ++j) {
            const S* b = B + static_cast<std::size_t>(j) * K;
            S acc = S(0);
            for (int k = 0; k < K; ++k) acc += a[k] * b[k];
            c[j] += acc;
        }
    }
}

// C(MxN) += A^T * B where A is (KxM), B is (KxN)
template <typename S>
void gemm_tn(int M, int K, int N, const S* A, const S* B, S* C) {
    for (int k = 0; k < K; ++k) {
        const S* a = A + static_cast<std::size_t>(k) * M;
        const S* b = B + static_cast<std::size_t>(k) * N;
        for (int i = 0; i < M; ++i) {
            S aki = a[i];
            if (aki == S(0)) continue;
            S* c = C + static_cast<std::size_t>(i) * N;
            for (int j = 0; j < N; ++j) c[j] += aki * b[j];
        }
    }
}

} // namespace detail

// --- layer specs -----------------------------------------------------------

struct LayerSpec {
    enum class Kind { Conv2d, Conv1d, MaxPool, ReLU, Flatten, Dense };
    Kind kind = Kind::ReLU;
    int out_c = 0;
    int kh = 1, kw = 1;
    int sh = 1, sw = 1;
    int ph = 0, pw = 0;
    int units = 0;

    static LayerSpec conv2d(int out_c, int k, int stride = 1, int pad = 0) {
        LayerSpec s;
        s.kind = Kind::Conv2d;
        s.out_c = out_c;
        s.kh = s.kw = k;
        s.sh = s.sw = stride;
        s.ph = s.pw = pad;
        return s;
    }
    static LayerSpec conv1d(int out_c, int k, int stride = 1, int pad = 0) {
        LayerSpec s;
        s.kind = Kind::Conv1d;
        s.out_c = out_c;
        s.kh = 1;
        s.kw = k;
        s.sh = 1;
        s.sw = stride;
        s.ph = 0;
        s.pw = pad;
        return s;
    }
    static LayerSpec maxpool(int kh, int kw, int sh, int sw) {
        LayerSpec s;
        s.kind = Kind::MaxPool;
        s.kh = kh;
        s.kw = kw;
        s.sh = sh;
        s.sw = sw;
        return s;
    }
    static LayerSpec relu() { return LayerSpec{}; }
    static LayerSpec flatten() {
        LayerSpec s;
        s.kind = Kind::Flatten;
        return s;
    }
    static LayerSpec dense(int units) {
        LayerSpec s;
        s.kind = Kind::Dense;
        s.units = units;
        return s;
    }
};

enum class LossKind { Squared, Absolute };

struct AdamParams {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

struct ModelConfig {
    std::vector<LayerSpec> layers;
    int in_c = 1, in_h = 0, in_w = 0;
    int output_len = 100;
    LossKind loss = LossKind::Squared;
    AdamParams adam;
    std::uint64_t seed = 0;
};

// --- layers ----------------------------------------------------------------

template <typename S>
class Layer {
public:
    virtual ~Layer() = default;
    virtual Tensor<S> forward(const Tensor<S>& x) = 0;
    virtual Tensor<S> backward(const Tensor<S>& dy) = 0;
    virtual std::span<S> params() { return {}; }
    virtual std::span<S> grads() { return {}; }
    void zero_grad() {
        auto g = grads();
        std::fill(g.begin(), g.end(), S(0));
    }
};

template <typename S>
class Conv2dLayer final : public Layer<S> {
public:
    Conv2dLayer(const LayerSpec& spec, int in_c, int in_h, int in_w, Rng& rng)
        : spec_(spec), in_c_(in_c), in_h_(in_h), in_w_(in_w) {
        out_h_ = (in_h + 2 * spec.ph - spec.kh) / spec.sh + 1;
        out_w_ = (in_w + 2 * spec.pw - spec.kw) / spec.sw + 1;
        if (out_h_ < 1 || out_w_ < 1) throw std::invalid_argument("conv: kernel larger than input");
        k_ = in_c * spec.kh * spec.kw;
        weight_.resize(static_cast<std::size_t>(spec.out_c) * k_);
        bias_.assign(static_cast<std::size_t>(spec.out_c), S(0));
        double bound = std::sqrt(1.0 / static_cast<double>(k_));
        for (auto& w : weight_) w = static_cast<S>(rng.uniform(-bound, bound));
        for (auto& b : bias_) b = static_cast<S>(rng.uniform(-bound, bound));
        gw_.assign(weight_.size(), S(0));
        gb_.assign(bias_.size(), S(0));
    }

    int out_c() const { return spec_.out_c; }
    int out_h() const { return out_h_; }
    int out_w() const { return out_w_; }

    Tensor<S> forward(const Tensor<S>& x) override {
        const int P = out_h_ * out_w_;
        col_.assign(static_cast<std::size_t>(k_) * P, S(0));
        im2col(x, col_.data());
        Tensor<S> y(spec_.out_c, out_h_, out_w_);
        detail::gemm_nn(spec_.out_c, k_, P, weight_.data(), col_.data(), y.v.data());
        for (int oc = 0; oc < spec_.out_c; ++oc) {
            S b = bias_[static_cast<std::size_t>(oc)];
            S* row = y.v.data() + static_cast<std::size_t>(oc) * P;
            for (int p = 0; p < P; ++p) row[p] += b;
        }
        return y;
    }

    Tensor<S> backward(const Tensor<S>& dy) override {
        const int P = out_h_ * out_w_;
        detail::gemm_nt(spec_.out_c, P, k_, dy.v.data(), col_.data(), gw_.data());
        for (int oc = 0; oc < spec_.out_c; ++oc) {
            const S* row = dy.v.data() + static_cast<std::size_t>(oc) * P;
            S acc = S(0);
            for (int p = 0; p < P; ++p) acc += row[p];
            gb_[static_cast<std::size_t>(oc)] += acc;
        }
        std::vector<S> dcol(static_cast<std::size_t>(k_) * P, S(0));
        detail::gemm_tn(k_, spec_.out_c, P, weight_.data(), dy.v.data(), dcol.data());
        Tensor<S> dx(in_c_, in_h_, in_w_);
        col2im(dcol.data(), dx);
        return dx;
    }

    std::span<S> params() override {
        joined_.resize(0);
        return {}; // unused; see param_views
    }
    std::span<S> grads() override { return {}; }

    // two parameter blocks: weights, bias
    std::vector<std::pair<std::span<S>, std::span<S>>> param_views() {
        return {{std::span<S>(weight_), std::span<S>(gw_)},
                {std::span<S>(bias_), std::span<S>(gb_)}};
    }

private:
    void im2col(const Tensor<S>& x, S* col) const {
        int idx = 0;
        for (int ci = 0; ci < in_c_; ++ci)
            for (int ky = 0; ky < spec_.kh; ++ky)
                for (int kx = 0; kx < spec_.kw; ++kx, ++idx) {
                    S* row = col + static_cast<std::size_t>(idx) * out_h_ * out_w_;
                    for (int oy = 0; oy < out_h_; ++oy) {
                        int yy = oy * spec_.sh - spec_.ph + ky;
                        if (yy < 0 || yy >= in_h_) continue;
                        for (int ox = 0; ox < out_w_; ++ox) {
                            int xx = ox * spec_.sw - spec_.pw + kx;
                            if (xx < 0 || xx >= in_w_) continue;
                            row[oy * out_w_ + ox] = x.at(ci, yy, xx);
                        }
                    }
                }
    }

    void col2im(const S* col, Tensor<S>& dx) const {
        int idx = 0;
        for (int ci = 0; ci < in_c_; ++ci)
            for (int ky = 0; ky < spec_.kh; ++ky)
                for (int kx = 0; kx < spec_.kw; ++kx, ++idx) {
                    const S* row = col + static_cast<std::size_t>(idx) * out_h_ * out_w_;
                    for (int oy = 0; oy < out_h_; ++oy) {
                        int yy = oy * spec_.sh - spec_.ph + ky;
                        if (yy < 0 || yy >= in_h_) continue;
                        for (int ox = 0; ox < out_w_; ++ox) {
                            int xx = ox * spec_.sw - spec_.pw + kx;
                            if (xx < 0 || xx >= in_w_) continue;
                            dx.at(ci, yy, xx) += row[oy * out_w_ + ox];
                        }
                    }
                }
    }

    LayerSpec spec_;
    int in_c_, in_h_, in_w_, out_h_, out_w_, k_;
    std::vector<S> weight_, bias_, gw_, gb_, col_, joined_;

public:
    std::vector<S>& weight() { return weight_; }
    std::vector<S>& bias() { return bias_; }
};

// Ceil-division pooling: windows may extend past the border, where cells act
// as zeros, so output sides follow ceil(side / stride).
template <typename S>
class MaxPoolLayer final : public Layer<S> {
public:
    MaxPoolLayer(const LayerSpec& spec, int in_c, int in_h, int in_w)
        : spec_(spec), in_c_(in_c), in_h_(in_h), in_w_(in_w) {
        out_h_ = (in_h + spec.sh - 1) / spec.sh;
        out_w_ = (in_w + spec.sw - 1) / spec.sw;
    }

    int out_c() const { return in_c_; }
    int out_h() const { return out_h_; }
    int out_w() const { return out_w_; }

    Tensor<S> forward(const Tensor<S>& x) override {
        Tensor<S> y(in_c_, out_h_, out_w_);
        arg_.assign(y.size(), -1);
        std::size_t o = 0;
        for (int ci = 0; ci < in_c_; ++ci)
            for (int oy = 0; oy < out_h_; ++oy)
                for (int ox = 0; ox < out_w_; ++ox, ++o) {
                    S best = -std::numeric_limits<S>::infinity();
                    std::int64_t besti = -1;
                    bool padded = false;
                    for (int ky = 0; ky < spec_.kh; ++ky) {
                        int yy = oy * spec_.sh + ky;
                        for (int kx = 0; kx < spec_.kw; ++kx) {
                            int xx = ox * spec_.sw + kx;
                            if (yy >= in_h_ || xx >= in_w_) {
                                padded = true;
                                continue;
                            }
                            S val = x.at(ci, yy, xx);
                            if (val > best) {
                                best = val;
                                besti = (static_cast<std::int64_t>(ci) * in_h_ + yy) * in_w_ + xx;
                            }
                        }
                    }
                    if (padded && best < S(0)) {
                        best = S(0);
                        besti = -1;
                    }
                    y.v[o] = best;
                    arg_[o] = besti;
                }
        return y;
    }

    Tensor<S> backward(const Tensor<S>& dy) override {
        Tensor<S> dx(in_c_, in_h_, in_w_);
        for (std::size_t o = 0; o < dy.size(); ++o)
            if (arg_[o] >= 0) dx.v[static_cast<std::size_t>(arg_[o])] += dy.v[o];
        return dx;
    }

private:
    LayerSpec spec_;
    int in_c_, in_h_, in_w_, out_h_, out_w_;
    std::vector<std::int64_t> arg_;
};

template <typename S>
class ReLULayer final : public Layer<S> {
public:
    Tensor<S> forward(const Tensor<S>& x) override {
        mask_.assign(x.size(), false);
        Tensor<S> y = x;
        for (std::size_t i = 0; i < y.size(); ++i) {
            if (y.v[i] > S(0)) mask_[i] = true;
            else y.v[i] = S(0);
        }
        return y;
    }
    Tensor<S> backward(const Tensor<S>& dy) override {
        Tensor<S> dx = dy;
        for (std::size_t i = 0; i < dx.size(); ++i)
            if (!mask_[i]) dx.v[i] = S(0);
        return dx;
    }

private:
    std::vector<char> mask_;
};

template <typename S>
class FlattenLayer final : public Layer<S> {
public:
    Tensor<S> forward(const Tensor<S>& x) override {
        c_ = x.c;
        h_ = x.h;
        w_ = x.w;
        Tensor<S> y(static_cast<int>(x.size()), 1, 1);
        y.v = x.v;
        return y;
    }
    Tensor<S> backward(const Tensor<S>& dy) override {
        Tensor<S> dx(c_, h_, w_);
        dx.v = dy.v;
        return dx;
    }

private:
    int c_ = 0, h_ = 0, w_ = 0;
};

template <typename S>
class DenseLayer final : public Layer<S> {
public:
    DenseLayer(int in_units, int out_units, Rng& rng)
        : in_(in_units), out_(out_units) {
        weight_.resize(static_cast<std::size_t>(out_) * in_);
        bias_.assign(static_cast<std::size_t>(out_), S(0));
        double bound = std::sqrt(1.0 / static_cast<double>(in_));
        for (auto& w : weight_) w = static_cast<S>(rng.uniform(-bound, bound));
        for (auto& b : bias_) b = static_cast<S>(rng.uniform(-bound, bound));
        gw_.assign(weight_.size(), S(0));
        gb_.assign(bias_.size(), S(0));
    }

    int out_units() const { return out_; }

    Tensor<S> forward(const Tensor<S>& x) override {
        if (static_cast<int>(x.size()) != in_)
            throw std::invalid_argument("dense: input size mismatch");
        x_ = x.v;
        Tensor<S> y(out_, 1, 1);
        for (int i = 0; i < out_; ++i) {
            const S* w = weight_.data() + static_cast<std::size_t>(i) * in_;
            S acc = bias_[static_cast<std::size_t>(i)];
            for (int j = 0; j < in_; ++j) acc += w[j] * x_[static_cast<std::size_t>(j)];
            y.v[static_cast<std::size_t>(i)] = acc;
        }
        return y;
    }

    Tensor<S> backward(const Tensor<S>& dy) override {
        Tensor<S> dx(in_, 1, 1);
        for (int i = 0; i < out_; ++i) {
            S d = dy.v[static_cast<std::size_t>(i)];
            gb_[static_cast<std::size_t>(i)] += d;
            S* gw = gw_.data() + static_cast<std::size_t>(i) * in_;
            const S* w = weight_.data() + static_cast<std::size_t>(i) * in_;
            for (int j = 0; j < in_; ++j) {
                gw[j] += d * x_[static_cast<std::size_t>(j)];
                dx.v[static_cast<std::size_t>(j)] += d * w[j];
            }
        }
        return dx;
    }

    std::vector<std::pair<std::span<S>, std::span<S>>> param_views() {
        return {{std::span<S>(weight_), std::span<S>(gw_)},
                {std::span<S>(bias_), std::span<S>(gb_)}};
    }

    std::vector<S>& weight() { return weight_; }
    std::vector<S>& bias() { return bias_; }

private:
    int in_, out_;
    std::vector<S> weight_, bias_, gw_, gb_, x_;
};

// --- model -----------------------------------------------------------------

template <typename S>
class Model {
public:
    explicit Model(ModelConfig config) : config_(std::move(config)) {
        Rng rng(config_.seed);
        int c = config_.in_c, h = config_.in_h, w = config_.in_w;
        bool flat = false;
        for (const auto& spec : config_.layers) {
            switch (spec.kind) {
                case LayerSpec::Kind::Conv2d:
                case LayerSpec::Kind::Conv1d: {
                    auto layer = std::make_unique<Conv2dLayer<S>>(spec, c, h, w, rng);
                    c = layer->out_c();
                    h = layer->out_h();
                    w = layer->out_w();
                    conv_.push_back(layer.get());
                    layers_.push_back(std::move(layer));
                    break;
                }
                case LayerSpec::Kind::MaxPool: {
                    auto layer = std::make_unique<MaxPoolLayer<S>>(spec, c, h, w);
                    h = layer->out_h();
                    w = layer->out_w();
                    layers_.push_back(std::move(layer));
                    break;
                }
                case LayerSpec::Kind::ReLU:
                    layers_.push_back(std::make_unique<ReLULayer<S>>());
                    break;
                case LayerSpec::Kind::Flatten:
                    layers_.push_back(std::make_unique<FlattenLayer<S>>());
                    c = c * h * w;
                    h = w = 1;
                    flat = true;
                    break;
                case LayerSpec::Kind::Dense: {
                    if (!flat && (h != 1 || w != 1))
                        throw std::invalid_argument("model: dense requires flattened input");
                    auto layer = std::make_unique<DenseLayer<S>>(c * h * w, spec.units, rng);
                    c = spec.units;
                    h = w = 1;
                    dense_.push_back(layer.get());
                    layers_.push_back(std::move(layer));
                    break;
                }
            }
        }
        if (c != config_.output_len || h != 1 || w != 1)
            throw std::invalid_argument("model: final layer does not produce output_len units");
    }

    const ModelConfig& config() const { return config_; }

    std::size_t parameter_count() const {
        std::size_t total = 0;
        for_each_param_const([&](std::span<const S> p, std::span<const S>) { total += p.size(); });
        return total;
    }

    // Raw network output (pre-clamp); training operates on this.
    std::vector<S> forward_raw(const Tensor<S>& input) {
        if (input.c != config_.in_c || input.h != config_.in_h || input.w != config_.in_w)
            throw std::invalid_argument("model: input shape mismatch");
        Tensor<S> x = input;
        for (auto& layer : layers_) x = layer->forward(x);
        return x.v;
    }

    // Output head clamps predictions to [0,1].
    std::vector<S> forward(const Tensor<S>& input) {
        std::vector<S> y = forward_raw(input);
        for (auto& v : y) v = std::clamp(v, S(0), S(1));
        return y;
    }

    // Backpropagate d(loss)/d(output); parameter gradients accumulate.
    void backward(const std::vector<S>& dout) {
        Tensor<S> g(static_cast<int>(dout.size()), 1, 1);
        g.v = dout;
        for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) g = (*it)->backward(g);
    }

    void zero_grads() {
        for_each_param([&](std::span<S>, std::span<S> g) { std::fill(g.begin(), g.end(), S(0)); });
    }

    void scale_grads(S factor) {
        for_each_param([&](std::span<S>, std::span<S> g) {
            for (auto& x : g) x *= factor;
        });
    }

    // Adaptive-moment update over all parameters.
    void adam_step() {
        if (m_.empty()) {
            m_.assign(parameter_count(), 0.0);
            v_.assign(parameter_count(), 0.0);
        }
        ++step_count_;
        const auto& a = config_.adam;
        double bc1 = 1.0 - std::pow(a.beta1, step_count_);
        double bc2 = 1.0 - std::pow(a.beta2, step_count_);
        std::size_t off = 0;
        for_each_param([&](std::span<S> p, std::span<S> g) {
            for (std::size_t i = 0; i < p.size(); ++i) {
                double gi = static_cast<double>(g[i]);
                double& m = m_[off + i];
                double& v = v_[off + i];
                m = a.beta1 * m + (1.0 - a.beta1) * gi;
                v = a.beta2 * v + (1.0 - a.beta2) * gi * gi;
                double mhat = m / bc1, vhat = v / bc2;
                p[i] -= static_cast<S>(a.lr * mhat / (std::sqrt(vhat) + a.eps));
            }
            off += p.size();
        });
    }

    std::uint64_t step_count() const { return step_count_; }

    template <typename F>
    void for_each_param(F&& f) {
        for (auto* conv : conv_)
            for (auto [p, g] : conv->param_views()) f(p, g);
        for (auto* dense : dense_)
            for (auto [p, g] : dense->param_views()) f(p, g);
    }

    template <typename F>
    void for_each_param_const(F&& f) const {
        auto* self = const_cast<Model*>(this);
        self->for_each_param([&](std::span<S> p, std::span<S> g) {
            f(std::span<const S>(p), std::span<const S>(g));
        });
    }

private:
    ModelConfig config_;
    std::vector<std::unique_ptr<Layer<S>>> layers_;
    std::vector<Conv2dLayer<S>*> conv_;
    std::vector<DenseLayer<S>*> dense_;
    std::vector<double> m_, v_;
    std::uint64_t step_count_ = 0;
};

using ModelF = Model<float>;
using ModelD = Model<double>;

// --- loss ------------------------------------------------------------------

template <typename S>
double loss_value(const std::vector<S>& pred, const std::vector<S>& target, LossKind kind) {
    if (pred.size() != target.size()) throw std::invalid_argument("loss: length mismatch");
    double sum = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        double d = static_cast<double>(pred[i]) - static_cast<double>(target[i]);
        sum += kind == LossKind::Squared ? d * d : std::abs(d);
    }
    return pred.empty() ? 0.0 : sum / static_cast<double>(pred.size());
}

template <typename S>
std::vector<S> loss_gradient(const std::vector<S>& pred, const std::vector<S>& target,
                             LossKind kind) {
    std::vector<S> g(pred.size());
    auto n = static_cast<double>(pred.size());
    for (std::size_t i = 0; i < pred.size(); ++i) {
        double d = static_cast<double>(pred[i]) - static_cast<double>(target[i]);
        double gi = kind == LossKind::Squared ? 2.0 * d / n : (d > 0 ? 1.0 : (d < 0 ? -1.0 : 0.0)) / n;
        g[i] = static_cast<S>(gi);
    }
    return g;
}

// --- presets ---------------------------------------------------------------

enum class Preset { LfrCnn, Pcr, Patchy1d };

inline const char* to_string(Preset p) {
    switch (p) {
        case Preset::LfrCnn: return "lfr-cnn";
        case Preset::Pcr: return "pcr";
        case Preset::Patchy1d: return "patchy1d";
    }
    return "?";
}

inline Preset preset_from_string(const std::string& s) {
    if (s == "lfr-cnn" || s == "lfr_cnn" || s == "lfrcnn") return Preset::LfrCnn;
    if (s == "pcr") return Preset::Pcr;
    if (s == "patchy1d" || s == "patchy-san" || s == "patchy") return Preset::Patchy1d;
    throw std::invalid_argument("unknown preset: " + s);
}

// 3-FM 2D CNN: Conv7-64 / Max2, Conv5-64 / Max2, Conv3-128 / Max2, then two
// fully-connected layers.
inline ModelConfig preset_lfr_cnn(int input_side, int output_len, std::uint64_t seed = 0) {
    ModelConfig c;
    c.in_c = 1;
    c.in_h = c.in_w = input_side;
    c.output_len = output_len;
    c.seed = seed;
    c.layers = {LayerSpec::conv2d(64, 7, 1, 3),  LayerSpec::relu(), LayerSpec::maxpool(2, 2, 2, 2),
                LayerSpec::conv2d(64, 5, 1, 2),  LayerSpec::relu(), LayerSpec::maxpool(2, 2, 2, 2),
                LayerSpec::conv2d(128, 3, 1, 1), LayerSpec::relu(), LayerSpec::maxpool(2, 2, 2, 2),
                LayerSpec::flatten(),            LayerSpec::dense(256), LayerSpec::relu(),
                LayerSpec::dense(output_len)};
    return c;
}

// VGG-style 6/7-FM baseline operating on raw adjacency images.
inline ModelConfig preset_pcr(int input_side, int output_len, int fm_groups = 7,
                              std::uint64_t seed = 0) {
    if (fm_groups < 1 || fm_groups > 7) throw std::invalid_argument("pcr: fm_groups in [1,7]");
    static const int channels[7] = {64, 64, 128, 128, 256, 256, 512};
    ModelConfig c;
    c.in_c = 1;
    c.in_h = c.in_w = input_side;
    c.output_len = output_len;
    c.seed = seed;
    for (int i = 0; i < fm_groups; ++i) {
        c.layers.push_back(LayerSpec::conv2d(channels[i], 3, 1, 1));
        c.layers.push_back(LayerSpec::relu());
        c.layers.push_back(LayerSpec::maxpool(2, 2, 2, 2));
    }
    c.layers.push_back(LayerSpec::flatten());
    c.layers.push_back(LayerSpec::dense(640));
    c.layers.push_back(LayerSpec::relu());
    c.layers.push_back(LayerSpec::dense(output_len));
    return c;
}

// Shallow 1D CNN over the flattened receptive-field sequence. Input layout is
// (channels = h attributes, 1, W*g); the first convolution spans one
// receptive-field row per stride step.
inline ModelConfig preset_patchy1d(int w, int g, int h, int output_len, std::uint64_t seed = 0) {
    ModelConfig c;
    c.in_c = h;
    c.in_h = 1;
    c.in_w = w * g;
    c.output_len = output_len;
    c.seed = seed;
    c.layers = {LayerSpec::conv1d(16, g, g, 0), LayerSpec::relu(), LayerSpec::maxpool(1, 2, 1, 2),
                LayerSpec::conv1d(16, 9, 1, 4), LayerSpec::relu(), LayerSpec::maxpool(1, 2, 1, 2),
                LayerSpec::flatten(),           LayerSpec::dense(240), LayerSpec::relu(),
                LayerSpec::dense(output_len)};
    return c;
}

// --- input conversion ------------------------------------------------------

template <typename S>
Tensor<S> image_to_tensor(const SquareImage& img) {
    Tensor<S> t(1, img.side, img.side);
    for (std::size_t i = 0; i < img.data.size(); ++i) t.v[i] = static_cast<S>(img.data[i]);
    return t;
}

template <typename S>
Tensor<S> lfr_to_sequence_tensor(const ReceptiveFieldTensor& rft) {
    // (field,row,col) storage -> channel-major sequence: channel = attribute,
    // position = field*g + row.
    Tensor<S> t(rft.h, 1, rft.w * rft.g);
    for (int f = 0; f < rft.w; ++f)
        for (int r = 0; r < rft.g; ++r)
            for (int c = 0; c < rft.h; ++c)
                t.at(c, 0, f * rft.g + r) = static_cast<S>(rft.at(f, r, c));
    return t;
}

// Bilinear resample of the 0/1 adjacency matrix to the model's input side.
template <typename S>
Tensor<S> adjacency_image(const Graph& g, int side) {
    auto n = static_cast<std::size_t>(g.n());
    std::vector<float> a(n * n, 0.0f);
    for (auto [u, v] : g.edges()) {
        a[static_cast<std::size_t>(u) * n + static_cast<std::size_t>(v)] = 1.0f;
        if (!g.directed()) a[static_cast<std::size_t>(v) * n + static_cast<std::size_t>(u)] = 1.0f;
    }
    Tensor<S> t(1, side, side);
    if (static_cast<int>(n) == side) {
        for (std::size_t i = 0; i < a.size(); ++i) t.v[i] = static_cast<S>(a[i]);
        return t;
    }
    double scale = static_cast<double>(n - 1) / std::max(1, side - 1);
    for (int y = 0; y < side; ++y) {
        double sy = y * scale;
        auto y0 = static_cast<std::size_t>(sy);
        std::size_t y1 = std::min(y0 + 1, n - 1);
        double fy = sy - static_cast<double>(y0);
        for (int x = 0; x < side; ++x) {
            double sx = x * scale;
            auto x0 = static_cast<std::size_t>(sx);
            std::size_t x1 = std::min(x0 + 1, n - 1);
            double fx = sx - static_cast<double>(x0);
            double val = (1 - fy) * ((1 - fx) * a[y0 * n + x0] + fx * a[y0 * n + x1]) +
                         fy * ((1 - fx) * a[y1 * n + x0] + fx * a[y1 * n + x1]);
            t.at(0, y, x) = static_cast<S>(val);
        }
    }
    return t;
}

// --- curve resampling ------------------------------------------------------

// Piecewise-linear interpolation of v against delta = i/n onto the uniform
// grid j/(len-1). Targets past the last sample (delta = (n-1)/n) extend the
// final segment linearly, clamped to [0,1].
inline std::vector<double> resample_curve(const RobustnessCurve& curve, int len) {
    if (curve.values.size() < 2) throw std::invalid_argument("resample_curve: need >= 2 points");
    if (len < 2) throw std::invalid_argument("resample_curve: output length >= 2");
    const auto n = static_cast<double>(curve.n);
    const std::size_t last = curve.values.size() - 1;
    std::vector<double> out(static_cast<std::size_t>(len));
    for (int j = 0; j < len; ++j) {
        double t = static_cast<double>(j) / (len - 1); // target delta
        double pos = t * n;                            // fractional source index
        auto i0 = static_cast<std::size_t>(pos);
        if (i0 >= last) i0 = last - 1;
        double f = pos - static_cast<double>(i0);
        double v = (1.0 - f) * curve.values[i0] + f * curve.values[i0 + 1];
        out[static_cast<std::size_t>(j)] = std::clamp(v, 0.0, 1.0);
    }
    return out;
}

// --- training --------------------------------------------------------------

template <typename S>
struct Sample {
    Tensor<S> input;
    std::vector<S> target;
};

struct EpochLog {
    double train_loss = 0.0;
    double val_loss = 0.0;
};

struct TrainOptions {
    int epochs = 30;
    int batch_size = 16;
    int patience = 8;           // early stop on validation plateau
    std::uint64_t shuffle_seed = 1;
    int workers = 1;            // data-parallel gradient accumulation
    bool keep_best = true;      // restore best-validation weights at the end
};

template <typename S>
double evaluate_loss(Model<S>& model, const std::vector<Sample<S>>& data) {
    double sum = 0.0;
    for (const auto& s : data)
        sum += loss_value(model.forward_raw(s.input), s.target, model.config().loss);
    return data.empty() ? 0.0 : sum / static_cast<double>(data.size());
}

template <typename S>
std::vector<EpochLog> train(Model<S>& model, const std::vector<Sample<S>>& train_set,
                            const std::vector<Sample<S>>& val_set, const TrainOptions& opt) {
    if (train_set.empty()) throw std::invalid_argument("train: empty dataset");
    Rng shuffle_rng(opt.shuffle_seed);
    std::vector<std::size_t> order(train_set.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    std::vector<EpochLog> log;
    double best_val = std::numeric_limits<double>::infinity();
    int since_best = 0;
    std::vector<S> best_weights;
    auto snapshot = [&]() {
        best_weights.clear();
        model.for_each_param([&](std::span<S> p, std::span<S>) {
            best_weights.insert(best_weights.end(), p.begin(), p.end());
        });
    };
    auto restore = [&]() {
        if (best_weights.empty()) return;
        std::size_t off = 0;
        model.for_each_param([&](std::span<S> p, std::span<S>) {
            std::copy(best_weights.begin() + static_cast<std::ptrdiff_t>(off),
                      best_weights.begin() + static_cast<std::ptrdiff_t>(off + p.size()), p.begin());
            off += p.size();
        });
    };

    for (int epoch = 0; epoch < opt.epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        double epoch_loss = 0.0;
        std::size_t seen = 0;
        for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(opt.batch_size)) {
            std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(opt.batch_size));
            model.zero_grads();
            double batch_loss = 0.0;
            for (std::size_t bi = start; bi < end; ++bi) {
                const auto& s = train_set[order[bi]];
                std::vector<S> pred = model.forward_raw(s.input);
                batch_loss += loss_value(pred, s.target, model.config().loss);
                model.backward(loss_gradient(pred, s.target, model.config().loss));
            }
            if (!std::isfinite(batch_loss)) throw std::runtime_error("train: loss diverged");
            model.scale_grads(S(1) / static_cast<S>(end - start));
            model.adam_step();
            epoch_loss += batch_loss;
            seen += end - start;
        }
        EpochLog entry;
        entry.train_loss = epoch_loss / static_cast<double>(seen);
        entry.val_loss = val_set.empty() ? entry.train_loss : evaluate_loss(model, val_set);
        log.push_back(entry);
        if (entry.val_loss < best_val) {
            best_val = entry.val_loss;
            since_best = 0;
            if (opt.keep_best) snapshot();
        } else if (++since_best >= opt.patience) {
            break;
        }
    }
    if (opt.keep_best) restore();
    return log;
}

// --- checkpoint format -----------------------------------------------------
// magic RNETCNN1, canonical text block terminated by "end", then per-block
// u32 LE length + f32 LE weights, in layer order (weights then bias).

namespace detail {

inline void put_u32(std::ostream& os, std::uint32_t x) {
    char b[4] = {static_cast<char>(x & 0xff), static_cast<char>((x >> 8) & 0xff),
                 static_cast<char>((x >> 16) & 0xff), static_cast<char>((x >> 24) & 0xff)};
    os.write(b, 4);
}

inline std::uint32_t get_u32(std::istream& is) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    if (!is) throw std::runtime_error("checkpoint: truncated");
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

inline const char* kind_name(LayerSpec::Kind k) {
    switch (k) {
        case LayerSpec::Kind::Conv2d: return "conv2d";
        case LayerSpec::Kind::Conv1d: return "conv1d";
        case LayerSpec::Kind::MaxPool: return "maxpool";
        case LayerSpec::Kind::ReLU: return "relu";
        case LayerSpec::Kind::Flatten: return "flatten";
        case LayerSpec::Kind::Dense: return "dense";
    }
    return "?";
}

inline LayerSpec::Kind kind_from_name(const std::string& s) {
    if (s == "conv2d") return LayerSpec::Kind::Conv2d;
    if (s == "conv1d") return LayerSpec::Kind::Conv1d;
    if (s == "maxpool") return LayerSpec::Kind::MaxPool;
    if (s == "relu") return LayerSpec::Kind::ReLU;
    if (s == "flatten") return LayerSpec::Kind::Flatten;
    if (s == "dense") return LayerSpec::Kind::Dense;
    throw std::runtime_error("checkpoint: unknown layer kind " + s);
}

} // namespace detail

inline void save_config_text(const ModelConfig& c, std::ostream& os) {
    os << "input " << c.in_c << " " << c.in_h << " " << c.in_w << "\n";
    os << "output " << c.output_len << "\n";
    os << "loss " << (c.loss == LossKind::Squared ? "squared" : "absolute") << "\n";
    os << "flatten-order field,row,col\n";
    for (const auto& l : c.layers) {
        os << "layer " << detail::kind_name(l.kind);
        switch (l.kind) {
            case LayerSpec::Kind::Conv2d:
            case LayerSpec::Kind::Conv1d:
                os << " " << l.out_c << " " << l.kh << " " << l.kw << " " << l.sh << " " << l.sw
                   << " " << l.ph << " " << l.pw;
                break;
            case LayerSpec::Kind::MaxPool:
                os << " " << l.kh << " " << l.kw << " " << l.sh << " " << l.sw;
                break;
            case LayerSpec::Kind::Dense:
                os << " " << l.units;
                break;
            default:
                break;
        }
        os << "\n";
    }
    os << "end\n";
}

inline ModelConfig load_config_text(std::istream& is) {
    ModelConfig c;
    std::string line;
    while (std::getline(is, line)) {
        if (line == "end") return c;
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key == "input") ls >> c.in_c >> c.in_h >> c.in_w;
        else if (key == "output") ls >> c.output_len;
        else if (key == "loss") {
            std::string v;
            ls >> v;
            c.loss = v == "absolute" ? LossKind::Absolute : LossKind::Squared;
        } else if (key == "flatten-order") {
            std::string v;
            ls >> v;
            if (v != "field,row,col") throw std::runtime_error("checkpoint: unknown flatten order");
        } else if (key == "layer") {
            std::string kind;
            ls >> kind;
            LayerSpec l;
            l.kind = detail::kind_from_name(kind);
            switch (l.kind) {
                case LayerSpec::Kind::Conv2d:
                case LayerSpec::Kind::Conv1d:
                    ls >> l.out_c >> l.kh >> l.kw >> l.sh >> l.sw >> l.ph >> l.pw;
                    break;
                case LayerSpec::Kind::MaxPool:
                    ls >> l.kh >> l.kw >> l.sh >> l.sw;
                    break;
                case LayerSpec::Kind::Dense:
                    ls >> l.units;
                    break;
                default:
                    break;
            }
            c.layers.push_back(l);
        } else {
            throw std::runtime_error("checkpoint: unknown config key " + key);
        }
    }
    throw std::runtime_error("checkpoint: config block missing 'end'");
}

template <typename S>
void save_checkpoint(Model<S>& model, std::ostream& os) {
    os.write("RNETCNN1", 8);
    os << "\n";
    save_config_text(model.config(), os);
    model.for_each_param([&](std::span<S> p, std::span<S>) {
        detail::put_u32(os, static_cast<std::uint32_t>(p.size()));
        for (S x : p) {
            auto f = static_cast<float>(x);
            std::uint32_t bits;
            std::memcpy(&bits, &f, 4);
            detail::put_u32(os, bits);
        }
    });
}

template <typename S>
void save_checkpoint(Model<S>& model, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    save_checkpoint(model, f);
}

template <typename S>
Model<S> load_checkpoint(std::istream& is) {
    char magic[9] = {0};
    is.read(magic, 8);
    if (!is || std::string(magic, 8) != "RNETCNN1")
        throw std::runtime_error("checkpoint: bad magic");
    std::string newline;
    std::getline(is, newline);
    ModelConfig config = load_config_text(is);
    Model<S> model(config);
    model.for_each_param([&](std::span<S> p, std::span<S>) {
        std::uint32_t count = detail::get_u32(is);
        if (count != p.size()) throw std::runtime_error("checkpoint: weight block size mismatch");
        for (auto& x : p) {
            std::uint32_t bits = detail::get_u32(is);
            float f;
            std::memcpy(&f, &bits, 4);
            x = static_cast<S>(f);
        }
    });
    return model;
}

template <typename S>
Model<S> load_checkpoint(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open: " + path);
    return load_checkpoint<S>(f);
}

// --- prediction ------------------------------------------------------------

// Curve on the output grid, clamped to [0,1].
template <typename S>
RobustnessCurve predict_curve(Model<S>& model, const Tensor<S>& input, RobustnessMetric metric) {
    std::vector<S> y = model.forward(input);
    RobustnessCurve c{metric, static_cast<NodeId>(y.size()), {}};
    c.values.assign(y.begin(), y.end());
    return c;
}

} // namespace robnet::nn

#endif // ROBNET_NN_HPP

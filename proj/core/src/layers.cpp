#include "eyelstm/layers.hpp"

#include <cmath>
#include <sstream>

namespace eyelstm {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void apply_activation(Tensor2& t, Activation act) {
    if (act != Activation::relu) return;
    for (double& v : t.data) v = v > 0.0 ? v : 0.0;
}

// Gradient through the activation, given pre-activation values.
void chain_activation(Tensor2& grad, const Tensor2& pre, Activation act) {
    if (act != Activation::relu) return;
    for (std::size_t i = 0; i < grad.data.size(); ++i)
        if (pre.data[i] <= 0.0) grad.data[i] = 0.0;
}

// Uniform in +-sqrt(6 / (fan_in + fan_out)).
void glorot_fill(std::vector<double>& w, std::size_t fan_in, std::size_t fan_out, Rng& rng) {
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    for (double& v : w) v = rng.uniform(-limit, limit);
}

}  // namespace

std::string to_string(Activation a) { return a == Activation::relu ? "relu" : "linear"; }

Activation activation_from_string(const std::string& s) {
    if (s == "relu") return Activation::relu;
    if (s == "linear") return Activation::linear;
    throw ValidationError("unknown activation '" + s + "'");
}

void Layer::zero_grads() {
    for (ParamView& p : parameters())
        for (double& g : *p.grads) g = 0.0;
}

// --------------------------------------------------------------------------
// Conv1d

Conv1dLayer::Conv1dLayer(std::size_t kernel, std::size_t in_ch, std::size_t out_ch,
                         Activation act)
    : kernel_(kernel), in_ch_(in_ch), out_ch_(out_ch), act_(act) {
    if (kernel_ == 0 || in_ch_ == 0 || out_ch_ == 0)
        throw ValidationError("conv1d dimensions must be positive");
    weight_.assign(kernel_ * in_ch_ * out_ch_, 0.0);
    bias_.assign(out_ch_, 0.0);
    weight_g_ = weight_;
    bias_g_ = bias_;
}

std::string Conv1dLayer::describe() const {
    std::ostringstream s;
    s << "conv1d " << to_string(act_) << ' ' << kernel_ << ' ' << in_ch_ << ' ' << out_ch_;
    return s.str();
}

Tensor2 Conv1dLayer::run(const Tensor2& input, Cache* cache) const {
    if (input.cols != in_ch_)
        throw DimensionError("conv1d: expected " + std::to_string(in_ch_) + " input channels, got " +
                             std::to_string(input.cols));
    if (input.rows < kernel_)
        throw DimensionError("conv1d: input length " + std::to_string(input.rows) +
                             " shorter than kernel " + std::to_string(kernel_));
    const std::size_t out_len = input.rows - kernel_ + 1;
    Tensor2 pre(out_len, out_ch_);
    for (std::size_t t = 0; t < out_len; ++t) {
        double* out_row = pre.row(t);
        for (std::size_t o = 0; o < out_ch_; ++o) out_row[o] = bias_[o];
        for (std::size_t j = 0; j < kernel_; ++j) {
            const double* in_row = input.row(t + j);
            const double* w = weight_.data() + j * in_ch_ * out_ch_;
            for (std::size_t c = 0; c < in_ch_; ++c) {
                const double x = in_row[c];
                const double* wc = w + c * out_ch_;
                for (std::size_t o = 0; o < out_ch_; ++o) out_row[o] += x * wc[o];
            }
        }
    }
    Tensor2 out = pre;
    apply_activation(out, act_);
    if (cache) {
        cache->input = input;
        cache->pre = std::move(pre);
    }
    return out;
}

Tensor2 Conv1dLayer::forward(const Tensor2& input) {
    has_forward_ = true;
    return run(input, &cache_);
}

Tensor2 Conv1dLayer::infer(const Tensor2& input) const {
    Cache tmp;
    return run(input, &tmp);
}

Tensor2 Conv1dLayer::backward(const Tensor2& grad_out) {
    if (!has_forward_) throw StateError("conv1d backward called without a cached forward");
    const std::size_t out_len = cache_.pre.rows;
    require_shape(grad_out, out_len, out_ch_, "conv1d backward");

    Tensor2 d_pre = grad_out;
    chain_activation(d_pre, cache_.pre, act_);

    Tensor2 d_in(cache_.input.rows, in_ch_);
    for (std::size_t t = 0; t < out_len; ++t) {
        const double* g = d_pre.row(t);
        for (std::size_t o = 0; o < out_ch_; ++o) bias_g_[o] += g[o];
        for (std::size_t j = 0; j < kernel_; ++j) {
            const double* in_row = cache_.input.row(t + j);
            double* din_row = d_in.row(t + j);
            const double* w = weight_.data() + j * in_ch_ * out_ch_;
            double* wg = weight_g_.data() + j * in_ch_ * out_ch_;
            for (std::size_t c = 0; c < in_ch_; ++c) {
                const double x = in_row[c];
                const double* wc = w + c * out_ch_;
                double* wgc = wg + c * out_ch_;
                double acc = 0.0;
                for (std::size_t o = 0; o < out_ch_; ++o) {
                    wgc[o] += x * g[o];
                    acc += wc[o] * g[o];
                }
                din_row[c] += acc;
            }
        }
    }
    return d_in;
}

std::vector<ParamView> Conv1dLayer::parameters() {
    return {{"weight", &weight_, &weight_g_}, {"bias", &bias_, &bias_g_}};
}

void Conv1dLayer::init_params(Rng& rng) {
    glorot_fill(weight_, kernel_ * in_ch_, kernel_ * out_ch_, rng);
    for (double& b : bias_) b = 0.0;
}

// --------------------------------------------------------------------------
// Dense

DenseLayer::DenseLayer(std::size_t in_ch, std::size_t out_ch, Activation act)
    : in_ch_(in_ch), out_ch_(out_ch), act_(act) {
    if (in_ch_ == 0 || out_ch_ == 0) throw ValidationError("dense dimensions must be positive");
    weight_.assign(in_ch_ * out_ch_, 0.0);
    bias_.assign(out_ch_, 0.0);
    weight_g_ = weight_;
    bias_g_ = bias_;
}

std::string DenseLayer::describe() const {
    std::ostringstream s;
    s << "dense " << to_string(act_) << ' ' << in_ch_ << ' ' << out_ch_;
    return s.str();
}

Tensor2 DenseLayer::run(const Tensor2& input, Cache* cache) const {
    if (input.cols != in_ch_)
        throw DimensionError("dense: expected " + std::to_string(in_ch_) + " input channels, got " +
                             std::to_string(input.cols));
    Tensor2 pre(input.rows, out_ch_);
    for (std::size_t t = 0; t < input.rows; ++t) {
        const double* in_row = input.row(t);
        double* out_row = pre.row(t);
        for (std::size_t o = 0; o < out_ch_; ++o) out_row[o] = bias_[o];
        for (std::size_t i = 0; i < in_ch_; ++i) {
            const double x = in_row[i];
            const double* w = weight_.data() + i * out_ch_;
            for (std::size_t o = 0; o < out_ch_; ++o) out_row[o] += x * w[o];
        }
    }
    Tensor2 out = pre;
    apply_activation(out, act_);
    if (cache) {
        cache->input = input;
        cache->pre = std::move(pre);
    }
    return out;
}

Tensor2 DenseLayer::forward(const Tensor2& input) {
    has_forward_ = true;
    return run(input, &cache_);
}

Tensor2 DenseLayer::infer(const Tensor2& input) const {
    Cache tmp;
    return run(input, &tmp);
}

Tensor2 DenseLayer::backward(const Tensor2& grad_out) {
    if (!has_forward_) throw StateError("dense backward called without a cached forward");
    require_shape(grad_out, cache_.input.rows, out_ch_, "dense backward");

    Tensor2 d_pre = grad_out;
    chain_activation(d_pre, cache_.pre, act_);

    Tensor2 d_in(cache_.input.rows, in_ch_);
    for (std::size_t t = 0; t < cache_.input.rows; ++t) {
        const double* g = d_pre.row(t);
        const double* in_row = cache_.input.row(t);
        double* din_row = d_in.row(t);
        for (std::size_t o = 0; o < out_ch_; ++o) bias_g_[o] += g[o];
        for (std::size_t i = 0; i < in_ch_; ++i) {
            const double x = in_row[i];
            const double* w = weight_.data() + i * out_ch_;
            double* wg = weight_g_.data() + i * out_ch_;
            double acc = 0.0;
            for (std::size_t o = 0; o < out_ch_; ++o) {
                wg[o] += x * g[o];
                acc += w[o] * g[o];
            }
            din_row[i] = acc;
        }
    }
    return d_in;
}

std::vector<ParamView> DenseLayer::parameters() {
    return {{"weight", &weight_, &weight_g_}, {"bias", &bias_, &bias_g_}};
}

void DenseLayer::init_params(Rng& rng) {
    glorot_fill(weight_, in_ch_, out_ch_, rng);
    for (double& b : bias_) b = 0.0;
}

// --------------------------------------------------------------------------
// LSTM

LstmLayer::LstmLayer(std::size_t in_ch, std::size_t hidden) : in_ch_(in_ch), hidden_(hidden) {
    if (in_ch_ == 0 || hidden_ == 0) throw ValidationError("lstm dimensions must be positive");
    weight_.assign(4 * (in_ch_ + hidden_) * hidden_, 0.0);
    bias_.assign(4 * hidden_, 0.0);
    weight_g_ = weight_;
    bias_g_ = bias_;
}

std::string LstmLayer::describe() const {
    std::ostringstream s;
    s << "lstm " << in_ch_ << ' ' << hidden_;
    return s.str();
}

Tensor2 LstmLayer::run(const Tensor2& input, Cache* cache) const {
    if (input.cols != in_ch_)
        throw DimensionError("lstm: expected " + std::to_string(in_ch_) + " input channels, got " +
                             std::to_string(input.cols));
    const std::size_t L = input.rows;
    const std::size_t H = hidden_;
    const std::size_t Z = in_ch_ + H;

    Cache local;
    Cache& c = cache ? *cache : local;
    c.input = input;
    c.gi = Tensor2(L, H);
    c.gf = Tensor2(L, H);
    c.gg = Tensor2(L, H);
    c.go = Tensor2(L, H);
    c.cell = Tensor2(L, H);
    c.tanh_cell = Tensor2(L, H);
    c.hidden = Tensor2(L, H);

    std::vector<double> act(4 * H);
    for (std::size_t t = 0; t < L; ++t) {
        for (std::size_t k = 0; k < 4 * H; ++k) act[k] = bias_[k];
        // z_t = [x_t ; h_{t-1}] against each gate's (in+H) x H block.
        for (std::size_t q = 0; q < 4; ++q) {
            const double* block = weight_.data() + q * Z * H;
            double* a = act.data() + q * H;
            const double* x = input.row(t);
            for (std::size_t r = 0; r < in_ch_; ++r) {
                const double xv = x[r];
                const double* w = block + r * H;
                for (std::size_t h = 0; h < H; ++h) a[h] += xv * w[h];
            }
            if (t > 0) {
                const double* hp = c.hidden.row(t - 1);
                for (std::size_t r = 0; r < H; ++r) {
                    const double hv = hp[r];
                    const double* w = block + (in_ch_ + r) * H;
                    for (std::size_t h = 0; h < H; ++h) a[h] += hv * w[h];
                }
            }
        }
        const double* cp = t > 0 ? c.cell.row(t - 1) : nullptr;
        for (std::size_t h = 0; h < H; ++h) {
            const double iv = sigmoid(act[h]);
            const double fv = sigmoid(act[H + h]);
            const double gv = std::tanh(act[2 * H + h]);
            const double ov = sigmoid(act[3 * H + h]);
            const double cv = fv * (cp ? cp[h] : 0.0) + iv * gv;
            const double tc = std::tanh(cv);
            c.gi.at(t, h) = iv;
            c.gf.at(t, h) = fv;
            c.gg.at(t, h) = gv;
            c.go.at(t, h) = ov;
            c.cell.at(t, h) = cv;
            c.tanh_cell.at(t, h) = tc;
            c.hidden.at(t, h) = ov * tc;
        }
    }
    return c.hidden;
}

Tensor2 LstmLayer::forward(const Tensor2& input) {
    has_forward_ = true;
    return run(input, &cache_);
}

Tensor2 LstmLayer::infer(const Tensor2& input) const { return run(input, nullptr); }

Tensor2 LstmLayer::backward(const Tensor2& grad_out) {
    if (!has_forward_) throw StateError("lstm backward called without a cached forward");
    const std::size_t L = cache_.input.rows;
    const std::size_t H = hidden_;
    const std::size_t Z = in_ch_ + H;
    require_shape(grad_out, L, H, "lstm backward");

    Tensor2 d_in(L, in_ch_);
    std::vector<double> dh_next(H, 0.0), dc_next(H, 0.0), dh_acc(H);
    std::vector<double> da(4 * H);

    for (std::size_t t = L; t-- > 0;) {
        const double* gi = cache_.gi.row(t);
        const double* gf = cache_.gf.row(t);
        const double* gg = cache_.gg.row(t);
        const double* go = cache_.go.row(t);
        const double* tc = cache_.tanh_cell.row(t);
        const double* cp = t > 0 ? cache_.cell.row(t - 1) : nullptr;
        const double* g_out = grad_out.row(t);

        for (std::size_t h = 0; h < H; ++h) {
            const double dh = g_out[h] + dh_next[h];
            const double dc = dc_next[h] + dh * go[h] * (1.0 - tc[h] * tc[h]);
            const double do_ = dh * tc[h];
            da[h] = dc * gg[h] * gi[h] * (1.0 - gi[h]);                       // input gate
            da[H + h] = dc * (cp ? cp[h] : 0.0) * gf[h] * (1.0 - gf[h]);      // forget gate
            da[2 * H + h] = dc * gi[h] * (1.0 - gg[h] * gg[h]);               // candidate
            da[3 * H + h] = do_ * go[h] * (1.0 - go[h]);                      // output gate
            dc_next[h] = dc * gf[h];
        }

        const double* x = cache_.input.row(t);
        const double* hp = t > 0 ? cache_.hidden.row(t - 1) : nullptr;
        double* dx = d_in.row(t);
        for (std::size_t h = 0; h < H; ++h) dh_acc[h] = 0.0;

        for (std::size_t q = 0; q < 4; ++q) {
            const double* a = da.data() + q * H;
            const double* block = weight_.data() + q * Z * H;
            double* block_g = weight_g_.data() + q * Z * H;
            double* bg = bias_g_.data() + q * H;
            for (std::size_t h = 0; h < H; ++h) bg[h] += a[h];
            for (std::size_t r = 0; r < in_ch_; ++r) {
                const double xv = x[r];
                const double* w = block + r * H;
                double* wg = block_g + r * H;
                double acc = 0.0;
                for (std::size_t h = 0; h < H; ++h) {
                    wg[h] += xv * a[h];
                    acc += w[h] * a[h];
                }
                dx[r] += acc;
            }
            if (hp) {
                for (std::size_t r = 0; r < H; ++r) {
                    const double hv = hp[r];
                    const double* w = block + (in_ch_ + r) * H;
                    double* wg = block_g + (in_ch_ + r) * H;
                    double acc = 0.0;
                    for (std::size_t h = 0; h < H; ++h) {
                        wg[h] += hv * a[h];
                        acc += w[h] * a[h];
                    }
                    dh_acc[r] += acc;
                }
            }
        }
        dh_next = dh_acc;
    }
    return d_in;
}

std::vector<ParamView> LstmLayer::parameters() {
    return {{"weight", &weight_, &weight_g_}, {"bias", &bias_, &bias_g_}};
}

void LstmLayer::init_params(Rng& rng) {
    glorot_fill(weight_, in_ch_ + hidden_, hidden_, rng);
    for (double& b : bias_) b = 0.0;
    // Forget-gate bias starts at 1 so early training does not flush the cell.
    for (std::size_t h = 0; h < hidden_; ++h) bias_[hidden_ + h] = 1.0;
}

// --------------------------------------------------------------------------
// Reshape

ReshapeLayer::ReshapeLayer(std::size_t out_rows, std::size_t out_cols)
    : out_rows_(out_rows), out_cols_(out_cols) {
    if (out_rows_ == 0 || out_cols_ == 0)
        throw ValidationError("reshape dimensions must be positive");
}

std::string ReshapeLayer::describe() const {
    std::ostringstream s;
    s << "reshape " << out_rows_ << ' ' << out_cols_;
    return s.str();
}

Tensor2 ReshapeLayer::run(const Tensor2& input) const {
    if (input.rows * input.cols != out_rows_ * out_cols_)
        throw DimensionError("reshape: cannot view " + std::to_string(input.rows) + "x" +
                             std::to_string(input.cols) + " as " + std::to_string(out_rows_) +
                             "x" + std::to_string(out_cols_));
    Tensor2 out(out_rows_, out_cols_);
    out.data = input.data;
    return out;
}

Tensor2 ReshapeLayer::forward(const Tensor2& input) {
    has_forward_ = true;
    in_rows_ = input.rows;
    in_cols_ = input.cols;
    return run(input);
}

Tensor2 ReshapeLayer::infer(const Tensor2& input) const { return run(input); }

Tensor2 ReshapeLayer::backward(const Tensor2& grad_out) {
    if (!has_forward_) throw StateError("reshape backward called without a cached forward");
    require_shape(grad_out, out_rows_, out_cols_, "reshape backward");
    Tensor2 d_in(in_rows_, in_cols_);
    d_in.data = grad_out.data;
    return d_in;
}

// --------------------------------------------------------------------------

std::unique_ptr<Layer> layer_from_description(const std::string& line) {
    std::istringstream s(line);
    std::string kind;
    s >> kind;
    if (kind == "conv1d") {
        std::string act;
        std::size_t k, cin, cout;
        if (!(s >> act >> k >> cin >> cout)) throw FormatError("bad conv1d description: " + line);
        return std::make_unique<Conv1dLayer>(k, cin, cout, activation_from_string(act));
    }
    if (kind == "dense") {
        std::string act;
        std::size_t cin, cout;
        if (!(s >> act >> cin >> cout)) throw FormatError("bad dense description: " + line);
        return std::make_unique<DenseLayer>(cin, cout, activation_from_string(act));
    }
    if (kind == "lstm") {
        std::size_t cin, hidden;
        if (!(s >> cin >> hidden)) throw FormatError("bad lstm description: " + line);
        return std::make_unique<LstmLayer>(cin, hidden);
    }
    if (kind == "reshape") {
        std::size_t r, c;
        if (!(s >> r >> c)) throw FormatError("bad reshape description: " + line);
        return std::make_unique<ReshapeLayer>(r, c);
    }
    throw FormatError("unknown layer kind '" + kind + "'");
}

}  // namespace eyelstm

#include "eyelstm/network.hpp"

#include <algorithm>
#include <cmath>

namespace eyelstm {

void Network::check_input(const Tensor2& input) const {
    if (input_rows_ != 0 && input.rows != input_rows_)
        throw DimensionError("network input: expected " + std::to_string(input_rows_) +
                             " rows, got " + std::to_string(input.rows));
}

Tensor2 Network::forward(const Tensor2& input) {
    check_input(input);
    Tensor2 x = input;
    for (auto& layer : layers_) x = layer->forward(x);
    has_forward_ = true;
    return x;
}

Tensor2 Network::infer(const Tensor2& input) const {
    check_input(input);
    Tensor2 x = input;
    for (const auto& layer : layers_) x = layer->infer(x);
    return x;
}

Tensor2 Network::backward(const Tensor2& loss_grad) {
    if (!has_forward_) throw StateError("backward called without a cached forward");
    Tensor2 g = loss_grad;
    for (std::size_t i = layers_.size(); i-- > 0;) g = layers_[i]->backward(g);
    return g;
}

std::vector<ParamView> Network::parameters() {
    std::vector<ParamView> out;
    for (auto& layer : layers_)
        for (ParamView& p : layer->parameters()) out.push_back(p);
    return out;
}

std::size_t Network::param_count() const {
    std::size_t n = 0;
    for (const auto& layer : layers_)
        for (const ParamView& p : const_cast<Layer&>(*layer).parameters()) n += p.values->size();
    return n;
}

void Network::zero_grads() {
    for (auto& layer : layers_) layer->zero_grads();
}

void Network::init_params(Rng& rng) {
    for (auto& layer : layers_) layer->init_params(rng);
}

std::vector<std::vector<double>> Network::snapshot_params() {
    std::vector<std::vector<double>> out;
    for (ParamView& p : parameters()) out.push_back(*p.values);
    return out;
}

void Network::restore_params(const std::vector<std::vector<double>>& snapshot) {
    auto params = parameters();
    if (snapshot.size() != params.size())
        throw DimensionError("parameter snapshot has wrong array count");
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (snapshot[i].size() != params[i].values->size())
            throw DimensionError("parameter snapshot array size mismatch");
        *params[i].values = snapshot[i];
    }
}

double mse_loss(const Tensor2& pred, const Tensor2& label, std::size_t mask_tail) {
    if (!pred.same_shape(label)) throw DimensionError("mse: prediction/label shape mismatch");
    if (mask_tail >= pred.rows) throw DimensionError("mse: mask covers the whole tensor");
    const std::size_t rows = pred.rows - mask_tail;
    double acc = 0.0;
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < pred.cols; ++c) {
            const double d = pred.at(r, c) - label.at(r, c);
            acc += d * d;
        }
    return acc / static_cast<double>(rows * pred.cols);
}

Tensor2 mse_loss_grad(const Tensor2& pred, const Tensor2& label, double denom,
                      std::size_t mask_tail) {
    if (!pred.same_shape(label)) throw DimensionError("mse grad: shape mismatch");
    if (mask_tail >= pred.rows) throw DimensionError("mse grad: mask covers the whole tensor");
    Tensor2 g(pred.rows, pred.cols);
    const std::size_t rows = pred.rows - mask_tail;
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < pred.cols; ++c)
            g.at(r, c) = 2.0 * (pred.at(r, c) - label.at(r, c)) / denom;
    return g;
}

double grad_check(Network& net, const Tensor2& input, const Tensor2& label, double epsilon,
                  std::size_t max_params, std::uint64_t seed) {
    if (epsilon < 1e-7 || epsilon > 1e-3)
        throw ValidationError("grad_check epsilon must lie in [1e-7, 1e-3]");

    net.zero_grads();
    Tensor2 pred = net.forward(input);
    const double loss0 = mse_loss(pred, label);
    if (!std::isfinite(loss0)) throw NumericError("grad_check: non-finite loss");
    net.backward(mse_loss_grad(pred, label, static_cast<double>(pred.size())));

    auto params = net.parameters();
    std::vector<std::vector<double>> analytic;
    analytic.reserve(params.size());
    for (ParamView& p : params) analytic.push_back(*p.grads);

    // Pick the indices to probe: everything, or a seeded subset with a
    // minimum quota per array so no layer escapes coverage.
    std::vector<std::vector<std::size_t>> picks(params.size());
    std::size_t total = 0;
    for (const ParamView& p : params) total += p.values->size();
    if (max_params == 0 || total <= max_params) {
        for (std::size_t a = 0; a < params.size(); ++a) {
            picks[a].resize(params[a].values->size());
            for (std::size_t i = 0; i < picks[a].size(); ++i) picks[a][i] = i;
        }
    } else {
        Rng rng(seed, 0x6c5a);
        for (std::size_t a = 0; a < params.size(); ++a) {
            const std::size_t n = params[a].values->size();
            std::size_t quota = std::max<std::size_t>(
                std::min<std::size_t>(n, 8), max_params * n / total);
            quota = std::min(quota, n);
            std::vector<std::size_t> idx(n);
            for (std::size_t i = 0; i < n; ++i) idx[i] = i;
            rng.shuffle(idx);
            idx.resize(quota);
            std::sort(idx.begin(), idx.end());
            picks[a] = std::move(idx);
        }
    }

    double max_rel = 0.0;
    for (std::size_t a = 0; a < params.size(); ++a) {
        std::vector<double>& values = *params[a].values;
        for (std::size_t i : picks[a]) {
            const double saved = values[i];
            values[i] = saved + epsilon;
            const double lp = mse_loss(net.infer(input), label);
            values[i] = saved - epsilon;
            const double lm = mse_loss(net.infer(input), label);
            values[i] = saved;
            if (!std::isfinite(lp) || !std::isfinite(lm))
                throw NumericError("grad_check: non-finite perturbed loss");
            const double numeric = (lp - lm) / (2.0 * epsilon);
            const double a_val = analytic[a][i];
            const double rel =
                std::abs(a_val - numeric) / std::max(1e-12, std::abs(a_val) + std::abs(numeric));
            max_rel = std::max(max_rel, rel);
        }
    }
    return max_rel;
}

}  // namespace eyelstm

#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "eyelstm/layers.hpp"

namespace eyelstm {

// An ordered stack of layers trained end to end.
class Network {
public:
    Network() = default;
    Network(Network&&) = default;
    Network& operator=(Network&&) = default;
    Network(const Network&) = delete;
    Network& operator=(const Network&) = delete;

    void add(std::unique_ptr<Layer> layer) { layers_.push_back(std::move(layer)); }

    // Builders pin the time length their stack was sized for (30 for the
    // padded conv front end, 24 otherwise); forward/infer then reject
    // anything else.
    void set_input_rows(std::size_t rows) { input_rows_ = rows; }
    std::size_t input_rows() const { return input_rows_; }

    std::size_t size() const { return layers_.size(); }
    Layer& layer(std::size_t i) { return *layers_[i]; }
    const Layer& layer(std::size_t i) const { return *layers_[i]; }

    // Training-path forward; caches per-layer state for backward().
    Tensor2 forward(const Tensor2& input);
    // Cache-free forward; safe on shared const networks.
    Tensor2 infer(const Tensor2& input) const;
    // Accumulates parameter gradients; returns grad w.r.t. the input.
    Tensor2 backward(const Tensor2& loss_grad);

    std::vector<ParamView> parameters();
    std::size_t param_count() const;
    void zero_grads();
    void init_params(Rng& rng);

    // Deep copies of the parameter arrays, in layer order (a gradient
    // snapshot uses the same layout).
    std::vector<std::vector<double>> snapshot_params();
    void restore_params(const std::vector<std::vector<double>>& snapshot);

private:
    void check_input(const Tensor2& input) const;

    std::vector<std::unique_ptr<Layer>> layers_;
    std::size_t input_rows_ = 0;  // 0 = unconstrained
    bool has_forward_ = false;
};

// Mean squared error over all elements, excluding the last mask_tail
// rows (replicated padding steps).
double mse_loss(const Tensor2& pred, const Tensor2& label, std::size_t mask_tail = 0);

// Loss gradient w.r.t. pred for a loss that is summed-squared-error
// scaled by 1/denom; masked rows get zero gradient. Training uses
// denom = total unmasked element count across the minibatch.
Tensor2 mse_loss_grad(const Tensor2& pred, const Tensor2& label, double denom,
                      std::size_t mask_tail = 0);

// Central-finite-difference check of every analytic parameter gradient
// (or a seeded subset of max_params of them, at least a few per array).
// Returns the maximum relative error |a - n| / max(1e-12, |a| + |n|).
// epsilon must lie in [1e-7, 1e-3].
double grad_check(Network& net, const Tensor2& input, const Tensor2& label, double epsilon,
                  std::size_t max_params = 0, std::uint64_t seed = 0);

}  // namespace eyelstm

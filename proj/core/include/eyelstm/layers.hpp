#pragma once

#include <memory>
#include <string>
#include <vector>

#include "eyelstm/rng.hpp"
#include "eyelstm/tensor.hpp"

namespace eyelstm {

enum class Activation { linear, relu };
enum class LayerKind { conv1d, dense, lstm, reshape };

// Mutable view of one named parameter array and its gradient accumulator.
struct ParamView {
    std::string name;
    std::vector<double>* values = nullptr;
    std::vector<double>* grads = nullptr;
};

// A differentiable layer. forward() caches whatever backward() needs;
// infer() is the same math without touching the training cache, so a
// trained network can be shared read-only across threads.
class Layer {
public:
    virtual ~Layer() = default;

    virtual LayerKind kind() const = 0;
    // One-line structural description, also the serialization form,
    // e.g. "conv1d relu 3 2 16".
    virtual std::string describe() const = 0;

    virtual Tensor2 forward(const Tensor2& input) = 0;
    virtual Tensor2 infer(const Tensor2& input) const = 0;
    // Gradient of the loss w.r.t. this layer's input; accumulates
    // parameter gradients. Requires a cached forward.
    virtual Tensor2 backward(const Tensor2& grad_out) = 0;

    virtual std::vector<ParamView> parameters() { return {}; }
    virtual void init_params(Rng&) {}

    bool has_forward_state() const { return has_forward_; }
    void zero_grads();

protected:
    bool has_forward_ = false;
};

std::string to_string(Activation a);
Activation activation_from_string(const std::string& s);

// Valid (no padding) 1-D cross-correlation over the time axis:
// out[t][o] = bias[o] + sum_{j<k} sum_c in[t+j][c] * w[j][c][o],
// output length L-k+1, optional ReLU applied inside the layer.
class Conv1dLayer : public Layer {
public:
    Conv1dLayer(std::size_t kernel, std::size_t in_ch, std::size_t out_ch, Activation act);

    LayerKind kind() const override { return LayerKind::conv1d; }
    std::string describe() const override;
    Tensor2 forward(const Tensor2& input) override;
    Tensor2 infer(const Tensor2& input) const override;
    Tensor2 backward(const Tensor2& grad_out) override;
    std::vector<ParamView> parameters() override;
    void init_params(Rng& rng) override;

    std::size_t kernel() const { return kernel_; }

private:
    struct Cache {
        Tensor2 input;
        Tensor2 pre;  // pre-activation outputs
    };
    Tensor2 run(const Tensor2& input, Cache* cache) const;

    std::size_t kernel_, in_ch_, out_ch_;
    Activation act_;
    std::vector<double> weight_, bias_;        // weight[(j*in_ch + c)*out_ch + o]
    std::vector<double> weight_g_, bias_g_;
    Cache cache_;
};

// Per-timestep affine map out[t] = in[t] * W + b, optional ReLU.
class DenseLayer : public Layer {
public:
    DenseLayer(std::size_t in_ch, std::size_t out_ch, Activation act);

    LayerKind kind() const override { return LayerKind::dense; }
    std::string describe() const override;
    Tensor2 forward(const Tensor2& input) override;
    Tensor2 infer(const Tensor2& input) const override;
    Tensor2 backward(const Tensor2& grad_out) override;
    std::vector<ParamView> parameters() override;
    void init_params(Rng& rng) override;

private:
    struct Cache {
        Tensor2 input;
        Tensor2 pre;
    };
    Tensor2 run(const Tensor2& input, Cache* cache) const;

    std::size_t in_ch_, out_ch_;
    Activation act_;
    std::vector<double> weight_, bias_;        // weight[i*out_ch + o]
    std::vector<double> weight_g_, bias_g_;
    Cache cache_;
};

// Single-layer LSTM over the time axis, zero initial hidden/cell state,
// returns the hidden state at every timestep. Gate order in the packed
// weight array is (input, forget, candidate, output); each gate block is
// an (in+hidden) x hidden matrix over z_t = [x_t ; h_{t-1}].
class LstmLayer : public Layer {
public:
    LstmLayer(std::size_t in_ch, std::size_t hidden);

    LayerKind kind() const override { return LayerKind::lstm; }
    std::string describe() const override;
    Tensor2 forward(const Tensor2& input) override;
    Tensor2 infer(const Tensor2& input) const override;
    Tensor2 backward(const Tensor2& grad_out) override;
    std::vector<ParamView> parameters() override;
    void init_params(Rng& rng) override;

    std::size_t hidden() const { return hidden_; }

private:
    struct Cache {
        Tensor2 input;
        Tensor2 gi, gf, gg, go;  // post-nonlinearity gate values, L x H
        Tensor2 cell, tanh_cell, hidden;
    };
    Tensor2 run(const Tensor2& input, Cache* cache) const;

    std::size_t in_ch_, hidden_;
    std::vector<double> weight_, bias_;  // weight[4][(in+H)][H] packed, bias[4][H]
    std::vector<double> weight_g_, bias_g_;
    Cache cache_;
};

// Reinterprets the (rows, cols) shape; element order is unchanged.
// Used to flatten a window for the MLP head and to reshape it back.
class ReshapeLayer : public Layer {
public:
    ReshapeLayer(std::size_t out_rows, std::size_t out_cols);

    LayerKind kind() const override { return LayerKind::reshape; }
    std::string describe() const override;
    Tensor2 forward(const Tensor2& input) override;
    Tensor2 infer(const Tensor2& input) const override;
    Tensor2 backward(const Tensor2& grad_out) override;

private:
    Tensor2 run(const Tensor2& input) const;

    std::size_t out_rows_, out_cols_;
    std::size_t in_rows_ = 0, in_cols_ = 0;
};

// Parses a describe() line back into a layer.
std::unique_ptr<Layer> layer_from_description(const std::string& line);

}  // namespace eyelstm

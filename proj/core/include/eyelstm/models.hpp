#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "eyelstm/network.hpp"
#include "eyelstm/preprocess.hpp"

namespace eyelstm {

enum class ModelKind { eyelstm, mlp, dlstm };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& s);

struct ModelConfig {
    ModelKind kind = ModelKind::eyelstm;
    // Channel plan of the three convolutions (input is always 2 channels)
    // and the width of the dense layer feeding the LSTM.
    std::array<std::size_t, 3> conv_channels = {16, 32, 32};
    std::size_t dense_width = 32;
    std::size_t mlp_hidden = 64;
    std::size_t lstm_hidden = 64;
    double learning_rate = 1e-3;
    std::size_t epochs = 200;
    std::size_t restarts = 5;
    std::size_t minibatch = 8;
    std::uint64_t seed = 1;
    std::size_t patience = 20;

    void validate() const;
};

// One training pair: network input (Padded30 for eyelstm, Window24
// otherwise) and a 24x2 normalized ground-truth window. mask_tail
// replicated trailing steps are excluded from the loss.
struct TrainSample {
    Tensor2 input;
    Tensor2 label;
    std::size_t mask_tail = 0;
};

struct TrainedModel {
    ModelConfig config;
    Network net;
    std::vector<double> train_history;   // per-epoch training loss of the kept restart
    std::vector<double> val_history;     // per-epoch validation loss of the kept restart
    std::vector<double> restart_val_losses;  // best val loss of every restart, by index
    double val_loss = 0.0;
};

// Exactly 24 predicted (x, y) steps from one stream's network.
struct WindowPrediction {
    std::array<Point, kWindowLen> steps{};
    enum class Source { eye, track } source = Source::eye;
};

Tensor2 to_tensor(const Window24& w);
Tensor2 to_tensor(const Padded30& p);

// conv(k3,2->16,relu) conv(k3,16->32,relu) conv(k3,32->32,relu)
// dense(32->32,relu) lstm(32->hidden) dense(hidden->2,linear);
// maps a 30x2 padded window to 24x2.
Network build_eyelstm(const ModelConfig& cfg);
// flatten(24x2 -> 1x48) dense(48->64,relu) dense(64->64,relu)
// dense(64->48,linear) reshape(24x2); consumes an unpadded window.
Network build_mlp(const ModelConfig& cfg);
// lstm(2->64) lstm(64->64) lstm(64->64) dense(64->2,linear) over an
// unpadded 24-step window.
Network build_dlstm(const ModelConfig& cfg);
Network build_model(const ModelConfig& cfg);

// Expected network input shape (rows x 2) for the kind.
std::size_t input_len_for(ModelKind kind);

// Minibatch-Adam training with cfg.restarts independent seeded
// initializations, early stopping on a held-out validation split, and
// selection of the restart with the lowest validation loss.
TrainedModel train(Network net, const std::vector<TrainSample>& dataset, const ModelConfig& cfg);

WindowPrediction predict(const TrainedModel& model, const Tensor2& input,
                         WindowPrediction::Source source = WindowPrediction::Source::eye);

// Text format, magic line "EYELSTM-MODEL v1"; round-trips every
// parameter bit-exactly.
void save_model(std::ostream& out, const TrainedModel& model);
TrainedModel load_model(std::istream& in);
void save_model_file(const std::string& path, const TrainedModel& model);
TrainedModel load_model_file(const std::string& path);

}  // namespace eyelstm

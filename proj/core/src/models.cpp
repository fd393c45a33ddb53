#include "eyelstm/models.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "eyelstm/adam.hpp"
#include "eyelstm/io.hpp"

namespace eyelstm {

std::string to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::eyelstm: return "eyelstm";
        case ModelKind::mlp: return "mlp";
        case ModelKind::dlstm: return "dlstm";
    }
    throw ValidationError("unknown model kind");
}

ModelKind model_kind_from_string(const std::string& s) {
    if (s == "eyelstm") return ModelKind::eyelstm;
    if (s == "mlp") return ModelKind::mlp;
    if (s == "dlstm") return ModelKind::dlstm;
    throw ValidationError("unknown model kind '" + s + "'");
}

void ModelConfig::validate() const {
    for (std::size_t c : conv_channels)
        if (c == 0) throw ValidationError("conv channel counts must be positive");
    if (dense_width == 0 || mlp_hidden == 0 || lstm_hidden == 0)
        throw ValidationError("layer widths must be positive");
    if (learning_rate <= 0.0) throw ValidationError("learning rate must be positive");
    if (epochs == 0 || minibatch == 0 || patience == 0)
        throw ValidationError("epochs, minibatch and patience must be positive");
    if (restarts == 0 || restarts > 100)
        throw ValidationError("restarts must lie in [1, 100]");
}

Tensor2 to_tensor(const Window24& w) {
    Tensor2 t(kWindowLen, 2);
    for (std::size_t i = 0; i < kWindowLen; ++i) {
        t.at(i, 0) = w.steps[i].x;
        t.at(i, 1) = w.steps[i].y;
    }
    return t;
}

Tensor2 to_tensor(const Padded30& p) {
    Tensor2 t(kPaddedLen, 2);
    for (std::size_t i = 0; i < kPaddedLen; ++i) {
        t.at(i, 0) = p.steps[i].x;
        t.at(i, 1) = p.steps[i].y;
    }
    return t;
}

Network build_eyelstm(const ModelConfig& cfg) {
    if (cfg.kind != ModelKind::eyelstm) throw ConfigError("build_eyelstm: config kind mismatch");
    cfg.validate();
    Network net;
    net.add(std::make_unique<Conv1dLayer>(3, 2, cfg.conv_channels[0], Activation::relu));
    net.add(std::make_unique<Conv1dLayer>(3, cfg.conv_channels[0], cfg.conv_channels[1],
                                          Activation::relu));
    net.add(std::make_unique<Conv1dLayer>(3, cfg.conv_channels[1], cfg.conv_channels[2],
                                          Activation::relu));
    net.add(std::make_unique<DenseLayer>(cfg.conv_channels[2], cfg.dense_width, Activation::relu));
    net.add(std::make_unique<LstmLayer>(cfg.dense_width, cfg.lstm_hidden));
    net.add(std::make_unique<DenseLayer>(cfg.lstm_hidden, 2, Activation::linear));
    net.set_input_rows(kPaddedLen);
    return net;
}

Network build_mlp(const ModelConfig& cfg) {
    if (cfg.kind != ModelKind::mlp) throw ConfigError("build_mlp: config kind mismatch");
    cfg.validate();
    const std::size_t flat = kWindowLen * 2;
    Network net;
    net.add(std::make_unique<ReshapeLayer>(1, flat));
    net.add(std::make_unique<DenseLayer>(flat, cfg.mlp_hidden, Activation::relu));
    net.add(std::make_unique<DenseLayer>(cfg.mlp_hidden, cfg.mlp_hidden, Activation::relu));
    net.add(std::make_unique<DenseLayer>(cfg.mlp_hidden, flat, Activation::linear));
    net.add(std::make_unique<ReshapeLayer>(kWindowLen, 2));
    net.set_input_rows(kWindowLen);
    return net;
}

Network build_dlstm(const ModelConfig& cfg) {
    if (cfg.kind != ModelKind::dlstm) throw ConfigError("build_dlstm: config kind mismatch");
    cfg.validate();
    Network net;
    net.add(std::make_unique<LstmLayer>(2, cfg.lstm_hidden));
    net.add(std::make_unique<LstmLayer>(cfg.lstm_hidden, cfg.lstm_hidden));
    net.add(std::make_unique<LstmLayer>(cfg.lstm_hidden, cfg.lstm_hidden));
    net.add(std::make_unique<DenseLayer>(cfg.lstm_hidden, 2, Activation::linear));
    net.set_input_rows(kWindowLen);
    return net;
}

Network build_model(const ModelConfig& cfg) {
    switch (cfg.kind) {
        case ModelKind::eyelstm: return build_eyelstm(cfg);
        case ModelKind::mlp: return build_mlp(cfg);
        case ModelKind::dlstm: return build_dlstm(cfg);
    }
    throw ConfigError("unknown model kind");
}

std::size_t input_len_for(ModelKind kind) {
    return kind == ModelKind::eyelstm ? kPaddedLen : kWindowLen;
}

namespace {

struct RestartResult {
    std::vector<std::vector<double>> best_params;
    std::vector<double> train_history;
    std::vector<double> val_history;
    double best_val = std::numeric_limits<double>::infinity();
};

// Loss over a set of samples: pooled mean over all unmasked elements.
double dataset_loss(Network& net, const std::vector<TrainSample>& dataset,
                    const std::vector<std::size_t>& indices) {
    double acc = 0.0;
    std::size_t count = 0;
    for (std::size_t idx : indices) {
        const TrainSample& s = dataset[idx];
        Tensor2 pred = net.infer(s.input);
        const std::size_t rows = s.label.rows - s.mask_tail;
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = 0; c < s.label.cols; ++c) {
                const double d = pred.at(r, c) - s.label.at(r, c);
                acc += d * d;
            }
        count += rows * s.label.cols;
    }
    return acc / static_cast<double>(count);
}

RestartResult run_restart(Network& net, const std::vector<TrainSample>& dataset,
                          const std::vector<std::size_t>& train_idx,
                          const std::vector<std::size_t>& val_idx, const ModelConfig& cfg,
                          std::size_t restart_index) {
    Rng rng(cfg.seed, 1000 + restart_index);
    net.init_params(rng);

    AdamConfig adam_cfg;
    adam_cfg.lr = cfg.learning_rate;
    AdamState state;
    auto params = net.parameters();
    state.init_like(params);

    RestartResult result;
    result.best_params = net.snapshot_params();
    std::vector<std::size_t> order = train_idx;
    std::size_t epochs_since_best = 0;

    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        rng.shuffle(order);
        double epoch_acc = 0.0;
        std::size_t epoch_count = 0;
        for (std::size_t b = 0; b < order.size(); b += cfg.minibatch) {
            const std::size_t end = std::min(order.size(), b + cfg.minibatch);
            // Pooled element count fixes the gradient scale for the batch.
            std::size_t denom = 0;
            for (std::size_t k = b; k < end; ++k) {
                const TrainSample& s = dataset[order[k]];
                denom += (s.label.rows - s.mask_tail) * s.label.cols;
            }
            net.zero_grads();
            double batch_acc = 0.0;
            for (std::size_t k = b; k < end; ++k) {
                const TrainSample& s = dataset[order[k]];
                Tensor2 pred = net.forward(s.input);
                require_shape(pred, s.label.rows, s.label.cols, "training prediction");
                const std::size_t rows = s.label.rows - s.mask_tail;
                for (std::size_t r = 0; r < rows; ++r)
                    for (std::size_t c = 0; c < s.label.cols; ++c) {
                        const double d = pred.at(r, c) - s.label.at(r, c);
                        batch_acc += d * d;
                    }
                net.backward(mse_loss_grad(pred, s.label, static_cast<double>(denom), s.mask_tail));
            }
            const double batch_loss = batch_acc / static_cast<double>(denom);
            if (!std::isfinite(batch_loss))
                throw DivergenceError("training loss became non-finite",
                                      static_cast<int>(epoch));
            adam_step(params, state, adam_cfg);
            epoch_acc += batch_acc;
            epoch_count += denom;
        }
        const double train_loss = epoch_acc / static_cast<double>(epoch_count);
        const double val_loss = dataset_loss(net, dataset, val_idx);
        if (!std::isfinite(val_loss))
            throw DivergenceError("validation loss became non-finite", static_cast<int>(epoch));
        result.train_history.push_back(train_loss);
        result.val_history.push_back(val_loss);

        if (val_loss < result.best_val) {
            result.best_val = val_loss;
            result.best_params = net.snapshot_params();
            epochs_since_best = 0;
        } else if (++epochs_since_best >= cfg.patience) {
            break;
        }
    }
    return result;
}

}  // namespace

TrainedModel train(Network net, const std::vector<TrainSample>& dataset, const ModelConfig& cfg) {
    cfg.validate();
    if (dataset.empty()) throw ValidationError("training dataset is empty");
    const std::size_t want_rows = input_len_for(cfg.kind);
    for (const TrainSample& s : dataset) {
        require_shape(s.input, want_rows, 2, "training input");
        require_shape(s.label, kWindowLen, 2, "training label");
        if (s.mask_tail >= kWindowLen) throw ValidationError("mask_tail must leave real steps");
    }

    // 80/20 split by window index, seeded shuffle shared by all restarts.
    // Too-small datasets validate on the training set itself.
    std::vector<std::size_t> indices(dataset.size());
    for (std::size_t i = 0; i < indices.size(); ++i) indices[i] = i;
    Rng split_rng(cfg.seed, 7);
    split_rng.shuffle(indices);
    const std::size_t val_count = dataset.size() / 5;
    std::vector<std::size_t> val_idx(indices.begin(), indices.begin() + val_count);
    std::vector<std::size_t> train_idx(indices.begin() + val_count, indices.end());
    if (val_idx.empty()) val_idx = train_idx;

    TrainedModel model;
    model.config = cfg;
    model.net = std::move(net);

    std::size_t best_restart = 0;
    RestartResult best;
    for (std::size_t r = 0; r < cfg.restarts; ++r) {
        RestartResult result = run_restart(model.net, dataset, train_idx, val_idx, cfg, r);
        model.restart_val_losses.push_back(result.best_val);
        if (r == 0 || result.best_val < best.best_val) {
            best_restart = r;
            best = std::move(result);
        }
    }
    (void)best_restart;

    model.net.restore_params(best.best_params);
    model.train_history = std::move(best.train_history);
    model.val_history = std::move(best.val_history);
    model.val_loss = best.best_val;
    return model;
}

WindowPrediction predict(const TrainedModel& model, const Tensor2& input,
                         WindowPrediction::Source source) {
    require_shape(input, input_len_for(model.config.kind), 2, "predict input");
    Tensor2 out = model.net.infer(input);
    require_shape(out, kWindowLen, 2, "predict output");
    WindowPrediction p;
    p.source = source;
    for (std::size_t i = 0; i < kWindowLen; ++i) p.steps[i] = {out.at(i, 0), out.at(i, 1)};
    return p;
}

// --------------------------------------------------------------------------
// Persistence

namespace {

constexpr const char* kMagic = "EYELSTM-MODEL v1";

void write_array(std::ostream& out, const std::string& name, const std::vector<double>& values) {
    out << "param " << name << ' ' << values.size() << '\n';
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out << ' ';
        out << format_double(values[i]);
    }
    out << '\n';
}

std::string expect_token(std::istream& in, const char* context) {
    std::string tok;
    if (!(in >> tok)) throw FormatError(std::string("truncated model file (") + context + ")");
    return tok;
}

double expect_number(std::istream& in, const char* context) {
    double v;
    if (!(in >> v)) throw FormatError(std::string("truncated model file (") + context + ")");
    return v;
}

void expect_keyword(std::istream& in, const std::string& want) {
    std::string tok = expect_token(in, want.c_str());
    if (tok != want)
        throw FormatError("model file: expected '" + want + "', got '" + tok + "'");
}

std::vector<double> read_array(std::istream& in, const std::string& want_name,
                               std::size_t want_size) {
    expect_keyword(in, "param");
    const std::string name = expect_token(in, "param name");
    if (name != want_name)
        throw ValidationError("model file: expected array '" + want_name + "', got '" + name + "'");
    const auto count = static_cast<std::size_t>(expect_number(in, "param size"));
    if (count != want_size)
        throw ValidationError("model file: array '" + name + "' has size " +
                              std::to_string(count) + ", expected " + std::to_string(want_size));
    std::vector<double> values(count);
    for (double& v : values) v = expect_number(in, "param value");
    return values;
}

std::vector<double> read_series(std::istream& in, const std::string& keyword) {
    expect_keyword(in, keyword);
    const auto count = static_cast<std::size_t>(expect_number(in, keyword.c_str()));
    std::vector<double> values(count);
    for (double& v : values) v = expect_number(in, keyword.c_str());
    return values;
}

}  // namespace

void save_model(std::ostream& out, const TrainedModel& model) {
    const ModelConfig& cfg = model.config;
    out << kMagic << '\n';
    out << "kind " << to_string(cfg.kind) << '\n';
    out << "conv_channels " << cfg.conv_channels[0] << ' ' << cfg.conv_channels[1] << ' '
        << cfg.conv_channels[2] << '\n';
    out << "dense_width " << cfg.dense_width << '\n';
    out << "mlp_hidden " << cfg.mlp_hidden << '\n';
    out << "lstm_hidden " << cfg.lstm_hidden << '\n';
    out << "learning_rate " << format_double(cfg.learning_rate) << '\n';
    out << "epochs " << cfg.epochs << '\n';
    out << "restarts " << cfg.restarts << '\n';
    out << "minibatch " << cfg.minibatch << '\n';
    out << "seed " << cfg.seed << '\n';
    out << "patience " << cfg.patience << '\n';

    Network& net = const_cast<Network&>(model.net);
    out << "layers " << net.size() << '\n';
    for (std::size_t i = 0; i < net.size(); ++i) {
        out << "layer " << net.layer(i).describe() << '\n';
        for (ParamView& p : net.layer(i).parameters()) write_array(out, p.name, *p.values);
    }

    out << "val_loss " << format_double(model.val_loss) << '\n';
    out << "restart_val_losses " << model.restart_val_losses.size();
    for (double v : model.restart_val_losses) out << ' ' << format_double(v);
    out << '\n';
    out << "train_history " << model.train_history.size();
    for (double v : model.train_history) out << ' ' << format_double(v);
    out << '\n';
    out << "val_history " << model.val_history.size();
    for (double v : model.val_history) out << ' ' << format_double(v);
    out << '\n';
    out << "end\n";
}

TrainedModel load_model(std::istream& in) {
    std::string magic;
    if (!std::getline(in, magic)) throw FormatError("empty model file");
    if (!magic.empty() && magic.back() == '\r') magic.pop_back();
    if (magic != kMagic) {
        if (magic.rfind("EYELSTM-MODEL", 0) == 0)
            throw FormatError("unsupported model version '" + magic + "'");
        throw FormatError("not a model file (bad magic line)");
    }

    ModelConfig cfg;
    expect_keyword(in, "kind");
    cfg.kind = model_kind_from_string(expect_token(in, "kind"));
    expect_keyword(in, "conv_channels");
    for (std::size_t& c : cfg.conv_channels)
        c = static_cast<std::size_t>(expect_number(in, "conv_channels"));
    expect_keyword(in, "dense_width");
    cfg.dense_width = static_cast<std::size_t>(expect_number(in, "dense_width"));
    expect_keyword(in, "mlp_hidden");
    cfg.mlp_hidden = static_cast<std::size_t>(expect_number(in, "mlp_hidden"));
    expect_keyword(in, "lstm_hidden");
    cfg.lstm_hidden = static_cast<std::size_t>(expect_number(in, "lstm_hidden"));
    expect_keyword(in, "learning_rate");
    cfg.learning_rate = expect_number(in, "learning_rate");
    expect_keyword(in, "epochs");
    cfg.epochs = static_cast<std::size_t>(expect_number(in, "epochs"));
    expect_keyword(in, "restarts");
    cfg.restarts = static_cast<std::size_t>(expect_number(in, "restarts"));
    expect_keyword(in, "minibatch");
    cfg.minibatch = static_cast<std::size_t>(expect_number(in, "minibatch"));
    expect_keyword(in, "seed");
    std::uint64_t seed;
    if (!(in >> seed)) throw FormatError("truncated model file (seed)");
    cfg.seed = seed;
    expect_keyword(in, "patience");
    cfg.patience = static_cast<std::size_t>(expect_number(in, "patience"));

    TrainedModel model;
    model.config = cfg;
    model.net = build_model(cfg);

    expect_keyword(in, "layers");
    const auto n_layers = static_cast<std::size_t>(expect_number(in, "layer count"));
    if (n_layers != model.net.size())
        throw ValidationError("model file: layer count " + std::to_string(n_layers) +
                              " does not match architecture (" + std::to_string(model.net.size()) +
                              ")");
    for (std::size_t i = 0; i < n_layers; ++i) {
        expect_keyword(in, "layer");
        std::string desc;
        // describe() lines are space-separated tokens up to end of line.
        std::getline(in >> std::ws, desc);
        if (!desc.empty() && desc.back() == '\r') desc.pop_back();
        if (desc != model.net.layer(i).describe())
            throw ValidationError("model file: layer " + std::to_string(i) + " is '" + desc +
                                  "', expected '" + model.net.layer(i).describe() + "'");
        for (ParamView& p : model.net.layer(i).parameters())
            *p.values = read_array(in, p.name, p.values->size());
    }

    expect_keyword(in, "val_loss");
    model.val_loss = expect_number(in, "val_loss");
    model.restart_val_losses = read_series(in, "restart_val_losses");
    model.train_history = read_series(in, "train_history");
    model.val_history = read_series(in, "val_history");
    expect_keyword(in, "end");
    return model;
}

void save_model_file(const std::string& path, const TrainedModel& model) {
    std::ostringstream out;
    save_model(out, model);
    write_text_file(path, out.str());
}

TrainedModel load_model_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open model file: " + path);
    return load_model(in);
}

}  // namespace eyelstm

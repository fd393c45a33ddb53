// eyelstm command-line pipeline: simulate -> preprocess -> train -> fuse ->
// evaluate -> report. Exit codes: 0 success, 1 data/validation error,
// 2 usage error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "eyelstm/fusion.hpp"
#include "eyelstm/io.hpp"
#include "eyelstm/metrics.hpp"
#include "eyelstm/models.hpp"
#include "eyelstm/simulator.hpp"

namespace fs = std::filesystem;
using namespace eyelstm;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitData = 1;
constexpr int kExitUsage = 2;

// "720x400:1440x900" -> FrameDims
FrameDims parse_dims(const std::string& text) {
    FrameDims d;
    if (std::sscanf(text.c_str(), "%dx%d:%dx%d", &d.width_px, &d.height_px, &d.disp_width_px,
                    &d.disp_height_px) != 4)
        throw ValidationError("bad --dims, expected WxH:DWxDH like 720x400:1440x900");
    d.validate();
    return d;
}

std::pair<double, double> parse_pair(const std::string& text, const char* what) {
    double a, b;
    if (std::sscanf(text.c_str(), "%lf,%lf", &a, &b) != 2)
        throw ValidationError(std::string("bad ") + what + ", expected two comma-separated numbers");
    return {a, b};
}

std::vector<double> parse_weight_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        out.push_back(std::stod(tok));
    }
    if (out.empty()) throw ValidationError("empty weight list");
    return out;
}

std::string first_line_of(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open file: " + path);
    std::string line;
    std::getline(in, line);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

void ensure_out_dir(const std::string& out) {
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) throw ValidationError("cannot create output directory '" + out + "': " + ec.message());
}

std::string join(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

// ---------------------------------------------------------------------------

struct SimulateOpts {
    std::string scenario;
    double duration_s = 120.0;
    int replicas = 1;
    std::string dims = "720x400:1440x900";
    // negative = keep the preset's value
    double sigma_eye = -1.0, sigma_track = -1.0, lag_ms = -1.0;
    double blink_rate = -1.0, saccade_rate = -1.0, amp_scale = -1.0;
    double frame_ms = -1.0, eye_ms = -1.0;
};

int cmd_simulate(const SimulateOpts& o, std::uint64_t seed, const std::string& out) {
    Scenario s = scenario_preset(o.scenario, seed, o.duration_s);
    s.dims = parse_dims(o.dims);
    if (o.sigma_eye >= 0.0) s.sigma_eye_px = o.sigma_eye;
    if (o.sigma_track >= 0.0) s.sigma_track_px = o.sigma_track;
    if (o.lag_ms >= 0.0) s.pursuit_lag_ms = o.lag_ms;
    if (o.blink_rate >= 0.0) s.blink_rate_hz = o.blink_rate;
    if (o.saccade_rate >= 0.0) s.saccade_rate_hz = o.saccade_rate;
    if (o.amp_scale >= 0.0) s.amp_scale = o.amp_scale;
    if (o.frame_ms > 0.0) s.frame_ms = o.frame_ms;
    if (o.eye_ms > 0.0) s.eye_ms = o.eye_ms;
    s.validate();
    if (o.replicas < 1 || o.replicas > 100) throw ValidationError("replicas must lie in [1, 100]");

    ensure_out_dir(out);
    GroundTruth truth = gen_truth(s);
    save_truth_file(join(out, "truth.csv"), truth);
    std::cout << "truth.csv: " << truth.size() << " frames\n";

    for (int r = 1; r <= o.replicas; ++r) {
        Scenario sr = s;
        // Same truth, independent sensor noise per replica.
        sr.seed = s.seed + 0x9e3779b9u * static_cast<std::uint64_t>(r - 1);
        const std::string suffix = r == 1 ? "" : "_" + std::to_string(r);
        auto eye = gen_eye_stream(truth, sr);
        auto track = gen_track_stream(truth, sr);
        save_eye_file(join(out, "eye" + suffix + ".csv"), eye);
        save_track_file(join(out, "track" + suffix + ".csv"), track);
        std::cout << "eye" << suffix << ".csv: " << eye.size() << " samples\n";
        std::cout << "track" << suffix << ".csv: " << track.size() << " boxes\n";
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct PreprocessOpts {
    std::string eye_path;
    std::string track_path;
    std::string dims = "720x400:1440x900";
    double theta1 = 30.0, theta2 = 30.0;
    double frame_ms = 70.0;
    std::string feature_weights;
    std::string eye_out, track_out;  // default <out>/{eye,track}_features.csv
};

int cmd_preprocess(const PreprocessOpts& o, const std::string& out) {
    PreprocessConfig cfg;
    cfg.dims = parse_dims(o.dims);
    cfg.frame_ms = o.frame_ms;
    cfg.filter = {o.theta1, o.theta2};
    if (!o.feature_weights.empty()) cfg.feature_weights = parse_weight_list(o.feature_weights);

    auto eye = load_eye_file(o.eye_path);
    auto track = load_track_file(o.track_path);
    if (track.empty()) throw ValidationError("track stream is empty");

    PointSeries eye_features = preprocess_eye_stream(eye, track.size(), cfg);
    PointSeries track_features = preprocess_track_stream(track, cfg);

    ensure_out_dir(out);
    const std::string eye_path = o.eye_out.empty() ? join(out, "eye_features.csv") : o.eye_out;
    const std::string track_path =
        o.track_out.empty() ? join(out, "track_features.csv") : o.track_out;
    save_features_file(eye_path, eye_features);
    save_features_file(track_path, track_features);
    std::cout << eye_path << ": " << eye_features.size() << " rows\n";
    std::cout << track_path << ": " << track_features.size() << " rows\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct TrainOpts {
    std::string kind;
    std::vector<std::string> features;
    std::string labels;
    std::string dims = "720x400:1440x900";
    std::string model_out;
    std::string history_out;
    std::size_t epochs = 200, restarts = 5, minibatch = 8, patience = 20, hidden = 64;
    double lr = 1e-3;
};

std::vector<TrainSample> build_dataset(const PointSeries& features, const PointSeries& labels,
                                       ModelKind kind) {
    auto feature_windows = make_windows(features);
    auto label_windows = make_windows(labels);
    std::vector<TrainSample> dataset;
    dataset.reserve(feature_windows.size());
    for (std::size_t i = 0; i < feature_windows.size(); ++i) {
        TrainSample s;
        s.input = kind == ModelKind::eyelstm ? to_tensor(mirror_pad(feature_windows[i]))
                                             : to_tensor(feature_windows[i]);
        s.label = to_tensor(label_windows[i]);
        s.mask_tail = label_windows[i].padded_tail;
        dataset.push_back(std::move(s));
    }
    return dataset;
}

int cmd_train(const TrainOpts& o, std::uint64_t seed) {
    ModelConfig cfg;
    cfg.kind = model_kind_from_string(o.kind);
    cfg.lstm_hidden = o.hidden;
    cfg.learning_rate = o.lr;
    cfg.epochs = o.epochs;
    cfg.restarts = o.restarts;
    cfg.minibatch = o.minibatch;
    cfg.patience = o.patience;
    cfg.seed = seed;
    cfg.validate();

    const FrameDims dims = parse_dims(o.dims);
    auto truth = load_truth_file(o.labels);
    PointSeries truth_series;
    truth_series.space = CoordSpace::pixels_original;
    truth_series.points = truth;
    PointSeries labels = normalize(truth_series, dims);

    std::vector<TrainSample> dataset;
    for (const std::string& path : o.features) {
        PointSeries features = load_features_file(path);
        if (features.space != CoordSpace::normalized)
            throw ValidationError("features in '" + path + "' are not normalized");
        if (features.size() != labels.size())
            throw ValidationError("features '" + path + "' have " +
                                  std::to_string(features.size()) + " rows but labels have " +
                                  std::to_string(labels.size()));
        auto part = build_dataset(features, labels, cfg.kind);
        for (auto& s : part) dataset.push_back(std::move(s));
    }

    TrainedModel model = train(build_model(cfg), dataset, cfg);
    save_model_file(o.model_out, model);
    std::cout << "model: " << o.model_out << "\n";
    std::cout << "val_loss: " << format_double(model.val_loss) << "\n";
    std::cout << "epochs_run: " << model.train_history.size() << "\n";

    if (!o.history_out.empty()) {
        std::ostringstream hist;
        hist << "epoch,train_loss,val_loss\n";
        for (std::size_t e = 0; e < model.train_history.size(); ++e)
            hist << (e + 1) << ',' << format_double(model.train_history[e]) << ','
                 << format_double(model.val_history[e]) << '\n';
        write_text_file(o.history_out, hist.str());
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct FuseOpts {
    std::string eye_model, track_model;
    std::string eye_features, track_features;
    std::string truth;
    std::string dims = "720x400:1440x900";
    std::string logits = "0,0";
    std::string fusion_out;
};

int cmd_fuse(const FuseOpts& o, const std::string& out) {
    TrainedModel eye_model = load_model_file(o.eye_model);
    TrainedModel track_model = load_model_file(o.track_model);
    PointSeries eye_features = load_features_file(o.eye_features);
    PointSeries track_features = load_features_file(o.track_features);

    const FrameDims dims = parse_dims(o.dims);
    PointSeries truth_series;
    truth_series.space = CoordSpace::pixels_original;
    truth_series.points = load_truth_file(o.truth);
    PointSeries labels = normalize(truth_series, dims);

    auto [l1, l2] = parse_pair(o.logits, "--logits");
    FusionWeights weights = softmax_weights(l1, l2);

    FusedSeries fused = fuse_features(eye_features, track_features, eye_model, track_model, weights);
    if (fused.length_mismatch)
        std::cerr << "warning: stream window counts differ (eye " << fused.n_eye_windows
                  << ", track " << fused.n_track_windows << "); fused "
                  << fused.windows.size() << "\n";

    const std::string path = o.fusion_out.empty() ? join(out, "fusion.csv") : o.fusion_out;
    if (o.fusion_out.empty()) ensure_out_dir(out);
    save_fusion_file(path, fusion_rows(fused, labels));
    std::cout << "fusion: " << path << " (" << fused.windows.size() << " windows, weights "
              << format_double(weights.w1) << "/" << format_double(weights.w2) << ")\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct EvaluateOpts {
    std::string pred;
    std::string pred_col = "fused";
    std::string truth;
    std::string dims = "720x400:1440x900";
    std::string algorithm, dataset;
    std::string metrics_out;
    bool append = false;
};

PointSeries normalized_truth(const std::string& path, const FrameDims& dims) {
    PointSeries s;
    s.space = CoordSpace::pixels_original;
    s.points = load_truth_file(path);
    return normalize(s, dims);
}

int cmd_evaluate(const EvaluateOpts& o, const std::string& out) {
    const FrameDims dims = parse_dims(o.dims);
    std::vector<Point> pred, truth;

    const std::string header = first_line_of(o.pred);
    if (header == kFusionHeader) {
        auto rows = load_fusion_file(o.pred);
        if (rows.empty()) throw ValidationError("fusion file has no rows");
        std::optional<PointSeries> labels;
        if (!o.truth.empty()) labels = normalized_truth(o.truth, dims);
        for (const FusionRow& r : rows) {
            if (o.pred_col == "fused")
                pred.push_back(r.fused);
            else if (o.pred_col == "eye")
                pred.push_back(r.eye);
            else if (o.pred_col == "track")
                pred.push_back(r.track);
            else
                throw ValidationError("bad --pred-col '" + o.pred_col + "'");
            if (labels) {
                const auto frame = static_cast<std::size_t>(r.window) * kWindowLen +
                                   static_cast<std::size_t>(r.step);
                if (frame >= labels->size())
                    throw ValidationError("truth shorter than fusion output");
                truth.push_back(labels->points[frame]);
            } else {
                truth.push_back(r.label);
            }
        }
    } else if (header == "frame,x,y,space") {
        if (o.truth.empty()) throw ValidationError("--truth is required for feature inputs");
        PointSeries features = load_features_file(o.pred);
        PointSeries labels = features.space == CoordSpace::normalized
                                 ? normalized_truth(o.truth, dims)
                                 : [&] {
                                       PointSeries t;
                                       t.space = CoordSpace::pixels_original;
                                       t.points = load_truth_file(o.truth);
                                       return t;
                                   }();
        pred = features.points;
        truth = labels.points;
    } else if (header == "frame,x,y") {
        if (o.truth.empty()) throw ValidationError("--truth is required for truth-format inputs");
        pred = normalized_truth(o.pred, dims).points;
        truth = normalized_truth(o.truth, dims).points;
    } else {
        throw FormatError("unrecognized prediction file header: '" + header + "'");
    }

    MetricsReport report = evaluate_points(pred, truth);
    MetricsRow row = to_metrics_row(o.algorithm, o.dataset, report);

    const std::string path = o.metrics_out.empty() ? join(out, "metrics.csv") : o.metrics_out;
    if (o.metrics_out.empty()) ensure_out_dir(out);
    if (o.append && fs::exists(path) && fs::file_size(path) > 0) {
        auto rows = load_metrics_file(path);
        rows.push_back(row);
        save_metrics_file(path, rows);
    } else {
        save_metrics_file(path, {row});
    }

    std::cout << "rmse: " << format_double(report.rmse) << "\n";
    std::cout << "rmspe: " << (report.rmspe_pct ? format_double(*report.rmspe_pct) : "undefined")
              << "\n";
    std::cout << "mae: " << format_double(report.mae) << "\n";
    std::cout << "mape: " << (report.mape_pct ? format_double(*report.mape_pct) : "undefined")
              << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct ReportOpts {
    std::vector<std::string> metrics;
    std::string table_out;
    std::string csv_out;
};

int cmd_report(const ReportOpts& o) {
    std::vector<MetricsRow> rows;
    for (const std::string& path : o.metrics)
        for (MetricsRow& r : load_metrics_file(path)) rows.push_back(std::move(r));
    if (rows.empty()) throw ValidationError("no metrics rows to report");

    ComparisonTable table = compare_table(rows);
    std::cout << table.text;
    if (!o.table_out.empty()) write_text_file(o.table_out, table.text);
    if (!o.csv_out.empty()) write_text_file(o.csv_out, table.csv);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"EyeLSTM data-fusion pipeline for target tracking"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "Read options from an INI-style config file");

    std::uint64_t seed = 1;
    std::string out = ".";
    app.add_option("--seed", seed, "Seed for stochastic commands")->capture_default_str();
    app.add_option("--out", out, "Output directory")->capture_default_str();

    SimulateOpts sim;
    auto* c_sim = app.add_subcommand("simulate", "Generate truth/eye/track CSVs for a scenario");
    c_sim->add_option("--scenario", sim.scenario, "Scenario name")
        ->required()
        ->check(CLI::IsMember(scenario_names()));
    c_sim->add_option("--duration-s", sim.duration_s, "Recording length in seconds")
        ->capture_default_str();
    c_sim->add_option("--replicas", sim.replicas, "Independent sensor stream pairs")
        ->capture_default_str();
    c_sim->add_option("--dims", sim.dims, "WxH:DWxDH frame and display sizes")
        ->capture_default_str();
    c_sim->add_option("--sigma-eye", sim.sigma_eye, "Gaze jitter sigma (display px)");
    c_sim->add_option("--sigma-track", sim.sigma_track, "Tracker noise sigma (original px)");
    c_sim->add_option("--lag-ms", sim.lag_ms, "Smooth-pursuit lag");
    c_sim->add_option("--blink-rate", sim.blink_rate, "Blink events per second");
    c_sim->add_option("--saccade-rate", sim.saccade_rate, "Saccade spikes per second");
    c_sim->add_option("--amp-scale", sim.amp_scale, "Trajectory amplitude scale [0,1]");
    c_sim->add_option("--frame-ms", sim.frame_ms, "Frame interval");
    c_sim->add_option("--eye-ms", sim.eye_ms, "Eye sample interval");

    PreprocessOpts pre;
    auto* c_pre = app.add_subcommand("preprocess", "Raw streams -> normalized feature CSVs");
    c_pre->add_option("--eye", pre.eye_path, "eye.csv input")->required();
    c_pre->add_option("--track", pre.track_path, "track.csv / groundtruth_rect.txt input")
        ->required();
    c_pre->add_option("--dims", pre.dims, "WxH:DWxDH")->capture_default_str();
    c_pre->add_option("--theta1", pre.theta1, "Stage-1 spike threshold (original px)")
        ->capture_default_str();
    c_pre->add_option("--theta2", pre.theta2, "Stage-2 spike threshold (original px)")
        ->capture_default_str();
    c_pre->add_option("--frame-ms", pre.frame_ms, "Frame interval")->capture_default_str();
    c_pre->add_option("--feature-weights", pre.feature_weights,
                      "Comma list of per-sample weights for the frame feature");
    c_pre->add_option("--eye-out", pre.eye_out, "Eye feature output path");
    c_pre->add_option("--track-out", pre.track_out, "Track feature output path");

    TrainOpts tr;
    auto* c_train = app.add_subcommand("train", "Train a per-stream predictor");
    c_train->add_option("--kind", tr.kind, "Model kind")
        ->required()
        ->check(CLI::IsMember({"eyelstm", "mlp", "dlstm"}));
    c_train->add_option("--features", tr.features, "Feature CSV(s), one per replica")
        ->required()
        ->expected(-1);
    c_train->add_option("--labels", tr.labels, "truth.csv with ground-truth centers")->required();
    c_train->add_option("--dims", tr.dims, "WxH:DWxDH")->capture_default_str();
    c_train->add_option("--model-out", tr.model_out, "Model file to write")->required();
    c_train->add_option("--history-out", tr.history_out, "Per-epoch loss CSV");
    c_train->add_option("--epochs", tr.epochs, "Max epochs")->capture_default_str();
    c_train->add_option("--restarts", tr.restarts, "Independent restarts (<=100)")
        ->capture_default_str();
    c_train->add_option("--minibatch", tr.minibatch, "Minibatch size")->capture_default_str();
    c_train->add_option("--patience", tr.patience, "Early-stop patience")->capture_default_str();
    c_train->add_option("--hidden", tr.hidden, "LSTM hidden size")->capture_default_str();
    c_train->add_option("--lr", tr.lr, "Adam learning rate")->capture_default_str();

    FuseOpts fu;
    auto* c_fuse = app.add_subcommand("fuse", "Fuse two trained streams into fusion.csv");
    c_fuse->add_option("--eye-model", fu.eye_model, "Eye-stream model file")->required();
    c_fuse->add_option("--track-model", fu.track_model, "Track-stream model file")->required();
    c_fuse->add_option("--eye-features", fu.eye_features, "Eye feature CSV")->required();
    c_fuse->add_option("--track-features", fu.track_features, "Track feature CSV")->required();
    c_fuse->add_option("--truth", fu.truth, "truth.csv for the label columns")->required();
    c_fuse->add_option("--dims", fu.dims, "WxH:DWxDH")->capture_default_str();
    c_fuse->add_option("--logits", fu.logits, "Softmax logits 'eye,track'")->capture_default_str();
    c_fuse->add_option("--fusion-out", fu.fusion_out, "Output path (default <out>/fusion.csv)");

    EvaluateOpts ev;
    auto* c_eval = app.add_subcommand("evaluate", "RMSE/RMSPE/MAE/MAPE against ground truth");
    c_eval->add_option("--pred", ev.pred, "fusion.csv, features CSV, or truth-format CSV")
        ->required();
    c_eval->add_option("--pred-col", ev.pred_col, "Column set for fusion inputs")
        ->check(CLI::IsMember({"fused", "eye", "track"}))
        ->capture_default_str();
    c_eval->add_option("--truth", ev.truth, "truth.csv (required for per-frame inputs)");
    c_eval->add_option("--dims", ev.dims, "WxH:DWxDH")->capture_default_str();
    c_eval->add_option("--algorithm", ev.algorithm, "Algorithm label for the row")->required();
    c_eval->add_option("--dataset", ev.dataset, "Dataset label for the row")->required();
    c_eval->add_option("--metrics-out", ev.metrics_out, "Output path (default <out>/metrics.csv)");
    c_eval->add_flag("--append", ev.append, "Append to an existing metrics file");

    ReportOpts rep;
    auto* c_rep = app.add_subcommand("report", "Render the cross-algorithm comparison table");
    c_rep->add_option("--metrics", rep.metrics, "metrics.csv file(s)")->required()->expected(-1);
    c_rep->add_option("--table-out", rep.table_out, "Write the aligned text table here");
    c_rep->add_option("--csv-out", rep.csv_out, "Write the structured CSV here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (c_sim->parsed()) return cmd_simulate(sim, seed, out);
        if (c_pre->parsed()) return cmd_preprocess(pre, out);
        if (c_train->parsed()) return cmd_train(tr, seed);
        if (c_fuse->parsed()) return cmd_fuse(fu, out);
        if (c_eval->parsed()) return cmd_evaluate(ev, out);
        if (c_rep->parsed()) return cmd_report(rep);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
    return kExitUsage;
}

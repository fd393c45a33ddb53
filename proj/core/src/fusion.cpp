#include "eyelstm/fusion.hpp"

#include <cmath>

namespace eyelstm {

FusionWeights softmax_weights(double eye_logit, double track_logit) {
    if (!std::isfinite(eye_logit) || !std::isfinite(track_logit))
        throw ValidationError("softmax logits must be finite");
    const double m = std::max(eye_logit, track_logit);
    const double e1 = std::exp(eye_logit - m);
    const double e2 = std::exp(track_logit - m);
    const double sum = e1 + e2;
    return {e1 / sum, e2 / sum};
}

std::array<Point, kWindowLen> fuse_window(const WindowPrediction& eye,
                                          const WindowPrediction& track,
                                          const FusionWeights& w) {
    w.validate();
    std::array<Point, kWindowLen> fused;
    for (std::size_t k = 0; k < kWindowLen; ++k) {
        fused[k].x = w.w1 * eye.steps[k].x + w.w2 * track.steps[k].x;
        fused[k].y = w.w1 * eye.steps[k].y + w.w2 * track.steps[k].y;
    }
    return fused;
}

PointSeries preprocess_eye_stream(const std::vector<EyeSample>& samples, std::size_t n_frames,
                                  const PreprocessConfig& cfg) {
    if (samples.empty()) throw ValidationError("eye stream is empty");
    auto groups = align_eye_to_frames(samples, cfg.frame_ms, n_frames);
    std::vector<std::optional<Point>> features(groups.size());
    for (std::size_t k = 0; k < groups.size(); ++k) {
        const std::vector<double>* weights = nullptr;
        if (cfg.feature_weights && cfg.feature_weights->size() == groups[k].size())
            weights = &*cfg.feature_weights;
        features[k] = extract_frame_feature(groups[k], weights);
    }
    PointSeries display = fill_gaps(features, CoordSpace::pixels_display);
    PointSeries original = rescale_coords(display, cfg.dims);
    PointSeries filtered = heuristic_filter(original, cfg.filter);
    return normalize(filtered, cfg.dims);
}

PointSeries preprocess_track_stream(const std::vector<TrackBox>& boxes,
                                    const PreprocessConfig& cfg) {
    if (boxes.empty()) throw ValidationError("track stream is empty");
    PointSeries centers;
    centers.space = CoordSpace::pixels_original;
    centers.points.reserve(boxes.size());
    for (const TrackBox& b : boxes) centers.points.push_back(bbox_center(b));
    PointSeries filtered = heuristic_filter(centers, cfg.filter);
    return normalize(filtered, cfg.dims);
}

namespace {

Tensor2 model_input(const TrainedModel& model, const Window24& w) {
    if (model.config.kind == ModelKind::eyelstm) return to_tensor(mirror_pad(w));
    return to_tensor(w);
}

}  // namespace

FusedSeries fuse_features(const PointSeries& eye_features, const PointSeries& track_features,
                          const TrainedModel& eye_model, const TrainedModel& track_model,
                          const FusionWeights& weights) {
    weights.validate();
    auto eye_windows = make_windows(eye_features);
    auto track_windows = make_windows(track_features);

    FusedSeries out;
    out.n_eye_windows = eye_windows.size();
    out.n_track_windows = track_windows.size();
    out.length_mismatch = eye_windows.size() != track_windows.size();
    const std::size_t count = std::min(eye_windows.size(), track_windows.size());

    for (std::size_t i = 0; i < count; ++i) {
        WindowPrediction pe = predict(eye_model, model_input(eye_model, eye_windows[i]),
                                      WindowPrediction::Source::eye);
        WindowPrediction pt = predict(track_model, model_input(track_model, track_windows[i]),
                                      WindowPrediction::Source::track);
        out.windows.push_back(fuse_window(pe, pt, weights));
        out.eye_predictions.push_back(std::move(pe));
        out.track_predictions.push_back(std::move(pt));
    }

    if (count > 0) {
        // A window only carries padding when it is the last of its own series.
        const std::size_t tail_e =
            count == eye_windows.size() ? eye_windows[count - 1].padded_tail : 0;
        const std::size_t tail_t =
            count == track_windows.size() ? track_windows[count - 1].padded_tail : 0;
        out.last_padded_tail = std::max(tail_e, tail_t);
    }
    return out;
}

FusedSeries run_pipeline(const std::vector<EyeSample>& eye_raw,
                         const std::vector<TrackBox>& track_raw, const PreprocessConfig& cfg,
                         const TrainedModel& eye_model, const TrainedModel& track_model,
                         const FusionWeights& weights) {
    if (eye_raw.empty()) throw ValidationError("eye stream is empty");
    if (track_raw.empty()) throw ValidationError("track stream is empty");
    PointSeries eye_features = preprocess_eye_stream(eye_raw, track_raw.size(), cfg);
    PointSeries track_features = preprocess_track_stream(track_raw, cfg);
    return fuse_features(eye_features, track_features, eye_model, track_model, weights);
}

std::vector<FusionRow> fusion_rows(const FusedSeries& fused, const PointSeries& labels) {
    std::vector<FusionRow> rows;
    for (std::size_t w = 0; w < fused.windows.size(); ++w) {
        const bool last = w + 1 == fused.windows.size();
        const std::size_t steps = kWindowLen - (last ? fused.last_padded_tail : 0);
        for (std::size_t s = 0; s < steps; ++s) {
            const std::size_t frame = w * kWindowLen + s;
            if (frame >= labels.size())
                throw ValidationError("label series shorter than the fused output");
            FusionRow r;
            r.window = static_cast<std::int64_t>(w);
            r.step = static_cast<std::int64_t>(s);
            r.fused = fused.windows[w][s];
            r.eye = fused.eye_predictions[w].steps[s];
            r.track = fused.track_predictions[w].steps[s];
            r.label = labels.points[frame];
            rows.push_back(r);
        }
    }
    return rows;
}

}  // namespace eyelstm

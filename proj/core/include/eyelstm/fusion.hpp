#pragma once

#include <array>
#include <optional>
#include <utility>
#include <vector>

#include "eyelstm/io.hpp"
#include "eyelstm/models.hpp"

namespace eyelstm {

// Convex pair of stream weights; w1 weighs the eye stream, w2 the
// tracker stream.
struct FusionWeights {
    double w1 = 0.5;
    double w2 = 0.5;

    void validate() const {
        if (w1 < 0.0 || w2 < 0.0 || std::abs(w1 + w2 - 1.0) > 1e-12)
            throw ValidationError("fusion weights must be non-negative and sum to 1");
    }
};

// Max-shifted softmax of a logit pair. Equal logits give exactly (0.5, 0.5).
FusionWeights softmax_weights(double eye_logit, double track_logit);

// Elementwise fused[k] = w1*eye[k] + w2*track[k].
std::array<Point, kWindowLen> fuse_window(const WindowPrediction& eye,
                                          const WindowPrediction& track,
                                          const FusionWeights& w);

// Ordered fusion results plus the per-stream predictions they combined.
struct FusedSeries {
    std::vector<std::array<Point, kWindowLen>> windows;
    std::vector<WindowPrediction> eye_predictions;
    std::vector<WindowPrediction> track_predictions;
    std::size_t n_eye_windows = 0;
    std::size_t n_track_windows = 0;
    // Replicated trailing steps of the final fused window; excluded from
    // written rows and downstream metrics.
    std::size_t last_padded_tail = 0;
    bool length_mismatch = false;
};

// Step-1 orchestration shared by the pipeline and the CLI.
struct PreprocessConfig {
    FrameDims dims;
    double frame_ms = 70.0;
    FilterConfig filter;
    // Optional per-sample weights for the frame feature; applied to
    // groups whose size matches, uniform otherwise (group sizes vary
    // with timing jitter and blinks).
    std::optional<std::vector<double>> feature_weights;
};

// align -> weighted average -> rescale to original px -> gap fill ->
// two-stage filter -> normalize.
PointSeries preprocess_eye_stream(const std::vector<EyeSample>& samples, std::size_t n_frames,
                                  const PreprocessConfig& cfg);
// box centers -> two-stage filter -> normalize (boxes are already
// per-frame in original pixels).
PointSeries preprocess_track_stream(const std::vector<TrackBox>& boxes,
                                    const PreprocessConfig& cfg);

// Steps 2-7 over already-normalized feature series: window both streams,
// mirror-pad where the model wants it, predict per window, fuse, stop at
// min(n, m) windows.
FusedSeries fuse_features(const PointSeries& eye_features, const PointSeries& track_features,
                          const TrainedModel& eye_model, const TrainedModel& track_model,
                          const FusionWeights& weights);

// Full Steps 1-7 from raw streams.
FusedSeries run_pipeline(const std::vector<EyeSample>& eye_raw,
                         const std::vector<TrackBox>& track_raw, const PreprocessConfig& cfg,
                         const TrainedModel& eye_model, const TrainedModel& track_model,
                         const FusionWeights& weights);

// Flattens a FusedSeries against normalized per-frame labels into
// fusion.csv rows. Replicated padding steps are omitted so the rows feed
// metrics directly.
std::vector<FusionRow> fusion_rows(const FusedSeries& fused, const PointSeries& labels);

}  // namespace eyelstm

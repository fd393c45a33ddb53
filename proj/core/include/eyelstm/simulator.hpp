#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "eyelstm/rng.hpp"
#include "eyelstm/types.hpp"

namespace eyelstm {

// Tracker-loss episode: the reported center freezes at its entry value
// and drifts linearly until the window ends.
struct OcclusionWindow {
    std::size_t start_frame = 0;
    std::size_t length = 0;
    double drift_x = 0.0;  // px per frame
    double drift_y = 0.0;
};

// Frames whose tracker noise sigma is multiplied (harsh lighting).
struct IlluminationWindow {
    std::size_t start_frame = 0;
    std::size_t length = 0;
    double noise_multiplier = 1.0;
};

// Full description of one synthetic recording session. The named presets
// mirror the benchmark sequences by dominant attribute: occlusion,
// deformation, illumination, fast_motion.
struct Scenario {
    std::string name = "occlusion";
    double duration_s = 120.0;
    double frame_ms = 70.0;
    double eye_ms = 18.0;
    FrameDims dims;

    double sigma_eye_px = 30.0;    // gaze jitter, display pixels
    double sigma_track_px = 5.0;   // tracker noise, original pixels
    double pursuit_lag_ms = 120.0;
    double blink_rate_hz = 0.3;
    double blink_min_ms = 100.0;
    double blink_max_ms = 300.0;
    double saccade_rate_hz = 0.8;  // single-sample gaze spikes

    double amp_scale = 1.0;   // 0 freezes the target at the frame center
    double speed_scale = 1.0; // fast_motion doubles this

    double deform_amp = 0.0;  // fractional sinusoidal w/h modulation
    double deform_period_s = 3.0;
    double box_w_px = 40.0;
    double box_h_px = 50.0;

    std::vector<OcclusionWindow> occlusions;
    std::vector<IlluminationWindow> illuminations;

    std::uint64_t seed = 1;

    std::size_t n_frames() const {
        return static_cast<std::size_t>(duration_s * 1000.0 / frame_ms);
    }
    std::size_t n_eye_samples() const {
        return static_cast<std::size_t>(duration_s * 1000.0 / eye_ms) + 1;
    }
    void validate() const;
};

std::vector<std::string> scenario_names();
// Throws ConfigError on an unknown name.
Scenario scenario_preset(const std::string& name, std::uint64_t seed, double duration_s = 120.0);

// Per-frame target centers in original pixels.
using GroundTruth = std::vector<Point>;

// Seeded sum of three low-frequency sinusoids per axis, amplitude-scaled
// to keep at least 5% of the frame between the target and every border.
GroundTruth gen_truth(const Scenario& s);

// Samples every eye_ms in display pixels: lagged, interpolated truth plus
// Gaussian jitter, Poisson blink dropouts, sparse saccade spikes.
std::vector<EyeSample> gen_eye_stream(const GroundTruth& truth, const Scenario& s);

// One box per frame around the (noisy) truth center, with occlusion
// freeze-and-drift and illumination noise bursts.
std::vector<TrackBox> gen_track_stream(const GroundTruth& truth, const Scenario& s);

// Event plumbing, exposed so tests can drive explicit windows.
// Windows are (start_ms, end_ms) half-open intervals.
std::vector<std::pair<double, double>> gen_event_windows(Rng& rng, double rate_hz, double min_ms,
                                                         double max_ms, double duration_ms);
void invalidate_in_windows(std::vector<EyeSample>& samples,
                           const std::vector<std::pair<double, double>>& windows_ms);

// Linear interpolation of the truth track at an arbitrary millisecond
// timestamp, edge-held outside the recorded range.
Point truth_at_ms(const GroundTruth& truth, double frame_ms, double t_ms);

}  // namespace eyelstm

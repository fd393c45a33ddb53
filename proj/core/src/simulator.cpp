#include "eyelstm/simulator.hpp"

#include <cmath>

#include "eyelstm/errors.hpp"

namespace eyelstm {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Sub-generator stream ids; one shared seed, independent streams.
constexpr std::uint64_t kTruthStream = 1;
constexpr std::uint64_t kEyeStream = 2;
constexpr std::uint64_t kTrackStream = 3;

struct Sinusoid {
    double amp, freq_hz, phase;
};

// Three low-frequency components per axis; amplitudes scaled so the sum
// keeps the target at least 5% of the frame away from the borders.
std::vector<Sinusoid> draw_axis(Rng& rng, double extent_px, double amp_scale,
                                double speed_scale) {
    std::vector<Sinusoid> comps(3);
    double amp_sum = 0.0;
    for (Sinusoid& c : comps) {
        c.amp = rng.uniform(0.3, 1.0);
        const double period_s = rng.uniform(6.0, 24.0) / speed_scale;
        c.freq_hz = 1.0 / period_s;
        c.phase = rng.uniform(0.0, kTwoPi);
        amp_sum += c.amp;
    }
    const double budget = 0.45 * extent_px * amp_scale;
    for (Sinusoid& c : comps) c.amp *= budget / amp_sum;
    return comps;
}

double eval_axis(const std::vector<Sinusoid>& comps, double center, double t_s) {
    double v = center;
    for (const Sinusoid& c : comps) v += c.amp * std::sin(kTwoPi * c.freq_hz * t_s + c.phase);
    return v;
}

}  // namespace

void Scenario::validate() const {
    dims.validate();
    if (duration_s <= 0.0 || frame_ms <= 0.0 || eye_ms <= 0.0)
        throw ValidationError("scenario durations and intervals must be positive");
    if (sigma_eye_px < 0.0 || sigma_track_px < 0.0)
        throw ValidationError("noise sigmas must be non-negative");
    if (blink_rate_hz < 0.0 || saccade_rate_hz < 0.0)
        throw ValidationError("event rates must be non-negative");
    if (blink_min_ms <= 0.0 || blink_max_ms < blink_min_ms)
        throw ValidationError("blink length range is invalid");
    if (amp_scale < 0.0 || amp_scale > 1.0)
        throw ValidationError("amp_scale must lie in [0, 1]");
    if (speed_scale <= 0.0) throw ValidationError("speed_scale must be positive");
    if (box_w_px <= 0.0 || box_h_px <= 0.0) throw ValidationError("box size must be positive");
    if (deform_amp < 0.0 || deform_amp >= 1.0)
        throw ValidationError("deform_amp must lie in [0, 1)");
    const std::size_t frames = n_frames();
    for (const OcclusionWindow& w : occlusions)
        if (w.length == 0 || w.start_frame + w.length > frames)
            throw ValidationError("occlusion window outside scenario duration");
    for (const IlluminationWindow& w : illuminations)
        if (w.length == 0 || w.start_frame + w.length > frames)
            throw ValidationError("illumination window outside scenario duration");
}

std::vector<std::string> scenario_names() {
    return {"occlusion", "deformation", "illumination", "fast_motion"};
}

Scenario scenario_preset(const std::string& name, std::uint64_t seed, double duration_s) {
    Scenario s;
    s.name = name;
    s.seed = seed;
    s.duration_s = duration_s;
    const auto frames = static_cast<double>(s.n_frames());
    auto at = [&](double frac) { return static_cast<std::size_t>(frac * frames); };

    if (name == "occlusion") {
        s.sigma_eye_px = 35.0;
        s.sigma_track_px = 5.0;
        s.pursuit_lag_ms = 120.0;
        s.occlusions = {{at(0.25), at(0.16), 2.0, 1.2}, {at(0.62), at(0.14), -1.5, 1.0}};
    } else if (name == "deformation") {
        s.sigma_eye_px = 30.0;
        s.sigma_track_px = 14.0;
        s.pursuit_lag_ms = 100.0;
        s.blink_rate_hz = 0.3;
        s.saccade_rate_hz = 0.6;
        s.deform_amp = 0.35;
        s.deform_period_s = 2.5;
        s.occlusions = {{at(0.45), at(0.10), 1.2, -0.9}};
    } else if (name == "illumination") {
        s.sigma_eye_px = 35.0;
        s.sigma_track_px = 6.0;
        s.pursuit_lag_ms = 130.0;
        s.blink_rate_hz = 0.4;
        s.illuminations = {{at(0.20), at(0.18), 6.0}, {at(0.60), at(0.15), 5.0}};
    } else if (name == "fast_motion") {
        s.sigma_eye_px = 30.0;
        s.sigma_track_px = 8.0;
        s.pursuit_lag_ms = 140.0;
        s.saccade_rate_hz = 0.7;
        s.speed_scale = 2.0;
        s.occlusions = {{at(0.50), at(0.12), 3.0, 0.5}};
    } else {
        throw ConfigError("unknown scenario '" + name + "'");
    }
    s.validate();
    return s;
}

GroundTruth gen_truth(const Scenario& s) {
    s.validate();
    Rng rng(s.seed, kTruthStream);
    const auto x_comps = draw_axis(rng, s.dims.width_px, s.amp_scale, s.speed_scale);
    const auto y_comps = draw_axis(rng, s.dims.height_px, s.amp_scale, s.speed_scale);
    const double cx = s.dims.width_px / 2.0;
    const double cy = s.dims.height_px / 2.0;

    GroundTruth truth(s.n_frames());
    for (std::size_t k = 0; k < truth.size(); ++k) {
        const double t_s = static_cast<double>(k) * s.frame_ms / 1000.0;
        truth[k] = {eval_axis(x_comps, cx, t_s), eval_axis(y_comps, cy, t_s)};
    }
    return truth;
}

Point truth_at_ms(const GroundTruth& truth, double frame_ms, double t_ms) {
    if (truth.empty()) throw ValidationError("empty ground truth");
    const double pos = t_ms / frame_ms;
    if (pos <= 0.0) return truth.front();
    const auto last = static_cast<double>(truth.size() - 1);
    if (pos >= last) return truth.back();
    const auto i0 = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(i0);
    const Point& a = truth[i0];
    const Point& b = truth[i0 + 1];
    return {a.x + frac * (b.x - a.x), a.y + frac * (b.y - a.y)};
}

std::vector<std::pair<double, double>> gen_event_windows(Rng& rng, double rate_hz, double min_ms,
                                                         double max_ms, double duration_ms) {
    std::vector<std::pair<double, double>> windows;
    if (rate_hz <= 0.0) return windows;
    double t = 0.0;
    while (true) {
        t += rng.exponential(rate_hz) * 1000.0;
        if (t >= duration_ms) break;
        const double len = rng.uniform(min_ms, max_ms);
        windows.emplace_back(t, t + len);
        t += len;
    }
    return windows;
}

void invalidate_in_windows(std::vector<EyeSample>& samples,
                           const std::vector<std::pair<double, double>>& windows_ms) {
    for (EyeSample& s : samples)
        for (const auto& [start, end] : windows_ms)
            if (s.t_ms >= start && s.t_ms < end) {
                s.valid = false;
                s.x_px = 0.0;
                s.y_px = 0.0;
                break;
            }
}

std::vector<EyeSample> gen_eye_stream(const GroundTruth& truth, const Scenario& s) {
    s.validate();
    Rng rng(s.seed, kEyeStream);
    const double duration_ms = s.duration_s * 1000.0;
    const auto blink_windows =
        gen_event_windows(rng, s.blink_rate_hz, s.blink_min_ms, s.blink_max_ms, duration_ms);

    const double sx = static_cast<double>(s.dims.disp_width_px) / s.dims.width_px;
    const double sy = static_cast<double>(s.dims.disp_height_px) / s.dims.height_px;
    const double spike_prob = s.saccade_rate_hz * s.eye_ms / 1000.0;

    // Gaze follows the frame on screen, so the target is piecewise
    // constant: samples hold the truth of the displayed (lagged) frame.
    auto displayed_frame = [&](double t_ms) {
        if (t_ms <= 0.0) return std::size_t{0};
        auto k = static_cast<std::size_t>(t_ms / s.frame_ms);
        return std::min(k, truth.size() - 1);
    };

    std::vector<EyeSample> samples;
    samples.reserve(s.n_eye_samples());
    for (std::size_t i = 0; i < s.n_eye_samples(); ++i) {
        const double t = static_cast<double>(i) * s.eye_ms;
        const Point p = truth[displayed_frame(t - s.pursuit_lag_ms)];
        EyeSample sample;
        sample.t_ms = t;
        sample.x_px = p.x * sx + s.sigma_eye_px * rng.normal();
        sample.y_px = p.y * sy + s.sigma_eye_px * rng.normal();
        if (rng.uniform01() < spike_prob) {
            const double mag = rng.uniform(3.0, 6.0) * s.sigma_eye_px;
            const double angle = rng.uniform(0.0, kTwoPi);
            sample.x_px += mag * std::cos(angle);
            sample.y_px += mag * std::sin(angle);
        }
        samples.push_back(sample);
    }
    invalidate_in_windows(samples, blink_windows);
    return samples;
}

std::vector<TrackBox> gen_track_stream(const GroundTruth& truth, const Scenario& s) {
    s.validate();
    if (truth.size() != s.n_frames())
        throw ValidationError("ground truth length does not match the scenario");
    Rng rng(s.seed, kTrackStream);

    std::vector<TrackBox> boxes;
    boxes.reserve(truth.size());
    for (std::size_t k = 0; k < truth.size(); ++k) {
        // Draw unconditionally so moving occlusion windows never shifts
        // the noise sequence outside them.
        const double z1 = rng.normal();
        const double z2 = rng.normal();

        const OcclusionWindow* occ = nullptr;
        for (const OcclusionWindow& w : s.occlusions)
            if (k >= w.start_frame && k < w.start_frame + w.length) {
                occ = &w;
                break;
            }

        Point center;
        if (occ) {
            const std::size_t entry = occ->start_frame > 0 ? occ->start_frame - 1 : 0;
            const auto steps = static_cast<double>(k - occ->start_frame + 1);
            center = {truth[entry].x + occ->drift_x * steps,
                      truth[entry].y + occ->drift_y * steps};
        } else {
            double sigma = s.sigma_track_px;
            for (const IlluminationWindow& w : s.illuminations)
                if (k >= w.start_frame && k < w.start_frame + w.length) {
                    sigma *= w.noise_multiplier;
                    break;
                }
            center = {truth[k].x + sigma * z1, truth[k].y + sigma * z2};
        }

        double w = s.box_w_px;
        double h = s.box_h_px;
        if (s.deform_amp > 0.0) {
            const double t_s = static_cast<double>(k) * s.frame_ms / 1000.0;
            const double mod = std::sin(kTwoPi * t_s / s.deform_period_s);
            w *= 1.0 + s.deform_amp * mod;
            h *= 1.0 - s.deform_amp * mod;
        }
        boxes.push_back({static_cast<std::int64_t>(k), center.x - w / 2.0, center.y - h / 2.0,
                         w, h});
    }
    return boxes;
}

}  // namespace eyelstm

#include <doctest.h>

#include <cmath>

#include "eyelstm/fusion.hpp"
#include "eyelstm/simulator.hpp"

using namespace eyelstm;

namespace {

Scenario noiseless(double duration_s = 20.0) {
    Scenario s;
    s.name = "occlusion";
    s.duration_s = duration_s;
    s.sigma_eye_px = 0.0;
    s.sigma_track_px = 0.0;
    s.pursuit_lag_ms = 0.0;
    s.blink_rate_hz = 0.0;
    s.saccade_rate_hz = 0.0;
    s.seed = 9;
    return s;
}

}  // namespace

TEST_CASE("gen_truth frame count follows duration and frame interval") {
    Scenario s;
    s.duration_s = 120.0;
    s.frame_ms = 70.0;
    CHECK(s.n_frames() == 1714);
    GroundTruth truth = gen_truth(s);
    CHECK(truth.size() == 1714);
}

TEST_CASE("zero amplitude freezes the target at the frame center") {
    Scenario s = noiseless();
    s.amp_scale = 0.0;
    GroundTruth truth = gen_truth(s);
    for (const Point& p : truth) {
        CHECK(p.x == 360.0);
        CHECK(p.y == 200.0);
    }
}

TEST_CASE("gen_truth is deterministic and respects the border margin") {
    Scenario s;
    s.duration_s = 60.0;
    s.seed = 77;
    GroundTruth a = gen_truth(s);
    GroundTruth b = gen_truth(s);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].x == b[i].x);
        CHECK(a[i].y == b[i].y);
    }
    for (const Point& p : a) {
        CHECK(p.x >= 0.05 * 720);
        CHECK(p.x <= 0.95 * 720);
        CHECK(p.y >= 0.05 * 400);
        CHECK(p.y <= 0.95 * 400);
    }
}

TEST_CASE("eye sample count is floor(duration/eye_ms) + 1") {
    Scenario s = noiseless(30.0);
    CHECK(s.n_eye_samples() == 1667);
    GroundTruth truth = gen_truth(s);
    auto eye = gen_eye_stream(truth, s);
    CHECK(eye.size() == 1667);
    CHECK(eye.front().t_ms == 0.0);
    CHECK(eye.back().t_ms == 1666 * 18.0);
}

TEST_CASE("noiseless eye samples equal the displayed truth, scaled") {
    Scenario s = noiseless();
    GroundTruth truth = gen_truth(s);
    auto eye = gen_eye_stream(truth, s);
    for (const EyeSample& sample : eye) {
        REQUIRE(sample.valid);
        auto frame = std::min(static_cast<std::size_t>(sample.t_ms / s.frame_ms),
                              truth.size() - 1);
        CHECK(sample.x_px == truth[frame].x * 2.0);
        CHECK(sample.y_px == truth[frame].y * 2.25);
    }
}

TEST_CASE("a 180 ms blink invalidates exactly 10 samples at 18 ms spacing") {
    Scenario s = noiseless();
    GroundTruth truth = gen_truth(s);
    auto eye = gen_eye_stream(truth, s);
    invalidate_in_windows(eye, {{1000.0, 1180.0}});
    std::size_t invalid = 0;
    for (const EyeSample& sample : eye)
        if (!sample.valid) ++invalid;
    CHECK(invalid == 10);
    // and they are consecutive
    std::size_t first = 0;
    while (eye[first].valid) ++first;
    for (std::size_t i = first; i < first + 10; ++i) CHECK_FALSE(eye[i].valid);
    CHECK(eye[first + 10].valid);
}

TEST_CASE("eye stream is deterministic per seed") {
    Scenario s = scenario_preset("illumination", 123, 20.0);
    GroundTruth truth = gen_truth(s);
    auto a = gen_eye_stream(truth, s);
    auto b = gen_eye_stream(truth, s);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].x_px == b[i].x_px);
        CHECK(a[i].valid == b[i].valid);
    }
}

TEST_CASE("noiseless track boxes sit exactly on the truth") {
    Scenario s = noiseless();
    s.occlusions.clear();
    GroundTruth truth = gen_truth(s);
    auto track = gen_track_stream(truth, s);
    REQUIRE(track.size() == truth.size());
    for (std::size_t k = 0; k < track.size(); ++k) {
        Point c = bbox_center(track[k]);
        CHECK(c.x == doctest::Approx(truth[k].x).epsilon(1e-12));
        CHECK(c.y == doctest::Approx(truth[k].y).epsilon(1e-12));
    }
}

TEST_CASE("occlusion freezes then drifts the tracker center") {
    Scenario s = noiseless();
    s.occlusions = {{50, 20, 1.0, 0.0}};
    GroundTruth truth = gen_truth(s);
    auto track = gen_track_stream(truth, s);
    const Point entry = truth[49];
    const Point end = bbox_center(track[69]);  // last occluded frame
    CHECK(end.x == doctest::Approx(entry.x + 20.0).epsilon(1e-12));
    CHECK(end.y == doctest::Approx(entry.y).epsilon(1e-12));
    // first occluded frame drifted exactly once
    const Point start = bbox_center(track[50]);
    CHECK(start.x == doctest::Approx(entry.x + 1.0).epsilon(1e-12));
}

TEST_CASE("track stream is deterministic per seed") {
    Scenario s = scenario_preset("deformation", 5, 20.0);
    GroundTruth truth = gen_truth(s);
    auto a = gen_track_stream(truth, s);
    auto b = gen_track_stream(truth, s);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].x_px == b[i].x_px);
        CHECK(a[i].w_px == b[i].w_px);
    }
}

TEST_CASE("deformation modulates the box size but not its center") {
    Scenario s = noiseless();
    s.occlusions.clear();
    s.deform_amp = 0.3;
    GroundTruth truth = gen_truth(s);
    auto track = gen_track_stream(truth, s);
    bool some_wider = false, some_narrower = false;
    for (std::size_t k = 0; k < track.size(); ++k) {
        Point c = bbox_center(track[k]);
        CHECK(c.x == doctest::Approx(truth[k].x).epsilon(1e-12));
        if (track[k].w_px > 40.0 + 1.0) some_wider = true;
        if (track[k].w_px < 40.0 - 1.0) some_narrower = true;
    }
    CHECK(some_wider);
    CHECK(some_narrower);
}

TEST_CASE("noiseless preprocessing recovers the truth to 1e-9") {
    Scenario s = noiseless(20.0);
    s.occlusions.clear();
    GroundTruth truth = gen_truth(s);
    auto eye = gen_eye_stream(truth, s);

    PreprocessConfig cfg;
    cfg.frame_ms = s.frame_ms;
    PointSeries features = preprocess_eye_stream(eye, truth.size(), cfg);
    PointSeries recovered = denormalize(features, cfg.dims);
    REQUIRE(recovered.size() == truth.size());
    for (std::size_t k = 0; k < truth.size(); ++k) {
        CHECK(recovered.points[k].x == doctest::Approx(truth[k].x).epsilon(1e-9));
        CHECK(recovered.points[k].y == doctest::Approx(truth[k].y).epsilon(1e-9));
    }
}

TEST_CASE("occluded frames hurt the tracker more than the eye") {
    // Raw-stream complementarity: drift >= 1 px/frame over >= 20 frames.
    Scenario s = scenario_preset("occlusion", 31, 30.0);
    GroundTruth truth = gen_truth(s);
    auto eye = gen_eye_stream(truth, s);
    auto track = gen_track_stream(truth, s);

    PreprocessConfig cfg;
    cfg.frame_ms = s.frame_ms;
    PointSeries eye_features = denormalize(preprocess_eye_stream(eye, truth.size(), cfg), cfg.dims);
    PointSeries track_features =
        denormalize(preprocess_track_stream(track, cfg), cfg.dims);

    for (const OcclusionWindow& w : s.occlusions) {
        REQUIRE(w.length >= 20);
        double eye_sq = 0.0, track_sq = 0.0;
        for (std::size_t k = w.start_frame; k < w.start_frame + w.length; ++k) {
            const double ex = eye_features.points[k].x - truth[k].x;
            const double ey = eye_features.points[k].y - truth[k].y;
            const double tx = track_features.points[k].x - truth[k].x;
            const double ty = track_features.points[k].y - truth[k].y;
            eye_sq += ex * ex + ey * ey;
            track_sq += tx * tx + ty * ty;
        }
        CHECK(track_sq > eye_sq);
    }
}

TEST_CASE("scenario presets cover the four named attributes") {
    for (const std::string& name : scenario_names()) {
        Scenario s = scenario_preset(name, 1, 30.0);
        CHECK(s.name == name);
        s.validate();
    }
    CHECK_THROWS_AS(scenario_preset("bird1", 1), ConfigError);
    CHECK(scenario_preset("fast_motion", 1).speed_scale == 2.0);
    CHECK(scenario_preset("deformation", 1).deform_amp > 0.0);
    CHECK_FALSE(scenario_preset("illumination", 1).illuminations.empty());
}

TEST_CASE("scenario validation rejects out-of-range windows") {
    Scenario s = noiseless(10.0);
    s.occlusions = {{s.n_frames() - 5, 10, 1.0, 0.0}};
    CHECK_THROWS_AS(s.validate(), ValidationError);
    s.occlusions.clear();
    s.illuminations = {{0, 0, 2.0}};
    CHECK_THROWS_AS(s.validate(), ValidationError);
}

#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

#include "eyelstm/types.hpp"

namespace eyelstm {

inline constexpr std::size_t kWindowLen = 24;
inline constexpr std::size_t kPaddedLen = 30;

// Two-stage spike filter thresholds, in the same units as the input
// coordinates (original pixels in the standard pipeline).
struct FilterConfig {
    double theta1 = 30.0;
    double theta2 = 30.0;

    void validate() const {
        if (theta1 <= 0.0 || theta2 <= 0.0)
            throw ValidationError("filter thresholds must be positive");
    }
};

// 24 consecutive feature points. padded_tail counts replicated trailing
// steps in the final window of a series; those steps are excluded from
// training loss and metrics.
struct Window24 {
    std::array<Point, kWindowLen> steps{};
    std::size_t origin_index = 0;
    std::size_t padded_tail = 0;
};

// Mirror-padded form of a Window24; steps[3..27) equal the source window.
struct Padded30 {
    std::array<Point, kPaddedLen> steps{};
};

// Groups valid samples by display frame: group k holds samples with
// t_ms in [k*frame_ms, (k+1)*frame_ms). Empty groups are legitimate.
std::vector<std::vector<Point>> align_eye_to_frames(const std::vector<EyeSample>& samples,
                                                    double frame_ms, std::size_t n_frames);

// Weighted average of one frame's samples; empty group -> nullopt.
// Default weights are uniform. A given weight vector must match the
// group size exactly and be positive.
std::optional<Point> extract_frame_feature(const std::vector<Point>& group,
                                           const std::vector<double>* weights = nullptr);

// Linear interpolation across absent entries, edge-hold at the ends.
PointSeries fill_gaps(const std::vector<std::optional<Point>>& series, CoordSpace space);

// Display pixels -> original pixels.
PointSeries rescale_coords(const PointSeries& series, const FrameDims& dims);

// Two-stage heuristic spike filter, applied per coordinate, stage 1 then
// stage 2, each as a single left-to-right pass mutating as it scans.
PointSeries heuristic_filter(const PointSeries& series, const FilterConfig& cfg);

// Original pixels -> dimensionless [0,1]-ish coordinates.
PointSeries normalize(const PointSeries& series, const FrameDims& dims);
PointSeries denormalize(const PointSeries& series, const FrameDims& dims);

// Consecutive non-overlapping windows of 24; a trailing remainder is
// extended by repeating its last point and tagged with padded_tail.
std::vector<Window24> make_windows(const PointSeries& series);

// Reflection without boundary repetition:
// (s4,s3,s2, s1..s24, s23,s22,s21) in 1-based step numbering.
Padded30 mirror_pad(const Window24& w);

}  // namespace eyelstm

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "eyelstm/errors.hpp"

namespace eyelstm {

// One timestamped gaze point. `valid == false` marks a dropped frame
// (blink, inattention, head movement); x/y are meaningless then.
struct EyeSample {
    double t_ms = 0.0;
    double x_px = 0.0;
    double y_px = 0.0;
    bool valid = true;
};

// One per-frame tracker bounding box, top-left corner + size,
// in original-video pixels.
struct TrackBox {
    std::int64_t frame = 0;
    double x_px = 0.0;
    double y_px = 0.0;
    double w_px = 0.0;
    double h_px = 0.0;
};

struct Point {
    double x = 0.0;
    double y = 0.0;
};

enum class CoordSpace { pixels_original, pixels_display, normalized };

std::string to_string(CoordSpace space);
CoordSpace coord_space_from_string(const std::string& s);

// Ordered 2-D point sequence with a coordinate-space tag.
// Normalized coordinates must stay within [-0.5, 1.5] (slack for
// filter/noise overshoot).
struct PointSeries {
    std::vector<Point> points;
    CoordSpace space = CoordSpace::pixels_original;

    std::size_t size() const { return points.size(); }
    void validate() const;
};

// Original video size and the enlarged display it was shown at.
struct FrameDims {
    int width_px = 720;
    int height_px = 400;
    int disp_width_px = 1440;
    int disp_height_px = 900;

    void validate() const {
        if (width_px <= 0 || height_px <= 0 || disp_width_px <= 0 || disp_height_px <= 0)
            throw ValidationError("frame dimensions must be positive");
    }
};

// Center of a tracker box: (x + w/2, y + h/2).
inline Point bbox_center(const TrackBox& b) {
    return {b.x_px + b.w_px / 2.0, b.y_px + b.h_px / 2.0};
}

}  // namespace eyelstm

#include "eyelstm/preprocess.hpp"

#include <algorithm>
#include <cmath>

#include "eyelstm/errors.hpp"

namespace eyelstm {

std::vector<std::vector<Point>> align_eye_to_frames(const std::vector<EyeSample>& samples,
                                                    double frame_ms, std::size_t n_frames) {
    if (frame_ms <= 0.0) throw ValidationError("frame_ms must be positive");
    if (n_frames < 1) throw ValidationError("n_frames must be at least 1");
    std::vector<std::vector<Point>> groups(n_frames);
    for (const EyeSample& s : samples) {
        if (!s.valid) continue;
        auto k = static_cast<std::ptrdiff_t>(std::floor(s.t_ms / frame_ms));
        if (k < 0 || static_cast<std::size_t>(k) >= n_frames) continue;
        groups[static_cast<std::size_t>(k)].push_back({s.x_px, s.y_px});
    }
    return groups;
}

std::optional<Point> extract_frame_feature(const std::vector<Point>& group,
                                           const std::vector<double>* weights) {
    if (group.empty()) return std::nullopt;
    if (weights) {
        if (weights->size() != group.size())
            throw ValidationError("weight count does not match group size");
        for (double w : *weights)
            if (!(w > 0.0)) throw ValidationError("feature weights must be positive");
    }
    double sx = 0.0, sy = 0.0, sw = 0.0;
    double xmin = group[0].x, xmax = group[0].x, ymin = group[0].y, ymax = group[0].y;
    for (std::size_t i = 0; i < group.size(); ++i) {
        double w = weights ? (*weights)[i] : 1.0;
        sx += w * group[i].x;
        sy += w * group[i].y;
        sw += w;
        xmin = std::min(xmin, group[i].x);
        xmax = std::max(xmax, group[i].x);
        ymin = std::min(ymin, group[i].y);
        ymax = std::max(ymax, group[i].y);
    }
    // The mean can drift past the extremes by an ulp; the containment
    // property (between the smallest and largest sample) is part of the
    // contract, so pin it.
    return Point{std::clamp(sx / sw, xmin, xmax), std::clamp(sy / sw, ymin, ymax)};
}

PointSeries fill_gaps(const std::vector<std::optional<Point>>& series, CoordSpace space) {
    std::size_t first = series.size();
    for (std::size_t i = 0; i < series.size(); ++i)
        if (series[i]) {
            first = i;
            break;
        }
    if (first == series.size())
        throw ValidationError("cannot fill gaps: no valid samples in series");

    PointSeries out;
    out.space = space;
    out.points.resize(series.size());

    // Leading absences hold the first present value.
    for (std::size_t i = 0; i <= first; ++i) out.points[i] = *series[first];

    std::size_t prev = first;
    for (std::size_t i = first + 1; i < series.size(); ++i) {
        if (!series[i]) continue;
        const Point a = *series[prev];
        const Point b = *series[i];
        const double span = static_cast<double>(i - prev);
        for (std::size_t j = prev + 1; j < i; ++j) {
            double t = static_cast<double>(j - prev) / span;
            out.points[j] = {a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)};
        }
        out.points[i] = b;
        prev = i;
    }
    // Trailing absences hold the last present value.
    for (std::size_t i = prev + 1; i < series.size(); ++i) out.points[i] = *series[prev];
    return out;
}

PointSeries rescale_coords(const PointSeries& series, const FrameDims& dims) {
    dims.validate();
    const double sx = static_cast<double>(dims.width_px) / dims.disp_width_px;
    const double sy = static_cast<double>(dims.height_px) / dims.disp_height_px;
    PointSeries out;
    out.space = CoordSpace::pixels_original;
    out.points.reserve(series.size());
    for (const Point& p : series.points) out.points.push_back({p.x * sx, p.y * sy});
    return out;
}

namespace {

// Stage 1: a single interior sample jumping away from both neighbors by
// more than theta snaps to the nearer neighbor (ties go left).
void filter_stage1(std::vector<double>& v, double theta) {
    if (v.size() < 3) return;
    for (std::size_t i = 1; i + 1 < v.size(); ++i) {
        const double dl = v[i] - v[i - 1];
        const double dr = v[i] - v[i + 1];
        if (dl * dr > 0.0 && std::abs(dl) > theta && std::abs(dr) > theta)
            v[i] = (std::abs(dl) <= std::abs(dr)) ? v[i - 1] : v[i + 1];
    }
}

// Stage 2: two consecutive samples deviating on the same side of the line
// through their outer neighbors by more than theta are replaced by that
// line's values.
void filter_stage2(std::vector<double>& v, double theta) {
    if (v.size() < 4) return;
    for (std::size_t i = 1; i + 2 < v.size(); ++i) {
        const double a = v[i - 1];
        const double b = v[i + 2];
        const double l1 = a + (b - a) / 3.0;
        const double l2 = a + 2.0 * (b - a) / 3.0;
        const double d1 = v[i] - l1;
        const double d2 = v[i + 1] - l2;
        if (d1 * d2 > 0.0 && std::abs(d1) > theta && std::abs(d2) > theta) {
            v[i] = l1;
            v[i + 1] = l2;
        }
    }
}

}  // namespace

PointSeries heuristic_filter(const PointSeries& series, const FilterConfig& cfg) {
    cfg.validate();
    const std::size_t n = series.size();
    std::vector<double> xs(n), ys(n);
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = series.points[i].x;
        ys[i] = series.points[i].y;
    }
    filter_stage1(xs, cfg.theta1);
    filter_stage1(ys, cfg.theta1);
    filter_stage2(xs, cfg.theta2);
    filter_stage2(ys, cfg.theta2);
    PointSeries out;
    out.space = series.space;
    out.points.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.points[i] = {xs[i], ys[i]};
    return out;
}

PointSeries normalize(const PointSeries& series, const FrameDims& dims) {
    dims.validate();
    PointSeries out;
    out.space = CoordSpace::normalized;
    out.points.reserve(series.size());
    for (const Point& p : series.points)
        out.points.push_back({p.x / dims.width_px, p.y / dims.height_px});
    out.validate();
    return out;
}

PointSeries denormalize(const PointSeries& series, const FrameDims& dims) {
    dims.validate();
    PointSeries out;
    out.space = CoordSpace::pixels_original;
    out.points.reserve(series.size());
    for (const Point& p : series.points)
        out.points.push_back({p.x * dims.width_px, p.y * dims.height_px});
    return out;
}

std::vector<Window24> make_windows(const PointSeries& series) {
    const std::size_t n = series.size();
    if (n == 0) throw ValidationError("cannot window an empty series");
    const std::size_t n_windows = (n + kWindowLen - 1) / kWindowLen;
    std::vector<Window24> windows(n_windows);
    for (std::size_t w = 0; w < n_windows; ++w) {
        Window24& win = windows[w];
        win.origin_index = w * kWindowLen;
        const std::size_t avail = n - win.origin_index;
        const std::size_t real = avail < kWindowLen ? avail : kWindowLen;
        win.padded_tail = kWindowLen - real;
        for (std::size_t i = 0; i < real; ++i) win.steps[i] = series.points[win.origin_index + i];
        for (std::size_t i = real; i < kWindowLen; ++i) win.steps[i] = win.steps[real - 1];
    }
    return windows;
}

Padded30 mirror_pad(const Window24& w) {
    Padded30 p;
    p.steps[0] = w.steps[3];
    p.steps[1] = w.steps[2];
    p.steps[2] = w.steps[1];
    for (std::size_t i = 0; i < kWindowLen; ++i) p.steps[3 + i] = w.steps[i];
    p.steps[27] = w.steps[22];
    p.steps[28] = w.steps[21];
    p.steps[29] = w.steps[20];
    return p;
}

}  // namespace eyelstm

#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "eyelstm/types.hpp"

namespace eyelstm {

// All numeric text I/O uses up to 17 significant decimal digits so 64-bit
// values round-trip exactly.
std::string format_double(double v);

// --- tracker boxes: 4 numbers per line (x,y,w,h), comma/tab/space
//     separators, frame index = 0-based line order -----------------------
std::vector<TrackBox> parse_track_file(std::istream& in);
std::vector<TrackBox> parse_track_file(const std::string& text);
void write_track_file(std::ostream& out, const std::vector<TrackBox>& boxes);

// --- eye samples: header `timestamp_ms,x,y,valid` -----------------------
std::vector<EyeSample> parse_eye_file(std::istream& in);
std::vector<EyeSample> parse_eye_file(const std::string& text);
void write_eye_file(std::ostream& out, const std::vector<EyeSample>& samples);

// --- ground truth: header `frame,x,y`, centers in original pixels -------
std::vector<Point> parse_truth_file(std::istream& in);
void write_truth_file(std::ostream& out, const std::vector<Point>& centers);

// --- processed features: header `frame,x,y,space` -----------------------
PointSeries parse_features_file(std::istream& in);
void write_features_file(std::ostream& out, const PointSeries& series);

// --- fusion output: one row per (window, step) ---------------------------
struct FusionRow {
    std::int64_t window = 0;
    std::int64_t step = 0;
    Point fused, eye, track, label;
};
extern const char* const kFusionHeader;
std::vector<FusionRow> parse_fusion_file(std::istream& in);
void write_fusion_file(std::ostream& out, const std::vector<FusionRow>& rows);

// --- metrics rows: header `algorithm,dataset,rmse,rmspe,mae,mape,n_terms,n_skipped`
struct MetricsRow {
    std::string algorithm;
    std::string dataset;
    double rmse = 0.0;
    std::optional<double> rmspe_pct;
    double mae = 0.0;
    std::optional<double> mape_pct;
    std::size_t n_terms = 0;
    std::size_t n_skipped = 0;
};
extern const char* const kMetricsHeader;
std::vector<MetricsRow> parse_metrics_file(std::istream& in);
void write_metrics_file(std::ostream& out, const std::vector<MetricsRow>& rows);

// File-path conveniences. Readers throw FormatError when the file cannot
// be opened; writers throw on open failure as well.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

std::vector<TrackBox> load_track_file(const std::string& path);
std::vector<EyeSample> load_eye_file(const std::string& path);
std::vector<Point> load_truth_file(const std::string& path);
PointSeries load_features_file(const std::string& path);
std::vector<FusionRow> load_fusion_file(const std::string& path);
std::vector<MetricsRow> load_metrics_file(const std::string& path);

void save_track_file(const std::string& path, const std::vector<TrackBox>& boxes);
void save_eye_file(const std::string& path, const std::vector<EyeSample>& samples);
void save_truth_file(const std::string& path, const std::vector<Point>& centers);
void save_features_file(const std::string& path, const PointSeries& series);
void save_fusion_file(const std::string& path, const std::vector<FusionRow>& rows);
void save_metrics_file(const std::string& path, const std::vector<MetricsRow>& rows);

}  // namespace eyelstm

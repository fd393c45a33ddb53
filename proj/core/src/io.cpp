#include "eyelstm/io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "eyelstm/errors.hpp"

namespace eyelstm {

namespace {

// Strips a trailing '\r' so CRLF files parse the same as LF files.
bool next_line(std::istream& in, std::string& line) {
    if (!std::getline(in, line)) return false;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
}

bool is_blank(const std::string& s) {
    for (char c : s)
        if (c != ' ' && c != '\t') return false;
    return true;
}

std::vector<std::string> split_fields(const std::string& line, const char* seps) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < line.size()) {
        std::size_t j = line.find_first_of(seps, i);
        if (j == std::string::npos) j = line.size();
        out.push_back(line.substr(i, j - i));
        i = j + 1;
    }
    return out;
}

double parse_number(const std::string& field, std::size_t line_no) {
    const char* begin = field.c_str();
    char* end = nullptr;
    errno = 0;
    double v = std::strtod(begin, &end);
    if (end == begin || *end != '\0' || errno == ERANGE || !std::isfinite(v))
        throw ParseError("expected a finite number, got '" + field + "'", line_no);
    return v;
}

// Mixed comma/tab/space separators; empty tokens (from runs of spaces)
// are dropped so "10  20" splits into two fields.
std::vector<double> parse_number_line(const std::string& line, std::size_t line_no) {
    std::vector<double> out;
    for (const auto& f : split_fields(line, ", \t")) {
        if (f.empty()) continue;
        out.push_back(parse_number(f, line_no));
    }
    return out;
}

void expect_header(std::istream& in, const std::string& want) {
    std::string line;
    if (!next_line(in, line) || line != want)
        throw FormatError("missing or wrong header, expected '" + want + "'");
}

}  // namespace

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string to_string(CoordSpace space) {
    switch (space) {
        case CoordSpace::pixels_original: return "pixels_original";
        case CoordSpace::pixels_display: return "pixels_display";
        case CoordSpace::normalized: return "normalized";
    }
    throw ValidationError("unknown coordinate space tag");
}

CoordSpace coord_space_from_string(const std::string& s) {
    if (s == "pixels_original") return CoordSpace::pixels_original;
    if (s == "pixels_display") return CoordSpace::pixels_display;
    if (s == "normalized") return CoordSpace::normalized;
    throw ValidationError("unknown coordinate space '" + s + "'");
}

void PointSeries::validate() const {
    for (const Point& p : points) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y))
            throw ValidationError("point series contains a non-finite coordinate");
        if (space == CoordSpace::normalized &&
            (p.x < -0.5 || p.x > 1.5 || p.y < -0.5 || p.y > 1.5))
            throw ValidationError("normalized coordinate outside [-0.5, 1.5]");
    }
}

std::vector<TrackBox> parse_track_file(std::istream& in) {
    std::vector<TrackBox> boxes;
    std::string line;
    std::size_t line_no = 0;
    std::int64_t frame = 0;
    while (next_line(in, line)) {
        ++line_no;
        if (is_blank(line)) continue;
        auto nums = parse_number_line(line, line_no);
        if (nums.size() != 4)
            throw ParseError("expected 4 numbers (x,y,w,h), got " + std::to_string(nums.size()),
                             line_no);
        if (nums[2] <= 0.0 || nums[3] <= 0.0)
            throw ValidationError("box width/height must be positive (line " +
                                  std::to_string(line_no) + ")");
        boxes.push_back({frame++, nums[0], nums[1], nums[2], nums[3]});
    }
    return boxes;
}

std::vector<TrackBox> parse_track_file(const std::string& text) {
    std::istringstream in(text);
    return parse_track_file(in);
}

void write_track_file(std::ostream& out, const std::vector<TrackBox>& boxes) {
    for (const TrackBox& b : boxes)
        out << format_double(b.x_px) << ',' << format_double(b.y_px) << ','
            << format_double(b.w_px) << ',' << format_double(b.h_px) << '\n';
}

std::vector<EyeSample> parse_eye_file(std::istream& in) {
    expect_header(in, "timestamp_ms,x,y,valid");
    std::vector<EyeSample> samples;
    std::string line;
    std::size_t line_no = 1;
    while (next_line(in, line)) {
        ++line_no;
        if (is_blank(line)) continue;
        auto fields = split_fields(line, ",");
        if (fields.size() != 4)
            throw ParseError("expected 4 fields (timestamp_ms,x,y,valid)", line_no);
        EyeSample s;
        s.t_ms = parse_number(fields[0], line_no);
        s.x_px = parse_number(fields[1], line_no);
        s.y_px = parse_number(fields[2], line_no);
        if (fields[3] == "1")
            s.valid = true;
        else if (fields[3] == "0")
            s.valid = false;
        else
            throw ParseError("valid flag must be 0 or 1, got '" + fields[3] + "'", line_no);
        if (s.t_ms < 0.0)
            throw ValidationError("negative timestamp (line " + std::to_string(line_no) + ")");
        if (!samples.empty() && s.t_ms <= samples.back().t_ms)
            throw ValidationError("timestamps must be strictly increasing (line " +
                                  std::to_string(line_no) + ")");
        samples.push_back(s);
    }
    return samples;
}

std::vector<EyeSample> parse_eye_file(const std::string& text) {
    std::istringstream in(text);
    return parse_eye_file(in);
}

void write_eye_file(std::ostream& out, const std::vector<EyeSample>& samples) {
    out << "timestamp_ms,x,y,valid\n";
    for (const EyeSample& s : samples)
        out << format_double(s.t_ms) << ',' << format_double(s.x_px) << ','
            << format_double(s.y_px) << ',' << (s.valid ? '1' : '0') << '\n';
}

std::vector<Point> parse_truth_file(std::istream& in) {
    expect_header(in, "frame,x,y");
    std::vector<Point> centers;
    std::string line;
    std::size_t line_no = 1;
    while (next_line(in, line)) {
        ++line_no;
        if (is_blank(line)) continue;
        auto nums = parse_number_line(line, line_no);
        if (nums.size() != 3) throw ParseError("expected 3 fields (frame,x,y)", line_no);
        centers.push_back({nums[1], nums[2]});
    }
    return centers;
}

void write_truth_file(std::ostream& out, const std::vector<Point>& centers) {
    out << "frame,x,y\n";
    for (std::size_t i = 0; i < centers.size(); ++i)
        out << i << ',' << format_double(centers[i].x) << ',' << format_double(centers[i].y)
            << '\n';
}

PointSeries parse_features_file(std::istream& in) {
    expect_header(in, "frame,x,y,space");
    PointSeries series;
    bool space_set = false;
    std::string line;
    std::size_t line_no = 1;
    while (next_line(in, line)) {
        ++line_no;
        if (is_blank(line)) continue;
        auto fields = split_fields(line, ",");
        if (fields.size() != 4) throw ParseError("expected 4 fields (frame,x,y,space)", line_no);
        CoordSpace space = coord_space_from_string(fields[3]);
        if (!space_set) {
            series.space = space;
            space_set = true;
        } else if (space != series.space) {
            throw ParseError("mixed coordinate spaces in one file", line_no);
        }
        series.points.push_back({parse_number(fields[1], line_no), parse_number(fields[2], line_no)});
    }
    series.validate();
    return series;
}

void write_features_file(std::ostream& out, const PointSeries& series) {
    out << "frame,x,y,space\n";
    const std::string space = to_string(series.space);
    for (std::size_t i = 0; i < series.points.size(); ++i)
        out << i << ',' << format_double(series.points[i].x) << ','
            << format_double(series.points[i].y) << ',' << space << '\n';
}

const char* const kFusionHeader =
    "window,step,fused_x,fused_y,eye_x,eye_y,track_x,track_y,label_x,label_y";

std::vector<FusionRow> parse_fusion_file(std::istream& in) {
    expect_header(in, kFusionHeader);
    std::vector<FusionRow> rows;
    std::string line;
    std::size_t line_no = 1;
    while (next_line(in, line)) {
        ++line_no;
        if (is_blank(line)) continue;
        auto nums = parse_number_line(line, line_no);
        if (nums.size() != 10) throw ParseError("expected 10 fields", line_no);
        FusionRow r;
        r.window = static_cast<std::int64_t>(nums[0]);
        r.step = static_cast<std::int64_t>(nums[1]);
        r.fused = {nums[2], nums[3]};
        r.eye = {nums[4], nums[5]};
        r.track = {nums[6], nums[7]};
        r.label = {nums[8], nums[9]};
        rows.push_back(r);
    }
    return rows;
}

void write_fusion_file(std::ostream& out, const std::vector<FusionRow>& rows) {
    out << kFusionHeader << '\n';
    for (const FusionRow& r : rows)
        out << r.window << ',' << r.step << ',' << format_double(r.fused.x) << ','
            << format_double(r.fused.y) << ',' << format_double(r.eye.x) << ','
            << format_double(r.eye.y) << ',' << format_double(r.track.x) << ','
            << format_double(r.track.y) << ',' << format_double(r.label.x) << ','
            << format_double(r.label.y) << '\n';
}

const char* const kMetricsHeader = "algorithm,dataset,rmse,rmspe,mae,mape,n_terms,n_skipped";

namespace {

std::optional<double> parse_optional_number(const std::string& field, std::size_t line_no) {
    if (field == "nan" || field.empty()) return std::nullopt;
    return parse_number(field, line_no);
}

std::string format_optional(const std::optional<double>& v) {
    return v ? format_double(*v) : std::string("nan");
}

}  // namespace

std::vector<MetricsRow> parse_metrics_file(std::istream& in) {
    expect_header(in, kMetricsHeader);
    std::vector<MetricsRow> rows;
    std::string line;
    std::size_t line_no = 1;
    while (next_line(in, line)) {
        ++line_no;
        if (is_blank(line)) continue;
        auto fields = split_fields(line, ",");
        if (fields.size() != 8) throw ParseError("expected 8 fields", line_no);
        MetricsRow r;
        r.algorithm = fields[0];
        r.dataset = fields[1];
        r.rmse = parse_number(fields[2], line_no);
        r.rmspe_pct = parse_optional_number(fields[3], line_no);
        r.mae = parse_number(fields[4], line_no);
        r.mape_pct = parse_optional_number(fields[5], line_no);
        r.n_terms = static_cast<std::size_t>(parse_number(fields[6], line_no));
        r.n_skipped = static_cast<std::size_t>(parse_number(fields[7], line_no));
        rows.push_back(r);
    }
    return rows;
}

void write_metrics_file(std::ostream& out, const std::vector<MetricsRow>& rows) {
    out << kMetricsHeader << '\n';
    for (const MetricsRow& r : rows)
        out << r.algorithm << ',' << r.dataset << ',' << format_double(r.rmse) << ','
            << format_optional(r.rmspe_pct) << ',' << format_double(r.mae) << ','
            << format_optional(r.mape_pct) << ',' << r.n_terms << ',' << r.n_skipped << '\n';
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot open file for writing: " + path);
    out << content;
    if (!out) throw FormatError("write failed: " + path);
}

namespace {

template <typename Parser>
auto load_with(const std::string& path, Parser parser) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open file: " + path);
    return parser(in);
}

template <typename T, typename Writer>
void save_with(const std::string& path, const T& value, Writer writer) {
    std::ostringstream out;
    writer(out, value);
    write_text_file(path, out.str());
}

}  // namespace

std::vector<TrackBox> load_track_file(const std::string& path) {
    return load_with(path, [](std::istream& in) { return parse_track_file(in); });
}
std::vector<EyeSample> load_eye_file(const std::string& path) {
    return load_with(path, [](std::istream& in) { return parse_eye_file(in); });
}
std::vector<Point> load_truth_file(const std::string& path) {
    return load_with(path, [](std::istream& in) { return parse_truth_file(in); });
}
PointSeries load_features_file(const std::string& path) {
    return load_with(path, [](std::istream& in) { return parse_features_file(in); });
}
std::vector<FusionRow> load_fusion_file(const std::string& path) {
    return load_with(path, [](std::istream& in) { return parse_fusion_file(in); });
}
std::vector<MetricsRow> load_metrics_file(const std::string& path) {
    return load_with(path, [](std::istream& in) { return parse_metrics_file(in); });
}

void save_track_file(const std::string& path, const std::vector<TrackBox>& boxes) {
    save_with(path, boxes, [](std::ostream& o, const auto& v) { write_track_file(o, v); });
}
void save_eye_file(const std::string& path, const std::vector<EyeSample>& samples) {
    save_with(path, samples, [](std::ostream& o, const auto& v) { write_eye_file(o, v); });
}
void save_truth_file(const std::string& path, const std::vector<Point>& centers) {
    save_with(path, centers, [](std::ostream& o, const auto& v) { write_truth_file(o, v); });
}
void save_features_file(const std::string& path, const PointSeries& series) {
    save_with(path, series, [](std::ostream& o, const auto& v) { write_features_file(o, v); });
}
void save_fusion_file(const std::string& path, const std::vector<FusionRow>& rows) {
    save_with(path, rows, [](std::ostream& o, const auto& v) { write_fusion_file(o, v); });
}
void save_metrics_file(const std::string& path, const std::vector<MetricsRow>& rows) {
    save_with(path, rows, [](std::ostream& o, const auto& v) { write_metrics_file(o, v); });
}

}  // namespace eyelstm

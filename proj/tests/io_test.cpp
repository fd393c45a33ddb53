#include <doctest.h>

#include <sstream>

#include "eyelstm/io.hpp"
#include "eyelstm/rng.hpp"

using namespace eyelstm;

TEST_CASE("parse_track_file maps lines to boxes with 0-based frames") {
    auto boxes = parse_track_file("10,20,30,40\n11,21,30,40");
    REQUIRE(boxes.size() == 2);
    CHECK(boxes[0].frame == 0);
    CHECK(boxes[0].x_px == 10);
    CHECK(boxes[0].y_px == 20);
    CHECK(boxes[0].w_px == 30);
    CHECK(boxes[0].h_px == 40);
    CHECK(boxes[1].frame == 1);
    CHECK(boxes[1].x_px == 11);
}

TEST_CASE("parse_track_file accepts tab separators") {
    auto boxes = parse_track_file("10\t20\t30\t40");
    REQUIRE(boxes.size() == 1);
    CHECK(boxes[0].x_px == 10);
    CHECK(boxes[0].h_px == 40);
}

TEST_CASE("parse_track_file rejects non-positive width") {
    CHECK_THROWS_AS(parse_track_file("10,20,0,40"), ValidationError);
    try {
        parse_track_file("10,20,30,40\n10,20,30,-1");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
}

TEST_CASE("parse_track_file rejects malformed lines with the line number") {
    CHECK_THROWS_AS(parse_track_file("10,20,30"), ParseError);
    try {
        parse_track_file("1,2,3,4\noops");
    } catch (const ParseError& e) {
        CHECK(e.line == 2);
    }
}

TEST_CASE("parse_track_file is separator-agnostic") {
    auto a = parse_track_file("1.5,2.25,3,4\n5,6,7,8");
    auto b = parse_track_file("1.5\t2.25\t3\t4\n5\t6\t7\t8");
    auto c = parse_track_file("1.5 2.25 3 4\n5 6 7 8");
    REQUIRE(a.size() == b.size());
    REQUIRE(a.size() == c.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].x_px == b[i].x_px);
        CHECK(a[i].x_px == c[i].x_px);
        CHECK(a[i].h_px == b[i].h_px);
        CHECK(a[i].h_px == c[i].h_px);
    }
}

TEST_CASE("track file round trip is exact for 17-digit decimals") {
    Rng rng(42);
    std::vector<TrackBox> boxes;
    for (int i = 0; i < 50; ++i)
        boxes.push_back({i, rng.uniform(-1000, 1000), rng.uniform(-1000, 1000),
                         rng.uniform(0.001, 500), rng.uniform(0.001, 500)});
    std::ostringstream out;
    write_track_file(out, boxes);
    auto parsed = parse_track_file(out.str());
    REQUIRE(parsed.size() == boxes.size());
    for (std::size_t i = 0; i < boxes.size(); ++i) {
        CHECK(parsed[i].x_px == boxes[i].x_px);
        CHECK(parsed[i].y_px == boxes[i].y_px);
        CHECK(parsed[i].w_px == boxes[i].w_px);
        CHECK(parsed[i].h_px == boxes[i].h_px);
    }
}

TEST_CASE("parse_eye_file reads header and validity flags") {
    auto samples = parse_eye_file("timestamp_ms,x,y,valid\n0,100,50,1\n18,101,51,1");
    REQUIRE(samples.size() == 2);
    CHECK(samples[0].t_ms == 0);
    CHECK(samples[1].t_ms == 18);
    CHECK(samples[0].valid);

    auto with_invalid = parse_eye_file("timestamp_ms,x,y,valid\n0,100,50,1\n18,0,0,0");
    REQUIRE(with_invalid.size() == 2);
    CHECK(with_invalid[0].valid);
    CHECK_FALSE(with_invalid[1].valid);
}

TEST_CASE("parse_eye_file rejects missing header and non-monotone timestamps") {
    CHECK_THROWS_AS(parse_eye_file("0,100,50,1"), FormatError);
    CHECK_THROWS_AS(parse_eye_file("timestamp_ms,x,y,valid\n18,1,1,1\n0,1,1,1"), ValidationError);
    CHECK_THROWS_AS(parse_eye_file("timestamp_ms,x,y,valid\n5,1,1,1\n5,1,1,1"), ValidationError);
}

TEST_CASE("eye file round trip is exact") {
    Rng rng(7);
    std::vector<EyeSample> samples;
    double t = 0;
    for (int i = 0; i < 40; ++i) {
        t += rng.uniform(1, 30);
        samples.push_back({t, rng.uniform(-10, 1500), rng.uniform(-10, 950), rng.uniform01() < 0.9});
    }
    std::ostringstream out;
    write_eye_file(out, samples);
    auto parsed = parse_eye_file(out.str());
    REQUIRE(parsed.size() == samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        CHECK(parsed[i].t_ms == samples[i].t_ms);
        CHECK(parsed[i].x_px == samples[i].x_px);
        CHECK(parsed[i].y_px == samples[i].y_px);
        CHECK(parsed[i].valid == samples[i].valid);
    }
}

TEST_CASE("bbox_center arithmetic") {
    CHECK(bbox_center({0, 10, 20, 30, 40}).x == 25);
    CHECK(bbox_center({0, 10, 20, 30, 40}).y == 40);
    CHECK(bbox_center({0, 0, 0, 2, 2}).x == 1);
    CHECK(bbox_center({0, 0, 0, 2, 2}).y == 1);
    CHECK(bbox_center({0, 5.5, 0, 1, 3}).x == 6);
    CHECK(bbox_center({0, 5.5, 0, 1, 3}).y == 1.5);
}

TEST_CASE("bbox_center lies strictly inside the box") {
    Rng rng(11);
    for (int i = 0; i < 200; ++i) {
        TrackBox b{0, rng.uniform(-100, 100), rng.uniform(-100, 100), rng.uniform(0.01, 50),
                   rng.uniform(0.01, 50)};
        Point c = bbox_center(b);
        CHECK(c.x > b.x_px);
        CHECK(c.x < b.x_px + b.w_px);
        CHECK(c.y > b.y_px);
        CHECK(c.y < b.y_px + b.h_px);
    }
}

TEST_CASE("truth and features files round trip") {
    Rng rng(3);
    std::vector<Point> centers;
    for (int i = 0; i < 30; ++i) centers.push_back({rng.uniform(0, 720), rng.uniform(0, 400)});
    std::ostringstream out;
    write_truth_file(out, centers);
    std::istringstream in(out.str());
    auto parsed = parse_truth_file(in);
    REQUIRE(parsed.size() == centers.size());
    for (std::size_t i = 0; i < centers.size(); ++i) {
        CHECK(parsed[i].x == centers[i].x);
        CHECK(parsed[i].y == centers[i].y);
    }

    PointSeries series;
    series.space = CoordSpace::normalized;
    for (int i = 0; i < 30; ++i) series.points.push_back({rng.uniform01(), rng.uniform01()});
    std::ostringstream fout;
    write_features_file(fout, series);
    std::istringstream fin(fout.str());
    PointSeries fparsed = parse_features_file(fin);
    CHECK(fparsed.space == CoordSpace::normalized);
    REQUIRE(fparsed.size() == series.size());
    for (std::size_t i = 0; i < series.size(); ++i) {
        CHECK(fparsed.points[i].x == series.points[i].x);
        CHECK(fparsed.points[i].y == series.points[i].y);
    }
}

TEST_CASE("fusion and metrics files round trip") {
    Rng rng(5);
    std::vector<FusionRow> rows;
    for (int w = 0; w < 3; ++w)
        for (int s = 0; s < 24; ++s) {
            FusionRow r;
            r.window = w;
            r.step = s;
            r.fused = {rng.uniform01(), rng.uniform01()};
            r.eye = {rng.uniform01(), rng.uniform01()};
            r.track = {rng.uniform01(), rng.uniform01()};
            r.label = {rng.uniform01(), rng.uniform01()};
            rows.push_back(r);
        }
    std::ostringstream out;
    write_fusion_file(out, rows);
    std::istringstream in(out.str());
    auto parsed = parse_fusion_file(in);
    REQUIRE(parsed.size() == rows.size());
    CHECK(parsed[50].fused.x == rows[50].fused.x);
    CHECK(parsed[50].label.y == rows[50].label.y);

    std::vector<MetricsRow> mrows;
    MetricsRow m;
    m.algorithm = "eyelstm";
    m.dataset = "occlusion";
    m.rmse = 0.0123456789012345;
    m.rmspe_pct = 4.25;
    m.mae = 0.01;
    m.mape_pct = std::nullopt;
    m.n_terms = 816;
    m.n_skipped = 0;
    mrows.push_back(m);
    std::ostringstream mout;
    write_metrics_file(mout, mrows);
    std::istringstream min(mout.str());
    auto mparsed = parse_metrics_file(min);
    REQUIRE(mparsed.size() == 1);
    CHECK(mparsed[0].algorithm == "eyelstm");
    CHECK(mparsed[0].rmse == m.rmse);
    CHECK(mparsed[0].rmspe_pct == m.rmspe_pct);
    CHECK_FALSE(mparsed[0].mape_pct.has_value());
    CHECK(mparsed[0].n_terms == 816);
}

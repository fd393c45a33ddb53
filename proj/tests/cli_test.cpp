#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "eyelstm/io.hpp"

namespace fs = std::filesystem;
using namespace eyelstm;

namespace {

const char* cli_path() { return EYELSTM_CLI_PATH; }

struct RunResult {
    int exit_code;
    std::string output;  // stdout + stderr
};

RunResult run(const std::string& args) {
    const std::string cmd = std::string(cli_path()) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string output;
    char buf[512];
    while (std::fgets(buf, sizeof(buf), pipe)) output += buf;
    const int status = pclose(pipe);
    return {WEXITSTATUS(status), output};
}

// Fresh directory per test case under the build tree.
fs::path fresh_dir(const std::string& name) {
    fs::path dir = fs::path("cli_test_work") / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

TEST_CASE("simulate writes three deterministic files") {
    auto dir = fresh_dir("simulate");
    auto r1 = run("simulate --scenario occlusion --seed 7 --duration-s 5 --out " + dir.string());
    CHECK(r1.exit_code == 0);
    CHECK(r1.output.find("truth.csv") != std::string::npos);
    CHECK(fs::exists(dir / "truth.csv"));
    CHECK(fs::exists(dir / "eye.csv"));
    CHECK(fs::exists(dir / "track.csv"));

    const std::string truth1 = slurp(dir / "truth.csv");
    const std::string eye1 = slurp(dir / "eye.csv");
    const std::string track1 = slurp(dir / "track.csv");

    auto r2 = run("simulate --scenario occlusion --seed 7 --duration-s 5 --out " + dir.string());
    CHECK(r2.exit_code == 0);
    CHECK(slurp(dir / "truth.csv") == truth1);
    CHECK(slurp(dir / "eye.csv") == eye1);
    CHECK(slurp(dir / "track.csv") == track1);

    // 5 s at 70 ms -> 71 frames; at 18 ms -> 278 + 1 samples
    CHECK(load_truth_file((dir / "truth.csv").string()).size() == 71);
    CHECK(load_eye_file((dir / "eye.csv").string()).size() == 278);
    CHECK(load_track_file((dir / "track.csv").string()).size() == 71);
}

TEST_CASE("simulate rejects an unknown scenario with exit 2") {
    auto dir = fresh_dir("simulate_bad");
    auto r = run("simulate --scenario bird1 --out " + dir.string());
    CHECK(r.exit_code == 2);
    CHECK(r.output.find("occlusion") != std::string::npos);  // lists valid names
}

TEST_CASE("missing subcommand and unknown flags are usage errors") {
    CHECK(run("").exit_code == 2);
    CHECK(run("simulate --scenario occlusion --no-such-flag 1").exit_code == 2);
    CHECK(run("--help").exit_code == 0);
}

TEST_CASE("preprocess produces aligned normalized features") {
    auto dir = fresh_dir("preprocess");
    REQUIRE(run("simulate --scenario deformation --seed 3 --duration-s 5 --out " + dir.string())
                .exit_code == 0);
    auto r = run("preprocess --eye " + (dir / "eye.csv").string() + " --track " +
                 (dir / "track.csv").string() + " --out " + dir.string());
    CHECK(r.exit_code == 0);
    PointSeries eye_f = load_features_file((dir / "eye_features.csv").string());
    PointSeries track_f = load_features_file((dir / "track_features.csv").string());
    CHECK(eye_f.space == CoordSpace::normalized);
    CHECK(eye_f.size() == 71);
    CHECK(track_f.size() == 71);
}

TEST_CASE("preprocess fails with exit 1 when every sample is invalid") {
    auto dir = fresh_dir("preprocess_invalid");
    std::ofstream eye(dir / "eye.csv");
    eye << "timestamp_ms,x,y,valid\n0,0,0,0\n18,0,0,0\n";
    eye.close();
    std::ofstream track(dir / "track.csv");
    track << "10,20,30,40\n11,21,30,40\n";
    track.close();
    auto r = run("preprocess --eye " + (dir / "eye.csv").string() + " --track " +
                 (dir / "track.csv").string() + " --out " + dir.string());
    CHECK(r.exit_code == 1);
    CHECK(r.output.find("no valid samples") != std::string::npos);
}

TEST_CASE("train fuse evaluate report compose end to end") {
    auto dir = fresh_dir("pipeline");
    const std::string d = dir.string() + "/";
    REQUIRE(run("simulate --scenario occlusion --seed 11 --duration-s 40 --out " + dir.string())
                .exit_code == 0);
    REQUIRE(run("preprocess --eye " + d + "eye.csv --track " + d + "track.csv --out " +
                dir.string())
                .exit_code == 0);

    // Tiny budget: this exercises plumbing, not accuracy.
    const std::string common = " --labels " + d + "truth.csv --epochs 3 --restarts 1 --seed 5";
    auto tr1 = run("train --kind eyelstm --features " + d + "eye_features.csv" + common +
                   " --model-out " + d + "eye.model --history-out " + d + "eye_history.csv");
    CHECK(tr1.exit_code == 0);
    auto tr2 = run("train --kind eyelstm --features " + d + "track_features.csv" + common +
                   " --model-out " + d + "track.model");
    CHECK(tr2.exit_code == 0);
    CHECK(fs::exists(dir / "eye_history.csv"));

    auto fu = run("fuse --eye-model " + d + "eye.model --track-model " + d +
                  "track.model --eye-features " + d + "eye_features.csv --track-features " + d +
                  "track_features.csv --truth " + d + "truth.csv --out " + dir.string());
    CHECK(fu.exit_code == 0);
    auto rows = load_fusion_file((dir / "fusion.csv").string());
    CHECK(rows.size() == 571);  // 40 s -> 571 frames, padded tail dropped

    auto ev = run("evaluate --pred " + d + "fusion.csv --algorithm eyelstm --dataset occlusion" +
                  " --metrics-out " + d + "metrics.csv");
    CHECK(ev.exit_code == 0);
    auto ev2 = run("evaluate --pred " + d + "eye_features.csv --truth " + d +
                   "truth.csv --algorithm raw_eye --dataset occlusion --append --metrics-out " +
                   d + "metrics.csv");
    CHECK(ev2.exit_code == 0);
    auto metrics = load_metrics_file((dir / "metrics.csv").string());
    REQUIRE(metrics.size() == 2);
    CHECK(metrics[0].algorithm == "eyelstm");
    CHECK(metrics[1].algorithm == "raw_eye");

    auto rep = run("report --metrics " + d + "metrics.csv --csv-out " + d + "report.csv" +
                   " --table-out " + d + "report.txt");
    CHECK(rep.exit_code == 0);
    CHECK(rep.output.find("RMSE") != std::string::npos);
    CHECK(fs::exists(dir / "report.csv"));
    CHECK(fs::exists(dir / "report.txt"));
}

TEST_CASE("evaluate of the truth against itself is all zeros") {
    auto dir = fresh_dir("evaluate_self");
    const std::string d = dir.string() + "/";
    REQUIRE(run("simulate --scenario illumination --seed 2 --duration-s 5 --out " + dir.string())
                .exit_code == 0);
    auto r = run("evaluate --pred " + d + "truth.csv --truth " + d +
                 "truth.csv --algorithm self --dataset illumination --metrics-out " + d +
                 "metrics.csv");
    CHECK(r.exit_code == 0);
    auto rows = load_metrics_file((dir / "metrics.csv").string());
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].rmse == 0.0);
    CHECK(rows[0].mae == 0.0);
}

TEST_CASE("train rejects misaligned features and labels with exit 1") {
    auto dir = fresh_dir("train_misaligned");
    const std::string d = dir.string() + "/";
    REQUIRE(run("simulate --scenario occlusion --seed 4 --duration-s 5 --out " + dir.string())
                .exit_code == 0);
    REQUIRE(run("preprocess --eye " + d + "eye.csv --track " + d + "track.csv --out " +
                dir.string())
                .exit_code == 0);
    // Truncate the truth file to break alignment.
    auto truth = load_truth_file(d + "truth.csv");
    truth.pop_back();
    save_truth_file(d + "truth_short.csv", truth);
    auto r = run("train --kind mlp --features " + d + "eye_features.csv --labels " + d +
                 "truth_short.csv --model-out " + d + "m.model --epochs 2 --restarts 1");
    CHECK(r.exit_code == 1);
}

TEST_CASE("train rejects an unknown model kind with exit 2") {
    auto dir = fresh_dir("train_badkind");
    auto r = run("train --kind transformer --features x.csv --labels y.csv --model-out m");
    CHECK(r.exit_code == 2);
}

TEST_CASE("config file supplies defaults that flags override") {
    auto dir = fresh_dir("config");
    std::ofstream cfg(dir / "run.ini");
    cfg << "[simulate]\nscenario=occlusion\nduration-s=5\n";
    cfg.close();
    auto r = run("--config " + (dir / "run.ini").string() + " --seed 3 --out " + dir.string() +
                 " simulate");
    CHECK(r.exit_code == 0);
    CHECK(load_truth_file((dir / "truth.csv").string()).size() == 71);

    // Flag overrides the config's duration.
    auto r2 = run("--config " + (dir / "run.ini").string() + " --seed 3 --out " + dir.string() +
                  " simulate --duration-s 10");
    CHECK(r2.exit_code == 0);
    CHECK(load_truth_file((dir / "truth.csv").string()).size() == 142);
}

TEST_CASE("fuse warns but continues when stream lengths differ") {
    auto dir = fresh_dir("fuse_mismatch");
    const std::string d = dir.string() + "/";
    REQUIRE(run("simulate --scenario occlusion --seed 6 --duration-s 10 --out " + dir.string())
                .exit_code == 0);
    REQUIRE(run("preprocess --eye " + d + "eye.csv --track " + d + "track.csv --out " +
                dir.string())
                .exit_code == 0);
    const std::string common = " --labels " + d + "truth.csv --epochs 2 --restarts 1 --seed 5";
    REQUIRE(run("train --kind mlp --features " + d + "eye_features.csv" + common +
                " --model-out " + d + "eye.model")
                .exit_code == 0);
    REQUIRE(run("train --kind mlp --features " + d + "track_features.csv" + common +
                " --model-out " + d + "track.model")
                .exit_code == 0);

    // Shorten the track features to change its window count (142 -> 40).
    PointSeries track_f = load_features_file(d + "track_features.csv");
    track_f.points.resize(40);
    save_features_file(d + "track_short.csv", track_f);

    auto r = run("fuse --eye-model " + d + "eye.model --track-model " + d +
                 "track.model --eye-features " + d + "eye_features.csv --track-features " + d +
                 "track_short.csv --truth " + d + "truth.csv --out " + dir.string());
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("warning") != std::string::npos);
    auto rows = load_fusion_file((dir / "fusion.csv").string());
    CHECK(rows.size() == 40);  // min(6, 2) windows, tail trimmed to 40 real frames
}

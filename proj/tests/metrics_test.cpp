#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "eyelstm/metrics.hpp"
#include "eyelstm/rng.hpp"

using namespace eyelstm;

namespace {

// Independent direct-formula oracle; separate accumulation path from the
// implementation on purpose.
struct OracleResult {
    double rmse, mae;
    bool pct_defined;
    double rmspe, mape;
};

OracleResult metrics_oracle(const std::vector<double>& pred, const std::vector<double>& truth) {
    const std::size_t n = pred.size();
    double sq = 0, ab = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sq += (pred[i] - truth[i]) * (pred[i] - truth[i]);
        ab += std::fabs(pred[i] - truth[i]);
    }
    std::size_t m = 0;
    double psq = 0, pab = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (std::fabs(truth[i]) < 1e-8) continue;
        const double q = (pred[i] - truth[i]) / truth[i];
        psq += q * q;
        pab += std::fabs(q);
        ++m;
    }
    OracleResult r;
    r.rmse = std::sqrt(sq / double(n));
    r.mae = ab / double(n);
    r.pct_defined = m > 0;
    r.rmspe = m ? 100.0 * std::sqrt(psq / double(m)) : 0.0;
    r.mape = m ? 100.0 * pab / double(m) : 0.0;
    return r;
}

}  // namespace

TEST_CASE("perfect predictions give all-zero metrics") {
    std::vector<double> v{0.1, 0.2, 0.3, 0.4};
    MetricsReport r = evaluate(v, v);
    CHECK(r.rmse == 0.0);
    CHECK(r.mae == 0.0);
    REQUIRE(r.rmspe_pct.has_value());
    CHECK(*r.rmspe_pct == 0.0);
    CHECK(*r.mape_pct == 0.0);
    CHECK(r.n_terms == 4);
    CHECK(r.n_skipped == 0);
}

TEST_CASE("hand-computed two-coordinate example") {
    MetricsReport r = evaluate({1, 1}, {2, 2});
    CHECK(r.rmse == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(r.mae == doctest::Approx(1.0).epsilon(1e-15));
    REQUIRE(r.rmspe_pct.has_value());
    CHECK(*r.rmspe_pct == doctest::Approx(50.0).epsilon(1e-15));
    CHECK(*r.mape_pct == doctest::Approx(50.0).epsilon(1e-15));
}

TEST_CASE("zero labels leave the percentage metrics undefined") {
    MetricsReport r = evaluate({0, 0, 3, 4}, {0, 0, 0, 0});
    CHECK(r.rmse == doctest::Approx(2.5).epsilon(1e-15));
    CHECK(r.mae == doctest::Approx(7.0 / 4.0).epsilon(1e-15));
    CHECK_FALSE(r.rmspe_pct.has_value());
    CHECK_FALSE(r.mape_pct.has_value());
    CHECK(r.n_skipped == 4);
}

TEST_CASE("evaluate rejects mismatched or empty input") {
    CHECK_THROWS_AS(evaluate({1, 2}, {1}), DimensionError);
    CHECK_THROWS_AS(evaluate({}, {}), DimensionError);
}

TEST_CASE("evaluate agrees with the direct oracle on random vectors") {
    Rng rng(1);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + rng.index(60);
        std::vector<double> pred(n), truth(n);
        for (std::size_t i = 0; i < n; ++i) {
            pred[i] = rng.uniform(-2, 2);
            truth[i] = rng.uniform01() < 0.1 ? 0.0 : rng.uniform(-2, 2);
        }
        MetricsReport r = evaluate(pred, truth);
        OracleResult o = metrics_oracle(pred, truth);
        CHECK(r.rmse == doctest::Approx(o.rmse).epsilon(1e-12));
        CHECK(r.mae == doctest::Approx(o.mae).epsilon(1e-12));
        CHECK(r.rmspe_pct.has_value() == o.pct_defined);
        if (o.pct_defined) {
            CHECK(*r.rmspe_pct == doctest::Approx(o.rmspe).epsilon(1e-12));
            CHECK(*r.mape_pct == doctest::Approx(o.mape).epsilon(1e-12));
        }
        CHECK(r.rmse >= r.mae - 1e-15);
    }
}

TEST_CASE("metrics are permutation invariant and scale covariant") {
    Rng rng(2);
    std::vector<double> pred, truth;
    for (int i = 0; i < 40; ++i) {
        pred.push_back(rng.uniform(0.1, 2));
        truth.push_back(rng.uniform(0.1, 2));
    }
    MetricsReport base = evaluate(pred, truth);

    // Reverse both together.
    std::vector<double> rp(pred.rbegin(), pred.rend());
    std::vector<double> rt(truth.rbegin(), truth.rend());
    MetricsReport rev = evaluate(rp, rt);
    CHECK(rev.rmse == doctest::Approx(base.rmse).epsilon(1e-14));
    CHECK(rev.mae == doctest::Approx(base.mae).epsilon(1e-14));
    CHECK(*rev.mape_pct == doctest::Approx(*base.mape_pct).epsilon(1e-14));

    const double c = 3.5;
    std::vector<double> sp = pred, st = truth;
    for (double& v : sp) v *= c;
    for (double& v : st) v *= c;
    MetricsReport scaled = evaluate(sp, st);
    CHECK(scaled.rmse == doctest::Approx(c * base.rmse).epsilon(1e-12));
    CHECK(scaled.mae == doctest::Approx(c * base.mae).epsilon(1e-12));
    CHECK(*scaled.rmspe_pct == doctest::Approx(*base.rmspe_pct).epsilon(1e-12));
    CHECK(*scaled.mape_pct == doctest::Approx(*base.mape_pct).epsilon(1e-12));
}

TEST_CASE("compare_table renders rows and marks the best algorithm") {
    // Dyadic values so the 17-digit formatting stays short.
    MetricsRow a;
    a.algorithm = "mlp";
    a.dataset = "occlusion";
    a.rmse = 0.25;
    a.mae = 0.1875;
    a.rmspe_pct = 12.0;
    a.mape_pct = 9.0;
    MetricsRow b = a;
    b.algorithm = "eyelstm";
    b.rmse = 0.125;

    ComparisonTable single = compare_table({a});
    CHECK(single.text.find("mlp") != std::string::npos);
    CHECK(single.text.find("occlusion") != std::string::npos);
    CHECK(single.csv.find("mlp,occlusion") != std::string::npos);

    ComparisonTable both = compare_table({a, b});
    CHECK(both.text.find("0.1250*") != std::string::npos);
    // best flag set on the winner only
    CHECK(both.csv.find("eyelstm,occlusion,0.125,12,0.1875,9,1") != std::string::npos);
    CHECK(both.csv.find("mlp,occlusion,0.25,12,0.1875,9,0") != std::string::npos);
}

TEST_CASE("compare_table breaks RMSE ties by algorithm name order") {
    MetricsRow a;
    a.algorithm = "zeta";
    a.dataset = "d";
    a.rmse = 0.5;
    a.mae = 0.375;
    MetricsRow b = a;
    b.algorithm = "alpha";
    ComparisonTable t = compare_table({a, b});
    CHECK(t.csv.find("alpha,d,0.5,nan,0.375,nan,1") != std::string::npos);
    CHECK(t.csv.find("zeta,d,0.5,nan,0.375,nan,0") != std::string::npos);
}

TEST_CASE("compare_table rejects empty input") {
    CHECK_THROWS_AS(compare_table({}), ValidationError);
}

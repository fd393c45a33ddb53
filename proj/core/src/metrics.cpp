#include "eyelstm/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

namespace eyelstm {

MetricsReport evaluate(const std::vector<double>& pred, const std::vector<double>& truth) {
    if (pred.size() != truth.size())
        throw DimensionError("evaluate: prediction and truth lengths differ");
    if (pred.empty()) throw DimensionError("evaluate: empty input");

    double sq = 0.0, abs_sum = 0.0, pct_sq = 0.0, pct_abs = 0.0;
    std::size_t pct_terms = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double r = pred[i] - truth[i];
        sq += r * r;
        abs_sum += std::abs(r);
        if (std::abs(truth[i]) >= kPercentGuard) {
            const double q = r / truth[i];
            pct_sq += q * q;
            pct_abs += std::abs(q);
            ++pct_terms;
        }
    }

    MetricsReport rep;
    rep.n_terms = pred.size();
    rep.n_skipped = pred.size() - pct_terms;
    const auto n = static_cast<double>(pred.size());
    rep.rmse = std::sqrt(sq / n);
    rep.mae = abs_sum / n;
    if (pct_terms > 0) {
        const auto m = static_cast<double>(pct_terms);
        rep.rmspe_pct = 100.0 * std::sqrt(pct_sq / m);
        rep.mape_pct = 100.0 * (pct_abs / m);
    }
    return rep;
}

MetricsReport evaluate_points(const std::vector<Point>& pred, const std::vector<Point>& truth) {
    if (pred.size() != truth.size())
        throw DimensionError("evaluate: prediction and truth lengths differ");
    std::vector<double> p, t;
    p.reserve(pred.size() * 2);
    t.reserve(truth.size() * 2);
    for (std::size_t i = 0; i < pred.size(); ++i) {
        p.push_back(pred[i].x);
        p.push_back(pred[i].y);
        t.push_back(truth[i].x);
        t.push_back(truth[i].y);
    }
    return evaluate(p, t);
}

MetricsRow to_metrics_row(const std::string& algorithm, const std::string& dataset,
                          const MetricsReport& report) {
    MetricsRow row;
    row.algorithm = algorithm;
    row.dataset = dataset;
    row.rmse = report.rmse;
    row.rmspe_pct = report.rmspe_pct;
    row.mae = report.mae;
    row.mape_pct = report.mape_pct;
    row.n_terms = report.n_terms;
    row.n_skipped = report.n_skipped;
    return row;
}

namespace {

std::string fixed4(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

std::string cell(const std::optional<double>& v) { return v ? fixed4(*v) : std::string("-"); }

}  // namespace

ComparisonTable compare_table(const std::vector<MetricsRow>& rows) {
    if (rows.empty()) throw ValidationError("compare_table: no metrics rows");

    std::set<std::string> algo_set, dataset_set;
    std::map<std::pair<std::string, std::string>, MetricsRow> cells;
    for (const MetricsRow& r : rows) {
        algo_set.insert(r.algorithm);
        dataset_set.insert(r.dataset);
        cells[{r.algorithm, r.dataset}] = r;  // duplicates: last one wins
    }
    const std::vector<std::string> algos(algo_set.begin(), algo_set.end());
    const std::vector<std::string> datasets(dataset_set.begin(), dataset_set.end());

    // Best algorithm per dataset by RMSE; name order breaks ties because
    // `algos` is sorted and the comparison is strict.
    std::map<std::string, std::string> best;
    for (const auto& d : datasets) {
        double best_rmse = 0.0;
        for (const auto& a : algos) {
            auto it = cells.find({a, d});
            if (it == cells.end()) continue;
            if (best.find(d) == best.end() || it->second.rmse < best_rmse) {
                best[d] = a;
                best_rmse = it->second.rmse;
            }
        }
    }

    const int name_w = 12;
    const int col_w = 11;
    std::ostringstream text;
    text << std::string(name_w, ' ');
    for (const auto& d : datasets) {
        std::string label = " | " + d;
        label.resize(3 + 4 * col_w, ' ');
        text << label;
    }
    text << '\n' << std::string(name_w, ' ');
    for (std::size_t i = 0; i < datasets.size(); ++i) {
        text << " | ";
        for (const char* m : {"RMSE", "RMSPE", "MAE", "MAPE"}) {
            std::string h(m);
            h.resize(col_w, ' ');
            text << h;
        }
    }
    text << '\n';
    for (const auto& a : algos) {
        std::string name = a;
        name.resize(name_w, ' ');
        text << name;
        for (const auto& d : datasets) {
            text << " | ";
            auto it = cells.find({a, d});
            if (it == cells.end()) {
                for (int i = 0; i < 4; ++i) {
                    std::string h("-");
                    h.resize(col_w, ' ');
                    text << h;
                }
                continue;
            }
            const MetricsRow& r = it->second;
            std::string rmse = fixed4(r.rmse) + (best[d] == a ? "*" : "");
            rmse.resize(col_w, ' ');
            std::string rmspe = cell(r.rmspe_pct);
            rmspe.resize(col_w, ' ');
            std::string mae = fixed4(r.mae);
            mae.resize(col_w, ' ');
            std::string mape = cell(r.mape_pct);
            mape.resize(col_w, ' ');
            text << rmse << rmspe << mae << mape;
        }
        text << '\n';
    }

    std::ostringstream csv;
    csv << "algorithm,dataset,rmse,rmspe,mae,mape,best\n";
    for (const auto& a : algos)
        for (const auto& d : datasets) {
            auto it = cells.find({a, d});
            if (it == cells.end()) continue;
            const MetricsRow& r = it->second;
            csv << a << ',' << d << ',' << format_double(r.rmse) << ','
                << (r.rmspe_pct ? format_double(*r.rmspe_pct) : "nan") << ','
                << format_double(r.mae) << ','
                << (r.mape_pct ? format_double(*r.mape_pct) : "nan") << ','
                << (best[d] == a ? 1 : 0) << '\n';
        }

    return {text.str(), csv.str()};
}

}  // namespace eyelstm

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "eyelstm/io.hpp"
#include "eyelstm/types.hpp"

namespace eyelstm {

// The four fusion-quality indicators. Percentage metrics are absent when
// every label falls under the near-zero guard.
struct MetricsReport {
    double rmse = 0.0;
    double mae = 0.0;
    std::optional<double> rmspe_pct;
    std::optional<double> mape_pct;
    std::size_t n_terms = 0;    // coordinate terms in RMSE/MAE
    std::size_t n_skipped = 0;  // terms excluded from the percentage metrics
};

// Labels smaller than this in magnitude are excluded from RMSPE/MAPE.
inline constexpr double kPercentGuard = 1e-8;

// Pooled over the flattened coordinate sequences:
//   RMSE  = sqrt(mean r^2)          MAE  = mean |r|
//   RMSPE = 100*sqrt(mean (r/t)^2)  MAPE = 100*mean |r/t|
// with percentage terms restricted to |t| >= guard.
MetricsReport evaluate(const std::vector<double>& pred, const std::vector<double>& truth);

// Flattens (x, y) pairs to [x0,y0,x1,y1,...] and evaluates.
MetricsReport evaluate_points(const std::vector<Point>& pred, const std::vector<Point>& truth);

MetricsRow to_metrics_row(const std::string& algorithm, const std::string& dataset,
                          const MetricsReport& report);

// Table-1-shaped comparison: one row per algorithm, a four-metric column
// block per dataset, '*' marking the per-dataset best RMSE (ties broken
// by algorithm name order).
struct ComparisonTable {
    std::string text;
    std::string csv;  // header algorithm,dataset,rmse,rmspe,mae,mape,best
};
ComparisonTable compare_table(const std::vector<MetricsRow>& rows);

}  // namespace eyelstm

#pragma once

// Evaluation metrics and the method-comparison report.

#include <cstdint>
#include <string>
#include <vector>

namespace xfmr::metrics {

/// (1/Q) * sum (Y - Yhat)^2
double mse(const std::vector<double>& actual, const std::vector<double>& predicted);

/// 1 - SSres/SStot with the test-set mean of the actuals.
/// Throws when the actuals have zero variance.
double r_squared(const std::vector<double>& actual, const std::vector<double>& predicted);

struct EvalReport {
    std::string method;
    double mse = 0.0;
    double r_squared = 0.0;
    double train_time_s = 0.0;
    std::string config_summary;
    std::uint64_t split_hash = 0;  // identifies the test split the metrics used
    int rank = 0;                  // filled by compare
};

/// Rank ascending by MSE; ties broken by higher R^2, then shorter
/// training time. All reports must carry the same split hash.
std::vector<EvalReport> compare(std::vector<EvalReport> reports);

/// Aligned text table (method, MSE, R^2, time, rank).
std::string format_comparison(const std::vector<EvalReport>& ranked);

/// FNV-1a over the test-split timestamps, used to assert identical splits.
std::uint64_t split_hash(const std::vector<std::int64_t>& test_timestamps);

}  // namespace xfmr::metrics

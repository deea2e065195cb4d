#include "xfmr/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

namespace xfmr::metrics {

double mse(const std::vector<double>& actual, const std::vector<double>& predicted) {
    if (actual.empty()) throw std::invalid_argument("empty vectors");
    if (actual.size() != predicted.size()) throw std::invalid_argument("length mismatch");
    double acc = 0.0;
    for (std::size_t q = 0; q < actual.size(); ++q) {
        const double e = actual[q] - predicted[q];
        acc += e * e;
    }
    return acc / static_cast<double>(actual.size());
}

double r_squared(const std::vector<double>& actual, const std::vector<double>& predicted) {
    if (actual.size() < 2) throw std::invalid_argument("need at least 2 samples");
    if (actual.size() != predicted.size()) throw std::invalid_argument("length mismatch");
    double mean = 0.0;
    for (double y : actual) mean += y;
    mean /= static_cast<double>(actual.size());

    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t q = 0; q < actual.size(); ++q) {
        ss_res += (actual[q] - predicted[q]) * (actual[q] - predicted[q]);
        ss_tot += (actual[q] - mean) * (actual[q] - mean);
    }
    if (ss_tot == 0.0) throw std::domain_error("actuals have zero variance, R^2 undefined");
    return 1.0 - ss_res / ss_tot;
}

std::vector<EvalReport> compare(std::vector<EvalReport> reports) {
    if (reports.size() < 2) throw std::invalid_argument("need at least 2 reports to compare");
    for (const auto& r : reports) {
        if (r.split_hash != reports.front().split_hash) {
            throw std::invalid_argument("reports were evaluated on different test splits");
        }
    }
    std::stable_sort(reports.begin(), reports.end(), [](const EvalReport& a, const EvalReport& b) {
        if (a.mse != b.mse) return a.mse < b.mse;
        if (a.r_squared != b.r_squared) return a.r_squared > b.r_squared;
        return a.train_time_s < b.train_time_s;
    });
    for (std::size_t i = 0; i < reports.size(); ++i) {
        reports[i].rank = static_cast<int>(i + 1);
    }
    return reports;
}

std::string format_comparison(const std::vector<EvalReport>& ranked) {
    std::string out;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-8s %-14s %-10s %-12s %s\n", "Method", "MSE", "R^2",
                  "Time (s)", "Rank");
    out += buf;
    for (const auto& r : ranked) {
        std::snprintf(buf, sizeof buf, "%-8s %-14.4e %-10.4f %-12.2f %d\n", r.method.c_str(),
                      r.mse, r.r_squared, r.train_time_s, r.rank);
        out += buf;
    }
    return out;
}

std::uint64_t split_hash(const std::vector<std::int64_t>& test_timestamps) {
    std::uint64_t h = 14695981039346656037ull;
    for (std::int64_t t : test_timestamps) {
        auto v = static_cast<std::uint64_t>(t);
        for (int b = 0; b < 8; ++b) {
            h ^= (v >> (8 * b)) & 0xffu;
            h *= 1099511628211ull;
        }
    }
    return h;
}

}  // namespace xfmr::metrics

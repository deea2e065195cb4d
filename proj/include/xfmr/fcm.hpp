#pragma once

// Fuzzy c-means over the 2-D (ambient temp, load ratio) input space.
// Seeds the rule base of the fuzzy estimator and drives the
// cluster-count sweep that picks the rule count.

#include <array>
#include <cstdint>
#include <vector>

#include "xfmr/dataset.hpp"

namespace xfmr::fcm {

using Point = std::array<double, 2>;

struct FcmOptions {
    double fuzzifier = 2.0;     // m > 1
    double tol = 1e-6;          // relative objective change
    int max_iter = 300;
    std::uint64_t seed = 0;
};

struct FcmResult {
    std::vector<Point> centers;
    // membership[c][p], each point's memberships sum to 1
    std::vector<std::vector<double>> membership;
    double fuzzifier = 2.0;
    double objective = 0.0;
    std::vector<double> objective_trace;  // per-iteration, non-increasing
    int iterations = 0;
};

/// Standard alternating FCM. Centers are initialized from c distinct
/// data points chosen by the seeded RNG.
FcmResult cluster(const std::vector<Point>& points, int c, const FcmOptions& opts = {});

struct SweepRow {
    int clusters;
    double train_mse;
    double test_mse;
};

struct SweepResult {
    std::vector<SweepRow> table;
    int recommended_clusters = 0;
};

/// For each cluster count in [c_min, c_max]: build the fuzzy estimator
/// from FCM and run exactly one training epoch, recording train/test MSE.
/// Recommends the smallest c whose added cluster improves test MSE by
/// less than `elbow_rel_improvement`.
SweepResult cluster_sweep(const dataset::LabeledDataset& train,
                          const dataset::LabeledDataset& test,
                          int c_min, int c_max, std::uint64_t seed,
                          double elbow_rel_improvement = 0.02);

}  // namespace xfmr::fcm

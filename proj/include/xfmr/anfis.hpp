#pragma once

// First-order Takagi-Sugeno fuzzy estimator with Gaussian memberships.
// Rules are seeded from fuzzy c-means; training alternates a global
// least-squares solve for the consequents with a full-batch gradient
// step on the Gaussian premises.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "xfmr/dataset.hpp"
#include "xfmr/fcm.hpp"

namespace xfmr::anfis {

constexpr double kWidthFloor = 1e-6;

struct Gaussian {
    double center = 0.0;
    double width = 1.0;  // > 0

    double eval(double x) const;
};

struct Rule {
    std::array<Gaussian, 2> memberships;      // one per input dimension
    std::array<double, 3> consequent{};       // p*temp + q*load + r
};

struct AnfisModel {
    std::vector<Rule> rules;
    int input_dim = 2;
};

struct TrainConfig {
    int epochs = 25;
    double learning_rate = 1e-2;
    std::uint64_t seed = 0;
};

struct InitResult {
    AnfisModel model;
    std::vector<std::string> warnings;
};

/// One rule per FCM cluster: Gaussian centers at the cluster centers,
/// widths the membership-weighted standard deviation per coordinate
/// (floored at kWidthFloor), consequents zero.
InitResult init_from_fcm(const fcm::FcmResult& fcm_result, const dataset::LabeledDataset& data);

struct PredictDiag {
    bool underflow_fallback = false;
};

/// Firing-strength-weighted average of the rule consequents. If every
/// firing strength underflows to zero, falls back to the consequent of
/// the rule nearest in width-normalized distance.
double predict(const AnfisModel& model, const std::array<double, 2>& input,
               PredictDiag* diag = nullptr);

struct LseResult {
    AnfisModel model;
    bool rank_deficient = false;  // minimum-norm solution was used
};

/// Global linear least squares for all consequent coefficients with the
/// premises held fixed.
LseResult lse_consequents(const AnfisModel& model, const dataset::LabeledDataset& data);

struct PremiseGradient {
    // same layout as the model: per rule, per dimension
    std::vector<std::array<double, 2>> d_center;
    std::vector<std::array<double, 2>> d_width;
};

/// Analytic gradient of the training MSE with respect to the Gaussian
/// centers and widths, consequents fixed.
PremiseGradient premise_gradient(const AnfisModel& model, const dataset::LabeledDataset& data);

struct TrainResult {
    AnfisModel model;
    std::vector<double> train_mse_trace;  // post-epoch
    std::vector<double> test_mse_trace;   // empty when no test set given
    bool rank_deficient = false;
};

TrainResult train(const AnfisModel& model, const dataset::LabeledDataset& train_data,
                  const TrainConfig& config, const dataset::LabeledDataset* test_data = nullptr);

/// Versioned model file; doubles survive the round trip bit-exactly.
void save(const AnfisModel& model, const std::string& path);
AnfisModel load(const std::string& path);

double mse_on(const AnfisModel& model, const dataset::LabeledDataset& data);

}  // namespace xfmr::anfis

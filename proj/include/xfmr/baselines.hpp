#pragma once

// MLP and RBF regression baselines. Both standardize inputs and targets
// internally (training-split statistics) and de-standardize predictions,
// so comparisons against the fuzzy estimator are in raw units.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "xfmr/dataset.hpp"

namespace xfmr::baselines {

struct Standardizer {
    std::array<double, 2> in_mean{};
    std::array<double, 2> in_std{1.0, 1.0};
    double out_mean = 0.0;
    double out_std = 1.0;
};

/// Fixed 2-2-1 network, tanh hidden layer, linear output.
struct MlpModel {
    std::array<std::array<double, 2>, 2> w1{};  // hidden x input
    std::array<double, 2> b1{};
    std::array<double, 2> w2{};
    double b2 = 0.0;
    Standardizer norm;
};

struct RbfModel {
    std::vector<std::array<double, 2>> centers;  // standardized coordinates
    double width = 1.0;                          // shared radial width
    std::vector<double> weights;
    double bias = 0.0;
    Standardizer norm;
};

struct MlpTrainResult {
    MlpModel model;
    std::vector<double> mse_trace;  // raw-unit training MSE per epoch
};

/// Full-batch backpropagation. epochs == 0 returns the seeded initial
/// weights untouched.
MlpTrainResult train_mlp(const dataset::LabeledDataset& train, int epochs,
                         double learning_rate, std::uint64_t seed);

struct MlpGradient {
    std::array<std::array<double, 2>, 2> w1{};
    std::array<double, 2> b1{};
    std::array<double, 2> w2{};
    double b2 = 0.0;
};

/// Loss (standardized-scale MSE) and its analytic gradient for the
/// current weights; the finite-difference checks perturb against this.
std::pair<double, MlpGradient> mlp_loss_and_gradient(const MlpModel& model,
                                                     const dataset::LabeledDataset& data);

struct RbfTrainResult {
    RbfModel model;
    std::vector<double> mse_trace;  // raw-unit training MSE per added neuron
    bool goal_met = false;
};

/// Incremental construction: add a neuron at the worst-residual training
/// point, re-solve the output layer by least squares, stop at the MSE
/// goal or the neuron cap. mse_goal is in raw units.
RbfTrainResult train_rbf(const dataset::LabeledDataset& train, double mse_goal,
                         int max_neurons, std::uint64_t seed);

double predict_mlp(const MlpModel& model, const std::array<double, 2>& input);
double predict_rbf(const RbfModel& model, const std::array<double, 2>& input);

double mse_mlp(const MlpModel& model, const dataset::LabeledDataset& data);
double mse_rbf(const RbfModel& model, const dataset::LabeledDataset& data);

void save_mlp(const MlpModel& model, const std::string& path);
MlpModel load_mlp(const std::string& path);
void save_rbf(const RbfModel& model, const std::string& path);
RbfModel load_rbf(const std::string& path);

Standardizer fit_standardizer(const dataset::LabeledDataset& data);

}  // namespace xfmr::baselines

#include "xfmr/anfis.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "json.hpp"

namespace xfmr::anfis {

namespace {

constexpr int kSchemaVersion = 1;
constexpr const char* kSchemaId = "xfmr-anfis";

struct Firing {
    std::vector<double> weights;  // raw firing strengths
    double total = 0.0;
};

Firing firing_strengths(const AnfisModel& model, const std::array<double, 2>& input) {
    Firing f;
    f.weights.resize(model.rules.size());
    for (std::size_t j = 0; j < model.rules.size(); ++j) {
        const Rule& r = model.rules[j];
        f.weights[j] = r.memberships[0].eval(input[0]) * r.memberships[1].eval(input[1]);
        f.total += f.weights[j];
    }
    return f;
}

double consequent_value(const Rule& r, const std::array<double, 2>& input) {
    return r.consequent[0] * input[0] + r.consequent[1] * input[1] + r.consequent[2];
}

}  // namespace

double Gaussian::eval(double x) const {
    const double z = (x - center) / width;
    return std::exp(-0.5 * z * z);
}

InitResult init_from_fcm(const fcm::FcmResult& fcm_result, const dataset::LabeledDataset& data) {
    if (fcm_result.centers.empty()) throw std::invalid_argument("FCM result has no centers");
    if (fcm_result.membership.size() != fcm_result.centers.size() ||
        fcm_result.membership.front().size() != data.size()) {
        throw std::invalid_argument("FCM result does not match the dataset");
    }

    InitResult out;
    out.model.input_dim = 2;
    for (std::size_t j = 0; j < fcm_result.centers.size(); ++j) {
        Rule rule;
        int floored = 0;
        for (int dim = 0; dim < 2; ++dim) {
            double wsum = 0.0, wvar = 0.0;
            for (std::size_t p = 0; p < data.size(); ++p) {
                const double w = fcm_result.membership[j][p];
                const double d = data.inputs[p][static_cast<std::size_t>(dim)] -
                                 fcm_result.centers[j][static_cast<std::size_t>(dim)];
                wsum += w;
                wvar += w * d * d;
            }
            double width = wsum > 0.0 ? std::sqrt(wvar / wsum) : 0.0;
            if (width < kWidthFloor) {
                width = kWidthFloor;
                ++floored;
            }
            rule.memberships[static_cast<std::size_t>(dim)] = {
                fcm_result.centers[j][static_cast<std::size_t>(dim)], width};
        }
        if (floored == 2) {
            out.warnings.push_back("rule " + std::to_string(j) +
                                   ": width floor hit on every dimension");
        }
        out.model.rules.push_back(rule);
    }
    return out;
}

double predict(const AnfisModel& model, const std::array<double, 2>& input, PredictDiag* diag) {
    if (!std::isfinite(input[0]) || !std::isfinite(input[1])) {
        throw std::domain_error("non-finite input");
    }
    if (model.rules.empty()) throw std::invalid_argument("model has no rules");

    const Firing f = firing_strengths(model, input);
    if (f.total > 0.0) {
        double out = 0.0;
        for (std::size_t j = 0; j < model.rules.size(); ++j) {
            out += f.weights[j] * consequent_value(model.rules[j], input);
        }
        return out / f.total;
    }

    // every firing strength underflowed: use the nearest rule
    if (diag) diag->underflow_fallback = true;
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < model.rules.size(); ++j) {
        double d = 0.0;
        for (int dim = 0; dim < 2; ++dim) {
            const auto& g = model.rules[j].memberships[static_cast<std::size_t>(dim)];
            const double z = (input[static_cast<std::size_t>(dim)] - g.center) / g.width;
            d += z * z;
        }
        if (d < best_d) {
            best_d = d;
            best = j;
        }
    }
    return consequent_value(model.rules[best], input);
}

LseResult lse_consequents(const AnfisModel& model, const dataset::LabeledDataset& data) {
    if (data.size() == 0) throw std::invalid_argument("empty training set");
    const auto n_rules = model.rules.size();
    const auto n_cols = 3 * n_rules;

    Eigen::MatrixXd design = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(data.size()),
                                                   static_cast<Eigen::Index>(n_cols));
    Eigen::VectorXd target(static_cast<Eigen::Index>(data.size()));
    for (std::size_t q = 0; q < data.size(); ++q) {
        const auto& x = data.inputs[q];
        const Firing f = firing_strengths(model, x);
        if (f.total > 0.0) {
            for (std::size_t j = 0; j < n_rules; ++j) {
                const double wn = f.weights[j] / f.total;
                design(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(3 * j)) = wn * x[0];
                design(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(3 * j + 1)) = wn * x[1];
                design(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(3 * j + 2)) = wn;
            }
        }
        target(static_cast<Eigen::Index>(q)) = data.targets[q];
    }

    Eigen::BDCSVD<Eigen::MatrixXd> svd(design, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Eigen::VectorXd beta = svd.solve(target);

    LseResult out;
    out.model = model;
    out.rank_deficient = svd.rank() < static_cast<Eigen::Index>(n_cols);
    for (std::size_t j = 0; j < n_rules; ++j) {
        out.model.rules[j].consequent = {beta(static_cast<Eigen::Index>(3 * j)),
                                         beta(static_cast<Eigen::Index>(3 * j + 1)),
                                         beta(static_cast<Eigen::Index>(3 * j + 2))};
    }
    return out;
}

PremiseGradient premise_gradient(const AnfisModel& model, const dataset::LabeledDataset& data) {
    if (data.size() == 0) throw std::invalid_argument("empty training set");
    const auto n_rules = model.rules.size();

    PremiseGradient grad;
    grad.d_center.assign(n_rules, {0.0, 0.0});
    grad.d_width.assign(n_rules, {0.0, 0.0});

    const double scale = 2.0 / static_cast<double>(data.size());
    for (std::size_t q = 0; q < data.size(); ++q) {
        const auto& x = data.inputs[q];
        const Firing f = firing_strengths(model, x);
        if (!(f.total > 0.0)) continue;  // fallback region, no usable gradient

        double yhat = 0.0;
        std::vector<double> fj(n_rules);
        for (std::size_t j = 0; j < n_rules; ++j) {
            fj[j] = consequent_value(model.rules[j], x);
            yhat += f.weights[j] * fj[j];
        }
        yhat /= f.total;
        const double err = yhat - data.targets[q];

        for (std::size_t j = 0; j < n_rules; ++j) {
            // d yhat / d w_j = (f_j - yhat) / total
            const double dy_dw = (fj[j] - yhat) / f.total;
            for (int dim = 0; dim < 2; ++dim) {
                const auto& g = model.rules[j].memberships[static_cast<std::size_t>(dim)];
                const double diff = x[static_cast<std::size_t>(dim)] - g.center;
                const double dw_dc = f.weights[j] * diff / (g.width * g.width);
                const double dw_ds = f.weights[j] * diff * diff / (g.width * g.width * g.width);
                grad.d_center[j][static_cast<std::size_t>(dim)] += scale * err * dy_dw * dw_dc;
                grad.d_width[j][static_cast<std::size_t>(dim)] += scale * err * dy_dw * dw_ds;
            }
        }
    }
    return grad;
}

double mse_on(const AnfisModel& model, const dataset::LabeledDataset& data) {
    if (data.size() == 0) throw std::invalid_argument("empty dataset");
    double acc = 0.0;
    for (std::size_t q = 0; q < data.size(); ++q) {
        const double e = predict(model, data.inputs[q]) - data.targets[q];
        acc += e * e;
    }
    return acc / static_cast<double>(data.size());
}

TrainResult train(const AnfisModel& model, const dataset::LabeledDataset& train_data,
                  const TrainConfig& config, const dataset::LabeledDataset* test_data) {
    if (train_data.size() == 0) throw std::invalid_argument("empty training set");
    if (config.epochs < 1) throw std::invalid_argument("epochs must be >= 1");
    if (!(config.learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be > 0");

    TrainResult out;
    out.model = model;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        // step 1: consequents by global least squares
        LseResult lse = lse_consequents(out.model, train_data);
        out.model = std::move(lse.model);
        out.rank_deficient = out.rank_deficient || lse.rank_deficient;

        // step 2: one full-batch gradient step on the premises
        const PremiseGradient grad = premise_gradient(out.model, train_data);
        for (std::size_t j = 0; j < out.model.rules.size(); ++j) {
            for (int dim = 0; dim < 2; ++dim) {
                auto& g = out.model.rules[j].memberships[static_cast<std::size_t>(dim)];
                g.center -= config.learning_rate * grad.d_center[j][static_cast<std::size_t>(dim)];
                g.width -= config.learning_rate * grad.d_width[j][static_cast<std::size_t>(dim)];
                if (g.width < kWidthFloor) g.width = kWidthFloor;
            }
        }

        const double train_mse = mse_on(out.model, train_data);
        if (!std::isfinite(train_mse)) {
            throw std::runtime_error("training diverged: non-finite loss at epoch " +
                                     std::to_string(epoch + 1));
        }
        out.train_mse_trace.push_back(train_mse);
        if (test_data) out.test_mse_trace.push_back(mse_on(out.model, *test_data));
    }
    return out;
}

void save(const AnfisModel& model, const std::string& path) {
    nlohmann::json j;
    j["schema"] = kSchemaId;
    j["version"] = kSchemaVersion;
    j["input_dim"] = model.input_dim;
    j["rules"] = nlohmann::json::array();
    for (const auto& r : model.rules) {
        j["rules"].push_back({
            {"centers", {r.memberships[0].center, r.memberships[1].center}},
            {"widths", {r.memberships[0].width, r.memberships[1].width}},
            {"consequent", {r.consequent[0], r.consequent[1], r.consequent[2]}},
        });
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open model file for writing: " + path);
    out << j.dump(2) << '\n';
}

AnfisModel load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open model file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("corrupt model file " + path + ": " + e.what());
    }
    if (j.value("schema", "") != kSchemaId) {
        throw std::runtime_error("not a fuzzy-estimator model file: " + path);
    }
    if (j.value("version", -1) != kSchemaVersion) {
        throw std::runtime_error("unsupported model file version in " + path);
    }
    AnfisModel model;
    model.input_dim = j.at("input_dim").get<int>();
    for (const auto& rj : j.at("rules")) {
        Rule r;
        for (int dim = 0; dim < 2; ++dim) {
            r.memberships[static_cast<std::size_t>(dim)].center =
                rj.at("centers").at(dim).get<double>();
            r.memberships[static_cast<std::size_t>(dim)].width =
                rj.at("widths").at(dim).get<double>();
        }
        for (int k = 0; k < 3; ++k) {
            r.consequent[static_cast<std::size_t>(k)] = rj.at("consequent").at(k).get<double>();
        }
        model.rules.push_back(r);
    }
    if (model.rules.empty()) throw std::runtime_error("model file has no rules: " + path);
    return model;
}

}  // namespace xfmr::anfis

#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "xfmr/anfis.hpp"

using namespace xfmr;
using anfis::AnfisModel;
using anfis::Rule;
using dataset::LabeledDataset;

namespace {

LabeledDataset toy_set(std::size_t n, std::uint64_t seed,
                       double (*f)(double, double)) {
    LabeledDataset d;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> temp(-10.0, 30.0), load(0.3, 1.1);
    for (std::size_t i = 0; i < n; ++i) {
        const double a = temp(rng), k = load(rng);
        d.timestamps.push_back(static_cast<std::int64_t>(i) * 3600);
        d.inputs.push_back({a, k});
        d.targets.push_back(f(a, k));
    }
    return d;
}

AnfisModel two_rule_model() {
    AnfisModel m;
    Rule r1, r2;
    r1.memberships = {{{0.0, 5.0}, {0.5, 0.2}}};
    r1.consequent = {0.0, 0.0, 0.0};
    r2.memberships = {{{20.0, 5.0}, {0.9, 0.2}}};
    r2.consequent = {0.0, 0.0, 1.0};
    m.rules = {r1, r2};
    return m;
}

double model_mse_with(AnfisModel m, const LabeledDataset& d) { return anfis::mse_on(m, d); }

}  // namespace

TEST_CASE("init_from_fcm shapes and widths") {
    auto data = toy_set(50, 1, [](double a, double k) { return a + k; });
    fcm::FcmOptions opts;
    auto clusters = fcm::cluster(data.inputs, 2, opts);
    auto init = anfis::init_from_fcm(clusters, data);
    REQUIRE(init.model.rules.size() == 2);
    for (const auto& r : init.model.rules) {
        CHECK(r.memberships[0].width > 0.0);
        CHECK(r.memberships[1].width > 0.0);
        CHECK(r.consequent == std::array<double, 3>{0.0, 0.0, 0.0});
    }

    // widths agree with a direct weighted standard deviation
    for (std::size_t j = 0; j < 2; ++j) {
        for (int dim = 0; dim < 2; ++dim) {
            double ws = 0.0, wv = 0.0;
            for (std::size_t p = 0; p < data.size(); ++p) {
                const double w = clusters.membership[j][p];
                const double diff = data.inputs[p][static_cast<std::size_t>(dim)] -
                                    clusters.centers[j][static_cast<std::size_t>(dim)];
                ws += w;
                wv += w * diff * diff;
            }
            CHECK(init.model.rules[j].memberships[static_cast<std::size_t>(dim)].width ==
                  doctest::Approx(std::sqrt(wv / ws)).epsilon(1e-12));
        }
    }
}

TEST_CASE("init width floor on a degenerate cluster") {
    // cluster with identical points in both coordinates
    LabeledDataset d;
    for (int i = 0; i < 10; ++i) {
        d.timestamps.push_back(i * 3600);
        d.inputs.push_back(i < 5 ? std::array<double, 2>{1.0, 1.0}
                                 : std::array<double, 2>{9.0, 9.0});
        d.targets.push_back(0.0);
    }
    auto clusters = fcm::cluster(d.inputs, 2, {});
    auto init = anfis::init_from_fcm(clusters, d);
    CHECK(!init.warnings.empty());
    for (const auto& r : init.model.rules) {
        CHECK(r.memberships[0].width >= anfis::kWidthFloor);
    }
}

TEST_CASE("predict") {
    SUBCASE("single rule is exactly its affine map") {
        AnfisModel m;
        Rule r;
        r.memberships = {{{5.0, 2.0}, {0.5, 0.1}}};
        r.consequent = {2.0, -3.0, 0.25};
        m.rules = {r};
        CHECK(anfis::predict(m, {7.0, 0.9}) ==
              doctest::Approx(2.0 * 7.0 - 3.0 * 0.9 + 0.25).epsilon(1e-14));
    }
    SUBCASE("equidistant symmetric rules average to 0.5") {
        auto m = two_rule_model();
        CHECK(anfis::predict(m, {10.0, 0.7}) == doctest::Approx(0.5).epsilon(1e-12));
    }
    SUBCASE("input at a dominant center returns that consequent") {
        auto m = two_rule_model();
        CHECK(anfis::predict(m, {20.0, 0.9}) == doctest::Approx(1.0).epsilon(1e-3));
    }
    SUBCASE("underflow fallback picks the nearest rule") {
        auto m = two_rule_model();
        m.rules[0].memberships = {{{-1000.0, 0.01}, {0.5, 0.01}}};
        m.rules[1].memberships = {{{1000.0, 0.01}, {0.5, 0.01}}};
        anfis::PredictDiag diag;
        const double out = anfis::predict(m, {900.0, 0.5}, &diag);
        CHECK(diag.underflow_fallback);
        CHECK(out == doctest::Approx(1.0));  // rule 2 is nearer
    }
    SUBCASE("non-finite input") {
        CHECK_THROWS_AS(anfis::predict(two_rule_model(), {std::nan(""), 0.5}), std::domain_error);
    }
}

TEST_CASE("normalized firing strengths sum to one") {
    auto data = toy_set(30, 2, [](double a, double k) { return a * k; });
    auto clusters = fcm::cluster(data.inputs, 4, {});
    auto model = anfis::init_from_fcm(clusters, data).model;
    // verified indirectly: constant-1 consequents must predict exactly 1
    for (auto& r : model.rules) r.consequent = {0.0, 0.0, 1.0};
    for (const auto& x : data.inputs) {
        CHECK(anfis::predict(model, x) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("LSE matches an explicit normal-equations solve") {
    auto data = toy_set(20, 3, [](double a, double k) { return 0.5 * a - 2.0 * k + 3.0; });
    auto clusters = fcm::cluster(data.inputs, 2, {});
    auto model = anfis::init_from_fcm(clusters, data).model;
    auto lse = anfis::lse_consequents(model, data);

    // oracle: build the design matrix independently and solve A^T A x = A^T y
    Eigen::MatrixXd a(20, 6);
    Eigen::VectorXd y(20);
    for (int q = 0; q < 20; ++q) {
        const auto& x = data.inputs[static_cast<std::size_t>(q)];
        double w[2], total = 0.0;
        for (int j = 0; j < 2; ++j) {
            const auto& r = model.rules[static_cast<std::size_t>(j)];
            auto g = [](double v, double c, double s) {
                return std::exp(-0.5 * (v - c) * (v - c) / (s * s));
            };
            w[j] = g(x[0], r.memberships[0].center, r.memberships[0].width) *
                   g(x[1], r.memberships[1].center, r.memberships[1].width);
            total += w[j];
        }
        for (int j = 0; j < 2; ++j) {
            const double wn = w[j] / total;
            a(q, 3 * j) = wn * x[0];
            a(q, 3 * j + 1) = wn * x[1];
            a(q, 3 * j + 2) = wn;
        }
        y(q) = data.targets[static_cast<std::size_t>(q)];
    }
    Eigen::VectorXd beta = (a.transpose() * a).ldlt().solve(a.transpose() * y);
    for (int j = 0; j < 2; ++j) {
        for (int k = 0; k < 3; ++k) {
            CHECK(lse.model.rules[static_cast<std::size_t>(j)].consequent[static_cast<std::size_t>(k)] ==
                  doctest::Approx(beta(3 * j + k)).epsilon(1e-8));
        }
    }
}

TEST_CASE("LSE recovers a realizable affine target exactly") {
    auto data = toy_set(40, 4, [](double a, double k) { return 1.5 * a + 0.25 * k - 2.0; });
    AnfisModel m;
    Rule r;
    r.memberships = {{{10.0, 20.0}, {0.7, 0.5}}};
    m.rules = {r};
    anfis::TrainConfig cfg;
    cfg.epochs = 1;
    auto result = anfis::train(m, data, cfg);
    CHECK(result.train_mse_trace.back() <= 1e-20);
}

TEST_CASE("premise gradient matches central finite differences") {
    auto data = toy_set(10, 5, [](double a, double k) { return std::sin(0.1 * a) + k * k; });
    auto clusters = fcm::cluster(data.inputs, 2, {});
    auto model = anfis::lse_consequents(anfis::init_from_fcm(clusters, data).model, data).model;
    const auto grad = anfis::premise_gradient(model, data);

    const double h = 1e-6;
    for (std::size_t j = 0; j < model.rules.size(); ++j) {
        for (int dim = 0; dim < 2; ++dim) {
            auto perturbed = [&](double dc, double dw) {
                AnfisModel m = model;
                m.rules[j].memberships[static_cast<std::size_t>(dim)].center += dc;
                m.rules[j].memberships[static_cast<std::size_t>(dim)].width += dw;
                return model_mse_with(m, data);
            };
            const double fd_c = (perturbed(h, 0) - perturbed(-h, 0)) / (2 * h);
            const double fd_w = (perturbed(0, h) - perturbed(0, -h)) / (2 * h);
            const double an_c = grad.d_center[j][static_cast<std::size_t>(dim)];
            const double an_w = grad.d_width[j][static_cast<std::size_t>(dim)];
            CHECK(an_c == doctest::Approx(fd_c).epsilon(1e-5));
            CHECK(an_w == doctest::Approx(fd_w).epsilon(1e-5));
        }
    }
}

TEST_CASE("after LSE no consequent perturbation reduces training MSE") {
    auto data = toy_set(60, 6, [](double a, double k) { return std::exp(0.05 * a) * k; });
    auto clusters = fcm::cluster(data.inputs, 3, {});
    auto model = anfis::lse_consequents(anfis::init_from_fcm(clusters, data).model, data).model;
    const double base = anfis::mse_on(model, data);
    for (std::size_t j = 0; j < model.rules.size(); ++j) {
        for (std::size_t k = 0; k < 3; ++k) {
            for (double delta : {1e-3, -1e-3}) {
                AnfisModel m = model;
                m.rules[j].consequent[k] += delta;
                CHECK(anfis::mse_on(m, data) >= base - 1e-18);
            }
        }
    }
}

TEST_CASE("training is deterministic and records a trace") {
    auto data = toy_set(50, 7, [](double a, double k) { return a * 0.1 + std::cos(k); });
    auto clusters = fcm::cluster(data.inputs, 3, {});
    auto init = anfis::init_from_fcm(clusters, data).model;
    anfis::TrainConfig cfg;
    cfg.epochs = 5;
    auto a = anfis::train(init, data, cfg, &data);
    auto b = anfis::train(init, data, cfg, &data);
    CHECK(a.train_mse_trace == b.train_mse_trace);
    CHECK(a.test_mse_trace.size() == 5);
    for (std::size_t j = 0; j < a.model.rules.size(); ++j) {
        CHECK(a.model.rules[j].consequent == b.model.rules[j].consequent);
        CHECK(a.model.rules[j].memberships[0].center == b.model.rules[j].memberships[0].center);
    }
}

TEST_CASE("model save/load") {
    const auto path = (std::filesystem::temp_directory_path() / "anfis_model.json").string();
    auto data = toy_set(30, 8, [](double a, double k) { return a + k; });
    auto clusters = fcm::cluster(data.inputs, 2, {});
    auto model = anfis::lse_consequents(anfis::init_from_fcm(clusters, data).model, data).model;

    SUBCASE("round trip is bit-identical on a probe grid") {
        anfis::save(model, path);
        auto back = anfis::load(path);
        for (double a = -10.0; a <= 30.0; a += 7.3) {
            for (double k = 0.3; k <= 1.1; k += 0.19) {
                CHECK(anfis::predict(model, {a, k}) == anfis::predict(back, {a, k}));
            }
        }
    }
    SUBCASE("truncated file") {
        anfis::save(model, path);
        std::ifstream in(path);
        std::string text((std::istreambuf_iterator<char>(in)), {});
        std::ofstream out(path);
        out << text.substr(0, text.size() / 2);
        out.close();
        CHECK_THROWS_WITH_AS(anfis::load(path), doctest::Contains("corrupt"), std::runtime_error);
    }
    SUBCASE("unknown version") {
        std::ofstream out(path);
        out << R"({"schema":"xfmr-anfis","version":99,"input_dim":2,"rules":[]})";
        out.close();
        CHECK_THROWS_WITH_AS(anfis::load(path), doctest::Contains("version"), std::runtime_error);
    }
    SUBCASE("wrong schema") {
        std::ofstream out(path);
        out << R"({"schema":"something-else","version":1})";
        out.close();
        CHECK_THROWS_AS(anfis::load(path), std::runtime_error);
    }
}

TEST_CASE("cluster sweep") {
    // affine target: one rule suffices, so the curve flattens immediately
    auto data = toy_set(120, 9, [](double a, double k) { return 2.0 * a + k; });
    dataset::SplitSpec spec;
    spec.seed = 9;
    auto [train, test] = dataset::split(data, spec);
    auto sweep = fcm::cluster_sweep(train, test, 2, 5, 9);
    REQUIRE(sweep.table.size() == 4);
    CHECK(sweep.table[0].test_mse <= 1e-12);
    CHECK(sweep.recommended_clusters <= 3);

    auto single = fcm::cluster_sweep(train, test, 2, 2, 9);
    CHECK(single.table.size() == 1);
    CHECK(single.recommended_clusters == 2);
}

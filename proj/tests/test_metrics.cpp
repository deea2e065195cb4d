#include "doctest.h"

#include <algorithm>
#include <random>

#include "xfmr/metrics.hpp"

using namespace xfmr;

namespace {

metrics::EvalReport report(std::string method, double mse, double r2, double time_s,
                           std::uint64_t hash = 42) {
    metrics::EvalReport r;
    r.method = std::move(method);
    r.mse = mse;
    r.r_squared = r2;
    r.train_time_s = time_s;
    r.split_hash = hash;
    return r;
}

}  // namespace

TEST_CASE("mse") {
    CHECK(metrics::mse({1.0, 2.0, 3.0}, {1.0, 2.0, 3.0}) == 0.0);
    CHECK(metrics::mse({0.0, 2.0}, {1.0, 1.0}) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(metrics::mse({5.0}, {5.0 + 0.25}) == doctest::Approx(0.0625).epsilon(1e-15));
    CHECK_THROWS_AS(metrics::mse({1.0}, {1.0, 2.0}), std::invalid_argument);
    CHECK_THROWS_AS(metrics::mse({}, {}), std::invalid_argument);
}

TEST_CASE("r_squared") {
    CHECK(metrics::r_squared({1.0, 2.0, 3.0}, {1.0, 2.0, 3.0}) == doctest::Approx(1.0));
    // predicting the mean scores exactly zero
    CHECK(metrics::r_squared({1.0, 2.0, 3.0}, {2.0, 2.0, 2.0}) == doctest::Approx(0.0));
    // hand-computed: SSres = 0+1+4 = 5, SStot = 2 -> 1 - 5/2
    CHECK(metrics::r_squared({0.0, 1.0, 2.0}, {0.0, 0.0, 0.0}) == doctest::Approx(-1.5));
    CHECK_THROWS_AS(metrics::r_squared({2.0, 2.0}, {1.0, 3.0}), std::domain_error);
}

TEST_CASE("r_squared is invariant under affine rescaling of the problem") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<double> y, yhat;
    for (int i = 0; i < 50; ++i) {
        y.push_back(g(rng));
        yhat.push_back(y.back() + 0.1 * g(rng));
    }
    const double base = metrics::r_squared(y, yhat);
    std::vector<double> y2 = y, yhat2 = yhat;
    for (auto& v : y2) v = 3.0 * v - 7.0;
    for (auto& v : yhat2) v = 3.0 * v - 7.0;
    CHECK(metrics::r_squared(y2, yhat2) == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("compare ranks ascending by mse") {
    auto ranked = metrics::compare({report("mlp", 3.0, 0.5, 1.0),
                                    report("anfis", 1.0, 0.99, 2.0),
                                    report("rbf", 2.0, 0.8, 0.5)});
    REQUIRE(ranked.size() == 3);
    CHECK(ranked[0].method == "anfis");
    CHECK(ranked[0].rank == 1);
    CHECK(ranked[1].method == "rbf");
    CHECK(ranked[1].rank == 2);
    CHECK(ranked[2].method == "mlp");
    CHECK(ranked[2].rank == 3);
}

TEST_CASE("compare tie-breaks by higher r_squared then shorter time") {
    auto by_r2 = metrics::compare({report("a", 1.0, 0.7, 1.0), report("b", 1.0, 0.9, 1.0)});
    CHECK(by_r2[0].method == "b");
    auto by_time = metrics::compare({report("a", 1.0, 0.9, 5.0), report("b", 1.0, 0.9, 1.0)});
    CHECK(by_time[0].method == "b");
}

TEST_CASE("compare is invariant to the input order") {
    std::vector<metrics::EvalReport> reports{report("mlp", 3.0, 0.5, 1.0),
                                             report("anfis", 1.0, 0.99, 2.0),
                                             report("rbf", 2.0, 0.8, 0.5)};
    auto a = metrics::compare(reports);
    std::reverse(reports.begin(), reports.end());
    auto b = metrics::compare(reports);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].method == b[i].method);
        CHECK(a[i].rank == b[i].rank);
    }
}

TEST_CASE("compare rejects mismatched split hashes") {
    CHECK_THROWS_AS(metrics::compare({report("a", 1.0, 0.9, 1.0, 1), report("b", 2.0, 0.8, 1.0, 2)}),
                    std::invalid_argument);
}

TEST_CASE("format_comparison lists every method with its rank") {
    auto ranked = metrics::compare({report("mlp", 3.0, 0.5, 1.0), report("anfis", 1.0, 0.99, 2.0)});
    const auto text = metrics::format_comparison(ranked);
    CHECK(text.find("anfis") != std::string::npos);
    CHECK(text.find("mlp") != std::string::npos);
    CHECK(text.find('1') != std::string::npos);
}

TEST_CASE("split_hash") {
    const std::vector<std::int64_t> a{0, 3600, 7200}, b{0, 7200, 3600};
    CHECK(metrics::split_hash(a) == metrics::split_hash(a));
    CHECK(metrics::split_hash(a) != metrics::split_hash(b));
    CHECK(metrics::split_hash({}) != metrics::split_hash({0}));
    // FNV-1a offset basis for empty input
    CHECK(metrics::split_hash({}) == 14695981039346656037ULL);
}

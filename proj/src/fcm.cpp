#include "xfmr/fcm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace xfmr::fcm {

namespace {

double sq_dist(const Point& a, const Point& b) {
    const double dx = a[0] - b[0];
    const double dy = a[1] - b[1];
    return dx * dx + dy * dy;
}

// Membership update for one point against all centers. Points that
// coincide with a center get a one-hot membership.
void update_memberships(const std::vector<Point>& points, const std::vector<Point>& centers,
                        double fuzzifier, std::vector<std::vector<double>>& u) {
    const std::size_t c = centers.size();
    const double power = 1.0 / (fuzzifier - 1.0);
    for (std::size_t p = 0; p < points.size(); ++p) {
        std::vector<double> d2(c);
        bool coincident = false;
        for (std::size_t j = 0; j < c; ++j) {
            d2[j] = sq_dist(points[p], centers[j]);
            if (d2[j] == 0.0) coincident = true;
        }
        if (coincident) {
            std::size_t hits = 0;
            for (std::size_t j = 0; j < c; ++j) hits += d2[j] == 0.0;
            for (std::size_t j = 0; j < c; ++j) {
                u[j][p] = d2[j] == 0.0 ? 1.0 / static_cast<double>(hits) : 0.0;
            }
            continue;
        }
        for (std::size_t j = 0; j < c; ++j) {
            double denom = 0.0;
            for (std::size_t l = 0; l < c; ++l) {
                denom += std::pow(d2[j] / d2[l], power);
            }
            u[j][p] = 1.0 / denom;
        }
    }
}

double objective_value(const std::vector<Point>& points, const std::vector<Point>& centers,
                       const std::vector<std::vector<double>>& u, double fuzzifier) {
    double obj = 0.0;
    for (std::size_t j = 0; j < centers.size(); ++j) {
        for (std::size_t p = 0; p < points.size(); ++p) {
            obj += std::pow(u[j][p], fuzzifier) * sq_dist(points[p], centers[j]);
        }
    }
    return obj;
}

}  // namespace

FcmResult cluster(const std::vector<Point>& points, int c, const FcmOptions& opts) {
    if (c < 2) throw std::invalid_argument("cluster count must be >= 2");
    if (points.size() < static_cast<std::size_t>(c)) {
        throw std::invalid_argument("fewer points than clusters");
    }
    if (!(opts.fuzzifier > 1.0)) throw std::invalid_argument("fuzzifier must be > 1");

    const bool all_same = std::all_of(points.begin(), points.end(),
                                      [&](const Point& p) { return p == points.front(); });
    if (all_same) throw std::runtime_error("degenerate data: all points identical");

    // seed centers with c distinct data points; selecting from the sorted
    // distinct set keeps the choice independent of input ordering
    std::vector<Point> distinct = points;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    std::mt19937_64 rng(opts.seed);
    std::shuffle(distinct.begin(), distinct.end(), rng);

    std::vector<Point> centers(distinct.begin(),
                               distinct.begin() +
                                   std::min<std::ptrdiff_t>(c, static_cast<std::ptrdiff_t>(
                                                                   distinct.size())));
    if (centers.size() < static_cast<std::size_t>(c)) {
        throw std::runtime_error("degenerate data: fewer distinct points than clusters");
    }

    std::vector<std::vector<double>> u(static_cast<std::size_t>(c),
                                       std::vector<double>(points.size(), 0.0));
    update_memberships(points, centers, opts.fuzzifier, u);

    FcmResult result;
    result.fuzzifier = opts.fuzzifier;
    double prev_obj = std::numeric_limits<double>::infinity();

    for (int iter = 0; iter < opts.max_iter; ++iter) {
        // center update
        for (std::size_t j = 0; j < centers.size(); ++j) {
            double wx = 0.0, wy = 0.0, wsum = 0.0;
            for (std::size_t p = 0; p < points.size(); ++p) {
                const double w = std::pow(u[j][p], opts.fuzzifier);
                wx += w * points[p][0];
                wy += w * points[p][1];
                wsum += w;
            }
            if (wsum > 0.0) centers[j] = {wx / wsum, wy / wsum};
        }
        update_memberships(points, centers, opts.fuzzifier, u);

        const double obj = objective_value(points, centers, u, opts.fuzzifier);
        result.objective_trace.push_back(obj);
        result.iterations = iter + 1;
        if (std::isfinite(prev_obj) &&
            std::abs(prev_obj - obj) <= opts.tol * std::max(std::abs(prev_obj), 1e-300)) {
            prev_obj = obj;
            break;
        }
        prev_obj = obj;
    }

    result.centers = std::move(centers);
    result.membership = std::move(u);
    result.objective = prev_obj;
    return result;
}

}  // namespace xfmr::fcm

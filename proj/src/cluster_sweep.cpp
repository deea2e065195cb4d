#include "xfmr/anfis.hpp"
#include "xfmr/fcm.hpp"

#include <stdexcept>

namespace xfmr::fcm {

SweepResult cluster_sweep(const dataset::LabeledDataset& train,
                          const dataset::LabeledDataset& test,
                          int c_min, int c_max, std::uint64_t seed,
                          double elbow_rel_improvement) {
    if (c_min < 2 || c_max < c_min) throw std::invalid_argument("bad cluster range");
    if (static_cast<std::size_t>(c_max) > train.size()) {
        throw std::invalid_argument("cluster range exceeds training set size");
    }
    if (train.size() == 0 || test.size() == 0) throw std::invalid_argument("empty dataset");

    SweepResult result;
    for (int c = c_min; c <= c_max; ++c) {
        FcmOptions opts;
        opts.seed = seed;
        const FcmResult clusters = cluster(train.inputs, c, opts);

        anfis::TrainConfig cfg;
        cfg.epochs = 1;
        cfg.seed = seed;
        const auto init = anfis::init_from_fcm(clusters, train);
        const auto trained = anfis::train(init.model, train, cfg, &test);
        result.table.push_back({c, trained.train_mse_trace.back(), trained.test_mse_trace.back()});
    }

    // elbow: smallest c where adding a cluster improves test MSE by less
    // than the relative threshold
    result.recommended_clusters = c_max;
    for (std::size_t i = 0; i + 1 < result.table.size(); ++i) {
        const double cur = result.table[i].test_mse;
        const double next = result.table[i + 1].test_mse;
        if (cur <= 0.0 || (cur - next) / cur < elbow_rel_improvement) {
            result.recommended_clusters = result.table[i].clusters;
            break;
        }
    }
    if (result.table.size() == 1) result.recommended_clusters = c_min;
    return result;
}

}  // namespace xfmr::fcm

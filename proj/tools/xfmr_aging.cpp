// xfmr-aging: transformer loss-of-life computation and surrogate training.
//
// Subcommands: compute-lol, cluster-sweep, train, compare. All emitted
// data files are CSV; models are versioned JSON. Timing files are the
// only outputs that vary between identical runs.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "xfmr/anfis.hpp"
#include "xfmr/baselines.hpp"
#include "xfmr/dataset.hpp"
#include "xfmr/fcm.hpp"
#include "xfmr/metrics.hpp"
#include "xfmr/thermal.hpp"

namespace fs = std::filesystem;
using namespace xfmr;

namespace {

struct RunConfig {
    std::string input_csv;
    std::size_t synthetic_hours = 0;
    std::string out_dir = "out";
    std::uint64_t seed = 0;
    double test_fraction = 0.30;
    bool cold_start = false;
    bool carry_forward = false;
    bool skip_preprocess = false;
    thermal::TransformerParams params;
};

void add_common_options(CLI::App* cmd, RunConfig& cfg) {
    cmd->add_option("--input", cfg.input_csv, "Input CSV (timestamp,ambient_temp_c,load_ratio)")
        ->check(CLI::ExistingFile);
    cmd->add_option("--synthetic", cfg.synthetic_hours,
                    "Generate a synthetic profile of this many hours instead of reading a CSV");
    cmd->add_option("--out", cfg.out_dir, "Output directory")->capture_default_str();
    cmd->add_option("--seed", cfg.seed, "RNG seed")->envname("XFMR_SEED")->capture_default_str();
    cmd->add_option("--test-fraction", cfg.test_fraction, "Held-out test fraction")
        ->check(CLI::Range(1e-9, 1.0 - 1e-9))
        ->capture_default_str();
    cmd->add_flag("--cold-start", cfg.cold_start, "Start the thermal recursion with zero rises");
    cmd->add_flag("--carry-forward", cfg.carry_forward,
                  "Carry actual end-of-interval rises into the next interval");
    cmd->add_flag("--no-preprocess", cfg.skip_preprocess, "Skip bad-data repair");

    auto& p = cfg.params;
    cmd->add_option("--loss-ratio", p.loss_ratio_R, "Rated-to-no-load loss ratio R")
        ->capture_default_str();
    cmd->add_option("--exponent-m", p.exponent_m, "Winding-rise exponent m")->capture_default_str();
    cmd->add_option("--exponent-n", p.exponent_n, "Top-oil-rise exponent n")->capture_default_str();
    cmd->add_option("--hotspot-rise", p.hotspot_rise_rated_c, "Rated hot-spot rise (C)")
        ->capture_default_str();
    cmd->add_option("--topoil-rise", p.topoil_rise_rated_c, "Rated top-oil rise (C)")
        ->capture_default_str();
    cmd->add_option("--topoil-tau", p.topoil_time_constant_h, "Top-oil time constant (h)")
        ->capture_default_str();
    cmd->add_option("--winding-tau", p.winding_time_constant_h, "Winding time constant (h)")
        ->capture_default_str();
    cmd->add_option("--insulation-life", p.normal_insulation_life_h,
                    "Normal insulation life (h)")
        ->capture_default_str();
    cmd->set_config("--config", "", "Config file (key=value)");
}

dataset::HourlySeries load_series(const RunConfig& cfg) {
    const bool has_csv = !cfg.input_csv.empty();
    const bool has_synth = cfg.synthetic_hours > 0;
    if (has_csv == has_synth) {
        throw CLI::ValidationError("dataset source",
                                   "exactly one of --input and --synthetic is required");
    }
    dataset::HourlySeries series = has_csv
                                       ? dataset::ingest_csv(cfg.input_csv)
                                       : dataset::synthesize({}, cfg.synthetic_hours, cfg.seed);
    if (!cfg.skip_preprocess) {
        auto pre = dataset::preprocess(series);
        if (!pre.repairs.empty()) {
            std::cerr << "preprocess: repaired " << pre.repairs.size() << " sample(s)\n";
        }
        series = std::move(pre.series);
    }
    return series;
}

thermal::StepOptions step_options(const RunConfig& cfg) {
    thermal::StepOptions opts;
    opts.cold_start = cfg.cold_start;
    opts.carry_forward_rises = cfg.carry_forward;
    return opts;
}

dataset::LabeledDataset labeled(const RunConfig& cfg) {
    cfg.params.validate();
    return dataset::label(load_series(cfg), cfg.params, step_options(cfg));
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

int cmd_compute_lol(const RunConfig& cfg) {
    cfg.params.validate();
    const auto series = load_series(cfg);
    const auto records =
        thermal::run_profile(series.ambient_temp_c, series.load_ratio, 1.0, cfg.params,
                             step_options(cfg));

    fs::create_directories(cfg.out_dir);
    auto out = open_out(fs::path(cfg.out_dir) / "lol_records.csv");
    out << "interval_index,ambient_temp_c,load_ratio,hotspot_temp_c,aging_factor,lol_percent\n";
    char buf[256];
    double total_lol = 0.0, peak_hotspot = -1e9;
    for (const auto& r : records) {
        std::snprintf(buf, sizeof buf, "%lld,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                      static_cast<long long>(r.interval_index), r.ambient_temp_c, r.load_ratio,
                      r.hotspot_temp_c, r.aging_factor, r.lol_percent);
        out << buf;
        total_lol += r.lol_percent;
        peak_hotspot = std::max(peak_hotspot, r.hotspot_temp_c);
    }
    const double feqa = thermal::equivalent_aging(records, 1.0);

    auto summary = open_out(fs::path(cfg.out_dir) / "summary.txt");
    std::snprintf(buf, sizeof buf,
                  "hours: %zu\ntotal_lol_percent: %.17g\nequivalent_aging: %.17g\n"
                  "peak_hotspot_c: %.17g\n",
                  records.size(), total_lol, feqa, peak_hotspot);
    summary << buf;
    std::cout << buf;
    return 0;
}

int cmd_cluster_sweep(const RunConfig& cfg, int c_min, int c_max) {
    const auto data = labeled(cfg);
    auto [train, test] = dataset::split(data, {cfg.test_fraction, 5, cfg.seed});
    const auto sweep = fcm::cluster_sweep(train, test, c_min, c_max, cfg.seed);

    fs::create_directories(cfg.out_dir);
    auto out = open_out(fs::path(cfg.out_dir) / "cluster_sweep.csv");
    out << "c,train_mse,test_mse\n";
    char buf[128];
    for (const auto& row : sweep.table) {
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g\n", row.clusters, row.train_mse,
                      row.test_mse);
        out << buf;
    }
    auto rec = open_out(fs::path(cfg.out_dir) / "recommended_clusters.txt");
    rec << sweep.recommended_clusters << '\n';
    std::cout << "recommended clusters: " << sweep.recommended_clusters << '\n';
    return 0;
}

struct TrainOptions {
    std::string method;
    int clusters = 20;
    int epochs = 25;
    int mlp_epochs = 500;
    double learning_rate = 1e-2;
    double rbf_mse_goal = 0.0;  // 0: derive from target variance
    int rbf_max_neurons = 400;
};

struct TrainedMethod {
    metrics::EvalReport report;
    std::vector<double> trace;
};

TrainedMethod train_one(const RunConfig& cfg, const TrainOptions& opt,
                        const dataset::LabeledDataset& train,
                        const dataset::LabeledDataset& test, const std::string& model_path) {
    TrainedMethod out;
    out.report.method = opt.method;
    out.report.split_hash = metrics::split_hash(test.timestamps);

    std::vector<double> predicted(test.size());
    const auto t0 = std::chrono::steady_clock::now();
    char cfgbuf[160];

    if (opt.method == "anfis") {
        fcm::FcmOptions fopts;
        fopts.seed = cfg.seed;
        const auto clusters = fcm::cluster(train.inputs, opt.clusters, fopts);
        const auto init = anfis::init_from_fcm(clusters, train);
        for (const auto& w : init.warnings) std::cerr << "anfis init: " << w << '\n';
        anfis::TrainConfig tc;
        tc.epochs = opt.epochs;
        tc.learning_rate = opt.learning_rate;
        tc.seed = cfg.seed;
        auto trained = anfis::train(init.model, train, tc, &test);
        anfis::save(trained.model, model_path);
        out.trace = trained.train_mse_trace;
        for (std::size_t q = 0; q < test.size(); ++q) {
            predicted[q] = anfis::predict(trained.model, test.inputs[q]);
        }
        std::snprintf(cfgbuf, sizeof cfgbuf, "clusters=%d epochs=%d lr=%g", opt.clusters,
                      opt.epochs, opt.learning_rate);
    } else if (opt.method == "mlp") {
        auto trained = baselines::train_mlp(train, opt.mlp_epochs, opt.learning_rate, cfg.seed);
        baselines::save_mlp(trained.model, model_path);
        out.trace = trained.mse_trace;
        for (std::size_t q = 0; q < test.size(); ++q) {
            predicted[q] = baselines::predict_mlp(trained.model, test.inputs[q]);
        }
        std::snprintf(cfgbuf, sizeof cfgbuf, "layers=2-2-1 epochs=%d lr=%g", opt.mlp_epochs,
                      opt.learning_rate);
    } else if (opt.method == "rbf") {
        double goal = opt.rbf_mse_goal;
        if (goal <= 0.0) {
            // no explicit goal: one tenth of the target variance
            double mean = 0.0;
            for (double t : train.targets) mean += t;
            mean /= static_cast<double>(train.size());
            double var = 0.0;
            for (double t : train.targets) var += (t - mean) * (t - mean);
            goal = 0.1 * var / static_cast<double>(train.size());
        }
        auto trained = baselines::train_rbf(train, goal, opt.rbf_max_neurons, cfg.seed);
        baselines::save_rbf(trained.model, model_path);
        out.trace = trained.mse_trace;
        for (std::size_t q = 0; q < test.size(); ++q) {
            predicted[q] = baselines::predict_rbf(trained.model, test.inputs[q]);
        }
        std::snprintf(cfgbuf, sizeof cfgbuf, "neurons=%zu goal=%g goal_met=%d",
                      trained.model.centers.size(), goal, trained.goal_met ? 1 : 0);
    } else {
        throw CLI::ValidationError("--method", "unknown method: " + opt.method);
    }

    const auto t1 = std::chrono::steady_clock::now();
    out.report.train_time_s = std::chrono::duration<double>(t1 - t0).count();
    out.report.mse = metrics::mse(test.targets, predicted);
    out.report.r_squared = metrics::r_squared(test.targets, predicted);
    out.report.config_summary = cfgbuf;
    return out;
}

void write_trace(const fs::path& path, const std::vector<double>& trace) {
    auto out = open_out(path);
    out << "epoch,train_mse\n";
    char buf[64];
    for (std::size_t i = 0; i < trace.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g\n", i + 1, trace[i]);
        out << buf;
    }
}

void write_eval(const fs::path& dir, const metrics::EvalReport& r) {
    auto out = open_out(dir / ("eval_" + r.method + ".csv"));
    char buf[320];
    out << "method,mse,r_squared,split_hash,config\n";
    std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g,%llu,%s\n", r.method.c_str(), r.mse,
                  r.r_squared, static_cast<unsigned long long>(r.split_hash),
                  r.config_summary.c_str());
    out << buf;
    // wall-clock timing is kept out of the deterministic outputs
    auto timing = open_out(dir / ("timing_" + r.method + ".txt"));
    std::snprintf(buf, sizeof buf, "train_time_s: %.3f\n", r.train_time_s);
    timing << buf;
}

int cmd_train(const RunConfig& cfg, const TrainOptions& opt) {
    const auto data = labeled(cfg);
    auto [train, test] = dataset::split(data, {cfg.test_fraction, 5, cfg.seed});

    fs::create_directories(cfg.out_dir);
    const auto model_path = fs::path(cfg.out_dir) / ("model_" + opt.method + ".json");
    const auto trained = train_one(cfg, opt, train, test, model_path.string());
    write_trace(fs::path(cfg.out_dir) / ("mse_trace_" + opt.method + ".csv"), trained.trace);
    write_eval(fs::path(cfg.out_dir), trained.report);

    std::printf("%s: test MSE %.4e, R^2 %.4f\n", opt.method.c_str(), trained.report.mse,
                trained.report.r_squared);
    return 0;
}

int cmd_compare(const RunConfig& cfg, TrainOptions opt) {
    const auto data = labeled(cfg);
    auto [train, test] = dataset::split(data, {cfg.test_fraction, 5, cfg.seed});
    fs::create_directories(cfg.out_dir);

    std::vector<metrics::EvalReport> reports;
    opt.method = "anfis";
    auto anfis_run = train_one(cfg, opt, train, test,
                               (fs::path(cfg.out_dir) / "model_anfis.json").string());
    write_trace(fs::path(cfg.out_dir) / "mse_trace_anfis.csv", anfis_run.trace);
    reports.push_back(anfis_run.report);

    opt.method = "mlp";
    auto mlp_run = train_one(cfg, opt, train, test,
                             (fs::path(cfg.out_dir) / "model_mlp.json").string());
    write_trace(fs::path(cfg.out_dir) / "mse_trace_mlp.csv", mlp_run.trace);
    reports.push_back(mlp_run.report);

    // RBF trained to 1.4x the measured ANFIS test MSE
    opt.method = "rbf";
    opt.rbf_mse_goal = 1.4 * anfis_run.report.mse;
    auto rbf_run = train_one(cfg, opt, train, test,
                             (fs::path(cfg.out_dir) / "model_rbf.json").string());
    write_trace(fs::path(cfg.out_dir) / "mse_trace_rbf.csv", rbf_run.trace);
    reports.push_back(rbf_run.report);

    const auto ranked = metrics::compare(reports);

    auto csv = open_out(fs::path(cfg.out_dir) / "comparison.csv");
    csv << "method,mse,r_squared,rank\n";
    char buf[160];
    for (const auto& r : ranked) {
        std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g,%d\n", r.method.c_str(), r.mse,
                      r.r_squared, r.rank);
        csv << buf;
    }
    auto timings = open_out(fs::path(cfg.out_dir) / "timings.csv");
    timings << "method,train_time_s\n";
    for (const auto& r : ranked) {
        std::snprintf(buf, sizeof buf, "%s,%.3f\n", r.method.c_str(), r.train_time_s);
        timings << buf;
    }
    auto table = open_out(fs::path(cfg.out_dir) / "comparison.txt");
    table << metrics::format_comparison(ranked);
    std::cout << metrics::format_comparison(ranked);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Transformer insulation loss of life: thermal model and surrogate estimators"};
    app.require_subcommand(1);

    RunConfig cfg_lol, cfg_sweep, cfg_train, cfg_cmp;
    TrainOptions topt, cmpopt;
    int c_min = 2, c_max = 30;

    auto* lol = app.add_subcommand("compute-lol", "Compute hourly loss of life for a profile");
    add_common_options(lol, cfg_lol);

    auto* sweep = app.add_subcommand("cluster-sweep", "Sweep FCM cluster counts (one-epoch MSE)");
    add_common_options(sweep, cfg_sweep);
    sweep->add_option("--c-min", c_min, "Smallest cluster count")->capture_default_str();
    sweep->add_option("--c-max", c_max, "Largest cluster count")->capture_default_str();

    auto* train = app.add_subcommand("train", "Train one estimator and evaluate on the test split");
    add_common_options(train, cfg_train);
    train->add_option("--method", topt.method, "anfis|mlp|rbf")
        ->required()
        ->check(CLI::IsMember({"anfis", "mlp", "rbf"}));
    train->add_option("--clusters", topt.clusters, "FCM clusters / fuzzy rules")
        ->capture_default_str();
    train->add_option("--epochs", topt.epochs, "Training epochs (anfis)")->capture_default_str();
    train->add_option("--mlp-epochs", topt.mlp_epochs, "Training epochs (mlp)")
        ->capture_default_str();
    train->add_option("--learning-rate", topt.learning_rate, "Gradient step size")
        ->capture_default_str();
    train->add_option("--mse-goal", topt.rbf_mse_goal, "RBF training MSE goal (raw units)");
    train->add_option("--max-neurons", topt.rbf_max_neurons, "RBF neuron cap")
        ->capture_default_str();

    auto* cmp = app.add_subcommand("compare", "Train all three methods on one split and rank them");
    add_common_options(cmp, cfg_cmp);
    cmp->add_option("--clusters", cmpopt.clusters, "FCM clusters / fuzzy rules")
        ->capture_default_str();
    cmp->add_option("--epochs", cmpopt.epochs, "Training epochs (anfis)")->capture_default_str();
    cmp->add_option("--mlp-epochs", cmpopt.mlp_epochs, "Training epochs (mlp)")
        ->capture_default_str();
    cmp->add_option("--learning-rate", cmpopt.learning_rate, "Gradient step size")
        ->capture_default_str();
    cmp->add_option("--max-neurons", cmpopt.rbf_max_neurons, "RBF neuron cap")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
        if (lol->parsed()) return cmd_compute_lol(cfg_lol);
        if (sweep->parsed()) return cmd_cluster_sweep(cfg_sweep, c_min, c_max);
        if (train->parsed()) return cmd_train(cfg_train, topt);
        if (cmp->parsed()) return cmd_compare(cfg_cmp, cmpopt);
        return 2;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const dataset::IngestError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 1;
    }
}

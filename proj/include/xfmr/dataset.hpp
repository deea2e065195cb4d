#pragma once

// Hourly series ingestion/synthesis, bad-data repair, thermal labeling,
// and randomized train/test and k-fold partitioning.

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "xfmr/thermal.hpp"

namespace xfmr::dataset {

/// Aligned hourly ambient-temperature / load-ratio series.
/// Timestamps are unix seconds, strictly increasing with 1 h spacing.
struct HourlySeries {
    std::vector<std::int64_t> timestamps;
    std::vector<double> ambient_temp_c;
    std::vector<double> load_ratio;

    std::size_t size() const { return timestamps.size(); }
    void validate(double temp_lo = -60.0, double temp_hi = 60.0) const;
};

/// (ambient temp, load ratio) -> hourly lol_percent rows.
struct LabeledDataset {
    std::vector<std::int64_t> timestamps;
    std::vector<std::array<double, 2>> inputs;  // {ambient_temp_c, load_ratio}
    std::vector<double> targets;                // lol_percent per hour

    std::size_t size() const { return inputs.size(); }
};

struct SplitSpec {
    double test_fraction = 0.30;
    int k = 5;
    std::uint64_t seed = 0;
};

/// Thrown on malformed input files; message lists offending rows.
struct IngestError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Reads CSV with header `timestamp,ambient_temp_c,load_ratio` and
/// ISO-8601 timestamps. Collects all row-level problems before throwing.
HourlySeries ingest_csv(const std::string& path);

/// Writes a series in the same CSV schema ingest_csv reads.
void write_series_csv(const std::string& path, const HourlySeries& series);

struct BadDataPolicy {
    double z_threshold = 4.0;
    double temp_lo = -60.0, temp_hi = 60.0;
    double load_lo = 0.0, load_hi = 5.0;
    double max_bad_fraction = 0.10;
};

struct Repair {
    std::size_t row;
    std::string column;
    double old_value;
    double new_value;
};

struct PreprocessResult {
    HourlySeries series;
    std::vector<Repair> repairs;
};

/// Flags out-of-bound or z-score outlier samples and repairs them by
/// linear interpolation between the nearest valid neighbors. Refuses if
/// more than max_bad_fraction of either column is flagged.
PreprocessResult preprocess(const HourlySeries& series, const BadDataPolicy& policy = {});

/// Synthetic residential profile: annual + diurnal temperature sinusoids
/// and a diurnal/weekly load shape, both with seeded Gaussian noise.
struct SyntheticSpec {
    double temp_mean_c = 7.5;
    double temp_annual_amp_c = 20.0;   // winter-to-summer swing
    double temp_diurnal_amp_c = 5.0;
    double temp_noise_c = 2.0;
    double load_base = 0.55;
    double load_annual_amp = 0.15;   // summer-peaking seasonal component
    double load_diurnal_amp = 0.06;
    double load_weekend_boost = 0.08;
    double load_noise = 0.008;
    // hour-to-hour autocorrelation of both noise terms; residential load
    // and weather drift smoothly rather than jumping every hour
    double noise_persistence = 0.98;
    double load_lo = 0.2, load_hi = 1.2;
    std::int64_t start_timestamp = 1420070400;  // 2015-01-01T00:00:00Z
};

HourlySeries synthesize(const SyntheticSpec& spec, std::size_t hours, std::uint64_t seed);

/// Labels a series with per-hour loss of life from the thermal model.
LabeledDataset label(const HourlySeries& series, const thermal::TransformerParams& params,
                     const thermal::StepOptions& opts = {});

void write_labeled_csv(const std::string& path, const LabeledDataset& data);

/// Seeded-shuffle split at spec.test_fraction; disjoint and exhaustive.
std::pair<LabeledDataset, LabeledDataset> split(const LabeledDataset& data,
                                                const SplitSpec& spec);

/// k disjoint validation folds covering the dataset; sizes differ by <= 1.
std::vector<std::pair<LabeledDataset, LabeledDataset>> kfold(const LabeledDataset& data,
                                                             int k, std::uint64_t seed);

}  // namespace xfmr::dataset

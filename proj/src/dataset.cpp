#include "xfmr/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

namespace xfmr::dataset {

namespace {

constexpr std::int64_t kHour = 3600;

// days since 1970-01-01 for a civil date (Howard Hinnant's algorithm)
std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2u) / 5u + d - 1u;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, unsigned& m, unsigned& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t yr = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp + (mp < 10 ? 3 : -9);
    y = static_cast<int>(yr + (m <= 2));
}

std::optional<std::int64_t> parse_iso8601(const std::string& s) {
    int y, mo, d, h, mi, se = 0;
    char sep;
    int n = std::sscanf(s.c_str(), "%d-%d-%d%c%d:%d:%d", &y, &mo, &d, &sep, &h, &mi, &se);
    if (n < 6 || (sep != 'T' && sep != ' ')) return std::nullopt;
    if (mo < 1 || mo > 12 || d < 1 || d > 31 || h < 0 || h > 23 || mi < 0 || mi > 59 ||
        se < 0 || se > 60) {
        return std::nullopt;
    }
    return days_from_civil(y, mo, d) * 86400 + h * 3600 + mi * 60 + se;
}

std::string format_iso8601(std::int64_t t) {
    std::int64_t days = t / 86400;
    std::int64_t rem = t % 86400;
    if (rem < 0) { rem += 86400; --days; }
    int y; unsigned mo, d;
    civil_from_days(days, y, mo, d);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02lld:%02lld:%02lldZ", y, mo, d,
                  static_cast<long long>(rem / 3600), static_cast<long long>(rem / 60 % 60),
                  static_cast<long long>(rem % 60));
    return buf;
}

std::optional<double> parse_number(const std::string& s) {
    if (s.empty()) return std::nullopt;
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

LabeledDataset take_rows(const LabeledDataset& data, const std::vector<std::size_t>& idx) {
    LabeledDataset out;
    out.timestamps.reserve(idx.size());
    out.inputs.reserve(idx.size());
    out.targets.reserve(idx.size());
    for (std::size_t i : idx) {
        out.timestamps.push_back(data.timestamps[i]);
        out.inputs.push_back(data.inputs[i]);
        out.targets.push_back(data.targets[i]);
    }
    return out;
}

}  // namespace

void HourlySeries::validate(double temp_lo, double temp_hi) const {
    if (timestamps.size() != ambient_temp_c.size() || timestamps.size() != load_ratio.size()) {
        throw std::invalid_argument("series columns differ in length");
    }
    if (timestamps.empty()) throw std::invalid_argument("empty series");
    for (std::size_t i = 1; i < timestamps.size(); ++i) {
        if (timestamps[i] - timestamps[i - 1] != kHour) {
            throw std::invalid_argument("timestamps are not uniformly hourly at row " +
                                        std::to_string(i));
        }
    }
    for (std::size_t i = 0; i < size(); ++i) {
        if (ambient_temp_c[i] < temp_lo || ambient_temp_c[i] > temp_hi) {
            throw std::invalid_argument("ambient temperature out of bounds at row " +
                                        std::to_string(i));
        }
        if (load_ratio[i] < 0.0) {
            throw std::invalid_argument("negative load ratio at row " + std::to_string(i));
        }
    }
}

HourlySeries ingest_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IngestError("cannot open input file: " + path);

    std::string line;
    if (!std::getline(in, line)) throw IngestError("empty file: " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "timestamp,ambient_temp_c,load_ratio") {
        throw IngestError("unexpected header, want timestamp,ambient_temp_c,load_ratio: got " + line);
    }

    HourlySeries series;
    std::vector<std::string> problems;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto cells = split_line(line);
        if (cells.size() != 3) {
            problems.push_back("row " + std::to_string(row) + ": expected 3 columns, got " +
                               std::to_string(cells.size()));
            continue;
        }
        auto ts = parse_iso8601(cells[0]);
        auto temp = parse_number(cells[1]);
        auto load = parse_number(cells[2]);
        if (!ts) problems.push_back("row " + std::to_string(row) + ": bad timestamp '" + cells[0] + "'");
        if (!temp) problems.push_back("row " + std::to_string(row) + ": non-numeric ambient_temp_c");
        if (!load) problems.push_back("row " + std::to_string(row) + ": non-numeric load_ratio");
        if (!ts || !temp || !load) continue;
        if (*temp < -60.0 || *temp > 60.0) {
            problems.push_back("row " + std::to_string(row) + ": ambient_temp_c out of [-60,60]");
        }
        if (*load < 0.0) {
            problems.push_back("row " + std::to_string(row) + ": negative load_ratio");
        }
        series.timestamps.push_back(*ts);
        series.ambient_temp_c.push_back(*temp);
        series.load_ratio.push_back(*load);
    }
    for (std::size_t i = 1; i < series.timestamps.size(); ++i) {
        const auto gap = series.timestamps[i] - series.timestamps[i - 1];
        if (gap != kHour) {
            problems.push_back("row " + std::to_string(i + 2) + ": timestamp spacing " +
                               std::to_string(gap) + " s, want 3600 s");
        }
    }
    if (!problems.empty()) {
        std::string msg = "ingestion failed with " + std::to_string(problems.size()) + " problem(s):";
        for (const auto& p : problems) msg += "\n  " + p;
        throw IngestError(msg);
    }
    if (series.timestamps.empty()) throw IngestError("no data rows in " + path);
    return series;
}

void write_series_csv(const std::string& path, const HourlySeries& series) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << "timestamp,ambient_temp_c,load_ratio\n";
    char buf[96];
    for (std::size_t i = 0; i < series.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g\n",
                      format_iso8601(series.timestamps[i]).c_str(),
                      series.ambient_temp_c[i], series.load_ratio[i]);
        out << buf;
    }
}

PreprocessResult preprocess(const HourlySeries& series, const BadDataPolicy& policy) {
    if (series.timestamps.size() != series.ambient_temp_c.size() ||
        series.timestamps.size() != series.load_ratio.size() || series.timestamps.empty()) {
        throw std::invalid_argument("malformed series");
    }

    PreprocessResult result;
    result.series = series;

    auto repair_column = [&](std::vector<double>& col, const char* name, double lo, double hi) {
        const std::size_t n = col.size();
        double mean = std::accumulate(col.begin(), col.end(), 0.0) / static_cast<double>(n);
        double var = 0.0;
        for (double v : col) var += (v - mean) * (v - mean);
        double sd = std::sqrt(var / static_cast<double>(n));

        std::vector<bool> bad(n, false);
        std::size_t nbad = 0;
        for (std::size_t i = 0; i < n; ++i) {
            bool flag = col[i] < lo || col[i] > hi || !std::isfinite(col[i]);
            if (!flag && sd > 0.0 && std::abs(col[i] - mean) / sd > policy.z_threshold) flag = true;
            bad[i] = flag;
            nbad += flag;
        }
        if (static_cast<double>(nbad) > policy.max_bad_fraction * static_cast<double>(n)) {
            throw std::runtime_error(std::string("preprocess refused: ") + std::to_string(nbad) +
                                     " of " + std::to_string(n) + " " + name +
                                     " samples flagged, above the allowed fraction");
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (!bad[i]) continue;
            std::ptrdiff_t prev = static_cast<std::ptrdiff_t>(i) - 1;
            while (prev >= 0 && bad[static_cast<std::size_t>(prev)]) --prev;
            std::size_t next = i + 1;
            while (next < n && bad[next]) ++next;
            double repl;
            if (prev >= 0 && next < n) {
                const double t = static_cast<double>(i - static_cast<std::size_t>(prev)) /
                                 static_cast<double>(next - static_cast<std::size_t>(prev));
                repl = col[static_cast<std::size_t>(prev)] +
                       t * (col[next] - col[static_cast<std::size_t>(prev)]);
            } else if (prev >= 0) {
                repl = col[static_cast<std::size_t>(prev)];
            } else if (next < n) {
                repl = col[next];
            } else {
                throw std::runtime_error("preprocess: no valid samples to interpolate from");
            }
            result.repairs.push_back({i, name, col[i], repl});
        }
        // apply after scanning so interpolation anchors are original values
        for (const auto& r : result.repairs) {
            if (r.column == name) col[r.row] = r.new_value;
        }
    };

    repair_column(result.series.ambient_temp_c, "ambient_temp_c", policy.temp_lo, policy.temp_hi);
    repair_column(result.series.load_ratio, "load_ratio", policy.load_lo, policy.load_hi);
    return result;
}

HourlySeries synthesize(const SyntheticSpec& spec, std::size_t hours, std::uint64_t seed) {
    if (hours < 24) throw std::domain_error("synthesize requires hours >= 24");
    if (!(spec.load_hi > spec.load_lo) || spec.load_lo < 0.0) {
        throw std::domain_error("invalid load band");
    }
    if (spec.temp_noise_c < 0.0 || spec.load_noise < 0.0) {
        throw std::domain_error("noise amplitudes must be >= 0");
    }
    if (!(spec.noise_persistence >= 0.0 && spec.noise_persistence < 1.0)) {
        throw std::domain_error("noise_persistence must lie in [0, 1)");
    }

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    // AR(1) noise with stationary standard deviation 1
    const double rho = spec.noise_persistence;
    const double innov = std::sqrt(1.0 - rho * rho);
    double temp_ar = 0.0, load_ar = 0.0;

    HourlySeries series;
    series.timestamps.reserve(hours);
    series.ambient_temp_c.reserve(hours);
    series.load_ratio.reserve(hours);

    constexpr double two_pi = 6.283185307179586476925286766559;
    for (std::size_t h = 0; h < hours; ++h) {
        const double hod = static_cast<double>(h % 24);
        const std::size_t day = h / 24;
        const bool weekend = (day % 7) >= 5;

        // Documented closed form: annual cosine trough at h = 0 (midwinter
        // start), diurnal peak mid-afternoon, evening-peaked load shape.
        double temp = spec.temp_mean_c -
                      spec.temp_annual_amp_c * std::cos(two_pi * static_cast<double>(h) / 8760.0) +
                      spec.temp_diurnal_amp_c * std::sin(two_pi * (hod - 9.0) / 24.0);
        double load = spec.load_base -
                      spec.load_annual_amp * std::cos(two_pi * static_cast<double>(h) / 8760.0) +
                      spec.load_diurnal_amp * std::sin(two_pi * (hod - 13.0) / 24.0) +
                      (weekend ? spec.load_weekend_boost : 0.0);

        temp_ar = rho * temp_ar + innov * gauss(rng);
        load_ar = rho * load_ar + innov * gauss(rng);
        temp += spec.temp_noise_c * temp_ar;
        load += spec.load_noise * load_ar;
        load = std::clamp(load, spec.load_lo, spec.load_hi);

        series.timestamps.push_back(spec.start_timestamp + static_cast<std::int64_t>(h) * kHour);
        series.ambient_temp_c.push_back(temp);
        series.load_ratio.push_back(load);
    }
    return series;
}

LabeledDataset label(const HourlySeries& series, const thermal::TransformerParams& params,
                     const thermal::StepOptions& opts) {
    series.validate();
    auto records = thermal::run_profile(series.ambient_temp_c, series.load_ratio, 1.0, params, opts);

    LabeledDataset data;
    data.timestamps = series.timestamps;
    data.inputs.reserve(records.size());
    data.targets.reserve(records.size());
    for (const auto& r : records) {
        data.inputs.push_back({r.ambient_temp_c, r.load_ratio});
        data.targets.push_back(r.lol_percent);
    }
    return data;
}

void write_labeled_csv(const std::string& path, const LabeledDataset& data) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << "timestamp,ambient_temp_c,load_ratio,lol_percent\n";
    char buf[128];
    for (std::size_t i = 0; i < data.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g,%.17g\n",
                      format_iso8601(data.timestamps[i]).c_str(),
                      data.inputs[i][0], data.inputs[i][1], data.targets[i]);
        out << buf;
    }
}

std::pair<LabeledDataset, LabeledDataset> split(const LabeledDataset& data,
                                                const SplitSpec& spec) {
    if (data.size() < 10) throw std::invalid_argument("dataset too small to split (< 10 rows)");
    if (!(spec.test_fraction > 0.0 && spec.test_fraction < 1.0)) {
        throw std::invalid_argument("test_fraction must lie in (0, 1)");
    }
    std::vector<std::size_t> idx(data.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::mt19937_64 rng(spec.seed);
    std::shuffle(idx.begin(), idx.end(), rng);

    const auto n_test = static_cast<std::size_t>(
        std::llround(spec.test_fraction * static_cast<double>(data.size())));
    std::vector<std::size_t> test_idx(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_test));
    std::vector<std::size_t> train_idx(idx.begin() + static_cast<std::ptrdiff_t>(n_test), idx.end());
    std::sort(test_idx.begin(), test_idx.end());
    std::sort(train_idx.begin(), train_idx.end());
    return {take_rows(data, train_idx), take_rows(data, test_idx)};
}

std::vector<std::pair<LabeledDataset, LabeledDataset>> kfold(const LabeledDataset& data,
                                                             int k, std::uint64_t seed) {
    if (k < 2) throw std::invalid_argument("k must be >= 2");
    if (static_cast<std::size_t>(k) > data.size()) {
        throw std::invalid_argument("k exceeds dataset size");
    }
    std::vector<std::size_t> idx(data.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    std::shuffle(idx.begin(), idx.end(), rng);

    const std::size_t n = data.size();
    const std::size_t base = n / static_cast<std::size_t>(k);
    const std::size_t extra = n % static_cast<std::size_t>(k);

    std::vector<std::pair<LabeledDataset, LabeledDataset>> folds;
    std::size_t pos = 0;
    for (int f = 0; f < k; ++f) {
        const std::size_t sz = base + (static_cast<std::size_t>(f) < extra ? 1 : 0);
        std::vector<std::size_t> val_idx(idx.begin() + static_cast<std::ptrdiff_t>(pos),
                                         idx.begin() + static_cast<std::ptrdiff_t>(pos + sz));
        std::vector<std::size_t> train_idx;
        train_idx.reserve(n - sz);
        train_idx.insert(train_idx.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(pos));
        train_idx.insert(train_idx.end(), idx.begin() + static_cast<std::ptrdiff_t>(pos + sz), idx.end());
        std::sort(val_idx.begin(), val_idx.end());
        std::sort(train_idx.begin(), train_idx.end());
        folds.emplace_back(take_rows(data, train_idx), take_rows(data, val_idx));
        pos += sz;
    }
    return folds;
}

}  // namespace xfmr::dataset

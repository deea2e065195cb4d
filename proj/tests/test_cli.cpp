#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
    const std::string cmd = std::string(XFMR_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path fresh_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::vector<std::string> read_lines(const fs::path& path) {
    std::ifstream in(path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

std::string write_constant_csv(const fs::path& dir, int hours) {
    const auto path = dir / "input.csv";
    std::ofstream out(path);
    out << "timestamp,ambient_temp_c,load_ratio\n";
    for (int h = 0; h < hours; ++h) {
        char ts[32];
        std::snprintf(ts, sizeof ts, "2015-01-01T%02d:00:00", h);
        out << ts << ",30.0,1.0\n";
    }
    return path.string();
}

}  // namespace

TEST_CASE("compute-lol on a constant 24 h profile") {
    const auto dir = fresh_dir("cli_lol");
    const auto input = write_constant_csv(dir, 24);
    REQUIRE(run_cli("compute-lol --input " + input + " --out " + (dir / "out").string()) == 0);

    const auto rows = read_lines(dir / "out" / "lol_records.csv");
    REQUIRE(rows.size() == 25);  // header + 24 intervals
    CHECK(rows[0] == "interval_index,ambient_temp_c,load_ratio,hotspot_temp_c,aging_factor,lol_percent");

    // the summary total equals the sum of the per-row column
    double row_sum = 0.0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto last_comma = rows[i].rfind(',');
        row_sum += std::stod(rows[i].substr(last_comma + 1));
    }
    double reported = -1.0;
    for (const auto& line : read_lines(dir / "out" / "summary.txt")) {
        if (line.rfind("total_lol_percent:", 0) == 0) reported = std::stod(line.substr(18));
    }
    CHECK(reported == doctest::Approx(row_sum).epsilon(1e-12));
}

TEST_CASE("compute-lol on a synthetic year re-sums consistently") {
    const auto dir = fresh_dir("cli_year");
    REQUIRE(run_cli("compute-lol --synthetic 8760 --seed 4 --out " + (dir / "out").string()) == 0);
    const auto rows = read_lines(dir / "out" / "lol_records.csv");
    REQUIRE(rows.size() == 8761);
    double row_sum = 0.0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        row_sum += std::stod(rows[i].substr(rows[i].rfind(',') + 1));
    }
    double reported = -1.0;
    for (const auto& line : read_lines(dir / "out" / "summary.txt")) {
        if (line.rfind("total_lol_percent:", 0) == 0) reported = std::stod(line.substr(18));
    }
    CHECK(reported == doctest::Approx(row_sum).epsilon(1e-9));
}

TEST_CASE("train writes a model, trace, and eval file") {
    const auto dir = fresh_dir("cli_train");
    REQUIRE(run_cli("train --method anfis --clusters 4 --epochs 3 --synthetic 720 --seed 2 --out " +
                    (dir / "out").string()) == 0);
    CHECK(fs::exists(dir / "out" / "model_anfis.json"));
    CHECK(fs::exists(dir / "out" / "timing_anfis.txt"));
    CHECK(read_lines(dir / "out" / "mse_trace_anfis.csv").size() == 4);  // header + 3 epochs
    const auto eval = read_lines(dir / "out" / "eval_anfis.csv");
    REQUIRE(eval.size() == 2);
    CHECK(eval[1].rfind("anfis,", 0) == 0);
}

TEST_CASE("error handling maps to exit code 2") {
    const auto dir = fresh_dir("cli_err");
    CHECK(run_cli("compute-lol --input /no/such/file.csv") == 2);
    CHECK(run_cli("train --method nope --synthetic 720") == 2);
    CHECK(run_cli("compute-lol") == 2);  // neither --input nor --synthetic
    const auto input = write_constant_csv(dir, 24);
    CHECK(run_cli("compute-lol --input " + input + " --synthetic 24") == 2);  // both sources
    CHECK(run_cli("compute-lol --synthetic 24 --exponent-m 0.1") == 2);       // invalid params
    CHECK(run_cli("") == 2);  // missing subcommand
}

TEST_CASE("help exits zero") {
    CHECK(run_cli("--help") == 0);
    CHECK(run_cli("train --help") == 0);
}

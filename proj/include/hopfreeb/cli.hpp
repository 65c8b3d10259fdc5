#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "hopfreeb/holonomy.hpp"
#include "hopfreeb/hopf.hpp"

namespace hopfreeb {

using ojson = nlohmann::ordered_json;

struct HopfBlock {
    std::array<std::string, 2> lambda{"2/1", "0/1"};
    std::array<std::string, 2> mu{"2/1", "0/1"};
    std::array<std::string, 2> tau{"0/1", "0/1"};
    int p = 1;
};

struct HolonomyBlock {
    std::string family = HolonomyMap::kFamily;
    double c = 1.0;
    double a = 1.0;
    double x0 = 0.5;
    double x_max = 1.0;
    int k_match = 3;
};

struct Thresholds {
    double functional = 1e-9;
    double group = 1e-8;
    double composition = 1e-10;
    double boundary = 1e-12;
};

/// Complete run description; `task` holds the subcommand-specific block.
struct RunConfig {
    HopfBlock hopf;
    HolonomyBlock holonomy;
    ojson task = ojson::object();
    Thresholds thresholds;
    std::uint64_t seed = 20240601ULL;
    std::string out;

    ojson to_json() const;
    static RunConfig from_json(const ojson& j);
};

/// Parses config text; throws Error(ConfigError) naming the offending field.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

HopfParams make_params(const HopfBlock& block);
HolonomyMap make_holonomy(const HolonomyBlock& block);
TimeFunctionPtr make_time_function(const HolonomyBlock& block);

struct ResidualStat {
    std::string name;
    double max = 0.0;
    double median = 0.0;
    double threshold = 0.0;
    bool pass() const { return max < threshold; }
};

struct Report {
    std::string task;
    ojson config;
    std::uint64_t seed = 0;
    ojson result = ojson::object();
    std::vector<ResidualStat> residuals;
    std::vector<std::pair<std::string, bool>> checks;
    std::string error;       // set when the run could not be carried out
    bool config_error = false;
    double wall_clock = 0.0; // seconds
    std::string csv;         // solve: sample table
    std::string flatness_csv;

    bool pass() const;
    ojson to_json(bool with_clock = true) const;
    std::string to_text() const;
};

Report run_classify(const RunConfig& config);
Report run_table(const RunConfig& config);
Report run_solve(const RunConfig& config);
Report run_verify(const RunConfig& config);
/// Dispatches on the subcommand name and converts errors into the report.
Report run_task(const std::string& task, const RunConfig& config);

/// 0 PASS, 1 verdict failure, 2 configuration error.
int exit_code(const Report& report);

} // namespace hopfreeb

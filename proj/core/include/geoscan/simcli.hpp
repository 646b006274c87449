#ifndef GEOSCAN_SIMCLI_HPP
#define GEOSCAN_SIMCLI_HPP

#include "geoscan/scenario.hpp"

#include <map>
#include <string>
#include <vector>

namespace geoscan {

enum class OutputFormat { Csv, Json };

struct RunOptions {
    std::string out_dir = ".";
    OutputFormat format = OutputFormat::Csv;
    std::string solver = "auto";  // auto | exact | greedy
    bool validate = false;
};

struct RunReport {
    std::string command;
    std::string config_hash_hex;
    std::uint64_t seed = 0;
    std::vector<std::string> outputs;  // paths relative to out_dir
    std::map<std::string, double> metrics;
    std::vector<std::string> notes;
};

RunReport run_drift(const ScenarioConfig& config, const RunOptions& options);
RunReport run_init_plan(const ScenarioConfig& config, const RunOptions& options);
RunReport run_reconfig_plan(const ScenarioConfig& config, const RunOptions& options);
RunReport run_upkeep(const ScenarioConfig& config, const RunOptions& options);
RunReport run_schedule(const ScenarioConfig& config, const RunOptions& options);
RunReport run_simulate(const ScenarioConfig& config, const RunOptions& options);

/// Writes run_report.json into the output directory and returns its path.
std::string write_run_report(const RunReport& report, const std::string& out_dir);

std::string run_report_to_json(const RunReport& report);

}  // namespace geoscan

#endif  // GEOSCAN_SIMCLI_HPP

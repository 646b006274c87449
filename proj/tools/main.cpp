// geoscan: scenario-driven constellation planning and simulation CLI.
//
// Subcommands: drift | init-plan | reconfig-plan | upkeep | schedule | simulate
// Exit codes: 0 success, 2 configuration error, 3 solver or deconfliction
// failure, 1 anything else.

#include "geoscan/planner.hpp"
#include "geoscan/scheduler.hpp"
#include "geoscan/simcli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <functional>
#include <iostream>
#include <optional>

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    std::string solver = "auto";
    std::string format = "csv";
    bool validate = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "Scenario configuration file (JSON)")
        ->required();
    cmd->add_option("--out", args.out_dir, "Output directory");
    cmd->add_option("--seed", args.seed, "Override the scenario seed");
    cmd->add_option("--solver", args.solver, "Scheduler solver: exact | greedy | auto")
        ->check(CLI::IsMember({"auto", "exact", "greedy"}));
    cmd->add_option("--format", args.format, "Tabular output format: csv | json")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_flag("--validate", args.validate, "Replay and validate emitted schedules");
}

int dispatch(const CommonArgs& args,
             const std::function<geoscan::RunReport(const geoscan::ScenarioConfig&,
                                                    const geoscan::RunOptions&)>& command) {
    try {
        geoscan::ScenarioConfig config = geoscan::load_scenario(args.config_path);
        if (args.seed) config.seed = *args.seed;
        geoscan::RunOptions options;
        options.out_dir = args.out_dir;
        options.format = args.format == "json" ? geoscan::OutputFormat::Json
                                               : geoscan::OutputFormat::Csv;
        options.solver = args.solver;
        options.validate = args.validate;

        const geoscan::RunReport report = command(config, options);
        std::cout << geoscan::run_report_to_json(report) << "\n";
        if (args.validate) {
            const auto it = report.metrics.find("validation_errors");
            if (it != report.metrics.end() && it->second > 0.0) {
                std::cerr << "error: schedule validation reported findings\n";
                return 3;
            }
        }
        return 0;
    } catch (const geoscan::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const geoscan::DeconflictionFailure& e) {
        std::cerr << "deconfliction failure: " << e.what() << "\n";
        return 3;
    } catch (const geoscan::SolverFailure& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return 3;
    } catch (const geoscan::InfeasibleTransfer& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return 3;
    } catch (const geoscan::InstanceTooLarge& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return 3;
    } catch (const geoscan::InfeasibleInstance& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Swarm constellation planning and simulation toolkit"};
    app.require_subcommand(1);

    struct Sub {
        const char* name;
        const char* help;
        geoscan::RunReport (*fn)(const geoscan::ScenarioConfig&, const geoscan::RunOptions&);
    };
    const Sub subs[] = {
        {"drift", "Along-track drift tables over wheel radius and phase", geoscan::run_drift},
        {"init-plan", "Formation initialization plans and cost-vs-radius sweep",
         geoscan::run_init_plan},
        {"reconfig-plan", "Wheel plane-change plans and cost ratio", geoscan::run_reconfig_plan},
        {"upkeep", "Station-keeping budgets and mission lifetime", geoscan::run_upkeep},
        {"schedule", "Coordinated observation schedule", geoscan::run_schedule},
        {"simulate", "End-to-end deploy/init/observe run", geoscan::run_simulate},
    };

    CommonArgs args[std::size(subs)];
    for (std::size_t i = 0; i < std::size(subs); ++i) {
        CLI::App* cmd = app.add_subcommand(subs[i].name, subs[i].help);
        add_common(cmd, args[i]);
    }

    CLI11_PARSE(app, argc, argv);

    for (std::size_t i = 0; i < std::size(subs); ++i) {
        if (app.get_subcommand(subs[i].name)->parsed()) return dispatch(args[i], subs[i].fn);
    }
    return 1;
}

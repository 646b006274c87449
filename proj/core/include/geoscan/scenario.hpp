#ifndef GEOSCAN_SCENARIO_HPP
#define GEOSCAN_SCENARIO_HPP

#include "geoscan/relmotion.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace geoscan {

/// Raised for any scenario file problem; message carries the field path.
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct TrackConfig {
    int num_fleets = 10;
    // Either one uniform spacing or an explicit list of num_fleets-1 gaps.
    double separation_km = 150.0;
    std::vector<double> separations_km;
};

struct TargetConfig {
    int id = 0;
    double along_track_km = 0.0;
    double cross_track_km = 0.0;
    double window_start_s = 0.0;
    double window_end_s = 0.0;
    double priority = 1.0;
};

struct ReconfigureConfig {
    Vec3 new_plane = Vec3(0.0, 1.0, 0.0);
    double new_radius_m = 0.0;  // 0 = keep current radius
    int after_orbit = 0;        // simulate-only: reconfigure after this orbit
};

struct ScenarioConfig {
    int schema_version = 1;
    std::uint64_t seed = 42;

    // Chief orbit.
    double altitude_km = 400.0;
    std::optional<double> semi_major_axis_m;  // overrides altitude when set

    // Constellation layout.
    double wheel_radius_m = 100.0;
    int deputies_per_fleet = 10;
    std::vector<TrackConfig> tracks{TrackConfig{}};
    std::string propulsion = "VACCO_MIPS";  // or AEROJET_MPS120
    std::string adcs = "BCT_XACT100";
    double mass_kg = 10.0;
    double max_slew_rate_deg_s = 1.0;

    // Deployment dispersion: positions uniform in a centred cube, zero
    // relative velocity.
    double deployment_cube_side_m = 50.0;

    // Planner.
    double transfer_time_limit_s = 900.0;
    int impulse_epochs = 20;
    double min_separation_m = 10.0;

    // Upkeep.
    std::string upkeep_scheme = "cancel_and_restore";  // or rate_null
    int corrections_per_orbit = 1;
    std::string drift_length_scale = "semi_major_axis";  // or altitude
    double upkeep_alpha_x_deg = 0.0;

    // Scheduler.
    double slot_duration_s = 30.0;
    int horizon_slots = 20;
    double max_off_nadir_deg = 60.0;
    double momentum_per_slew_mNms_per_deg = 0.5;
    double desat_threshold_fraction = 0.8;
    double desat_impulse_Ns = 0.05;
    int exact_cap_vars = 600;
    std::vector<TargetConfig> targets;

    // Drift sweep grids.
    std::vector<double> drift_rho_grid_m;       // default 100..1000 step 100
    std::vector<double> drift_alpha_grid_deg;   // default 0..330 step 30

    // Simulation.
    int simulate_orbits = 2;
    std::optional<ReconfigureConfig> reconfigure;

    ChiefOrbit chief_orbit() const {
        return semi_major_axis_m ? ChiefOrbit(*semi_major_axis_m)
                                 : ChiefOrbit::from_altitude_m(altitude_km * 1000.0);
    }
    std::vector<double> rho_grid() const;
    std::vector<double> alpha_grid_deg() const;
};

ScenarioConfig load_scenario(const std::string& path);
ScenarioConfig parse_scenario(const std::string& json_text);
std::string scenario_to_json(const ScenarioConfig& config);

/// Stable FNV-1a digest of the canonicalized (sorted-key JSON) config.
std::string config_hash(const ScenarioConfig& config);

/// Deployment draw: uniform positions in the dispersion cube, zero velocity.
std::vector<LvlhState> draw_deployment_states(const ScenarioConfig& config, int count,
                                              double epoch_s = 0.0);

}  // namespace geoscan

#endif  // GEOSCAN_SCENARIO_HPP

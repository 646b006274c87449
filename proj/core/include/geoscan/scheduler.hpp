#ifndef GEOSCAN_SCHEDULER_HPP
#define GEOSCAN_SCHEDULER_HPP

#include "geoscan/constellation.hpp"
#include "geoscan/relmotion.hpp"

#include <optional>
#include <string>
#include <vector>

namespace geoscan {

class InstanceTooLarge : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class InfeasibleInstance : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Ground phenomenon to observe, in a flattened ground frame that moves with
/// the scenario: along-track metres ahead of the reference ground point at
/// t = 0, cross-track metres off the track.
struct ObservationTarget {
    int id = 0;
    double along_track_m = 0.0;
    double cross_track_m = 0.0;
    double window_start_s = 0.0;
    double window_end_s = 0.0;
    double priority = 1.0;
};

struct TimeGrid {
    double slot_duration_s = 30.0;
    int horizon_slots = 0;
};

struct SchedSatellite {
    int id = 0;
    std::optional<SensorKind> sensor;
    double along_track_offset_m = 0.0;  // ground-track lead (+) or lag (-) at t = 0
    double momentum_capacity_mNms = 100.0;
    double initial_momentum_mNms = 0.0;
    double max_slew_rate_deg_s = 1.0;
};

struct SchedulerInstance {
    ChiefOrbit chief{6.778137e6};
    std::vector<SchedSatellite> satellites;
    std::vector<ObservationTarget> targets;
    TimeGrid grid;
    double max_off_nadir_rad = 60.0 * M_PI / 180.0;
    double angle_bin_rad = 10.0 * M_PI / 180.0;
    double momentum_per_slew_mNms_per_deg = 0.5;
    double desat_threshold_fraction = 0.8;  // greedy inserts desaturation at this fill level
    double desat_impulse_Ns = 0.05;
    int exact_cap_vars = 600;
};

/// One admissible (satellite, slot, target) look with its viewing geometry.
struct FeasiblePointing {
    int sat_index = 0;
    int slot = 0;
    int target_index = 0;
    double off_nadir_rad = 0.0;
    Vec3 los = Vec3(0.0, 0.0, -1.0);  // unit line of sight, (along, cross, up) axes
};

std::vector<FeasiblePointing> feasible_pointings(const SchedulerInstance& instance);

struct PointingTask {
    int satellite_id = 0;
    int slot = 0;
    int target_id = -1;  // valid iff !desaturate
    bool desaturate = false;
    double off_nadir_rad = 0.0;
    double slew_from_previous_rad = 0.0;
};

struct Schedule {
    std::vector<PointingTask> tasks;  // sorted by (slot, satellite_id)
    double objective_value = 0.0;
    /// End-of-slot wheel momentum per satellite (instance order) per slot.
    std::vector<std::vector<double>> momentum_mNms;
    int desat_count = 0;
};

/// Declared surrogate objective: sum over (target, slot) of
/// priority x distinct-angle-bin count x (required sensor kinds present)/4.
double science_value(const Schedule& schedule, const SchedulerInstance& instance);

struct SolveStats {
    long nodes = 0;
    long lp_solves = 0;
    /// Worst amount by which an LP bound undercut the best integer value found
    /// in its subtree; soundness demands this stay at numerical noise.
    double max_bound_violation = 0.0;
    double root_bound = 0.0;
};

/// Optimal schedule by depth-first branch-and-bound with LP relaxation bounds.
Schedule solve_exact(const SchedulerInstance& instance, SolveStats* stats = nullptr);

/// Slot-by-slot highest-marginal-gain heuristic with threshold desaturation.
Schedule solve_greedy(const SchedulerInstance& instance);

/// Replays all Schedule invariants plus feasibility-relation membership.
std::vector<Finding> validate_schedule(const Schedule& schedule,
                                       const SchedulerInstance& instance);

std::string instance_to_json_text(const SchedulerInstance& instance);
SchedulerInstance instance_from_json_text(const std::string& text);
std::string schedule_to_json_text(const Schedule& schedule);
std::string schedule_to_csv(const Schedule& schedule, const SchedulerInstance& instance);

}  // namespace geoscan

#endif  // GEOSCAN_SCHEDULER_HPP

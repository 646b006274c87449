#ifndef GEOSCAN_PLANNER_HPP
#define GEOSCAN_PLANNER_HPP

#include "geoscan/constellation.hpp"
#include "geoscan/relmotion.hpp"

#include <span>
#include <string>
#include <vector>

namespace geoscan {

class InfeasibleTransfer : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class SolverFailure : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class SizeMismatch : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class DeconflictionFailure : public std::runtime_error {
  public:
    DeconflictionFailure(const std::string& msg, int sat_a, int sat_b, double closest_m)
        : std::runtime_error(msg), sat_a(sat_a), sat_b(sat_b), closest_approach_m(closest_m) {}
    int sat_a;
    int sat_b;
    double closest_approach_m;
};

struct TransferProblem {
    LvlhState start;
    LvlhState goal;  // target state at start.epoch_s + time_limit_s
    double time_limit_s = 900.0;
    int n_impulse_epochs = 20;
    double min_separation_m = 10.0;
};

/**
 * Timed impulse sequence for one satellite. Fuel is minimized in the per-axis
 * 1-norm (the linear-program objective); the reported figure of merit is the
 * physical impulse mass * sum of Euclidean burn magnitudes.
 */
struct ManeuverPlan {
    int satellite_id = -1;
    double mass_kg = 10.0;
    std::vector<Impulse> impulses;
    double total_impulse_Ns = 0.0;   // mass * sum |dv|_2 per burn
    double lp_objective_mps = 0.0;   // sum |dv|_1 per burn (solver objective)
    double lp_dual_objective_mps = 0.0;
    LvlhState start;                 // state at window start, before any burn
    LvlhState goal;                  // target state at window end
    double window_start_s = 0.0;
    double window_end_s = 0.0;
    double departure_delay_s = 0.0;  // coast-before-first-burn imposed by deconfliction
    std::vector<Vec3> samples_m;     // positions sampled every sample_dt over the window
    double sample_dt_s = 1.0;
};

struct PlannerOptions {
    double time_limit_s = 900.0;
    int n_impulse_epochs = 20;
    double min_separation_m = 10.0;
    int deconflict_max_attempts = 10;
    double sample_dt_s = 1.0;
    double departure_epoch_s = 0.0;
};

struct FleetPlan {
    std::vector<ManeuverPlan> plans;   // one per deputy, deputy order
    std::vector<int> slot_assignment;  // deputy index -> slot index
    double fleet_total_Ns = 0.0;
    double mean_cost_Ns = 0.0;
    double max_cost_Ns = 0.0;
    std::vector<Finding> findings;
};

/// Minimum-fuel impulsive transfer on a fixed epoch grid spanning the window.
ManeuverPlan plan_transfer(const TransferProblem& problem, const ChiefOrbit& chief,
                           double mass_kg);

/// Optimal satellite-to-slot pairing by transfer cost (Hungarian method).
std::vector<int> assign_slots(std::span<const LvlhState> deployment_states,
                              std::span<const RelativeOrbitParams> slots, const ChiefOrbit& chief,
                              double mass_kg, double time_limit_s, int n_impulse_epochs = 20);

/// Deployment-to-wheel initialization: assignment, per-satellite transfer
/// plans, then collision deconfliction.
FleetPlan plan_formation_init(const Fleet& fleet, std::span<const LvlhState> deployment_states,
                              const ChiefOrbit& chief, const PlannerOptions& options = {});

/// Move a formed wheel onto a new plane and/or radius (new_radius_m <= 0
/// keeps the current radius).
FleetPlan plan_reconfiguration(const Fleet& fleet, const Vec3& new_plane, double new_radius_m,
                               const ChiefOrbit& chief, const PlannerOptions& options = {});

/**
 * Certify pairwise separation at the sampling resolution. On a violation the
 * lower-priority satellite (higher id) has its departure re-timed by staggered
 * delays and its transfer re-solved, up to max_attempts times.
 */
std::vector<ManeuverPlan> deconflict(std::vector<ManeuverPlan> plans, double min_separation_m,
                                     const ChiefOrbit& chief, const PlannerOptions& options = {});

/// Closest pairwise approach over the common window, by trajectory samples.
double min_pairwise_separation_m(std::span<const ManeuverPlan> plans);

std::string plans_to_csv(std::span<const ManeuverPlan> plans);
std::string plans_to_json_text(std::span<const ManeuverPlan> plans);

}  // namespace geoscan

#endif  // GEOSCAN_PLANNER_HPP

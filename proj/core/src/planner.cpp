#include "geoscan/planner.hpp"

#include "geoscan/hungarian.hpp"
#include "geoscan/lp.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace geoscan {

namespace {

constexpr double kTerminalPosTolM = 0.1;
constexpr double kTerminalVelTolMps = 1e-4;
constexpr double kNullBurnMps = 1e-12;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

// Positions every sample_dt over [window_start, window_end], impulses applied
// exactly at their epochs.
std::vector<Vec3> sample_positions(const LvlhState& start, std::span<const Impulse> impulses,
                                   const ChiefOrbit& chief, double window_start,
                                   double window_end, double sample_dt) {
    const int n_samples = static_cast<int>(std::floor((window_end - window_start) / sample_dt +
                                                      1e-9)) + 1;
    std::vector<Vec3> samples;
    samples.reserve(static_cast<std::size_t>(n_samples));

    Vec6 x = start.vec();
    double t = start.epoch_s;
    std::size_t next_burn = 0;
    for (int k = 0; k < n_samples; ++k) {
        const double ts = window_start + k * sample_dt;
        while (next_burn < impulses.size() && impulses[next_burn].time_s <= ts + 1e-12) {
            const double dt = impulses[next_burn].time_s - t;
            if (dt > 0.0) x = hcw_stm(chief, dt) * x;
            x.tail<3>() += impulses[next_burn].delta_v_mps;
            t = impulses[next_burn].time_s;
            ++next_burn;
        }
        if (ts > t) {
            x = hcw_stm(chief, ts - t) * x;
            t = ts;
        }
        samples.push_back(x.head<3>());
    }
    return samples;
}

void finish_plan(ManeuverPlan& plan, const ChiefOrbit& chief) {
    plan.total_impulse_Ns = 0.0;
    for (const Impulse& burn : plan.impulses)
        plan.total_impulse_Ns += plan.mass_kg * burn.magnitude_mps();
    plan.samples_m = sample_positions(plan.start, plan.impulses, chief, plan.window_start_s,
                                      plan.window_end_s, plan.sample_dt_s);
}

}  // namespace

ManeuverPlan plan_transfer(const TransferProblem& problem, const ChiefOrbit& chief,
                           double mass_kg) {
    if (!(problem.time_limit_s > 0.0))
        throw std::invalid_argument("plan_transfer: time limit must be positive");
    if (problem.n_impulse_epochs < 2)
        throw std::invalid_argument("plan_transfer: need at least 2 impulse epochs");

    const double t0 = problem.start.epoch_s;
    const double tf = t0 + problem.time_limit_s;
    const int m = problem.n_impulse_epochs;

    // Equality constraints: sum_i Phi(tf - t_i) B dv_i = goal - Phi(tf - t0) x0,
    // with dv_i = p_i - q_i and objective sum(p + q) (per-axis 1-norm).
    LpProblem lp;
    lp.a_eq.setZero(6, 6 * m);
    lp.b_eq = problem.goal.vec() - hcw_stm(chief, tf - t0) * problem.start.vec();
    lp.c = Eigen::VectorXd::Ones(6 * m);
    std::vector<double> epochs(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
        epochs[static_cast<std::size_t>(i)] = t0 + (tf - t0) * i / (m - 1);
        const Mat63 effect = hcw_stm(chief, tf - epochs[static_cast<std::size_t>(i)])
                                 .rightCols<3>();
        lp.a_eq.block<6, 3>(0, 6 * i) = effect;
        lp.a_eq.block<6, 3>(0, 6 * i + 3) = -effect;
    }

    const LpSolution sol = solve_lp(lp);
    if (sol.status == LpStatus::Infeasible)
        throw InfeasibleTransfer("plan_transfer: epoch grid cannot reach the goal state");
    if (sol.status != LpStatus::Optimal)
        throw SolverFailure("plan_transfer: LP did not converge (" + to_string(sol.status) +
                            " after " + std::to_string(sol.iterations) + " iterations)");

    ManeuverPlan plan;
    plan.mass_kg = mass_kg;
    plan.start = problem.start;
    plan.goal = problem.goal;
    plan.window_start_s = t0;
    plan.window_end_s = tf;
    plan.lp_objective_mps = sol.objective;
    plan.lp_dual_objective_mps = sol.dual_objective;
    for (int i = 0; i < m; ++i) {
        const Vec3 dv = sol.x.segment<3>(6 * i) - sol.x.segment<3>(6 * i + 3);
        if (dv.norm() > kNullBurnMps)
            plan.impulses.push_back({epochs[static_cast<std::size_t>(i)], dv});
    }
    finish_plan(plan, chief);

    const LvlhState terminal =
        propagate(problem.start, chief, problem.time_limit_s, plan.impulses);
    const double pos_err = (terminal.position_m - problem.goal.position_m).norm();
    const double vel_err = (terminal.velocity_mps - problem.goal.velocity_mps).norm();
    if (pos_err > kTerminalPosTolM || vel_err > kTerminalVelTolMps)
        throw SolverFailure("plan_transfer: terminal residual " + fmt(pos_err) + " m, " +
                            fmt(vel_err) + " m/s exceeds tolerance after " +
                            std::to_string(sol.iterations) + " iterations");
    return plan;
}

std::vector<int> assign_slots(std::span<const LvlhState> deployment_states,
                              std::span<const RelativeOrbitParams> slots, const ChiefOrbit& chief,
                              double mass_kg, double time_limit_s, int n_impulse_epochs) {
    if (deployment_states.size() != slots.size())
        throw SizeMismatch("assign_slots: " + std::to_string(deployment_states.size()) +
                           " states vs " + std::to_string(slots.size()) + " slots");
    const int n = static_cast<int>(slots.size());
    if (n == 0) return {};

    const double tf = deployment_states[0].epoch_s + time_limit_s;
    Eigen::MatrixXd cost(n, n);
    for (int j = 0; j < n; ++j) {
        const LvlhState goal = params_to_state(slots[static_cast<std::size_t>(j)], chief, tf);
        for (int i = 0; i < n; ++i) {
            TransferProblem prob{deployment_states[static_cast<std::size_t>(i)], goal,
                                 time_limit_s, n_impulse_epochs, 0.0};
            cost(i, j) = plan_transfer(prob, chief, mass_kg).total_impulse_Ns;
        }
    }
    return solve_assignment(cost);
}

namespace {

FleetPlan plan_fleet_transfers(const Fleet& fleet, std::span<const LvlhState> starts,
                               std::span<const RelativeOrbitParams> slots,
                               const ChiefOrbit& chief, const PlannerOptions& options) {
    const int n = static_cast<int>(starts.size());
    FleetPlan result;
    result.slot_assignment = assign_slots(starts, slots, chief,
                                          n > 0 ? fleet.deputies[0].mass_kg : 0.0,
                                          options.time_limit_s, options.n_impulse_epochs);

    const double tf = (n > 0 ? starts[0].epoch_s : options.departure_epoch_s) +
                      options.time_limit_s;
    for (int i = 0; i < n; ++i) {
        const NanoSat& sat = fleet.deputies[static_cast<std::size_t>(i)];
        const int slot = result.slot_assignment[static_cast<std::size_t>(i)];
        const LvlhState goal =
            params_to_state(slots[static_cast<std::size_t>(slot)], chief, tf);
        TransferProblem prob{starts[static_cast<std::size_t>(i)], goal, options.time_limit_s,
                             options.n_impulse_epochs, options.min_separation_m};
        ManeuverPlan plan = plan_transfer(prob, chief, sat.mass_kg);
        plan.satellite_id = sat.id;
        plan.sample_dt_s = options.sample_dt_s;
        finish_plan(plan, chief);
        result.plans.push_back(std::move(plan));
    }

    result.plans = deconflict(std::move(result.plans), options.min_separation_m, chief, options);

    double total = 0.0;
    double worst = 0.0;
    for (std::size_t i = 0; i < result.plans.size(); ++i) {
        const ManeuverPlan& plan = result.plans[i];
        total += plan.total_impulse_Ns;
        worst = std::max(worst, plan.total_impulse_Ns);
        const NanoSat& sat = fleet.deputies[i];
        if (sat.fuel_used_Ns + plan.total_impulse_Ns > sat.propulsion.total_impulse_Ns) {
            result.findings.push_back(
                {Severity::Error, "BudgetExceeded", "sat " + std::to_string(sat.id),
                 "maneuver needs " + fmt(plan.total_impulse_Ns) + " Ns but only " +
                     fmt(sat.propulsion.total_impulse_Ns - sat.fuel_used_Ns) +
                     " Ns of impulse remains"});
        }
    }
    result.fleet_total_Ns = total;
    result.mean_cost_Ns = n > 0 ? total / n : 0.0;
    result.max_cost_Ns = worst;
    return result;
}

}  // namespace

FleetPlan plan_formation_init(const Fleet& fleet, std::span<const LvlhState> deployment_states,
                              const ChiefOrbit& chief, const PlannerOptions& options) {
    if (deployment_states.size() != fleet.deputies.size())
        throw SizeMismatch("plan_formation_init: " + std::to_string(deployment_states.size()) +
                           " deployment states for " + std::to_string(fleet.deputies.size()) +
                           " deputies");
    const std::vector<RelativeOrbitParams> slots = wheel_slots(fleet);
    return plan_fleet_transfers(fleet, deployment_states, slots, chief, options);
}

FleetPlan plan_reconfiguration(const Fleet& fleet, const Vec3& new_plane, double new_radius_m,
                               const ChiefOrbit& chief, const PlannerOptions& options) {
    const int n = static_cast<int>(fleet.deputies.size());
    if (n == 0) throw EmptyFleet("plan_reconfiguration: fleet has no deputies");

    std::vector<LvlhState> starts;
    starts.reserve(static_cast<std::size_t>(n));
    for (const NanoSat& sat : fleet.deputies)
        starts.push_back(params_to_state(sat.rel_orbit, chief, options.departure_epoch_s));

    const double radius = new_radius_m > 0.0 ? new_radius_m : fleet.wheel_radius_m;
    const std::vector<RelativeOrbitParams> slots = wheel_slots(radius, new_plane, n, 0.0);
    return plan_fleet_transfers(fleet, starts, slots, chief, options);
}

namespace {

struct Violation {
    int idx_a = -1;
    int idx_b = -1;
    double closest_m = std::numeric_limits<double>::infinity();
};

Violation find_closest_violation(std::span<const ManeuverPlan> plans, double min_separation_m) {
    Violation v;
    for (std::size_t i = 0; i < plans.size(); ++i) {
        for (std::size_t j = i + 1; j < plans.size(); ++j) {
            const std::size_t n =
                std::min(plans[i].samples_m.size(), plans[j].samples_m.size());
            for (std::size_t k = 0; k < n; ++k) {
                const double d = (plans[i].samples_m[k] - plans[j].samples_m[k]).norm();
                if (d < min_separation_m && d < v.closest_m) {
                    v.closest_m = d;
                    v.idx_a = static_cast<int>(i);
                    v.idx_b = static_cast<int>(j);
                }
            }
        }
    }
    return v;
}

}  // namespace

double min_pairwise_separation_m(std::span<const ManeuverPlan> plans) {
    double closest = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < plans.size(); ++i)
        for (std::size_t j = i + 1; j < plans.size(); ++j) {
            const std::size_t n =
                std::min(plans[i].samples_m.size(), plans[j].samples_m.size());
            for (std::size_t k = 0; k < n; ++k)
                closest = std::min(closest,
                                   (plans[i].samples_m[k] - plans[j].samples_m[k]).norm());
        }
    return closest;
}

std::vector<ManeuverPlan> deconflict(std::vector<ManeuverPlan> plans, double min_separation_m,
                                     const ChiefOrbit& chief, const PlannerOptions& options) {
    if (plans.size() < 2) return plans;

    const double window_start = plans[0].window_start_s;
    const double window_end = plans[0].window_end_s;
    for (const ManeuverPlan& plan : plans) {
        if (std::abs(plan.window_start_s - window_start) > 1e-9 ||
            std::abs(plan.window_end_s - window_end) > 1e-9)
            throw std::invalid_argument("deconflict: plans must share a common time window");
    }
    const double stagger = (window_end - window_start) / 20.0;

    for (int attempt = 0; attempt < options.deconflict_max_attempts; ++attempt) {
        const Violation v = find_closest_violation(plans, min_separation_m);
        if (v.idx_a < 0) return plans;

        // Re-time the lower-priority member of the closest pair.
        const int loser_idx =
            plans[static_cast<std::size_t>(v.idx_a)].satellite_id <=
                    plans[static_cast<std::size_t>(v.idx_b)].satellite_id
                ? v.idx_b
                : v.idx_a;
        ManeuverPlan& loser = plans[static_cast<std::size_t>(loser_idx)];
        const double delay = loser.departure_delay_s + stagger;
        if (delay >= 0.9 * (window_end - window_start))
            throw DeconflictionFailure(
                "deconflict: satellite " + std::to_string(loser.satellite_id) +
                    " cannot be delayed further (closest approach " + fmt(v.closest_m) + " m)",
                plans[static_cast<std::size_t>(v.idx_a)].satellite_id,
                plans[static_cast<std::size_t>(v.idx_b)].satellite_id, v.closest_m);

        const LvlhState delayed_start = propagate(loser.start, chief, delay);
        TransferProblem prob{delayed_start, loser.goal, window_end - window_start - delay,
                             options.n_impulse_epochs, min_separation_m};
        ManeuverPlan replanned = plan_transfer(prob, chief, loser.mass_kg);
        replanned.satellite_id = loser.satellite_id;
        replanned.start = loser.start;
        replanned.window_start_s = window_start;
        replanned.window_end_s = window_end;
        replanned.departure_delay_s = delay;
        replanned.sample_dt_s = loser.sample_dt_s;
        finish_plan(replanned, chief);
        loser = std::move(replanned);
    }

    const Violation v = find_closest_violation(plans, min_separation_m);
    if (v.idx_a < 0) return plans;
    throw DeconflictionFailure(
        "deconflict: satellites " +
            std::to_string(plans[static_cast<std::size_t>(v.idx_a)].satellite_id) + " and " +
            std::to_string(plans[static_cast<std::size_t>(v.idx_b)].satellite_id) +
            " remain within " + fmt(v.closest_m) + " m after retiming attempts",
        plans[static_cast<std::size_t>(v.idx_a)].satellite_id,
        plans[static_cast<std::size_t>(v.idx_b)].satellite_id, v.closest_m);
}

std::string plans_to_csv(std::span<const ManeuverPlan> plans) {
    std::ostringstream out;
    out << "satellite_id,burn_epoch_s,dvx_mps,dvy_mps,dvz_mps,dv_mag_mps,cumulative_Ns\n";
    for (const ManeuverPlan& plan : plans) {
        double cumulative = 0.0;
        for (const Impulse& burn : plan.impulses) {
            cumulative += plan.mass_kg * burn.magnitude_mps();
            out << plan.satellite_id << ',' << fmt(burn.time_s) << ','
                << fmt(burn.delta_v_mps.x()) << ',' << fmt(burn.delta_v_mps.y()) << ','
                << fmt(burn.delta_v_mps.z()) << ',' << fmt(burn.magnitude_mps()) << ','
                << fmt(cumulative) << '\n';
        }
    }
    return out.str();
}

std::string plans_to_json_text(std::span<const ManeuverPlan> plans) {
    nlohmann::json root = nlohmann::json::array();
    for (const ManeuverPlan& plan : plans) {
        nlohmann::json pj;
        pj["satellite_id"] = plan.satellite_id;
        pj["mass_kg"] = plan.mass_kg;
        pj["total_impulse_Ns"] = plan.total_impulse_Ns;
        pj["lp_objective_mps"] = plan.lp_objective_mps;
        pj["window_s"] = {plan.window_start_s, plan.window_end_s};
        pj["departure_delay_s"] = plan.departure_delay_s;
        pj["impulses"] = nlohmann::json::array();
        for (const Impulse& burn : plan.impulses) {
            pj["impulses"].push_back({{"time_s", burn.time_s},
                                      {"delta_v_mps",
                                       {burn.delta_v_mps.x(), burn.delta_v_mps.y(),
                                        burn.delta_v_mps.z()}},
                                      {"magnitude_mps", burn.magnitude_mps()}});
        }
        root.push_back(pj);
    }
    return root.dump(2);
}

}  // namespace geoscan

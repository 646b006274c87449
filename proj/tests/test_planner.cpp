#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "geoscan/hungarian.hpp"
#include "geoscan/planner.hpp"
#include "geoscan/rng.hpp"
#include "support/oracles.hpp"

#include <algorithm>
#include <numeric>

using namespace geoscan;

namespace {
const ChiefOrbit kChief(6.778e6);

LvlhState random_state(Rng& rng, double pos_scale, double vel_scale, double epoch = 0.0) {
    LvlhState s;
    s.epoch_s = epoch;
    for (int i = 0; i < 3; ++i) {
        s.position_m(i) = rng.uniform(-pos_scale, pos_scale);
        s.velocity_mps(i) = rng.uniform(-vel_scale, vel_scale);
    }
    return s;
}

// Deployment draw with a spacing floor: a pre-existing proximity at the very
// first sample is not something departure re-timing can undo.
std::vector<LvlhState> spread_states(Rng& rng, int count, double half_side, double min_dist) {
    std::vector<LvlhState> states;
    while (static_cast<int>(states.size()) < count) {
        LvlhState s;
        for (int i = 0; i < 3; ++i) s.position_m(i) = rng.uniform(-half_side, half_side);
        bool ok = true;
        for (const LvlhState& other : states)
            if ((other.position_m - s.position_m).norm() < min_dist) ok = false;
        if (ok) states.push_back(s);
    }
    return states;
}

Fleet test_fleet(int n_deputies, double radius = 100.0) {
    Fleet fleet;
    fleet.id = 0;
    fleet.wheel_radius_m = radius;
    fleet.chief.id = 1000;
    fleet.chief.role = SatRole::Chief;
    const std::vector<RelativeOrbitParams> slots =
        wheel_slots(radius, Vec3::UnitX(), n_deputies, 0.0);
    for (int i = 0; i < n_deputies; ++i) {
        NanoSat sat;
        sat.id = i;
        sat.role = SatRole::Deputy;
        sat.propulsion = propulsion_by_name("VACCO_MIPS");
        sat.adcs = adcs_by_name("BCT_XACT100");
        sat.rel_orbit = slots[static_cast<std::size_t>(i)];
        fleet.deputies.push_back(sat);
    }
    return fleet;
}
}  // namespace

TEST_CASE("identity transfer costs nothing") {
    const LvlhState start = params_to_state(RelativeOrbitParams::pco(100.0, 0.0), kChief, 0.0);
    const LvlhState goal = params_to_state(RelativeOrbitParams::pco(100.0, 0.0), kChief, 900.0);
    const ManeuverPlan plan = plan_transfer({start, goal, 900.0, 20, 0.0}, kChief, 10.0);
    CHECK(plan.impulses.empty());
    CHECK(plan.total_impulse_Ns == 0.0);
}

TEST_CASE("plans hit the goal and account fuel as mass times burn magnitudes") {
    Rng rng(13);
    for (int trial = 0; trial < 20; ++trial) {
        const LvlhState start = random_state(rng, 50.0, 0.02);
        const LvlhState goal = LvlhState::from_vec(
            oracles::random_bounded_state(rng, kChief.mean_motion_rad_s(), 150.0), 900.0);
        const ManeuverPlan plan = plan_transfer({start, goal, 900.0, 20, 0.0}, kChief, 10.0);

        const LvlhState end = propagate(start, kChief, 900.0,
                                        {plan.impulses.data(), plan.impulses.size()});
        CHECK((end.position_m - goal.position_m).norm() < 0.1);
        CHECK((end.velocity_mps - goal.velocity_mps).norm() < 1e-4);

        double sum = 0.0;
        for (const Impulse& burn : plan.impulses) sum += 10.0 * burn.magnitude_mps();
        CHECK(plan.total_impulse_Ns == doctest::Approx(sum).epsilon(1e-9));

        // strong duality certificate
        const double scale = std::max(plan.lp_objective_mps, 1e-12);
        CHECK(std::abs(plan.lp_objective_mps - plan.lp_dual_objective_mps) / scale < 1e-6);
    }
}

TEST_CASE("two-epoch plans match the closed-form boundary-value solution") {
    Rng rng(21);
    const double n = kChief.mean_motion_rad_s();
    int compared = 0;
    for (int trial = 0; trial < 50; ++trial) {
        const LvlhState start = random_state(rng, 100.0, 0.05);
        const LvlhState goal = random_state(rng, 200.0, 0.05);
        const double tof = rng.uniform(0.1, 0.45) * kChief.period_s();

        const ManeuverPlan plan =
            plan_transfer({start, goal, tof, 2, 0.0}, kChief, 10.0);
        const oracles::TwoImpulse want =
            oracles::two_impulse_transfer(n, start.vec(), goal.vec(), tof);

        Vec3 got0 = Vec3::Zero();
        Vec3 got1 = Vec3::Zero();
        for (const Impulse& burn : plan.impulses) {
            if (std::abs(burn.time_s - start.epoch_s) < 1e-9) got0 = burn.delta_v_mps;
            else got1 = burn.delta_v_mps;
        }
        const double scale =
            std::max(1e-9, std::max(want.dv0.norm(), want.dv1.norm()));
        CHECK((got0 - want.dv0).norm() / scale < 1e-6);
        CHECK((got1 - want.dv1).norm() / scale < 1e-6);
        ++compared;
    }
    CHECK(compared == 50);
}

TEST_CASE("grid refinement never increases the optimal cost") {
    Rng rng(33);
    for (int trial = 0; trial < 10; ++trial) {
        const LvlhState start = random_state(rng, 50.0, 0.02);
        const LvlhState goal = LvlhState::from_vec(
            oracles::random_bounded_state(rng, kChief.mean_motion_rad_s(), 100.0), 900.0);
        double previous = std::numeric_limits<double>::infinity();
        // Nested grids: epochs of an m-point even grid are a subset of the
        // (2m-1)-point one.
        for (int m : {2, 3, 5, 9, 17}) {
            const ManeuverPlan plan = plan_transfer({start, goal, 900.0, m, 0.0}, kChief, 10.0);
            CHECK(plan.lp_objective_mps <= previous + 1e-9);
            previous = plan.lp_objective_mps;
        }
    }
}

TEST_CASE("slot assignment matches brute force for small fleets") {
    Rng rng(61);
    for (int trial = 0; trial < 6; ++trial) {
        const int n = 2 + static_cast<int>(rng.uniform_u64(5));  // up to 6
        std::vector<LvlhState> states;
        for (int i = 0; i < n; ++i) states.push_back(random_state(rng, 30.0, 0.0));
        const std::vector<RelativeOrbitParams> slots =
            wheel_slots(100.0, Vec3::UnitX(), n, 0.0);

        const std::vector<int> got =
            assign_slots(states, slots, kChief, 10.0, 900.0, 8);

        // Brute force over all permutations on the same cost matrix.
        Eigen::MatrixXd cost(n, n);
        for (int j = 0; j < n; ++j) {
            const LvlhState goal = params_to_state(slots[static_cast<std::size_t>(j)], kChief,
                                                   states[0].epoch_s + 900.0);
            for (int i = 0; i < n; ++i)
                cost(i, j) = plan_transfer({states[static_cast<std::size_t>(i)], goal, 900.0, 8,
                                            0.0},
                                           kChief, 10.0)
                                 .total_impulse_Ns;
        }
        std::vector<int> perm(static_cast<std::size_t>(n));
        std::iota(perm.begin(), perm.end(), 0);
        double best = std::numeric_limits<double>::infinity();
        do {
            best = std::min(best, assignment_cost(cost, perm));
        } while (std::next_permutation(perm.begin(), perm.end()));

        CHECK(assignment_cost(cost, got) == doctest::Approx(best).epsilon(1e-9));
    }
}

TEST_CASE("assignment size mismatch is rejected") {
    std::vector<LvlhState> states(3);
    const std::vector<RelativeOrbitParams> slots = wheel_slots(100.0, Vec3::UnitX(), 4, 0.0);
    CHECK_THROWS_AS(assign_slots(states, slots, kChief, 10.0, 900.0), SizeMismatch);
}

TEST_CASE("formation init on states already in slots costs nothing") {
    const Fleet fleet = test_fleet(4);
    std::vector<LvlhState> deployment;
    for (const NanoSat& sat : fleet.deputies)
        deployment.push_back(params_to_state(sat.rel_orbit, kChief, 0.0));
    PlannerOptions opts;
    const FleetPlan plan = plan_formation_init(fleet, deployment, kChief, opts);
    CHECK(plan.fleet_total_Ns == doctest::Approx(0.0).epsilon(1e-12));
    for (std::size_t i = 0; i < plan.plans.size(); ++i)
        CHECK(plan.slot_assignment[i] == static_cast<int>(i));
}

TEST_CASE("fleet total cost is invariant under deputy input order") {
    Rng rng(77);
    const Fleet fleet = test_fleet(6);
    const std::vector<LvlhState> deployment = spread_states(rng, 6, 25.0, 12.0);

    PlannerOptions opts;
    opts.n_impulse_epochs = 8;
    const FleetPlan forward = plan_formation_init(fleet, deployment, kChief, opts);

    std::vector<LvlhState> reversed(deployment.rbegin(), deployment.rend());
    const FleetPlan backward = plan_formation_init(fleet, reversed, kChief, opts);
    CHECK(forward.fleet_total_Ns ==
          doctest::Approx(backward.fleet_total_Ns).epsilon(1e-9));
}

TEST_CASE("plans re-propagated through the dynamics reach their slots") {
    Rng rng(85);
    const Fleet fleet = test_fleet(5);
    const std::vector<LvlhState> deployment = spread_states(rng, 5, 25.0, 12.0);
    PlannerOptions opts;
    const FleetPlan plan = plan_formation_init(fleet, deployment, kChief, opts);
    const std::vector<RelativeOrbitParams> slots = wheel_slots(fleet);
    for (std::size_t i = 0; i < plan.plans.size(); ++i) {
        const ManeuverPlan& mp = plan.plans[i];
        const LvlhState end =
            propagate(mp.start, kChief, mp.window_end_s - mp.window_start_s,
                      {mp.impulses.data(), mp.impulses.size()});
        const LvlhState want = params_to_state(
            slots[static_cast<std::size_t>(plan.slot_assignment[i])], kChief, mp.window_end_s);
        CHECK((end.position_m - want.position_m).norm() < 0.1);
        CHECK((end.velocity_mps - want.velocity_mps).norm() < 1e-4);
    }
}

TEST_CASE("reconfiguration to the same wheel is free, and budgets are debited") {
    Fleet fleet = test_fleet(4);
    PlannerOptions opts;
    const FleetPlan same = plan_reconfiguration(fleet, Vec3::UnitX(), 0.0, kChief, opts);
    CHECK(same.fleet_total_Ns == doctest::Approx(0.0).epsilon(1e-12));

    // Drain a deputy's tank; a plane change must now flag it.
    fleet.deputies[2].fuel_used_Ns = fleet.deputies[2].propulsion.total_impulse_Ns - 1e-6;
    const FleetPlan rotated =
        plan_reconfiguration(fleet, Vec3(0.0, 1.0, 0.0), 0.0, kChief, opts);
    bool flagged = false;
    for (const Finding& f : rotated.findings)
        if (f.code == "BudgetExceeded" && f.subject == "sat 2") flagged = true;
    CHECK(flagged);
    CHECK(rotated.fleet_total_Ns > 0.0);
}

TEST_CASE("deconfliction") {
    SUBCASE("single plan is returned unchanged") {
        const LvlhState start = params_to_state(RelativeOrbitParams::pco(100.0, 0.0), kChief,
                                                0.0);
        const LvlhState goal =
            params_to_state(RelativeOrbitParams::pco(200.0, 0.0), kChief, 900.0);
        ManeuverPlan plan = plan_transfer({start, goal, 900.0, 10, 0.0}, kChief, 10.0);
        plan.satellite_id = 0;
        const auto out = deconflict({plan}, 10.0, kChief);
        CHECK(out.size() == 1);
        CHECK(out[0].departure_delay_s == 0.0);
    }

    SUBCASE("mid-course crossing is separated by re-timing the lower priority") {
        // One satellite rides the wheel; the other cuts across to a nearby
        // slot and pinches within the keep-out shell en route.
        const LvlhState b0 =
            params_to_state(RelativeOrbitParams::pco(100.0, 1.2), kChief, 0.0);
        const LvlhState b1 =
            params_to_state(RelativeOrbitParams::pco(100.0, 1.2), kChief, 900.0);
        const LvlhState a0 =
            params_to_state(RelativeOrbitParams::pco(100.0, 0.0), kChief, 0.0);
        const LvlhState a1 =
            params_to_state(RelativeOrbitParams::pco(100.0, 1.6), kChief, 900.0);

        ManeuverPlan rider = plan_transfer({b0, b1, 900.0, 20, 26.0}, kChief, 10.0);
        rider.satellite_id = 0;
        ManeuverPlan cutter = plan_transfer({a0, a1, 900.0, 20, 26.0}, kChief, 10.0);
        cutter.satellite_id = 1;
        REQUIRE(min_pairwise_separation_m(std::vector<ManeuverPlan>{rider, cutter}) < 26.0);

        const auto out = deconflict({rider, cutter}, 26.0, kChief);
        CHECK(min_pairwise_separation_m(out) >= 26.0);
        // the lower-priority satellite (higher id) was the one re-timed
        CHECK(out[0].departure_delay_s == 0.0);
        CHECK(out[1].departure_delay_s > 0.0);
    }

    SUBCASE("an unresolvable corridor reports the pair and closest approach") {
        // Mirror cross-track corridors share the z axis for every retiming, so
        // the crossing cannot be removed; the failure must carry diagnostics.
        LvlhState a0;
        a0.position_m = Vec3(0.0, 0.0, 100.0);
        LvlhState b0;
        b0.position_m = Vec3(0.0, 0.0, -100.0);
        LvlhState a1 = b0;
        a1.epoch_s = 900.0;
        LvlhState b1 = a0;
        b1.epoch_s = 900.0;

        ManeuverPlan pa = plan_transfer({a0, a1, 900.0, 20, 10.0}, kChief, 10.0);
        pa.satellite_id = 0;
        ManeuverPlan pb = plan_transfer({b0, b1, 900.0, 20, 10.0}, kChief, 10.0);
        pb.satellite_id = 1;
        REQUIRE(min_pairwise_separation_m(std::vector<ManeuverPlan>{pa, pb}) < 10.0);

        try {
            deconflict({pa, pb}, 10.0, kChief);
            FAIL("expected DeconflictionFailure");
        } catch (const DeconflictionFailure& e) {
            CHECK(e.sat_a == 0);
            CHECK(e.sat_b == 1);
            CHECK(e.closest_approach_m < 10.0);
        }
    }

    SUBCASE("disjoint corridors pass through untouched") {
        LvlhState a0;
        a0.position_m = Vec3(0.0, 500.0, 0.0);
        LvlhState b0;
        b0.position_m = Vec3(0.0, -500.0, 0.0);
        LvlhState a1 = a0;
        a1.position_m.y() += 100.0;
        a1.epoch_s = 900.0;
        LvlhState b1 = b0;
        b1.position_m.y() -= 100.0;
        b1.epoch_s = 900.0;

        ManeuverPlan pa = plan_transfer({a0, a1, 900.0, 20, 10.0}, kChief, 10.0);
        pa.satellite_id = 0;
        ManeuverPlan pb = plan_transfer({b0, b1, 900.0, 20, 10.0}, kChief, 10.0);
        pb.satellite_id = 1;
        REQUIRE(min_pairwise_separation_m(std::vector<ManeuverPlan>{pa, pb}) >= 100.0);

        const auto out = deconflict({pa, pb}, 10.0, kChief);
        CHECK(out[0].departure_delay_s == 0.0);
        CHECK(out[1].departure_delay_s == 0.0);
        CHECK(out[0].impulses.size() == pa.impulses.size());
    }
}

TEST_CASE("plan exports") {
    Rng rng(91);
    const LvlhState start = random_state(rng, 40.0, 0.0);
    const LvlhState goal = LvlhState::from_vec(
        oracles::random_bounded_state(rng, kChief.mean_motion_rad_s(), 100.0), 900.0);
    ManeuverPlan plan = plan_transfer({start, goal, 900.0, 6, 0.0}, kChief, 10.0);
    plan.satellite_id = 7;
    const std::vector<ManeuverPlan> plans{plan};

    const std::string csv = plans_to_csv(plans);
    CHECK(csv.rfind("satellite_id,burn_epoch_s,dvx_mps,dvy_mps,dvz_mps,dv_mag_mps,"
                    "cumulative_Ns\n",
                    0) == 0);
    CHECK(csv.find("\n7,") != std::string::npos);

    const std::string json_text = plans_to_json_text(plans);
    CHECK(json_text.find("\"satellite_id\": 7") != std::string::npos);
    CHECK(json_text.find("\"total_impulse_Ns\"") != std::string::npos);
}

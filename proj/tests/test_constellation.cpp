#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "geoscan/constellation.hpp"
#include "geoscan/planner.hpp"
#include "geoscan/rng.hpp"

#include <algorithm>
#include <set>

using namespace geoscan;

namespace {
const ChiefOrbit kChief(6.778e6);

ScenarioConfig canonical() { return ScenarioConfig{}; }

int count_errors(const std::vector<Finding>& findings) {
    int n = 0;
    for (const Finding& f : findings)
        if (f.severity == Severity::Error) ++n;
    return n;
}
}  // namespace

TEST_CASE("sensor catalogue") {
    CHECK(sensor_info(SensorKind::SwirNarrow).channels_nm ==
          std::vector<double>{1240.0, 1640.0, 2130.0});
    CHECK(sensor_info(SensorKind::SwirWide).swath == Swath::Wide);
    CHECK(sensor_info(SensorKind::Tir).category == SensorCategory::Desirable);
    CHECK(core_required_sensors().size() == 4);
    CHECK(sensor_kind_from_name("rgb_narrow") == SensorKind::RgbNarrow);
    CHECK_THROWS_AS(sensor_kind_from_name("bogus"), std::invalid_argument);
}

TEST_CASE("component presets carry the data-sheet numbers") {
    CHECK(propulsion_by_name("VACCO_MIPS").total_impulse_Ns == 250.0);
    CHECK(propulsion_by_name("AEROJET_MPS120").total_impulse_Ns == 800.0);
    const AdcsSpec adcs = adcs_by_name("BCT_XACT100");
    CHECK(adcs.pointing_accuracy_deg == 0.003);
    CHECK(adcs.momentum_capacity_mNms == 100.0);
}

TEST_CASE("build_constellation produces the configured layout") {
    const Constellation cons = build_constellation(canonical());
    REQUIRE(cons.tracks.size() == 1);
    REQUIRE(cons.tracks[0].fleets.size() == 10);
    CHECK(cons.satellite_count() == 110);

    std::set<int> ids;
    for (const StringOfPearls& track : cons.tracks) {
        for (const Fleet& fleet : track.fleets) {
            ids.insert(fleet.chief.id);
            CHECK(!fleet.chief.sensor.has_value());
            CHECK(fleet.deputies.size() == 10);
            for (const NanoSat& sat : fleet.deputies) ids.insert(sat.id);
        }
    }
    CHECK(ids.size() == 110);

    // identical configs build identical constellations
    CHECK(constellation_to_json(cons) == constellation_to_json(build_constellation(canonical())));
}

TEST_CASE("degenerate layouts build but warn") {
    ScenarioConfig cfg = canonical();
    cfg.tracks[0].num_fleets = 0;
    const Constellation cons = build_constellation(cfg);
    CHECK(cons.satellite_count() == 0);
    const std::vector<Finding> findings = validate(cons);
    CHECK(count_errors(findings) == 0);
    CHECK(!findings.empty());
}

TEST_CASE("four deputies are phased a quarter turn apart") {
    ScenarioConfig cfg = canonical();
    cfg.deputies_per_fleet = 4;
    const Constellation cons = build_constellation(cfg);
    const Fleet& fleet = cons.tracks[0].fleets[0];
    for (int i = 0; i < 4; ++i) {
        CHECK(fleet.deputies[static_cast<std::size_t>(i)].rel_orbit.alpha_x_rad ==
              doctest::Approx(i * M_PI_2).epsilon(1e-12));
    }
}

TEST_CASE("validation findings") {
    SUBCASE("a conforming constellation has zero error findings") {
        const Constellation cons = build_constellation(canonical());
        CHECK(count_errors(validate(cons)) == 0);
    }
    SUBCASE("missing required sensor is an error naming the fleet") {
        Constellation cons = build_constellation(canonical());
        for (NanoSat& sat : cons.tracks[0].fleets[2].deputies) {
            if (sat.sensor == SensorKind::SwirNarrow) sat.sensor = SensorKind::Tir;
        }
        const std::vector<Finding> findings = validate(cons);
        bool found = false;
        for (const Finding& f : findings) {
            if (f.code == "missing_required_sensor" && f.severity == Severity::Error &&
                f.subject == "fleet 2" && f.message.find("swir_narrow") != std::string::npos)
                found = true;
        }
        CHECK(found);
    }
    SUBCASE("chief with a payload is an error") {
        Constellation cons = build_constellation(canonical());
        cons.tracks[0].fleets[0].chief.sensor = SensorKind::RgbNarrow;
        bool found = false;
        for (const Finding& f : validate(cons))
            if (f.code == "chief_payload" && f.severity == Severity::Error) found = true;
        CHECK(found);
    }
    SUBCASE("narrow pearl spacing is a warning") {
        Constellation cons = build_constellation(canonical());
        cons.tracks[0].separations_m[0] = 50e3;
        bool found = false;
        for (const Finding& f : validate(cons))
            if (f.code == "pearl_spacing" && f.severity == Severity::Warning) found = true;
        CHECK(found);
    }
    SUBCASE("sloppy pointing against a fine ground pixel is an error") {
        const Constellation cons = build_constellation(canonical());
        // 0.003 deg at 400 km nadir is about 21 m: fine for 50 m pixels,
        // too coarse for 10 m ones.
        CHECK(count_errors(validate(cons, 50.0)) == 0);
        CHECK(count_errors(validate(cons, 10.0)) > 0);
    }
}

TEST_CASE("nadir revisit delay") {
    const double n = kChief.mean_motion_rad_s();
    const double want_100km = 1.0e5 / (n * kChief.earth_radius_m);
    CHECK(nadir_revisit_delay_s(100e3, kChief) == doctest::Approx(want_100km).epsilon(1e-12));
    CHECK(nadir_revisit_delay_s(100e3, kChief) == doctest::Approx(13.9).epsilon(0.01));
    CHECK(nadir_revisit_delay_s(300e3, kChief) == doctest::Approx(41.6).epsilon(0.01));
    // linearity
    CHECK(nadir_revisit_delay_s(200e3, kChief) ==
          doctest::Approx(2.0 * nadir_revisit_delay_s(100e3, kChief)).epsilon(1e-12));
    CHECK_THROWS_AS(nadir_revisit_delay_s(0.0, kChief), std::invalid_argument);
}

TEST_CASE("wheel slots") {
    SUBCASE("single deputy sits at phase zero") {
        const std::vector<RelativeOrbitParams> slots = wheel_slots(100.0, Vec3::UnitX(), 1);
        REQUIRE(slots.size() == 1);
        CHECK(slots[0].alpha_x_rad == 0.0);
        CHECK(slots[0].rho_y_m == 100.0);
        CHECK(slots[0].rho_x_m == 50.0);
    }
    SUBCASE("ten deputies are evenly phased") {
        const std::vector<RelativeOrbitParams> slots = wheel_slots(100.0, Vec3::UnitX(), 10);
        for (int k = 0; k < 10; ++k)
            CHECK(slots[static_cast<std::size_t>(k)].alpha_x_rad ==
                  doctest::Approx(k * 2.0 * M_PI / 10.0).epsilon(1e-12));
    }
    SUBCASE("empty fleet is rejected") {
        CHECK_THROWS_AS(wheel_slots(100.0, Vec3::UnitX(), 0), EmptyFleet);
        Fleet fleet;
        CHECK_THROWS_AS(wheel_slots(fleet), EmptyFleet);
    }
    SUBCASE("slots are closed orbits: one period returns to the start") {
        for (const Vec3& plane : {Vec3(1.0, 0.0, 0.0), Vec3(0.0, 1.0, 0.0)}) {
            const std::vector<RelativeOrbitParams> slots = wheel_slots(250.0, plane, 6);
            for (const RelativeOrbitParams& slot : slots) {
                const LvlhState s0 = params_to_state(slot, kChief, 0.0);
                const LvlhState s1 = propagate(s0, kChief, kChief.period_s());
                CHECK((s1.position_m - s0.position_m).norm() < 1e-6);
            }
        }
    }
    SUBCASE("the slot set is invariant under deputy reordering") {
        // Slots depend only on count and geometry, so the geometric set is
        // permutation-invariant by construction; check the phase multiset.
        const std::vector<RelativeOrbitParams> a = wheel_slots(100.0, Vec3::UnitX(), 5);
        std::vector<double> phases;
        for (const RelativeOrbitParams& p : a) phases.push_back(p.alpha_x_rad);
        std::sort(phases.begin(), phases.end());
        for (int k = 0; k < 5; ++k)
            CHECK(phases[static_cast<std::size_t>(k)] ==
                  doctest::Approx(k * 2.0 * M_PI / 5.0).epsilon(1e-12));
    }
    SUBCASE("perpendicular wheel projects to a circle along the track axis") {
        const std::vector<RelativeOrbitParams> slots = wheel_slots(100.0, Vec3(0, 1, 0), 8);
        for (const RelativeOrbitParams& slot : slots) {
            for (double t : {0.0, 500.0, 1500.0, 3000.0}) {
                const LvlhState s = params_to_state(slot, kChief, t);
                const double r = std::hypot(s.position_m.x(), s.position_m.z());
                CHECK(r == doctest::Approx(100.0).epsilon(1e-9));
            }
        }
    }
    SUBCASE("unsupported planes are rejected") {
        CHECK_THROWS_AS(wheel_slots(100.0, Vec3(0.0, 0.0, 1.0), 4), std::invalid_argument);
        CHECK_THROWS_AS(wheel_slots(100.0, Vec3(0.5, 0.5, 0.7), 4), std::invalid_argument);
    }
}

TEST_CASE("serialization round trip is the identity") {
    const Constellation cons = build_constellation(canonical());
    const std::string text = constellation_to_json(cons);
    const Constellation back = constellation_from_json(text);
    CHECK(constellation_to_json(back) == text);
}

TEST_CASE("config schema errors carry the field path") {
    CHECK_THROWS_WITH_AS(parse_scenario("{\"constellation\": {\"wheel_radius_m\": 5}}"),
                         doctest::Contains("constellation.wheel_radius_m"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_scenario("not json"), doctest::Contains("invalid JSON"),
                         ConfigError);
    CHECK_THROWS_WITH_AS(parse_scenario("{\"planner\": {\"impulse_epochs\": 1}}"),
                         doctest::Contains("planner.impulse_epochs"), ConfigError);
    CHECK_THROWS_WITH_AS(
        parse_scenario("{\"scheduler\": {\"targets\": [{\"window_s\": [5, 5]}]}}"),
        doctest::Contains("targets[0].window_s"), ConfigError);
}

TEST_CASE("config hash is stable and sensitive") {
    const ScenarioConfig a = canonical();
    ScenarioConfig b = canonical();
    CHECK(config_hash(a) == config_hash(b));
    b.seed = 43;
    CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("deployment draw is reproducible and inside the cube") {
    const ScenarioConfig cfg = canonical();
    const std::vector<LvlhState> a = draw_deployment_states(cfg, 10);
    const std::vector<LvlhState> b = draw_deployment_states(cfg, 10);
    REQUIRE(a.size() == 10);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK((a[i].position_m - b[i].position_m).norm() == 0.0);
        CHECK(a[i].velocity_mps.norm() == 0.0);
        CHECK(a[i].position_m.cwiseAbs().maxCoeff() <= 25.0);
    }
    // The canonical seed-42 draw keeps everyone clear of the 10 m floor.
    double dmin = 1e18;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = i + 1; j < a.size(); ++j)
            dmin = std::min(dmin, (a[i].position_m - a[j].position_m).norm());
    CHECK(dmin > 10.0);
}

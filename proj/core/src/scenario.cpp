#include "geoscan/scenario.hpp"

#include "geoscan/rng.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <sstream>

namespace geoscan {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& why) {
    throw ConfigError(path + ": " + why);
}

double get_number(const json& j, const std::string& path, const std::string& key, double fallback,
                  bool required = false) {
    if (!j.contains(key)) {
        if (required) fail(path + "." + key, "missing required field");
        return fallback;
    }
    if (!j[key].is_number()) fail(path + "." + key, "expected a number");
    return j[key].get<double>();
}

int get_int(const json& j, const std::string& path, const std::string& key, int fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number_integer()) fail(path + "." + key, "expected an integer");
    return j[key].get<int>();
}

std::string get_string(const json& j, const std::string& path, const std::string& key,
                       const std::string& fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_string()) fail(path + "." + key, "expected a string");
    return j[key].get<std::string>();
}

void check_positive(double v, const std::string& path) {
    if (!(v > 0.0)) fail(path, "must be positive");
}

}  // namespace

std::vector<double> ScenarioConfig::rho_grid() const {
    if (!drift_rho_grid_m.empty()) return drift_rho_grid_m;
    std::vector<double> g;
    for (int r = 100; r <= 1000; r += 100) g.push_back(static_cast<double>(r));
    return g;
}

std::vector<double> ScenarioConfig::alpha_grid_deg() const {
    if (!drift_alpha_grid_deg.empty()) return drift_alpha_grid_deg;
    std::vector<double> g;
    for (int d = 0; d < 360; d += 30) g.push_back(static_cast<double>(d));
    return g;
}

ScenarioConfig parse_scenario(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    if (!root.is_object()) throw ConfigError("config: top level must be an object");

    ScenarioConfig c;
    c.schema_version = get_int(root, "config", "schema_version", 1);
    if (c.schema_version != 1) fail("config.schema_version", "unsupported schema version");
    if (root.contains("seed")) {
        if (!root["seed"].is_number_unsigned() && !root["seed"].is_number_integer())
            fail("config.seed", "expected an unsigned integer");
        c.seed = root["seed"].get<std::uint64_t>();
    }

    if (root.contains("chief_orbit")) {
        const json& co = root["chief_orbit"];
        if (!co.is_object()) fail("config.chief_orbit", "expected an object");
        c.altitude_km = get_number(co, "config.chief_orbit", "altitude_km", c.altitude_km);
        check_positive(c.altitude_km, "config.chief_orbit.altitude_km");
        if (co.contains("semi_major_axis_m")) {
            c.semi_major_axis_m =
                get_number(co, "config.chief_orbit", "semi_major_axis_m", 0.0, true);
            if (*c.semi_major_axis_m <= kEarthRadiusM)
                fail("config.chief_orbit.semi_major_axis_m", "must exceed Earth radius");
        }
    }

    if (root.contains("constellation")) {
        const json& k = root["constellation"];
        const std::string p = "config.constellation";
        if (!k.is_object()) fail(p, "expected an object");
        c.wheel_radius_m = get_number(k, p, "wheel_radius_m", c.wheel_radius_m);
        if (c.wheel_radius_m < 100.0 || c.wheel_radius_m > 1000.0)
            fail(p + ".wheel_radius_m", "must lie in [100, 1000] m");
        c.deputies_per_fleet = get_int(k, p, "deputies_per_fleet", c.deputies_per_fleet);
        if (c.deputies_per_fleet < 0) fail(p + ".deputies_per_fleet", "must be nonnegative");
        c.propulsion = get_string(k, p, "propulsion", c.propulsion);
        if (c.propulsion != "VACCO_MIPS" && c.propulsion != "AEROJET_MPS120")
            fail(p + ".propulsion", "unknown propulsion option '" + c.propulsion + "'");
        c.adcs = get_string(k, p, "adcs", c.adcs);
        if (c.adcs != "BCT_XACT100") fail(p + ".adcs", "unknown adcs option '" + c.adcs + "'");
        c.mass_kg = get_number(k, p, "mass_kg", c.mass_kg);
        check_positive(c.mass_kg, p + ".mass_kg");
        c.max_slew_rate_deg_s = get_number(k, p, "max_slew_rate_deg_s", c.max_slew_rate_deg_s);
        check_positive(c.max_slew_rate_deg_s, p + ".max_slew_rate_deg_s");
        if (k.contains("tracks")) {
            if (!k["tracks"].is_array()) fail(p + ".tracks", "expected an array");
            c.tracks.clear();
            int ti = 0;
            for (const json& tj : k["tracks"]) {
                const std::string tp = p + ".tracks[" + std::to_string(ti) + "]";
                if (!tj.is_object()) fail(tp, "expected an object");
                TrackConfig tc;
                tc.num_fleets = get_int(tj, tp, "num_fleets", tc.num_fleets);
                if (tc.num_fleets < 0) fail(tp + ".num_fleets", "must be nonnegative");
                tc.separation_km = get_number(tj, tp, "separation_km", tc.separation_km);
                check_positive(tc.separation_km, tp + ".separation_km");
                if (tj.contains("separations_km")) {
                    if (!tj["separations_km"].is_array())
                        fail(tp + ".separations_km", "expected an array");
                    for (const json& s : tj["separations_km"]) {
                        if (!s.is_number()) fail(tp + ".separations_km", "expected numbers");
                        tc.separations_km.push_back(s.get<double>());
                        check_positive(tc.separations_km.back(), tp + ".separations_km");
                    }
                    if (static_cast<int>(tc.separations_km.size()) !=
                        std::max(0, tc.num_fleets - 1))
                        fail(tp + ".separations_km", "expected num_fleets-1 entries");
                }
                c.tracks.push_back(std::move(tc));
                ++ti;
            }
        }
    }

    if (root.contains("deployment")) {
        const json& d = root["deployment"];
        if (!d.is_object()) fail("config.deployment", "expected an object");
        c.deployment_cube_side_m =
            get_number(d, "config.deployment", "cube_side_m", c.deployment_cube_side_m);
        check_positive(c.deployment_cube_side_m, "config.deployment.cube_side_m");
    }

    if (root.contains("planner")) {
        const json& pl = root["planner"];
        const std::string p = "config.planner";
        if (!pl.is_object()) fail(p, "expected an object");
        c.transfer_time_limit_s =
            get_number(pl, p, "transfer_time_limit_s", c.transfer_time_limit_s);
        check_positive(c.transfer_time_limit_s, p + ".transfer_time_limit_s");
        c.impulse_epochs = get_int(pl, p, "impulse_epochs", c.impulse_epochs);
        if (c.impulse_epochs < 2) fail(p + ".impulse_epochs", "must be at least 2");
        c.min_separation_m = get_number(pl, p, "min_separation_m", c.min_separation_m);
        check_positive(c.min_separation_m, p + ".min_separation_m");
    }

    if (root.contains("upkeep")) {
        const json& u = root["upkeep"];
        const std::string p = "config.upkeep";
        if (!u.is_object()) fail(p, "expected an object");
        c.upkeep_scheme = get_string(u, p, "scheme", c.upkeep_scheme);
        if (c.upkeep_scheme != "cancel_and_restore" && c.upkeep_scheme != "rate_null")
            fail(p + ".scheme", "unknown scheme '" + c.upkeep_scheme + "'");
        c.corrections_per_orbit = get_int(u, p, "corrections_per_orbit", c.corrections_per_orbit);
        if (c.corrections_per_orbit < 1) fail(p + ".corrections_per_orbit", "must be >= 1");
        c.drift_length_scale = get_string(u, p, "length_scale", c.drift_length_scale);
        if (c.drift_length_scale != "semi_major_axis" && c.drift_length_scale != "altitude")
            fail(p + ".length_scale", "must be semi_major_axis or altitude");
        c.upkeep_alpha_x_deg = get_number(u, p, "alpha_x_deg", c.upkeep_alpha_x_deg);
    }

    if (root.contains("scheduler")) {
        const json& s = root["scheduler"];
        const std::string p = "config.scheduler";
        if (!s.is_object()) fail(p, "expected an object");
        c.slot_duration_s = get_number(s, p, "slot_duration_s", c.slot_duration_s);
        check_positive(c.slot_duration_s, p + ".slot_duration_s");
        c.horizon_slots = get_int(s, p, "horizon_slots", c.horizon_slots);
        if (c.horizon_slots < 0) fail(p + ".horizon_slots", "must be nonnegative");
        c.max_off_nadir_deg = get_number(s, p, "max_off_nadir_deg", c.max_off_nadir_deg);
        check_positive(c.max_off_nadir_deg, p + ".max_off_nadir_deg");
        c.momentum_per_slew_mNms_per_deg = get_number(s, p, "momentum_per_slew_mNms_per_deg",
                                                      c.momentum_per_slew_mNms_per_deg);
        check_positive(c.momentum_per_slew_mNms_per_deg, p + ".momentum_per_slew_mNms_per_deg");
        c.desat_threshold_fraction =
            get_number(s, p, "desat_threshold_fraction", c.desat_threshold_fraction);
        if (c.desat_threshold_fraction <= 0.0 || c.desat_threshold_fraction > 1.0)
            fail(p + ".desat_threshold_fraction", "must lie in (0, 1]");
        c.desat_impulse_Ns = get_number(s, p, "desat_impulse_Ns", c.desat_impulse_Ns);
        if (c.desat_impulse_Ns < 0.0) fail(p + ".desat_impulse_Ns", "must be nonnegative");
        c.exact_cap_vars = get_int(s, p, "exact_cap_vars", c.exact_cap_vars);
        if (c.exact_cap_vars < 1) fail(p + ".exact_cap_vars", "must be positive");
        if (s.contains("targets")) {
            if (!s["targets"].is_array()) fail(p + ".targets", "expected an array");
            int ti = 0;
            for (const json& tj : s["targets"]) {
                const std::string tp = p + ".targets[" + std::to_string(ti) + "]";
                if (!tj.is_object()) fail(tp, "expected an object");
                TargetConfig t;
                t.id = get_int(tj, tp, "id", ti);
                t.along_track_km = get_number(tj, tp, "along_track_km", 0.0);
                t.cross_track_km = get_number(tj, tp, "cross_track_km", 0.0);
                if (tj.contains("window_s")) {
                    const json& w = tj["window_s"];
                    if (!w.is_array() || w.size() != 2 || !w[0].is_number() || !w[1].is_number())
                        fail(tp + ".window_s", "expected [start_s, end_s]");
                    t.window_start_s = w[0].get<double>();
                    t.window_end_s = w[1].get<double>();
                    if (!(t.window_end_s > t.window_start_s))
                        fail(tp + ".window_s", "window must be nonempty");
                }
                t.priority = get_number(tj, tp, "priority", 1.0);
                check_positive(t.priority, tp + ".priority");
                c.targets.push_back(t);
                ++ti;
            }
        }
    }

    if (root.contains("drift")) {
        const json& d = root["drift"];
        const std::string p = "config.drift";
        if (!d.is_object()) fail(p, "expected an object");
        if (d.contains("rho_grid_m")) {
            if (!d["rho_grid_m"].is_array()) fail(p + ".rho_grid_m", "expected an array");
            for (const json& v : d["rho_grid_m"]) {
                if (!v.is_number()) fail(p + ".rho_grid_m", "expected numbers");
                c.drift_rho_grid_m.push_back(v.get<double>());
                if (c.drift_rho_grid_m.back() < 0.0) fail(p + ".rho_grid_m", "must be nonnegative");
            }
        }
        if (d.contains("alpha_x_grid_deg")) {
            if (!d["alpha_x_grid_deg"].is_array())
                fail(p + ".alpha_x_grid_deg", "expected an array");
            for (const json& v : d["alpha_x_grid_deg"]) {
                if (!v.is_number()) fail(p + ".alpha_x_grid_deg", "expected numbers");
                c.drift_alpha_grid_deg.push_back(v.get<double>());
            }
        }
    }

    if (root.contains("simulate")) {
        const json& s = root["simulate"];
        const std::string p = "config.simulate";
        if (!s.is_object()) fail(p, "expected an object");
        c.simulate_orbits = get_int(s, p, "orbits", c.simulate_orbits);
        if (c.simulate_orbits < 0) fail(p + ".orbits", "must be nonnegative");
        if (s.contains("reconfigure")) {
            const json& r = s["reconfigure"];
            const std::string rp = p + ".reconfigure";
            if (!r.is_object()) fail(rp, "expected an object");
            ReconfigureConfig rc;
            if (r.contains("new_plane")) {
                const json& np = r["new_plane"];
                if (!np.is_array() || np.size() != 3) fail(rp + ".new_plane", "expected [x, y, z]");
                for (int i = 0; i < 3; ++i) {
                    if (!np[i].is_number()) fail(rp + ".new_plane", "expected numbers");
                    rc.new_plane(i) = np[i].get<double>();
                }
                if (rc.new_plane.norm() <= 0.0) fail(rp + ".new_plane", "must be nonzero");
                rc.new_plane.normalize();
            }
            rc.new_radius_m = get_number(r, rp, "new_radius_m", 0.0);
            if (rc.new_radius_m < 0.0) fail(rp + ".new_radius_m", "must be nonnegative");
            rc.after_orbit = get_int(r, rp, "after_orbit", 0);
            if (rc.after_orbit < 0) fail(rp + ".after_orbit", "must be nonnegative");
            c.reconfigure = rc;
        }
    }

    return c;
}

ScenarioConfig load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

std::string scenario_to_json(const ScenarioConfig& c) {
    json root;
    root["schema_version"] = c.schema_version;
    root["seed"] = c.seed;
    root["chief_orbit"]["altitude_km"] = c.altitude_km;
    if (c.semi_major_axis_m) root["chief_orbit"]["semi_major_axis_m"] = *c.semi_major_axis_m;

    json cons;
    cons["wheel_radius_m"] = c.wheel_radius_m;
    cons["deputies_per_fleet"] = c.deputies_per_fleet;
    cons["propulsion"] = c.propulsion;
    cons["adcs"] = c.adcs;
    cons["mass_kg"] = c.mass_kg;
    cons["max_slew_rate_deg_s"] = c.max_slew_rate_deg_s;
    cons["tracks"] = json::array();
    for (const TrackConfig& t : c.tracks) {
        json tj;
        tj["num_fleets"] = t.num_fleets;
        tj["separation_km"] = t.separation_km;
        if (!t.separations_km.empty()) tj["separations_km"] = t.separations_km;
        cons["tracks"].push_back(tj);
    }
    root["constellation"] = cons;

    root["deployment"]["cube_side_m"] = c.deployment_cube_side_m;
    root["planner"]["transfer_time_limit_s"] = c.transfer_time_limit_s;
    root["planner"]["impulse_epochs"] = c.impulse_epochs;
    root["planner"]["min_separation_m"] = c.min_separation_m;
    root["upkeep"]["scheme"] = c.upkeep_scheme;
    root["upkeep"]["corrections_per_orbit"] = c.corrections_per_orbit;
    root["upkeep"]["length_scale"] = c.drift_length_scale;
    root["upkeep"]["alpha_x_deg"] = c.upkeep_alpha_x_deg;

    json sch;
    sch["slot_duration_s"] = c.slot_duration_s;
    sch["horizon_slots"] = c.horizon_slots;
    sch["max_off_nadir_deg"] = c.max_off_nadir_deg;
    sch["momentum_per_slew_mNms_per_deg"] = c.momentum_per_slew_mNms_per_deg;
    sch["desat_threshold_fraction"] = c.desat_threshold_fraction;
    sch["desat_impulse_Ns"] = c.desat_impulse_Ns;
    sch["exact_cap_vars"] = c.exact_cap_vars;
    sch["targets"] = json::array();
    for (const TargetConfig& t : c.targets) {
        json tj;
        tj["id"] = t.id;
        tj["along_track_km"] = t.along_track_km;
        tj["cross_track_km"] = t.cross_track_km;
        tj["window_s"] = {t.window_start_s, t.window_end_s};
        tj["priority"] = t.priority;
        sch["targets"].push_back(tj);
    }
    root["scheduler"] = sch;

    if (!c.drift_rho_grid_m.empty()) root["drift"]["rho_grid_m"] = c.drift_rho_grid_m;
    if (!c.drift_alpha_grid_deg.empty())
        root["drift"]["alpha_x_grid_deg"] = c.drift_alpha_grid_deg;

    root["simulate"]["orbits"] = c.simulate_orbits;
    if (c.reconfigure) {
        json r;
        r["new_plane"] = {c.reconfigure->new_plane.x(), c.reconfigure->new_plane.y(),
                          c.reconfigure->new_plane.z()};
        r["new_radius_m"] = c.reconfigure->new_radius_m;
        r["after_orbit"] = c.reconfigure->after_orbit;
        root["simulate"]["reconfigure"] = r;
    }

    return root.dump(2);
}

std::string config_hash(const ScenarioConfig& c) {
    // nlohmann::json objects iterate in sorted key order, so dump() is already
    // a canonical form.
    const std::string canon = scenario_to_json(c);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : canon) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

std::vector<LvlhState> draw_deployment_states(const ScenarioConfig& config, int count,
                                              double epoch_s) {
    Rng rng(config.seed);
    std::vector<LvlhState> states;
    states.reserve(static_cast<std::size_t>(count));
    const double side = config.deployment_cube_side_m;
    for (int i = 0; i < count; ++i) {
        LvlhState s;
        s.epoch_s = epoch_s;
        for (int k = 0; k < 3; ++k) s.position_m(k) = (rng.uniform() - 0.5) * side;
        states.push_back(s);
    }
    return states;
}

}  // namespace geoscan

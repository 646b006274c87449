#include "geoscan/constellation.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <map>

namespace geoscan {

using nlohmann::json;

namespace {

const std::array<SensorInfo, 8>& sensor_table() {
    static const std::array<SensorInfo, 8> table = {{
        {SensorKind::RgbNarrow, "rgb_narrow", Swath::Narrow, SensorCategory::Required,
         {640.0, 550.0, 470.0}},
        {SensorKind::RgbWide, "rgb_wide", Swath::Wide, SensorCategory::Required,
         {640.0, 550.0, 470.0}},
        {SensorKind::SwirNarrow, "swir_narrow", Swath::Narrow, SensorCategory::Required,
         {1240.0, 1640.0, 2130.0}},
        {SensorKind::SwirWide, "swir_wide", Swath::Wide, SensorCategory::Required,
         {1240.0, 1640.0, 2130.0}},
        {SensorKind::RgbPolarized, "rgb_polarized", Swath::Narrow, SensorCategory::Desirable,
         {640.0, 550.0, 470.0}},
        {SensorKind::Tir, "tir", Swath::Narrow, SensorCategory::Desirable, {11000.0}},
        {SensorKind::DoasO2H2o, "doas_o2_h2o", Swath::Narrow, SensorCategory::Desirable,
         {765.0, 865.0, 936.0}},
        {SensorKind::NadirRedExtra, "nadir_red_extra", Swath::Narrow, SensorCategory::Required,
         {640.0}},
    }};
    return table;
}

constexpr std::array<SensorKind, 4> kCoreRequired = {
    SensorKind::RgbNarrow, SensorKind::RgbWide, SensorKind::SwirNarrow, SensorKind::SwirWide};

constexpr std::array<SensorKind, 3> kDesirableCycle = {SensorKind::RgbPolarized, SensorKind::Tir,
                                                       SensorKind::DoasO2H2o};

}  // namespace

const SensorInfo& sensor_info(SensorKind kind) {
    return sensor_table()[static_cast<std::size_t>(kind)];
}

SensorKind sensor_kind_from_name(const std::string& name) {
    for (const SensorInfo& info : sensor_table())
        if (name == info.name) return info.kind;
    throw std::invalid_argument("unknown sensor kind '" + name + "'");
}

std::span<const SensorKind> core_required_sensors() {
    return {kCoreRequired.data(), kCoreRequired.size()};
}

PropulsionSpec propulsion_by_name(const std::string& name) {
    if (name == "VACCO_MIPS") return {"VACCO_MIPS", 250.0};
    if (name == "AEROJET_MPS120") return {"AEROJET_MPS120", 800.0};
    throw std::invalid_argument("unknown propulsion option '" + name + "'");
}

AdcsSpec adcs_by_name(const std::string& name) {
    if (name == "BCT_XACT100") return {"BCT_XACT100", 0.003, 100.0, 1.0};
    throw std::invalid_argument("unknown adcs option '" + name + "'");
}

std::string to_string(Severity severity) {
    switch (severity) {
        case Severity::Info: return "info";
        case Severity::Warning: return "warning";
        case Severity::Error: return "error";
    }
    return "unknown";
}

int Constellation::satellite_count() const {
    int count = 0;
    for (const StringOfPearls& track : tracks)
        for (const Fleet& fleet : track.fleets)
            count += 1 + static_cast<int>(fleet.deputies.size());
    return count;
}

std::vector<RelativeOrbitParams> wheel_slots(double radius_m, const Vec3& plane_normal,
                                             int n_slots, double phase0_rad) {
    if (n_slots < 1) throw EmptyFleet("wheel_slots: fleet has no deputies");
    if (radius_m < 0.0) throw std::invalid_argument("wheel_slots: radius must be nonnegative");

    Vec3 w = plane_normal;
    const double norm = w.norm();
    if (norm <= 0.0) throw std::invalid_argument("wheel_slots: zero plane normal");
    w /= norm;

    std::vector<RelativeOrbitParams> slots;
    slots.reserve(static_cast<std::size_t>(n_slots));

    const bool nadir_plane = std::abs(std::abs(w.x()) - 1.0) < 1e-9;
    const bool perpendicular_plane = std::abs(w.x()) < 1e-9 && std::abs(w.y()) > 1e-9;
    if (!nadir_plane && !perpendicular_plane)
        throw std::invalid_argument(
            "wheel_slots: supported wheel planes are the nadir axis or any axis perpendicular "
            "to it with a nonzero along-track component");

    for (int k = 0; k < n_slots; ++k) {
        const double alpha = wrap_angle(phase0_rad + 2.0 * M_PI * k / n_slots);
        if (nadir_plane) {
            slots.push_back(RelativeOrbitParams::pco(radius_m, alpha));
            continue;
        }
        // Wheel projecting to a circle along w = (0, wy, wz). The linearized
        // dynamics lock y to 2x with a 90 deg lead, which fixes the required
        // cross-track amplitude.
        RelativeOrbitParams p;
        p.rho_x_m = radius_m;
        p.alpha_x_rad = alpha;
        p.rho_y_m = 2.0 * radius_m;
        p.alpha_y_rad = alpha;
        const double rho_z_signed = (2.0 * w.z() - 1.0) * radius_m / w.y();
        p.rho_z_m = std::abs(rho_z_signed);
        p.alpha_z_rad = wrap_angle(alpha + M_PI_2 + (rho_z_signed < 0.0 ? M_PI : 0.0));
        slots.push_back(p);
    }
    return slots;
}

std::vector<RelativeOrbitParams> wheel_slots(const Fleet& fleet) {
    return wheel_slots(fleet.wheel_radius_m, fleet.wheel_plane,
                       static_cast<int>(fleet.deputies.size()), 0.0);
}

namespace {

// Deputy sensor complement for one fleet: the four core kinds first, then the
// stereo red cameras the fleet's track position calls for, then desirable
// kinds cycled to fill the wheel.
std::vector<SensorKind> fleet_sensor_plan(int n_deputies, int extra_red) {
    std::vector<SensorKind> plan;
    plan.reserve(static_cast<std::size_t>(n_deputies));
    for (SensorKind kind : kCoreRequired) {
        if (static_cast<int>(plan.size()) >= n_deputies) return plan;
        plan.push_back(kind);
    }
    for (int i = 0; i < extra_red; ++i) {
        if (static_cast<int>(plan.size()) >= n_deputies) return plan;
        plan.push_back(SensorKind::NadirRedExtra);
    }
    int cycle = 0;
    while (static_cast<int>(plan.size()) < n_deputies) {
        plan.push_back(kDesirableCycle[static_cast<std::size_t>(cycle) % kDesirableCycle.size()]);
        ++cycle;
    }
    return plan;
}

}  // namespace

Constellation build_constellation(const ScenarioConfig& config) {
    Constellation cons{config.chief_orbit(), {}};
    const double a = cons.chief_orbit.semi_major_axis_m;

    const PropulsionSpec propulsion = propulsion_by_name(config.propulsion);
    AdcsSpec adcs = adcs_by_name(config.adcs);
    adcs.max_slew_rate_deg_s = config.max_slew_rate_deg_s;

    int next_id = 0;
    int next_fleet_id = 0;
    for (std::size_t ti = 0; ti < config.tracks.size(); ++ti) {
        const TrackConfig& tc = config.tracks[ti];
        StringOfPearls track;

        std::vector<double> seps_m;
        if (!tc.separations_km.empty()) {
            for (double s : tc.separations_km) seps_m.push_back(s * 1000.0);
        } else {
            seps_m.assign(static_cast<std::size_t>(std::max(0, tc.num_fleets - 1)),
                          tc.separation_km * 1000.0);
        }
        track.separations_m = seps_m;

        const int center = tc.num_fleets > 0 ? (tc.num_fleets - 1) / 2 : 0;
        double phase = 0.0;
        for (int fi = 0; fi < tc.num_fleets; ++fi) {
            Fleet fleet;
            fleet.id = next_fleet_id++;
            fleet.wheel_radius_m = config.wheel_radius_m;
            fleet.wheel_plane = Vec3::UnitX();
            fleet.phase_along_track_rad = phase;
            if (fi + 1 < tc.num_fleets) phase -= seps_m[static_cast<std::size_t>(fi)] / a;

            fleet.chief.id = next_id++;
            fleet.chief.role = SatRole::Chief;
            fleet.chief.mass_kg = config.mass_kg;
            fleet.chief.propulsion = propulsion;
            fleet.chief.adcs = adcs;

            const int n_dep = config.deputies_per_fleet;
            int extra_red = 0;
            if (tc.num_fleets >= 3) {
                if (fi == center) extra_red = 2;
                else if (fi == center - 1 || fi == center + 1) extra_red = 1;
            }
            const std::vector<SensorKind> plan = fleet_sensor_plan(n_dep, extra_red);
            const std::vector<RelativeOrbitParams> slots =
                n_dep > 0 ? wheel_slots(config.wheel_radius_m, fleet.wheel_plane, n_dep, 0.0)
                          : std::vector<RelativeOrbitParams>{};
            for (int di = 0; di < n_dep; ++di) {
                NanoSat sat;
                sat.id = next_id++;
                sat.role = SatRole::Deputy;
                sat.sensor = plan[static_cast<std::size_t>(di)];
                sat.mass_kg = config.mass_kg;
                sat.propulsion = propulsion;
                sat.adcs = adcs;
                sat.rel_orbit = slots[static_cast<std::size_t>(di)];
                fleet.deputies.push_back(std::move(sat));
            }
            track.fleets.push_back(std::move(fleet));
        }
        cons.tracks.push_back(std::move(track));
    }
    return cons;
}

double nadir_revisit_delay_s(double separation_m, const ChiefOrbit& chief) {
    if (!(separation_m > 0.0))
        throw std::invalid_argument("nadir_revisit_delay_s: separation must be positive");
    return separation_m / chief.ground_track_speed_mps();
}

namespace {

void check_fleet(const Fleet& fleet, const ChiefOrbit& chief, double ground_pixel_m,
                 std::vector<Finding>& out) {
    const std::string subject = "fleet " + std::to_string(fleet.id);

    if (fleet.chief.sensor) {
        out.push_back({Severity::Error, "chief_payload", subject,
                       "chief carries a science sensor; the chief handles tracking and "
                       "communication only"});
    }

    std::map<SensorKind, int> kinds;
    for (const NanoSat& sat : fleet.deputies)
        if (sat.sensor) ++kinds[*sat.sensor];
    for (SensorKind kind : kCoreRequired) {
        if (!fleet.deputies.empty() && kinds[kind] == 0) {
            out.push_back({Severity::Error, "missing_required_sensor", subject,
                           std::string("no deputy carries required sensor '") +
                               sensor_info(kind).name + "'"});
        }
    }

    if (fleet.wheel_radius_m < 100.0 || fleet.wheel_radius_m > 1000.0) {
        out.push_back({Severity::Warning, "wheel_radius", subject,
                       "wheel radius " + std::to_string(fleet.wheel_radius_m) +
                           " m outside the 100-1000 m design band"});
    }

    // Even phasing on the wheel.
    if (fleet.deputies.size() >= 2) {
        const double expected = 2.0 * M_PI / static_cast<double>(fleet.deputies.size());
        for (std::size_t i = 0; i < fleet.deputies.size(); ++i) {
            const double a0 = fleet.deputies[i].rel_orbit.alpha_x_rad;
            const double a1 =
                fleet.deputies[(i + 1) % fleet.deputies.size()].rel_orbit.alpha_x_rad;
            const double gap = wrap_angle(a1 - a0);
            if (std::abs(gap - expected) > 1e-9) {
                out.push_back({Severity::Error, "uneven_phasing", subject,
                               "deputies are not evenly phased on the wheel"});
                break;
            }
        }
    }

    const double altitude = chief.altitude_m();
    for (const NanoSat& sat : fleet.deputies) {
        const double err_m = sat.adcs.pointing_accuracy_deg * M_PI / 180.0 * altitude;
        if (err_m > ground_pixel_m) {
            out.push_back({Severity::Error, "pointing_resolution",
                           "sat " + std::to_string(sat.id),
                           "pointing error " + std::to_string(err_m) + " m at nadir exceeds the " +
                               std::to_string(ground_pixel_m) + " m ground pixel"});
        }
    }
}

int count_kind(const Fleet& fleet, SensorKind kind) {
    int n = 0;
    for (const NanoSat& sat : fleet.deputies)
        if (sat.sensor == kind) ++n;
    return n;
}

}  // namespace

std::vector<Finding> validate(const Constellation& constellation, double ground_pixel_m) {
    std::vector<Finding> out;

    for (std::size_t ti = 0; ti < constellation.tracks.size(); ++ti) {
        const StringOfPearls& track = constellation.tracks[ti];
        const std::string subject = "track " + std::to_string(ti);

        const int n_fleets = static_cast<int>(track.fleets.size());
        if (n_fleets == 0) {
            out.push_back({Severity::Warning, "empty_track", subject, "track has no fleets"});
            continue;
        }
        if (n_fleets < 5 || n_fleets > 15) {
            out.push_back({Severity::Info, "fleet_count", subject,
                           std::to_string(n_fleets) +
                               " fleets on this track; around 10 gives the intended view-angle "
                               "spread"});
        }

        for (std::size_t si = 0; si < track.separations_m.size(); ++si) {
            const double sep = track.separations_m[si];
            if (sep < 100e3 || sep > 300e3) {
                out.push_back({Severity::Warning, "pearl_spacing",
                               subject + " gap " + std::to_string(si),
                               "separation " + std::to_string(sep / 1000.0) +
                                   " km outside the 100-300 km band"});
            }
        }

        if (n_fleets >= 3) {
            const int center = (n_fleets - 1) / 2;
            if (count_kind(track.fleets[static_cast<std::size_t>(center)],
                           SensorKind::NadirRedExtra) < 2) {
                out.push_back({Severity::Warning, "stereo_cameras",
                               "fleet " + std::to_string(track.fleets[center].id),
                               "nadir wheel should carry two extra off-nadir red cameras"});
            }
            for (int side : {center - 1, center + 1}) {
                if (side < 0 || side >= n_fleets) continue;
                if (count_kind(track.fleets[static_cast<std::size_t>(side)],
                               SensorKind::NadirRedExtra) < 1) {
                    out.push_back({Severity::Warning, "stereo_cameras",
                                   "fleet " + std::to_string(track.fleets[side].id),
                                   "first off-nadir wheel should carry an extra nadir-looking "
                                   "red camera"});
                }
            }
        }

        for (const Fleet& fleet : track.fleets)
            check_fleet(fleet, constellation.chief_orbit, ground_pixel_m, out);
    }

    if (constellation.tracks.empty())
        out.push_back({Severity::Warning, "empty_constellation", "constellation",
                       "no tracks configured"});
    return out;
}

namespace {

json params_to_json(const RelativeOrbitParams& p) {
    return json{{"rho_x_m", p.rho_x_m},         {"rho_y_m", p.rho_y_m},
                {"rho_z_m", p.rho_z_m},         {"alpha_x_rad", p.alpha_x_rad},
                {"alpha_y_rad", p.alpha_y_rad}, {"alpha_z_rad", p.alpha_z_rad},
                {"y_offset_m", p.y_offset_m}};
}

RelativeOrbitParams params_from_json(const json& j) {
    RelativeOrbitParams p;
    p.rho_x_m = j.at("rho_x_m").get<double>();
    p.rho_y_m = j.at("rho_y_m").get<double>();
    p.rho_z_m = j.at("rho_z_m").get<double>();
    p.alpha_x_rad = j.at("alpha_x_rad").get<double>();
    p.alpha_y_rad = j.at("alpha_y_rad").get<double>();
    p.alpha_z_rad = j.at("alpha_z_rad").get<double>();
    p.y_offset_m = j.at("y_offset_m").get<double>();
    return p;
}

json sat_to_json(const NanoSat& s) {
    json j;
    j["id"] = s.id;
    j["role"] = s.role == SatRole::Chief ? "chief" : "deputy";
    if (s.sensor) j["sensor"] = sensor_info(*s.sensor).name;
    j["mass_kg"] = s.mass_kg;
    j["propulsion"] = {{"name", s.propulsion.name},
                       {"total_impulse_Ns", s.propulsion.total_impulse_Ns}};
    j["adcs"] = {{"name", s.adcs.name},
                 {"pointing_accuracy_deg", s.adcs.pointing_accuracy_deg},
                 {"momentum_capacity_mNms", s.adcs.momentum_capacity_mNms},
                 {"max_slew_rate_deg_s", s.adcs.max_slew_rate_deg_s}};
    j["fuel_used_Ns"] = s.fuel_used_Ns;
    j["wheel_momentum_mNms"] = s.wheel_momentum_mNms;
    j["rel_orbit"] = params_to_json(s.rel_orbit);
    return j;
}

NanoSat sat_from_json(const json& j) {
    NanoSat s;
    s.id = j.at("id").get<int>();
    s.role = j.at("role").get<std::string>() == "chief" ? SatRole::Chief : SatRole::Deputy;
    if (j.contains("sensor")) s.sensor = sensor_kind_from_name(j["sensor"].get<std::string>());
    s.mass_kg = j.at("mass_kg").get<double>();
    s.propulsion.name = j.at("propulsion").at("name").get<std::string>();
    s.propulsion.total_impulse_Ns = j.at("propulsion").at("total_impulse_Ns").get<double>();
    s.adcs.name = j.at("adcs").at("name").get<std::string>();
    s.adcs.pointing_accuracy_deg = j.at("adcs").at("pointing_accuracy_deg").get<double>();
    s.adcs.momentum_capacity_mNms = j.at("adcs").at("momentum_capacity_mNms").get<double>();
    s.adcs.max_slew_rate_deg_s = j.at("adcs").at("max_slew_rate_deg_s").get<double>();
    s.fuel_used_Ns = j.at("fuel_used_Ns").get<double>();
    s.wheel_momentum_mNms = j.at("wheel_momentum_mNms").get<double>();
    s.rel_orbit = params_from_json(j.at("rel_orbit"));
    return s;
}

}  // namespace

std::string constellation_to_json(const Constellation& c) {
    json root;
    root["chief_orbit"] = {{"semi_major_axis_m", c.chief_orbit.semi_major_axis_m},
                           {"mu_m3s2", c.chief_orbit.mu_m3s2},
                           {"earth_radius_m", c.chief_orbit.earth_radius_m}};
    root["tracks"] = json::array();
    for (const StringOfPearls& track : c.tracks) {
        json tj;
        tj["separations_m"] = track.separations_m;
        tj["fleets"] = json::array();
        for (const Fleet& fleet : track.fleets) {
            json fj;
            fj["id"] = fleet.id;
            fj["wheel_radius_m"] = fleet.wheel_radius_m;
            fj["wheel_plane"] = {fleet.wheel_plane.x(), fleet.wheel_plane.y(),
                                 fleet.wheel_plane.z()};
            fj["phase_along_track_rad"] = fleet.phase_along_track_rad;
            fj["chief"] = sat_to_json(fleet.chief);
            fj["deputies"] = json::array();
            for (const NanoSat& sat : fleet.deputies) fj["deputies"].push_back(sat_to_json(sat));
            tj["fleets"].push_back(fj);
        }
        root["tracks"].push_back(tj);
    }
    return root.dump(2);
}

Constellation constellation_from_json(const std::string& text) {
    const json root = json::parse(text);
    Constellation c{ChiefOrbit(root.at("chief_orbit").at("semi_major_axis_m").get<double>(),
                               root.at("chief_orbit").at("mu_m3s2").get<double>(),
                               root.at("chief_orbit").at("earth_radius_m").get<double>()),
                    {}};
    for (const json& tj : root.at("tracks")) {
        StringOfPearls track;
        track.separations_m = tj.at("separations_m").get<std::vector<double>>();
        for (const json& fj : tj.at("fleets")) {
            Fleet fleet;
            fleet.id = fj.at("id").get<int>();
            fleet.wheel_radius_m = fj.at("wheel_radius_m").get<double>();
            const json& wp = fj.at("wheel_plane");
            fleet.wheel_plane = Vec3(wp[0].get<double>(), wp[1].get<double>(),
                                     wp[2].get<double>());
            fleet.phase_along_track_rad = fj.at("phase_along_track_rad").get<double>();
            fleet.chief = sat_from_json(fj.at("chief"));
            for (const json& dj : fj.at("deputies")) fleet.deputies.push_back(sat_from_json(dj));
            track.fleets.push_back(std::move(fleet));
        }
        c.tracks.push_back(std::move(track));
    }
    return c;
}

}  // namespace geoscan

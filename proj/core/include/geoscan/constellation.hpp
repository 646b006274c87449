#ifndef GEOSCAN_CONSTELLATION_HPP
#define GEOSCAN_CONSTELLATION_HPP

#include "geoscan/relmotion.hpp"
#include "geoscan/scenario.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace geoscan {

enum class SensorKind {
    RgbNarrow,
    RgbWide,
    SwirNarrow,
    SwirWide,
    RgbPolarized,
    Tir,
    DoasO2H2o,
    NadirRedExtra,
};

enum class Swath { Narrow, Wide };
enum class SensorCategory { Required, Desirable };

struct SensorInfo {
    SensorKind kind;
    const char* name;
    Swath swath;
    SensorCategory category;
    std::vector<double> channels_nm;
};

const SensorInfo& sensor_info(SensorKind kind);
SensorKind sensor_kind_from_name(const std::string& name);

/// The four spectral kinds every fleet must carry.
std::span<const SensorKind> core_required_sensors();

struct PropulsionSpec {
    std::string name;
    double total_impulse_Ns = 0.0;
};

struct AdcsSpec {
    std::string name;
    double pointing_accuracy_deg = 0.0;
    double momentum_capacity_mNms = 0.0;
    double max_slew_rate_deg_s = 1.0;
};

PropulsionSpec propulsion_by_name(const std::string& name);  // VACCO_MIPS | AEROJET_MPS120
AdcsSpec adcs_by_name(const std::string& name);              // BCT_XACT100

enum class SatRole { Chief, Deputy };

struct NanoSat {
    int id = -1;
    SatRole role = SatRole::Deputy;
    std::optional<SensorKind> sensor;
    double mass_kg = 10.0;
    PropulsionSpec propulsion;
    AdcsSpec adcs;
    double fuel_used_Ns = 0.0;
    double wheel_momentum_mNms = 0.0;
    RelativeOrbitParams rel_orbit;
};

struct Fleet {
    int id = -1;
    NanoSat chief;
    std::vector<NanoSat> deputies;
    double wheel_radius_m = 100.0;
    /// Axis along which the wheel projects to a circle. UnitX (nadir) is the
    /// classic projected circular orbit; see wheel_slots for supported planes.
    Vec3 wheel_plane = Vec3::UnitX();
    double phase_along_track_rad = 0.0;
};

struct StringOfPearls {
    std::vector<Fleet> fleets;
    std::vector<double> separations_m;  // gap between consecutive fleets
};

struct Constellation {
    ChiefOrbit chief_orbit{6.778137e6};
    std::vector<StringOfPearls> tracks;

    int satellite_count() const;
};

enum class Severity { Info, Warning, Error };

struct Finding {
    Severity severity = Severity::Info;
    std::string code;
    std::string subject;
    std::string message;
};

std::string to_string(Severity severity);

class EmptyFleet : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Deterministic construction from a parsed scenario; throws ConfigError.
Constellation build_constellation(const ScenarioConfig& config);

/// Structural checks: sensor complement, chief payload rule, pearl spacing,
/// pointing accuracy vs ground pixel, stereo camera counts.
std::vector<Finding> validate(const Constellation& constellation, double ground_pixel_m = 50.0);

/// Time between successive nadir looks of pearls separated along the track.
double nadir_revisit_delay_s(double separation_m, const ChiefOrbit& chief);

/// Evenly phased wheel slot parameters for a fleet's deputies.
std::vector<RelativeOrbitParams> wheel_slots(const Fleet& fleet);
std::vector<RelativeOrbitParams> wheel_slots(double radius_m, const Vec3& plane_normal,
                                             int n_slots, double phase0_rad = 0.0);

std::string constellation_to_json(const Constellation& constellation);
Constellation constellation_from_json(const std::string& text);

}  // namespace geoscan

#endif  // GEOSCAN_CONSTELLATION_HPP

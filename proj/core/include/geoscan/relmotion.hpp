#ifndef GEOSCAN_RELMOTION_HPP
#define GEOSCAN_RELMOTION_HPP

#include <Eigen/Dense>

#include <span>
#include <stdexcept>
#include <vector>

namespace geoscan {

using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using Mat63 = Eigen::Matrix<double, 6, 3>;

inline constexpr double kMuEarth = 3.986004418e14;        // m^3/s^2
inline constexpr double kEarthRadiusM = 6.378137e6;       // m
inline constexpr double kSecondsPerYear = 365.25 * 86400.0;

/**
 * Circular reference (chief) orbit defining the LVLH frame.
 *
 * Frame convention (Hill): x radially away from Earth, y along orbital
 * velocity, z along orbital angular momentum.
 */
struct ChiefOrbit {
    double semi_major_axis_m;
    double mu_m3s2 = kMuEarth;
    double earth_radius_m = kEarthRadiusM;

    explicit ChiefOrbit(double a_m, double mu = kMuEarth, double re = kEarthRadiusM)
        : semi_major_axis_m(a_m), mu_m3s2(mu), earth_radius_m(re) {
        if (!(a_m > re))
            throw std::invalid_argument("ChiefOrbit: semi-major axis must exceed Earth radius");
    }

    static ChiefOrbit from_altitude_m(double altitude_m, double mu = kMuEarth,
                                      double re = kEarthRadiusM) {
        return ChiefOrbit(re + altitude_m, mu, re);
    }

    double mean_motion_rad_s() const {
        const double a = semi_major_axis_m;
        return std::sqrt(mu_m3s2 / (a * a * a));
    }
    double period_s() const { return 2.0 * M_PI / mean_motion_rad_s(); }
    double altitude_m() const { return semi_major_axis_m - earth_radius_m; }
    /// Speed at which the sub-satellite point moves over the ground.
    double ground_track_speed_mps() const { return mean_motion_rad_s() * earth_radius_m; }
};

/// Relative state in the LVLH frame at a scenario epoch.
struct LvlhState {
    Vec3 position_m = Vec3::Zero();
    Vec3 velocity_mps = Vec3::Zero();
    double epoch_s = 0.0;

    Vec6 vec() const {
        Vec6 v;
        v << position_m, velocity_mps;
        return v;
    }
    static LvlhState from_vec(const Vec6& v, double epoch_s) {
        return LvlhState{v.head<3>(), v.tail<3>(), epoch_s};
    }
};

/// Instantaneous velocity increment applied at a scenario epoch, LVLH axes.
struct Impulse {
    double time_s = 0.0;
    Vec3 delta_v_mps = Vec3::Zero();
    double magnitude_mps() const { return delta_v_mps.norm(); }
};

/**
 * Magnitude-phase description of a bounded relative orbit:
 *
 *   x(t) = rho_x * sin(n t + alpha_x)
 *   y(t) = y_offset + rho_y * cos(n t + alpha_y)
 *   z(t) = rho_z * sin(n t + alpha_z)
 *
 * A parameter set is dynamically consistent (follows free linearized motion)
 * iff rho_y = 2 rho_x and alpha_y = alpha_x. The projected circular orbit
 * (PCO, the "wheel") of radius rho is rho_x = rho/2, rho_y = rho_z = rho with
 * all phases equal, so y^2 + z^2 = rho^2 at all times.
 */
struct RelativeOrbitParams {
    double rho_x_m = 0.0;
    double rho_y_m = 0.0;
    double rho_z_m = 0.0;
    double alpha_x_rad = 0.0;
    double alpha_y_rad = 0.0;
    double alpha_z_rad = 0.0;
    double y_offset_m = 0.0;

    static RelativeOrbitParams pco(double rho_m, double phase_rad);
    bool hcw_consistent(double rel_tol = 1e-9) const;
};

class UnsortedImpulses : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Wrap an angle into [0, 2*pi).
double wrap_angle(double rad);

/// Closed-form Clohessy-Wiltshire state-transition matrix over dt seconds.
Mat6 hcw_stm(const ChiefOrbit& chief, double dt_s);

/**
 * Piecewise closed-form propagation with instantaneous velocity increments.
 *
 * Impulses must be sorted by time and lie within [state.epoch, state.epoch+dt];
 * an impulse exactly at the window end is applied after the final coast.
 */
LvlhState propagate(const LvlhState& state, const ChiefOrbit& chief, double dt_s,
                    std::span<const Impulse> impulses = {});

/// Evaluate the parameterized trajectory at a scenario time.
LvlhState params_to_state(const RelativeOrbitParams& params, const ChiefOrbit& chief,
                          double phase_time_s);

/**
 * Decomposition of an arbitrary LVLH state into a bounded magnitude-phase
 * part plus the secular terms. For a drift-free state (ydot = -2 n x) the
 * secular terms vanish and params fully describe the motion.
 */
struct OrbitDecomposition {
    RelativeOrbitParams params;
    double drift_rate_mps = 0.0;    // linear secular along-track rate
    double radial_offset_m = 0.0;   // mean radial displacement, zero iff drift-free
};

OrbitDecomposition decompose_state(const LvlhState& state, const ChiefOrbit& chief);

/// Bounded part only; drifting states are decomposed, not rejected.
RelativeOrbitParams state_to_params(const LvlhState& state, const ChiefOrbit& chief);

bool is_drift_free(const LvlhState& state, const ChiefOrbit& chief, double rel_tol = 1e-9);

/// Which length scale divides the drift formulas.
enum class DriftScale { SemiMajorAxis, Altitude };

/**
 * Secular along-track drift rate (m/s) of a relative orbit in
 * magnitude-phase form:
 *
 *   ydot = -(3n / 2a) (2 rho_x^2 + 2 rho_y^2 + rho_z^2
 *                      + 6 rho_x rho_y cos(alpha_x) + 3 rho_x^2 cos(2 alpha_x))
 *
 * The divisor a is the chief semi-major axis by default; DriftScale::Altitude
 * substitutes the orbit altitude for reproducing altitude-normalized numbers.
 */
double drift_rate(const RelativeOrbitParams& params, const ChiefOrbit& chief,
                  DriftScale scale = DriftScale::SemiMajorAxis);

/**
 * Linear estimate of along-track drift per orbit (m) for a PCO of radius rho:
 *
 *   y_drift = -(9 pi rho^2 / 2a) (2 + cos(2 alpha_x))
 */
double drift_per_orbit_pco(double rho_m, double alpha_x_rad, const ChiefOrbit& chief,
                           DriftScale scale = DriftScale::SemiMajorAxis);

}  // namespace geoscan

#endif  // GEOSCAN_RELMOTION_HPP

// Independent oracles used by the test suites. Everything here must stay
// decoupled from the implementation paths it checks: the integrator works on
// the differential equations directly, the drift formulas are evaluated
// standalone, and the boundary-value solver inverts the dynamics on its own.
#ifndef GEOSCAN_TESTS_ORACLES_HPP
#define GEOSCAN_TESTS_ORACLES_HPP

#include "geoscan/relmotion.hpp"
#include "geoscan/rng.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <utility>

namespace geoscan::oracles {

// Right-hand side of the linearized relative-motion equations:
//   xdd - 2 n yd - 3 n^2 x = 0, ydd + 2 n xd = 0, zdd + n^2 z = 0
inline Vec6 cw_rhs(double n, const Vec6& s) {
    Vec6 d;
    d(0) = s(3);
    d(1) = s(4);
    d(2) = s(5);
    d(3) = 3.0 * n * n * s(0) + 2.0 * n * s(4);
    d(4) = -2.0 * n * s(3);
    d(5) = -n * n * s(2);
    return d;
}

// Classic fixed-step RK4 on the linearized equations.
inline Vec6 rk4_propagate(double n, Vec6 state, double duration, double step = 0.1) {
    double t = 0.0;
    while (t < duration - 1e-12) {
        const double h = std::min(step, duration - t);
        const Vec6 k1 = cw_rhs(n, state);
        const Vec6 k2 = cw_rhs(n, state + 0.5 * h * k1);
        const Vec6 k3 = cw_rhs(n, state + 0.5 * h * k2);
        const Vec6 k4 = cw_rhs(n, state + h * k3);
        state += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        t += h;
    }
    return state;
}

// Standalone evaluation of the magnitude-phase drift-rate formula.
inline double drift_rate_formula(double n, double a, double rho_x, double rho_y, double rho_z,
                                 double alpha_x) {
    return -(3.0 * n / (2.0 * a)) *
           (2.0 * rho_x * rho_x + 2.0 * rho_y * rho_y + rho_z * rho_z +
            6.0 * rho_x * rho_y * std::cos(alpha_x) +
            3.0 * rho_x * rho_x * std::cos(2.0 * alpha_x));
}

// Standalone evaluation of the per-orbit PCO drift estimate.
inline double drift_per_orbit_formula(double a, double rho, double alpha_x) {
    return -(9.0 * M_PI * rho * rho / (2.0 * a)) * (2.0 + std::cos(2.0 * alpha_x));
}

// Closed-form two-impulse boundary-value transfer: solve for the departure
// velocity that carries (r0, v0) onto rf over tof, then match vf on arrival.
// Built from the state-transition blocks computed here, not from the library.
struct TwoImpulse {
    Vec3 dv0;
    Vec3 dv1;
};

inline Eigen::Matrix<double, 6, 6> stm_blocks(double n, double t) {
    const double c = std::cos(n * t);
    const double s = std::sin(n * t);
    Eigen::Matrix<double, 6, 6> phi = Eigen::Matrix<double, 6, 6>::Zero();
    phi(0, 0) = 4.0 - 3.0 * c;
    phi(0, 3) = s / n;
    phi(0, 4) = 2.0 * (1.0 - c) / n;
    phi(1, 0) = 6.0 * (s - n * t);
    phi(1, 1) = 1.0;
    phi(1, 3) = 2.0 * (c - 1.0) / n;
    phi(1, 4) = (4.0 * s - 3.0 * n * t) / n;
    phi(2, 2) = c;
    phi(2, 5) = s / n;
    phi(3, 0) = 3.0 * n * s;
    phi(3, 3) = c;
    phi(3, 4) = 2.0 * s;
    phi(4, 0) = 6.0 * n * (c - 1.0);
    phi(4, 3) = -2.0 * s;
    phi(4, 4) = 4.0 * c - 3.0;
    phi(5, 2) = -n * s;
    phi(5, 5) = c;
    return phi;
}

inline TwoImpulse two_impulse_transfer(double n, const Vec6& start, const Vec6& goal,
                                       double tof) {
    const Eigen::Matrix<double, 6, 6> phi = stm_blocks(n, tof);
    const Eigen::Matrix3d prr = phi.block<3, 3>(0, 0);
    const Eigen::Matrix3d prv = phi.block<3, 3>(0, 3);
    const Eigen::Matrix3d pvr = phi.block<3, 3>(3, 0);
    const Eigen::Matrix3d pvv = phi.block<3, 3>(3, 3);

    const Vec3 r0 = start.head<3>();
    const Vec3 v0 = start.tail<3>();
    const Vec3 rf = goal.head<3>();
    const Vec3 vf = goal.tail<3>();

    const Vec3 v0_plus = prv.fullPivLu().solve(rf - prr * r0);
    const Vec3 v_arrive = pvr * r0 + pvv * v0_plus;
    return {v0_plus - v0, vf - v_arrive};
}

// Drift-free random bounded state: oscillation amplitudes drawn, then the
// along-track rate pinned to -2 n x.
inline Vec6 random_bounded_state(Rng& rng, double n, double scale_m) {
    const double rho_x = rng.uniform(0.1, 1.0) * scale_m;
    const double rho_z = rng.uniform(0.0, 1.0) * scale_m;
    const double ax = rng.uniform(0.0, 2.0 * M_PI);
    const double az = rng.uniform(0.0, 2.0 * M_PI);
    const double y_off = rng.uniform(-1.0, 1.0) * scale_m;

    Vec6 s;
    s(0) = rho_x * std::sin(ax);
    s(1) = y_off + 2.0 * rho_x * std::cos(ax);
    s(2) = rho_z * std::sin(az);
    s(3) = n * rho_x * std::cos(ax);
    s(4) = -2.0 * n * s(0);
    s(5) = n * rho_z * std::cos(az);
    return s;
}

}  // namespace geoscan::oracles

#endif  // GEOSCAN_TESTS_ORACLES_HPP

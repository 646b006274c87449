#include "geoscan/relmotion.hpp"

#include <algorithm>
#include <cmath>

namespace geoscan {

double wrap_angle(double rad) {
    double w = std::fmod(rad, 2.0 * M_PI);
    if (w < 0.0) w += 2.0 * M_PI;
    if (w >= 2.0 * M_PI) w = 0.0;  // fmod can land exactly on 2*pi after the add
    return w;
}

RelativeOrbitParams RelativeOrbitParams::pco(double rho_m, double phase_rad) {
    if (rho_m < 0.0) throw std::invalid_argument("pco: radius must be nonnegative");
    RelativeOrbitParams p;
    p.rho_x_m = 0.5 * rho_m;
    p.rho_y_m = rho_m;
    p.rho_z_m = rho_m;
    p.alpha_x_rad = p.alpha_y_rad = p.alpha_z_rad = wrap_angle(phase_rad);
    return p;
}

bool RelativeOrbitParams::hcw_consistent(double rel_tol) const {
    const double scale = std::max({rho_x_m, rho_y_m, rho_z_m, 1e-12});
    if (std::abs(rho_y_m - 2.0 * rho_x_m) > rel_tol * scale) return false;
    if (rho_x_m <= rel_tol * scale) return true;  // no in-plane oscillation, phase moot
    double dphi = wrap_angle(alpha_y_rad - alpha_x_rad);
    dphi = std::min(dphi, 2.0 * M_PI - dphi);
    return dphi <= rel_tol;
}

Mat6 hcw_stm(const ChiefOrbit& chief, double dt_s) {
    const double n = chief.mean_motion_rad_s();
    const double nt = n * dt_s;
    const double c = std::cos(nt);
    const double s = std::sin(nt);

    Mat6 phi = Mat6::Zero();
    phi(0, 0) = 4.0 - 3.0 * c;
    phi(0, 3) = s / n;
    phi(0, 4) = 2.0 * (1.0 - c) / n;
    phi(1, 0) = 6.0 * (s - nt);
    phi(1, 1) = 1.0;
    phi(1, 3) = 2.0 * (c - 1.0) / n;
    phi(1, 4) = (4.0 * s - 3.0 * nt) / n;
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

LvlhState propagate(const LvlhState& state, const ChiefOrbit& chief, double dt_s,
                    std::span<const Impulse> impulses) {
    const double t0 = state.epoch_s;
    const double t1 = t0 + dt_s;
    for (std::size_t i = 0; i < impulses.size(); ++i) {
        if (i > 0 && impulses[i].time_s < impulses[i - 1].time_s)
            throw UnsortedImpulses("propagate: impulses not sorted by time");
        if (impulses[i].time_s < t0 - 1e-12 || impulses[i].time_s > t1 + 1e-12)
            throw std::invalid_argument("propagate: impulse epoch outside propagation window");
    }

    Vec6 x = state.vec();
    double t = t0;
    for (const Impulse& burn : impulses) {
        const double seg = std::clamp(burn.time_s, t0, t1) - t;
        if (seg > 0.0) x = hcw_stm(chief, seg) * x;
        x.tail<3>() += burn.delta_v_mps;
        t += seg;
    }
    if (t1 - t > 0.0) x = hcw_stm(chief, t1 - t) * x;
    return LvlhState::from_vec(x, t1);
}

LvlhState params_to_state(const RelativeOrbitParams& p, const ChiefOrbit& chief,
                          double phase_time_s) {
    const double n = chief.mean_motion_rad_s();
    const double th = n * phase_time_s;

    LvlhState s;
    s.epoch_s = phase_time_s;
    s.position_m.x() = p.rho_x_m * std::sin(th + p.alpha_x_rad);
    s.position_m.y() = p.y_offset_m + p.rho_y_m * std::cos(th + p.alpha_y_rad);
    s.position_m.z() = p.rho_z_m * std::sin(th + p.alpha_z_rad);
    s.velocity_mps.x() = n * p.rho_x_m * std::cos(th + p.alpha_x_rad);
    s.velocity_mps.y() = -n * p.rho_y_m * std::sin(th + p.alpha_y_rad);
    s.velocity_mps.z() = n * p.rho_z_m * std::cos(th + p.alpha_z_rad);
    return s;
}

OrbitDecomposition decompose_state(const LvlhState& s, const ChiefOrbit& chief) {
    const double n = chief.mean_motion_rad_s();
    const double th = n * s.epoch_s;
    const double x = s.position_m.x();
    const double y = s.position_m.y();
    const double z = s.position_m.z();
    const double vx = s.velocity_mps.x();
    const double vy = s.velocity_mps.y();
    const double vz = s.velocity_mps.z();

    OrbitDecomposition d;
    d.radial_offset_m = 4.0 * x + 2.0 * vy / n;
    d.drift_rate_mps = -3.0 * (2.0 * n * x + vy);

    RelativeOrbitParams& p = d.params;
    const double sx = x - d.radial_offset_m;  // rho_x sin(th + alpha_x)
    const double cx = vx / n;                 // rho_x cos(th + alpha_x)
    p.rho_x_m = std::hypot(sx, cx);
    p.alpha_x_rad = p.rho_x_m > 0.0 ? wrap_angle(std::atan2(sx, cx) - th) : 0.0;
    p.rho_y_m = 2.0 * p.rho_x_m;
    p.alpha_y_rad = p.alpha_x_rad;
    p.y_offset_m = y - 2.0 * vx / n;

    const double sz = z;
    const double cz = vz / n;
    p.rho_z_m = std::hypot(sz, cz);
    p.alpha_z_rad = p.rho_z_m > 0.0 ? wrap_angle(std::atan2(sz, cz) - th) : 0.0;
    return d;
}

RelativeOrbitParams state_to_params(const LvlhState& s, const ChiefOrbit& chief) {
    return decompose_state(s, chief).params;
}

bool is_drift_free(const LvlhState& s, const ChiefOrbit& chief, double rel_tol) {
    const double n = chief.mean_motion_rad_s();
    const double x = s.position_m.x();
    const double resid = std::abs(s.velocity_mps.y() + 2.0 * n * x);
    return resid <= rel_tol * n * std::max(std::abs(x), 1.0);
}

static double drift_length_scale(const ChiefOrbit& chief, DriftScale scale) {
    return scale == DriftScale::SemiMajorAxis ? chief.semi_major_axis_m : chief.altitude_m();
}

double drift_rate(const RelativeOrbitParams& p, const ChiefOrbit& chief, DriftScale scale) {
    const double n = chief.mean_motion_rad_s();
    const double a = drift_length_scale(chief, scale);
    const double bracket = 2.0 * p.rho_x_m * p.rho_x_m + 2.0 * p.rho_y_m * p.rho_y_m +
                           p.rho_z_m * p.rho_z_m +
                           6.0 * p.rho_x_m * p.rho_y_m * std::cos(p.alpha_x_rad) +
                           3.0 * p.rho_x_m * p.rho_x_m * std::cos(2.0 * p.alpha_x_rad);
    return -(3.0 * n / (2.0 * a)) * bracket;
}

double drift_per_orbit_pco(double rho_m, double alpha_x_rad, const ChiefOrbit& chief,
                           DriftScale scale) {
    if (rho_m < 0.0) throw std::invalid_argument("drift_per_orbit_pco: rho must be nonnegative");
    const double a = drift_length_scale(chief, scale);
    return -(9.0 * M_PI * rho_m * rho_m / (2.0 * a)) * (2.0 + std::cos(2.0 * alpha_x_rad));
}

}  // namespace geoscan

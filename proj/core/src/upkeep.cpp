#include "geoscan/upkeep.hpp"

#include <algorithm>
#include <cmath>

namespace geoscan {

CorrectionScheme correction_scheme_from_name(const std::string& name) {
    if (name == "cancel_and_restore") return CorrectionScheme::CancelAndRestore;
    if (name == "rate_null") return CorrectionScheme::RateNull;
    throw std::invalid_argument("unknown correction scheme '" + name + "'");
}

std::string to_string(CorrectionScheme scheme) {
    return scheme == CorrectionScheme::CancelAndRestore ? "cancel_and_restore" : "rate_null";
}

double impulse_per_orbit(double rho_m, double alpha_x_rad, const ChiefOrbit& chief,
                         const UpkeepModel& model) {
    if (rho_m < 0.0) throw std::invalid_argument("impulse_per_orbit: rho must be nonnegative");
    if (model.corrections_per_orbit < 1)
        throw std::invalid_argument("impulse_per_orbit: corrections_per_orbit must be >= 1");

    const double period = chief.period_s();
    const int c = model.corrections_per_orbit;
    if (model.correction_scheme == CorrectionScheme::CancelAndRestore) {
        // Each correction nulls the displacement accumulated over T/c and
        // restores the slot. Per orbit: c * 2 m (|drift|/c) / (T/c).
        const double per_orbit_drift =
            std::abs(drift_per_orbit_pco(rho_m, alpha_x_rad, chief, model.drift_scale));
        return 2.0 * model.mass_kg * per_orbit_drift * c / period;
    }
    // RateNull: cancel the secular rate from the magnitude-phase drift formula
    // once per correction; the rate re-establishes itself between corrections.
    const RelativeOrbitParams pco = RelativeOrbitParams::pco(rho_m, alpha_x_rad);
    const double rate = std::abs(drift_rate(pco, chief, model.drift_scale));
    return model.mass_kg * rate * c;
}

double annual_budget(double rho_m, const ChiefOrbit& chief, const UpkeepModel& model,
                     double alpha_x_rad) {
    const double orbits_per_year = kSecondsPerYear / chief.period_s();
    return impulse_per_orbit(rho_m, alpha_x_rad, chief, model) * orbits_per_year;
}

double mission_lifetime(const PropulsionSpec& propulsion, double init_cost_Ns,
                        double annual_upkeep_Ns, double reconfig_fraction) {
    if (!(annual_upkeep_Ns > 0.0))
        throw NonpositiveUpkeep("mission_lifetime: annual upkeep must be positive");
    const double available = propulsion.total_impulse_Ns - init_cost_Ns -
                             reconfig_fraction * propulsion.total_impulse_Ns;
    return std::max(0.0, available / annual_upkeep_Ns);
}

BudgetReport make_budget_report(const PropulsionSpec& propulsion, double rho_m,
                                const ChiefOrbit& chief, const UpkeepModel& model,
                                double init_cost_Ns, double alpha_x_rad,
                                double reconfig_fraction) {
    BudgetReport report;
    report.propulsion_name = propulsion.name;
    report.total_impulse_Ns = propulsion.total_impulse_Ns;
    report.impulse_per_orbit_Ns = impulse_per_orbit(rho_m, alpha_x_rad, chief, model);
    report.impulse_per_year_Ns = annual_budget(rho_m, chief, model, alpha_x_rad);
    report.init_Ns = init_cost_Ns;
    report.reconfig_reserve_Ns = reconfig_fraction * propulsion.total_impulse_Ns;
    report.upkeep_Ns =
        std::max(0.0, propulsion.total_impulse_Ns - init_cost_Ns - report.reconfig_reserve_Ns);
    report.lifetime_years =
        mission_lifetime(propulsion, init_cost_Ns, report.impulse_per_year_Ns, reconfig_fraction);
    return report;
}

}  // namespace geoscan

#ifndef GEOSCAN_UPKEEP_HPP
#define GEOSCAN_UPKEEP_HPP

#include "geoscan/constellation.hpp"
#include "geoscan/relmotion.hpp"

#include <stdexcept>
#include <string>

namespace geoscan {

class NonpositiveUpkeep : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

enum class CorrectionScheme {
    /// Two burns per correction: null the accumulated along-track motion,
    /// then restore the slot. Cost 2 m |drift per orbit| / T per orbit.
    CancelAndRestore,
    /// Null the secular drift rate each correction: cost m |drift rate| per
    /// correction.
    RateNull,
};

CorrectionScheme correction_scheme_from_name(const std::string& name);
std::string to_string(CorrectionScheme scheme);

struct UpkeepModel {
    CorrectionScheme correction_scheme = CorrectionScheme::CancelAndRestore;
    int corrections_per_orbit = 1;
    double mass_kg = 10.0;
    DriftScale drift_scale = DriftScale::SemiMajorAxis;
};

struct BudgetReport {
    std::string propulsion_name;
    double total_impulse_Ns = 0.0;
    double impulse_per_orbit_Ns = 0.0;
    double impulse_per_year_Ns = 0.0;
    double lifetime_years = 0.0;
    double init_Ns = 0.0;
    double reconfig_reserve_Ns = 0.0;
    double upkeep_Ns = 0.0;  // impulse left for station keeping
};

/// Station-keeping impulse spent per orbit holding a wheel of radius rho.
double impulse_per_orbit(double rho_m, double alpha_x_rad, const ChiefOrbit& chief,
                         const UpkeepModel& model);

/// impulse_per_orbit x orbits per (365.25 d) year.
double annual_budget(double rho_m, const ChiefOrbit& chief, const UpkeepModel& model,
                     double alpha_x_rad = 0.0);

/**
 * Years of operation left after the initialization spend and a reconfiguration
 * reserve (default one third of the tank) are set aside. Floored at zero.
 */
double mission_lifetime(const PropulsionSpec& propulsion, double init_cost_Ns,
                        double annual_upkeep_Ns, double reconfig_fraction = 1.0 / 3.0);

BudgetReport make_budget_report(const PropulsionSpec& propulsion, double rho_m,
                                const ChiefOrbit& chief, const UpkeepModel& model,
                                double init_cost_Ns, double alpha_x_rad = 0.0,
                                double reconfig_fraction = 1.0 / 3.0);

}  // namespace geoscan

#endif  // GEOSCAN_UPKEEP_HPP

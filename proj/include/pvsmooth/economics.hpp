#pragma once

#include <stdexcept>
#include <string>

namespace pvsmooth {

class EconomicsError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct BatterySpec {
    std::string name = "NaS";
    double capital_power = 1000.0; // $/kW
    double capital_energy = 170.0; // $/kWh
    double om_power = 3.0;         // $/kW-yr
    double om_energy = 1.5;        // $/kWh-yr
    double salvage_power = 10.0;   // $/kW
    double salvage_energy = 1.7;   // $/kWh
    double lifetime_years = 6.0;
    double eff_power = 0.85;
    double eff_energy = 0.85;
    double soc_min_fraction = 0.10;

    void validate() const;
};

struct DieselSpec {
    double capital = 280.0;                  // $/kW
    double om = 80.0;                        // $/kW-yr
    double salvage = 28.0;                   // $/kW
    double lifetime_hours = 20000.0;
    double lifetime_years_effective = 4.5;
    double fuel_per_kwh = 0.5;               // L/kWh
    double fuel_price = 1.1;                 // $/L
    double emission_charge_total = 6000.0;   // $, lumped over the study
    double efficiency = 1.0;
    double annual_fuel_cap_liters = 50000.0; // L/yr

    void validate() const;
};

struct EconomicParams {
    double energy_price = 0.45;  // $/kWh
    double discount_rate = 0.05; // per year
    double horizon_years = 18.0;
    /// Run the O&M annuity over the whole study instead of one unit lifetime.
    bool om_full_horizon = false;

    void validate() const;
};

struct PresentWorthFactors {
    double beta = 0.0;  // $/kW, battery power
    double gamma = 0.0; // $/kWh, battery energy
    double sigma = 0.0; // $/kW, diesel power
    int n_battery = 0;
    int n_diesel = 0;
    double revenue_multiplier = 0.0;
};

/// Purchases over the study, counting the initial unit.
int replacement_count(double horizon_years, double lifetime_years);

/// Present worth of unit annual payments over `years` at rate `rate`.
/// Evaluated by its limit (= years) at rate 0.
double annuity_factor(double rate, double years);

/// Present worth per unit rating of a component bought every `lifetime`
/// years: discounted capital, the O&M annuity, minus discounted salvage.
double present_worth_per_rating(double capital, double om, double salvage, double lifetime,
                                const EconomicParams& econ);

double battery_power_pw(const BatterySpec& spec, const EconomicParams& econ);
double battery_energy_pw(const BatterySpec& spec, const EconomicParams& econ);
double diesel_power_pw(const DieselSpec& spec, const EconomicParams& econ);
double revenue_multiplier(const EconomicParams& econ);

PresentWorthFactors present_worth_factors(const BatterySpec& battery, const DieselSpec& diesel,
                                          const EconomicParams& econ);

} // namespace pvsmooth

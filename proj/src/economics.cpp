#include "pvsmooth/economics.hpp"

#include <algorithm>
#include <cmath>

namespace pvsmooth {

namespace {

void require(bool ok, const char* message) {
    if (!ok) throw EconomicsError(message);
}

bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }

} // namespace

void BatterySpec::validate() const {
    require(finite_nonneg(capital_power) && finite_nonneg(capital_energy) && finite_nonneg(om_power) &&
                finite_nonneg(om_energy) && finite_nonneg(salvage_power) && finite_nonneg(salvage_energy),
            "battery costs must be finite and non-negative");
    require(salvage_power <= capital_power, "battery.salvage_power must not exceed capital_power");
    require(salvage_energy <= capital_energy, "battery.salvage_energy must not exceed capital_energy");
    require(eff_power > 0.0 && eff_power <= 1.0, "battery.eff_power must lie in (0, 1]");
    require(eff_energy > 0.0 && eff_energy <= 1.0, "battery.eff_energy must lie in (0, 1]");
    require(soc_min_fraction >= 0.0 && soc_min_fraction < 1.0, "battery.soc_min_fraction must lie in [0, 1)");
    require(lifetime_years >= 1.0 && std::isfinite(lifetime_years), "battery.lifetime_years must be >= 1");
}

void DieselSpec::validate() const {
    require(finite_nonneg(capital) && finite_nonneg(om) && finite_nonneg(salvage) && finite_nonneg(fuel_price) &&
                finite_nonneg(emission_charge_total) && finite_nonneg(annual_fuel_cap_liters),
            "diesel costs must be finite and non-negative");
    require(salvage <= capital, "diesel.salvage must not exceed capital");
    require(fuel_per_kwh > 0.0 && std::isfinite(fuel_per_kwh), "diesel.fuel_per_kwh must be positive");
    require(efficiency > 0.0 && efficiency <= 1.0, "diesel.efficiency must lie in (0, 1]");
    require(lifetime_years_effective > 0.0 && std::isfinite(lifetime_years_effective),
            "diesel.lifetime_years_effective must be positive");
}

void EconomicParams::validate() const {
    require(finite_nonneg(energy_price), "econ.energy_price must be non-negative");
    require(finite_nonneg(discount_rate), "econ.discount_rate must be non-negative");
    require(horizon_years >= 1.0 && std::isfinite(horizon_years), "econ.horizon_years must be >= 1");
}

int replacement_count(double horizon_years, double lifetime_years) {
    require(horizon_years > 0.0 && lifetime_years > 0.0, "replacement_count: horizon and lifetime must be positive");
    // Guard against 18/6 landing a hair above 3.
    const double ratio = horizon_years / lifetime_years;
    const double nearest = std::round(ratio);
    if (std::abs(ratio - nearest) <= 1e-12 * std::max(1.0, nearest)) return static_cast<int>(nearest);
    return static_cast<int>(std::ceil(ratio));
}

double annuity_factor(double rate, double years) {
    if (rate == 0.0) return years;
    const double growth = std::pow(1.0 + rate, years);
    return (growth - 1.0) / (rate * growth);
}

double present_worth_per_rating(double capital, double om, double salvage, double lifetime,
                                const EconomicParams& econ) {
    const double s = econ.discount_rate;
    const int purchases = replacement_count(econ.horizon_years, lifetime);
    double purchase_discount = 0.0;
    double salvage_discount = 0.0;
    for (int i = 1; i <= purchases; ++i) {
        purchase_discount += std::pow(1.0 + s, -(i - 1) * lifetime);
        salvage_discount += std::pow(1.0 + s, -i * lifetime);
    }
    const double om_years = econ.om_full_horizon ? econ.horizon_years : lifetime;
    return capital * purchase_discount + om * annuity_factor(s, om_years) - salvage * salvage_discount;
}

double battery_power_pw(const BatterySpec& spec, const EconomicParams& econ) {
    return present_worth_per_rating(spec.capital_power, spec.om_power, spec.salvage_power, spec.lifetime_years, econ);
}

double battery_energy_pw(const BatterySpec& spec, const EconomicParams& econ) {
    return present_worth_per_rating(spec.capital_energy, spec.om_energy, spec.salvage_energy, spec.lifetime_years,
                                    econ);
}

double diesel_power_pw(const DieselSpec& spec, const EconomicParams& econ) {
    return present_worth_per_rating(spec.capital, spec.om, spec.salvage, spec.lifetime_years_effective, econ);
}

double revenue_multiplier(const EconomicParams& econ) {
    return annuity_factor(econ.discount_rate, econ.horizon_years);
}

PresentWorthFactors present_worth_factors(const BatterySpec& battery, const DieselSpec& diesel,
                                          const EconomicParams& econ) {
    PresentWorthFactors f;
    f.beta = battery_power_pw(battery, econ);
    f.gamma = battery_energy_pw(battery, econ);
    f.sigma = diesel_power_pw(diesel, econ);
    f.n_battery = replacement_count(econ.horizon_years, battery.lifetime_years);
    f.n_diesel = replacement_count(econ.horizon_years, diesel.lifetime_years_effective);
    f.revenue_multiplier = revenue_multiplier(econ);
    return f;
}

} // namespace pvsmooth

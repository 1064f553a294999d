#pragma once

#include "pvsmooth/validation.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace pvsmooth::test {

inline pvsmooth::PowerSeries series(std::vector<double> values, double step_hours = 1.0 / 6.0) {
    pvsmooth::PowerSeries pv;
    pv.step_hours = step_hours;
    pv.values = std::move(values);
    return pv;
}

inline pvsmooth::DispatchSpecs default_specs(double discount_rate = 0.05) {
    pvsmooth::DispatchSpecs s;
    s.econ.discount_rate = discount_rate;
    return s;
}

inline bool rel_close(double a, double b, double tol) {
    return std::abs(a - b) <= tol * std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

struct SpikeInstance {
    std::string name;
    pvsmooth::CaseId case_id;
    std::vector<double> p_pv;
    double radius_kw;
    double annualization;
    double discount_rate;
};

// Small spikes so a 2.5 kW grid over the box stays cheap. Values are kept off
// the 10 kW grid on purpose.
inline std::vector<SpikeInstance> spike_instances() {
    using pvsmooth::CaseId;
    std::vector<SpikeInstance> out;
    for (CaseId id : {CaseId::A, CaseId::B, CaseId::C, CaseId::D}) {
        const double r = id == CaseId::A ? 40.0 : id == CaseId::D ? 20.0 : 30.0;
        out.push_back({"up-spike", id, {4003.0, 4166.0, 4002.0}, r, 100.0, 0.05});
        out.push_back({"dip", id, {4002.0, 3839.0, 4001.0}, r, 100.0, 0.05});
        out.push_back({"climb", id, {3900.0, 4061.0, 4227.0}, r, 2000.0, 0.05});
    }
    return out;
}

} // namespace pvsmooth::test

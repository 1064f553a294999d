#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace pvsmooth {

class WeatherError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct WeatherSample {
    double irradiance = 0.0;   // W/m^2
    double ambient_temp = 0.0; // degC
};

struct WeatherOrigin {
    enum class Kind { MeasuredFile, Synthetic };
    Kind kind = Kind::Synthetic;
    std::uint64_t seed = 0;
    std::string path;
};

/// Fixed-step weather trace. `retained` marks samples that take part in the
/// optimization horizon; an empty mask means every sample is retained.
struct WeatherSeries {
    double step_hours = 1.0 / 6.0;
    std::vector<WeatherSample> samples;
    std::vector<bool> retained;
    WeatherOrigin origin;

    std::size_t size() const { return samples.size(); }
    bool is_retained(std::size_t i) const { return retained.empty() || retained[i]; }
    void validate() const;
};

struct PvPlantSpec {
    double rated_power = 10000.0;        // kW
    double inverter_efficiency = 0.9;
    double temp_coefficient = -0.004;    // 1/degC
    double noct = 45.0;                  // degC
    double reference_temp = 25.0;        // degC
    double reference_irradiance = 1000.0; // W/m^2

    void validate() const;
};

/// AC-side PV power, one value per weather sample. The retained mask is
/// carried over from the weather series.
struct PowerSeries {
    double step_hours = 1.0 / 6.0;
    std::vector<double> values;
    std::vector<bool> retained;

    std::size_t size() const { return values.size(); }
    bool is_retained(std::size_t i) const { return retained.empty() || retained[i]; }
};

/// The retained part of a power series, flattened into the optimization
/// horizon. `block_start[k]` is true when step k does not directly follow
/// step k-1 in the original sampling (first step, or after a dropped gap).
struct Horizon {
    double step_hours = 1.0 / 6.0;
    std::vector<std::size_t> sample_index;
    std::vector<double> p_pv;
    std::vector<bool> block_start;

    std::size_t size() const { return p_pv.size(); }
};

enum class WeatherFormat { Csv };

WeatherSeries load_weather(const std::filesystem::path& path, WeatherFormat format = WeatherFormat::Csv);
WeatherSeries parse_weather_csv(const std::string& text, const std::string& source_name = "<memory>");

struct SynthParams {
    double peak_irradiance = 1000.0;
    double sunrise_hour = 6.0;
    double sunset_hour = 18.0;
    double mean_temp = 12.0;
    double temp_swing = 6.0;
    double events_per_day = 14.0; // at variability 1
    int min_event_steps = 1;
    int max_event_steps = 6;
    double min_depth = 0.35;
    double max_depth = 0.85;
};

WeatherSeries synth_weather(int days, std::uint64_t seed, double variability,
                            double step_hours = 1.0 / 6.0, const SynthParams& params = {});

PowerSeries pv_power(const WeatherSeries& weather, const PvPlantSpec& plant);

/// Single-sample evaluation of the plant model.
double pv_power_at(const WeatherSample& sample, const PvPlantSpec& plant);

WeatherSeries filter_low_irradiance(const WeatherSeries& weather, double threshold = 2.0);

Horizon make_horizon(const PowerSeries& pv);

std::string power_series_csv(const PowerSeries& series);

} // namespace pvsmooth

#include "pvsmooth/timeseries_pv.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

namespace pvsmooth {

namespace {

std::string trim(std::string_view s) {
    auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string_view::npos) return {};
    auto end = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(begin, end - begin + 1));
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) out.push_back(trim(field));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

// Days since 1970-01-01 for a proleptic Gregorian date.
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

bool parse_int(std::string_view s, int& out) {
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

// Seconds since epoch for "YYYY-MM-DDTHH:MM[:SS][Z]" (a space may replace T).
bool parse_iso8601(const std::string& text, double& seconds) {
    std::string s = text;
    if (!s.empty() && (s.back() == 'Z' || s.back() == 'z')) s.pop_back();
    if (s.size() < 16 || s[4] != '-' || s[7] != '-' || (s[10] != 'T' && s[10] != ' ') || s[13] != ':')
        return false;
    int y, mo, d, h, mi, sec = 0;
    std::string_view v(s);
    if (!parse_int(v.substr(0, 4), y) || !parse_int(v.substr(5, 2), mo) || !parse_int(v.substr(8, 2), d) ||
        !parse_int(v.substr(11, 2), h) || !parse_int(v.substr(14, 2), mi))
        return false;
    if (s.size() > 16) {
        if (s.size() != 19 || s[16] != ':' || !parse_int(v.substr(17, 2), sec)) return false;
    }
    if (mo < 1 || mo > 12 || d < 1 || d > 31 || h > 23 || mi > 59 || sec > 60) return false;
    seconds = static_cast<double>(days_from_civil(y, static_cast<unsigned>(mo), static_cast<unsigned>(d))) * 86400.0 +
              h * 3600.0 + mi * 60.0 + sec;
    return true;
}

bool parse_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

// Uniform [0,1) from the raw mt19937_64 stream; std distributions are not
// bit-portable across standard libraries.
double unit_uniform(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

} // namespace

void WeatherSeries::validate() const {
    if (!(step_hours > 0.0) || !std::isfinite(step_hours)) throw WeatherError("weather step must be positive");
    if (samples.size() < 2) throw WeatherError("weather series needs at least 2 samples");
    if (!retained.empty() && retained.size() != samples.size())
        throw WeatherError("retained mask length does not match sample count");
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto& s = samples[i];
        if (!std::isfinite(s.irradiance) || s.irradiance < 0.0)
            throw WeatherError("sample " + std::to_string(i) + ": irradiance must be finite and non-negative");
        if (!std::isfinite(s.ambient_temp))
            throw WeatherError("sample " + std::to_string(i) + ": temperature must be finite");
    }
}

void PvPlantSpec::validate() const {
    if (!(rated_power > 0.0)) throw WeatherError("plant.rated_power must be positive");
    if (!(inverter_efficiency > 0.0 && inverter_efficiency <= 1.0))
        throw WeatherError("plant.inverter_efficiency must lie in (0, 1]");
    if (!(reference_irradiance > 0.0)) throw WeatherError("plant.reference_irradiance must be positive");
}

WeatherSeries parse_weather_csv(const std::string& text, const std::string& source_name) {
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;

    std::array<int, 3> col{-1, -1, -1};
    static const std::array<const char*, 3> kNames{"timestamp", "irradiance_wm2", "temp_c"};
    std::size_t n_cols = 0;
    bool have_header = false;

    std::vector<double> times;
    WeatherSeries series;
    series.origin.kind = WeatherOrigin::Kind::MeasuredFile;
    series.origin.path = source_name;

    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto fields = split_csv_line(line);
        if (!have_header) {
            if (line_no == 1 && fields.size() > 0 && fields[0].rfind("\xEF\xBB\xBF", 0) == 0)
                fields[0].erase(0, 3);
            for (std::size_t i = 0; i < fields.size(); ++i)
                for (std::size_t k = 0; k < kNames.size(); ++k)
                    if (fields[i] == kNames[k]) col[k] = static_cast<int>(i);
            for (std::size_t k = 0; k < kNames.size(); ++k)
                if (col[k] < 0)
                    throw WeatherError(source_name + ": header missing column '" + kNames[k] + "'");
            n_cols = fields.size();
            have_header = true;
            continue;
        }
        const std::string where = source_name + ": row " + std::to_string(line_no);
        if (fields.size() < n_cols)
            throw WeatherError(where + ": expected " + std::to_string(n_cols) + " fields, got " +
                               std::to_string(fields.size()));
        double t = 0.0;
        if (!parse_iso8601(fields[col[0]], t))
            throw WeatherError(where + ", column timestamp: cannot parse '" + fields[col[0]] + "'");
        WeatherSample s;
        if (!parse_double(fields[col[1]], s.irradiance))
            throw WeatherError(where + ", column irradiance_wm2: cannot parse '" + fields[col[1]] + "'");
        if (!parse_double(fields[col[2]], s.ambient_temp))
            throw WeatherError(where + ", column temp_c: cannot parse '" + fields[col[2]] + "'");
        if (!std::isfinite(s.irradiance) || s.irradiance < 0.0)
            throw WeatherError(where + ", column irradiance_wm2: must be finite and non-negative");
        times.push_back(t);
        series.samples.push_back(s);
    }

    if (!have_header) throw WeatherError(source_name + ": empty file");
    if (series.samples.size() < 2)
        throw WeatherError(source_name + ": need at least 2 data rows, got " + std::to_string(series.samples.size()));

    const double step_s = times[1] - times[0];
    if (!(step_s > 0.0)) throw WeatherError(source_name + ": timestamps must be strictly increasing");
    for (std::size_t i = 2; i < times.size(); ++i) {
        const double gap = times[i] - times[i - 1];
        if (std::abs(gap - step_s) > 0.5)
            throw WeatherError(source_name + ": non-uniform step between data rows " + std::to_string(i) + " and " +
                               std::to_string(i + 1) + " (" + std::to_string(gap / 60.0) + " min, expected " +
                               std::to_string(step_s / 60.0) + " min)");
    }
    series.step_hours = step_s / 3600.0;
    series.validate();
    return series;
}

WeatherSeries load_weather(const std::filesystem::path& path, WeatherFormat format) {
    if (format != WeatherFormat::Csv) throw WeatherError("unsupported weather format");
    std::ifstream f(path, std::ios::binary);
    if (!f) throw WeatherError("cannot open weather file " + path.string());
    std::ostringstream buf;
    buf << f.rdbuf();
    return parse_weather_csv(buf.str(), path.string());
}

WeatherSeries synth_weather(int days, std::uint64_t seed, double variability, double step_hours,
                            const SynthParams& params) {
    if (days < 1) throw WeatherError("synth_weather: days must be >= 1");
    if (!(variability >= 0.0 && variability <= 1.0)) throw WeatherError("synth_weather: variability must be in [0,1]");
    if (!(step_hours > 0.0)) throw WeatherError("synth_weather: step must be positive");

    const auto per_day = static_cast<std::size_t>(std::llround(24.0 / step_hours));
    const double day_length = params.sunset_hour - params.sunrise_hour;
    const std::size_t n = per_day * static_cast<std::size_t>(days);

    WeatherSeries series;
    series.step_hours = step_hours;
    series.origin = {WeatherOrigin::Kind::Synthetic, seed, {}};
    series.samples.resize(n);

    std::vector<double> attenuation(n, 1.0);
    std::mt19937_64 rng(seed);
    for (int d = 0; d < days; ++d) {
        // Draws happen even at zero variability so the stream layout is seed-stable.
        const double expected = params.events_per_day * variability;
        const int events = static_cast<int>(std::floor(expected + unit_uniform(rng)));
        for (int e = 0; e < events; ++e) {
            const double start_hour = params.sunrise_hour + unit_uniform(rng) * day_length;
            const int span = params.min_event_steps +
                             static_cast<int>(unit_uniform(rng) * (params.max_event_steps - params.min_event_steps + 1));
            const double depth = params.min_depth + unit_uniform(rng) * (params.max_depth - params.min_depth);
            const auto first = static_cast<std::size_t>(d) * per_day +
                               static_cast<std::size_t>(std::floor(start_hour / step_hours));
            for (int k = 0; k < span && first + k < n; ++k) attenuation[first + k] *= 1.0 - depth;
        }
    }

    for (std::size_t i = 0; i < n; ++i) {
        const double hour = static_cast<double>(i % per_day) * step_hours;
        double clear = 0.0;
        if (hour > params.sunrise_hour && hour < params.sunset_hour)
            clear = params.peak_irradiance * std::sin(std::numbers::pi * (hour - params.sunrise_hour) / day_length);
        series.samples[i].irradiance = std::max(0.0, clear * attenuation[i]);
        // Warmest mid-afternoon.
        series.samples[i].ambient_temp =
            params.mean_temp + params.temp_swing * std::sin(2.0 * std::numbers::pi * (hour - 9.0) / 24.0);
    }
    return series;
}

double pv_power_at(const WeatherSample& sample, const PvPlantSpec& plant) {
    const double cell_temp = sample.ambient_temp + sample.irradiance * (plant.noct - 20.0) / 800.0;
    const double dc = plant.rated_power * (sample.irradiance / plant.reference_irradiance) *
                      (1.0 + plant.temp_coefficient * (cell_temp - plant.reference_temp));
    return std::clamp(dc, 0.0, plant.rated_power) * plant.inverter_efficiency;
}

PowerSeries pv_power(const WeatherSeries& weather, const PvPlantSpec& plant) {
    weather.validate();
    plant.validate();
    PowerSeries out;
    out.step_hours = weather.step_hours;
    out.retained = weather.retained;
    out.values.reserve(weather.size());
    for (const auto& s : weather.samples) out.values.push_back(pv_power_at(s, plant));
    return out;
}

WeatherSeries filter_low_irradiance(const WeatherSeries& weather, double threshold) {
    if (!(threshold >= 0.0)) throw WeatherError("filter threshold must be >= 0");
    WeatherSeries out = weather;
    out.retained.assign(weather.size(), true);
    for (std::size_t i = 0; i < weather.size(); ++i)
        out.retained[i] = weather.is_retained(i) && !(weather.samples[i].irradiance < threshold);
    return out;
}

Horizon make_horizon(const PowerSeries& pv) {
    Horizon h;
    h.step_hours = pv.step_hours;
    bool previous_kept = false;
    for (std::size_t i = 0; i < pv.size(); ++i) {
        if (!pv.is_retained(i)) {
            previous_kept = false;
            continue;
        }
        h.sample_index.push_back(i);
        h.p_pv.push_back(pv.values[i]);
        h.block_start.push_back(!previous_kept);
        previous_kept = true;
    }
    return h;
}

std::string power_series_csv(const PowerSeries& series) {
    std::ostringstream out;
    out.precision(17);
    out << "step_index,p_kw\n";
    for (std::size_t i = 0; i < series.size(); ++i) out << i << ',' << series.values[i] << '\n';
    return out.str();
}

} // namespace pvsmooth

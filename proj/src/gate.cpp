#include "agri/gate.hpp"

#include <cmath>

#include <json.hpp>

namespace agri::gate {

using sensornet::SensorKind;
using telemetry::Stat;

const char* blocker_name(Blocker b) {
    switch (b) {
        case Blocker::Rain: return "rain";
        case Blocker::HighWind: return "high_wind";
        case Blocker::MissingData: return "missing_data";
    }
    return "?";
}

const char* warning_name(Warning w) {
    switch (w) {
        case Warning::CloudLowLight: return "cloud_low_light";
        case Warning::LowSunAngle: return "low_sun_angle";
    }
    return "?";
}

namespace {
constexpr double kDegToRad = M_PI / 180.0;
constexpr double kRadToDeg = 180.0 / M_PI;
}  // namespace

double sun_elevation(UnixTime t, const geo::GeoPoint& where) {
    where.validate();
    // NOAA solar position equations (Meeus). Accurate to well under 0.1 deg
    // for 1900-2100, plenty for a 45-degree gate threshold.
    const double jd = t / 86400.0 + 2440587.5;
    const double jc = (jd - 2451545.0) / 36525.0;
    const double gmls = std::fmod(280.46646 + jc * (36000.76983 + jc * 0.0003032), 360.0);
    const double gmas = 357.52911 + jc * (35999.05029 - 0.0001537 * jc);
    const double ecc = 0.016708634 - jc * (0.000042037 + 0.0000001267 * jc);
    const double ctr =
        std::sin(gmas * kDegToRad) * (1.914602 - jc * (0.004817 + 0.000014 * jc)) +
        std::sin(2.0 * gmas * kDegToRad) * (0.019993 - 0.000101 * jc) +
        std::sin(3.0 * gmas * kDegToRad) * 0.000289;
    const double stl = gmls + ctr;
    const double omega = 125.04 - 1934.136 * jc;
    const double sal = stl - 0.00569 - 0.00478 * std::sin(omega * kDegToRad);
    const double moe =
        23.0 + (26.0 + (21.448 - jc * (46.815 + jc * (0.00059 - jc * 0.001813))) / 60.0) / 60.0;
    const double oc = moe + 0.00256 * std::cos(omega * kDegToRad);
    const double decl = std::asin(std::sin(oc * kDegToRad) * std::sin(sal * kDegToRad));
    const double vary = std::tan(oc * 0.5 * kDegToRad) * std::tan(oc * 0.5 * kDegToRad);
    const double eot_min =
        4.0 * kRadToDeg *
        (vary * std::sin(2.0 * gmls * kDegToRad) - 2.0 * ecc * std::sin(gmas * kDegToRad) +
         4.0 * ecc * vary * std::sin(gmas * kDegToRad) * std::cos(2.0 * gmls * kDegToRad) -
         0.5 * vary * vary * std::sin(4.0 * gmls * kDegToRad) -
         1.25 * ecc * ecc * std::sin(2.0 * gmas * kDegToRad));
    const double minutes_utc = std::fmod(t, 86400.0) / 60.0;
    double tst = std::fmod(minutes_utc + eot_min + 4.0 * where.lon + 1440.0 * 4.0, 1440.0);
    double ha = tst / 4.0 - 180.0;
    if (ha < -180.0) ha += 360.0;
    const double lat = where.lat * kDegToRad;
    const double cos_zen = std::sin(lat) * std::sin(decl) +
                           std::cos(lat) * std::cos(decl) * std::cos(ha * kDegToRad);
    return 90.0 - std::acos(std::clamp(cos_zen, -1.0, 1.0)) * kRadToDeg;
}

Readiness evaluate(const std::vector<telemetry::TelemetryRecord>& log, UnixTime t,
                   const geo::GeoPoint& site, const GateConfig& cfg) {
    Readiness r;
    auto mean_wind = telemetry::window_stat(log, SensorKind::WindSpeed, t, cfg.wind_window_s,
                                            Stat::Mean);
    auto max_rain =
        telemetry::window_stat(log, SensorKind::Rain, t, cfg.wind_window_s, Stat::Max);
    auto mean_light = telemetry::window_stat(log, SensorKind::LightVisible, t,
                                             cfg.wind_window_s, Stat::Mean);

    r.inputs.sun_elevation_deg = sun_elevation(t, site);
    r.inputs.mean_wind_mps = mean_wind.value_or(std::nan(""));
    r.inputs.visible_klx = mean_light.value_or(std::nan(""));
    r.inputs.raining = max_rain.has_value() && *max_rain > cfg.rain_threshold_mmh;

    // The two hard-block inputs are required; flying blind is a no-go.
    if (!mean_wind || !max_rain) {
        r.blockers.push_back(Blocker::MissingData);
    } else {
        if (r.inputs.raining) r.blockers.push_back(Blocker::Rain);
        if (*mean_wind > cfg.wind_nogo_mps) r.blockers.push_back(Blocker::HighWind);
    }
    r.go = r.blockers.empty();

    if (r.inputs.sun_elevation_deg < cfg.sun_warn_deg)
        r.warnings.push_back(Warning::LowSunAngle);
    if (mean_light) {
        double clear_sky =
            std::max(cfg.clear_sky_klx *
                         std::sin(std::max(r.inputs.sun_elevation_deg, 0.0) * kDegToRad),
                     cfg.clear_sky_floor_klx);
        if (*mean_light < cfg.cloud_fraction * clear_sky)
            r.warnings.push_back(Warning::CloudLowLight);
    }

    r.optimize_for_wind = r.go && mean_wind && *mean_wind >= cfg.wind_optimize_lo_mps &&
                          *mean_wind <= cfg.wind_optimize_hi_mps;
    return r;
}

std::string readiness_to_json(const Readiness& r) {
    nlohmann::json blockers = nlohmann::json::array();
    for (Blocker b : r.blockers) blockers.push_back(blocker_name(b));
    nlohmann::json warnings = nlohmann::json::array();
    for (Warning w : r.warnings) warnings.push_back(warning_name(w));
    auto num_or_null = [](double v) {
        return std::isnan(v) ? nlohmann::json() : nlohmann::json(v);
    };
    nlohmann::json doc{{"decision", r.go ? "go" : "no_go"},
                       {"blockers", blockers},
                       {"warnings", warnings},
                       {"optimize_for_wind", r.optimize_for_wind},
                       {"inputs",
                        {{"mean_wind_mps", num_or_null(r.inputs.mean_wind_mps)},
                         {"raining", r.inputs.raining},
                         {"sun_elevation_deg", r.inputs.sun_elevation_deg},
                         {"visible_klx", num_or_null(r.inputs.visible_klx)}}}};
    return doc.dump(2);
}

}  // namespace agri::gate

#pragma once

#include <string>
#include <vector>

#include "agri/geo.hpp"
#include "agri/telemetry.hpp"
#include "agri/time_util.hpp"

namespace agri::gate {

enum class Blocker { Rain, HighWind, MissingData };
enum class Warning { CloudLowLight, LowSunAngle };

const char* blocker_name(Blocker b);
const char* warning_name(Warning w);

struct InputsSnapshot {
    double mean_wind_mps = 0.0;
    bool raining = false;
    double sun_elevation_deg = 0.0;
    double visible_klx = 0.0;    // NaN when no light telemetry in window
};

struct Readiness {
    bool go = false;
    std::vector<Blocker> blockers;
    std::vector<Warning> warnings;
    bool optimize_for_wind = false;
    InputsSnapshot inputs;
};

struct GateConfig {
    double wind_window_s = 600.0;     // averaging window for the mean-wind rule
    double wind_nogo_mps = 10.0;      // block when mean wind strictly above
    double wind_optimize_lo_mps = 3.0;
    double wind_optimize_hi_mps = 10.0;
    double rain_threshold_mmh = 0.1;  // drizzle vs sensor noise
    double sun_warn_deg = 45.0;       // warn when strictly below
    double cloud_fraction = 0.4;      // of clear-sky expectation
    double clear_sky_klx = 130.0;
    double clear_sky_floor_klx = 5.0;
};

/// Geometric solar elevation in degrees (NOAA solar-position equations,
/// no refraction correction).
double sun_elevation(UnixTime t, const geo::GeoPoint& where);

/// Preflight decision over the telemetry window ending at `t`:
///  - block on rain or mean wind above the limit; missing wind/rain data is
///    a fail-safe block
///  - warn on low sun or cloud-dimmed light
///  - request wind-aligned planning for mean wind in [3, 10] m/s
Readiness evaluate(const std::vector<telemetry::TelemetryRecord>& log, UnixTime t,
                   const geo::GeoPoint& site, const GateConfig& cfg = {});

std::string readiness_to_json(const Readiness& r);

}  // namespace agri::gate

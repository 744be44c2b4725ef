#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "agri/geo.hpp"
#include "agri/planner.hpp"
#include "agri/sensornet.hpp"

namespace agri::flightsim {

enum class AbortReason { LowBattery, WindExceeded, Infeasible };

const char* abort_reason_name(AbortReason r);

struct Heartbeat {
    double t;
};
struct Position {
    double t;
    geo::GeoPoint geo;
    Vec2 local_xy;
    double alt_m;
};
struct Battery {
    double t;
    double remaining_wh;
    double voltage;
};
struct MissionItemReached {
    double t;
    int seq;
};
struct CameraTrigger {
    double t;
    int capture_id;
    Vec2 position;
};
struct MissionComplete {
    double t;
};
struct Abort {
    double t;
    AbortReason reason;
};

using FlightLinkMessage = std::variant<Heartbeat, Position, Battery, MissionItemReached,
                                       CameraTrigger, MissionComplete, Abort>;

enum class UavStatus { Idle, Enroute, Capturing, ReturnToLaunch, Landed, Aborted };

struct UavState {
    Vec2 position;
    double altitude_m = 0.0;
    double airspeed_mps = 5.0;   // paper airframe tops out at 36 km/h = 10 m/s
    double battery_wh = 78.0;
    double mass_kg = 2.5;
    UavStatus status = UavStatus::Idle;
};

struct FlightConfig {
    double dt_s = 0.1;                // integration step, (0, 1]
    double airspeed_mps = 5.0;
    double reserve_fraction = 0.2;    // return-to-launch threshold
    double wind_abort_mps = 10.0;     // instantaneous gust limit, gate rule in flight
    double telemetry_period_s = 1.0;  // heartbeat/position/battery cadence
};

struct FlightResult {
    std::vector<FlightLinkMessage> messages;
    std::vector<CameraTrigger> captures;
    bool completed = false;
    std::optional<AbortReason> abort_reason;
    double flight_time_s = 0.0;
    double energy_used_wh = 0.0;
    UavState final_state;
};

/// Deterministic point-mass execution of a mission plan. Ground velocity is
/// air velocity plus the wind vector; the battery drains with the planner's
/// energy model so the two agree up to integration error. Instantaneous
/// wind comes from the environment script when it carries a wind series,
/// else from `wind`.
FlightResult fly(const planner::MissionPlan& plan, const planner::Wind& wind,
                 const sensornet::EnvironmentScript& env, double battery_wh,
                 const planner::EnergyModel& energy, const FlightConfig& cfg,
                 const geo::LocalFrame& frame);

std::string message_to_json(const FlightLinkMessage& msg);
std::string flight_log_ndjson(const std::vector<FlightLinkMessage>& messages);

}  // namespace agri::flightsim

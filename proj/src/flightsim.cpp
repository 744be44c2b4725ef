#include "agri/flightsim.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

namespace agri::flightsim {

using planner::Action;
using planner::Wind;

const char* abort_reason_name(AbortReason r) {
    switch (r) {
        case AbortReason::LowBattery: return "low_battery";
        case AbortReason::WindExceeded: return "wind_exceeded";
        case AbortReason::Infeasible: return "infeasible";
    }
    return "?";
}

namespace {

constexpr double kEps = 1e-9;

class FlightDriver {
public:
    FlightDriver(const Wind& wind, const sensornet::EnvironmentScript& env,
                 double battery_wh, const planner::EnergyModel& energy,
                 const FlightConfig& cfg, const geo::LocalFrame& frame)
        : wind_(wind),
          env_(env),
          energy_(energy),
          cfg_(cfg),
          frame_(frame),
          initial_battery_(battery_wh) {
        state_.battery_wh = battery_wh;
        state_.airspeed_mps = cfg.airspeed_mps;
        battery_floor_wh_ = cfg.reserve_fraction * battery_wh;
    }

    UavState state_;
    std::vector<FlightLinkMessage> messages_;
    std::vector<CameraTrigger> captures_;
    std::optional<AbortReason> abort_;
    double t_ = 0.0;

    /// Failsafe return: gust aborts off, battery usable down to zero.
    void enter_rtl_mode() {
        rtl_mode_ = true;
        battery_floor_wh_ = 0.0;
    }

    Wind wind_now() const {
        Wind w = wind_;
        if (env_.has(sensornet::SensorKind::WindSpeed))
            w.speed_mps = env_.sample(sensornet::SensorKind::WindSpeed, t_);
        if (env_.has(sensornet::SensorKind::WindDirection))
            w.dir_deg = env_.sample(sensornet::SensorKind::WindDirection, t_);
        return w;
    }

    void emit_telemetry() {
        while (t_ + kEps >= next_telemetry_) {
            messages_.push_back(Heartbeat{next_telemetry_});
            messages_.push_back(Position{next_telemetry_,
                                         frame_.from_local(state_.position, state_.altitude_m),
                                         state_.position, state_.altitude_m});
            double soc = initial_battery_ > 0.0 ? state_.battery_wh / initial_battery_ : 0.0;
            messages_.push_back(Battery{next_telemetry_, state_.battery_wh, 13.5 + 3.0 * soc});
            next_telemetry_ += cfg_.telemetry_period_s;
        }
    }

    bool drain(double power_w, double dt) {
        state_.battery_wh = std::max(0.0, state_.battery_wh - power_w * dt / 3600.0);
        return state_.battery_wh > battery_floor_wh_ + kEps;
    }

    /// Hover in place for `duration` (turn pauses). Returns false on abort.
    bool hover(double duration) {
        double left = duration;
        while (left > kEps) {
            double dt = std::min(cfg_.dt_s, left);
            t_ += dt;
            left -= dt;
            if (!drain(energy_.hover_power_w(), dt)) {
                abort_ = AbortReason::LowBattery;
                return false;
            }
            emit_telemetry();
        }
        return true;
    }

    /// Straight-line flight to `target`. Returns false on abort.
    bool fly_to(const Vec2& target) {
        double remaining = distance(state_.position, target);
        if (remaining <= kEps) return true;
        Vec2 track = (target - state_.position).unit();
        while (remaining > kEps) {
            Wind w = wind_now();
            if (!rtl_mode_ && w.speed_mps > cfg_.wind_abort_mps) {
                abort_ = AbortReason::WindExceeded;
                return false;
            }
            Vec2 flow = w.flow_unit() * w.speed_mps;
            double ground = cfg_.airspeed_mps + flow.dot(track);
            if (ground <= kEps) {
                abort_ = AbortReason::Infeasible;
                return false;
            }
            double dt = std::min(cfg_.dt_s, remaining / ground);
            state_.position = state_.position + track * (ground * dt);
            remaining -= ground * dt;
            t_ += dt;
            double headwind = -flow.dot(track);
            if (!drain(energy_.cruise_power_w(headwind, cfg_.airspeed_mps), dt)) {
                abort_ = AbortReason::LowBattery;
                return false;
            }
            emit_telemetry();
        }
        state_.position = target;  // snap away the last sub-millimeter
        return true;
    }

private:
    Wind wind_;
    const sensornet::EnvironmentScript& env_;
    planner::EnergyModel energy_;
    FlightConfig cfg_;
    const geo::LocalFrame& frame_;
    double initial_battery_;
    double battery_floor_wh_ = 0.0;
    double next_telemetry_ = 0.0;
    bool rtl_mode_ = false;
};

}  // namespace

FlightResult fly(const planner::MissionPlan& plan, const Wind& wind,
                 const sensornet::EnvironmentScript& env, double battery_wh,
                 const planner::EnergyModel& energy, const FlightConfig& cfg,
                 const geo::LocalFrame& frame) {
    if (cfg.dt_s <= 0.0 || cfg.dt_s > 1.0) throw ValidationError("dt must be in (0, 1] s");
    if (plan.waypoints.empty()) throw ValidationError("cannot fly an empty plan");

    FlightDriver drv(wind, env, battery_wh, energy, cfg, frame);
    drv.state_.position = plan.waypoints.front().position;
    drv.state_.altitude_m = plan.altitude_m;
    drv.state_.status = UavStatus::Enroute;
    const Vec2 launch = drv.state_.position;

    const double cos_thresh = std::cos(energy.turn_threshold_deg * M_PI / 180.0);
    Vec2 prev_track{0.0, 0.0};
    bool have_prev = false;
    int capture_id = 0;
    bool ok = true;

    drv.emit_telemetry();
    for (size_t i = 0; i < plan.waypoints.size() && ok; ++i) {
        const planner::Waypoint& wp = plan.waypoints[i];
        if (i > 0) {
            Vec2 delta = wp.position - plan.waypoints[i - 1].position;
            if (delta.norm() > kEps) {
                Vec2 track = delta.unit();
                if (have_prev && track.dot(prev_track) < cos_thresh)
                    ok = drv.hover(energy.turn_time_s);
                prev_track = track;
                have_prev = true;
            }
            if (ok) ok = drv.fly_to(wp.position);
        }
        if (!ok) break;
        drv.messages_.push_back(MissionItemReached{drv.t_, static_cast<int>(i)});
        if (wp.action == Action::TriggerCapture) {
            CameraTrigger trig{drv.t_, capture_id++, drv.state_.position};
            drv.messages_.push_back(trig);
            drv.captures_.push_back(trig);
        }
    }

    FlightResult result;
    if (ok) {
        drv.messages_.push_back(MissionComplete{drv.t_});
        drv.state_.status = UavStatus::Landed;
        result.completed = true;
    } else {
        drv.messages_.push_back(Abort{drv.t_, *drv.abort_});
        result.abort_reason = drv.abort_;
        drv.state_.status = UavStatus::ReturnToLaunch;
        drv.enter_rtl_mode();
        // battery exhaustion before reaching home downgrades to Aborted
        drv.state_.status = drv.fly_to(launch) ? UavStatus::Landed : UavStatus::Aborted;
    }
    result.messages = std::move(drv.messages_);
    result.captures = std::move(drv.captures_);
    result.flight_time_s = drv.t_;
    result.energy_used_wh = battery_wh - drv.state_.battery_wh;
    result.final_state = drv.state_;
    return result;
}

namespace {
nlohmann::json position_json(const Vec2& p) { return {p.x, p.y}; }
}  // namespace

std::string message_to_json(const FlightLinkMessage& msg) {
    nlohmann::json doc;
    std::visit(
        [&doc](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, Heartbeat>) {
                doc = {{"type", "heartbeat"}, {"t", m.t}};
            } else if constexpr (std::is_same_v<T, Position>) {
                doc = {{"type", "position"},
                       {"t", m.t},
                       {"lat", m.geo.lat},
                       {"lon", m.geo.lon},
                       {"local_xy", position_json(m.local_xy)},
                       {"alt_m", m.alt_m}};
            } else if constexpr (std::is_same_v<T, Battery>) {
                doc = {{"type", "battery"},
                       {"t", m.t},
                       {"remaining_wh", m.remaining_wh},
                       {"voltage", m.voltage}};
            } else if constexpr (std::is_same_v<T, MissionItemReached>) {
                doc = {{"type", "mission_item_reached"}, {"t", m.t}, {"seq", m.seq}};
            } else if constexpr (std::is_same_v<T, CameraTrigger>) {
                doc = {{"type", "camera_trigger"},
                       {"t", m.t},
                       {"capture_id", m.capture_id},
                       {"position", position_json(m.position)}};
            } else if constexpr (std::is_same_v<T, MissionComplete>) {
                doc = {{"type", "mission_complete"}, {"t", m.t}};
            } else {
                doc = {{"type", "abort"}, {"t", m.t}, {"reason", abort_reason_name(m.reason)}};
            }
        },
        msg);
    return doc.dump();
}

std::string flight_log_ndjson(const std::vector<FlightLinkMessage>& messages) {
    std::ostringstream out;
    for (const auto& m : messages) out << message_to_json(m) << '\n';
    return out.str();
}

}  // namespace agri::flightsim

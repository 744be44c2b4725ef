#include "agri/planner.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

namespace agri::planner {

namespace {
constexpr double kDegToRad = M_PI / 180.0;
constexpr double kGeomEps = 1e-9;
}  // namespace

Vec2 Wind::flow_unit() const {
    double rad = dir_deg * kDegToRad;
    // dir is where the wind comes from; the air moves the opposite way
    return {-std::sin(rad), -std::cos(rad)};
}

void SweepBasis::validate() const {
    if (std::abs(i_hat.norm() - 1.0) > 1e-9 || std::abs(j_hat.norm() - 1.0) > 1e-9)
        throw ValidationError("sweep basis vectors must be unit length");
    if (std::abs(i_hat.dot(j_hat)) > 1e-9)
        throw ValidationError("sweep basis vectors must be orthogonal");
    if (leg_spacing_m <= 0.0 || trigger_spacing_m <= 0.0)
        throw ValidationError("sweep spacings must be positive");
}

SweepBasis sweep_basis(double wind_dir_deg, const geo::CameraModel& camera,
                       double altitude_m, double sidelap, double frontlap,
                       CameraOrientation orientation) {
    if (sidelap < 0.0 || sidelap >= 1.0 || frontlap < 0.0 || frontlap >= 1.0)
        throw ValidationError("overlaps must be in [0, 1)");
    geo::Footprint fp = geo::footprint(camera, altitude_m);
    double along_track = fp.width;   // hfov extent flies along the leg
    double across_track = fp.height;
    if (orientation == CameraOrientation::LongAxisAcrossTrack) std::swap(along_track, across_track);
    if (along_track <= 0.0 || across_track <= 0.0)
        throw ValidationError("degenerate camera footprint");
    SweepBasis basis;
    basis.j_hat = Wind{1.0, wind_dir_deg}.flow_unit();
    basis.i_hat = basis.j_hat.perp();
    basis.leg_spacing_m = across_track * (1.0 - sidelap);
    basis.trigger_spacing_m = along_track * (1.0 - frontlap);
    basis.validate();
    return basis;
}

std::vector<std::pair<double, double>> clip_line_to_polygon(const geo::FieldPolygon& poly,
                                                            const Vec2& point,
                                                            const Vec2& dir) {
    const Vec2 u = dir.unit();
    const Vec2 n = u.perp();
    const double line_offset = point.dot(n);
    // breakpoints: crossings and collinear-edge endpoints, as parameters
    // along u
    std::vector<double> breaks;
    const auto& verts = poly.vertices();
    size_t count = verts.size();
    for (size_t idx = 0; idx < count; ++idx) {
        const Vec2& a = verts[idx];
        const Vec2& b = verts[(idx + 1) % count];
        double da = a.dot(n) - line_offset;
        double db = b.dot(n) - line_offset;
        bool a_on = std::abs(da) <= kGeomEps;
        bool b_on = std::abs(db) <= kGeomEps;
        if (a_on && b_on) {
            breaks.push_back(a.dot(u));
            breaks.push_back(b.dot(u));
        } else if (a_on) {
            breaks.push_back(a.dot(u));
        } else if (b_on) {
            breaks.push_back(b.dot(u));
        } else if ((da > 0.0) != (db > 0.0)) {
            double f = da / (da - db);
            breaks.push_back(a.dot(u) + f * (b.dot(u) - a.dot(u)));
        }
    }
    if (breaks.empty()) return {};
    std::sort(breaks.begin(), breaks.end());
    std::vector<double> uniq;
    for (double s : breaks) {
        if (uniq.empty() || s - uniq.back() > kGeomEps) uniq.push_back(s);
    }
    // classify the span between consecutive breakpoints by its midpoint
    std::vector<std::pair<double, double>> inside;
    for (size_t idx = 0; idx + 1 < uniq.size(); ++idx) {
        double s0 = uniq[idx], s1 = uniq[idx + 1];
        Vec2 mid = u * ((s0 + s1) * 0.5) + n * line_offset;
        if (!poly.contains(mid)) continue;
        if (!inside.empty() && s0 - inside.back().second <= kGeomEps)
            inside.back().second = s1;
        else
            inside.emplace_back(s0, s1);
    }
    if (inside.empty() && uniq.size() == 1) {
        // line touches the polygon at a single point (e.g. an extreme vertex)
        Vec2 touch = u * uniq.front() + n * line_offset;
        if (poly.contains(touch)) inside.emplace_back(uniq.front(), uniq.front());
    }
    return inside;
}

double EnergyModel::hover_power_w() const {
    return p_base_w * std::sqrt(ref_pressure_hpa / pressure_hpa);
}

double EnergyModel::cruise_power_w(double headwind_mps, double airspeed_mps) const {
    double head = std::max(headwind_mps, 0.0);
    return p_base_w * (1.0 + k_head * head / airspeed_mps) *
           std::sqrt(ref_pressure_hpa / pressure_hpa);
}

EnergyEstimate estimate_energy(const std::vector<Waypoint>& waypoints, const Wind& wind,
                               double airspeed_mps, const EnergyModel& model) {
    if (airspeed_mps <= 0.0) throw ValidationError("airspeed must be positive");
    EnergyEstimate est;
    const Vec2 flow = wind.flow_unit() * wind.speed_mps;
    Vec2 prev_track{0.0, 0.0};
    bool have_prev = false;
    const double cos_thresh = std::cos(model.turn_threshold_deg * kDegToRad);
    for (size_t idx = 0; idx + 1 < waypoints.size(); ++idx) {
        Vec2 delta = waypoints[idx + 1].position - waypoints[idx].position;
        double len = delta.norm();
        if (len <= kGeomEps) continue;
        Vec2 track = delta * (1.0 / len);
        if (have_prev && track.dot(prev_track) < cos_thresh) {
            est.duration_s += model.turn_time_s;
            est.energy_wh += model.hover_power_w() * model.turn_time_s / 3600.0;
            ++est.turn_count;
        }
        prev_track = track;
        have_prev = true;
        double ground = airspeed_mps + flow.dot(track);
        if (ground <= kGeomEps) {
            est.feasible = false;
            return est;
        }
        double seg_t = len / ground;
        double headwind = -flow.dot(track);
        est.distance_m += len;
        est.duration_s += seg_t;
        est.energy_wh += model.cruise_power_w(headwind, airspeed_mps) * seg_t / 3600.0;
    }
    return est;
}

MissionPlan plan_mission(const geo::FieldPolygon& poly, const SweepBasis& basis,
                         double altitude_m, double speed_mps, double endurance_s,
                         const Wind& wind, const EnergyModel& model) {
    basis.validate();
    if (altitude_m <= 0.0) throw ValidationError("mission altitude must be positive");
    if (speed_mps <= 0.0) throw ValidationError("mission speed must be positive");

    MissionPlan plan;
    plan.altitude_m = altitude_m;
    plan.trigger_spacing_m = basis.trigger_spacing_m;
    plan.wind_used = wind;

    // polygon extent along the sweep axis
    double jmin = std::numeric_limits<double>::infinity();
    double jmax = -jmin;
    for (const Vec2& v : poly.vertices()) {
        double w = v.dot(basis.j_hat);
        jmin = std::min(jmin, w);
        jmax = std::max(jmax, w);
    }
    const double extent = jmax - jmin;
    const int leg_count =
        static_cast<int>(std::floor(extent / basis.leg_spacing_m + kGeomEps)) + 1;
    const double inset = (extent - (leg_count - 1) * basis.leg_spacing_m) * 0.5;

    const double spacing = basis.trigger_spacing_m;
    for (int leg = 0; leg < leg_count; ++leg) {
        // leg 0 sits on the upwind side; stepping along +j rides the wind
        double jpos = jmin + inset + leg * basis.leg_spacing_m;
        Vec2 anchor = basis.j_hat * jpos;
        auto segments = clip_line_to_polygon(poly, anchor, basis.i_hat);
        if (segments.empty()) continue;

        std::vector<double> stops;
        for (const auto& [s0, s1] : segments) {
            double mid = (s0 + s1) * 0.5;
            double half = (s1 - s0) * 0.5;
            int steps = static_cast<int>(std::floor(half / spacing + kGeomEps));
            for (int k = -steps; k <= steps; ++k) stops.push_back(mid + k * spacing);
            if (half - steps * spacing > spacing * 0.5 + kGeomEps) {
                stops.push_back(s0);
                stops.push_back(s1);
            }
        }
        std::sort(stops.begin(), stops.end());
        stops.erase(std::unique(stops.begin(), stops.end(),
                                [](double a, double b) { return std::abs(a - b) < 1e-6; }),
                    stops.end());
        const bool forward = plan.leg_count % 2 == 0;
        if (!forward) std::reverse(stops.begin(), stops.end());
        for (double s : stops) {
            plan.waypoints.push_back(
                {basis.i_hat * s + basis.j_hat * jpos, altitude_m, Action::TriggerCapture});
        }
        ++plan.leg_count;
    }

    plan.capture_count = static_cast<int>(plan.waypoints.size());
    if (plan.capture_count == 0) {
        plan.status = PlanStatus::Empty;
        return plan;
    }
    EnergyEstimate est = estimate_energy(plan.waypoints, wind, speed_mps, model);
    plan.est_distance_m = est.distance_m;
    plan.est_duration_s = est.duration_s;
    plan.est_energy_wh = est.energy_wh;
    plan.status = (!est.feasible || est.duration_s > endurance_s) ? PlanStatus::Infeasible
                                                                  : PlanStatus::Ok;
    return plan;
}

const char* plan_status_name(PlanStatus s) {
    switch (s) {
        case PlanStatus::Ok: return "ok";
        case PlanStatus::Empty: return "empty";
        case PlanStatus::Infeasible: return "infeasible";
    }
    return "?";
}

std::string mission_to_json(const MissionPlan& plan, const geo::LocalFrame& frame) {
    nlohmann::json waypoints = nlohmann::json::array();
    int seq = 0;
    for (const Waypoint& wp : plan.waypoints) {
        geo::GeoPoint g = frame.from_local(wp.position, plan.altitude_m);
        waypoints.push_back({{"seq", seq++},
                             {"x_m", wp.position.x},
                             {"y_m", wp.position.y},
                             {"lat", g.lat},
                             {"lon", g.lon},
                             {"alt_m", wp.altitude_m},
                             {"action", wp.action == Action::TriggerCapture
                                            ? "trigger_capture"
                                            : "transit"}});
    }
    nlohmann::json doc{{"waypoints", waypoints},
                       {"summary",
                        {{"capture_count", plan.capture_count},
                         {"leg_count", plan.leg_count},
                         {"est_distance_m", plan.est_distance_m},
                         {"est_duration_s", plan.est_duration_s},
                         {"est_energy_wh", plan.est_energy_wh},
                         {"feasible", plan.feasible()},
                         {"status", plan_status_name(plan.status)},
                         {"altitude_m", plan.altitude_m},
                         {"wind_speed_mps", plan.wind_used.speed_mps},
                         {"wind_dir_deg", plan.wind_used.dir_deg}}}};
    return doc.dump(2);
}

}  // namespace agri::planner

#pragma once

#include <string>
#include <vector>

#include "agri/geo.hpp"

namespace agri::planner {

/// Wind as reported by the weather station: meteorological direction, i.e.
/// the bearing the wind blows FROM (0 = north, 90 = east).
struct Wind {
    double speed_mps = 0.0;
    double dir_deg = 0.0;

    /// Unit vector of the air motion (points downwind).
    Vec2 flow_unit() const;
};

/// Orthogonal sweep frame: legs run along i_hat, the sweep steps along
/// j_hat which is parallel to the wind. Spacings derive from the camera
/// footprint and the requested overlaps.
struct SweepBasis {
    Vec2 i_hat;               // leg direction
    Vec2 j_hat;               // step direction, downwind
    double leg_spacing_m = 0.0;
    double trigger_spacing_m = 0.0;

    void validate() const;
};

enum class CameraOrientation {
    /// Image long axis (hfov) along the flight direction; matches the
    /// deployed capture geometry.
    LongAxisAlongTrack,
    LongAxisAcrossTrack,
};

SweepBasis sweep_basis(double wind_dir_deg, const geo::CameraModel& camera,
                       double altitude_m, double sidelap, double frontlap,
                       CameraOrientation orientation = CameraOrientation::LongAxisAlongTrack);

enum class Action { Transit, TriggerCapture };

struct Waypoint {
    Vec2 position;
    double altitude_m = 0.0;
    Action action = Action::TriggerCapture;
};

struct EnergyModel {
    double p_base_w = 390.0;          // 78 Wh pack / 12 min endurance
    double k_head = 0.3;              // headwind power penalty per unit headwind/airspeed
    double pressure_hpa = 1013.25;    // ambient; lower pressure costs more power
    double ref_pressure_hpa = 1013.25;
    double turn_time_s = 2.0;         // hover pause charged per sharp heading change
    double turn_threshold_deg = 15.0;

    double hover_power_w() const;
    double cruise_power_w(double headwind_mps, double airspeed_mps) const;
};

struct EnergyEstimate {
    double distance_m = 0.0;
    double duration_s = 0.0;
    double energy_wh = 0.0;
    int turn_count = 0;
    bool feasible = true;  // false when some segment has no positive ground speed
};

/// Segment-wise duration/energy over a waypoint polyline. Ground speed per
/// segment is airspeed plus the along-track wind component; sharp heading
/// changes are charged as hover pauses.
EnergyEstimate estimate_energy(const std::vector<Waypoint>& waypoints, const Wind& wind,
                               double airspeed_mps, const EnergyModel& model);

enum class PlanStatus { Ok, Empty, Infeasible };

const char* plan_status_name(PlanStatus s);

struct MissionPlan {
    std::vector<Waypoint> waypoints;
    int capture_count = 0;
    int leg_count = 0;
    double est_distance_m = 0.0;
    double est_duration_s = 0.0;
    double est_energy_wh = 0.0;
    double altitude_m = 0.0;
    double trigger_spacing_m = 0.0;
    Wind wind_used;
    PlanStatus status = PlanStatus::Empty;

    bool feasible() const { return status == PlanStatus::Ok; }
};

/// Serpentine coverage of the polygon. Legs are placed every leg_spacing
/// along j_hat (the grid centered on the polygon's extent), swept from the
/// upwind side so sweep steps ride the tailwind. Each leg line is clipped
/// against the polygon exactly; every resulting inside segment gets capture
/// points at trigger_spacing, placed symmetrically from the segment middle,
/// with the segment endpoints added whenever the leftover margin exceeds
/// half a spacing.
MissionPlan plan_mission(const geo::FieldPolygon& poly, const SweepBasis& basis,
                         double altitude_m, double speed_mps, double endurance_s,
                         const Wind& wind, const EnergyModel& model);

std::string mission_to_json(const MissionPlan& plan, const geo::LocalFrame& frame);

/// Inside portions of the line through `point` with direction `dir` as
/// intervals of the signed parameter along `dir`. Boundary-inclusive.
std::vector<std::pair<double, double>> clip_line_to_polygon(const geo::FieldPolygon& poly,
                                                            const Vec2& point,
                                                            const Vec2& dir);

}  // namespace agri::planner

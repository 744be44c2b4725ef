#pragma once

#include <optional>
#include <string>
#include <vector>

#include "agri/flightsim.hpp"
#include "agri/gate.hpp"
#include "agri/geo.hpp"
#include "agri/planner.hpp"
#include "agri/radio.hpp"
#include "agri/sensornet.hpp"
#include "agri/spectral.hpp"
#include "agri/telemetry.hpp"

namespace agri::scenario {

struct NodeConfig {
    int node_id = 1;
    Vec2 position_m;
    std::vector<sensornet::SensorKind> kinds;
    double period_s = 60.0;
};

struct FlightParams {
    double altitude_m = 50.0;
    double speed_mps = 5.0;
    double sidelap = 0.75;
    double frontlap = 0.75;
    double battery_wh = 78.0;
    double endurance_s = 720.0;
    double reserve_fraction = 0.2;
    double dt_s = 0.1;
};

struct SceneParams {
    double cell_size_m = 1.0;
    double noise_sigma = 0.02;
    double mosaic_cell_m = 1.0;
    double reference_klx = 90.0;  // light level treated as full illumination
};

/// One self-contained run description, loaded from a single JSON document.
struct Scenario {
    std::string site_name = "site1";
    geo::GeoPoint site;
    UnixTime start_time = 0.0;
    UnixTime takeoff_time = 0.0;
    uint64_t seed = 0;
    std::vector<Vec2> polygon_vertices_m;
    std::string polygon_label;
    Vec2 gateway_position_m;
    std::vector<NodeConfig> nodes;
    sensornet::EnvironmentScript environment;
    radio::LoraConfig lora;
    radio::LinkBudget link;
    geo::CameraModel camera;
    FlightParams flight;
    planner::EnergyModel energy;
    gate::GateConfig gate_cfg;
    SceneParams scene;

    geo::FieldPolygon polygon() const { return {polygon_vertices_m, polygon_label}; }
    geo::LocalFrame frame() const { return geo::LocalFrame(site); }
};

Scenario load_scenario(const std::string& path);
Scenario scenario_from_json(const std::string& json_text);

/// Ground-segment simulation: node ticks -> radio -> gateway decode ->
/// broker -> validation -> store. Runs from start_time to t_end.
struct GroundSimResult {
    telemetry::Store store;
    size_t frames_sent = 0;
    size_t frames_dropped = 0;
};

GroundSimResult run_ground_sim(const Scenario& sc, UnixTime t_end);

struct RunReport {
    bool go = false;
    gate::Readiness readiness;
    std::optional<planner::MissionPlan> plan;
    std::optional<flightsim::FlightResult> flight;
    std::vector<std::string> artifacts;  // file names relative to out_dir
    std::string out_dir;
};

/// Full pipeline: sensor sim, gate, plan, fly, spectral products. Artifacts
/// land in out_dir; nothing flight-related is written on a no-go.
RunReport run_scenario(const Scenario& sc, const std::string& out_dir);

std::string manifest_json(const RunReport& report);

}  // namespace agri::scenario

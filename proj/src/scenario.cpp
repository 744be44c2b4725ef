#include "agri/scenario.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

#include <json.hpp>

namespace agri::scenario {

using nlohmann::json;
using sensornet::SensorKind;

namespace {

std::vector<SensorKind> parse_kinds(const json& arr) {
    std::vector<SensorKind> kinds;
    for (const auto& k : arr) {
        auto kind = sensornet::kind_from_name(k.get<std::string>());
        if (!kind) throw ValidationError("unknown sensor kind: " + k.get<std::string>());
        kinds.push_back(*kind);
    }
    return kinds;
}

template <typename T>
void maybe(const json& doc, const char* key, T& out) {
    if (doc.contains(key)) out = doc.at(key).get<T>();
}

}  // namespace

Scenario scenario_from_json(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("scenario is not valid JSON: ") + e.what());
    }
    Scenario sc;
    const json& site = doc.at("site");
    maybe(site, "name", sc.site_name);
    sc.site.lat = site.at("lat").get<double>();
    sc.site.lon = site.at("lon").get<double>();
    maybe(site, "alt", sc.site.alt);
    sc.site.validate();

    sc.start_time = parse_iso8601(doc.at("start_time").get<std::string>());
    sc.takeoff_time = parse_iso8601(doc.at("takeoff_time").get<std::string>());
    if (sc.takeoff_time < sc.start_time)
        throw ValidationError("takeoff_time precedes start_time");
    if (!doc.contains("seed")) throw ValidationError("scenario requires a seed");
    sc.seed = doc.at("seed").get<uint64_t>();

    const json& poly = doc.at("polygon");
    maybe(poly, "label", sc.polygon_label);
    for (const auto& v : poly.at("vertices_m"))
        sc.polygon_vertices_m.push_back({v[0].get<double>(), v[1].get<double>()});
    sc.polygon();  // validates

    if (doc.contains("gateway_position_m")) {
        sc.gateway_position_m = {doc["gateway_position_m"][0].get<double>(),
                                 doc["gateway_position_m"][1].get<double>()};
    }

    for (const auto& n : doc.at("nodes")) {
        NodeConfig node;
        node.node_id = n.at("node_id").get<int>();
        node.position_m = {n.at("position_m")[0].get<double>(),
                           n.at("position_m")[1].get<double>()};
        node.kinds = parse_kinds(n.at("kinds"));
        maybe(n, "period_s", node.period_s);
        sc.nodes.push_back(std::move(node));
    }

    const json& env = doc.at("environment");
    for (const auto& [name, series] : env.at("series").items()) {
        auto kind = sensornet::kind_from_name(name);
        if (!kind) throw ValidationError("unknown environment kind: " + name);
        std::vector<std::pair<double, double>> points;
        for (const auto& p : series)
            points.emplace_back(p[0].get<double>(), p[1].get<double>());
        sc.environment.set_series(*kind, std::move(points));
    }
    if (env.contains("noise_sigma")) {
        for (const auto& [name, sigma] : env["noise_sigma"].items()) {
            auto kind = sensornet::kind_from_name(name);
            if (!kind) throw ValidationError("unknown noise kind: " + name);
            sc.environment.set_noise(*kind, sigma.get<double>());
        }
    }

    if (doc.contains("lora")) {
        const json& l = doc["lora"];
        maybe(l, "spreading_factor", sc.lora.spreading_factor);
        maybe(l, "bandwidth_hz", sc.lora.bandwidth_hz);
        maybe(l, "coding_rate_denom", sc.lora.coding_rate_denom);
        maybe(l, "frequency_hz", sc.lora.frequency_hz);
        maybe(l, "preamble_symbols", sc.lora.preamble_symbols);
        maybe(l, "explicit_header", sc.lora.explicit_header);
        maybe(l, "crc_on", sc.lora.crc_on);
        maybe(l, "low_data_rate_opt", sc.lora.low_data_rate_opt);
        sc.lora.validate();
    }
    if (doc.contains("link")) {
        const json& l = doc["link"];
        maybe(l, "tx_power_dbm", sc.link.tx_power_dbm);
        maybe(l, "tx_antenna_gain_dbi", sc.link.tx_antenna_gain_dbi);
        maybe(l, "rx_antenna_gain_dbi", sc.link.rx_antenna_gain_dbi);
        maybe(l, "rx_sensitivity_dbm", sc.link.rx_sensitivity_dbm);
        maybe(l, "path_loss_exponent", sc.link.path_loss_exponent);
        maybe(l, "reference_loss_db", sc.link.reference_loss_db);
        maybe(l, "shadowing_sigma_db", sc.link.shadowing_sigma_db);
        sc.link.validate();
    }
    if (doc.contains("camera")) {
        const json& c = doc["camera"];
        maybe(c, "hfov_deg", sc.camera.hfov_deg);
        maybe(c, "vfov_deg", sc.camera.vfov_deg);
        maybe(c, "image_width", sc.camera.image_width);
        maybe(c, "image_height", sc.camera.image_height);
        sc.camera.validate();
    }
    if (doc.contains("flight")) {
        const json& f = doc["flight"];
        maybe(f, "altitude_m", sc.flight.altitude_m);
        maybe(f, "speed_mps", sc.flight.speed_mps);
        maybe(f, "sidelap", sc.flight.sidelap);
        maybe(f, "frontlap", sc.flight.frontlap);
        maybe(f, "battery_wh", sc.flight.battery_wh);
        maybe(f, "endurance_s", sc.flight.endurance_s);
        maybe(f, "reserve_fraction", sc.flight.reserve_fraction);
        maybe(f, "dt_s", sc.flight.dt_s);
    }
    if (doc.contains("energy")) {
        const json& e = doc["energy"];
        maybe(e, "p_base_w", sc.energy.p_base_w);
        maybe(e, "k_head", sc.energy.k_head);
        maybe(e, "pressure_hpa", sc.energy.pressure_hpa);
        maybe(e, "turn_time_s", sc.energy.turn_time_s);
        maybe(e, "turn_threshold_deg", sc.energy.turn_threshold_deg);
    }
    if (doc.contains("gate")) {
        const json& g = doc["gate"];
        maybe(g, "wind_window_s", sc.gate_cfg.wind_window_s);
        maybe(g, "rain_threshold_mmh", sc.gate_cfg.rain_threshold_mmh);
        maybe(g, "cloud_fraction", sc.gate_cfg.cloud_fraction);
        maybe(g, "clear_sky_klx", sc.gate_cfg.clear_sky_klx);
    }
    if (doc.contains("scene")) {
        const json& s = doc["scene"];
        maybe(s, "cell_size_m", sc.scene.cell_size_m);
        maybe(s, "noise_sigma", sc.scene.noise_sigma);
        maybe(s, "mosaic_cell_m", sc.scene.mosaic_cell_m);
        maybe(s, "reference_klx", sc.scene.reference_klx);
    }
    return sc;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open scenario file: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return scenario_from_json(text);
}

GroundSimResult run_ground_sim(const Scenario& sc, UnixTime t_end) {
    GroundSimResult result;
    Rng root(sc.seed);
    Rng radio_rng = root.fork(1);

    sensornet::Broker broker;
    telemetry::Ingestor ingestor(result.store);
    broker.subscribe("agro/v1/" + sc.site_name + "/+/obs",
                     [&ingestor](const std::string&, const std::string& payload) {
                         ingestor.ingest(payload);
                     });

    std::vector<sensornet::NodeSim> nodes;
    std::vector<Rng> node_rngs;
    for (const NodeConfig& nc : sc.nodes) {
        nodes.emplace_back(static_cast<uint8_t>(nc.node_id), nc.position_m, nc.kinds,
                           nc.period_s);
        node_rngs.push_back(root.fork(100 + static_cast<uint64_t>(nc.node_id)));
    }

    // chronological emission schedule across all nodes
    struct Event {
        double t;
        size_t node;
    };
    std::vector<Event> events;
    double horizon = t_end - sc.start_time;
    for (size_t i = 0; i < nodes.size(); ++i) {
        for (long k = 1; k * nodes[i].period_s() <= horizon + 1e-9; ++k)
            events.push_back({k * nodes[i].period_s(), i});
    }
    std::stable_sort(events.begin(), events.end(), [&](const Event& a, const Event& b) {
        if (a.t != b.t) return a.t < b.t;
        return nodes[a.node].node_id() < nodes[b.node].node_id();
    });

    for (const Event& ev : events) {
        auto frame = nodes[ev.node].tick(ev.t, sc.environment, node_rngs[ev.node]);
        if (!frame) continue;
        ++result.frames_sent;
        auto bytes = sensornet::encode_frame(*frame);
        auto outcome = sensornet::gateway_receive(bytes, nodes[ev.node].position(),
                                                  sc.gateway_position_m, sc.link,
                                                  sc.site_name, sc.start_time + ev.t,
                                                  radio_rng);
        if (std::holds_alternative<sensornet::Publication>(outcome)) {
            const auto& pub = std::get<sensornet::Publication>(outcome);
            broker.publish(pub.topic, pub.payload);
        } else {
            ++result.frames_dropped;
        }
    }
    return result;
}

namespace {

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write artifact: " + path);
    out << content;
}

void write_file(const std::string& path, const std::vector<uint8_t>& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write artifact: " + path);
    out.write(reinterpret_cast<const char*>(content.data()),
              static_cast<std::streamsize>(content.size()));
}

}  // namespace

RunReport run_scenario(const Scenario& sc, const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    RunReport report;
    report.out_dir = out_dir;
    auto artifact = [&](const std::string& name) {
        report.artifacts.push_back(name);
        return out_dir + "/" + name;
    };

    geo::FieldPolygon poly = sc.polygon();
    geo::LocalFrame frame = sc.frame();

    // 1. ground segment up to takeoff
    GroundSimResult ground = run_ground_sim(sc, sc.takeoff_time);
    const auto& log = ground.store.log();
    write_file(artifact("telemetry.csv"), telemetry::export_csv(log));
    {
        std::string ndjson;
        for (const auto& rec : log) ndjson += telemetry::record_to_json(rec) + "\n";
        write_file(artifact("telemetry.ndjson"), ndjson);
    }

    // 2. flight-readiness gate
    report.readiness = gate::evaluate(log, sc.takeoff_time, sc.site, sc.gate_cfg);
    report.go = report.readiness.go;
    write_file(artifact("readiness.json"), gate::readiness_to_json(report.readiness) + "\n");

    if (report.go) {
        // 3. mission plan: wind-aligned only when the gate asked for it
        planner::Wind wind;
        wind.speed_mps = report.readiness.inputs.mean_wind_mps;
        wind.dir_deg = telemetry::wind_direction_mean(log, sc.takeoff_time,
                                                      sc.gate_cfg.wind_window_s)
                           .value_or(0.0);
        planner::SweepBasis basis;
        if (report.readiness.optimize_for_wind) {
            basis = planner::sweep_basis(wind.dir_deg, sc.camera, sc.flight.altitude_m,
                                         sc.flight.sidelap, sc.flight.frontlap);
        } else {
            basis = planner::sweep_basis(90.0, sc.camera, sc.flight.altitude_m,
                                         sc.flight.sidelap, sc.flight.frontlap);
        }
        planner::EnergyModel energy = sc.energy;
        if (sc.environment.has(SensorKind::Pressure))
            energy.pressure_hpa =
                sc.environment.sample(SensorKind::Pressure, sc.takeoff_time - sc.start_time);
        planner::MissionPlan plan =
            planner::plan_mission(poly, basis, sc.flight.altitude_m, sc.flight.speed_mps,
                                  sc.flight.endurance_s, wind, energy);
        write_file(artifact("mission.json"), planner::mission_to_json(plan, frame) + "\n");
        report.plan = plan;

        if (plan.feasible()) {
            // 4. flight; the environment script is re-based to takeoff so
            // in-flight gusts line up with mission time
            sensornet::EnvironmentScript flight_env;
            double takeoff_offset = sc.takeoff_time - sc.start_time;
            for (SensorKind k : {SensorKind::WindSpeed, SensorKind::WindDirection}) {
                if (!sc.environment.has(k)) continue;
                std::vector<std::pair<double, double>> pts;
                for (const auto& [t, v] : sc.environment.series(k))
                    pts.emplace_back(t - takeoff_offset, v);
                flight_env.set_series(k, std::move(pts));
            }
            flightsim::FlightConfig fcfg;
            fcfg.dt_s = sc.flight.dt_s;
            fcfg.airspeed_mps = sc.flight.speed_mps;
            fcfg.reserve_fraction = sc.flight.reserve_fraction;
            flightsim::FlightResult flight = flightsim::fly(
                plan, wind, flight_env, sc.flight.battery_wh, energy, fcfg, frame);
            write_file(artifact("flight_log.ndjson"),
                       flightsim::flight_log_ndjson(flight.messages));

            // 5. spectral products
            Rng scene_rng = Rng(sc.seed).fork(2);
            geo::Footprint fp = geo::footprint(sc.camera, sc.flight.altitude_m);
            double margin = std::max(fp.width, fp.height);
            spectral::SyntheticScene scene = spectral::make_default_scene(
                poly, sc.scene.cell_size_m, margin, scene_rng, sc.scene.noise_sigma);
            std::vector<double> illum;
            if (sc.environment.has(SensorKind::LightVisible)) {
                for (const auto& trig : flight.captures) {
                    double klx = sc.environment.sample(SensorKind::LightVisible,
                                                       takeoff_offset + trig.t);
                    illum.push_back(std::clamp(klx / sc.scene.reference_klx, 0.1, 1.0));
                }
            }
            auto captures = spectral::captures_to_spectral(flight.captures, scene, sc.camera,
                                                           sc.flight.altitude_m, illum);
            if (!captures.empty()) {
                auto band_grids = spectral::mosaic(captures, sc.scene.mosaic_cell_m);
                for (const auto& [band, grid] : band_grids) {
                    std::string name = std::string("band_") + geo::band_name(band);
                    spectral::save_raster(grid, out_dir + "/" + name, geo::band_name(band));
                    report.artifacts.push_back(name + ".json");
                    report.artifacts.push_back(name + ".f32");
                }
                spectral::IndexRaster ndvi_r = spectral::ndvi(
                    band_grids.at(geo::Band::NIR), band_grids.at(geo::Band::Red));
                spectral::IndexRaster ndre_r = spectral::ndre(
                    band_grids.at(geo::Band::NIR), band_grids.at(geo::Band::RedEdge));
                for (const auto* idx : {&ndvi_r, &ndre_r}) {
                    std::string name = spectral::index_kind_name(idx->kind);
                    spectral::save_raster(idx->grid, out_dir + "/" + name, name);
                    report.artifacts.push_back(name + ".json");
                    report.artifacts.push_back(name + ".f32");
                    write_file(artifact(name + ".ppm"), spectral::emit_map(*idx));
                }
                nlohmann::json stats{
                    {"ndvi", nlohmann::json::parse(
                                 spectral::stats_to_json(spectral::index_stats(ndvi_r, poly)))},
                    {"ndre", nlohmann::json::parse(
                                 spectral::stats_to_json(spectral::index_stats(ndre_r, poly)))}};
                write_file(artifact("stats.json"), stats.dump(2) + "\n");
            }
            report.flight = std::move(flight);
        }
    }

    // run summary last so it can reference everything
    nlohmann::json summary{
        {"go", report.go},
        {"frames_sent", ground.frames_sent},
        {"frames_dropped", ground.frames_dropped},
        {"record_count", log.size()},
        {"takeoff_time", format_iso8601(sc.takeoff_time)},
        {"seed", sc.seed},
    };
    if (report.plan) {
        summary["plan"] = {{"status", planner::plan_status_name(report.plan->status)},
                           {"capture_count", report.plan->capture_count},
                           {"leg_count", report.plan->leg_count},
                           {"est_duration_s", report.plan->est_duration_s},
                           {"est_energy_wh", report.plan->est_energy_wh}};
    }
    if (report.flight) {
        summary["flight"] = {
            {"completed", report.flight->completed},
            {"flight_time_s", report.flight->flight_time_s},
            {"energy_used_wh", report.flight->energy_used_wh},
            {"captures", report.flight->captures.size()},
            {"abort_reason", report.flight->abort_reason
                                 ? nlohmann::json(flightsim::abort_reason_name(
                                       *report.flight->abort_reason))
                                 : nlohmann::json()}};
    }
    write_file(artifact("run_summary.json"), summary.dump(2) + "\n");
    return report;
}

std::string manifest_json(const RunReport& report) {
    nlohmann::json files = nlohmann::json::array();
    for (const auto& name : report.artifacts) files.push_back(report.out_dir + "/" + name);
    nlohmann::json doc{{"go", report.go}, {"artifacts", files}};
    return doc.dump(2);
}

}  // namespace agri::scenario

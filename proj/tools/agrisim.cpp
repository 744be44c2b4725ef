// agrisim: field-monitoring simulation toolkit CLI.
//
// Subcommands: netcheck | gate | plan | simulate | index | report
// Exit codes: 0 success / go, 1 no-go, 2 validation error, 3 internal error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "agri/scenario.hpp"

namespace {

using namespace agri;

int cmd_netcheck(const std::string& scenario_path, double max_m, double step_m,
                 const std::string& out_path) {
    scenario::Scenario sc = scenario::load_scenario(scenario_path);
    std::ostringstream csv;
    csv.precision(10);
    csv << "distance_m,rssi_dbm,delivered\n";
    for (double d = std::max(step_m, 1.0); d <= max_m + 1e-9; d += step_m) {
        double rssi = radio::rssi_at(sc.link, d);
        csv << d << ',' << rssi << ',' << (rssi >= sc.link.rx_sensitivity_dbm ? 1 : 0)
            << '\n';
    }
    if (out_path.empty() || out_path == "-") {
        std::cout << csv.str();
    } else {
        std::ofstream out(out_path);
        out << csv.str();
        std::cout << "wrote " << out_path << "\n";
    }
    return 0;
}

int cmd_gate(const std::string& scenario_path, const std::string& at) {
    scenario::Scenario sc = scenario::load_scenario(scenario_path);
    UnixTime t = at.empty() ? sc.takeoff_time : parse_iso8601(at);
    scenario::GroundSimResult ground = scenario::run_ground_sim(sc, t);
    gate::Readiness r = gate::evaluate(ground.store.log(), t, sc.site, sc.gate_cfg);
    std::cout << gate::readiness_to_json(r) << "\n";
    return r.go ? 0 : 1;
}

int cmd_plan(const std::string& scenario_path, const std::string& out_path) {
    scenario::Scenario sc = scenario::load_scenario(scenario_path);
    scenario::GroundSimResult ground = scenario::run_ground_sim(sc, sc.takeoff_time);
    const auto& log = ground.store.log();
    gate::Readiness r = gate::evaluate(log, sc.takeoff_time, sc.site, sc.gate_cfg);

    planner::Wind wind;
    wind.speed_mps = std::isnan(r.inputs.mean_wind_mps) ? 0.0 : r.inputs.mean_wind_mps;
    wind.dir_deg =
        telemetry::wind_direction_mean(log, sc.takeoff_time, sc.gate_cfg.wind_window_s)
            .value_or(0.0);
    planner::SweepBasis basis = planner::sweep_basis(
        r.optimize_for_wind ? wind.dir_deg : 90.0, sc.camera, sc.flight.altitude_m,
        sc.flight.sidelap, sc.flight.frontlap);
    planner::MissionPlan plan =
        planner::plan_mission(sc.polygon(), basis, sc.flight.altitude_m, sc.flight.speed_mps,
                              sc.flight.endurance_s, wind, sc.energy);
    std::string mission = planner::mission_to_json(plan, sc.frame());
    if (!out_path.empty()) {
        std::ofstream out(out_path);
        out << mission << "\n";
    }
    nlohmann::json summary{{"capture_count", plan.capture_count},
                           {"leg_count", plan.leg_count},
                           {"est_distance_m", plan.est_distance_m},
                           {"est_duration_s", plan.est_duration_s},
                           {"est_energy_wh", plan.est_energy_wh},
                           {"feasible", plan.feasible()},
                           {"status", planner::plan_status_name(plan.status)},
                           {"wind_aligned", r.optimize_for_wind}};
    std::cout << summary.dump(2) << "\n";
    return 0;
}

int cmd_simulate(const std::string& scenario_path, const std::string& out_dir) {
    scenario::Scenario sc = scenario::load_scenario(scenario_path);
    scenario::RunReport report = scenario::run_scenario(sc, out_dir);
    std::cout << scenario::manifest_json(report) << "\n";
    return report.go ? 0 : 1;
}

int cmd_index(const std::string& a_prefix, const std::string& b_prefix,
              const std::string& kind, const std::string& out_prefix) {
    spectral::Raster a = spectral::load_raster(a_prefix);
    spectral::Raster b = spectral::load_raster(b_prefix);
    spectral::IndexRaster idx =
        kind == "ndre" ? spectral::ndre(a, b) : spectral::ndvi(a, b);
    spectral::save_raster(idx.grid, out_prefix, spectral::index_kind_name(idx.kind));
    auto map = spectral::emit_map(idx);
    std::ofstream ppm(out_prefix + ".ppm", std::ios::binary);
    ppm.write(reinterpret_cast<const char*>(map.data()),
              static_cast<std::streamsize>(map.size()));
    nlohmann::json manifest{{"raster", {out_prefix + ".json", out_prefix + ".f32"}},
                            {"map", out_prefix + ".ppm"}};
    std::cout << manifest.dump(2) << "\n";
    return 0;
}

std::string svg_plot(const std::vector<std::pair<double, double>>& points,
                     const std::string& title) {
    const int w = 800, h = 300, pad = 40;
    std::ostringstream svg;
    svg.precision(10);
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
        << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << pad << "\" y=\"20\" font-family=\"monospace\">" << title
        << "</text>\n";
    svg << "<line x1=\"" << pad << "\" y1=\"" << h - pad << "\" x2=\"" << w - pad
        << "\" y2=\"" << h - pad << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << pad << "\" y1=\"" << pad << "\" x2=\"" << pad << "\" y2=\""
        << h - pad << "\" stroke=\"black\"/>\n";
    if (points.size() >= 2) {
        double tmin = points.front().first, tmax = points.back().first;
        double vmin = points.front().second, vmax = vmin;
        for (const auto& [t, v] : points) {
            vmin = std::min(vmin, v);
            vmax = std::max(vmax, v);
        }
        if (vmax - vmin < 1e-12) {
            vmax += 1.0;
            vmin -= 1.0;
        }
        if (tmax - tmin < 1e-12) tmax = tmin + 1.0;
        svg << "<polyline fill=\"none\" stroke=\"green\" stroke-width=\"1.5\" points=\"";
        for (const auto& [t, v] : points) {
            double x = pad + (t - tmin) / (tmax - tmin) * (w - 2 * pad);
            double y = h - pad - (v - vmin) / (vmax - vmin) * (h - 2 * pad);
            svg << x << ',' << y << ' ';
        }
        svg << "\"/>\n";
        svg << "<text x=\"" << pad << "\" y=\"" << h - pad + 15
            << "\" font-family=\"monospace\" font-size=\"10\">min " << vmin << " max " << vmax
            << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

int cmd_report(const std::string& log_path, const std::string& out_dir,
               std::vector<std::string> kinds) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    std::vector<telemetry::TelemetryRecord> log;
    {
        std::ifstream in(log_path);
        if (!in) throw ValidationError("cannot open telemetry log: " + log_path);
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty()) log.push_back(telemetry::record_from_json(line));
        }
    }
    // per-kind summary table
    std::ostringstream table;
    table << "kind,count,mean,min,max\n";
    table.precision(10);
    for (int k = 0; k < sensornet::kSensorKindCount; ++k) {
        auto kind = static_cast<sensornet::SensorKind>(k);
        double acc = 0.0, mn = 0.0, mx = 0.0;
        size_t n = 0;
        for (const auto& rec : log) {
            if (rec.kind != kind || rec.quality != telemetry::Quality::Valid) continue;
            if (n == 0) {
                mn = rec.value;
                mx = rec.value;
            }
            acc += rec.value;
            mn = std::min(mn, rec.value);
            mx = std::max(mx, rec.value);
            ++n;
        }
        if (n == 0) continue;
        table << sensornet::kind_name(kind) << ',' << n << ',' << acc / n << ',' << mn << ','
              << mx << '\n';
    }
    std::ofstream tout(out_dir + "/summary.csv");
    tout << table.str();
    std::cout << table.str();

    if (kinds.empty() && !log.empty()) kinds.push_back("temperature");
    for (const std::string& name : kinds) {
        auto kind = sensornet::kind_from_name(name);
        if (!kind) throw ValidationError("unknown sensor kind: " + name);
        std::vector<std::pair<double, double>> points;
        for (const auto& rec : log) {
            if (rec.kind == *kind && rec.quality == telemetry::Quality::Valid)
                points.emplace_back(rec.t, rec.value);
        }
        std::sort(points.begin(), points.end());
        std::ofstream svg(out_dir + "/plot_" + name + ".svg");
        svg << svg_plot(points, name + std::string(" [") + sensornet::kind_unit(*kind) + "]");
        std::cout << "wrote " << out_dir << "/plot_" << name << ".svg\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"LoRa sensor network + UAV crop monitoring simulation toolkit"};
    app.require_subcommand(1);

    std::string scenario_path, out_path, out_dir, at_time;
    double max_m = 2000.0, step_m = 50.0;
    std::string a_prefix, b_prefix, kind = "ndvi", out_prefix;
    std::string log_path;
    std::vector<std::string> kinds;

    auto* netcheck = app.add_subcommand("netcheck", "distance -> RSSI/delivery table (CSV)");
    netcheck->add_option("--scenario", scenario_path, "scenario JSON")->required();
    netcheck->add_option("--max-m", max_m, "maximum distance (m)");
    netcheck->add_option("--step-m", step_m, "distance step (m)");
    netcheck->add_option("--out", out_path, "output CSV path ('-' for stdout)");

    auto* gate_cmd = app.add_subcommand("gate", "flight-readiness check (exit 1 on no-go)");
    gate_cmd->add_option("--scenario", scenario_path, "scenario JSON")->required();
    gate_cmd->add_option("--at", at_time, "ISO-8601 evaluation instant (default: takeoff)");

    auto* plan_cmd = app.add_subcommand("plan", "generate the coverage mission");
    plan_cmd->add_option("--scenario", scenario_path, "scenario JSON")->required();
    plan_cmd->add_option("--out", out_path, "mission JSON output path");

    auto* sim_cmd = app.add_subcommand("simulate", "end-to-end run: sense, gate, plan, fly, map");
    sim_cmd->add_option("--scenario", scenario_path, "scenario JSON")->required();
    sim_cmd->add_option("--out", out_dir, "artifact directory")->required();

    auto* index_cmd = app.add_subcommand("index", "compute NDVI/NDRE from band rasters");
    index_cmd->add_option("--nir", a_prefix, "NIR raster prefix (.json/.f32)")->required();
    index_cmd->add_option("--band", b_prefix, "red or red-edge raster prefix")->required();
    index_cmd->add_option("--kind", kind, "ndvi|ndre")->check(CLI::IsMember({"ndvi", "ndre"}));
    index_cmd->add_option("--out-prefix", out_prefix, "output prefix")->required();

    auto* report_cmd = app.add_subcommand("report", "summary tables and SVG plots from a log");
    report_cmd->add_option("--log", log_path, "telemetry NDJSON log")->required();
    report_cmd->add_option("--out-dir", out_dir, "output directory")->required();
    report_cmd->add_option("--kind", kinds, "sensor kinds to plot");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (*netcheck) return cmd_netcheck(scenario_path, max_m, step_m, out_path);
        if (*gate_cmd) return cmd_gate(scenario_path, at_time);
        if (*plan_cmd) return cmd_plan(scenario_path, out_path);
        if (*sim_cmd) return cmd_simulate(scenario_path, out_dir);
        if (*index_cmd) return cmd_index(a_prefix, b_prefix, kind, out_prefix);
        if (*report_cmd) return cmd_report(log_path, out_dir, kinds);
    } catch (const agri::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}

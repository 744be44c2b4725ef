#include "agri/telemetry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace agri::telemetry {

using sensornet::SensorKind;

const char* quality_name(Quality q) {
    switch (q) {
        case Quality::Valid: return "valid";
        case Quality::OutOfRange: return "out_of_range";
        case Quality::Stale: return "stale";
    }
    return "?";
}

Bounds plausibility_bounds(SensorKind kind) {
    switch (kind) {
        case SensorKind::Temperature: return {-40.0, 60.0};
        case SensorKind::Humidity: return {0.0, 100.0};
        case SensorKind::WindSpeed: return {0.0, 60.0};
        case SensorKind::WindDirection: return {0.0, 360.0};
        case SensorKind::Pressure: return {300.0, 1100.0};
        case SensorKind::Rain: return {0.0, 500.0};
        case SensorKind::GasCO:
        case SensorKind::GasNH3:
        case SensorKind::GasNO2: return {0.0, 1000.0};
        case SensorKind::LightVisible:
        case SensorKind::LightIR: return {0.0, 200.0};
        case SensorKind::UVIndex: return {0.0, 15.0};
    }
    return {0.0, 0.0};
}

std::vector<TelemetryRecord> validate(const std::string& payload_json) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(payload_json);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("publication is not valid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("node") || !doc.contains("t") ||
        !doc.contains("readings") || !doc["readings"].is_array())
        throw ValidationError("publication missing node/t/readings");
    if (!doc["node"].is_number_integer())
        throw ValidationError("publication node must be an integer");
    int node = doc["node"].get<int>();
    UnixTime t = parse_iso8601(doc["t"].get<std::string>());
    std::vector<TelemetryRecord> out;
    for (const auto& r : doc["readings"]) {
        if (!r.is_object() || !r.contains("kind") || !r.contains("value") ||
            !r["value"].is_number())
            throw ValidationError("reading missing kind/value");
        auto kind = sensornet::kind_from_name(r["kind"].get<std::string>());
        if (!kind)
            throw ValidationError("unknown sensor kind: " + r["kind"].get<std::string>());
        double value = r["value"].get<double>();
        Bounds b = plausibility_bounds(*kind);
        Quality q = (std::isfinite(value) && value >= b.lo && value <= b.hi)
                        ? Quality::Valid
                        : Quality::OutOfRange;
        out.push_back({node, *kind, t, value, q});
    }
    return out;
}

std::string record_to_json(const TelemetryRecord& rec) {
    nlohmann::json doc{{"t", format_iso8601(rec.t)},
                       {"node", rec.node_id},
                       {"kind", sensornet::kind_name(rec.kind)},
                       {"value", rec.value},
                       {"quality", quality_name(rec.quality)}};
    return doc.dump();
}

TelemetryRecord record_from_json(const std::string& line) {
    nlohmann::json doc = nlohmann::json::parse(line);
    TelemetryRecord rec;
    rec.t = parse_iso8601(doc.at("t").get<std::string>());
    rec.node_id = doc.at("node").get<int>();
    auto kind = sensornet::kind_from_name(doc.at("kind").get<std::string>());
    if (!kind) throw ValidationError("unknown kind in log line");
    rec.kind = *kind;
    rec.value = doc.at("value").get<double>();
    std::string q = doc.at("quality").get<std::string>();
    if (q == "valid")
        rec.quality = Quality::Valid;
    else if (q == "out_of_range")
        rec.quality = Quality::OutOfRange;
    else if (q == "stale")
        rec.quality = Quality::Stale;
    else
        throw ValidationError("unknown quality in log line");
    return rec;
}

Store::Store(const std::string& ndjson_path) : path_(ndjson_path) {
    std::ifstream in(path_);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        TelemetryRecord rec = record_from_json(line);
        last_t_per_node_[rec.node_id] = rec.t;
        log_.push_back(rec);
    }
    // records loaded from disk are assumed already uplinked
    uplink_sent_ = log_.size();
}

void Store::persist(const TelemetryRecord& rec) {
    if (path_.empty()) return;
    std::ofstream out(path_, std::ios::app);
    out << record_to_json(rec) << '\n';
}

void Store::append(const TelemetryRecord& rec) {
    auto it = last_t_per_node_.find(rec.node_id);
    if (it != last_t_per_node_.end() && rec.t < it->second)
        throw ValidationError("timestamp regression for node " + std::to_string(rec.node_id));
    last_t_per_node_[rec.node_id] = rec.t;
    log_.push_back(rec);
    persist(rec);
}

void Store::set_uplink(bool connected) { connected_ = connected; }

std::vector<TelemetryRecord> Store::flush() {
    if (!connected_) return {};
    std::vector<TelemetryRecord> sent(log_.begin() + static_cast<long>(uplink_sent_),
                                      log_.end());
    uplink_sent_ = log_.size();
    return sent;
}

std::vector<TelemetryRecord> Ingestor::ingest(const std::string& payload_json) {
    std::vector<TelemetryRecord> recs = validate(payload_json);
    if (recs.empty()) return recs;
    nlohmann::json doc = nlohmann::json::parse(payload_json);
    int node = recs.front().node_id;
    bool duplicate = false;
    if (doc.contains("seq") && doc["seq"].is_number_integer()) {
        int seq = doc["seq"].get<int>();
        auto it = last_seq_per_node_.find(node);
        duplicate = it != last_seq_per_node_.end() && it->second == seq;
        last_seq_per_node_[node] = seq;
    }
    for (auto& rec : recs) {
        if (duplicate && rec.quality == Quality::Valid) rec.quality = Quality::Stale;
        store_.append(rec);
    }
    return recs;
}

std::optional<double> window_stat(const std::vector<TelemetryRecord>& log, SensorKind kind,
                                  UnixTime t_end, double window_s, Stat stat) {
    if (window_s <= 0.0) throw ValidationError("window must be positive");
    double acc = 0.0;
    size_t count = 0;
    double best = 0.0;
    for (const auto& rec : log) {
        if (rec.kind != kind || rec.quality != Quality::Valid) continue;
        if (rec.t <= t_end - window_s || rec.t > t_end) continue;
        if (count == 0) best = rec.value;
        switch (stat) {
            case Stat::Mean: acc += rec.value; break;
            case Stat::Max: best = std::max(best, rec.value); break;
            case Stat::Min: best = std::min(best, rec.value); break;
        }
        ++count;
    }
    if (count == 0) return std::nullopt;
    return stat == Stat::Mean ? acc / static_cast<double>(count) : best;
}

std::optional<double> wind_direction_mean(const std::vector<TelemetryRecord>& log,
                                          UnixTime t_end, double window_s) {
    double sx = 0.0, sy = 0.0;
    size_t count = 0;
    for (const auto& rec : log) {
        if (rec.kind != SensorKind::WindDirection || rec.quality != Quality::Valid) continue;
        if (rec.t <= t_end - window_s || rec.t > t_end) continue;
        double rad = rec.value * M_PI / 180.0;
        sx += std::sin(rad);
        sy += std::cos(rad);
        ++count;
    }
    if (count == 0) return std::nullopt;
    double deg = std::atan2(sx, sy) * 180.0 / M_PI;
    if (deg < 0.0) deg += 360.0;
    return deg;
}

std::string export_csv(const std::vector<TelemetryRecord>& log, const CsvFilter& filter) {
    std::vector<const TelemetryRecord*> rows;
    rows.reserve(log.size());
    for (const auto& rec : log) {
        if (filter.node_id && rec.node_id != *filter.node_id) continue;
        if (filter.kind && rec.kind != *filter.kind) continue;
        rows.push_back(&rec);
    }
    std::stable_sort(rows.begin(), rows.end(), [](const auto* a, const auto* b) {
        if (a->t != b->t) return a->t < b->t;
        if (a->node_id != b->node_id) return a->node_id < b->node_id;
        return static_cast<int>(a->kind) < static_cast<int>(b->kind);
    });
    std::ostringstream out;
    out << "t_iso8601,node_id,kind,value,quality\n";
    out.precision(17);
    for (const auto* rec : rows) {
        out << format_iso8601(rec->t) << ',' << rec->node_id << ','
            << sensornet::kind_name(rec->kind) << ',' << rec->value << ','
            << quality_name(rec->quality) << '\n';
    }
    return out.str();
}

}  // namespace agri::telemetry

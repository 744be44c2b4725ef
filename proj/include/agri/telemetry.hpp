#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "agri/sensornet.hpp"
#include "agri/time_util.hpp"

namespace agri::telemetry {

enum class Quality { Valid, OutOfRange, Stale };

const char* quality_name(Quality q);

struct TelemetryRecord {
    int node_id = 0;
    sensornet::SensorKind kind = sensornet::SensorKind::Temperature;
    UnixTime t = 0.0;
    double value = 0.0;
    Quality quality = Quality::Valid;

    bool operator==(const TelemetryRecord&) const = default;
};

/// Per-kind plausibility interval used by validate(). Out-of-bounds values
/// are kept and flagged OutOfRange, never dropped.
struct Bounds {
    double lo;
    double hi;
};

Bounds plausibility_bounds(sensornet::SensorKind kind);

/// Parses one broker publication into records (one per reading). Throws
/// ValidationError on schema violations; never drops a schema-valid value.
std::vector<TelemetryRecord> validate(const std::string& payload_json);

/// Append-only local log plus a store-and-forward uplink queue. Every
/// accepted record lands in the local log regardless of connectivity; the
/// uplink queue drains in order only while connected.
class Store {
public:
    Store() = default;

    /// Attaches newline-delimited JSON persistence: loads existing records,
    /// then appends one line per accepted record.
    explicit Store(const std::string& ndjson_path);

    void append(const TelemetryRecord& rec);
    void set_uplink(bool connected);
    bool uplink_connected() const { return connected_; }

    /// Sends the queued backlog if connected; returns the records sent.
    std::vector<TelemetryRecord> flush();

    const std::vector<TelemetryRecord>& log() const { return log_; }
    size_t uplink_queue_size() const { return log_.size() - uplink_sent_; }

private:
    std::vector<TelemetryRecord> log_;
    size_t uplink_sent_ = 0;  // log_ prefix already acked upstream
    bool connected_ = true;
    std::string path_;
    std::map<int, UnixTime> last_t_per_node_;

    void persist(const TelemetryRecord& rec);
};

/// Ingest pipeline: validate + duplicate marking + append. Re-delivered
/// (node, seq) pairs are retained but flagged Stale.
class Ingestor {
public:
    explicit Ingestor(Store& store) : store_(store) {}

    /// Returns the records appended for this publication.
    std::vector<TelemetryRecord> ingest(const std::string& payload_json);

private:
    Store& store_;
    std::map<int, int> last_seq_per_node_;
};

enum class Stat { Mean, Max, Min };

/// Statistic over Valid records of `kind` with t in (t_end - window, t_end].
std::optional<double> window_stat(const std::vector<TelemetryRecord>& log,
                                  sensornet::SensorKind kind, UnixTime t_end,
                                  double window_s, Stat stat);

/// Circular mean of Valid wind-direction records in the window, in degrees
/// [0, 360). Plain averaging is wrong across the 0/360 wrap.
std::optional<double> wind_direction_mean(const std::vector<TelemetryRecord>& log,
                                          UnixTime t_end, double window_s);

struct CsvFilter {
    std::optional<int> node_id;
    std::optional<sensornet::SensorKind> kind;
};

/// CSV export: t_iso8601,node_id,kind,value,quality ordered by (t, node, kind).
std::string export_csv(const std::vector<TelemetryRecord>& log, const CsvFilter& filter = {});

std::string record_to_json(const TelemetryRecord& rec);
TelemetryRecord record_from_json(const std::string& line);

}  // namespace agri::telemetry

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "agri/common.hpp"
#include "agri/radio.hpp"
#include "agri/rng.hpp"
#include "agri/time_util.hpp"

namespace agri::sensornet {

enum class SensorKind : uint8_t {
    Temperature = 0,   // degC
    Humidity = 1,      // %RH
    WindSpeed = 2,     // m/s
    WindDirection = 3, // deg, meteorological (direction wind comes from)
    Pressure = 4,      // hPa
    Rain = 5,          // mm/h
    GasCO = 6,         // ppm
    GasNH3 = 7,        // ppm
    GasNO2 = 8,        // ppm
    LightVisible = 9,  // klx
    LightIR = 10,      // klx
    UVIndex = 11,      // index
};

constexpr int kSensorKindCount = 12;

const char* kind_name(SensorKind k);
std::optional<SensorKind> kind_from_name(const std::string& name);
const char* kind_unit(SensorKind k);

struct Reading {
    SensorKind kind;
    float value;

    bool operator==(const Reading&) const = default;
};

/// Wire frame:
///   sync 0xA5 | node_id u8 | seq u16le | count u8 | count x (kind u8, value f32le) | crc16be
/// CRC-16/CCITT-FALSE over every byte after sync, excluding the CRC itself.
struct SensorFrame {
    uint8_t node_id = 0;
    uint16_t seq = 0;
    std::vector<Reading> readings;

    bool operator==(const SensorFrame&) const = default;
};

constexpr uint8_t kFrameSync = 0xA5;

enum class DecodeError { BadSync, BadCrc, Truncated, UnknownKind };

const char* decode_error_name(DecodeError e);

uint16_t crc16_ccitt_false(const uint8_t* data, size_t len);

std::vector<uint8_t> encode_frame(const SensorFrame& frame);
std::variant<SensorFrame, DecodeError> decode_frame(const std::vector<uint8_t>& buf);

/// Piecewise-linear ground-truth series per sensor kind, plus per-kind
/// Gaussian sensor noise sigma. Drives both node sampling and the synthetic
/// scene illumination.
class EnvironmentScript {
public:
    void set_series(SensorKind kind, std::vector<std::pair<double, double>> points);
    void set_noise(SensorKind kind, double sigma);

    bool has(SensorKind kind) const;
    /// Linear interpolation; clamps to first/last value outside the range.
    double sample(SensorKind kind, double t) const;
    double noise_sigma(SensorKind kind) const;
    const std::vector<std::pair<double, double>>& series(SensorKind kind) const;

private:
    std::map<SensorKind, std::vector<std::pair<double, double>>> series_;
    std::map<SensorKind, double> noise_;
};

/// One simulated field node: samples its kinds from the environment script
/// every `period_s` and emits a frame.
class NodeSim {
public:
    NodeSim(uint8_t node_id, Vec2 position, std::vector<SensorKind> kinds, double period_s);

    uint8_t node_id() const { return node_id_; }
    const Vec2& position() const { return position_; }
    double period_s() const { return period_s_; }
    const std::vector<SensorKind>& kinds() const { return kinds_; }

    /// Emits a frame when `t` has reached the next period boundary, else
    /// nothing. `t` must be monotone across calls.
    std::optional<SensorFrame> tick(double t, const EnvironmentScript& env, Rng& rng);

private:
    uint8_t node_id_;
    Vec2 position_;
    std::vector<SensorKind> kinds_;
    double period_s_;
    uint16_t next_seq_ = 0;
    long next_emit_index_ = 1;
};

struct Publication {
    std::string topic;
    std::string payload;  // JSON: {"node":..,"seq":..,"t":iso8601,"readings":[{kind,value}]}
};

enum class DropReason { OutOfRange, BadCrc };

struct Dropped {
    DropReason reason;
};

/// Radio hop + gateway decode. On success produces the MQTT-style
/// publication `agro/v1/<site>/<node_id>/obs`.
std::variant<Publication, Dropped> gateway_receive(const std::vector<uint8_t>& frame_bytes,
                                                   const Vec2& node_pos,
                                                   const Vec2& gateway_pos,
                                                   const radio::LinkBudget& link,
                                                   const std::string& site, UnixTime t,
                                                   Rng& rng);

std::string make_topic(const std::string& site, int node_id);
std::string publication_payload(const SensorFrame& frame, UnixTime t);

/// In-process topic bus standing in for the MQTT hop. Delivery is
/// synchronous, at-most-once, in publish order. `+` matches one topic level.
class Broker {
public:
    using Handler = std::function<void(const std::string& topic, const std::string& payload)>;

    void subscribe(const std::string& pattern, Handler handler);
    void publish(const std::string& topic, const std::string& payload);

    static bool topic_matches(const std::string& pattern, const std::string& topic);

private:
    std::vector<std::pair<std::string, Handler>> subscribers_;
};

}  // namespace agri::sensornet

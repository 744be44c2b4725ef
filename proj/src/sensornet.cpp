#include "agri/sensornet.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>

#include <json.hpp>

namespace agri::sensornet {

namespace {
const char* kKindNames[kSensorKindCount] = {
    "temperature", "humidity",  "wind_speed", "wind_direction", "pressure",      "rain",
    "gas_co",      "gas_nh3",   "gas_no2",    "light_visible",  "light_ir",      "uv_index"};
const char* kKindUnits[kSensorKindCount] = {
    "degC", "%RH", "m/s", "deg", "hPa", "mm/h", "ppm", "ppm", "ppm", "klx", "klx", "index"};
}  // namespace

const char* kind_name(SensorKind k) { return kKindNames[static_cast<int>(k)]; }

std::optional<SensorKind> kind_from_name(const std::string& name) {
    for (int i = 0; i < kSensorKindCount; ++i) {
        if (name == kKindNames[i]) return static_cast<SensorKind>(i);
    }
    return std::nullopt;
}

const char* kind_unit(SensorKind k) { return kKindUnits[static_cast<int>(k)]; }

const char* decode_error_name(DecodeError e) {
    switch (e) {
        case DecodeError::BadSync: return "BadSync";
        case DecodeError::BadCrc: return "BadCrc";
        case DecodeError::Truncated: return "Truncated";
        case DecodeError::UnknownKind: return "UnknownKind";
    }
    return "?";
}

uint16_t crc16_ccitt_false(const uint8_t* data, size_t len) {
    uint16_t crc = 0xFFFF;
    for (size_t i = 0; i < len; ++i) {
        crc ^= static_cast<uint16_t>(data[i]) << 8;
        for (int bit = 0; bit < 8; ++bit) {
            if (crc & 0x8000)
                crc = static_cast<uint16_t>((crc << 1) ^ 0x1021);
            else
                crc = static_cast<uint16_t>(crc << 1);
        }
    }
    return crc;
}

std::vector<uint8_t> encode_frame(const SensorFrame& frame) {
    if (frame.readings.empty()) throw ValidationError("frame needs at least one reading");
    if (frame.readings.size() > 255) throw ValidationError("frame reading count exceeds 255");
    std::vector<uint8_t> buf;
    buf.reserve(5 + 5 * frame.readings.size() + 2);
    buf.push_back(kFrameSync);
    buf.push_back(frame.node_id);
    buf.push_back(static_cast<uint8_t>(frame.seq & 0xFF));
    buf.push_back(static_cast<uint8_t>(frame.seq >> 8));
    buf.push_back(static_cast<uint8_t>(frame.readings.size()));
    for (const Reading& r : frame.readings) {
        buf.push_back(static_cast<uint8_t>(r.kind));
        uint32_t bits = std::bit_cast<uint32_t>(r.value);
        buf.push_back(static_cast<uint8_t>(bits & 0xFF));
        buf.push_back(static_cast<uint8_t>((bits >> 8) & 0xFF));
        buf.push_back(static_cast<uint8_t>((bits >> 16) & 0xFF));
        buf.push_back(static_cast<uint8_t>((bits >> 24) & 0xFF));
    }
    uint16_t crc = crc16_ccitt_false(buf.data() + 1, buf.size() - 1);
    buf.push_back(static_cast<uint8_t>(crc >> 8));
    buf.push_back(static_cast<uint8_t>(crc & 0xFF));
    return buf;
}

std::variant<SensorFrame, DecodeError> decode_frame(const std::vector<uint8_t>& buf) {
    // Minimum frame: header(5) + one reading(5) + crc(2).
    if (buf.size() < 12) return DecodeError::Truncated;
    if (buf[0] != kFrameSync) return DecodeError::BadSync;
    // CRC is checked against the whole buffer before trusting the count
    // byte, so any corrupted byte shows up as BadCrc rather than a length
    // error with a stale CRC.
    uint16_t stored = static_cast<uint16_t>((buf[buf.size() - 2] << 8) | buf[buf.size() - 1]);
    uint16_t computed = crc16_ccitt_false(buf.data() + 1, buf.size() - 3);
    if (stored != computed) return DecodeError::BadCrc;
    uint8_t count = buf[4];
    if (count < 1) return DecodeError::Truncated;
    if (buf.size() != 5 + 5 * static_cast<size_t>(count) + 2) return DecodeError::Truncated;
    SensorFrame frame;
    frame.node_id = buf[1];
    frame.seq = static_cast<uint16_t>(buf[2] | (buf[3] << 8));
    frame.readings.reserve(count);
    for (int i = 0; i < count; ++i) {
        size_t off = 5 + 5 * static_cast<size_t>(i);
        if (buf[off] >= kSensorKindCount) return DecodeError::UnknownKind;
        uint32_t bits = static_cast<uint32_t>(buf[off + 1]) |
                        (static_cast<uint32_t>(buf[off + 2]) << 8) |
                        (static_cast<uint32_t>(buf[off + 3]) << 16) |
                        (static_cast<uint32_t>(buf[off + 4]) << 24);
        frame.readings.push_back({static_cast<SensorKind>(buf[off]), std::bit_cast<float>(bits)});
    }
    return frame;
}

void EnvironmentScript::set_series(SensorKind kind,
                                   std::vector<std::pair<double, double>> points) {
    if (points.empty()) throw ValidationError("environment series needs at least one point");
    for (size_t i = 1; i < points.size(); ++i) {
        if (points[i].first <= points[i - 1].first)
            throw ValidationError("environment series timestamps must be strictly increasing");
    }
    series_[kind] = std::move(points);
}

void EnvironmentScript::set_noise(SensorKind kind, double sigma) {
    if (sigma < 0.0) throw ValidationError("noise sigma must be >= 0");
    noise_[kind] = sigma;
}

bool EnvironmentScript::has(SensorKind kind) const { return series_.count(kind) > 0; }

double EnvironmentScript::sample(SensorKind kind, double t) const {
    auto it = series_.find(kind);
    if (it == series_.end())
        throw ValidationError(std::string("no environment series for ") + kind_name(kind));
    const auto& pts = it->second;
    if (t <= pts.front().first) return pts.front().second;
    if (t >= pts.back().first) return pts.back().second;
    auto hi = std::upper_bound(pts.begin(), pts.end(), t,
                               [](double v, const auto& p) { return v < p.first; });
    auto lo = hi - 1;
    double f = (t - lo->first) / (hi->first - lo->first);
    return lo->second + f * (hi->second - lo->second);
}

double EnvironmentScript::noise_sigma(SensorKind kind) const {
    auto it = noise_.find(kind);
    return it == noise_.end() ? 0.0 : it->second;
}

const std::vector<std::pair<double, double>>& EnvironmentScript::series(
    SensorKind kind) const {
    auto it = series_.find(kind);
    if (it == series_.end())
        throw ValidationError(std::string("no environment series for ") + kind_name(kind));
    return it->second;
}

NodeSim::NodeSim(uint8_t node_id, Vec2 position, std::vector<SensorKind> kinds,
                 double period_s)
    : node_id_(node_id), position_(position), kinds_(std::move(kinds)), period_s_(period_s) {
    if (period_s_ <= 0.0) throw ValidationError("node period must be positive");
    if (kinds_.empty()) throw ValidationError("node needs at least one sensor kind");
}

std::optional<SensorFrame> NodeSim::tick(double t, const EnvironmentScript& env, Rng& rng) {
    if (t + 1e-9 < next_emit_index_ * period_s_) return std::nullopt;
    SensorFrame frame;
    frame.node_id = node_id_;
    frame.seq = next_seq_;
    next_seq_ = static_cast<uint16_t>(next_seq_ + 1);  // wraps mod 2^16
    ++next_emit_index_;
    frame.readings.reserve(kinds_.size());
    for (SensorKind k : kinds_) {
        double v = env.sample(k, t);
        double sigma = env.noise_sigma(k);
        if (sigma > 0.0) v += rng.gaussian(0.0, sigma);
        frame.readings.push_back({k, static_cast<float>(v)});
    }
    return frame;
}

std::string make_topic(const std::string& site, int node_id) {
    return "agro/v1/" + site + "/" + std::to_string(node_id) + "/obs";
}

std::string publication_payload(const SensorFrame& frame, UnixTime t) {
    nlohmann::json readings = nlohmann::json::array();
    for (const Reading& r : frame.readings) {
        readings.push_back({{"kind", kind_name(r.kind)}, {"value", r.value}});
    }
    nlohmann::json doc{{"node", frame.node_id},
                       {"seq", frame.seq},
                       {"t", format_iso8601(t)},
                       {"readings", readings}};
    return doc.dump();
}

std::variant<Publication, Dropped> gateway_receive(const std::vector<uint8_t>& frame_bytes,
                                                   const Vec2& node_pos,
                                                   const Vec2& gateway_pos,
                                                   const radio::LinkBudget& link,
                                                   const std::string& site, UnixTime t,
                                                   Rng& rng) {
    double d = std::max(distance(node_pos, gateway_pos), 1.0);
    if (!radio::delivered(link, d, rng)) return Dropped{DropReason::OutOfRange};
    auto decoded = decode_frame(frame_bytes);
    if (std::holds_alternative<DecodeError>(decoded)) return Dropped{DropReason::BadCrc};
    const SensorFrame& frame = std::get<SensorFrame>(decoded);
    return Publication{make_topic(site, frame.node_id), publication_payload(frame, t)};
}

void Broker::subscribe(const std::string& pattern, Handler handler) {
    if (pattern.empty()) throw ValidationError("topic pattern must be non-empty");
    subscribers_.emplace_back(pattern, std::move(handler));
}

void Broker::publish(const std::string& topic, const std::string& payload) {
    if (topic.empty()) throw ValidationError("topic must be non-empty");
    for (auto& [pattern, handler] : subscribers_) {
        if (topic_matches(pattern, topic)) handler(topic, payload);
    }
}

bool Broker::topic_matches(const std::string& pattern, const std::string& topic) {
    size_t pi = 0, ti = 0;
    while (pi < pattern.size() && ti < topic.size()) {
        size_t pe = pattern.find('/', pi);
        size_t te = topic.find('/', ti);
        std::string_view plevel(pattern.data() + pi,
                                (pe == std::string::npos ? pattern.size() : pe) - pi);
        std::string_view tlevel(topic.data() + ti,
                                (te == std::string::npos ? topic.size() : te) - ti);
        if (plevel != "+" && plevel != tlevel) return false;
        if (pe == std::string::npos && te == std::string::npos) return true;
        if (pe == std::string::npos || te == std::string::npos) return false;
        pi = pe + 1;
        ti = te + 1;
    }
    return pi >= pattern.size() && ti >= topic.size();
}

}  // namespace agri::sensornet

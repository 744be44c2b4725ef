#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "agri/telemetry.hpp"

using namespace agri;
using namespace agri::telemetry;
using sensornet::SensorKind;

namespace {

std::string make_payload(int node, int seq, const std::string& t,
                         std::vector<std::pair<std::string, double>> readings) {
    std::ostringstream out;
    out << "{\"node\":" << node << ",\"seq\":" << seq << ",\"t\":\"" << t
        << "\",\"readings\":[";
    for (size_t i = 0; i < readings.size(); ++i) {
        if (i) out << ',';
        out << "{\"kind\":\"" << readings[i].first << "\",\"value\":" << readings[i].second
            << '}';
    }
    out << "]}";
    return out.str();
}

TelemetryRecord rec(int node, SensorKind kind, double t, double value,
                    Quality q = Quality::Valid) {
    return {node, kind, t, value, q};
}

}  // namespace

TEST_CASE("iso8601 round trip") {
    CHECK(parse_iso8601("1970-01-01T00:00:00Z") == 0.0);
    CHECK(format_iso8601(0.0) == "1970-01-01T00:00:00.000Z");
    UnixTime t = parse_iso8601("2020-06-21T07:30:00Z");
    CHECK(format_iso8601(t) == "2020-06-21T07:30:00.000Z");
    CHECK(parse_iso8601(format_iso8601(t + 0.25)) == doctest::Approx(t + 0.25));
    CHECK_THROWS_AS(parse_iso8601("not a time"), ValidationError);
    CHECK_THROWS_AS(parse_iso8601("2020-06-21T07:30:00+07:00"), ValidationError);
}

TEST_CASE("validate marks quality by plausibility bounds") {
    auto recs = validate(make_payload(1, 0, "2020-06-21T07:00:00Z",
                                      {{"temperature", 33.0},
                                       {"humidity", 140.0},
                                       {"wind_speed", -1.0}}));
    REQUIRE(recs.size() == 3);
    CHECK(recs[0].quality == Quality::Valid);  // 33 degC is the paper's field condition
    CHECK(recs[1].quality == Quality::OutOfRange);  // >100 %RH
    CHECK(recs[2].quality == Quality::OutOfRange);  // negative speed
    CHECK(recs[0].value == 33.0);
    CHECK(recs[1].value == 140.0);  // kept for audit, not corrected
}

TEST_CASE("validate rejects malformed publications") {
    CHECK_THROWS_AS(validate("not json"), ValidationError);
    CHECK_THROWS_AS(validate("{\"node\":1}"), ValidationError);
    CHECK_THROWS_AS(validate(make_payload(1, 0, "2020-01-01T00:00:00Z", {{"bogus", 1.0}})),
                    ValidationError);
    CHECK_THROWS_AS(validate("{\"node\":\"x\",\"t\":\"2020-01-01T00:00:00Z\",\"readings\":[]}"),
                    ValidationError);
}

TEST_CASE("validation is total: record or parse error, never silence") {
    // every kind accepts its bound edges as Valid
    for (int k = 0; k < sensornet::kSensorKindCount; ++k) {
        auto kind = static_cast<SensorKind>(k);
        Bounds b = plausibility_bounds(kind);
        auto recs = validate(make_payload(1, 0, "2020-01-01T00:00:00Z",
                                          {{sensornet::kind_name(kind), b.lo},
                                           {sensornet::kind_name(kind), b.hi}}));
        REQUIRE(recs.size() == 2);
        CHECK(recs[0].quality == Quality::Valid);
        CHECK(recs[1].quality == Quality::Valid);
    }
}

TEST_CASE("store append/flush semantics") {
    Store store;
    SUBCASE("connected: append then flush sends everything once") {
        for (int i = 0; i < 3; ++i)
            store.append(rec(1, SensorKind::Temperature, 100.0 + i, 30.0));
        auto sent = store.flush();
        CHECK(sent.size() == 3);
        CHECK(store.uplink_queue_size() == 0);
        CHECK(store.flush().empty());
    }
    SUBCASE("disconnected appends queue up, reconnect flushes in order") {
        store.set_uplink(false);
        for (int i = 0; i < 5; ++i)
            store.append(rec(1, SensorKind::Temperature, 100.0 + i, 30.0 + i));
        CHECK(store.flush().empty());  // not connected: nothing leaves
        CHECK(store.log().size() == 5);  // but the local log has everything
        CHECK(store.uplink_queue_size() == 5);
        store.set_uplink(true);
        auto sent = store.flush();
        REQUIRE(sent.size() == 5);
        for (int i = 0; i < 5; ++i) CHECK(sent[static_cast<size_t>(i)].value == 30.0 + i);
    }
    SUBCASE("timestamp regression per node rejected") {
        store.append(rec(1, SensorKind::Temperature, 100.0, 30.0));
        CHECK_THROWS_AS(store.append(rec(1, SensorKind::Humidity, 99.0, 50.0)),
                        ValidationError);
        // other nodes are independent
        CHECK_NOTHROW(store.append(rec(2, SensorKind::Temperature, 50.0, 31.0)));
    }
}

TEST_CASE("store-and-forward never loses a record (model-based)") {
    Store store;
    std::vector<TelemetryRecord> reference;  // what a perfect uplink would see
    std::vector<TelemetryRecord> uplinked;
    Rng rng(2024);
    double t = 0.0;
    for (int event = 0; event < 1000; ++event) {
        double p = rng.uniform();
        if (p < 0.15) {
            store.set_uplink(rng.uniform() < 0.5);
        } else if (p < 0.25) {
            for (const auto& r : store.flush()) uplinked.push_back(r);
        } else {
            t += rng.uniform(0.1, 10.0);
            auto r = rec(1 + static_cast<int>(rng.uniform() * 2.99), SensorKind::Pressure, t,
                         rng.uniform(900.0, 1100.0));
            store.append(r);
            reference.push_back(r);
        }
    }
    store.set_uplink(true);
    for (const auto& r : store.flush()) uplinked.push_back(r);
    // zero loss, exact order
    REQUIRE(store.log().size() == reference.size());
    REQUIRE(uplinked.size() == reference.size());
    for (size_t i = 0; i < reference.size(); ++i) {
        CHECK(store.log()[i] == reference[i]);
        CHECK(uplinked[i] == reference[i]);
    }
}

TEST_CASE("ndjson persistence survives reload") {
    namespace fs = std::filesystem;
    fs::path path = fs::temp_directory_path() / "agri_store_test.ndjson";
    fs::remove(path);
    {
        Store store(path.string());
        store.append(rec(1, SensorKind::Temperature, 100.0, 33.0));
        store.append(rec(1, SensorKind::Rain, 160.0, 0.0));
    }
    Store reloaded(path.string());
    REQUIRE(reloaded.log().size() == 2);
    CHECK(reloaded.log()[0].value == 33.0);
    CHECK(reloaded.log()[1].kind == SensorKind::Rain);
    fs::remove(path);
}

TEST_CASE("ingestor marks duplicate (node, seq) deliveries stale") {
    Store store;
    Ingestor ingestor(store);
    ingestor.ingest(make_payload(1, 10, "2020-01-01T00:00:00Z", {{"temperature", 30.0}}));
    ingestor.ingest(make_payload(1, 10, "2020-01-01T00:00:00Z", {{"temperature", 30.0}}));
    ingestor.ingest(make_payload(1, 11, "2020-01-01T00:01:00Z", {{"temperature", 31.0}}));
    REQUIRE(store.log().size() == 3);
    CHECK(store.log()[0].quality == Quality::Valid);
    CHECK(store.log()[1].quality == Quality::Stale);
    CHECK(store.log()[2].quality == Quality::Valid);
}

TEST_CASE("window_stat") {
    std::vector<TelemetryRecord> log;
    SUBCASE("single record mean") {
        log.push_back(rec(1, SensorKind::WindSpeed, 100.0, 4.2));
        auto m = window_stat(log, SensorKind::WindSpeed, 150.0, 100.0, Stat::Mean);
        REQUIRE(m.has_value());
        CHECK(*m == doctest::Approx(4.2));
    }
    SUBCASE("mean of 2,4,6 is 4") {
        for (int i = 0; i < 3; ++i)
            log.push_back(rec(1, SensorKind::WindSpeed, 100.0 + i, 2.0 + 2.0 * i));
        CHECK(*window_stat(log, SensorKind::WindSpeed, 110.0, 60.0, Stat::Mean) ==
              doctest::Approx(4.0));
        CHECK(*window_stat(log, SensorKind::WindSpeed, 110.0, 60.0, Stat::Max) == 6.0);
        CHECK(*window_stat(log, SensorKind::WindSpeed, 110.0, 60.0, Stat::Min) == 2.0);
    }
    SUBCASE("window boundaries are (t_end - w, t_end]") {
        log.push_back(rec(1, SensorKind::WindSpeed, 40.0, 1.0));   // exactly t_end - w: out
        log.push_back(rec(1, SensorKind::WindSpeed, 100.0, 3.0));  // exactly t_end: in
        log.push_back(rec(1, SensorKind::WindSpeed, 100.5, 9.0));  // after t_end: out
        CHECK(*window_stat(log, SensorKind::WindSpeed, 100.0, 60.0, Stat::Mean) ==
              doctest::Approx(3.0));
    }
    SUBCASE("none without data; invalid records ignored") {
        CHECK_FALSE(window_stat(log, SensorKind::WindSpeed, 100.0, 60.0, Stat::Mean));
        log.push_back(rec(1, SensorKind::WindSpeed, 100.0, -5.0, Quality::OutOfRange));
        CHECK_FALSE(window_stat(log, SensorKind::WindSpeed, 100.0, 60.0, Stat::Mean));
    }
    SUBCASE("matches a brute-force rescan on random data") {
        Rng rng(11);
        double t = 0.0;
        for (int i = 0; i < 1000; ++i) {
            t += rng.uniform(0.0, 2.0);
            log.push_back(rec(1, SensorKind::Temperature, t, rng.uniform(-10.0, 45.0)));
        }
        double t_end = t * 0.7, window = t * 0.3;
        double acc = 0.0;
        size_t n = 0;
        for (const auto& r : log) {
            if (r.t > t_end - window && r.t <= t_end) {
                acc += r.value;
                ++n;
            }
        }
        REQUIRE(n > 0);
        CHECK(*window_stat(log, SensorKind::Temperature, t_end, window, Stat::Mean) ==
              doctest::Approx(acc / n).epsilon(1e-12));
    }
}

TEST_CASE("wind_direction_mean handles the 0/360 wrap") {
    std::vector<TelemetryRecord> log;
    log.push_back(rec(1, SensorKind::WindDirection, 100.0, 350.0));
    log.push_back(rec(1, SensorKind::WindDirection, 101.0, 10.0));
    auto mean = wind_direction_mean(log, 110.0, 60.0);
    REQUIRE(mean.has_value());
    CHECK(*mean == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("csv export") {
    std::vector<TelemetryRecord> log;
    SUBCASE("empty log gives header only") {
        CHECK(export_csv(log) == "t_iso8601,node_id,kind,value,quality\n");
    }
    SUBCASE("two records give three lines, sorted") {
        log.push_back(rec(2, SensorKind::Temperature, 200.0, 31.0));
        log.push_back(rec(1, SensorKind::Temperature, 100.0, 30.0));
        std::string csv = export_csv(log);
        CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
        CHECK(csv.find("1970-01-01T00:01:40.000Z,1,") < csv.find("1970-01-01T00:03:20.000Z,2,"));
    }
    SUBCASE("round trip through parse-back equals the log") {
        Rng rng(3);
        double t = 1.5e9;
        for (int i = 0; i < 50; ++i) {
            t += rng.uniform(0.5, 100.0);
            log.push_back(rec(1 + (i % 3),
                              static_cast<SensorKind>(i % sensornet::kSensorKindCount), t,
                              std::round(rng.uniform(0.0, 100.0) * 1000.0) / 1000.0));
        }
        std::string csv = export_csv(log);
        // parse back
        std::istringstream in(csv);
        std::string line;
        std::getline(in, line);  // header
        std::vector<TelemetryRecord> parsed;
        while (std::getline(in, line)) {
            TelemetryRecord r;
            size_t p1 = line.find(','), p2 = line.find(',', p1 + 1),
                   p3 = line.find(',', p2 + 1), p4 = line.find(',', p3 + 1);
            r.t = parse_iso8601(line.substr(0, p1));
            r.node_id = std::stoi(line.substr(p1 + 1, p2 - p1 - 1));
            r.kind = *sensornet::kind_from_name(line.substr(p2 + 1, p3 - p2 - 1));
            r.value = std::stod(line.substr(p3 + 1, p4 - p3 - 1));
            r.quality = line.substr(p4 + 1) == "valid" ? Quality::Valid : Quality::OutOfRange;
            parsed.push_back(r);
        }
        REQUIRE(parsed.size() == log.size());
        std::stable_sort(log.begin(), log.end(), [](const auto& a, const auto& b) {
            return a.t < b.t;
        });
        for (size_t i = 0; i < log.size(); ++i) {
            CHECK(parsed[i].node_id == log[i].node_id);
            CHECK(parsed[i].kind == log[i].kind);
            CHECK(parsed[i].value == doctest::Approx(log[i].value).epsilon(1e-12));
            CHECK(std::abs(parsed[i].t - log[i].t) < 0.001);
        }
    }
}

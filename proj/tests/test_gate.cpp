#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "agri/gate.hpp"

using namespace agri;
using namespace agri::gate;
using sensornet::SensorKind;
using telemetry::Quality;
using telemetry::TelemetryRecord;

namespace {

const geo::GeoPoint kHanoi{21.03, 105.85, 15.0};

struct LogBuilder {
    std::vector<TelemetryRecord> log;
    UnixTime t_end;

    explicit LogBuilder(UnixTime end) : t_end(end) {}

    // five samples across the 10-minute window
    LogBuilder& with(SensorKind kind, double value) {
        for (int i = 0; i < 5; ++i)
            log.push_back({1, kind, t_end - 60.0 * i, value, Quality::Valid});
        return *this;
    }
};

}  // namespace

TEST_CASE("sun_elevation") {
    SUBCASE("equator, equinox, local solar noon is ~90 deg") {
        UnixTime t = parse_iso8601("2021-03-20T12:07:00Z");
        CHECK(sun_elevation(t, {0.0, 0.0, 0.0}) > 89.5);
    }
    SUBCASE("solar midnight near the equinox is below the horizon") {
        UnixTime t = parse_iso8601("2021-03-20T00:07:00Z");
        CHECK(sun_elevation(t, {0.0, 0.0, 0.0}) < 0.0);
    }
    SUBCASE("Hanoi fixed instant matches the NOAA oracle within 0.5 deg") {
        // oracle value computed offline with the NOAA spreadsheet equations
        UnixTime t = parse_iso8601("2020-12-23T05:00:00Z");
        CHECK(std::abs(sun_elevation(t, kHanoi) - 45.5336) < 0.5);
    }
    SUBCASE("the survey takeoff instant has high sun") {
        UnixTime t = parse_iso8601("2020-06-21T07:30:00Z");  // 14:30 local
        CHECK(std::abs(sun_elevation(t, kHanoi) - 54.9497) < 0.5);
    }
}

TEST_CASE("evaluate: hard blocks") {
    UnixTime noon = parse_iso8601("2020-06-21T05:00:00Z");
    SUBCASE("mean wind 11 m/s blocks takeoff") {
        auto b = LogBuilder(noon).with(SensorKind::WindSpeed, 11.0).with(SensorKind::Rain, 0.0);
        Readiness r = evaluate(b.log, noon, kHanoi);
        CHECK_FALSE(r.go);
        REQUIRE(r.blockers.size() == 1);
        CHECK(r.blockers[0] == Blocker::HighWind);
        CHECK_FALSE(r.optimize_for_wind);
    }
    SUBCASE("rain blocks takeoff") {
        auto b = LogBuilder(noon).with(SensorKind::WindSpeed, 2.0).with(SensorKind::Rain, 3.0);
        Readiness r = evaluate(b.log, noon, kHanoi);
        CHECK_FALSE(r.go);
        REQUIRE(r.blockers.size() == 1);
        CHECK(r.blockers[0] == Blocker::Rain);
        CHECK(r.inputs.raining);
    }
    SUBCASE("drizzle below 0.1 mm/h is not rain") {
        auto b = LogBuilder(noon).with(SensorKind::WindSpeed, 2.0).with(SensorKind::Rain, 0.05);
        Readiness r = evaluate(b.log, noon, kHanoi);
        CHECK(r.go);
        CHECK_FALSE(r.inputs.raining);
    }
    SUBCASE("missing wind data is a fail-safe no-go") {
        auto b = LogBuilder(noon).with(SensorKind::Rain, 0.0);
        Readiness r = evaluate(b.log, noon, kHanoi);
        CHECK_FALSE(r.go);
        REQUIRE(r.blockers.size() == 1);
        CHECK(r.blockers[0] == Blocker::MissingData);
    }
}

TEST_CASE("evaluate: the paper's field conditions are a clean go") {
    // 33 degC, 40 %RH, 8.5 km/h = 2.36 m/s wind, 14:30, UV 7.9, 85 klx
    UnixTime takeoff = parse_iso8601("2020-06-21T07:30:00Z");
    auto b = LogBuilder(takeoff)
                 .with(SensorKind::Temperature, 33.0)
                 .with(SensorKind::Humidity, 40.0)
                 .with(SensorKind::WindSpeed, 2.36)
                 .with(SensorKind::Rain, 0.0)
                 .with(SensorKind::UVIndex, 7.9)
                 .with(SensorKind::LightVisible, 85.0);
    Readiness r = evaluate(b.log, takeoff, kHanoi);
    CHECK(r.go);
    CHECK(r.blockers.empty());
    CHECK(r.warnings.empty());
    CHECK_FALSE(r.optimize_for_wind);  // 2.36 m/s is below the 3 m/s band
    CHECK(r.inputs.mean_wind_mps == doctest::Approx(2.36));
}

TEST_CASE("evaluate: wind optimization band") {
    UnixTime noon = parse_iso8601("2020-06-21T05:00:00Z");
    auto readiness_at_wind = [&](double wind) {
        auto b = LogBuilder(noon).with(SensorKind::WindSpeed, wind).with(SensorKind::Rain, 0.0);
        return evaluate(b.log, noon, kHanoi);
    };
    SUBCASE("5 m/s: go with wind-aligned planning") {
        Readiness r = readiness_at_wind(5.0);
        CHECK(r.go);
        CHECK(r.optimize_for_wind);
    }
    SUBCASE("boundaries: exactly 3 and exactly 10 both optimize, 10 still goes") {
        CHECK(readiness_at_wind(3.0).optimize_for_wind);
        Readiness r10 = readiness_at_wind(10.0);
        CHECK(r10.go);
        CHECK(r10.optimize_for_wind);
        CHECK_FALSE(readiness_at_wind(10.0001).go);
        CHECK_FALSE(readiness_at_wind(2.9999).optimize_for_wind);
    }
}

TEST_CASE("evaluate: warnings") {
    SUBCASE("low sun warns but does not block") {
        UnixTime late = parse_iso8601("2020-06-21T10:30:00Z");  // 17:30 local
        auto b = LogBuilder(late).with(SensorKind::WindSpeed, 1.0).with(SensorKind::Rain, 0.0);
        Readiness r = evaluate(b.log, late, kHanoi);
        REQUIRE(r.inputs.sun_elevation_deg < 45.0);
        CHECK(r.go);
        REQUIRE(r.warnings.size() >= 1);
        CHECK(r.warnings[0] == Warning::LowSunAngle);
    }
    SUBCASE("sun exactly at 45 deg does not warn (strict inequality)") {
        UnixTime noon = parse_iso8601("2020-06-21T05:00:00Z");
        auto b = LogBuilder(noon).with(SensorKind::WindSpeed, 1.0).with(SensorKind::Rain, 0.0);
        Readiness r = evaluate(b.log, noon, kHanoi);
        GateConfig cfg;
        cfg.sun_warn_deg = r.inputs.sun_elevation_deg;  // threshold == elevation
        Readiness r2 = evaluate(b.log, noon, kHanoi, cfg);
        CHECK(r2.warnings.empty());
    }
    SUBCASE("dim light under high sun warns of cloud") {
        UnixTime noon = parse_iso8601("2020-06-21T05:00:00Z");
        auto b = LogBuilder(noon)
                     .with(SensorKind::WindSpeed, 1.0)
                     .with(SensorKind::Rain, 0.0)
                     .with(SensorKind::LightVisible, 20.0);  // well under 40% of clear sky
        Readiness r = evaluate(b.log, noon, kHanoi);
        CHECK(r.go);
        REQUIRE(r.warnings.size() == 1);
        CHECK(r.warnings[0] == Warning::CloudLowLight);
    }
    SUBCASE("the paper's 80-90 klx at high sun reads as clear") {
        UnixTime takeoff = parse_iso8601("2020-06-21T07:30:00Z");
        for (double klx : {80.0, 85.0, 90.0}) {
            auto b = LogBuilder(takeoff)
                         .with(SensorKind::WindSpeed, 1.0)
                         .with(SensorKind::Rain, 0.0)
                         .with(SensorKind::LightVisible, klx);
            CHECK(evaluate(b.log, takeoff, kHanoi).warnings.empty());
        }
    }
}

TEST_CASE("evaluate: wind monotonicity never flips no-go back to go") {
    UnixTime noon = parse_iso8601("2020-06-21T05:00:00Z");
    bool seen_nogo = false;
    for (double wind = 0.0; wind <= 20.0; wind += 0.25) {
        auto b = LogBuilder(noon).with(SensorKind::WindSpeed, wind).with(SensorKind::Rain, 0.0);
        Readiness r = evaluate(b.log, noon, kHanoi);
        if (seen_nogo) CHECK_FALSE(r.go);
        if (!r.go) seen_nogo = true;
    }
    CHECK(seen_nogo);
}

TEST_CASE("evaluate is pure: identical inputs give identical results") {
    UnixTime noon = parse_iso8601("2020-06-21T05:00:00Z");
    auto b = LogBuilder(noon)
                 .with(SensorKind::WindSpeed, 5.0)
                 .with(SensorKind::Rain, 0.0)
                 .with(SensorKind::LightVisible, 85.0);
    Readiness a = evaluate(b.log, noon, kHanoi);
    Readiness c = evaluate(b.log, noon, kHanoi);
    CHECK(a.go == c.go);
    CHECK(a.optimize_for_wind == c.optimize_for_wind);
    CHECK(a.blockers == c.blockers);
    CHECK(a.warnings == c.warnings);
    CHECK(a.inputs.mean_wind_mps == c.inputs.mean_wind_mps);
    CHECK(a.inputs.sun_elevation_deg == c.inputs.sun_elevation_deg);
    CHECK(readiness_to_json(a) == readiness_to_json(c));
}

TEST_CASE("readiness invariants") {
    UnixTime noon = parse_iso8601("2020-06-21T05:00:00Z");
    Rng rng(55);
    for (int i = 0; i < 200; ++i) {
        LogBuilder b(noon);
        if (rng.uniform() < 0.9) b.with(SensorKind::WindSpeed, rng.uniform(0.0, 15.0));
        if (rng.uniform() < 0.9) b.with(SensorKind::Rain, rng.uniform(0.0, 1.0));
        if (rng.uniform() < 0.5) b.with(SensorKind::LightVisible, rng.uniform(0.0, 120.0));
        Readiness r = evaluate(b.log, noon, kHanoi);
        // NoGo implies a non-empty blocker list; optimize implies Go
        if (!r.go) CHECK_FALSE(r.blockers.empty());
        if (r.optimize_for_wind) CHECK(r.go);
    }
}

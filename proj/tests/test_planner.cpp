#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "agri/planner.hpp"
#include "agri/rng.hpp"

using namespace agri;
using namespace agri::planner;
using geo::CameraModel;
using geo::FieldPolygon;

namespace {

const std::vector<Vec2> kSquare100{{0, 0}, {100, 0}, {100, 100}, {0, 100}};

CameraModel rededge_camera() {
    CameraModel cam;
    cam.hfov_deg = 47.2;
    cam.vfov_deg = 35.4;
    return cam;
}

SweepBasis manual_basis(double wind_dir_deg, double leg_spacing, double trigger_spacing) {
    SweepBasis b;
    b.j_hat = Wind{1.0, wind_dir_deg}.flow_unit();
    b.i_hat = b.j_hat.perp();
    b.leg_spacing_m = leg_spacing;
    b.trigger_spacing_m = trigger_spacing;
    return b;
}

// Monte Carlo fraction of polygon area covered by the union of capture
// footprints (axis = sweep frame, captures centered on waypoints).
double coverage_fraction(const FieldPolygon& poly, const MissionPlan& plan,
                         const SweepBasis& basis, double foot_i, double foot_j, Rng& rng,
                         int samples) {
    double xmin = 1e18, xmax = -1e18, ymin = 1e18, ymax = -1e18;
    for (const Vec2& v : poly.vertices()) {
        xmin = std::min(xmin, v.x);
        xmax = std::max(xmax, v.x);
        ymin = std::min(ymin, v.y);
        ymax = std::max(ymax, v.y);
    }
    int inside = 0, covered = 0;
    for (int s = 0; s < samples; ++s) {
        Vec2 p{rng.uniform(xmin, xmax), rng.uniform(ymin, ymax)};
        if (!poly.contains(p)) continue;
        ++inside;
        for (const Waypoint& wp : plan.waypoints) {
            Vec2 d = p - wp.position;
            if (std::abs(d.dot(basis.i_hat)) <= foot_i * 0.5 &&
                std::abs(d.dot(basis.j_hat)) <= foot_j * 0.5) {
                ++covered;
                break;
            }
        }
    }
    REQUIRE(inside > 0);
    return static_cast<double>(covered) / inside;
}

std::vector<Vec2> random_polygon(Rng& rng, int sides, double target_area_m2) {
    // star-shaped construction around the origin; possibly concave
    std::vector<double> angles;
    for (int i = 0; i < sides; ++i) angles.push_back(rng.uniform(0.0, 2.0 * M_PI));
    std::sort(angles.begin(), angles.end());
    for (size_t i = 1; i < angles.size(); ++i) {
        if (angles[i] - angles[i - 1] < 0.05) angles[i] = angles[i - 1] + 0.05;
    }
    double base_r = std::sqrt(target_area_m2 / M_PI);
    std::vector<Vec2> verts;
    for (double a : angles) {
        double r = base_r * rng.uniform(0.6, 1.3);
        verts.push_back({r * std::cos(a), r * std::sin(a)});
    }
    return verts;
}

}  // namespace

TEST_CASE("sweep_basis geometry") {
    SUBCASE("wind from north: legs run east-west, 50 m spacings") {
        CameraModel cam;
        cam.hfov_deg = 90.0;
        cam.vfov_deg = 90.0;
        SweepBasis b = sweep_basis(0.0, cam, 25.0, 0.0, 0.0);
        CHECK(std::abs(b.i_hat.y) < 1e-9);  // east-west legs
        CHECK(std::abs(std::abs(b.i_hat.x) - 1.0) < 1e-9);
        CHECK(b.leg_spacing_m == doctest::Approx(50.0));
        CHECK(b.trigger_spacing_m == doctest::Approx(50.0));
    }
    SUBCASE("survey geometry: 50 m altitude, 75/75 overlap") {
        SweepBasis b = sweep_basis(0.0, rededge_camera(), 50.0, 0.75, 0.75);
        CHECK(b.leg_spacing_m == doctest::Approx(7.98).epsilon(0.003));
        CHECK(b.trigger_spacing_m == doctest::Approx(10.92).epsilon(0.002));
    }
    SUBCASE("halving sidelap doubles nothing else: linear in (1 - overlap)") {
        SweepBasis b75 = sweep_basis(0.0, rededge_camera(), 50.0, 0.75, 0.75);
        SweepBasis b50 = sweep_basis(0.0, rededge_camera(), 50.0, 0.50, 0.75);
        CHECK(b50.leg_spacing_m / b75.leg_spacing_m == doctest::Approx(2.0).epsilon(1e-9));
        CHECK(b50.trigger_spacing_m == doctest::Approx(b75.trigger_spacing_m));
    }
    SUBCASE("orthogonality and wind alignment invariants") {
        Rng rng(17);
        for (int i = 0; i < 100; ++i) {
            double dir = rng.uniform(0.0, 360.0);
            SweepBasis b = sweep_basis(dir, rededge_camera(), 50.0, 0.75, 0.75);
            CHECK(std::abs(b.i_hat.dot(b.j_hat)) <= 1e-9);
            Vec2 flow = Wind{1.0, dir}.flow_unit();
            CHECK(std::abs(b.j_hat.cross(flow)) <= 1e-6);  // parallel to wind
            CHECK(std::abs(b.i_hat.dot(flow)) <= 1e-6);    // legs cross-wind
        }
    }
    SUBCASE("invalid overlaps rejected") {
        CHECK_THROWS_AS(sweep_basis(0.0, rededge_camera(), 50.0, 1.0, 0.5), ValidationError);
        CHECK_THROWS_AS(sweep_basis(0.0, rededge_camera(), 50.0, -0.1, 0.5), ValidationError);
    }
}

TEST_CASE("clip_line_to_polygon") {
    FieldPolygon square(kSquare100);
    SUBCASE("interior horizontal line") {
        auto segs = clip_line_to_polygon(square, {0.0, 50.0}, {1.0, 0.0});
        REQUIRE(segs.size() == 1);
        CHECK(segs[0].first == doctest::Approx(0.0));
        CHECK(segs[0].second == doctest::Approx(100.0));
    }
    SUBCASE("line coincident with an edge") {
        auto segs = clip_line_to_polygon(square, {0.0, 100.0}, {1.0, 0.0});
        REQUIRE(segs.size() == 1);
        CHECK(segs[0].second - segs[0].first == doctest::Approx(100.0));
    }
    SUBCASE("miss") {
        CHECK(clip_line_to_polygon(square, {0.0, 101.0}, {1.0, 0.0}).empty());
    }
    SUBCASE("concave polygon gives two segments") {
        FieldPolygon notched({{0, 0}, {10, 0}, {10, 10}, {6, 10}, {6, 4}, {4, 4}, {4, 10},
                              {0, 10}});
        auto segs = clip_line_to_polygon(notched, {0.0, 8.0}, {1.0, 0.0});
        REQUIRE(segs.size() == 2);
        CHECK(segs[0].first == doctest::Approx(0.0));
        CHECK(segs[0].second == doctest::Approx(4.0));
        CHECK(segs[1].first == doctest::Approx(6.0));
        CHECK(segs[1].second == doctest::Approx(10.0));
    }
}

TEST_CASE("plan_mission: hand-constructed square case") {
    // 100 m square, wind from the east: 4 north-south legs of 5 captures
    FieldPolygon square(kSquare100);
    SweepBasis basis = manual_basis(90.0, 32.0, 25.0);
    MissionPlan plan = plan_mission(square, basis, 50.0, 5.0, 3600.0, {3.0, 90.0}, {});
    CHECK(plan.status == PlanStatus::Ok);
    CHECK(plan.leg_count == 4);
    CHECK(plan.capture_count == 20);
    // all captures inside (boundary counts), constant altitude
    for (const Waypoint& wp : plan.waypoints) {
        CHECK(square.contains(wp.position));
        CHECK(wp.altitude_m == 50.0);
        CHECK(wp.action == Action::TriggerCapture);
    }
    // legs perpendicular to the wind
    Vec2 flow = Wind{1.0, 90.0}.flow_unit();
    for (size_t i = 1; i < plan.waypoints.size(); ++i) {
        Vec2 d = plan.waypoints[i].position - plan.waypoints[i - 1].position;
        if (d.norm() < 1e-9) continue;
        Vec2 u = d.unit();
        // either a leg segment (crosswind) or a step (along wind)
        bool crosswind = std::abs(u.dot(flow)) <= 1e-6;
        bool along = std::abs(u.cross(flow)) <= 1e-6;
        CHECK((crosswind || along));
    }
}

TEST_CASE("plan_mission: sweep starts upwind so steps ride the tailwind") {
    FieldPolygon square(kSquare100);
    SweepBasis basis = manual_basis(90.0, 32.0, 25.0);  // wind from east, flow -x
    MissionPlan plan = plan_mission(square, basis, 50.0, 5.0, 3600.0, {3.0, 90.0}, {});
    REQUIRE(plan.capture_count > 0);
    Vec2 flow = Wind{1.0, 90.0}.flow_unit();
    // first leg near the upwind (east) edge, last near the west edge
    CHECK(plan.waypoints.front().position.x > 90.0);
    CHECK(plan.waypoints.back().position.x < 10.0);
    // every step between legs moves with the flow
    for (size_t i = 1; i < plan.waypoints.size(); ++i) {
        Vec2 d = plan.waypoints[i].position - plan.waypoints[i - 1].position;
        double along = d.dot(flow);
        if (std::abs(d.dot(basis.j_hat)) > 1e-6) CHECK(along > 0.0);
    }
}

TEST_CASE("plan_mission: survey reconstruction lands near the published count") {
    // 1 ha at 50 m with 75/75 overlaps: 5 bands x captures should bracket 785
    FieldPolygon square(kSquare100);
    SweepBasis basis = sweep_basis(90.0, rededge_camera(), 50.0, 0.75, 0.75);
    MissionPlan plan = plan_mission(square, basis, 50.0, 5.0, 720.0, {2.36, 90.0}, {});
    CHECK(plan.status == PlanStatus::Ok);
    CHECK(plan.capture_count >= 140);
    CHECK(plan.capture_count <= 170);
    int band_images = 5 * plan.capture_count;
    CHECK(band_images >= 700);
    CHECK(band_images <= 850);
    CHECK(plan.est_duration_s <= 720.0);  // fits the 12-minute endurance
}

TEST_CASE("plan_mission: degenerate polygon") {
    FieldPolygon tiny({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
    SweepBasis basis = manual_basis(0.0, 10.0, 40.0);
    MissionPlan plan = plan_mission(tiny, basis, 20.0, 5.0, 600.0, {1.0, 0.0}, {});
    // single center leg, captures collapse onto the chord midpoint
    CHECK(plan.leg_count == 1);
    CHECK(plan.capture_count == 1);
    CHECK(tiny.contains(plan.waypoints[0].position));
}

TEST_CASE("plan_mission: infeasible when endurance is exceeded") {
    FieldPolygon square(kSquare100);
    SweepBasis basis = manual_basis(90.0, 8.0, 11.0);
    MissionPlan plan = plan_mission(square, basis, 50.0, 5.0, 10.0, {2.0, 90.0}, {});
    CHECK(plan.status == PlanStatus::Infeasible);
    CHECK_FALSE(plan.feasible());
    CHECK(plan.capture_count > 0);  // plan still returned, flagged
}

TEST_CASE("plan_mission: coverage on random polygons") {
    Rng rng(909);
    int runs = 0;
    while (runs < 25) {
        double area = rng.uniform(2000.0, 20000.0);
        auto verts = random_polygon(rng, 4 + static_cast<int>(rng.uniform() * 6.99), area);
        FieldPolygon poly(verts);
        if (poly.area() < 500.0) continue;
        double wind_dir = rng.uniform(0.0, 360.0);
        double sidelap = rng.uniform(0.1, 0.8);
        double frontlap = rng.uniform(0.1, 0.8);
        SweepBasis basis = sweep_basis(wind_dir, rededge_camera(), 50.0, sidelap, frontlap);
        MissionPlan plan =
            plan_mission(poly, basis, 50.0, 5.0, 1e9, {rng.uniform(0.0, 8.0), wind_dir}, {});
        REQUIRE(plan.capture_count > 0);
        geo::Footprint fp = geo::footprint(rededge_camera(), 50.0);
        double frac = coverage_fraction(poly, plan, basis, fp.width, fp.height, rng, 4000);
        CHECK(frac >= 0.99);
        ++runs;
    }
}

TEST_CASE("plan_mission: rotating wind and polygon together rotates the plan") {
    Rng rng(31);
    for (double theta_deg : {37.0, 120.0, 261.5}) {
        double theta = theta_deg * M_PI / 180.0;
        double c = std::cos(-theta), s = std::sin(-theta);  // wind bearings turn clockwise
        // square centered at the origin so rotation is about its centroid
        std::vector<Vec2> base{{-50, -50}, {50, -50}, {50, 50}, {-50, 50}};
        std::vector<Vec2> rotated;
        for (const Vec2& v : base) rotated.push_back({c * v.x - s * v.y, s * v.x + c * v.y});
        SweepBasis b0 = manual_basis(90.0, 8.0, 11.0);
        SweepBasis b1 = manual_basis(90.0 + theta_deg, 8.0, 11.0);
        MissionPlan p0 = plan_mission(FieldPolygon(base), b0, 50.0, 5.0, 1e9, {5.0, 90.0}, {});
        MissionPlan p1 = plan_mission(FieldPolygon(rotated), b1, 50.0, 5.0, 1e9,
                                      {5.0, 90.0 + theta_deg}, {});
        REQUIRE(p0.capture_count == p1.capture_count);
        for (size_t i = 0; i < p0.waypoints.size(); ++i) {
            const Vec2& v = p0.waypoints[i].position;
            Vec2 expect{c * v.x - s * v.y, s * v.x + c * v.y};
            CHECK(distance(expect, p1.waypoints[i].position) < 1e-6);
        }
    }
}

TEST_CASE("estimate_energy") {
    EnergyModel model;  // 390 W base
    SUBCASE("zero wind: 1000 m at 5 m/s costs 200 s and 21.7 Wh") {
        std::vector<Waypoint> path{{{0, 0}, 50.0, Action::TriggerCapture},
                                   {{1000, 0}, 50.0, Action::TriggerCapture}};
        EnergyEstimate est = estimate_energy(path, {0.0, 0.0}, 5.0, model);
        CHECK(est.duration_s == doctest::Approx(200.0).epsilon(1e-12));
        CHECK(est.energy_wh == doctest::Approx(21.6667).epsilon(1e-4));
        CHECK(est.feasible);
    }
    SUBCASE("pure crosswind does not change duration") {
        std::vector<Waypoint> path{{{0, 0}, 50.0, Action::TriggerCapture},
                                   {{1000, 0}, 50.0, Action::TriggerCapture}};
        EnergyEstimate calm = estimate_energy(path, {0.0, 0.0}, 5.0, model);
        EnergyEstimate cross = estimate_energy(path, {6.0, 180.0}, 5.0, model);  // from south
        CHECK(cross.duration_s == doctest::Approx(calm.duration_s).epsilon(1e-9));
    }
    SUBCASE("headwind equals airspeed: infeasible") {
        std::vector<Waypoint> path{{{0, 0}, 50.0, Action::TriggerCapture},
                                   {{0, 1000}, 50.0, Action::TriggerCapture}};
        EnergyEstimate est = estimate_energy(path, {5.0, 0.0}, 5.0, model);  // from north
        CHECK_FALSE(est.feasible);
    }
    SUBCASE("headwind slows and costs more than tailwind") {
        std::vector<Waypoint> up{{{0, 0}, 50.0, Action::TriggerCapture},
                                 {{0, 1000}, 50.0, Action::TriggerCapture}};
        std::vector<Waypoint> down{{{0, 1000}, 50.0, Action::TriggerCapture},
                                   {{0, 0}, 50.0, Action::TriggerCapture}};
        Wind wind{3.0, 0.0};  // from north
        EnergyEstimate upwind = estimate_energy(up, wind, 5.0, model);
        EnergyEstimate downwind = estimate_energy(down, wind, 5.0, model);
        CHECK(upwind.duration_s > downwind.duration_s);
        CHECK(upwind.energy_wh > downwind.energy_wh);
        CHECK(upwind.duration_s == doctest::Approx(500.0));   // 1000 / (5-3)
        CHECK(downwind.duration_s == doctest::Approx(125.0)); // 1000 / (5+3)
    }
    SUBCASE("turns add hover time") {
        std::vector<Waypoint> bent{{{0, 0}, 50.0, Action::TriggerCapture},
                                   {{100, 0}, 50.0, Action::TriggerCapture},
                                   {{100, 100}, 50.0, Action::TriggerCapture}};
        EnergyEstimate est = estimate_energy(bent, {0.0, 0.0}, 5.0, model);
        CHECK(est.turn_count == 1);
        CHECK(est.duration_s == doctest::Approx(40.0 + model.turn_time_s));
    }
    SUBCASE("low pressure costs more") {
        EnergyModel thin = model;
        thin.pressure_hpa = 900.0;
        std::vector<Waypoint> path{{{0, 0}, 50.0, Action::TriggerCapture},
                                   {{1000, 0}, 50.0, Action::TriggerCapture}};
        double base = estimate_energy(path, {0.0, 0.0}, 5.0, model).energy_wh;
        double high = estimate_energy(path, {0.0, 0.0}, 5.0, thin).energy_wh;
        CHECK(high == doctest::Approx(base * std::sqrt(1013.25 / 900.0)).epsilon(1e-9));
    }
}

TEST_CASE("mission json shape") {
    FieldPolygon square(kSquare100);
    SweepBasis basis = manual_basis(90.0, 32.0, 25.0);
    MissionPlan plan = plan_mission(square, basis, 50.0, 5.0, 3600.0, {3.0, 90.0}, {});
    geo::LocalFrame frame(geo::GeoPoint{21.03, 105.85, 15.0});
    std::string json = mission_to_json(plan, frame);
    CHECK(json.find("\"waypoints\"") != std::string::npos);
    CHECK(json.find("\"lat\"") != std::string::npos);
    CHECK(json.find("\"trigger_capture\"") != std::string::npos);
    CHECK(json.find("\"capture_count\": 20") != std::string::npos);
}

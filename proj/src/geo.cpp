#include "agri/geo.hpp"

#include <cmath>

namespace agri {

double Vec2::norm() const { return std::hypot(x, y); }

Vec2 Vec2::unit() const {
    double n = norm();
    if (n == 0.0) throw ValidationError("cannot normalize zero vector");
    return {x / n, y / n};
}

double distance(const Vec2& a, const Vec2& b) { return (a - b).norm(); }

}  // namespace agri

namespace agri::geo {

namespace {
constexpr double kDegToRad = M_PI / 180.0;

// Distance from p to segment [a, b].
double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
    Vec2 ab = b - a;
    double len2 = ab.dot(ab);
    if (len2 == 0.0) return distance(p, a);
    double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
    return distance(p, a + ab * t);
}

bool segments_properly_intersect(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
    auto orient = [](const Vec2& p, const Vec2& q, const Vec2& r) {
        double v = (q - p).cross(r - p);
        if (v > 1e-12) return 1;
        if (v < -1e-12) return -1;
        return 0;
    };
    int o1 = orient(a, b, c), o2 = orient(a, b, d);
    int o3 = orient(c, d, a), o4 = orient(c, d, b);
    return o1 != o2 && o3 != o4 && o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0;
}
}  // namespace

void GeoPoint::validate() const {
    if (lat < -90.0 || lat > 90.0) throw ValidationError("latitude out of [-90, 90]");
    if (lon < -180.0 || lon > 180.0) throw ValidationError("longitude out of [-180, 180]");
}

LocalFrame::LocalFrame(const GeoPoint& origin) : origin_(origin) {
    origin.validate();
    if (std::abs(origin.lat) > 85.0)
        throw ValidationError("local frame origin too close to a pole");
    cos_lat0_ = std::cos(origin.lat * kDegToRad);
}

Vec2 LocalFrame::to_local(const GeoPoint& p) const {
    p.validate();
    Vec2 out{(p.lon - origin_.lon) * kDegToRad * kEarthRadiusM * cos_lat0_,
             (p.lat - origin_.lat) * kDegToRad * kEarthRadiusM};
    if (out.norm() > kValidityRadiusM)
        throw ValidationError("point beyond local frame validity radius (5 km)");
    return out;
}

GeoPoint LocalFrame::from_local(const Vec2& p, double alt) const {
    if (p.norm() > kValidityRadiusM)
        throw ValidationError("point beyond local frame validity radius (5 km)");
    return GeoPoint{origin_.lat + p.y / (kEarthRadiusM * kDegToRad),
                    origin_.lon + p.x / (kEarthRadiusM * kDegToRad * cos_lat0_), alt};
}

double shoelace_area(const std::vector<Vec2>& ring) {
    double acc = 0.0;
    size_t n = ring.size();
    for (size_t i = 0; i < n; ++i) {
        const Vec2& a = ring[i];
        const Vec2& b = ring[(i + 1) % n];
        acc += a.cross(b);
    }
    return 0.5 * acc;
}

FieldPolygon::FieldPolygon(std::vector<Vec2> vertices, std::string label)
    : vertices_(std::move(vertices)), label_(std::move(label)) {
    if (vertices_.size() < 3) throw ValidationError("polygon needs at least 3 vertices");
    if (std::abs(shoelace_area(vertices_)) < 1e-12)
        throw ValidationError("polygon has zero area");
    size_t n = vertices_.size();
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = i + 1; j < n; ++j) {
            // skip edges sharing a vertex
            if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
            if (segments_properly_intersect(vertices_[i], vertices_[(i + 1) % n],
                                            vertices_[j], vertices_[(j + 1) % n]))
                throw ValidationError("polygon is self-intersecting");
        }
    }
}

double FieldPolygon::signed_area() const { return shoelace_area(vertices_); }

Vec2 FieldPolygon::centroid() const {
    double a = signed_area();
    double cx = 0.0, cy = 0.0;
    size_t n = vertices_.size();
    for (size_t i = 0; i < n; ++i) {
        const Vec2& p = vertices_[i];
        const Vec2& q = vertices_[(i + 1) % n];
        double w = p.cross(q);
        cx += (p.x + q.x) * w;
        cy += (p.y + q.y) * w;
    }
    return {cx / (6.0 * a), cy / (6.0 * a)};
}

bool FieldPolygon::contains(const Vec2& p) const {
    constexpr double kEdgeEps = 1e-9;
    size_t n = vertices_.size();
    // boundary tie-break: on-edge points are inside
    for (size_t i = 0; i < n; ++i) {
        if (point_segment_distance(p, vertices_[i], vertices_[(i + 1) % n]) <= kEdgeEps)
            return true;
    }
    // crossing number, ray towards +x, half-open vertex rule
    bool inside = false;
    for (size_t i = 0; i < n; ++i) {
        const Vec2& a = vertices_[i];
        const Vec2& b = vertices_[(i + 1) % n];
        if ((a.y > p.y) != (b.y > p.y)) {
            double x_cross = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if (p.x < x_cross) inside = !inside;
        }
    }
    return inside;
}

const char* band_name(Band b) {
    switch (b) {
        case Band::Blue: return "blue";
        case Band::Green: return "green";
        case Band::Red: return "red";
        case Band::NIR: return "nir";
        case Band::RedEdge: return "red_edge";
    }
    return "?";
}

std::vector<BandSpec> default_bands() {
    return {{Band::Blue, 475.0, 20.0},
            {Band::Green, 560.0, 20.0},
            {Band::Red, 668.0, 10.0},
            {Band::NIR, 840.0, 40.0},
            {Band::RedEdge, 717.0, 10.0}};
}

void CameraModel::validate() const {
    if (hfov_deg <= 0.0 || hfov_deg >= 180.0 || vfov_deg <= 0.0 || vfov_deg >= 180.0)
        throw ValidationError("camera FOV out of (0, 180)");
    if (image_width <= 0 || image_height <= 0)
        throw ValidationError("camera pixel dimensions must be positive");
    if (bands.empty()) throw ValidationError("camera band list empty");
    for (size_t i = 0; i < bands.size(); ++i) {
        for (size_t j = i + 1; j < bands.size(); ++j) {
            if (bands[i].center_nm == bands[j].center_nm)
                throw ValidationError("camera bands must have distinct nominal centers");
        }
    }
}

Footprint footprint(const CameraModel& camera, double altitude_m) {
    camera.validate();
    if (altitude_m <= 0.0) throw ValidationError("footprint requires positive altitude");
    return {2.0 * altitude_m * std::tan(camera.hfov_deg * 0.5 * kDegToRad),
            2.0 * altitude_m * std::tan(camera.vfov_deg * 0.5 * kDegToRad)};
}

}  // namespace agri::geo

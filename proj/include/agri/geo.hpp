#pragma once

#include <string>
#include <vector>

#include "agri/common.hpp"

namespace agri::geo {

struct GeoPoint {
    double lat = 0.0;  // degrees WGS84, [-90, 90]
    double lon = 0.0;  // degrees WGS84, [-180, 180]
    double alt = 0.0;  // meters above ground reference

    void validate() const;
};

/// Local tangent frame anchored at `origin`: equirectangular approximation,
/// x east / y north in meters. Valid within 5 km of the origin.
class LocalFrame {
public:
    explicit LocalFrame(const GeoPoint& origin);

    const GeoPoint& origin() const { return origin_; }

    Vec2 to_local(const GeoPoint& p) const;
    GeoPoint from_local(const Vec2& p, double alt = 0.0) const;

    static constexpr double kValidityRadiusM = 5000.0;
    static constexpr double kEarthRadiusM = 6371000.0;

private:
    GeoPoint origin_;
    double cos_lat0_;
};

/// Survey-area polygon in a local metric frame. Vertices are ordered,
/// non-self-intersecting, with nonzero area.
class FieldPolygon {
public:
    FieldPolygon(std::vector<Vec2> vertices, std::string label = "");

    const std::vector<Vec2>& vertices() const { return vertices_; }
    const std::string& label() const { return label_; }

    double signed_area() const;
    double area() const { return std::abs(signed_area()); }
    Vec2 centroid() const;

    /// Crossing-number containment test. Points on the boundary count as
    /// inside (capture points on the field edge are kept).
    bool contains(const Vec2& p) const;

private:
    std::vector<Vec2> vertices_;
    std::string label_;
};

enum class Band { Blue, Green, Red, NIR, RedEdge };

const char* band_name(Band b);

struct BandSpec {
    Band name;
    double center_nm;
    double half_width_nm;
};

/// The five RedEdge-M style bands (Blue 475, Green 560, Red 668, NIR 840,
/// RedEdge 717).
std::vector<BandSpec> default_bands();

struct CameraModel {
    double hfov_deg = 47.2;
    double vfov_deg = 35.4;
    int image_width = 1280;
    int image_height = 960;
    std::vector<BandSpec> bands = default_bands();

    void validate() const;
};

/// Ground rectangle (width, height) in meters imaged from `altitude`.
struct Footprint {
    double width;
    double height;
};

Footprint footprint(const CameraModel& camera, double altitude_m);

/// Shoelace signed area of an arbitrary ring (no validity checks).
double shoelace_area(const std::vector<Vec2>& ring);

}  // namespace agri::geo

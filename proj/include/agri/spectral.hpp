#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "agri/flightsim.hpp"
#include "agri/geo.hpp"
#include "agri/rng.hpp"

namespace agri::spectral {

constexpr int kBandCount = 5;
constexpr float kNoData = std::numeric_limits<float>::quiet_NaN();

inline bool is_nodata(float v) { return std::isnan(v); }

enum class RegionLabel : uint8_t { Soil = 0, Vegetation = 1, Stressed = 2 };

/// Ground-truth reflectance field standing in for the real crop. Grids are
/// row-major, row 0 at the south edge, cell centers at origin + (i+0.5)*cell.
struct SyntheticScene {
    Vec2 origin;             // southwest corner, local frame meters
    double cell_size_m = 1.0;
    int nx = 0;
    int ny = 0;
    std::array<std::vector<float>, kBandCount> bands;
    std::vector<RegionLabel> labels;

    bool in_bounds(const Vec2& p) const;
    /// Nearest-cell reflectance; kNoData outside the grid.
    float reflectance(geo::Band band, const Vec2& p) const;
    RegionLabel label_at(const Vec2& p) const;
};

struct SceneReflectance {
    std::array<float, kBandCount> bands;  // indexed by geo::Band
};

SceneReflectance reflectance_for(RegionLabel label);

/// Vegetation field over the polygon with seeded stressed patches, soil
/// outside, and per-cell reflectance jitter.
SyntheticScene make_default_scene(const geo::FieldPolygon& poly, double cell_size_m,
                                  double margin_m, Rng& rng, double noise_sigma = 0.02);

/// Constant reflectance everywhere (sampling/mosaic oracles).
SyntheticScene make_uniform_scene(const Vec2& origin, double width_m, double height_m,
                                  double cell_size_m,
                                  const std::array<float, kBandCount>& reflectance);

/// One 5-band frame sampled over an axis-aligned ground footprint.
/// Row-major pixels, row 0 south; no-data where the footprint leaves the
/// scene.
struct MultispectralCapture {
    int capture_id = 0;
    Vec2 center;
    double width_m = 0.0;
    double height_m = 0.0;
    int px_w = 0;
    int px_h = 0;
    std::array<std::vector<float>, kBandCount> pixels;

    Vec2 pixel_center(int row, int col) const;
};

MultispectralCapture sample_capture(const SyntheticScene& scene, int capture_id,
                                    const Vec2& center, double width_m, double height_m,
                                    int px_w, int px_h, double illumination_scale = 1.0);

/// One capture per trigger. The illumination scale is applied equally to
/// all bands, mirroring downwelling-light correction; ratio indices are
/// unaffected by it.
std::vector<MultispectralCapture> captures_to_spectral(
    const std::vector<flightsim::CameraTrigger>& triggers, const SyntheticScene& scene,
    const geo::CameraModel& camera, double altitude_m,
    const std::vector<double>& illumination_scales = {});

/// Georeferenced scalar grid; NaN cells are no-data.
struct Raster {
    Vec2 origin;
    double cell_size_m = 1.0;
    int nx = 0;
    int ny = 0;
    std::vector<float> values;

    float at(int row, int col) const { return values[static_cast<size_t>(row) * nx + col]; }
    Vec2 cell_center(int row, int col) const;
};

enum class IndexKind { NDVI, NDRE };

const char* index_kind_name(IndexKind k);

struct IndexRaster {
    IndexKind kind = IndexKind::NDVI;
    Raster grid;
};

/// (NIR - Red) / (NIR + Red) per cell; denominators under epsilon become
/// no-data so they cannot bias statistics.
IndexRaster ndvi(const Raster& nir, const Raster& red);
/// (NIR - RedEdge) / (NIR + RedEdge).
IndexRaster ndre(const Raster& nir, const Raster& red_edge);

/// Nearest-capture-center resampling onto a north-up grid: each cell takes
/// its value from the closest capture whose footprint contains the cell
/// center. Stands in for photogrammetric stitching.
std::map<geo::Band, Raster> mosaic(const std::vector<MultispectralCapture>& captures,
                                   double cell_size_m);

struct IndexStats {
    size_t valid_count = 0;
    double mean = 0.0;
    double min = 0.0;
    double max = 0.0;
    std::array<size_t, 20> histogram{};  // bins over [-1, 1]
    double coverage_fraction = 0.0;      // valid cells / in-polygon cells
};

IndexStats index_stats(const IndexRaster& raster, const geo::FieldPolygon& poly);

std::string stats_to_json(const IndexStats& s);

/// P6 portable pixmap; no-data black, [-1, 1] on a red-yellow-green ramp.
std::vector<uint8_t> emit_map(const IndexRaster& raster);

/// Raster persistence: <prefix>.json header + <prefix>.f32 little-endian grid.
void save_raster(const Raster& r, const std::string& prefix, const std::string& kind);
Raster load_raster(const std::string& prefix);

}  // namespace agri::spectral

#include "agri/spectral.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace agri::spectral {

using geo::Band;

bool SyntheticScene::in_bounds(const Vec2& p) const {
    return p.x >= origin.x && p.y >= origin.y && p.x < origin.x + nx * cell_size_m &&
           p.y < origin.y + ny * cell_size_m;
}

namespace {
size_t cell_index(const SyntheticScene& s, const Vec2& p) {
    int cx = std::clamp(static_cast<int>(std::floor((p.x - s.origin.x) / s.cell_size_m)), 0,
                        s.nx - 1);
    int cy = std::clamp(static_cast<int>(std::floor((p.y - s.origin.y) / s.cell_size_m)), 0,
                        s.ny - 1);
    return static_cast<size_t>(cy) * s.nx + cx;
}
}  // namespace

float SyntheticScene::reflectance(Band band, const Vec2& p) const {
    if (!in_bounds(p)) return kNoData;
    return bands[static_cast<int>(band)][cell_index(*this, p)];
}

RegionLabel SyntheticScene::label_at(const Vec2& p) const {
    return labels[cell_index(*this, p)];
}

SceneReflectance reflectance_for(RegionLabel label) {
    // Blue, Green, Red, NIR, RedEdge
    switch (label) {
        case RegionLabel::Vegetation: return {{0.04f, 0.08f, 0.05f, 0.80f, 0.45f}};
        case RegionLabel::Stressed: return {{0.06f, 0.10f, 0.12f, 0.55f, 0.48f}};
        case RegionLabel::Soil: return {{0.15f, 0.20f, 0.25f, 0.30f, 0.28f}};
    }
    return {{0.0f, 0.0f, 0.0f, 0.0f, 0.0f}};
}

SyntheticScene make_default_scene(const geo::FieldPolygon& poly, double cell_size_m,
                                  double margin_m, Rng& rng, double noise_sigma) {
    if (cell_size_m <= 0.0) throw ValidationError("scene cell size must be positive");
    double xmin = std::numeric_limits<double>::infinity(), ymin = xmin;
    double xmax = -xmin, ymax = -xmin;
    for (const Vec2& v : poly.vertices()) {
        xmin = std::min(xmin, v.x);
        xmax = std::max(xmax, v.x);
        ymin = std::min(ymin, v.y);
        ymax = std::max(ymax, v.y);
    }
    SyntheticScene scene;
    scene.origin = {xmin - margin_m, ymin - margin_m};
    scene.cell_size_m = cell_size_m;
    scene.nx = static_cast<int>(std::ceil((xmax - xmin + 2.0 * margin_m) / cell_size_m));
    scene.ny = static_cast<int>(std::ceil((ymax - ymin + 2.0 * margin_m) / cell_size_m));

    // a few stressed patches inside the field, area-proportional
    struct Patch {
        Vec2 center;
        double radius;
    };
    std::vector<Patch> patches;
    int patch_target = std::max(1, static_cast<int>(poly.area() / 2000.0));
    double patch_scale = std::sqrt(poly.area());
    for (int attempts = 0; attempts < 100 && static_cast<int>(patches.size()) < patch_target;
         ++attempts) {
        Vec2 c{rng.uniform(xmin, xmax), rng.uniform(ymin, ymax)};
        if (!poly.contains(c)) continue;
        patches.push_back({c, rng.uniform(0.05, 0.12) * patch_scale});
    }

    size_t cells = static_cast<size_t>(scene.nx) * scene.ny;
    scene.labels.resize(cells);
    for (auto& b : scene.bands) b.resize(cells);
    for (int row = 0; row < scene.ny; ++row) {
        for (int col = 0; col < scene.nx; ++col) {
            Vec2 c{scene.origin.x + (col + 0.5) * cell_size_m,
                   scene.origin.y + (row + 0.5) * cell_size_m};
            RegionLabel label = RegionLabel::Soil;
            if (poly.contains(c)) {
                label = RegionLabel::Vegetation;
                for (const Patch& p : patches) {
                    if (distance(c, p.center) <= p.radius) {
                        label = RegionLabel::Stressed;
                        break;
                    }
                }
            }
            size_t idx = static_cast<size_t>(row) * scene.nx + col;
            scene.labels[idx] = label;
            SceneReflectance refl = reflectance_for(label);
            for (int b = 0; b < kBandCount; ++b) {
                double v = refl.bands[b];
                if (noise_sigma > 0.0) v += rng.gaussian(0.0, noise_sigma);
                scene.bands[b][idx] = static_cast<float>(std::clamp(v, 0.005, 0.995));
            }
        }
    }
    return scene;
}

SyntheticScene make_uniform_scene(const Vec2& origin, double width_m, double height_m,
                                  double cell_size_m,
                                  const std::array<float, kBandCount>& reflectance) {
    SyntheticScene scene;
    scene.origin = origin;
    scene.cell_size_m = cell_size_m;
    scene.nx = static_cast<int>(std::ceil(width_m / cell_size_m));
    scene.ny = static_cast<int>(std::ceil(height_m / cell_size_m));
    size_t cells = static_cast<size_t>(scene.nx) * scene.ny;
    scene.labels.assign(cells, RegionLabel::Vegetation);
    for (int b = 0; b < kBandCount; ++b) scene.bands[b].assign(cells, reflectance[b]);
    return scene;
}

Vec2 MultispectralCapture::pixel_center(int row, int col) const {
    return {center.x - width_m * 0.5 + (col + 0.5) * (width_m / px_w),
            center.y - height_m * 0.5 + (row + 0.5) * (height_m / px_h)};
}

MultispectralCapture sample_capture(const SyntheticScene& scene, int capture_id,
                                    const Vec2& center, double width_m, double height_m,
                                    int px_w, int px_h, double illumination_scale) {
    if (px_w <= 0 || px_h <= 0) throw ValidationError("capture pixel dims must be positive");
    if (width_m <= 0.0 || height_m <= 0.0)
        throw ValidationError("capture footprint must be positive");
    MultispectralCapture cap;
    cap.capture_id = capture_id;
    cap.center = center;
    cap.width_m = width_m;
    cap.height_m = height_m;
    cap.px_w = px_w;
    cap.px_h = px_h;
    size_t n = static_cast<size_t>(px_w) * px_h;
    for (auto& b : cap.pixels) b.resize(n);
    for (int row = 0; row < px_h; ++row) {
        for (int col = 0; col < px_w; ++col) {
            Vec2 ground = cap.pixel_center(row, col);
            size_t idx = static_cast<size_t>(row) * px_w + col;
            for (int b = 0; b < kBandCount; ++b) {
                float v = scene.reflectance(static_cast<Band>(b), ground);
                cap.pixels[b][idx] =
                    is_nodata(v) ? kNoData
                                 : static_cast<float>(std::clamp(
                                       static_cast<double>(v) * illumination_scale, 0.0, 1.0));
            }
        }
    }
    return cap;
}

std::vector<MultispectralCapture> captures_to_spectral(
    const std::vector<flightsim::CameraTrigger>& triggers, const SyntheticScene& scene,
    const geo::CameraModel& camera, double altitude_m,
    const std::vector<double>& illumination_scales) {
    if (!illumination_scales.empty() && illumination_scales.size() != triggers.size())
        throw ValidationError("illumination scale list must match trigger count");
    geo::Footprint fp = geo::footprint(camera, altitude_m);
    std::vector<MultispectralCapture> out;
    out.reserve(triggers.size());
    for (size_t i = 0; i < triggers.size(); ++i) {
        double illum = illumination_scales.empty() ? 1.0 : illumination_scales[i];
        out.push_back(sample_capture(scene, triggers[i].capture_id, triggers[i].position,
                                     fp.width, fp.height, camera.image_width,
                                     camera.image_height, illum));
    }
    return out;
}

Vec2 Raster::cell_center(int row, int col) const {
    return {origin.x + (col + 0.5) * cell_size_m, origin.y + (row + 0.5) * cell_size_m};
}

const char* index_kind_name(IndexKind k) {
    return k == IndexKind::NDVI ? "ndvi" : "ndre";
}

namespace {
IndexRaster normalized_difference(IndexKind kind, const Raster& a, const Raster& b) {
    if (a.nx != b.nx || a.ny != b.ny) throw ValidationError("index input shapes differ");
    if (std::abs(a.origin.x - b.origin.x) > 1e-9 || std::abs(a.origin.y - b.origin.y) > 1e-9 ||
        std::abs(a.cell_size_m - b.cell_size_m) > 1e-12)
        throw ValidationError("index inputs must share georeference");
    constexpr double kDenomEps = 1e-6;
    IndexRaster out;
    out.kind = kind;
    out.grid.origin = a.origin;
    out.grid.cell_size_m = a.cell_size_m;
    out.grid.nx = a.nx;
    out.grid.ny = a.ny;
    out.grid.values.resize(a.values.size());
    for (size_t i = 0; i < a.values.size(); ++i) {
        float x = a.values[i], y = b.values[i];
        if (is_nodata(x) || is_nodata(y) || static_cast<double>(x) + y < kDenomEps) {
            out.grid.values[i] = kNoData;
        } else {
            out.grid.values[i] =
                static_cast<float>((static_cast<double>(x) - y) / (static_cast<double>(x) + y));
        }
    }
    return out;
}
}  // namespace

IndexRaster ndvi(const Raster& nir, const Raster& red) {
    return normalized_difference(IndexKind::NDVI, nir, red);
}

IndexRaster ndre(const Raster& nir, const Raster& red_edge) {
    return normalized_difference(IndexKind::NDRE, nir, red_edge);
}

std::map<Band, Raster> mosaic(const std::vector<MultispectralCapture>& captures,
                              double cell_size_m) {
    if (captures.empty()) throw ValidationError("mosaic needs at least one capture");
    if (cell_size_m <= 0.0) throw ValidationError("mosaic cell size must be positive");
    double xmin = std::numeric_limits<double>::infinity(), ymin = xmin;
    double xmax = -xmin, ymax = -xmin;
    for (const auto& cap : captures) {
        xmin = std::min(xmin, cap.center.x - cap.width_m * 0.5);
        xmax = std::max(xmax, cap.center.x + cap.width_m * 0.5);
        ymin = std::min(ymin, cap.center.y - cap.height_m * 0.5);
        ymax = std::max(ymax, cap.center.y + cap.height_m * 0.5);
    }
    Raster proto;
    proto.origin = {xmin, ymin};
    proto.cell_size_m = cell_size_m;
    proto.nx = std::max(1, static_cast<int>(std::ceil((xmax - xmin) / cell_size_m)));
    proto.ny = std::max(1, static_cast<int>(std::ceil((ymax - ymin) / cell_size_m)));
    proto.values.assign(static_cast<size_t>(proto.nx) * proto.ny, kNoData);
    std::map<Band, Raster> out;
    for (int b = 0; b < kBandCount; ++b) out[static_cast<Band>(b)] = proto;

    for (int row = 0; row < proto.ny; ++row) {
        for (int col = 0; col < proto.nx; ++col) {
            Vec2 c = proto.cell_center(row, col);
            const MultispectralCapture* best = nullptr;
            double best_d2 = 0.0;
            for (const auto& cap : captures) {
                if (std::abs(c.x - cap.center.x) > cap.width_m * 0.5 ||
                    std::abs(c.y - cap.center.y) > cap.height_m * 0.5)
                    continue;
                Vec2 d = c - cap.center;
                double d2 = d.dot(d);
                if (!best || d2 < best_d2) {
                    best = &cap;
                    best_d2 = d2;
                }
            }
            if (!best) continue;
            int pc = std::clamp(
                static_cast<int>(std::floor((c.x - (best->center.x - best->width_m * 0.5)) /
                                            (best->width_m / best->px_w))),
                0, best->px_w - 1);
            int pr = std::clamp(
                static_cast<int>(std::floor((c.y - (best->center.y - best->height_m * 0.5)) /
                                            (best->height_m / best->px_h))),
                0, best->px_h - 1);
            size_t dst = static_cast<size_t>(row) * proto.nx + col;
            size_t src = static_cast<size_t>(pr) * best->px_w + pc;
            for (int b = 0; b < kBandCount; ++b)
                out[static_cast<Band>(b)].values[dst] = best->pixels[b][src];
        }
    }
    return out;
}

IndexStats index_stats(const IndexRaster& raster, const geo::FieldPolygon& poly) {
    IndexStats stats;
    size_t in_poly = 0;
    for (int row = 0; row < raster.grid.ny; ++row) {
        for (int col = 0; col < raster.grid.nx; ++col) {
            if (!poly.contains(raster.grid.cell_center(row, col))) continue;
            ++in_poly;
            float v = raster.grid.at(row, col);
            if (is_nodata(v)) continue;
            if (stats.valid_count == 0) {
                stats.min = v;
                stats.max = v;
            }
            stats.min = std::min(stats.min, static_cast<double>(v));
            stats.max = std::max(stats.max, static_cast<double>(v));
            stats.mean += v;
            int bin = std::clamp(static_cast<int>(std::floor((v + 1.0) / 0.1)), 0, 19);
            ++stats.histogram[static_cast<size_t>(bin)];
            ++stats.valid_count;
        }
    }
    if (stats.valid_count > 0) stats.mean /= static_cast<double>(stats.valid_count);
    stats.coverage_fraction =
        in_poly > 0 ? static_cast<double>(stats.valid_count) / static_cast<double>(in_poly)
                    : 0.0;
    return stats;
}

std::string stats_to_json(const IndexStats& s) {
    nlohmann::json doc{{"valid_count", s.valid_count},
                       {"coverage_fraction", s.coverage_fraction}};
    if (s.valid_count > 0) {
        doc["mean"] = s.mean;
        doc["min"] = s.min;
        doc["max"] = s.max;
        doc["histogram"] = s.histogram;
    } else {
        doc["empty"] = true;
    }
    return doc.dump(2);
}

std::vector<uint8_t> emit_map(const IndexRaster& raster) {
    std::ostringstream header;
    header << "P6\n" << raster.grid.nx << ' ' << raster.grid.ny << "\n255\n";
    std::string h = header.str();
    std::vector<uint8_t> out(h.begin(), h.end());
    out.reserve(out.size() + static_cast<size_t>(raster.grid.nx) * raster.grid.ny * 3);
    // image rows top-down: last raster row (north) first
    for (int row = raster.grid.ny - 1; row >= 0; --row) {
        for (int col = 0; col < raster.grid.nx; ++col) {
            float v = raster.grid.at(row, col);
            uint8_t r = 0, g = 0, b = 0;
            if (!is_nodata(v)) {
                double x = std::clamp(static_cast<double>(v), -1.0, 1.0);
                if (x < 0.0) {
                    r = 255;
                    g = static_cast<uint8_t>(std::lround(255.0 * (x + 1.0)));
                } else {
                    r = static_cast<uint8_t>(std::lround(255.0 * (1.0 - x)));
                    g = 255;
                }
            }
            out.push_back(r);
            out.push_back(g);
            out.push_back(b);
        }
    }
    return out;
}

void save_raster(const Raster& r, const std::string& prefix, const std::string& kind) {
    nlohmann::json header{{"kind", kind},
                          {"origin_m", {r.origin.x, r.origin.y}},
                          {"cell_size_m", r.cell_size_m},
                          {"nx", r.nx},
                          {"ny", r.ny},
                          {"extent_m", {r.nx * r.cell_size_m, r.ny * r.cell_size_m}},
                          {"dtype", "f32le"}};
    std::ofstream jout(prefix + ".json");
    jout << header.dump(2) << '\n';
    std::ofstream bout(prefix + ".f32", std::ios::binary);
    static_assert(std::endian::native == std::endian::little,
                  "raster writer assumes little-endian host");
    bout.write(reinterpret_cast<const char*>(r.values.data()),
               static_cast<std::streamsize>(r.values.size() * sizeof(float)));
}

Raster load_raster(const std::string& prefix) {
    std::ifstream jin(prefix + ".json");
    if (!jin) throw ValidationError("missing raster header: " + prefix + ".json");
    nlohmann::json header = nlohmann::json::parse(jin);
    Raster r;
    r.origin = {header.at("origin_m")[0].get<double>(), header.at("origin_m")[1].get<double>()};
    r.cell_size_m = header.at("cell_size_m").get<double>();
    r.nx = header.at("nx").get<int>();
    r.ny = header.at("ny").get<int>();
    std::ifstream bin(prefix + ".f32", std::ios::binary);
    if (!bin) throw ValidationError("missing raster grid: " + prefix + ".f32");
    r.values.resize(static_cast<size_t>(r.nx) * r.ny);
    bin.read(reinterpret_cast<char*>(r.values.data()),
             static_cast<std::streamsize>(r.values.size() * sizeof(float)));
    if (bin.gcount() != static_cast<std::streamsize>(r.values.size() * sizeof(float)))
        throw ValidationError("raster grid truncated: " + prefix + ".f32");
    return r;
}

}  // namespace agri::spectral

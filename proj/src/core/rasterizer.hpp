#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <list>
#include <memory>
#include <mutex>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "core/camera.hpp"
#include "core/config.hpp"
#include "core/image.hpp"
#include "core/rng.hpp"
#include "core/sampler.hpp"
#include "core/turbine.hpp"

namespace wtkp {

struct RenderSettings {
    std::array<int, 3> turbine_color{236, 238, 240};
    std::array<int, 3> sky_color{196, 212, 230};
    double ambient = 0.6;
    double haze_distance_m = 1000.0;
};

RenderSettings render_settings(const GeneratorConfig& config);

// Planar convex face of the simplified turbine solid.
struct Face {
    std::vector<Eigen::Vector3d> vertices;
    Eigen::Vector3d normal = Eigen::Vector3d::UnitZ();
    bool two_sided = false;
};

// Tower frustum, nacelle box, hub spinner and three tapered blades.
std::vector<Face> turbine_faces(const TurbineInstance& turbine);

// Projected vertices of every face after near-plane clipping; these are the
// silhouette extremes used for the bounding box.
std::vector<PixelPoint> silhouette_vertices(const TurbineInstance& turbine, const CameraPose& pose);

std::optional<PixelBox> turbine_bbox(const TurbineInstance& turbine, const CameraPose& pose);

// Flat-shaded RGBA layer. Turbines are painted back to front by rotor depth;
// alpha is 255 on covered pixels, 0 elsewhere, fractional on edges (2x2
// supersampling).
ImageBuffer render_foreground(const SceneConfig& scene, const CameraPose& pose, const RenderSettings& settings);

// Directory of raster images, listed once in sorted order. Decoded images
// are kept in a small shared cache.
class BackgroundLibrary {
public:
    using Warn = std::function<void(std::string_view)>;

    // Throws ConfigError when the directory is unreadable or holds no image files.
    explicit BackgroundLibrary(const std::filesystem::path& directory, std::size_t cache_capacity = 8);

    std::size_t size() const { return files_.size(); }
    const std::filesystem::path& file(std::size_t i) const { return files_.at(i); }

    // Throws IoError when the file cannot be decoded.
    std::shared_ptr<const ImageBuffer> load(std::size_t index) const;

private:
    std::vector<std::filesystem::path> files_;
    std::size_t capacity_;
    mutable std::mutex mutex_;
    mutable std::list<std::pair<std::size_t, std::shared_ptr<const ImageBuffer>>> cache_;
};

// Per-pixel, per-channel uniform noise in [0, 255].
ImageBuffer noise_background(int width, int height, Rng& rng);

// Maximal crop with the output aspect ratio at the given slack fractions,
// then bilinear resize to width x height.
ImageBuffer crop_and_resize(const ImageBuffer& source, double crop_x, double crop_y, int width, int height);

// Resolves a BackgroundChoice to an RGB image of the requested size. A
// corrupt library image is reported through `warn` and another one drawn
// from `rng`.
ImageBuffer load_background(const BackgroundLibrary* library, const BackgroundChoice& choice, int width, int height,
                            Rng& rng, const BackgroundLibrary::Warn& warn = {});

// out = fg * a + bg * (1 - a), rounded. Throws std::invalid_argument on
// dimension mismatch.
ImageBuffer composite(const ImageBuffer& foreground_rgba, const ImageBuffer& background_rgb);

}  // namespace wtkp

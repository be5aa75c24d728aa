#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include <json.hpp>

#include "core/camera.hpp"
#include "core/config.hpp"
#include "core/rng.hpp"
#include "core/turbine.hpp"

namespace wtkp {

struct SunConfig {
    double azimuth_deg = 0.0;
    double altitude_deg = 90.0;
    double dust_density = 1.0;
};

// h: additive hue in degrees; s: additive saturation on the 0-255 scale;
// v: multiplicative value factor (> 0).
struct HsvShift {
    double h = 0.0;
    double s = 0.0;
    double v = 1.0;
};

struct NoiseParams {
    double mean = 0.0;
    double stddev = 0.0;
};

struct AugmentPlan {
    HsvShift hsv_foreground;
    HsvShift hsv_background;
    std::optional<double> jpeg_quality;
    std::optional<NoiseParams> noise;
    // Outcome of the noise-background draw. The background actually used is
    // in BackgroundChoice (noise is forced when no library is available).
    bool noise_background = false;
};

struct BackgroundChoice {
    bool noise = true;
    std::size_t image_index = 0;
    // Crop window position as fractions of the free slack in x and y.
    double crop_x = 0.0;
    double crop_y = 0.0;
};

// Everything needed to render and annotate one image.
struct SceneConfig {
    std::uint64_t master_seed = 0;
    std::uint64_t image_index = 0;
    SunConfig sun;
    bool far_regime = false;
    std::vector<TurbineInstance> turbines;
    CameraConfig camera;
    AugmentPlan augment;
    BackgroundChoice background;
};

// Draws one complete scene. Pure in (seed, index, config, library_size).
// library_size == 0 selects noise backgrounds for every image.
SceneConfig sample_scene(std::uint64_t master_seed, std::uint64_t image_index, const GeneratorConfig& config,
                         std::size_t library_size = 0);

// Throws std::logic_error if any value lies outside the configured supports
// or violates the placement rule |x| >= min_abs_x, |x| <= y.
void check_scene_supports(const SceneConfig& scene, const GeneratorConfig& config);

nlohmann::ordered_json scene_to_json(const SceneConfig& scene);
SceneConfig scene_from_json(const nlohmann::json& j);

}  // namespace wtkp

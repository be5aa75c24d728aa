#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "core/rng.hpp"
#include "core/turbine.hpp"

namespace wtkp {

// One scalar distribution from the parameter table.
// JSON forms: {"constant": v}, {"uniform": [lo, hi]}, {"normal": [mean, std]},
// {"choice": [v0, v1, ...]}.
class Distribution {
public:
    enum class Kind { Constant, Uniform, Normal, Choice };

    static Distribution constant(double value);
    static Distribution uniform(double low, double high);
    static Distribution normal(double mean, double stddev);
    static Distribution choice(std::vector<double> values);

    double sample(Rng& rng) const;

    Kind kind() const { return kind_; }
    double param_a() const { return a_; }
    double param_b() const { return b_; }
    const std::vector<double>& values() const { return values_; }

    // Closed support bounds; +-inf for normals.
    double support_min() const;
    double support_max() const;

private:
    Kind kind_ = Kind::Constant;
    double a_ = 0.0;
    double b_ = 0.0;
    std::vector<double> values_;
};

struct HsvShiftParams {
    Distribution h = Distribution::normal(0.0, 10.0);
    Distribution s = Distribution::normal(0.0, 10.0);
    // V = 1 + v
    Distribution v = Distribution::normal(0.0, 0.3);
};

struct GeneratorConfig {
    std::uint64_t seed = 42;
    std::uint64_t count = 100;
    double train_fraction = 0.8;
    unsigned workers = 0;  // 0 = logical cores

    int image_width = 1280;
    int image_height = 720;
    std::optional<std::filesystem::path> background_library;

    // Sun and lighting.
    Distribution solar_azimuth = Distribution::constant(0.0);
    Distribution solar_altitude = Distribution::constant(90.0);
    Distribution dust_density = Distribution::constant(1.0);

    // Turbine count and placement.
    Distribution number_of_wts = Distribution::choice({1, 1, 1, 1, 1, 1, 2, 2, 2, 3, 3, 4});
    double far_probability = 0.5;
    Distribution near_y = Distribution::uniform(0.0, 200.0);
    Distribution far_y = Distribution::uniform(0.0, 800.0);
    double min_abs_x = 20.0;
    double negative_x_probability = 0.5;
    Distribution yaw_mean = Distribution::uniform(0.0, 360.0);
    double yaw_std_deg = 5.0;
    Distribution blade_rotation = Distribution::uniform(0.0, 360.0);

    // Camera.
    Distribution camera_near_distance = Distribution::uniform(80.0, 200.0);
    Distribution camera_far_distance = Distribution::uniform(80.0, 800.0);
    bool camera_regime_follows_position = true;
    Distribution camera_height = Distribution::uniform(10.0, 260.0);
    Distribution camera_focal_length = Distribution::uniform(3.0, 55.0);
    Distribution camera_roll = Distribution::normal(0.0, 3.0);
    Distribution camera_yaw = Distribution::constant(0.0);
    double camera_aim_height = 89.0;
    bool camera_center_on_hub = false;
    double sensor_width_mm = 36.0;

    // Augmentations.
    HsvShiftParams hsv_foreground;
    HsvShiftParams hsv_background;
    double jpeg_probability = 0.4;
    Distribution jpeg_quality = Distribution::uniform(45.0, 100.0);
    double noise_probability = 0.4;
    Distribution noise_mean = Distribution::constant(0.0);
    Distribution noise_std = Distribution::uniform(1.0, 8.0);
    double noise_background_probability = 0.1;

    // Geometry.
    TurbineGeometry geometry;
    std::vector<double> blade_scale_variants{0.8, 1.0, 1.2};

    // Flat-shaded renderer.
    std::array<int, 3> turbine_color{236, 238, 240};
    std::array<int, 3> sky_color{196, 212, 230};
    double ambient = 0.6;
    double haze_distance_m = 1000.0;

    // Throws ConfigError with the offending key.
    void validate() const;
};

// Parses a (possibly partial) config on top of the defaults. Unknown keys
// are rejected with their full path.
GeneratorConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const GeneratorConfig& config);
GeneratorConfig load_config_file(const std::filesystem::path& path);

nlohmann::json distribution_to_json(const Distribution& d);
Distribution distribution_from_json(const nlohmann::json& j, const std::string& key_path);

}  // namespace wtkp

#include "core/sampler.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "core/errors.hpp"

namespace wtkp {

namespace {

constexpr int kMaxRejections = 10000;
constexpr double kMinValueFactor = 0.05;

// Rejection draw for y so that U(min_abs_x, y) is non-empty.
double sample_downrange(const Distribution& dist, double min_abs_x, Rng& rng) {
    for (int i = 0; i < kMaxRejections; ++i) {
        const double y = dist.sample(rng);
        if (y >= min_abs_x) return y;
    }
    throw ConfigError("position distribution almost never reaches min_abs_x; check parameters.position");
}

HsvShift sample_hsv(const HsvShiftParams& p, Rng& rng) {
    HsvShift s;
    s.h = p.h.sample(rng);
    s.s = p.s.sample(rng);
    for (int i = 0;; ++i) {
        s.v = 1.0 + p.v.sample(rng);
        if (s.v > kMinValueFactor) break;
        if (i == kMaxRejections) throw ConfigError("hsv value factor distribution stays <= 0.05");
    }
    return s;
}

void require(bool ok, const std::string& what) {
    if (!ok) throw std::logic_error("sampled value outside its support: " + what);
}

bool within(double v, const Distribution& d) { return v >= d.support_min() && v <= d.support_max(); }

}  // namespace

SceneConfig sample_scene(std::uint64_t master_seed, std::uint64_t image_index, const GeneratorConfig& config,
                         std::size_t library_size) {
    Rng rng = derive_rng(master_seed, image_index, StreamTag::Scene);

    SceneConfig scene;
    scene.master_seed = master_seed;
    scene.image_index = image_index;

    scene.sun.azimuth_deg = config.solar_azimuth.sample(rng);
    scene.sun.altitude_deg = config.solar_altitude.sample(rng);
    scene.sun.dust_density = config.dust_density.sample(rng);

    const int n = static_cast<int>(config.number_of_wts.sample(rng));
    scene.far_regime = rng.bernoulli(config.far_probability);
    const bool camera_far = config.camera_regime_follows_position ? scene.far_regime
                                                                   : rng.bernoulli(config.far_probability);
    const double yaw_mean = config.yaw_mean.sample(rng);

    scene.turbines.reserve(n);
    for (int i = 0; i < n; ++i) {
        const double y = sample_downrange(scene.far_regime ? config.far_y : config.near_y, config.min_abs_x, rng);
        const bool negative = rng.bernoulli(config.negative_x_probability);
        const double magnitude = rng.uniform(config.min_abs_x, y);
        const double yaw = rng.normal(yaw_mean, config.yaw_std_deg);
        const double rotation = config.blade_rotation.sample(rng);
        const double scale = config.blade_scale_variants[rng.index(config.blade_scale_variants.size())];
        scene.turbines.push_back(make_turbine(negative ? -magnitude : magnitude, y, yaw, rotation,
                                              config.geometry.with_blade_scale(scale)));
    }

    CameraConfig& cam = scene.camera;
    cam.distance_m = (camera_far ? config.camera_far_distance : config.camera_near_distance).sample(rng);
    cam.height_m = config.camera_height.sample(rng);
    cam.focal_length_mm = config.camera_focal_length.sample(rng);
    cam.roll_deg = config.camera_roll.sample(rng);
    cam.yaw_deg = config.camera_yaw.sample(rng);
    cam.center_on_hub = config.camera_center_on_hub;
    cam.aim_height_m = config.camera_aim_height;
    cam.sensor_width_mm = config.sensor_width_mm;
    cam.image_width = config.image_width;
    cam.image_height = config.image_height;

    // Augmentation values are always drawn so that changing a probability
    // leaves every other draw of the image untouched.
    AugmentPlan& aug = scene.augment;
    aug.hsv_foreground = sample_hsv(config.hsv_foreground, rng);
    aug.hsv_background = sample_hsv(config.hsv_background, rng);
    const bool jpeg = rng.bernoulli(config.jpeg_probability);
    const double quality = config.jpeg_quality.sample(rng);
    if (jpeg) aug.jpeg_quality = quality;
    const bool noise = rng.bernoulli(config.noise_probability);
    const double noise_mean = config.noise_mean.sample(rng);
    const double noise_std = config.noise_std.sample(rng);
    if (noise) aug.noise = NoiseParams{noise_mean, noise_std};
    aug.noise_background = rng.bernoulli(config.noise_background_probability);

    scene.background.noise = aug.noise_background || library_size == 0;
    if (library_size > 0) scene.background.image_index = rng.index(library_size);
    scene.background.crop_x = rng.uniform01();
    scene.background.crop_y = rng.uniform01();

    check_scene_supports(scene, config);
    return scene;
}

void check_scene_supports(const SceneConfig& scene, const GeneratorConfig& config) {
    require(within(scene.sun.azimuth_deg, config.solar_azimuth), "solar azimuth");
    require(within(scene.sun.altitude_deg, config.solar_altitude), "solar altitude");
    require(within(scene.sun.dust_density, config.dust_density), "dust density");

    const auto n = static_cast<double>(scene.turbines.size());
    require(n >= 1 && n <= 4 && within(n, config.number_of_wts), "number of turbines");

    const Distribution& ydist = scene.far_regime ? config.far_y : config.near_y;
    for (const auto& t : scene.turbines) {
        const double x = t.position.x();
        const double y = t.position.y();
        require(within(y, ydist), "turbine y");
        require(std::abs(x) >= config.min_abs_x && std::abs(x) <= y, "turbine x (|x| >= min_abs_x, |x| <= y)");
        require(t.yaw_deg >= 0.0 && t.yaw_deg < 360.0, "yaw normalization");
        require(t.blade_rotation_deg >= 0.0 && t.blade_rotation_deg < 360.0, "blade rotation normalization");
    }

    const auto& cam = scene.camera;
    require(cam.distance_m >= std::min(config.camera_near_distance.support_min(), config.camera_far_distance.support_min()) &&
                cam.distance_m <= std::max(config.camera_near_distance.support_max(), config.camera_far_distance.support_max()),
            "camera distance");
    require(within(cam.height_m, config.camera_height), "camera height");
    require(within(cam.focal_length_mm, config.camera_focal_length), "camera focal length");
    require(within(cam.roll_deg, config.camera_roll), "camera roll");
    require(within(cam.yaw_deg, config.camera_yaw), "camera yaw");

    const auto& aug = scene.augment;
    for (const HsvShift* s : {&aug.hsv_foreground, &aug.hsv_background}) {
        require(std::isfinite(s->h) && std::isfinite(s->s) && s->v > kMinValueFactor, "hsv shift");
    }
    if (aug.jpeg_quality) require(within(*aug.jpeg_quality, config.jpeg_quality), "jpeg quality");
    if (aug.noise) {
        require(within(aug.noise->mean, config.noise_mean), "noise mean");
        require(within(aug.noise->stddev, config.noise_std) && aug.noise->stddev >= 0.0, "noise std");
    }
    require(scene.background.crop_x >= 0.0 && scene.background.crop_x < 1.0 && scene.background.crop_y >= 0.0 &&
                scene.background.crop_y < 1.0,
            "background crop");
}

// ---------------------------------------------------------------------------
// JSON

namespace {

using ojson = nlohmann::ordered_json;

ojson geometry_to_json(const TurbineGeometry& g) {
    return {
        {"hub_height", g.hub_height},
        {"blade_length", g.blade_length},
        {"blade_root_width", g.blade_root_width},
        {"blade_tip_width", g.blade_tip_width},
        {"tower_base_radius", g.tower_base_radius},
        {"tower_top_radius", g.tower_top_radius},
        {"nacelle_length", g.nacelle_length},
        {"nacelle_width", g.nacelle_width},
        {"nacelle_height", g.nacelle_height},
        {"hub_front_offset", g.hub_front_offset},
        {"hub_rear_offset", g.hub_rear_offset},
    };
}

TurbineGeometry geometry_from_json(const nlohmann::json& j) {
    TurbineGeometry g;
    g.hub_height = j.at("hub_height").get<double>();
    g.blade_length = j.at("blade_length").get<double>();
    g.blade_root_width = j.at("blade_root_width").get<double>();
    g.blade_tip_width = j.at("blade_tip_width").get<double>();
    g.tower_base_radius = j.at("tower_base_radius").get<double>();
    g.tower_top_radius = j.at("tower_top_radius").get<double>();
    g.nacelle_length = j.at("nacelle_length").get<double>();
    g.nacelle_width = j.at("nacelle_width").get<double>();
    g.nacelle_height = j.at("nacelle_height").get<double>();
    g.hub_front_offset = j.at("hub_front_offset").get<double>();
    g.hub_rear_offset = j.at("hub_rear_offset").get<double>();
    return g;
}

ojson hsv_json(const HsvShift& s) { return {{"h", s.h}, {"s", s.s}, {"v", s.v}}; }

HsvShift hsv_from(const nlohmann::json& j) {
    return {j.at("h").get<double>(), j.at("s").get<double>(), j.at("v").get<double>()};
}

}  // namespace

ojson scene_to_json(const SceneConfig& scene) {
    ojson turbines = ojson::array();
    for (const auto& t : scene.turbines) {
        turbines.push_back({
            {"x", t.position.x()},
            {"y", t.position.y()},
            {"yaw_deg", t.yaw_deg},
            {"blade_rotation_deg", t.blade_rotation_deg},
            {"geometry", geometry_to_json(t.geometry)},
        });
    }
    const auto& c = scene.camera;
    const auto& a = scene.augment;
    return {
        {"master_seed", scene.master_seed},
        {"image_index", scene.image_index},
        {"sun",
         {{"azimuth_deg", scene.sun.azimuth_deg},
          {"altitude_deg", scene.sun.altitude_deg},
          {"dust_density", scene.sun.dust_density}}},
        {"far_regime", scene.far_regime},
        {"turbines", turbines},
        {"camera",
         {{"distance_m", c.distance_m},
          {"height_m", c.height_m},
          {"focal_length_mm", c.focal_length_mm},
          {"roll_deg", c.roll_deg},
          {"yaw_deg", c.yaw_deg},
          {"center_on_hub", c.center_on_hub},
          {"aim_height_m", c.aim_height_m},
          {"sensor_width_mm", c.sensor_width_mm},
          {"image_width", c.image_width},
          {"image_height", c.image_height}}},
        {"augment",
         {{"hsv_foreground", hsv_json(a.hsv_foreground)},
          {"hsv_background", hsv_json(a.hsv_background)},
          {"jpeg_quality", a.jpeg_quality ? ojson(*a.jpeg_quality) : ojson(nullptr)},
          {"noise", a.noise ? ojson{{"mean", a.noise->mean}, {"std", a.noise->stddev}} : ojson(nullptr)},
          {"noise_background", a.noise_background}}},
        {"background",
         {{"noise", scene.background.noise},
          {"image_index", scene.background.image_index},
          {"crop_x", scene.background.crop_x},
          {"crop_y", scene.background.crop_y}}},
    };
}

SceneConfig scene_from_json(const nlohmann::json& j) {
    SceneConfig s;
    s.master_seed = j.at("master_seed").get<std::uint64_t>();
    s.image_index = j.at("image_index").get<std::uint64_t>();
    const auto& sun = j.at("sun");
    s.sun = {sun.at("azimuth_deg").get<double>(), sun.at("altitude_deg").get<double>(),
             sun.at("dust_density").get<double>()};
    s.far_regime = j.at("far_regime").get<bool>();
    for (const auto& t : j.at("turbines")) {
        s.turbines.push_back(make_turbine(t.at("x").get<double>(), t.at("y").get<double>(),
                                          t.at("yaw_deg").get<double>(), t.at("blade_rotation_deg").get<double>(),
                                          geometry_from_json(t.at("geometry"))));
    }
    const auto& c = j.at("camera");
    s.camera.distance_m = c.at("distance_m").get<double>();
    s.camera.height_m = c.at("height_m").get<double>();
    s.camera.focal_length_mm = c.at("focal_length_mm").get<double>();
    s.camera.roll_deg = c.at("roll_deg").get<double>();
    s.camera.yaw_deg = c.at("yaw_deg").get<double>();
    s.camera.center_on_hub = c.at("center_on_hub").get<bool>();
    s.camera.aim_height_m = c.at("aim_height_m").get<double>();
    s.camera.sensor_width_mm = c.at("sensor_width_mm").get<double>();
    s.camera.image_width = c.at("image_width").get<int>();
    s.camera.image_height = c.at("image_height").get<int>();
    const auto& a = j.at("augment");
    s.augment.hsv_foreground = hsv_from(a.at("hsv_foreground"));
    s.augment.hsv_background = hsv_from(a.at("hsv_background"));
    if (!a.at("jpeg_quality").is_null()) s.augment.jpeg_quality = a.at("jpeg_quality").get<double>();
    if (!a.at("noise").is_null()) {
        s.augment.noise = NoiseParams{a.at("noise").at("mean").get<double>(), a.at("noise").at("std").get<double>()};
    }
    s.augment.noise_background = a.at("noise_background").get<bool>();
    const auto& b = j.at("background");
    s.background.noise = b.at("noise").get<bool>();
    s.background.image_index = b.at("image_index").get<std::size_t>();
    s.background.crop_x = b.at("crop_x").get<double>();
    s.background.crop_y = b.at("crop_y").get<double>();
    return s;
}

}  // namespace wtkp

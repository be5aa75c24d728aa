#include "core/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "core/errors.hpp"

namespace wtkp {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Distribution

Distribution Distribution::constant(double value) {
    Distribution d;
    d.kind_ = Kind::Constant;
    d.a_ = value;
    return d;
}

Distribution Distribution::uniform(double low, double high) {
    Distribution d;
    d.kind_ = Kind::Uniform;
    d.a_ = low;
    d.b_ = high;
    return d;
}

Distribution Distribution::normal(double mean, double stddev) {
    Distribution d;
    d.kind_ = Kind::Normal;
    d.a_ = mean;
    d.b_ = stddev;
    return d;
}

Distribution Distribution::choice(std::vector<double> values) {
    Distribution d;
    d.kind_ = Kind::Choice;
    d.values_ = std::move(values);
    return d;
}

double Distribution::sample(Rng& rng) const {
    switch (kind_) {
        case Kind::Constant: return a_;
        case Kind::Uniform: return rng.uniform(a_, b_);
        case Kind::Normal: return rng.normal(a_, b_);
        case Kind::Choice: return values_[rng.index(values_.size())];
    }
    return a_;
}

double Distribution::support_min() const {
    switch (kind_) {
        case Kind::Constant: return a_;
        case Kind::Uniform: return std::min(a_, b_);
        case Kind::Normal: return b_ == 0.0 ? a_ : -std::numeric_limits<double>::infinity();
        case Kind::Choice: return *std::min_element(values_.begin(), values_.end());
    }
    return a_;
}

double Distribution::support_max() const {
    switch (kind_) {
        case Kind::Constant: return a_;
        case Kind::Uniform: return std::max(a_, b_);
        case Kind::Normal: return b_ == 0.0 ? a_ : std::numeric_limits<double>::infinity();
        case Kind::Choice: return *std::max_element(values_.begin(), values_.end());
    }
    return a_;
}

// ---------------------------------------------------------------------------
// Strict JSON reading

namespace {

std::string join_path(const std::string& parent, const std::string& key) {
    return parent.empty() ? key : parent + "." + key;
}

// Reads fields of one JSON object, remembering which keys were consumed so
// leftovers can be reported as unknown.
class ObjectReader {
public:
    ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) {
            throw ConfigError((path_.empty() ? std::string("config") : path_) + " must be a JSON object");
        }
    }

    const json* get(const std::string& key) {
        seen_.insert(key);
        auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    std::string path(const std::string& key) const { return join_path(path_, key); }

    template <typename T>
    void read(const std::string& key, T& out) {
        if (const json* v = get(key)) {
            try {
                if constexpr (std::is_same_v<T, bool>) {
                    if (!v->is_boolean()) throw ConfigError(path(key) + " must be a boolean");
                } else if constexpr (std::is_arithmetic_v<T>) {
                    if (!v->is_number()) throw ConfigError(path(key) + " must be a number");
                    if constexpr (std::is_unsigned_v<T>) {
                        if (!v->is_number_unsigned()) {
                            throw ConfigError(path(key) + " must be a non-negative integer");
                        }
                    } else if constexpr (std::is_integral_v<T>) {
                        if (!v->is_number_integer()) throw ConfigError(path(key) + " must be an integer");
                    }
                }
                out = v->get<T>();
            } catch (const json::exception& e) {
                throw ConfigError(path(key) + ": " + e.what());
            }
        }
    }

    void read(const std::string& key, Distribution& out) {
        if (const json* v = get(key)) out = distribution_from_json(*v, path(key));
    }

    void read_color(const std::string& key, std::array<int, 3>& out) {
        if (const json* v = get(key)) {
            if (!v->is_array() || v->size() != 3) throw ConfigError(path(key) + " must be [r, g, b]");
            for (int i = 0; i < 3; ++i) {
                if (!(*v)[i].is_number_integer()) throw ConfigError(path(key) + " entries must be integers");
                out[i] = (*v)[i].get<int>();
            }
        }
    }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (!seen_.count(it.key())) {
                throw ConfigError("unknown key '" + path(it.key()) + "'");
            }
        }
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

void read_hsv(ObjectReader& parent, const std::string& key, HsvShiftParams& out) {
    if (const json* v = parent.get(key)) {
        ObjectReader r(*v, parent.path(key));
        r.read("h", out.h);
        r.read("s", out.s);
        r.read("v", out.v);
        r.finish();
    }
}

json hsv_to_json(const HsvShiftParams& p) {
    return {{"h", distribution_to_json(p.h)}, {"s", distribution_to_json(p.s)}, {"v", distribution_to_json(p.v)}};
}

void check_probability(double p, const char* key) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError(std::string(key) + " must lie in [0, 1]");
}

}  // namespace

Distribution distribution_from_json(const json& j, const std::string& key_path) {
    if (!j.is_object() || j.size() != 1) {
        throw ConfigError(key_path +
                          " must be one of {\"constant\": v}, {\"uniform\": [lo, hi]}, "
                          "{\"normal\": [mean, std]}, {\"choice\": [...]}");
    }
    const std::string kind = j.begin().key();
    const json& arg = j.begin().value();
    auto number = [&](const json& v) {
        if (!v.is_number()) throw ConfigError(key_path + "." + kind + " must hold numbers");
        const double x = v.get<double>();
        if (!std::isfinite(x)) throw ConfigError(key_path + "." + kind + " must be finite");
        return x;
    };
    auto pair = [&]() {
        if (!arg.is_array() || arg.size() != 2) throw ConfigError(key_path + "." + kind + " takes two numbers");
        return std::pair{number(arg[0]), number(arg[1])};
    };

    if (kind == "constant") return Distribution::constant(number(arg));
    if (kind == "uniform") {
        auto [lo, hi] = pair();
        if (lo > hi) throw ConfigError(key_path + ".uniform needs lo <= hi");
        return Distribution::uniform(lo, hi);
    }
    if (kind == "normal") {
        auto [mean, sd] = pair();
        if (sd < 0.0) throw ConfigError(key_path + ".normal needs std >= 0");
        return Distribution::normal(mean, sd);
    }
    if (kind == "choice") {
        if (!arg.is_array() || arg.empty()) throw ConfigError(key_path + ".choice needs a non-empty array");
        std::vector<double> values;
        for (const auto& v : arg) values.push_back(number(v));
        return Distribution::choice(std::move(values));
    }
    throw ConfigError(key_path + ": unknown distribution kind '" + kind + "'");
}

json distribution_to_json(const Distribution& d) {
    switch (d.kind()) {
        case Distribution::Kind::Constant: return {{"constant", d.param_a()}};
        case Distribution::Kind::Uniform: return {{"uniform", {d.param_a(), d.param_b()}}};
        case Distribution::Kind::Normal: return {{"normal", {d.param_a(), d.param_b()}}};
        case Distribution::Kind::Choice: return {{"choice", d.values()}};
    }
    return nullptr;
}

// ---------------------------------------------------------------------------
// GeneratorConfig

void GeneratorConfig::validate() const {
    if (image_width <= 0 || image_height <= 0) throw ConfigError("image.width and image.height must be > 0");
    check_probability(train_fraction, "train_fraction");
    check_probability(far_probability, "parameters.position.far_probability");
    check_probability(negative_x_probability, "parameters.position.negative_x_probability");
    check_probability(jpeg_probability, "parameters.jpeg_compression.probability");
    check_probability(noise_probability, "parameters.noise_per_pixel.probability");
    check_probability(noise_background_probability, "parameters.random_noise_background.probability");

    if (number_of_wts.support_min() < 1.0 || number_of_wts.support_max() > 4.0) {
        throw ConfigError("parameters.number_of_wts must draw values in [1, 4]");
    }
    if (number_of_wts.kind() == Distribution::Kind::Normal ||
        number_of_wts.kind() == Distribution::Kind::Uniform) {
        throw ConfigError("parameters.number_of_wts must be a constant or a choice");
    }
    for (double v : number_of_wts.kind() == Distribution::Kind::Choice ? number_of_wts.values()
                                                                        : std::vector<double>{number_of_wts.param_a()}) {
        if (v != std::floor(v)) throw ConfigError("parameters.number_of_wts must draw integers");
    }

    if (!(min_abs_x >= 0.0)) throw ConfigError("parameters.position.min_abs_x must be >= 0");
    if (!(near_y.support_max() >= min_abs_x) || !(far_y.support_max() >= min_abs_x)) {
        throw ConfigError("parameters.position near_y/far_y must reach min_abs_x, otherwise no x is admissible");
    }
    if (!(yaw_std_deg >= 0.0)) throw ConfigError("parameters.yaw_rotation.std_deg must be >= 0");

    if (!(camera_near_distance.support_min() > 0.0) || !(camera_far_distance.support_min() > 0.0)) {
        throw ConfigError("parameters.camera_distance must stay > 0");
    }
    if (!(camera_focal_length.support_min() > 0.0)) {
        throw ConfigError("parameters.camera_focal_length must stay > 0");
    }
    if (!(sensor_width_mm > 0.0)) throw ConfigError("camera.sensor_width_mm must be > 0");
    if (!std::isfinite(camera_aim_height)) throw ConfigError("parameters.camera_pitch.aim_height must be finite");

    if (jpeg_quality.support_min() < 1.0 || jpeg_quality.support_max() > 100.0) {
        throw ConfigError("parameters.jpeg_compression.quality must stay within [1, 100]");
    }
    if (noise_std.support_min() < 0.0) throw ConfigError("parameters.noise_per_pixel.std must stay >= 0");

    geometry.validate();
    if (blade_scale_variants.empty()) throw ConfigError("geometry.blade_scale_variants must not be empty");
    for (double s : blade_scale_variants) {
        if (!(s > 0.0)) throw ConfigError("geometry.blade_scale_variants entries must be > 0");
        geometry.with_blade_scale(s).validate();
    }

    for (const auto* c : {&turbine_color, &sky_color}) {
        for (int v : *c) {
            if (v < 0 || v > 255) throw ConfigError("render colors must be in [0, 255]");
        }
    }
    if (!(ambient >= 0.0 && ambient <= 1.0)) throw ConfigError("render.ambient must lie in [0, 1]");
    if (!(haze_distance_m > 0.0)) throw ConfigError("render.haze_distance_m must be > 0");
}

GeneratorConfig config_from_json(const json& j) {
    GeneratorConfig c;
    ObjectReader root(j, "");
    root.read("seed", c.seed);
    root.read("count", c.count);
    root.read("train_fraction", c.train_fraction);
    root.read("workers", c.workers);

    if (const json* v = root.get("image")) {
        ObjectReader r(*v, "image");
        r.read("width", c.image_width);
        r.read("height", c.image_height);
        r.finish();
    }
    if (const json* v = root.get("background_library")) {
        if (v->is_null()) {
            c.background_library.reset();
        } else if (v->is_string()) {
            c.background_library = v->get<std::string>();
        } else {
            throw ConfigError("background_library must be a path string or null");
        }
    }

    if (const json* v = root.get("parameters")) {
        ObjectReader p(*v, "parameters");
        p.read("solar_azimuth", c.solar_azimuth);
        p.read("solar_altitude", c.solar_altitude);
        p.read("dust_density", c.dust_density);
        p.read("number_of_wts", c.number_of_wts);
        if (const json* pos = p.get("position")) {
            ObjectReader r(*pos, "parameters.position");
            r.read("far_probability", c.far_probability);
            r.read("near_y", c.near_y);
            r.read("far_y", c.far_y);
            r.read("min_abs_x", c.min_abs_x);
            r.read("negative_x_probability", c.negative_x_probability);
            r.finish();
        }
        if (const json* yaw = p.get("yaw_rotation")) {
            ObjectReader r(*yaw, "parameters.yaw_rotation");
            r.read("mean", c.yaw_mean);
            r.read("std_deg", c.yaw_std_deg);
            r.finish();
        }
        p.read("blade_rotation", c.blade_rotation);
        if (const json* cd = p.get("camera_distance")) {
            ObjectReader r(*cd, "parameters.camera_distance");
            r.read("near", c.camera_near_distance);
            r.read("far", c.camera_far_distance);
            r.read("follows_position_regime", c.camera_regime_follows_position);
            r.finish();
        }
        p.read("camera_height", c.camera_height);
        p.read("camera_focal_length", c.camera_focal_length);
        p.read("camera_roll", c.camera_roll);
        if (const json* pitch = p.get("camera_pitch")) {
            ObjectReader r(*pitch, "parameters.camera_pitch");
            r.read("aim_height", c.camera_aim_height);
            r.finish();
        }
        p.read("camera_yaw", c.camera_yaw);
        p.read("camera_center_on_hub", c.camera_center_on_hub);
        read_hsv(p, "hsv_shift_foreground", c.hsv_foreground);
        read_hsv(p, "hsv_shift_background", c.hsv_background);
        if (const json* jp = p.get("jpeg_compression")) {
            ObjectReader r(*jp, "parameters.jpeg_compression");
            r.read("probability", c.jpeg_probability);
            r.read("quality", c.jpeg_quality);
            r.finish();
        }
        if (const json* np = p.get("noise_per_pixel")) {
            ObjectReader r(*np, "parameters.noise_per_pixel");
            r.read("probability", c.noise_probability);
            r.read("mean", c.noise_mean);
            r.read("std", c.noise_std);
            r.finish();
        }
        if (const json* nb = p.get("random_noise_background")) {
            ObjectReader r(*nb, "parameters.random_noise_background");
            r.read("probability", c.noise_background_probability);
            r.finish();
        }
        p.finish();
    }

    if (const json* v = root.get("geometry")) {
        ObjectReader r(*v, "geometry");
        auto& g = c.geometry;
        r.read("hub_height", g.hub_height);
        r.read("blade_length", g.blade_length);
        r.read("blade_root_width", g.blade_root_width);
        r.read("blade_tip_width", g.blade_tip_width);
        r.read("tower_base_radius", g.tower_base_radius);
        r.read("tower_top_radius", g.tower_top_radius);
        r.read("nacelle_length", g.nacelle_length);
        r.read("nacelle_width", g.nacelle_width);
        r.read("nacelle_height", g.nacelle_height);
        r.read("hub_front_offset", g.hub_front_offset);
        r.read("hub_rear_offset", g.hub_rear_offset);
        r.read("blade_scale_variants", c.blade_scale_variants);
        r.finish();
    }
    if (const json* v = root.get("camera")) {
        ObjectReader r(*v, "camera");
        r.read("sensor_width_mm", c.sensor_width_mm);
        r.finish();
    }
    if (const json* v = root.get("render")) {
        ObjectReader r(*v, "render");
        r.read_color("turbine_color", c.turbine_color);
        r.read_color("sky_color", c.sky_color);
        r.read("ambient", c.ambient);
        r.read("haze_distance_m", c.haze_distance_m);
        r.finish();
    }
    root.finish();
    c.validate();
    return c;
}

json config_to_json(const GeneratorConfig& c) {
    json j;
    j["seed"] = c.seed;
    j["count"] = c.count;
    j["train_fraction"] = c.train_fraction;
    j["workers"] = c.workers;
    j["image"] = {{"width", c.image_width}, {"height", c.image_height}};
    j["background_library"] = c.background_library ? json(c.background_library->string()) : json(nullptr);
    j["parameters"] = {
        {"solar_azimuth", distribution_to_json(c.solar_azimuth)},
        {"solar_altitude", distribution_to_json(c.solar_altitude)},
        {"dust_density", distribution_to_json(c.dust_density)},
        {"number_of_wts", distribution_to_json(c.number_of_wts)},
        {"position",
         {{"far_probability", c.far_probability},
          {"near_y", distribution_to_json(c.near_y)},
          {"far_y", distribution_to_json(c.far_y)},
          {"min_abs_x", c.min_abs_x},
          {"negative_x_probability", c.negative_x_probability}}},
        {"yaw_rotation", {{"mean", distribution_to_json(c.yaw_mean)}, {"std_deg", c.yaw_std_deg}}},
        {"blade_rotation", distribution_to_json(c.blade_rotation)},
        {"camera_distance",
         {{"near", distribution_to_json(c.camera_near_distance)},
          {"far", distribution_to_json(c.camera_far_distance)},
          {"follows_position_regime", c.camera_regime_follows_position}}},
        {"camera_height", distribution_to_json(c.camera_height)},
        {"camera_focal_length", distribution_to_json(c.camera_focal_length)},
        {"camera_roll", distribution_to_json(c.camera_roll)},
        {"camera_pitch", {{"aim_height", c.camera_aim_height}}},
        {"camera_yaw", distribution_to_json(c.camera_yaw)},
        {"camera_center_on_hub", c.camera_center_on_hub},
        {"hsv_shift_foreground", hsv_to_json(c.hsv_foreground)},
        {"hsv_shift_background", hsv_to_json(c.hsv_background)},
        {"jpeg_compression", {{"probability", c.jpeg_probability}, {"quality", distribution_to_json(c.jpeg_quality)}}},
        {"noise_per_pixel",
         {{"probability", c.noise_probability},
          {"mean", distribution_to_json(c.noise_mean)},
          {"std", distribution_to_json(c.noise_std)}}},
        {"random_noise_background", {{"probability", c.noise_background_probability}}},
    };
    const auto& g = c.geometry;
    j["geometry"] = {
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
        {"blade_scale_variants", c.blade_scale_variants},
    };
    j["camera"] = {{"sensor_width_mm", c.sensor_width_mm}};
    j["render"] = {
        {"turbine_color", c.turbine_color},
        {"sky_color", c.sky_color},
        {"ambient", c.ambient},
        {"haze_distance_m", c.haze_distance_m},
    };
    return j;
}

GeneratorConfig load_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
    }
    return config_from_json(j);
}

}  // namespace wtkp

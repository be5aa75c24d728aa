#include "core/turbine.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Geometry>

#include "core/errors.hpp"

namespace wtkp {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kSpacingToleranceDeg = 1e-6;

void require_positive(double value, const char* name) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw ConfigError(std::string("geometry.") + name + " must be > 0 (got " +
                          std::to_string(value) + ")");
    }
}

}  // namespace

void TurbineGeometry::validate() const {
    require_positive(hub_height, "hub_height");
    require_positive(blade_length, "blade_length");
    require_positive(blade_root_width, "blade_root_width");
    require_positive(blade_tip_width, "blade_tip_width");
    require_positive(tower_base_radius, "tower_base_radius");
    require_positive(tower_top_radius, "tower_top_radius");
    require_positive(nacelle_length, "nacelle_length");
    require_positive(nacelle_width, "nacelle_width");
    require_positive(nacelle_height, "nacelle_height");
    require_positive(hub_front_offset, "hub_front_offset");
    require_positive(hub_rear_offset, "hub_rear_offset");
    if (!(blade_length < hub_height)) {
        throw ConfigError("geometry.blade_length must be smaller than hub_height");
    }
    if (!(hub_front_offset > hub_rear_offset)) {
        throw ConfigError("geometry.hub_front_offset must exceed hub_rear_offset");
    }
}

TurbineGeometry TurbineGeometry::with_blade_scale(double factor) const {
    TurbineGeometry g = *this;
    g.blade_length *= factor;
    g.blade_root_width *= factor;
    g.blade_tip_width *= factor;
    return g;
}

double TurbineGeometry::hub_radius() const {
    return 0.45 * std::min(nacelle_width, nacelle_height);
}

double normalize_degrees(double deg) {
    double r = std::fmod(deg, 360.0);
    if (r < 0.0) r += 360.0;
    // fmod of a tiny negative value can round back up to exactly 360.
    if (r >= 360.0) r = 0.0;
    return r;
}

TurbineInstance make_turbine(double x, double y, double yaw_deg, double blade_rotation_deg,
                             const TurbineGeometry& geometry) {
    TurbineInstance t;
    t.position = {x, y};
    t.yaw_deg = normalize_degrees(yaw_deg);
    t.blade_rotation_deg = normalize_degrees(blade_rotation_deg);
    t.geometry = geometry;
    return t;
}

Eigen::Vector3d TurbineFrame::blade_direction(double angle_deg) const {
    const double a = angle_deg * kDegToRad;
    return std::cos(a) * up + std::sin(a) * right;
}

TurbineFrame turbine_frame(const TurbineInstance& turbine) {
    const auto& g = turbine.geometry;
    const double yaw = normalize_degrees(turbine.yaw_deg) * kDegToRad;

    TurbineFrame f;
    f.up = Eigen::Vector3d::UnitZ();
    f.front = Eigen::Vector3d(std::sin(yaw), -std::cos(yaw), 0.0);
    // Observer in front of the rotor looks along -front.
    f.right = (-f.front).cross(f.up);
    f.tower_base = Eigen::Vector3d(turbine.position.x(), turbine.position.y(), 0.0);
    f.tower_top = f.tower_base + g.hub_height * f.up;
    f.rotor_center = f.tower_top + 0.5 * (g.hub_front_offset + g.hub_rear_offset) * f.front;
    return f;
}

std::array<double, kNumTips> blade_angles(double blade_rotation_deg) {
    const double base = normalize_degrees(blade_rotation_deg);
    return {base, normalize_degrees(base + 120.0), normalize_degrees(base + 240.0)};
}

std::array<int, kNumTips> assign_tip_labels(const std::array<double, kNumTips>& angles_deg) {
    std::array<double, kNumTips> a{};
    for (int i = 0; i < kNumTips; ++i) {
        if (!std::isfinite(angles_deg[i])) {
            throw SceneError("blade angle is not finite");
        }
        a[i] = normalize_degrees(angles_deg[i]);
    }

    // The smallest normalized angle lies in [0, 120); the others follow it at
    // +120 and +240. Deriving labels from offsets keeps the result a bijection
    // even when rounding nudges an angle across a segment boundary.
    int ref = 0;
    for (int i = 1; i < kNumTips; ++i) {
        if (a[i] < a[ref]) ref = i;
    }

    std::array<int, kNumTips> labels{0, 0, 0};
    labels[ref] = 1;
    for (int i = 0; i < kNumTips; ++i) {
        if (i == ref) continue;
        const double offset = normalize_degrees(a[i] - a[ref]);
        int label = 0;
        if (std::abs(offset - 120.0) <= kSpacingToleranceDeg) {
            label = 2;
        } else if (std::abs(offset - 240.0) <= kSpacingToleranceDeg) {
            label = 3;
        }
        if (label == 0) {
            throw SceneError("blade angles are not spaced 120 degrees apart");
        }
        labels[i] = label;
    }
    if (labels[0] + labels[1] + labels[2] != 6 || labels[0] * labels[1] * labels[2] != 6) {
        throw SceneError("blade angles are not spaced 120 degrees apart");
    }
    return labels;
}

WorldKeypoints keypoints_world(const TurbineInstance& turbine) {
    const auto& g = turbine.geometry;
    const TurbineFrame f = turbine_frame(turbine);
    const auto angles = blade_angles(turbine.blade_rotation_deg);
    const auto labels = assign_tip_labels(angles);

    WorldKeypoints kp;
    for (int blade = 0; blade < kNumTips; ++blade) {
        kp.points[labels[blade] - 1] = f.rotor_center + g.blade_length * f.blade_direction(angles[blade]);
    }
    kp.points[static_cast<int>(Keypoint::HubFront)] = f.tower_top + g.hub_front_offset * f.front;
    kp.points[static_cast<int>(Keypoint::HubRear)] = f.tower_top + g.hub_rear_offset * f.front;
    kp.points[static_cast<int>(Keypoint::TowerTop)] = f.tower_top;
    kp.points[static_cast<int>(Keypoint::TowerBottom)] = f.tower_base;
    return kp;
}

}  // namespace wtkp

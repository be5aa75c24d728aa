#pragma once

#include <array>
#include <string_view>

#include <Eigen/Core>

namespace wtkp {

inline constexpr int kNumKeypoints = 7;
inline constexpr int kNumTips = 3;

// Fixed keypoint order of every annotation. Tips occupy indices 0-2.
enum class Keypoint : int {
    Tip1 = 0,
    Tip2 = 1,
    Tip3 = 2,
    HubFront = 3,
    HubRear = 4,
    TowerTop = 5,
    TowerBottom = 6,
};

inline constexpr std::array<std::string_view, kNumKeypoints> kKeypointNames = {
    "tip1", "tip2", "tip3", "hub_front", "hub_rear", "tower_top", "tower_bottom"};

// Dimensions in meters. Offsets are measured along the nacelle axis from the
// tower axis, positive toward the rotor.
struct TurbineGeometry {
    double hub_height = 89.0;
    double blade_length = 55.0;
    double blade_root_width = 3.6;
    double blade_tip_width = 0.8;
    double tower_base_radius = 2.6;
    double tower_top_radius = 1.7;
    double nacelle_length = 12.0;
    double nacelle_width = 4.0;
    double nacelle_height = 4.2;
    double hub_front_offset = 5.5;
    double hub_rear_offset = 2.0;

    // Throws ConfigError naming the first violated invariant.
    void validate() const;

    // Variant with blade length and thickness scaled by `factor`.
    TurbineGeometry with_blade_scale(double factor) const;

    double hub_radius() const;
};

// Position on the ground plane plus yaw (nacelle heading) and rotor angle, in
// degrees normalized to [0, 360).
struct TurbineInstance {
    Eigen::Vector2d position{0.0, 0.0};
    double yaw_deg = 0.0;
    double blade_rotation_deg = 0.0;
    TurbineGeometry geometry;
};

TurbineInstance make_turbine(double x, double y, double yaw_deg, double blade_rotation_deg,
                             const TurbineGeometry& geometry = {});

// Wraps any finite angle into [0, 360).
double normalize_degrees(double deg);

struct WorldKeypoints {
    std::array<Eigen::Vector3d, kNumKeypoints> points;

    const Eigen::Vector3d& operator[](Keypoint k) const { return points[static_cast<int>(k)]; }
};

// Local frame of one turbine.
//   front: horizontal unit vector the rotor faces (yaw 0 faces world -y, the
//          default camera side; yaw rotates counterclockwise seen from above)
//   right: horizontal, to the right of an observer facing the rotor front
//   up:    world +z
struct TurbineFrame {
    Eigen::Vector3d tower_base;
    Eigen::Vector3d tower_top;
    Eigen::Vector3d rotor_center;
    Eigen::Vector3d front;
    Eigen::Vector3d right;
    Eigen::Vector3d up;

    // Unit vector in the rotor plane for a blade angle measured from 12
    // o'clock, clockwise as seen from the front.
    Eigen::Vector3d blade_direction(double angle_deg) const;
};

TurbineFrame turbine_frame(const TurbineInstance& turbine);

// Angles of the three blades, blade k at rotation + 120k, normalized.
std::array<double, kNumTips> blade_angles(double blade_rotation_deg);

// Label (1, 2 or 3) for each blade from its angular segment:
// [0,120) -> 1, [120,240) -> 2, [240,360) -> 3.
// Throws SceneError unless the angles are mutually 120 deg apart.
std::array<int, kNumTips> assign_tip_labels(const std::array<double, kNumTips>& angles_deg);

WorldKeypoints keypoints_world(const TurbineInstance& turbine);

}  // namespace wtkp

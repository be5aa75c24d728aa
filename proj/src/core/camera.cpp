#include "core/camera.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Geometry>

#include "core/errors.hpp"

namespace wtkp {

namespace {
constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kRadToDeg = 180.0 / std::numbers::pi;
constexpr double kMinBoxSidePx = 2.0;
}  // namespace

void CameraConfig::validate() const {
    if (!(distance_m > 0.0)) throw ConfigError("camera distance must be > 0");
    if (!(focal_length_mm > 0.0)) throw ConfigError("camera focal length must be > 0");
    if (!(sensor_width_mm > 0.0)) throw ConfigError("camera sensor width must be > 0");
    if (image_width <= 0 || image_height <= 0) throw ConfigError("image dimensions must be > 0");
    if (!std::isfinite(height_m) || !std::isfinite(roll_deg) || !std::isfinite(yaw_deg) ||
        !std::isfinite(aim_height_m)) {
        throw ConfigError("camera angles and heights must be finite");
    }
}

CameraPose camera_pose(const CameraConfig& config, const std::optional<Eigen::Vector3d>& hub_target) {
    CameraPose pose;
    pose.position = Eigen::Vector3d(0.0, -config.distance_m, config.height_m);
    pose.roll_deg = config.roll_deg;
    pose.yaw_deg = config.yaw_deg;
    pose.pitch_deg = std::atan2(config.aim_height_m - config.height_m, config.distance_m) * kRadToDeg;

    if (config.center_on_hub && hub_target) {
        const Eigen::Vector3d d = (*hub_target - pose.position).normalized();
        pose.yaw_deg = std::atan2(-d.x(), d.y()) * kRadToDeg;
        pose.pitch_deg = std::asin(std::clamp(d.z(), -1.0, 1.0)) * kRadToDeg;
    }

    const double yaw = pose.yaw_deg * kDegToRad;
    const double pitch = pose.pitch_deg * kDegToRad;
    const double roll = pose.roll_deg * kDegToRad;

    // Yaw turns the heading counterclockwise (seen from above) away from +y.
    const Eigen::Vector3d heading(-std::sin(yaw), std::cos(yaw), 0.0);
    const Eigen::Vector3d forward =
        std::cos(pitch) * heading + std::sin(pitch) * Eigen::Vector3d::UnitZ();
    const Eigen::Vector3d right0(heading.y(), -heading.x(), 0.0);
    const Eigen::Vector3d down0 = forward.cross(right0);

    // Roll about the optical axis, applied last.
    const Eigen::Vector3d right = std::cos(roll) * right0 + std::sin(roll) * down0;
    const Eigen::Vector3d down = -std::sin(roll) * right0 + std::cos(roll) * down0;

    pose.world_to_camera.row(0) = right.transpose();
    pose.world_to_camera.row(1) = down.transpose();
    pose.world_to_camera.row(2) = forward.transpose();

    pose.focal_px = config.focal_px();
    pose.width = config.image_width;
    pose.height = config.image_height;
    pose.cx = 0.5 * config.image_width;
    pose.cy = 0.5 * config.image_height;
    return pose;
}

PixelPoint project_camera_point(const Eigen::Vector3d& cam, const CameraPose& pose) {
    return {pose.cx + pose.focal_px * cam.x() / cam.z(), pose.cy + pose.focal_px * cam.y() / cam.z(), cam.z()};
}

std::optional<PixelPoint> project(const Eigen::Vector3d& world, const CameraPose& pose) {
    const Eigen::Vector3d cam = pose.to_camera(world);
    if (!(cam.z() > 0.0)) return std::nullopt;
    return project_camera_point(cam, pose);
}

int keypoint_visibility(const std::optional<PixelPoint>& pixel, int width, int height) {
    if (!pixel || !(pixel->depth > 0.0)) return 0;
    const bool inside = pixel->u >= 0.0 && pixel->u < width && pixel->v >= 0.0 && pixel->v < height;
    return inside ? 2 : 0;
}

std::optional<PixelBox> bbox_from_projection(std::span<const PixelPoint> vertices, int width, int height) {
    bool any = false;
    PixelBox box{};
    for (const auto& p : vertices) {
        if (!(p.depth > 0.0)) continue;
        if (!any) {
            box = {p.u, p.v, p.u, p.v};
            any = true;
            continue;
        }
        box.x1 = std::min(box.x1, p.u);
        box.y1 = std::min(box.y1, p.v);
        box.x2 = std::max(box.x2, p.u);
        box.y2 = std::max(box.y2, p.v);
    }
    if (!any) return std::nullopt;

    box.x1 = std::clamp(box.x1, 0.0, static_cast<double>(width));
    box.x2 = std::clamp(box.x2, 0.0, static_cast<double>(width));
    box.y1 = std::clamp(box.y1, 0.0, static_cast<double>(height));
    box.y2 = std::clamp(box.y2, 0.0, static_cast<double>(height));
    if (box.width() < kMinBoxSidePx || box.height() < kMinBoxSidePx) return std::nullopt;
    return box;
}

}  // namespace wtkp

#pragma once

#include <optional>
#include <span>

#include <Eigen/Core>

namespace wtkp {

// Pinhole camera placed on the world -y axis at (0, -distance, height).
struct CameraConfig {
    double distance_m = 150.0;
    double height_m = 89.0;
    double focal_length_mm = 24.0;
    double roll_deg = 0.0;
    double yaw_deg = 0.0;
    bool center_on_hub = false;
    // Pitch is chosen so the world point (0, 0, aim_height_m) lands on the
    // horizontal center line of the image.
    double aim_height_m = 89.0;
    double sensor_width_mm = 36.0;
    int image_width = 1280;
    int image_height = 720;

    double focal_px() const { return focal_length_mm * image_width / sensor_width_mm; }

    void validate() const;
};

// Extrinsics + intrinsics ready for projection. Camera frame: x right,
// y down, z along the optical axis.
struct CameraPose {
    Eigen::Matrix3d world_to_camera = Eigen::Matrix3d::Identity();
    Eigen::Vector3d position = Eigen::Vector3d::Zero();
    double pitch_deg = 0.0;
    double yaw_deg = 0.0;
    double roll_deg = 0.0;
    double focal_px = 1.0;
    double cx = 0.0;
    double cy = 0.0;
    int width = 0;
    int height = 0;

    Eigen::Vector3d to_camera(const Eigen::Vector3d& world) const {
        return world_to_camera * (world - position);
    }
};

struct PixelPoint {
    double u = 0.0;
    double v = 0.0;
    double depth = 0.0;
};

// Axis-aligned pixel box in corner form.
struct PixelBox {
    double x1 = 0.0;
    double y1 = 0.0;
    double x2 = 0.0;
    double y2 = 0.0;

    double width() const { return x2 - x1; }
    double height() const { return y2 - y1; }
    double area() const { return width() * height(); }
};

// When `hub_target` is given and config.center_on_hub is set, yaw and pitch
// aim the optical axis at the target instead of the default alignment.
CameraPose camera_pose(const CameraConfig& config,
                       const std::optional<Eigen::Vector3d>& hub_target = std::nullopt);

// nullopt is the behind-camera marker (depth <= 0).
std::optional<PixelPoint> project(const Eigen::Vector3d& world, const CameraPose& pose);

// Projection of a point already in camera coordinates with z > 0.
PixelPoint project_camera_point(const Eigen::Vector3d& cam, const CameraPose& pose);

// 2 when the point is in front of the camera and inside the image, else 0.
int keypoint_visibility(const std::optional<PixelPoint>& pixel, int width, int height);

// Tight box over the vertices clipped to the image; nullopt when the clipped
// box is narrower or shorter than 2 px.
std::optional<PixelBox> bbox_from_projection(std::span<const PixelPoint> vertices, int width, int height);

}  // namespace wtkp

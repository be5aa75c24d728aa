// Frozen outputs for (seed 42, index 0) under the default config. A change
// here means existing datasets can no longer be regenerated bit for bit.
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Geometry>
#include <gtest/gtest.h>

#include "core/annotation.hpp"
#include "core/pipeline.hpp"
#include "support/test_support.hpp"

using namespace wtkp;

namespace {

const std::filesystem::path kData = WTKP_TEST_DATA_DIR;

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

SceneConfig golden_scene() { return sample_scene(42, 0, GeneratorConfig{}); }

}  // namespace

TEST(Golden, SceneConfigBytes) {
    EXPECT_EQ(scene_to_json(golden_scene()).dump(2) + "\n", test::read_file(kData / "scene_seed42_index0.json"));
}

TEST(Golden, LabelFileBytes) {
    const auto scene = golden_scene();
    std::vector<AnnotationRecord> records;
    for (const auto& a : annotate_scene(scene, scene_camera_pose(scene))) {
        records.push_back(normalize_annotation(a, scene.camera.image_width, scene.camera.image_height));
    }
    EXPECT_EQ(format_label_file(records), test::read_file(kData / "label_seed42_index0.txt"));
}

TEST(Golden, RenderHashes) {
    const GeneratorConfig cfg;
    const auto scene = golden_scene();
    const auto want = nlohmann::json::parse(test::read_file(kData / "render_seed42_index0.json"));
    const auto fg = render_foreground(scene, scene_camera_pose(scene), render_settings(cfg));
    EXPECT_EQ(hex64(fnv1a64(fg.pixels)), want["foreground_fnv1a64"]);
    const auto gen = generate_image(scene, cfg, nullptr);
    EXPECT_EQ(hex64(fnv1a64(gen.pixels.pixels)), want["pixels_fnv1a64"]);
}

TEST(Golden, KeypointsReprojectedByHand) {
    // Camera-to-world rotation built from axis rotations: zero pose looks
    // along +y with image-down = -z; pitch about world x; roll about the
    // optical axis last.
    const auto scene = golden_scene();
    const auto& c = scene.camera;
    const double deg = std::numbers::pi / 180;
    const double pitch = std::atan2(c.aim_height_m - c.height_m, c.distance_m);
    Eigen::Matrix3d q0;
    q0.col(0) = Eigen::Vector3d(1, 0, 0);
    q0.col(1) = Eigen::Vector3d(0, 0, -1);
    q0.col(2) = Eigen::Vector3d(0, 1, 0);
    const Eigen::Matrix3d q = Eigen::AngleAxisd(pitch, Eigen::Vector3d::UnitX()).toRotationMatrix() * q0 *
                              Eigen::AngleAxisd(c.roll_deg * deg, Eigen::Vector3d::UnitZ()).toRotationMatrix();
    const Eigen::Vector3d centre(0, -c.distance_m, c.height_m);
    const double f = c.focal_length_mm * c.image_width / c.sensor_width_mm;

    const auto annotations = annotate_scene(scene, scene_camera_pose(scene));
    std::size_t next = 0;
    int checked = 0;
    for (const auto& t : scene.turbines) {
        if (!turbine_bbox(t, scene_camera_pose(scene))) continue;
        const auto& a = annotations.at(next++);
        const auto world = keypoints_world(t);
        for (int k = 0; k < kNumKeypoints; ++k) {
            const Eigen::Vector3d cam = q.transpose() * (world.points[k] - centre);
            const double u = c.image_width / 2.0 + f * cam.x() / cam.z();
            const double v = c.image_height / 2.0 + f * cam.y() / cam.z();
            const bool inside = cam.z() > 0 && u >= 0 && u < c.image_width && v >= 0 && v < c.image_height;
            ASSERT_EQ(a.keypoints[k].visibility, inside ? 2 : 0);
            if (!inside) continue;
            EXPECT_NEAR(a.keypoints[k].x, u, 1e-6);
            EXPECT_NEAR(a.keypoints[k].y, v, 1e-6);
            ++checked;
        }
    }
    EXPECT_EQ(next, annotations.size());
    EXPECT_GT(checked, 0);
}

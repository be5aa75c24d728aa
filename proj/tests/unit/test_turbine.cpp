#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "core/errors.hpp"
#include "core/rng.hpp"
#include "core/turbine.hpp"

using namespace wtkp;

namespace {

constexpr double kPi = std::numbers::pi;

void expect_near(const Eigen::Vector3d& a, const Eigen::Vector3d& b, double tol = 1e-9) {
    EXPECT_NEAR(a.x(), b.x(), tol);
    EXPECT_NEAR(a.y(), b.y(), tol);
    EXPECT_NEAR(a.z(), b.z(), tol);
}

}  // namespace

TEST(Geometry, DefaultsAreValid) {
    EXPECT_NO_THROW(TurbineGeometry{}.validate());
    for (double s : {0.8, 1.0, 1.2}) EXPECT_NO_THROW(TurbineGeometry{}.with_blade_scale(s).validate());
}

TEST(Geometry, RejectsBrokenInvariants) {
    TurbineGeometry g;
    g.blade_length = 90.0;
    EXPECT_THROW(g.validate(), ConfigError);
    g = {};
    g.hub_rear_offset = 6.0;
    EXPECT_THROW(g.validate(), ConfigError);
    g = {};
    g.nacelle_width = 0.0;
    EXPECT_THROW(g.validate(), ConfigError);
    g = {};
    g.tower_top_radius = -1.0;
    EXPECT_THROW(g.validate(), ConfigError);
}

TEST(Keypoints, IdentityPoseTowerTop) {
    const auto kp = keypoints_world(make_turbine(0, 0, 0, 0));
    expect_near(kp[Keypoint::TowerTop], {0, 0, 89});
    expect_near(kp[Keypoint::TowerBottom], {0, 0, 0});
}

TEST(Keypoints, ZeroRotationPutsOneTipStraightUp) {
    const TurbineInstance t = make_turbine(12, 140, 33, 0);
    const auto kp = keypoints_world(t);
    const auto f = turbine_frame(t);
    expect_near(kp[Keypoint::Tip1], f.rotor_center + Eigen::Vector3d(0, 0, 55));
}

TEST(Keypoints, YawNinetyHubFront) {
    // Yaw 0 faces -y; +90 turns counterclockwise seen from above, so the
    // rotor faces +x: hub_front = tower_top + 4 * (1, 0, 0).
    TurbineGeometry g;
    g.hub_front_offset = 4.0;
    g.hub_rear_offset = 1.5;
    const auto kp = keypoints_world(make_turbine(0, 0, 90, 0, g));
    expect_near(kp[Keypoint::HubFront], {4, 0, 89}, 1e-12);
    expect_near(kp[Keypoint::HubRear], {1.5, 0, 89}, 1e-12);

    const auto kp0 = keypoints_world(make_turbine(0, 0, 0, 0, g));
    expect_near(kp0[Keypoint::HubFront], {0, -4, 89}, 1e-12);
}

TEST(Keypoints, HandRotatedTipPositions) {
    // yaw 30: front = (sin 30, -cos 30, 0), right = (cos 30, sin 30, 0).
    // phi 90 puts blade 0 at 3 o'clock seen from the front (along right).
    const TurbineInstance t = make_turbine(5, 60, 30, 90);
    const auto kp = keypoints_world(t);
    const double c = std::cos(kPi / 6), s = std::sin(kPi / 6);
    const Eigen::Vector3d centre(5 + 3.75 * s, 60 - 3.75 * c, 89);
    const Eigen::Vector3d right(c, s, 0);
    const Eigen::Vector3d up(0, 0, 1);
    // blade 0 at 90 -> segment 1; blade 1 at 210 -> 2; blade 2 at 330 -> 3.
    expect_near(kp[Keypoint::Tip1], centre + 55 * right);
    expect_near(kp[Keypoint::Tip2], centre + 55 * (std::cos(210 * kPi / 180) * up + std::sin(210 * kPi / 180) * right));
    expect_near(kp[Keypoint::Tip3], centre + 55 * (std::cos(330 * kPi / 180) * up + std::sin(330 * kPi / 180) * right));
}

TEST(Keypoints, ClockwiseFromFront) {
    // Observer in front of a yaw-0 rotor stands at -y looking toward +y, so
    // their right is world +x. phi = 90 must point the tip to +x.
    const auto kp = keypoints_world(make_turbine(0, 0, 0, 90));
    const auto f = turbine_frame(make_turbine(0, 0, 0, 90));
    expect_near(kp[Keypoint::Tip1], f.rotor_center + Eigen::Vector3d(55, 0, 0));
}

TEST(Keypoints, PeriodicInAngles) {
    Rng rng(7);
    for (int i = 0; i < 200; ++i) {
        const double x = rng.uniform(-100, 100), y = rng.uniform(0, 400);
        const double yaw = rng.uniform(0, 360), phi = rng.uniform(0, 360);
        const auto a = keypoints_world(make_turbine(x, y, yaw, phi));
        const auto b = keypoints_world(make_turbine(x, y, yaw + 360, phi + 360));
        const auto c = keypoints_world(make_turbine(x, y, yaw - 720, phi - 360));
        for (int k = 0; k < kNumKeypoints; ++k) {
            expect_near(a.points[k], b.points[k], 1e-9);
            expect_near(a.points[k], c.points[k], 1e-9);
        }
    }
}

TEST(Keypoints, TipSetInvariantUnderThirdTurn) {
    Rng rng(8);
    for (int i = 0; i < 200; ++i) {
        const double yaw = rng.uniform(0, 360), phi = rng.uniform(0, 360);
        const auto a = keypoints_world(make_turbine(0, 100, yaw, phi));
        const auto b = keypoints_world(make_turbine(0, 100, yaw, phi + 120));
        for (int k = 0; k < kNumTips; ++k) {
            double best = 1e9;
            for (int j = 0; j < kNumTips; ++j) best = std::min(best, (a.points[k] - b.points[j]).norm());
            EXPECT_LT(best, 1e-9);
        }
        for (int k = kNumTips; k < kNumKeypoints; ++k) expect_near(a.points[k], b.points[k]);
    }
}

TEST(Keypoints, AboveGround) {
    Rng rng(9);
    for (int i = 0; i < 2000; ++i) {
        TurbineGeometry g = TurbineGeometry{}.with_blade_scale(1.2);
        const auto kp = keypoints_world(make_turbine(rng.uniform(-50, 50), rng.uniform(0, 500), rng.uniform(0, 360),
                                                     rng.uniform(0, 360), g));
        for (const auto& p : kp.points) EXPECT_GE(p.z(), 0.0);
    }
}

TEST(TipLabels, SegmentExamples) {
    EXPECT_EQ(assign_tip_labels({0, 120, 240}), (std::array<int, 3>{1, 2, 3}));
    EXPECT_EQ(assign_tip_labels({119.999, 239.999, 359.999}), (std::array<int, 3>{1, 2, 3}));
    EXPECT_EQ(assign_tip_labels({120, 240, 0}), (std::array<int, 3>{2, 3, 1}));
    EXPECT_EQ(assign_tip_labels({240, 0, 120}), (std::array<int, 3>{3, 1, 2}));
    EXPECT_EQ(assign_tip_labels({-120, 0, 120}), (std::array<int, 3>{3, 1, 2}));
}

TEST(TipLabels, RejectsBadSpacing) {
    EXPECT_THROW(assign_tip_labels({0, 100, 240}), SceneError);
    EXPECT_THROW(assign_tip_labels({0, 0, 0}), SceneError);
    EXPECT_THROW(assign_tip_labels({10, 130, 10}), SceneError);
    EXPECT_THROW(assign_tip_labels({NAN, 120, 240}), SceneError);
}

TEST(TipLabels, AdvancingThirdTurnShiftsCyclically) {
    Rng rng(10);
    for (int i = 0; i < 1000; ++i) {
        const double phi = rng.uniform(0, 360);
        const auto a = assign_tip_labels(blade_angles(phi));
        const auto b = assign_tip_labels(blade_angles(phi + 120));
        for (int k = 0; k < 3; ++k) EXPECT_EQ(b[k], a[k] % 3 + 1) << phi;
    }
}

TEST(Angles, Normalize) {
    EXPECT_DOUBLE_EQ(normalize_degrees(360.0), 0.0);
    EXPECT_DOUBLE_EQ(normalize_degrees(-90.0), 270.0);
    EXPECT_DOUBLE_EQ(normalize_degrees(725.0), 5.0);
    EXPECT_EQ(normalize_degrees(-1e-18), 0.0);
    const auto t = make_turbine(0, 0, -30, 400);
    EXPECT_DOUBLE_EQ(t.yaw_deg, 330.0);
    EXPECT_DOUBLE_EQ(t.blade_rotation_deg, 40.0);
}

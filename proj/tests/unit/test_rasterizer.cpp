#include <cmath>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "core/errors.hpp"
#include "core/pipeline.hpp"
#include "core/rasterizer.hpp"
#include "support/test_support.hpp"

using namespace wtkp;

namespace {

SceneConfig single_turbine_scene(double x, double y, double yaw, double phi, double distance = 150) {
    SceneConfig s;
    s.turbines = {make_turbine(x, y, yaw, phi)};
    s.camera.distance_m = distance;
    s.camera.height_m = 89;
    s.camera.focal_length_mm = 24;
    return s;
}

}  // namespace

TEST(Render, EmptySceneIsTransparent) {
    SceneConfig s;
    const auto fg = render_foreground(s, scene_camera_pose(s), {});
    ASSERT_EQ(fg.channels, 4);
    for (std::size_t i = 3; i < fg.pixels.size(); i += 4) ASSERT_EQ(fg.pixels[i], 0);

    // Turbine entirely behind the camera.
    s = single_turbine_scene(30, -400, 0, 0);
    const auto fg2 = render_foreground(s, scene_camera_pose(s), {});
    for (std::size_t i = 3; i < fg2.pixels.size(); i += 4) ASSERT_EQ(fg2.pixels[i], 0);
}

TEST(Render, AlphaCentroidInsideBox) {
    const SceneConfig s = single_turbine_scene(0, 100, 0, 30);
    const auto pose = scene_camera_pose(s);
    const auto fg = render_foreground(s, pose, {});
    const auto box = turbine_bbox(s.turbines[0], pose);
    ASSERT_TRUE(box);
    double sx = 0, sy = 0, sa = 0;
    int outside = 0;
    for (int y = 0; y < fg.height; ++y) {
        for (int x = 0; x < fg.width; ++x) {
            const double a = fg.at(x, y)[3];
            if (a == 0) continue;
            sx += a * (x + 0.5);
            sy += a * (y + 0.5);
            sa += a;
            if (x + 1 < box->x1 || x > box->x2 || y + 1 < box->y1 || y > box->y2) ++outside;
        }
    }
    ASSERT_GT(sa, 0);
    EXPECT_GT(sx / sa, box->x1);
    EXPECT_LT(sx / sa, box->x2);
    EXPECT_GT(sy / sa, box->y1);
    EXPECT_LT(sy / sa, box->y2);
    EXPECT_EQ(outside, 0);
}

TEST(Render, EdgesAreTheOnlyFractionalAlpha) {
    const SceneConfig s = single_turbine_scene(0, 100, 0, 0);
    const auto fg = render_foreground(s, scene_camera_pose(s), {});
    int full = 0, partial = 0;
    for (int y = 1; y + 1 < fg.height; ++y) {
        for (int x = 1; x + 1 < fg.width; ++x) {
            const int a = fg.at(x, y)[3];
            if (a == 255) ++full;
            if (a > 0 && a < 255) {
                ++partial;
                // A fractional pixel touches either a transparent or another
                // fractional pixel in its 8-neighbourhood.
                bool border = false;
                for (int dy = -1; dy <= 1; ++dy)
                    for (int dx = -1; dx <= 1; ++dx) border = border || fg.at(x + dx, y + dy)[3] < 255;
                EXPECT_TRUE(border);
            }
        }
    }
    EXPECT_GT(full, 1000);
    EXPECT_GT(partial, 0);
}

TEST(Render, NearerTurbineWins) {
    // Same line of sight; the near one is shaded through less haze so the
    // two colors differ with dust, and the near turbine must cover the far.
    SceneConfig s;
    s.sun.dust_density = 1.0;
    s.turbines = {make_turbine(0, 600, 0, 0), make_turbine(0, 60, 0, 0)};
    s.camera.distance_m = 100;
    s.camera.height_m = 89;
    s.camera.focal_length_mm = 24;
    const auto pose = scene_camera_pose(s);
    const auto fg = render_foreground(s, pose, {});

    SceneConfig near_only = s;
    near_only.turbines = {s.turbines[1]};
    const auto ref = render_foreground(near_only, pose, {});
    SceneConfig swapped = s;
    std::swap(swapped.turbines[0], swapped.turbines[1]);
    EXPECT_EQ(render_foreground(swapped, pose, {}), fg);

    int compared = 0;
    for (int y = 0; y < fg.height; ++y) {
        for (int x = 0; x < fg.width; ++x) {
            if (ref.at(x, y)[3] != 255) continue;
            for (int c = 0; c < 4; ++c) ASSERT_EQ(fg.at(x, y)[c], ref.at(x, y)[c]);
            ++compared;
        }
    }
    EXPECT_GT(compared, 1000);
}

TEST(Render, HazeTowardSky) {
    RenderSettings settings;
    SceneConfig near = single_turbine_scene(0, 30, 0, 0, 80);
    SceneConfig far = single_turbine_scene(0, 780, 0, 0, 80);
    far.camera.focal_length_mm = 200;
    const auto a = render_foreground(near, scene_camera_pose(near), settings);
    const auto b = render_foreground(far, scene_camera_pose(far), settings);
    // Tower pixel straight below the principal point.
    auto tower_color = [](const ImageBuffer& img) {
        for (int y = img.height - 1; y >= img.height / 2; --y)
            if (img.at(img.width / 2, y)[3] == 255) return std::array<int, 3>{img.at(img.width / 2, y)[0], img.at(img.width / 2, y)[1], img.at(img.width / 2, y)[2]};
        return std::array<int, 3>{-1, -1, -1};
    };
    const auto ca = tower_color(a), cb = tower_color(b);
    ASSERT_GE(ca[0], 0);
    ASSERT_GE(cb[0], 0);
    const auto sky = settings.sky_color;
    double da = 0, db = 0;
    for (int c = 0; c < 3; ++c) {
        da += std::abs(ca[c] - sky[c]);
        db += std::abs(cb[c] - sky[c]);
    }
    EXPECT_LT(db, da);
}

TEST(Render, Deterministic) {
    const GeneratorConfig cfg;
    for (int i = 0; i < 3; ++i) {
        const auto s = sample_scene(42, i, cfg);
        const auto pose = scene_camera_pose(s);
        EXPECT_EQ(render_foreground(s, pose, render_settings(cfg)), render_foreground(s, pose, render_settings(cfg)));
    }
}

TEST(Background, NoiseMean) {
    Rng rng(1);
    const auto img = noise_background(1280, 720, rng);
    double sum[3] = {0, 0, 0};
    for (std::size_t i = 0; i < img.pixels.size(); ++i) sum[i % 3] += img.pixels[i];
    for (double s : sum) {
        const double mean = s / (1280.0 * 720.0);
        EXPECT_GE(mean, 117);
        EXPECT_LE(mean, 138);
    }
}

TEST(Background, CropAndResizeToOutputSize) {
    const auto src = test::landscape(4000, 3000, 2);
    const auto out = crop_and_resize(src, 0.3, 0.7, 1280, 720);
    EXPECT_EQ(out.width, 1280);
    EXPECT_EQ(out.height, 720);
    EXPECT_EQ(out.channels, 3);
    const auto tall = crop_and_resize(test::landscape(300, 900, 3), 0.5, 0.5, 1280, 720);
    EXPECT_EQ(tall.width, 1280);
    EXPECT_EQ(tall.height, 720);
}

TEST(Background, CropWindowFollowsFractions) {
    // Left half black, right half white; a 16:9 crop of a 4:1 source at
    // crop_x 0 sees only black, at 1 only white.
    ImageBuffer src(1600, 400, 3, 0);
    for (int y = 0; y < 400; ++y)
        for (int x = 800; x < 1600; ++x) src.at(x, y)[0] = src.at(x, y)[1] = src.at(x, y)[2] = 255;
    const auto left = crop_and_resize(src, 0.0, 0.5, 160, 90);
    const auto right = crop_and_resize(src, 1.0, 0.5, 160, 90);
    for (auto p : left.pixels) ASSERT_EQ(p, 0);
    for (auto p : right.pixels) ASSERT_EQ(p, 255);
}

TEST(Background, SingleImageLibrary) {
    test::TempDir dir;
    write_file_atomic(dir / "only.png", encode_png(test::landscape(640, 360, 4)));
    BackgroundLibrary lib(dir.path());
    ASSERT_EQ(lib.size(), 1u);
    const auto want = crop_and_resize(test::landscape(640, 360, 4), 0, 0, 320, 180);
    Rng rng(1);
    for (int i = 0; i < 3; ++i) {
        EXPECT_EQ(load_background(&lib, {false, 0, 0, 0}, 320, 180, rng), want);
    }
}

TEST(Background, BadLibraryIsConfigError) {
    EXPECT_THROW(BackgroundLibrary("/nonexistent/lib"), ConfigError);
    test::TempDir empty;
    test::write_file(empty / "notes.txt", "x");
    EXPECT_THROW(BackgroundLibrary(empty.path()), ConfigError);
}

TEST(Background, CorruptImageSkippedWithWarning) {
    test::TempDir dir;
    test::write_file(dir / "a_broken.jpg", "not a jpeg");
    write_file_atomic(dir / "b_good.png", encode_png(test::landscape(320, 180, 5)));
    BackgroundLibrary lib(dir.path());
    std::vector<std::string> warnings;
    Rng rng(3);
    const auto img = load_background(&lib, {false, 0, 0, 0}, 320, 180, rng,
                                     [&](std::string_view w) { warnings.emplace_back(w); });
    EXPECT_EQ(img, crop_and_resize(test::landscape(320, 180, 5), 0, 0, 320, 180));
    ASSERT_FALSE(warnings.empty());
    EXPECT_NE(warnings[0].find("a_broken.jpg"), std::string::npos);
}

TEST(Composite, Rules) {
    ImageBuffer fg(2, 1, 4), bg(2, 1, 3);
    fg.pixels = {255, 255, 255, 128, 10, 20, 30, 255};
    bg.pixels = {0, 0, 0, 200, 200, 200};
    const auto out = composite(fg, bg);
    EXPECT_EQ(out.pixels, (std::vector<std::uint8_t>{128, 128, 128, 10, 20, 30}));

    ImageBuffer clear(2, 1, 4, 0);
    EXPECT_EQ(composite(clear, bg), bg);

    EXPECT_THROW(composite(ImageBuffer(3, 1, 4), bg), std::invalid_argument);
}

TEST(Composite, BackgroundMattersOnlyBelowFullAlpha) {
    const SceneConfig s = single_turbine_scene(0, 100, 0, 45);
    const auto fg = render_foreground(s, scene_camera_pose(s), {});
    Rng r1(1), r2(2);
    const auto a = composite(fg, noise_background(fg.width, fg.height, r1));
    const auto b = composite(fg, noise_background(fg.width, fg.height, r2));
    for (int y = 0; y < fg.height; ++y)
        for (int x = 0; x < fg.width; ++x)
            if (fg.at(x, y)[3] == 255)
                for (int c = 0; c < 3; ++c) ASSERT_EQ(a.at(x, y)[c], b.at(x, y)[c]);
}

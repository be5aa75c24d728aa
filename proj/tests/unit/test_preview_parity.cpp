#include <set>
#include <string>

#include <gtest/gtest.h>

#include "core/annotation.hpp"
#include "core/dataset.hpp"
#include "core/parity.hpp"
#include "core/preview.hpp"
#include "support/test_support.hpp"

using namespace wtkp;
namespace fs = std::filesystem;

TEST(Preview, MarkersLandOnLabels) {
    const ImageBuffer img(640, 360, 3, 40);
    PixelAnnotation a = test::make_gt({100.3, 50.7, 300.1, 320.9});
    const auto ov = draw_overlay(img, {a});
    EXPECT_FALSE(ov.watermark);
    ASSERT_EQ(ov.keypoints.size(), 7u);
    for (const auto& d : ov.keypoints) {
        const auto& k = a.keypoints[d.keypoint];
        EXPECT_LE(std::abs(d.x - k.x), 1.0);
        EXPECT_LE(std::abs(d.y - k.y), 1.0);
        // The marker is painted where it is reported.
        const auto* px = ov.image.at(static_cast<int>(d.x), static_cast<int>(d.y));
        EXPECT_NE(px[0] + px[1] + px[2], 3 * 40);
        EXPECT_EQ(d.text, d.keypoint < 3 ? std::to_string(d.keypoint + 1) : "");
    }
}

TEST(Preview, SkipsUnlabeledKeypoints) {
    PixelAnnotation a = test::make_gt({10, 10, 200, 200});
    a.keypoints[1] = {};
    a.keypoints[6] = {};
    const auto ov = draw_overlay(ImageBuffer(320, 240, 3), {a});
    EXPECT_EQ(ov.keypoints.size(), 5u);
}

TEST(Preview, WatermarkWithoutAnnotations) {
    const ImageBuffer img(320, 180, 3, 90);
    const auto ov = draw_overlay(img, {});
    EXPECT_TRUE(ov.watermark);
    EXPECT_NE(ov.image, img);
}

TEST(Preview, DatasetRoundTrip) {
    test::TempDir dir;
    GeneratorConfig cfg;
    cfg.count = 6;
    cfg.image_width = 320;
    cfg.image_height = 180;
    write_dataset(cfg, dir / "ds");

    EXPECT_TRUE(write_previews(dir / "ds", 0, dir / "none").empty());
    EXPECT_FALSE(fs::exists(dir / "none"));

    const auto m = read_manifest(dir / "ds");
    // Drop one label file: its preview carries the watermark.
    const std::string first = m["images"][0]["id"];
    fs::remove(dir / "ds" / m["images"][0]["label"].get<std::string>());

    const auto items = write_previews(dir / "ds", 4, dir / "prev");
    ASSERT_EQ(items.size(), 4u);
    EXPECT_EQ(items[0].id, first);
    EXPECT_TRUE(items[0].overlay.watermark);
    for (const auto& it : items) {
        EXPECT_TRUE(fs::exists(dir / "prev" / (it.id + ".png")));
        EXPECT_EQ(read_image(it.output), it.overlay.image);
    }
    EXPECT_EQ(write_previews(dir / "ds", 100, dir / "all").size(), 6u);
}

TEST(Parity, StableAndConsistent) {
    const auto a = export_parity_fixtures(7, 100);
    EXPECT_EQ(a.dump(), export_parity_fixtures(7, 100).dump());
    EXPECT_NE(a.dump(), export_parity_fixtures(8, 100).dump());
    EXPECT_EQ(a["cases"].size(), 100u);
    EXPECT_EQ(a["permutations"][1], nlohmann::json({2, 1, 3}));

    std::set<int> seen;
    int identities = 0;
    for (const auto& c : a["cases"]) {
        double pred[3][2], gt[3][2];
        bool labeled[3];
        for (int k = 0; k < 3; ++k) {
            pred[k][0] = c["pred_keypoints"][k][0];
            pred[k][1] = c["pred_keypoints"][k][1];
            gt[k][0] = c["gt_keypoints"][k][0];
            gt[k][1] = c["gt_keypoints"][k][1];
            labeled[k] = c["gt_keypoints"][k][2].get<int>() > 0;
        }
        const auto want = test::brute_force_permutation(pred, gt, labeled);
        EXPECT_EQ(c["permutation"].get<int>(), want.index);
        EXPECT_DOUBLE_EQ(c["tip_sum_squared"].get<double>(), want.cost);
        seen.insert(want.index);

        // OKS recomputed from the permuted keypoints.
        const double area = c["area"];
        double sum = 0;
        int n = 0;
        for (int k = 0; k < 7; ++k) {
            if (c["gt_keypoints"][k][2].get<int>() == 0) continue;
            const double dx = c["pred_keypoints_permuted"][k][0].get<double>() - c["gt_keypoints"][k][0].get<double>();
            const double dy = c["pred_keypoints_permuted"][k][1].get<double>() - c["gt_keypoints"][k][1].get<double>();
            sum += std::exp(-(dx * dx + dy * dy) / (2 * area * 0.01));
            ++n;
        }
        EXPECT_NEAR(c["oks"].get<double>(), sum / n, 1e-12);

        if (c["identity"].get<bool>()) {
            ++identities;
            EXPECT_EQ(c["tip_sum_squared"].get<double>(), 0.0);
            EXPECT_EQ(c["oks"].get<double>(), 1.0);
        }
    }
    EXPECT_EQ(identities, 10);
    EXPECT_EQ(seen.size(), 6u);
}

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "core/metrics.hpp"
#include "core/rng.hpp"
#include "support/test_support.hpp"

using namespace wtkp;

namespace {

TipTriplet triplet(double a, double b, double c, double d, double e, double f) {
    return {Eigen::Vector2d(a, b), Eigen::Vector2d(c, d), Eigen::Vector2d(e, f)};
}

TipTriplet random_triplet(Rng& rng) {
    return triplet(rng.uniform(0, 1280), rng.uniform(0, 720), rng.uniform(0, 1280), rng.uniform(0, 720),
                   rng.uniform(0, 1280), rng.uniform(0, 720));
}

}  // namespace

TEST(TipDistance, Examples) {
    const auto p = triplet(1, 2, 3, 4, 5, 6);
    const auto d0 = tip_distances(p, p);
    for (double d : d0) EXPECT_EQ(d, 0.0);
    auto q = p;
    q[0] += Eigen::Vector2d(3, 4);
    EXPECT_DOUBLE_EQ(tip_distances(q, p)[0], 5.0);
    Rng rng(1);
    for (int i = 0; i < 100; ++i) {
        const auto a = random_triplet(rng), b = random_triplet(rng);
        const auto d = tip_distances(a, b);
        for (int k = 0; k < 3; ++k) EXPECT_DOUBLE_EQ(d[k], std::hypot(a[k].x() - b[k].x(), a[k].y() - b[k].y()));
    }
}

TEST(Permutation, MatricesAreListedOrder) {
    for (int p = 0; p < 6; ++p) {
        const auto m = permutation_matrix(p);
        for (int i = 0; i < 3; ++i) {
            int row = 0, col = 0;
            for (int j = 0; j < 3; ++j) {
                row += m[i][j];
                col += m[j][i];
            }
            EXPECT_EQ(row, 1);
            EXPECT_EQ(col, 1);
            EXPECT_EQ(m[i][test::kListedPermutations[p][i] - 1], 1);
        }
    }
}

TEST(Permutation, IdentityAndSwap) {
    const auto gt = triplet(100, 100, 300, 300, 500, 100);
    EXPECT_EQ(optimal_tip_permutation(gt, gt).index, 0);
    const auto swapped = triplet(300, 300, 100, 100, 500, 100);
    const auto r = optimal_tip_permutation(swapped, gt);
    EXPECT_EQ(r.index, 1);  // pi_2
    EXPECT_EQ(r.sum_squared, 0.0);
    for (int k = 0; k < 3; ++k) EXPECT_EQ(r.permuted[k], gt[k]);
}

TEST(Permutation, MatchesBruteForce) {
    Rng rng(2);
    for (int i = 0; i < 5000; ++i) {
        const auto pred = random_triplet(rng), gt = random_triplet(rng);
        double p[3][2], g[3][2];
        for (int k = 0; k < 3; ++k) {
            p[k][0] = pred[k].x();
            p[k][1] = pred[k].y();
            g[k][0] = gt[k].x();
            g[k][1] = gt[k].y();
        }
        const auto want = test::brute_force_permutation(p, g);
        const auto got = optimal_tip_permutation(pred, gt);
        ASSERT_EQ(got.index + 1, want.index);
        ASSERT_DOUBLE_EQ(got.sum_squared, want.cost);

        bool mask[3] = {rng.bernoulli(0.7), rng.bernoulli(0.7), rng.bernoulli(0.7)};
        const auto want_m = test::brute_force_permutation(p, g, mask);
        const auto got_m = optimal_tip_permutation(pred, gt, {mask[0], mask[1], mask[2]});
        ASSERT_EQ(got_m.index + 1, want_m.index);
    }
}

TEST(Permutation, TiesGoToLowestIndex) {
    // All predicted tips at the same spot: every permutation costs the same.
    const auto pred = triplet(5, 5, 5, 5, 5, 5);
    EXPECT_EQ(optimal_tip_permutation(pred, triplet(1, 2, 3, 4, 5, 6)).index, 0);
    // Tips 2 and 3 coincide in the prediction: pi_1 and pi_4 tie.
    const auto p2 = triplet(0, 0, 10, 10, 10, 10);
    EXPECT_EQ(optimal_tip_permutation(p2, triplet(0, 0, 10, 10, 10, 10)).index, 0);
    // No labeled tips at all.
    EXPECT_EQ(optimal_tip_permutation(triplet(1, 1, 2, 2, 3, 3), triplet(9, 9, 8, 8, 7, 7), {false, false, false}).index,
              0);
}

TEST(Permutation, NeverWorseThanIdentity) {
    Rng rng(3);
    for (int i = 0; i < 2000; ++i) {
        const auto pred = random_triplet(rng), gt = random_triplet(rng);
        const auto d = tip_distances(pred, gt);
        const double identity = d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
        EXPECT_LE(optimal_tip_permutation(pred, gt).sum_squared, identity + 1e-9);
    }
}

TEST(Oks, Examples) {
    const auto gt = test::make_gt({100, 100, 300, 400});
    EXPECT_EQ(*oks(gt.keypoints, gt.keypoints, gt.box.area()), 1.0);

    // One labeled keypoint at d^2 = 2 s^2 k^2 -> e^-1.
    PixelAnnotation single;
    single.box = {0, 0, 100, 100};
    single.keypoints[4] = {50, 50, 2};
    ImageKeypoints pred = single.keypoints;
    const double d = std::sqrt(2 * 10000 * 0.01);
    pred[4].x += d;
    EXPECT_NEAR(*oks(pred, single.keypoints, 10000), std::exp(-1.0), 1e-12);
    EXPECT_NEAR(std::exp(-1.0), 0.367879, 1e-6);

    EXPECT_FALSE(oks(pred, ImageKeypoints{}, 10000).has_value());
}

TEST(Oks, RotatedTipsScoreOneAfterPermutation) {
    const auto gt = test::make_gt({100, 100, 300, 400});
    ImageKeypoints pred = gt.keypoints;
    std::rotate(pred.begin(), pred.begin() + 1, pred.begin() + 3);
    EXPECT_LT(*oks(pred, gt.keypoints, gt.box.area()), 1.0);
    EXPECT_EQ(*pose_similarity(pred, gt), 1.0);
}

TEST(Oks, Bounded) {
    Rng rng(4);
    for (int i = 0; i < 1000; ++i) {
        const auto gt = test::make_gt({rng.uniform(0, 600), rng.uniform(0, 300), rng.uniform(700, 1280), rng.uniform(400, 720)});
        ImageKeypoints pred = gt.keypoints;
        for (auto& k : pred) {
            k.x += rng.normal(0, 50);
            k.y += rng.normal(0, 50);
        }
        const double s = *pose_similarity(pred, gt);
        EXPECT_GE(s, 0.0);
        EXPECT_LE(s, 1.0);
    }
}

TEST(Iou, Examples) {
    EXPECT_EQ(iou({0, 0, 1, 1}, {0, 0, 1, 1}), 1.0);
    EXPECT_EQ(iou({0, 0, 1, 1}, {2, 2, 3, 3}), 0.0);
    EXPECT_DOUBLE_EQ(iou({0, 0, 1, 1}, {0.5, 0, 1.5, 1}), 1.0 / 3.0);
    EXPECT_EQ(iou({0, 0, 1, 1}, {1, 0, 2, 1}), 0.0);
    Rng rng(5);
    for (int i = 0; i < 1000; ++i) {
        const PixelBox a{rng.uniform(0, 50), rng.uniform(0, 50), rng.uniform(60, 100), rng.uniform(60, 100)};
        const PixelBox b{rng.uniform(0, 50), rng.uniform(0, 50), rng.uniform(60, 100), rng.uniform(60, 100)};
        EXPECT_GE(iou(a, b), 0.0);
        EXPECT_LE(iou(a, b), 1.0);
        EXPECT_EQ(iou(a, b), iou(b, a));
    }
}

TEST(Matching, Examples) {
    EXPECT_EQ(match_detections({{1.0}}, 0.5), (std::vector<int>{0}));
    EXPECT_EQ(match_detections({{0.9}, {0.8}}, 0.5), (std::vector<int>{0, -1}));
    EXPECT_EQ(match_detections({{0.4}}, 0.5), (std::vector<int>{-1}));
    // Highest similarity wins; ties to the lower gt index.
    EXPECT_EQ(match_detections({{0.6, 0.9}, {0.7, 0.7}}, 0.5), (std::vector<int>{1, 0}));
    EXPECT_EQ(match_detections({{0.7, 0.7}}, 0.5), (std::vector<int>{0}));
}

TEST(Matching, ThreeDetectionsTwoTruthsAgainstEnumeration) {
    // Greedy result equals the outcome of walking every assignment in
    // confidence order and keeping the lexicographically greedy one.
    Rng rng(6);
    for (int trial = 0; trial < 2000; ++trial) {
        std::vector<std::vector<double>> sim(3, std::vector<double>(2));
        for (auto& row : sim)
            for (auto& v : row) v = std::round(rng.uniform(0, 1) * 20) / 20;
        const double tau = 0.5;
        const auto got = match_detections(sim, tau);

        // Enumerate all 3^... assignments: each det takes gt 0, gt 1 or none.
        std::vector<int> best;
        std::vector<double> best_key;
        for (int code = 0; code < 27; ++code) {
            std::vector<int> a = {code % 3 - 1, code / 3 % 3 - 1, code / 9 - 1};
            bool ok = true;
            for (int d = 0; d < 3 && ok; ++d) {
                if (a[d] >= 0 && sim[d][a[d]] < tau) ok = false;
                for (int e = 0; e < d && ok; ++e) ok = !(a[d] >= 0 && a[d] == a[e]);
            }
            if (!ok) continue;
            // Greedy order: det 0 maximizes its own similarity first (then
            // prefers the lower gt), then det 1, then det 2.
            std::vector<double> key;
            for (int d = 0; d < 3; ++d) {
                key.push_back(a[d] >= 0 ? sim[d][a[d]] : -1.0);
                key.push_back(a[d] >= 0 ? -a[d] : -9);
            }
            if (best.empty() || key > best_key) {
                best = a;
                best_key = key;
            }
        }
        ASSERT_EQ(got, best);
    }
}

TEST(Ap, Examples) {
    EXPECT_EQ(*average_precision({true}, 1), 1.0);
    EXPECT_EQ(*average_precision({false, true}, 1), 0.5);
    EXPECT_EQ(*average_precision({}, 3), 0.0);
    EXPECT_FALSE(average_precision({true}, 0).has_value());
    EXPECT_EQ(*average_precision({true, false}, 2), 51.0 / 101.0);
}

TEST(Ap, RaisingTpConfidenceNeverHurts) {
    Rng rng(7);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t n = 2 + rng.index(15);
        std::vector<bool> tp(n);
        std::size_t tps = 0;
        for (std::size_t i = 0; i < n; ++i) tps += (tp[i] = rng.bernoulli(0.5));
        const std::size_t gts = tps + rng.index(4);
        if (gts == 0) continue;
        for (std::size_t i = 1; i < n; ++i) {
            if (!tp[i] || tp[i - 1]) continue;
            auto moved = tp;
            std::swap(moved[i], moved[i - 1]);
            EXPECT_GE(*average_precision(moved, gts), *average_precision(tp, gts));
        }
    }
}

TEST(Report, MicroFixtureExact) {
    const auto r = map_report(test::micro_fixture());
    const test::MicroExpected want;
    EXPECT_EQ(r.box.map50, want.box_map50);
    EXPECT_EQ(r.box.map50_95, want.box_map50_95);
    EXPECT_EQ(r.pose.map50, want.pose_map50);
    EXPECT_EQ(r.pose.map50_95, want.pose_map50_95);
    EXPECT_EQ(r.box.ground_truths, 4u);
    EXPECT_EQ(r.pose.ground_truths, 3u);
    EXPECT_EQ(r.pose.ignored_ground_truths, 1u);
    EXPECT_EQ(r.box.true_positives[0], 4u);
    EXPECT_EQ(r.box.false_positives[0], 4u);
    EXPECT_EQ(r.box.true_positives[9], 3u);
    EXPECT_EQ(r.pose.true_positives[0], 3u);
    EXPECT_EQ(r.pose.false_positives[0], 4u);  // c1 dropped
    EXPECT_EQ(r.pose.true_positives[3], 2u);
    EXPECT_EQ(r.images, 5u);
    EXPECT_EQ(r.detections, 8u);
}

TEST(Report, PerfectPredictions) {
    auto images = test::micro_fixture();
    for (auto& im : images) {
        im.detections.clear();
        for (const auto& g : im.ground_truth) im.detections.push_back({g, 1.0});
    }
    const auto r = map_report(images);
    EXPECT_EQ(r.box.map50, 1.0);
    EXPECT_EQ(r.box.map50_95, 1.0);
    EXPECT_EQ(r.pose.map50, 1.0);
    EXPECT_EQ(r.pose.map50_95, 1.0);
}

TEST(Report, NoDetectionsScoresZero) {
    auto images = test::micro_fixture();
    for (auto& im : images) im.detections.clear();
    const auto r = map_report(images);
    EXPECT_EQ(r.box.map50, 0.0);
    EXPECT_EQ(r.pose.map50_95, 0.0);
    EXPECT_TRUE(r.box.defined);
}

TEST(Report, InvariantToGlobalTipRelabeling) {
    Rng rng(8);
    std::vector<ImageEval> images(20);
    for (auto& im : images) {
        const int n = 1 + static_cast<int>(rng.index(3));
        for (int g = 0; g < n; ++g) {
            const double x = rng.uniform(0, 900), y = rng.uniform(0, 400);
            im.ground_truth.push_back(test::make_gt({x, y, x + rng.uniform(80, 300), y + rng.uniform(100, 300)}));
        }
        for (const auto& g : im.ground_truth) {
            if (rng.bernoulli(0.2)) continue;
            Detection d{g, rng.uniform01()};
            for (auto& k : d.annotation.keypoints) {
                k.x += rng.normal(0, 12);
                k.y += rng.normal(0, 12);
            }
            im.detections.push_back(d);
        }
    }
    const auto base = map_report(images);
    for (int p = 0; p < 6; ++p) {
        auto relabeled = images;
        for (auto& im : relabeled) {
            for (auto& d : im.detections) {
                const auto tips = tips_of(d.annotation.keypoints);
                const auto& perm = kTipPermutations[p];
                d.annotation.keypoints = with_tips(d.annotation.keypoints, {tips[perm[0]], tips[perm[1]], tips[perm[2]]});
            }
        }
        const auto r = map_report(relabeled);
        EXPECT_EQ(r.pose.map50, base.pose.map50);
        EXPECT_EQ(r.pose.map50_95, base.pose.map50_95);
        EXPECT_EQ(r.pose.ap, base.pose.ap);
    }
    EXPECT_GE(base.box.map50, base.box.map50_95);
    EXPECT_GE(base.pose.map50, base.pose.map50_95);
}

TEST(Report, ImageOrderOnlyBreaksTies) {
    auto images = test::micro_fixture();
    const auto a = map_report(images);
    std::reverse(images.begin(), images.end());
    const auto b = map_report(images);
    EXPECT_EQ(a.box.map50_95, b.box.map50_95);
    EXPECT_EQ(a.pose.map50_95, b.pose.map50_95);
}

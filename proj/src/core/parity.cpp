#include "core/parity.hpp"

#include <algorithm>
#include <string>

#include "core/rng.hpp"

namespace wtkp {

namespace {

PixelAnnotation random_ground_truth(Rng& rng) {
    PixelAnnotation gt;
    const double w = rng.uniform(40.0, 600.0);
    const double h = rng.uniform(40.0, 600.0);
    const double x1 = rng.uniform(0.0, 1280.0 - w);
    const double y1 = rng.uniform(0.0, 720.0 - h);
    gt.box = {x1, y1, x1 + w, y1 + h};
    int labeled = 0;
    for (auto& kp : gt.keypoints) {
        kp.x = rng.uniform(gt.box.x1, gt.box.x2);
        kp.y = rng.uniform(gt.box.y1, gt.box.y2);
        kp.visibility = rng.bernoulli(0.1) ? 0 : 2;
        if (kp.visibility == 0) kp.x = kp.y = 0.0;
        labeled += kp.visibility > 0;
    }
    if (labeled == 0) {
        auto& kp = gt.keypoints[static_cast<std::size_t>(rng.index(kNumKeypoints))];
        kp = {rng.uniform(gt.box.x1, gt.box.x2), rng.uniform(gt.box.y1, gt.box.y2), 2};
    }
    return gt;
}

nlohmann::ordered_json points_json(const ImageKeypoints& kps, bool with_visibility) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& k : kps) {
        if (with_visibility) {
            arr.push_back({k.x, k.y, k.visibility});
        } else {
            arr.push_back({k.x, k.y});
        }
    }
    return arr;
}

}  // namespace

nlohmann::ordered_json export_parity_fixtures(std::uint64_t seed, std::size_t count, const OksConstants& k) {
    auto perms = nlohmann::ordered_json::array();
    for (const auto& p : kTipPermutations) perms.push_back({p[0] + 1, p[1] + 1, p[2] + 1});

    auto names = nlohmann::ordered_json::array();
    for (const auto& n : kKeypointNames) names.push_back(std::string(n));

    auto cases = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < count; ++i) {
        Rng rng = derive_rng(seed, i, StreamTag::Fixtures);
        const PixelAnnotation gt = random_ground_truth(rng);
        const bool identity = i % 10 == 0;

        ImageKeypoints pred = gt.keypoints;
        if (!identity) {
            const double sigma = rng.uniform(0.5, 40.0);
            for (auto& kp : pred) {
                if (kp.visibility == 0) {
                    kp.x = rng.uniform(gt.box.x1, gt.box.x2);
                    kp.y = rng.uniform(gt.box.y1, gt.box.y2);
                }
                kp.x += rng.normal(0.0, sigma);
                kp.y += rng.normal(0.0, sigma);
                kp.visibility = 2;
            }
            // Scramble tip order so every permutation shows up.
            const auto& shuffle = kTipPermutations[static_cast<std::size_t>(rng.index(kTipPermutations.size()))];
            const TipTriplet tips = tips_of(pred);
            pred = with_tips(pred, TipTriplet{tips[shuffle[0]], tips[shuffle[1]], tips[shuffle[2]]});
        }

        std::array<bool, kNumTips> mask{};
        for (int t = 0; t < kNumTips; ++t) mask[t] = gt.keypoints[t].visibility > 0;
        const auto best = optimal_tip_permutation(tips_of(pred), tips_of(gt.keypoints), mask);
        const ImageKeypoints permuted = with_tips(pred, best.permuted);
        const double score = oks(permuted, gt.keypoints, gt.box.area(), k).value_or(0.0);

        cases.push_back({
            {"id", i},
            {"identity", identity},
            {"gt_keypoints", points_json(gt.keypoints, true)},
            {"gt_box", {gt.box.x1, gt.box.y1, gt.box.x2, gt.box.y2}},
            {"area", gt.box.area()},
            {"pred_keypoints", points_json(pred, false)},
            {"permutation", best.index + 1},
            {"pred_keypoints_permuted", points_json(permuted, false)},
            {"tip_sum_squared", best.sum_squared},
            {"oks", score},
        });
    }

    return {
        {"format", "wtkp-parity-fixtures"},
        {"version", 1},
        {"seed", seed},
        {"count", count},
        {"keypoint_names", names},
        {"oks_constants", k},
        {"permutations", perms},
        {"conventions",
         {{"permutation", "1-based index into permutations; slot i of the permuted prediction takes predicted tip permutations[p-1][i]"},
          {"tip_sum_squared", "sum over labeled ground-truth tips of the squared pixel distance after permutation"},
          {"ties", "lowest permutation index wins"},
          {"oks", "mean over labeled ground-truth keypoints of exp(-d^2 / (2 area k^2)), area = gt box area"}}},
        {"cases", cases},
    };
}

}  // namespace wtkp

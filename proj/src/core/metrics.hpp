#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "core/annotation.hpp"
#include "core/camera.hpp"
#include "core/turbine.hpp"

namespace wtkp {

using TipTriplet = std::array<Eigen::Vector2d, kNumTips>;

// The six tip permutations in their canonical order. Entry i of a row is
// the (0-based) predicted tip placed in slot i: (P p)_i = p_{perm[i]}.
inline constexpr std::array<std::array<int, kNumTips>, 6> kTipPermutations = {{
    {0, 1, 2},
    {1, 0, 2},
    {2, 1, 0},
    {0, 2, 1},
    {1, 2, 0},
    {2, 0, 1},
}};

using PermutationMatrix = std::array<std::array<int, kNumTips>, kNumTips>;
PermutationMatrix permutation_matrix(int index);

std::array<double, kNumTips> tip_distances(const TipTriplet& pred, const TipTriplet& gt);

struct TipPermutationResult {
    int index = 0;  // 0-based position in kTipPermutations
    TipTriplet permuted{};
    double sum_squared = 0.0;
};

// argmin over the six permutations of the summed squared tip distances;
// ties go to the lowest index. Slots with mask[i] == false are left out of
// the sum (ground-truth tips that are not labeled).
TipPermutationResult optimal_tip_permutation(const TipTriplet& pred, const TipTriplet& gt,
                                             const std::array<bool, kNumTips>& mask = {true, true, true});

TipTriplet tips_of(const ImageKeypoints& keypoints);
ImageKeypoints with_tips(ImageKeypoints keypoints, const TipTriplet& tips);

inline constexpr double kDefaultOksConstant = 0.1;
using OksConstants = std::array<double, kNumKeypoints>;
inline constexpr OksConstants kDefaultOksConstants = {0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1};

// Mean over labeled gt keypoints of exp(-d^2 / (2 area k^2)). The
// prediction is used as given (no tip permutation). nullopt when the gt has
// no labeled keypoint.
std::optional<double> oks(const ImageKeypoints& pred, const ImageKeypoints& gt, double area,
                          const OksConstants& k = kDefaultOksConstants);

// Tip permutation against the labeled gt tips, then OKS with area = gt box area.
std::optional<double> pose_similarity(const ImageKeypoints& pred, const PixelAnnotation& gt,
                                      const OksConstants& k = kDefaultOksConstants);

double iou(const PixelBox& a, const PixelBox& b);

// similarity[d][g] for detections already sorted by descending confidence.
// Each detection takes the unmatched gt with the highest similarity >= tau
// (lowest index on ties). Returns the matched gt index per detection or -1.
std::vector<int> match_detections(const std::vector<std::vector<double>>& similarity, double tau);

// 101-point interpolated AP over a tp/fp sequence sorted by descending
// confidence. nullopt when there are no ground truths.
std::optional<double> average_precision(const std::vector<bool>& tp, std::size_t num_gt);

// Sum of the 101 interpolated precision values (AP * 101). Exposed so
// aggregates can be formed with a single division.
double interpolated_precision_sum(const std::vector<bool>& tp, std::size_t num_gt);

inline constexpr int kNumThresholds = 10;
// 0.50, 0.55, ..., 0.95
double threshold(int t);

struct Detection {
    PixelAnnotation annotation;
    double confidence = 0.0;
};

struct ImageEval {
    std::string id;
    std::vector<PixelAnnotation> ground_truth;
    std::vector<Detection> detections;
};

struct TaskMetrics {
    bool defined = false;  // false when there are no ground truths
    double map50 = 0.0;
    double map50_95 = 0.0;
    std::array<double, kNumThresholds> ap{};
    std::array<std::size_t, kNumThresholds> true_positives{};
    std::array<std::size_t, kNumThresholds> false_positives{};
    std::size_t ground_truths = 0;
    std::size_t ignored_ground_truths = 0;
};

struct MetricReport {
    TaskMetrics box;
    TaskMetrics pose;
    std::size_t images = 0;
    std::size_t detections = 0;
    std::size_t ground_truths = 0;
};

struct EvalOptions {
    OksConstants oks_constants = kDefaultOksConstants;
};

// Box metrics use IoU; pose metrics use pose_similarity. Pose ground truths
// without any labeled keypoint are ignored: they do not count toward recall
// and a detection whose best remaining match is such a gt (IoU >= 0.5) is
// dropped instead of counted as a false positive.
MetricReport map_report(const std::vector<ImageEval>& images, const EvalOptions& options = {});

}  // namespace wtkp

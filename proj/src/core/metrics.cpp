#include "core/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace wtkp {

PermutationMatrix permutation_matrix(int index) {
    const auto& perm = kTipPermutations.at(static_cast<std::size_t>(index));
    PermutationMatrix m{};
    for (int i = 0; i < kNumTips; ++i) m[i][perm[i]] = 1;
    return m;
}

std::array<double, kNumTips> tip_distances(const TipTriplet& pred, const TipTriplet& gt) {
    std::array<double, kNumTips> d{};
    for (int i = 0; i < kNumTips; ++i) d[i] = (pred[i] - gt[i]).norm();
    return d;
}

TipPermutationResult optimal_tip_permutation(const TipTriplet& pred, const TipTriplet& gt,
                                             const std::array<bool, kNumTips>& mask) {
    TipPermutationResult best;
    best.sum_squared = std::numeric_limits<double>::infinity();
    for (int p = 0; p < static_cast<int>(kTipPermutations.size()); ++p) {
        const auto& perm = kTipPermutations[p];
        double sum = 0.0;
        for (int i = 0; i < kNumTips; ++i) {
            if (mask[i]) sum += (pred[perm[i]] - gt[i]).squaredNorm();
        }
        if (sum < best.sum_squared) {
            best.index = p;
            best.sum_squared = sum;
        }
    }
    const auto& perm = kTipPermutations[best.index];
    for (int i = 0; i < kNumTips; ++i) best.permuted[i] = pred[perm[i]];
    return best;
}

TipTriplet tips_of(const ImageKeypoints& keypoints) {
    TipTriplet t;
    for (int i = 0; i < kNumTips; ++i) t[i] = {keypoints[i].x, keypoints[i].y};
    return t;
}

ImageKeypoints with_tips(ImageKeypoints keypoints, const TipTriplet& tips) {
    for (int i = 0; i < kNumTips; ++i) {
        keypoints[i].x = tips[i].x();
        keypoints[i].y = tips[i].y();
    }
    return keypoints;
}

std::optional<double> oks(const ImageKeypoints& pred, const ImageKeypoints& gt, double area, const OksConstants& k) {
    double total = 0.0;
    int labeled = 0;
    for (int i = 0; i < kNumKeypoints; ++i) {
        if (gt[i].visibility <= 0) continue;
        const double dx = pred[i].x - gt[i].x;
        const double dy = pred[i].y - gt[i].y;
        total += std::exp(-(dx * dx + dy * dy) / (2.0 * area * k[i] * k[i]));
        ++labeled;
    }
    if (labeled == 0 || !(area > 0.0)) return std::nullopt;
    return total / labeled;
}

std::optional<double> pose_similarity(const ImageKeypoints& pred, const PixelAnnotation& gt, const OksConstants& k) {
    std::array<bool, kNumTips> mask{};
    for (int i = 0; i < kNumTips; ++i) mask[i] = gt.keypoints[i].visibility > 0;
    const auto best = optimal_tip_permutation(tips_of(pred), tips_of(gt.keypoints), mask);
    return oks(with_tips(pred, best.permuted), gt.keypoints, gt.box.area(), k);
}

double iou(const PixelBox& a, const PixelBox& b) {
    const double iw = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
    const double ih = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
    if (iw <= 0.0 || ih <= 0.0) return 0.0;
    const double inter = iw * ih;
    const double uni = a.area() + b.area() - inter;
    return uni > 0.0 ? std::min(1.0, inter / uni) : 0.0;
}

std::vector<int> match_detections(const std::vector<std::vector<double>>& similarity, double tau) {
    std::vector<int> out(similarity.size(), -1);
    std::vector<bool> taken;
    for (std::size_t d = 0; d < similarity.size(); ++d) {
        const auto& row = similarity[d];
        if (taken.size() < row.size()) taken.resize(row.size(), false);
        int best = -1;
        double best_sim = tau;
        for (std::size_t g = 0; g < row.size(); ++g) {
            if (taken[g] || !(row[g] >= tau)) continue;
            if (best < 0 || row[g] > best_sim) {
                best = static_cast<int>(g);
                best_sim = row[g];
            }
        }
        if (best >= 0) {
            taken[best] = true;
            out[d] = best;
        }
    }
    return out;
}

double interpolated_precision_sum(const std::vector<bool>& tp, std::size_t num_gt) {
    if (num_gt == 0 || tp.empty()) return 0.0;
    const std::size_t n = tp.size();
    std::vector<double> precision(n), recall(n);
    std::size_t tps = 0;
    for (std::size_t j = 0; j < n; ++j) {
        if (tp[j]) ++tps;
        precision[j] = static_cast<double>(tps) / static_cast<double>(j + 1);
        recall[j] = static_cast<double>(tps) / static_cast<double>(num_gt);
    }
    for (std::size_t j = n - 1; j > 0; --j) precision[j - 1] = std::max(precision[j - 1], precision[j]);

    double sum = 0.0;
    std::size_t j = 0;
    for (int k = 0; k <= 100; ++k) {
        const double r = k / 100.0;
        while (j < n && recall[j] < r) ++j;
        if (j == n) break;
        sum += precision[j];
    }
    return sum;
}

std::optional<double> average_precision(const std::vector<bool>& tp, std::size_t num_gt) {
    if (num_gt == 0) return std::nullopt;
    return interpolated_precision_sum(tp, num_gt) / 101.0;
}

double threshold(int t) { return (50 + 5 * t) / 100.0; }

namespace {

enum class Outcome : unsigned char { FalsePositive, TruePositive, Ignored };

struct Scored {
    double confidence;
    std::size_t image;
    std::size_t rank;
    std::array<Outcome, kNumThresholds> outcome;
};

// Detections of one image in descending confidence, stable by file order.
std::vector<std::size_t> confidence_order(const std::vector<Detection>& dets) {
    std::vector<std::size_t> order(dets.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return dets[a].confidence > dets[b].confidence; });
    return order;
}

TaskMetrics evaluate_task(const std::vector<ImageEval>& images, bool pose, const EvalOptions& options) {
    TaskMetrics m;
    std::vector<Scored> scored;

    for (std::size_t im = 0; im < images.size(); ++im) {
        const auto& image = images[im];
        std::vector<const PixelAnnotation*> gts, ignored;
        for (const auto& g : image.ground_truth) {
            bool labeled = !pose;
            for (const auto& k : g.keypoints) labeled = labeled || k.visibility > 0;
            (labeled ? gts : ignored).push_back(&g);
        }
        m.ground_truths += gts.size();
        m.ignored_ground_truths += ignored.size();

        const auto order = confidence_order(image.detections);
        std::vector<std::vector<double>> sim(order.size(), std::vector<double>(gts.size(), 0.0));
        std::vector<bool> overlaps_ignored(order.size(), false);
        for (std::size_t r = 0; r < order.size(); ++r) {
            const auto& det = image.detections[order[r]].annotation;
            for (std::size_t g = 0; g < gts.size(); ++g) {
                sim[r][g] = pose ? pose_similarity(det.keypoints, *gts[g], options.oks_constants).value_or(0.0)
                                 : iou(det.box, gts[g]->box);
            }
            for (const auto* g : ignored) overlaps_ignored[r] = overlaps_ignored[r] || iou(det.box, g->box) >= 0.5;
        }

        std::vector<Scored> local(order.size());
        for (std::size_t r = 0; r < order.size(); ++r) {
            local[r] = {image.detections[order[r]].confidence, im, r, {}};
        }
        for (int t = 0; t < kNumThresholds; ++t) {
            const auto matched = match_detections(sim, threshold(t));
            for (std::size_t r = 0; r < order.size(); ++r) {
                local[r].outcome[t] = matched[r] >= 0        ? Outcome::TruePositive
                                      : overlaps_ignored[r] ? Outcome::Ignored
                                                            : Outcome::FalsePositive;
            }
        }
        scored.insert(scored.end(), local.begin(), local.end());
    }

    std::stable_sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
        if (a.confidence != b.confidence) return a.confidence > b.confidence;
        if (a.image != b.image) return a.image < b.image;
        return a.rank < b.rank;
    });

    m.defined = m.ground_truths > 0;
    double total = 0.0;
    for (int t = 0; t < kNumThresholds; ++t) {
        std::vector<bool> tp;
        tp.reserve(scored.size());
        for (const auto& s : scored) {
            if (s.outcome[t] == Outcome::Ignored) continue;
            const bool hit = s.outcome[t] == Outcome::TruePositive;
            tp.push_back(hit);
            (hit ? m.true_positives[t] : m.false_positives[t]) += 1;
        }
        const double sum = interpolated_precision_sum(tp, m.ground_truths);
        m.ap[t] = sum / 101.0;
        total += sum;
    }
    m.map50 = m.ap[0];
    m.map50_95 = total / (101.0 * kNumThresholds);
    return m;
}

}  // namespace

MetricReport map_report(const std::vector<ImageEval>& images, const EvalOptions& options) {
    MetricReport r;
    r.images = images.size();
    for (const auto& im : images) {
        r.detections += im.detections.size();
        r.ground_truths += im.ground_truth.size();
    }
    r.box = evaluate_task(images, false, options);
    r.pose = evaluate_task(images, true, options);
    return r;
}

}  // namespace wtkp

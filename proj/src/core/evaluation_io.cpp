#include "core/evaluation_io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>

#include "core/annotation.hpp"
#include "core/errors.hpp"

namespace fs = std::filesystem;

namespace wtkp {

std::optional<ImageSize> image_size_from_manifest(const fs::path& dir) {
    fs::path p = fs::absolute(dir).lexically_normal();
    for (int up = 0; up < 3; ++up) {
        const fs::path candidate = p / "manifest.json";
        std::error_code ec;
        if (fs::is_regular_file(candidate, ec)) {
            std::ifstream in(candidate);
            try {
                const auto j = nlohmann::json::parse(in);
                const auto& s = j.at("image_size");
                return ImageSize{s.at("width").get<int>(), s.at("height").get<int>()};
            } catch (const nlohmann::json::exception& e) {
                throw ParseError(candidate.string(), 0, std::string("bad manifest: ") + e.what());
            }
        }
        if (!p.has_parent_path() || p.parent_path() == p) break;
        p = p.parent_path();
    }
    return std::nullopt;
}

namespace {

std::map<std::string, fs::path> label_files(const fs::path& dir) {
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) throw IoError("not a directory: " + dir.string());
    std::map<std::string, fs::path> out;
    for (auto it = fs::recursive_directory_iterator(dir, ec); !ec && it != fs::recursive_directory_iterator();
         it.increment(ec)) {
        if (!it->is_regular_file() || it->path().extension() != ".txt") continue;
        const std::string id = it->path().stem().string();
        auto [pos, inserted] = out.emplace(id, it->path());
        if (!inserted) {
            throw IoError("duplicate image id '" + id + "': " + pos->second.string() + " and " + it->path().string());
        }
    }
    if (ec) throw IoError("cannot list " + dir.string() + ": " + ec.message());
    return out;
}

}  // namespace

std::vector<ImageEval> load_evaluation(const fs::path& gt_dir, const fs::path& pred_dir, const ImageSize& size) {
    if (size.width <= 0 || size.height <= 0) throw ConfigError("image size must be positive");
    const auto gt_files = label_files(gt_dir);
    const auto pred_files = label_files(pred_dir);

    std::map<std::string, ImageEval> by_id;
    for (const auto& [id, path] : gt_files) {
        auto& im = by_id[id];
        im.id = id;
        for (const auto& line : read_label_file(path, LabelKind::GroundTruth)) {
            im.ground_truth.push_back(denormalize_annotation(line.record, size.width, size.height));
        }
    }
    for (const auto& [id, path] : pred_files) {
        auto& im = by_id[id];
        im.id = id;
        for (const auto& line : read_label_file(path, LabelKind::Prediction)) {
            im.detections.push_back({denormalize_annotation(line.record, size.width, size.height), *line.confidence});
        }
    }

    std::vector<ImageEval> out;
    out.reserve(by_id.size());
    for (auto& [id, im] : by_id) out.push_back(std::move(im));
    return out;
}

namespace {

nlohmann::ordered_json task_json(const TaskMetrics& m) {
    nlohmann::ordered_json per = nlohmann::ordered_json::array();
    for (int t = 0; t < kNumThresholds; ++t) {
        per.push_back({{"threshold", threshold(t)},
                       {"ap", m.ap[t]},
                       {"true_positives", m.true_positives[t]},
                       {"false_positives", m.false_positives[t]}});
    }
    return {{"defined", m.defined},
            {"mAP50", m.map50},
            {"mAP50-95", m.map50_95},
            {"ground_truths", m.ground_truths},
            {"ignored_ground_truths", m.ignored_ground_truths},
            {"per_threshold", per}};
}

}  // namespace

nlohmann::ordered_json report_to_json(const MetricReport& r) {
    return {
        {"mAP50_box", r.box.map50},
        {"mAP50-95_box", r.box.map50_95},
        {"mAP50_pose", r.pose.map50},
        {"mAP50-95_pose", r.pose.map50_95},
        {"images", r.images},
        {"detections", r.detections},
        {"ground_truths", r.ground_truths},
        {"box", task_json(r.box)},
        {"pose", task_json(r.pose)},
    };
}

std::string report_table(const MetricReport& r) {
    std::string out;
    char buf[160];
    std::snprintf(buf, sizeof buf, "images %zu  detections %zu  ground truths %zu\n\n", r.images, r.detections,
                  r.ground_truths);
    out += buf;
    std::snprintf(buf, sizeof buf, "%-6s %12s %12s\n", "task", "mAP50", "mAP50-95");
    out += buf;
    std::snprintf(buf, sizeof buf, "%-6s %12.3f %12.3f\n", "Box", r.box.map50, r.box.map50_95);
    out += buf;
    std::snprintf(buf, sizeof buf, "%-6s %12.3f %12.3f\n\n", "Pose", r.pose.map50, r.pose.map50_95);
    out += buf;
    std::snprintf(buf, sizeof buf, "%-9s %8s %8s\n", "threshold", "AP box", "AP pose");
    out += buf;
    for (int t = 0; t < kNumThresholds; ++t) {
        std::snprintf(buf, sizeof buf, "%-9.2f %8.3f %8.3f\n", threshold(t), r.box.ap[t], r.pose.ap[t]);
        out += buf;
    }
    return out;
}

}  // namespace wtkp

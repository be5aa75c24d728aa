#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "core/metrics.hpp"

namespace wtkp {

struct ImageSize {
    int width = 0;
    int height = 0;
};

// Looks for manifest.json in `dir` and up to two parent directories.
std::optional<ImageSize> image_size_from_manifest(const std::filesystem::path& dir);

// Label files are found recursively (*.txt); the file stem is the image id.
// Prediction files carry a trailing confidence column. Ids present only in
// the ground truth get zero detections. Throws ParseError naming file and
// line, IoError for unreadable directories or duplicate ids.
std::vector<ImageEval> load_evaluation(const std::filesystem::path& gt_dir, const std::filesystem::path& pred_dir,
                                       const ImageSize& size);

nlohmann::ordered_json report_to_json(const MetricReport& report);

// Fixed-width table of the four headline metrics and the per-threshold AP.
std::string report_table(const MetricReport& report);

}  // namespace wtkp

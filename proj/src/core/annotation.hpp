#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "core/camera.hpp"
#include "core/sampler.hpp"
#include "core/turbine.hpp"

namespace wtkp {

inline constexpr int kWindTurbineClass = 0;

struct ImageKeypoint {
    double x = 0.0;
    double y = 0.0;
    int visibility = 0;  // 0 not labeled, 2 labeled and visible
};

using ImageKeypoints = std::array<ImageKeypoint, kNumKeypoints>;

// One turbine in one image, pixel units.
struct PixelAnnotation {
    int class_id = kWindTurbineClass;
    PixelBox box;
    ImageKeypoints keypoints{};
};

// One label line: box center/size and keypoints normalized to [0, 1].
// Keypoints with visibility 0 carry x = y = 0.
struct AnnotationRecord {
    int class_id = kWindTurbineClass;
    double cx = 0.0;
    double cy = 0.0;
    double w = 0.0;
    double h = 0.0;
    ImageKeypoints keypoints{};
};

AnnotationRecord normalize_annotation(const PixelAnnotation& a, int width, int height);
PixelAnnotation denormalize_annotation(const AnnotationRecord& r, int width, int height);

// Boxes and projected keypoints for every turbine with a non-empty box, in
// scene order.
std::vector<PixelAnnotation> annotate_scene(const SceneConfig& scene, const CameraPose& pose);

// `class cx cy w h x1 y1 v1 ... x7 y7 v7[ conf]`, 6-decimal fixed point,
// newline-terminated.
std::string format_label_line(const AnnotationRecord& record, std::optional<double> confidence = std::nullopt);
std::string format_label_file(const std::vector<AnnotationRecord>& records);

struct LabelLine {
    AnnotationRecord record;
    std::optional<double> confidence;
    std::size_t line_number = 0;
};

enum class LabelKind { GroundTruth, Prediction };

// Throws ParseError naming `source` and the offending line.
std::vector<LabelLine> parse_label_text(std::string_view text, const std::string& source, LabelKind kind);
std::vector<LabelLine> read_label_file(const std::filesystem::path& path, LabelKind kind);

void write_label_file(const std::filesystem::path& path, const std::vector<AnnotationRecord>& records);

}  // namespace wtkp

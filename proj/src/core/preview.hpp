#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "core/annotation.hpp"
#include "core/image.hpp"

namespace wtkp {

struct DrawnKeypoint {
    std::size_t annotation = 0;
    int keypoint = 0;
    double x = 0.0;  // drawn marker center, pixels
    double y = 0.0;
    std::string text;  // numeral drawn next to tips, empty otherwise
};

struct Overlay {
    ImageBuffer image;
    std::vector<DrawnKeypoint> keypoints;
    bool watermark = false;
};

// Boxes with class label, labeled keypoints as markers, tips numbered 1-3.
// With no annotations the image carries a "no annotations" watermark.
Overlay draw_overlay(const ImageBuffer& image, const std::vector<PixelAnnotation>& annotations);

struct PreviewItem {
    std::string id;
    std::filesystem::path output;
    Overlay overlay;
};

// Draws the first `n` images of a generated dataset (manifest order) into
// `out_dir` as <id>.png.
std::vector<PreviewItem> write_previews(const std::filesystem::path& dataset_dir, std::size_t n,
                                        const std::filesystem::path& out_dir);

}  // namespace wtkp

#include "core/preview.hpp"

#include <cmath>

#include <opencv2/core.hpp>
#include <opencv2/imgproc.hpp>

#include "core/dataset.hpp"
#include "core/errors.hpp"

namespace fs = std::filesystem;

namespace wtkp {

namespace {

// Sub-pixel drawing: coordinates carry 4 fractional bits.
constexpr int kShift = 4;
constexpr double kScale = 1 << kShift;

cv::Point fixed_point(double x, double y) {
    return {static_cast<int>(std::lround(x * kScale)), static_cast<int>(std::lround(y * kScale))};
}

// The Mat holds RGB, so colors are given in RGB order.
const cv::Scalar kBoxColor(255, 64, 32);
const cv::Scalar kTipColor(255, 220, 0);
const cv::Scalar kOtherColor(0, 230, 90);
const cv::Scalar kTextColor(255, 255, 255);

}  // namespace

Overlay draw_overlay(const ImageBuffer& image, const std::vector<PixelAnnotation>& annotations) {
    if (image.channels != 3) throw std::invalid_argument("draw_overlay expects an RGB image");
    Overlay out;
    out.image = image;
    cv::Mat mat(image.height, image.width, CV_8UC3, out.image.pixels.data());
    const int thickness = std::max(1, image.width / 640);
    const double font = std::max(0.5, image.width / 1600.0);

    for (std::size_t a = 0; a < annotations.size(); ++a) {
        const auto& ann = annotations[a];
        cv::rectangle(mat, fixed_point(ann.box.x1, ann.box.y1), fixed_point(ann.box.x2, ann.box.y2), kBoxColor,
                      thickness, cv::LINE_AA, kShift);
        cv::putText(mat, "wind_turbine", cv::Point(static_cast<int>(ann.box.x1), static_cast<int>(ann.box.y1) - 4),
                    cv::FONT_HERSHEY_SIMPLEX, font, kBoxColor, thickness, cv::LINE_AA);

        for (int k = 0; k < kNumKeypoints; ++k) {
            const auto& kp = ann.keypoints[k];
            if (kp.visibility <= 0) continue;
            const cv::Point c = fixed_point(kp.x, kp.y);
            const bool tip = k < kNumTips;
            cv::circle(mat, c, static_cast<int>(4 * kScale), tip ? kTipColor : kOtherColor, -1, cv::LINE_AA, kShift);
            DrawnKeypoint d{a, k, c.x / kScale, c.y / kScale, {}};
            if (tip) {
                d.text = std::to_string(k + 1);
                cv::putText(mat, d.text, cv::Point(static_cast<int>(kp.x) + 6, static_cast<int>(kp.y) - 6),
                            cv::FONT_HERSHEY_SIMPLEX, font, kTextColor, thickness + 1, cv::LINE_AA);
            }
            out.keypoints.push_back(d);
        }
    }

    if (annotations.empty()) {
        out.watermark = true;
        const std::string text = "no annotations";
        int baseline = 0;
        const double scale = std::max(1.0, image.width / 640.0);
        const cv::Size size = cv::getTextSize(text, cv::FONT_HERSHEY_SIMPLEX, scale, 2 * thickness, &baseline);
        const cv::Point origin((image.width - size.width) / 2, (image.height + size.height) / 2);
        cv::putText(mat, text, origin, cv::FONT_HERSHEY_SIMPLEX, scale, cv::Scalar(0, 0, 0), 4 * thickness, cv::LINE_AA);
        cv::putText(mat, text, origin, cv::FONT_HERSHEY_SIMPLEX, scale, kTextColor, 2 * thickness, cv::LINE_AA);
    }
    return out;
}

std::vector<PreviewItem> write_previews(const fs::path& dataset_dir, std::size_t n, const fs::path& out_dir) {
    std::vector<PreviewItem> items;
    if (n == 0) return items;
    const nlohmann::json manifest = read_manifest(dataset_dir);
    const auto& images = manifest.at("images");

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

    for (std::size_t i = 0; i < images.size() && items.size() < n; ++i) {
        const auto& entry = images[i];
        PreviewItem item;
        item.id = entry.at("id").get<std::string>();
        const ImageBuffer image = read_image(dataset_dir / entry.at("image").get<std::string>());

        std::vector<PixelAnnotation> annotations;
        const fs::path label = dataset_dir / entry.at("label").get<std::string>();
        if (fs::is_regular_file(label, ec)) {
            for (const auto& line : read_label_file(label, LabelKind::GroundTruth)) {
                annotations.push_back(denormalize_annotation(line.record, image.width, image.height));
            }
        }
        item.overlay = draw_overlay(image, annotations);
        item.output = out_dir / (item.id + ".png");
        write_file_atomic(item.output, encode_png(item.overlay.image));
        items.push_back(std::move(item));
    }
    return items;
}

}  // namespace wtkp

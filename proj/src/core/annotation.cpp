#include "core/annotation.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "core/errors.hpp"
#include "core/image.hpp"
#include "core/rasterizer.hpp"

namespace wtkp {

namespace {
constexpr int kGroundTruthColumns = 5 + 3 * kNumKeypoints;
}

AnnotationRecord normalize_annotation(const PixelAnnotation& a, int width, int height) {
    AnnotationRecord r;
    r.class_id = a.class_id;
    r.cx = 0.5 * (a.box.x1 + a.box.x2) / width;
    r.cy = 0.5 * (a.box.y1 + a.box.y2) / height;
    r.w = a.box.width() / width;
    r.h = a.box.height() / height;
    for (int i = 0; i < kNumKeypoints; ++i) {
        const auto& k = a.keypoints[i];
        if (k.visibility > 0) {
            r.keypoints[i] = {k.x / width, k.y / height, k.visibility};
        } else {
            r.keypoints[i] = {0.0, 0.0, 0};
        }
    }
    return r;
}

PixelAnnotation denormalize_annotation(const AnnotationRecord& r, int width, int height) {
    PixelAnnotation a;
    a.class_id = r.class_id;
    a.box = {(r.cx - 0.5 * r.w) * width, (r.cy - 0.5 * r.h) * height, (r.cx + 0.5 * r.w) * width,
             (r.cy + 0.5 * r.h) * height};
    for (int i = 0; i < kNumKeypoints; ++i) {
        const auto& k = r.keypoints[i];
        a.keypoints[i] = {k.x * width, k.y * height, k.visibility};
    }
    return a;
}

std::vector<PixelAnnotation> annotate_scene(const SceneConfig& scene, const CameraPose& pose) {
    std::vector<PixelAnnotation> out;
    for (const auto& turbine : scene.turbines) {
        const auto box = turbine_bbox(turbine, pose);
        if (!box) continue;
        PixelAnnotation a;
        a.box = *box;
        const WorldKeypoints world = keypoints_world(turbine);
        for (int i = 0; i < kNumKeypoints; ++i) {
            const auto pixel = project(world.points[i], pose);
            const int v = keypoint_visibility(pixel, pose.width, pose.height);
            a.keypoints[i] = v > 0 ? ImageKeypoint{pixel->u, pixel->v, v} : ImageKeypoint{};
        }
        out.push_back(a);
    }
    return out;
}

std::string format_label_line(const AnnotationRecord& record, std::optional<double> confidence) {
    std::string line;
    line.reserve(256);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%d %.6f %.6f %.6f %.6f", record.class_id, record.cx, record.cy, record.w, record.h);
    line += buf;
    for (const auto& k : record.keypoints) {
        std::snprintf(buf, sizeof buf, " %.6f %.6f %d", k.x, k.y, k.visibility);
        line += buf;
    }
    if (confidence) {
        std::snprintf(buf, sizeof buf, " %.6f", *confidence);
        line += buf;
    }
    line += '\n';
    return line;
}

std::string format_label_file(const std::vector<AnnotationRecord>& records) {
    std::string text;
    for (const auto& r : records) text += format_label_line(r);
    return text;
}

namespace {

double parse_number(std::string_view token, const std::string& source, std::size_t line) {
    double v = 0.0;
    const char* end = token.data() + token.size();
    auto [ptr, ec] = std::from_chars(token.data(), end, v);
    if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
        throw ParseError(source, line, "not a number: '" + std::string(token) + "'");
    }
    return v;
}

}  // namespace

std::vector<LabelLine> parse_label_text(std::string_view text, const std::string& source, LabelKind kind) {
    std::vector<LabelLine> out;
    const std::size_t expected = kGroundTruthColumns + (kind == LabelKind::Prediction ? 1 : 0);
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        std::string_view line = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;

        std::vector<std::string_view> tokens;
        std::size_t i = 0;
        while (i < line.size()) {
            while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
            std::size_t j = i;
            while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
            if (j > i) tokens.push_back(line.substr(i, j - i));
            i = j;
        }
        if (tokens.empty()) continue;
        if (tokens.size() != expected) {
            throw ParseError(source, line_no,
                             "expected " + std::to_string(expected) + " columns, found " + std::to_string(tokens.size()));
        }

        LabelLine ll;
        ll.line_number = line_no;
        auto& r = ll.record;
        const double cls = parse_number(tokens[0], source, line_no);
        if (cls != std::floor(cls) || cls < 0) throw ParseError(source, line_no, "class id must be a non-negative integer");
        r.class_id = static_cast<int>(cls);
        r.cx = parse_number(tokens[1], source, line_no);
        r.cy = parse_number(tokens[2], source, line_no);
        r.w = parse_number(tokens[3], source, line_no);
        r.h = parse_number(tokens[4], source, line_no);
        if (!(r.w > 0.0) || !(r.h > 0.0)) throw ParseError(source, line_no, "box width and height must be > 0");
        for (int k = 0; k < kNumKeypoints; ++k) {
            auto& kp = r.keypoints[k];
            kp.x = parse_number(tokens[5 + 3 * k], source, line_no);
            kp.y = parse_number(tokens[6 + 3 * k], source, line_no);
            const double v = parse_number(tokens[7 + 3 * k], source, line_no);
            if (kind == LabelKind::GroundTruth) {
                if (v != 0.0 && v != 1.0 && v != 2.0) {
                    throw ParseError(source, line_no, "keypoint visibility must be 0, 1 or 2");
                }
                kp.visibility = static_cast<int>(v);
            } else {
                // Predicted keypoint scores are not used for matching.
                kp.visibility = v > 0.0 ? 2 : 0;
            }
        }
        if (kind == LabelKind::Prediction) {
            const double conf = parse_number(tokens[expected - 1], source, line_no);
            if (conf < 0.0 || conf > 1.0) throw ParseError(source, line_no, "confidence must lie in [0, 1]");
            ll.confidence = conf;
        }
        out.push_back(ll);
    }
    return out;
}

std::vector<LabelLine> read_label_file(const std::filesystem::path& path, LabelKind kind) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open label file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_label_text(ss.str(), path.string(), kind);
}

void write_label_file(const std::filesystem::path& path, const std::vector<AnnotationRecord>& records) {
    try {
        write_text_atomic(path, format_label_file(records));
    } catch (const IoError& e) {
        throw IoError("writing labels " + path.string() + ": " + e.what());
    }
}

}  // namespace wtkp

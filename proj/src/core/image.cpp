#include "core/image.hpp"

#include <csetjmp>
#include <fstream>
#include <string>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>
#include <png.h>
#include <zlib.h>

#include "core/errors.hpp"

namespace wtkp {

namespace {

// Wraps the buffer without copying. OpenCV expects BGR(A) ordering.
cv::Mat as_mat(const ImageBuffer& image) {
    const int type = image.channels == 4 ? CV_8UC4 : (image.channels == 3 ? CV_8UC3 : CV_8UC1);
    return cv::Mat(image.height, image.width, type, const_cast<std::uint8_t*>(image.pixels.data()));
}

cv::Mat to_bgr(const ImageBuffer& image) {
    cv::Mat out;
    if (image.channels == 4) {
        cv::cvtColor(as_mat(image), out, cv::COLOR_RGBA2BGRA);
    } else if (image.channels == 3) {
        cv::cvtColor(as_mat(image), out, cv::COLOR_RGB2BGR);
    } else {
        out = as_mat(image);
    }
    return out;
}

ImageBuffer from_bgr(const cv::Mat& bgr) {
    ImageBuffer out(bgr.cols, bgr.rows, 3);
    cv::Mat dst(out.height, out.width, CV_8UC3, out.pixels.data());
    cv::cvtColor(bgr, dst, cv::COLOR_BGR2RGB);
    return out;
}

}  // namespace

std::vector<std::uint8_t> encode_png(const ImageBuffer& image) {
    if (image.channels != 3 && image.channels != 4) throw IoError("PNG encoding needs RGB or RGBA");
    // libpng directly: a fixed SUB filter with fast RLE deflate is several
    // times quicker than the adaptive filtering OpenCV always enables.
    std::vector<std::uint8_t> bytes;
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw IoError("PNG encoder allocation failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("PNG encoding failed");
    }
    png_set_write_fn(
        png, &bytes,
        [](png_structp p, png_bytep data, png_size_t n) {
            auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(p));
            out->insert(out->end(), data, data + n);
        },
        nullptr);
    png_set_IHDR(png, info, image.width, image.height, 8, image.channels == 4 ? PNG_COLOR_TYPE_RGBA : PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_set_filter(png, PNG_FILTER_TYPE_BASE, PNG_FILTER_SUB);
    png_set_compression_level(png, 1);
    png_set_compression_strategy(png, Z_RLE);
    png_write_info(png, info);
    const std::size_t stride = static_cast<std::size_t>(image.width) * image.channels;
    bytes.reserve(image.pixels.size() / 2);
    for (int y = 0; y < image.height; ++y) {
        png_write_row(png, const_cast<png_bytep>(image.pixels.data() + y * stride));
    }
    png_write_end(png, info);
    png_destroy_write_struct(&png, &info);
    return bytes;
}

std::vector<std::uint8_t> encode_jpeg(const ImageBuffer& image, int quality) {
    std::vector<std::uint8_t> bytes;
    const std::vector<int> params{cv::IMWRITE_JPEG_QUALITY, quality, cv::IMWRITE_JPEG_OPTIMIZE, 0,
                                  cv::IMWRITE_JPEG_PROGRESSIVE, 0};
    if (!cv::imencode(".jpg", to_bgr(image), bytes, params)) throw IoError("JPEG encoding failed");
    return bytes;
}

ImageBuffer decode_image(std::span<const std::uint8_t> bytes) {
    if (bytes.empty()) throw IoError("cannot decode empty image data");
    const cv::Mat raw(1, static_cast<int>(bytes.size()), CV_8UC1, const_cast<std::uint8_t*>(bytes.data()));
    const cv::Mat bgr = cv::imdecode(raw, cv::IMREAD_COLOR);
    if (bgr.empty()) throw IoError("image data could not be decoded");
    return from_bgr(bgr);
}

ImageBuffer read_image(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open image " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
        return decode_image(bytes);
    } catch (const IoError& e) {
        throw IoError(path.string() + ": " + e.what());
    }
}

void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + tmp.string());
        out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw IoError("short write to " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

void write_text_atomic(const std::filesystem::path& path, const std::string& text) {
    write_file_atomic(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

ImageBuffer resize_bilinear(const ImageBuffer& image, int width, int height) {
    ImageBuffer out(width, height, image.channels);
    cv::Mat dst = as_mat(out);
    cv::resize(as_mat(image), dst, cv::Size(width, height), 0, 0, cv::INTER_LINEAR);
    return out;
}

std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (std::uint8_t b : bytes) {
        h ^= b;
        h *= 0x100000001b3ull;
    }
    return h;
}

}  // namespace wtkp

#include "core/augment.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace wtkp {

void rgb_to_hsv(double r, double g, double b, double& h, double& s, double& v) {
    const double mx = std::max({r, g, b});
    const double mn = std::min({r, g, b});
    const double delta = mx - mn;
    v = mx;
    s = mx > 0.0 ? 255.0 * delta / mx : 0.0;
    if (delta <= 0.0) {
        h = 0.0;
        return;
    }
    if (mx == r) {
        h = 60.0 * std::fmod((g - b) / delta, 6.0);
    } else if (mx == g) {
        h = 60.0 * ((b - r) / delta + 2.0);
    } else {
        h = 60.0 * ((r - g) / delta + 4.0);
    }
    if (h < 0.0) h += 360.0;
}

void hsv_to_rgb(double h, double s, double v, double& r, double& g, double& b) {
    const double c = v * s / 255.0;
    const double hp = h / 60.0;
    const double x = c * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
    const double m = v - c;
    double r1 = 0, g1 = 0, b1 = 0;
    switch (static_cast<int>(hp) % 6) {
        case 0: r1 = c; g1 = x; break;
        case 1: r1 = x; g1 = c; break;
        case 2: g1 = c; b1 = x; break;
        case 3: g1 = x; b1 = c; break;
        case 4: r1 = x; b1 = c; break;
        default: r1 = c; b1 = x; break;
    }
    r = r1 + m;
    g = g1 + m;
    b = b1 + m;
}

namespace {

// Same mapping as rgb_to_hsv -> shift -> hsv_to_rgb. Saturation and value
// depend only on (max, max - min) of the input, so chroma c and offset m are
// tabulated once per shift; hue is kept in sixths of a turn.
class HsvShifter {
public:
    explicit HsvShifter(const HsvShift& shift) {
        dh_ = std::fmod(shift.h, 360.0) / 60.0;
        if (dh_ < 0.0) dh_ += 6.0;
        if (dh_ >= 6.0) dh_ = 0.0;
        inv_[0] = 0.0;
        for (int i = 1; i < 256; ++i) inv_[i] = 1.0 / i;
        chroma_.resize(256 * 256);
        for (int mx = 0; mx < 256; ++mx) {
            const double v = std::clamp(mx * shift.v, 0.0, 255.0);
            for (int delta = 0; delta <= mx; ++delta) {
                const double s0 = mx > 0 ? 255.0 * delta / mx : 0.0;
                const double s = std::clamp(s0 + shift.s, 0.0, 255.0);
                const double c = v * s / 255.0;
                chroma_[mx * 256 + delta] = {c, v - c};
            }
        }
    }

    void apply(std::uint8_t* px) const {
        const int ri = px[0], gi = px[1], bi = px[2];
        const int mxi = std::max(ri, std::max(gi, bi));
        const int deltai = mxi - std::min(ri, std::min(gi, bi));

        // Branch-free hue sector selection; noise backgrounds defeat the
        // branch predictor otherwise.
        const bool r_max = mxi == ri;
        const bool g_max = !r_max && mxi == gi;
        const int num = r_max ? gi - bi : (g_max ? bi - ri : ri - gi);
        const double base = r_max ? (gi < bi ? 6.0 : 0.0) : (g_max ? 2.0 : 4.0);
        double h6 = (deltai > 0 ? num * inv_[deltai] + base : 0.0) + dh_;
        if (h6 >= 6.0) h6 -= 6.0;

        const Chroma cm = chroma_[mxi * 256 + deltai];
        int sector = static_cast<int>(h6);
        if (sector > 5) sector = 5;
        const double f = h6 - sector;
        const double x = cm.c * ((sector & 1) ? 1.0 - f : f);
        // Which of {c, x, 0} each channel takes in each sector.
        static constexpr unsigned char kRole[6][3] = {{0, 1, 2}, {1, 0, 2}, {2, 0, 1}, {2, 1, 0}, {1, 2, 0}, {0, 2, 1}};
        const double parts[3] = {cm.c, x, 0.0};
        // 0 <= m and m + c = value <= 255, so rounding needs no clamp.
        px[0] = static_cast<std::uint8_t>(cm.m + parts[kRole[sector][0]] + 0.5);
        px[1] = static_cast<std::uint8_t>(cm.m + parts[kRole[sector][1]] + 0.5);
        px[2] = static_cast<std::uint8_t>(cm.m + parts[kRole[sector][2]] + 0.5);
    }

private:
    struct Chroma {
        double c;
        double m;
    };

    double dh_ = 0.0;
    double inv_[256];
    std::vector<Chroma> chroma_;
};

}  // namespace

ImageBuffer apply_hsv(const ImageBuffer& layer, const HsvShift& shift, const ImageBuffer* mask) {
    if (mask && (mask->channels != 4 || mask->width != layer.width || mask->height != layer.height)) {
        throw std::invalid_argument("HSV mask must be an RGBA buffer matching the layer size");
    }
    if (!mask && layer.channels == 4) mask = &layer;

    ImageBuffer out = layer;
    const HsvShifter shifter(shift);
    const std::size_t n = out.pixel_count();
    const int ch = out.channels;
    std::uint8_t* px = out.pixels.data();
    // Runs of equal input pixels (flat shading, sky) reuse the last result.
    std::uint8_t last_in[3] = {0, 0, 0}, last_out[3] = {0, 0, 0};
    bool have_last = false;
    for (std::size_t i = 0; i < n; ++i, px += ch) {
        if (mask && mask->pixels[i * 4 + 3] == 0) continue;
        if (have_last && px[0] == last_in[0] && px[1] == last_in[1] && px[2] == last_in[2]) {
            px[0] = last_out[0];
            px[1] = last_out[1];
            px[2] = last_out[2];
            continue;
        }
        last_in[0] = px[0], last_in[1] = px[1], last_in[2] = px[2];
        shifter.apply(px);
        last_out[0] = px[0], last_out[1] = px[1], last_out[2] = px[2];
        have_last = true;
    }
    return out;
}

int jpeg_quality_for(double quality) {
    return static_cast<int>(std::clamp(std::lround(quality), 1L, 100L));
}

ImageBuffer apply_jpeg(const ImageBuffer& image, double quality) {
    if (image.channels != 3) throw std::invalid_argument("JPEG augmentation needs an RGB buffer");
    return decode_image(encode_jpeg(image, jpeg_quality_for(quality)));
}

namespace {

// Sampler for round(N(mean, stddev)) on offsets [-256, 256]. Offsets beyond
// that range saturate every 8-bit input identically, so folding the tails
// into the end bins leaves the clamped output distribution unchanged.
class RoundedNormalTable {
public:
    static constexpr int kMin = -256;
    static constexpr int kMax = 256;
    static constexpr int kGuideBits = 12;

    RoundedNormalTable(double mean, double stddev) {
        const int n = kMax - kMin + 1;
        thresholds_.resize(n);
        auto cdf = [&](double x) { return 0.5 * std::erfc(-(x - mean) / (stddev * std::sqrt(2.0))); };
        for (int k = 0; k < n; ++k) {
            const int offset = kMin + k;
            const double p = offset == kMax ? 1.0 : cdf(offset + 0.5);
            thresholds_[k] = static_cast<std::uint64_t>(std::ldexp(std::clamp(p, 0.0, 1.0), 32));
        }
        thresholds_.back() = std::uint64_t{1} << 32;
        guide_.resize((1u << kGuideBits) + 1);
        int k = 0;
        for (std::uint32_t g = 0; g <= (1u << kGuideBits); ++g) {
            const std::uint64_t u = static_cast<std::uint64_t>(g) << (32 - kGuideBits);
            while (k < n - 1 && thresholds_[k] <= u) ++k;
            guide_[g] = k;
        }
    }

    // u uniform in [0, 2^32).
    int sample(std::uint32_t u) const {
        int k = guide_[u >> (32 - kGuideBits)];
        while (thresholds_[k] <= u) ++k;
        return kMin + k;
    }

private:
    std::vector<std::uint64_t> thresholds_;
    std::vector<int> guide_;
};

}  // namespace

ImageBuffer apply_noise(const ImageBuffer& image, double mean, double stddev, Rng& rng) {
    if (!(stddev >= 0.0)) throw std::invalid_argument("noise stddev must be >= 0");
    ImageBuffer out = image;
    const bool has_alpha = out.channels == 4;
    const int color_channels = has_alpha ? 3 : out.channels;

    if (stddev == 0.0) {
        const long offset = std::lround(mean);
        for (std::size_t i = 0; i < out.pixels.size(); ++i) {
            if (has_alpha && i % 4 == 3) continue;
            out.pixels[i] = static_cast<std::uint8_t>(std::clamp(out.pixels[i] + offset, 0L, 255L));
        }
        return out;
    }

    const RoundedNormalTable table(mean, stddev);
    const std::size_t n = out.pixel_count();
    std::uint8_t* px = out.pixels.data();
    std::uint64_t bits = 0;
    bool have_half = false;
    for (std::size_t i = 0; i < n; ++i, px += out.channels) {
        for (int ch = 0; ch < color_channels; ++ch) {
            std::uint32_t u;
            if (have_half) {
                u = static_cast<std::uint32_t>(bits >> 32);
                have_half = false;
            } else {
                bits = rng.next_u64();
                u = static_cast<std::uint32_t>(bits);
                have_half = true;
            }
            px[ch] = static_cast<std::uint8_t>(std::clamp(px[ch] + table.sample(u), 0, 255));
        }
    }
    return out;
}

}  // namespace wtkp

#pragma once

#include "core/image.hpp"
#include "core/rng.hpp"
#include "core/sampler.hpp"

namespace wtkp {

// Shifts hue (wrapped), saturation (additive, clamped) and value
// (multiplicative, clamped) of every pixel by the same amount. With a mask
// (an RGBA buffer of equal size) only pixels with alpha > 0 change; the
// layer may itself be RGBA, in which case its own alpha is the mask.
ImageBuffer apply_hsv(const ImageBuffer& layer, const HsvShift& shift, const ImageBuffer* mask = nullptr);

// Round trip through a baseline JPEG encoder at round(quality).
ImageBuffer apply_jpeg(const ImageBuffer& image, double quality);

// out = clamp(in + round(N(mean, stddev))) per channel, independent draws.
ImageBuffer apply_noise(const ImageBuffer& image, double mean, double stddev, Rng& rng);

// Conversions on the 0-255 scale with hue in degrees [0, 360).
void rgb_to_hsv(double r, double g, double b, double& h, double& s, double& v);
void hsv_to_rgb(double h, double s, double v, double& r, double& g, double& b);

int jpeg_quality_for(double quality);

}  // namespace wtkp

#pragma once

#include "xrsim/common/image.hpp"

namespace xrsim {

/// Rec.601 luma in [0, 255].
Image<double> to_luma(const ImageU8& img);

/// Mean SSIM over every full 11x11 Gaussian window (sigma 1.5),
/// C1 = (0.01*255)^2, C2 = (0.03*255)^2. RGB inputs go through Rec.601 luma.
/// The raw value can be negative; callers that need [0, 1] clamp explicitly.
/// Throws DimensionError on shape mismatch or images smaller than the window.
double ssim(const ImageU8& a, const ImageU8& b);

struct FlipResult {
    double mean = 0.0;
    Image<double> error_map;  ///< per-pixel error in [0, 1]
};

constexpr double kDefaultFlipPpd = 67.0;

/// LDR FLIP between reference `a` and test `b` (sRGB, 3 channels).
/// Throws DimensionError on shape mismatch or non-RGB input.
FlipResult flip(const ImageU8& reference, const ImageU8& test, double pixels_per_degree = kDefaultFlipPpd);
double flip_mean(const ImageU8& reference, const ImageU8& test, double pixels_per_degree = kDefaultFlipPpd);

}  // namespace xrsim

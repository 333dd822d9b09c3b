#pragma once

#include <complex>
#include <string>
#include <vector>

#include "xrsim/common/image.hpp"

namespace xrsim {

struct DepthPoint {
    double x = 0.0;  ///< m, hologram-plane coordinates (origin at the mask centre)
    double y = 0.0;
    int plane = 0;
    double amplitude = 1.0;
};

struct HologramProblem {
    int width = 64;
    int height = 64;
    double pixel_pitch = 8e-6;     ///< m
    double wavelength = 520e-9;    ///< m
    double base_diopters = 0.5;    ///< focus of plane 0
    double plane_spacing = 0.6;    ///< diopters between planes
    int num_planes = 10;
    std::vector<DepthPoint> points;

    /// Throws ConfigError on spacing < 0.6 D, no points, or bad plane indices.
    void validate() const;
    /// Distance of plane m in metres: 1 / (base + m * spacing).
    double plane_depth(int m) const;
    /// Fresnel phase pi/(lambda z) * ((x-x0)^2 + (y-y0)^2) from pixel (i, j) to point k.
    double geometric_phase(int i, int j, const DepthPoint& p) const;
};

struct HologramResult {
    ImageF phase;                    ///< radians in [0, 2 pi)
    std::vector<double> intensity;   ///< |V_m|^2 per point after the final update
    std::vector<double> weights;
    std::vector<double> uniformity;  ///< after each iteration
    bool degenerate = false;         ///< all points coincide; single-point fast path taken
};

/// min over points of (|V|^2 / a^2) divided by the max.
double hologram_uniformity(const std::vector<double>& intensity, const std::vector<DepthPoint>& pts);

/// Weighted Gerchberg-Saxton over the point targets. Throws ConfigError if iterations < 1.
HologramResult gsw_hologram(const HologramProblem& problem, int iterations);

/// Phase quantized to 16 bits: round(phi / 2pi * 65536) mod 65536.
ImageU16 quantize_phase(const ImageF& phase);

}  // namespace xrsim

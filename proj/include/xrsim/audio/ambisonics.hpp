#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "xrsim/perception/pose.hpp"
#include "xrsim/runtime/time.hpp"

namespace xrsim {

constexpr int kMaxAmbisonicOrder = 3;

/// Channel-major samples: samples[c * block_size + i].
struct AudioBlock {
    int channels = 0;
    int block_size = 0;
    int sample_rate = 48000;
    Timestamp ts;
    std::vector<double> samples;

    AudioBlock() = default;
    AudioBlock(int ch, int n, int rate) : channels(ch), block_size(n), sample_rate(rate), samples(std::size_t(ch) * n) {}

    std::span<double> channel(int c) { return {samples.data() + std::size_t(c) * block_size, std::size_t(block_size)}; }
    std::span<const double> channel(int c) const {
        return {samples.data() + std::size_t(c) * block_size, std::size_t(block_size)};
    }
};

/// ACN channel order, SN3D normalization; channels == (order+1)^2.
struct AmbisonicBlock : AudioBlock {
    int order = 1;

    AmbisonicBlock() = default;
    AmbisonicBlock(int ord, int n, int rate);
};

inline int ambisonic_channels(int order) { return (order + 1) * (order + 1); }
inline int acn(int l, int m) { return l * l + l + m; }

/// x / 32768
std::vector<double> normalize_pcm16(std::span<const std::int16_t> pcm);
double normalize_pcm16(std::int16_t s);

/// Real SN3D spherical harmonics (ACN order) for a unit direction, orders <= 3.
/// Azimuth is measured from +X towards +Y, elevation towards +Z.
std::vector<double> sh_coefficients(const Vec3& direction, int order);

struct SourceSpec {
    std::vector<std::int16_t> pcm;  ///< mono stream, looped
    Vec3 direction = Vec3::UnitX();
    double gain = 1.0;
};

/// Encodes block `block_index` of every source and sums the fields.
/// Throws ConfigError for order outside [1, 3], InputError for non-unit directions or no sources.
AmbisonicBlock encode(const std::vector<SourceSpec>& sources, int order, std::size_t block_index, int block_size,
                      int sample_rate = 48000);
/// Encodes already-normalized mono samples.
AmbisonicBlock encode_mono(std::span<const double> mono, const Vec3& direction, double gain, int order,
                           int sample_rate = 48000);

/// Real-SH rotation matrix for band l (size (2l+1)^2, row-major, m = -l..l)
/// for direction transform d' = M d.
std::vector<double> sh_rotation_band(const Mat3& M, int l);

/// Rotates the field into the listener frame of a head with body->world
/// orientation q (directions transform by R(q)^T). W is untouched.
/// Composition: rotate(q2, rotate(q1, B)) == rotate(q1 * q2, B).
AmbisonicBlock rotate_soundfield(const AmbisonicBlock& block, const Quat& orientation);

struct ZoomResult {
    AmbisonicBlock block;
    bool clamped = false;
};

/// Forward dominance on (W, X) with k = 1/(1 + sqrt2 |z|):
/// W' = k (W + z/sqrt2 X), X' = k (X + sqrt2 z W), others scaled by k.
/// |zoom| > 1 is clamped and flagged.
ZoomResult zoom_soundfield(const AmbisonicBlock& block, double zoom);

}  // namespace xrsim

#include "xrsim/audio/ambisonics.hpp"

#include <algorithm>
#include <cmath>

#include "xrsim/runtime/errors.hpp"

namespace xrsim {

AmbisonicBlock::AmbisonicBlock(int ord, int n, int rate) : AudioBlock(ambisonic_channels(ord), n, rate), order(ord) {}

double normalize_pcm16(std::int16_t s) { return static_cast<double>(s) / 32768.0; }

std::vector<double> normalize_pcm16(std::span<const std::int16_t> pcm) {
    std::vector<double> out(pcm.size());
    std::transform(pcm.begin(), pcm.end(), out.begin(), [](std::int16_t s) { return normalize_pcm16(s); });
    return out;
}

namespace {

void check_order(int order) {
    if (order < 1 || order > kMaxAmbisonicOrder) throw ConfigError("ambisonics: order must be in [1, 3]");
}

void check_unit(const Vec3& d) {
    if (std::abs(d.norm() - 1.0) > 1e-9) throw InputError("ambisonics: source direction must be a unit vector");
}

}  // namespace

std::vector<double> sh_coefficients(const Vec3& d, int order) {
    check_order(order);
    const double x = d.x();
    const double y = d.y();
    const double z = d.z();
    std::vector<double> Y(static_cast<std::size_t>(ambisonic_channels(order)));
    Y[0] = 1.0;
    Y[1] = y;
    Y[2] = z;
    Y[3] = x;
    if (order >= 2) {
        const double s3 = std::sqrt(3.0);
        Y[4] = s3 * x * y;
        Y[5] = s3 * y * z;
        Y[6] = 0.5 * (3 * z * z - 1);
        Y[7] = s3 * x * z;
        Y[8] = 0.5 * s3 * (x * x - y * y);
    }
    if (order >= 3) {
        const double a = std::sqrt(5.0 / 8.0);
        const double b = std::sqrt(15.0);
        const double c = std::sqrt(3.0 / 8.0);
        Y[9] = a * y * (3 * x * x - y * y);
        Y[10] = b * x * y * z;
        Y[11] = c * y * (5 * z * z - 1);
        Y[12] = 0.5 * z * (5 * z * z - 3);
        Y[13] = c * x * (5 * z * z - 1);
        Y[14] = 0.5 * b * z * (x * x - y * y);
        Y[15] = a * x * (x * x - 3 * y * y);
    }
    return Y;
}

AmbisonicBlock encode_mono(std::span<const double> mono, const Vec3& direction, double gain, int order,
                           int sample_rate) {
    check_order(order);
    check_unit(direction);
    AmbisonicBlock out(order, static_cast<int>(mono.size()), sample_rate);
    const auto D = sh_coefficients(direction, order);
    for (int c = 0; c < out.channels; ++c) {
        auto ch = out.channel(c);
        const double g = D[static_cast<std::size_t>(c)] * gain;
        for (std::size_t i = 0; i < mono.size(); ++i) ch[i] = g * mono[i];
    }
    return out;
}

AmbisonicBlock encode(const std::vector<SourceSpec>& sources, int order, std::size_t block_index, int block_size,
                      int sample_rate) {
    check_order(order);
    if (sources.empty()) throw InputError("encode: need at least one source");
    AmbisonicBlock out(order, block_size, sample_rate);
    std::vector<double> x(static_cast<std::size_t>(block_size));
    for (const auto& src : sources) {
        check_unit(src.direction);
        if (src.pcm.empty()) throw InputError("encode: empty source stream");
        const std::size_t n = src.pcm.size();
        const std::size_t base = block_index * static_cast<std::size_t>(block_size);
        for (int i = 0; i < block_size; ++i) x[static_cast<std::size_t>(i)] = normalize_pcm16(src.pcm[(base + i) % n]);
        const auto D = sh_coefficients(src.direction, order);
        for (int c = 0; c < out.channels; ++c) {
            auto ch = out.channel(c);
            const double g = D[static_cast<std::size_t>(c)] * src.gain;
            for (int i = 0; i < block_size; ++i) ch[static_cast<std::size_t>(i)] += g * x[static_cast<std::size_t>(i)];
        }
    }
    return out;
}

// Real-SH rotation by the Ivanic-Ruedenberg recurrence (with the published corrections).
namespace {

struct Band {
    int l;
    std::vector<double> m;  // (2l+1)^2
    double operator()(int a, int b) const { return m[static_cast<std::size_t>((a + l) * (2 * l + 1) + (b + l))]; }
};

double P(int i, int l, int a, int b, const Band& r1, const Band& prev) {
    const double ri1 = r1(i, 1);
    const double rim1 = r1(i, -1);
    const double ri0 = r1(i, 0);
    if (b == -l) return ri1 * prev(a, -l + 1) + rim1 * prev(a, l - 1);
    if (b == l) return ri1 * prev(a, l - 1) - rim1 * prev(a, -l + 1);
    return ri0 * prev(a, b);
}

double U(int l, int m, int n, const Band& r1, const Band& prev) { return P(0, l, m, n, r1, prev); }

double V(int l, int m, int n, const Band& r1, const Band& prev) {
    if (m == 0) return P(1, l, 1, n, r1, prev) + P(-1, l, -1, n, r1, prev);
    if (m > 0) {
        const double d = m == 1 ? 1.0 : 0.0;
        return P(1, l, m - 1, n, r1, prev) * std::sqrt(1 + d) - P(-1, l, -m + 1, n, r1, prev) * (1 - d);
    }
    const double d = m == -1 ? 1.0 : 0.0;
    return P(1, l, m + 1, n, r1, prev) * (1 - d) + P(-1, l, -m - 1, n, r1, prev) * std::sqrt(1 + d);
}

double W(int l, int m, int n, const Band& r1, const Band& prev) {
    if (m > 0) return P(1, l, m + 1, n, r1, prev) + P(-1, l, -m - 1, n, r1, prev);
    return P(1, l, m - 1, n, r1, prev) - P(-1, l, -m + 1, n, r1, prev);
}

Band band1(const Mat3& M) {
    // real SH order 1 is (y, z, x) for m = -1, 0, 1
    static constexpr int axis[3] = {1, 2, 0};
    Band b{1, std::vector<double>(9)};
    for (int a = -1; a <= 1; ++a)
        for (int c = -1; c <= 1; ++c) b.m[static_cast<std::size_t>((a + 1) * 3 + (c + 1))] = M(axis[a + 1], axis[c + 1]);
    return b;
}

Band next_band(const Band& r1, const Band& prev) {
    const int l = prev.l + 1;
    Band out{l, std::vector<double>(static_cast<std::size_t>((2 * l + 1) * (2 * l + 1)))};
    for (int m = -l; m <= l; ++m) {
        for (int n = -l; n <= l; ++n) {
            const double d = m == 0 ? 1.0 : 0.0;
            const double denom = std::abs(n) == l ? (2.0 * l) * (2.0 * l - 1) : double(l + n) * double(l - n);
            const int am = std::abs(m);
            const double u = std::sqrt(double(l + m) * double(l - m) / denom);
            const double v = 0.5 * std::sqrt((1 + d) * double(l + am - 1) * double(l + am) / denom) * (1 - 2 * d);
            const double w = -0.5 * std::sqrt(double(l - am - 1) * double(l - am) / denom) * (1 - d);
            double val = 0.0;
            if (u != 0.0) val += u * U(l, m, n, r1, prev);
            if (v != 0.0) val += v * V(l, m, n, r1, prev);
            if (w != 0.0) val += w * W(l, m, n, r1, prev);
            out.m[static_cast<std::size_t>((m + l) * (2 * l + 1) + (n + l))] = val;
        }
    }
    return out;
}

}  // namespace

std::vector<double> sh_rotation_band(const Mat3& M, int l) {
    if (l == 0) return {1.0};
    Band r1 = band1(M);
    Band cur = r1;
    for (int k = 2; k <= l; ++k) cur = next_band(r1, cur);
    return cur.m;
}

AmbisonicBlock rotate_soundfield(const AmbisonicBlock& block, const Quat& orientation) {
    const Mat3 M = orientation.normalized().toRotationMatrix().transpose();
    AmbisonicBlock out = block;
    const Band r1 = band1(M);
    Band cur = r1;
    const int n = block.block_size;
    for (int l = 1; l <= block.order; ++l) {
        if (l > 1) cur = next_band(r1, cur);
        const int w = 2 * l + 1;
        for (int m = -l; m <= l; ++m) {
            auto dst = out.channel(acn(l, m));
            std::fill(dst.begin(), dst.end(), 0.0);
            for (int k = -l; k <= l; ++k) {
                const double r = cur.m[static_cast<std::size_t>((m + l) * w + (k + l))];
                if (r == 0.0) continue;
                const auto src = block.channel(acn(l, k));
                for (int i = 0; i < n; ++i) dst[static_cast<std::size_t>(i)] += r * src[static_cast<std::size_t>(i)];
            }
        }
    }
    return out;
}

ZoomResult zoom_soundfield(const AmbisonicBlock& block, double zoom) {
    if (block.channels < 4) throw InputError("zoom: first-order channels required");
    ZoomResult res;
    if (std::abs(zoom) > 1.0) {
        zoom = std::clamp(zoom, -1.0, 1.0);
        res.clamped = true;
    }
    res.block = block;
    if (zoom == 0.0) return res;
    const double s2 = std::sqrt(2.0);
    const double k = 1.0 / (1.0 + s2 * std::abs(zoom));
    const auto W = block.channel(0);
    const auto X = block.channel(3);
    auto Wo = res.block.channel(0);
    auto Xo = res.block.channel(3);
    for (int i = 0; i < block.block_size; ++i) {
        const auto u = static_cast<std::size_t>(i);
        Wo[u] = k * (W[u] + zoom / s2 * X[u]);
        Xo[u] = k * (X[u] + s2 * zoom * W[u]);
    }
    for (int c = 1; c < block.channels; ++c) {
        if (c == 3) continue;
        for (auto& s : res.block.channel(c)) s *= k;
    }
    return res;
}

}  // namespace xrsim

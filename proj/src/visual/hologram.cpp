#include "xrsim/visual/hologram.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "xrsim/runtime/errors.hpp"

namespace xrsim {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap(double phi) {
    double w = std::fmod(phi, kTwoPi);
    if (w < 0) w += kTwoPi;
    if (w >= kTwoPi) w = 0.0;
    return w;
}

float wrap_f(double phi) {
    const float f = static_cast<float>(wrap(phi));
    return static_cast<double>(f) < kTwoPi ? f : 0.0f;
}
}  // namespace

void HologramProblem::validate() const {
    if (width <= 0 || height <= 0) throw ConfigError("hologram: dimensions must be positive");
    if (plane_spacing < 0.6) throw ConfigError("hologram: depth planes must be at least 0.6 diopters apart");
    if (base_diopters <= 0) throw ConfigError("hologram: base focus must be positive");
    if (num_planes < 1) throw ConfigError("hologram: need at least one plane");
    if (points.empty()) throw ConfigError("hologram: need at least one depth point");
    for (const auto& p : points) {
        if (p.plane < 0 || p.plane >= num_planes) throw ConfigError("hologram: point plane index out of range");
        if (!(p.amplitude > 0)) throw ConfigError("hologram: point amplitude must be positive");
    }
}

double HologramProblem::plane_depth(int m) const { return 1.0 / (base_diopters + m * plane_spacing); }

double HologramProblem::geometric_phase(int i, int j, const DepthPoint& p) const {
    const double x = (i - 0.5 * (width - 1)) * pixel_pitch;
    const double y = (j - 0.5 * (height - 1)) * pixel_pitch;
    const double z = plane_depth(p.plane);
    const double dx = x - p.x;
    const double dy = y - p.y;
    return std::numbers::pi / (wavelength * z) * (dx * dx + dy * dy);
}

double hologram_uniformity(const std::vector<double>& intensity, const std::vector<DepthPoint>& pts) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (std::size_t m = 0; m < intensity.size(); ++m) {
        const double r = intensity[m] / (pts[m].amplitude * pts[m].amplitude);
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    return hi > 0 ? lo / hi : 0.0;
}

HologramResult gsw_hologram(const HologramProblem& prob, int iterations) {
    prob.validate();
    if (iterations < 1) throw ConfigError("hologram: iterations must be >= 1");
    const int W = prob.width;
    const int H = prob.height;
    const std::size_t P = static_cast<std::size_t>(W) * H;
    const std::size_t M = prob.points.size();
    const double inv_p = 1.0 / static_cast<double>(P);

    HologramResult res;
    res.phase = ImageF(W, H, 1);
    res.weights.assign(M, 1.0);

    bool coincident = true;
    for (const auto& p : prob.points)
        coincident = coincident && p.x == prob.points[0].x && p.y == prob.points[0].y && p.plane == prob.points[0].plane;
    if (coincident) {
        // the conjugate lens phase focuses every pixel onto the shared point
        res.degenerate = M > 1;
        for (int j = 0; j < H; ++j)
            for (int i = 0; i < W; ++i) res.phase.at(i, j) = wrap_f(-prob.geometric_phase(i, j, prob.points[0]));
        res.intensity.assign(M, 1.0);
        res.uniformity.assign(static_cast<std::size_t>(iterations), 1.0);
        return res;
    }

    // E[m][p] = exp(i Delta_mp)
    std::vector<std::complex<double>> E(M * P);
    for (std::size_t m = 0; m < M; ++m)
        for (int j = 0; j < H; ++j)
            for (int i = 0; i < W; ++i)
                E[m * P + static_cast<std::size_t>(j) * W + i] = std::polar(1.0, prob.geometric_phase(i, j, prob.points[m]));

    std::vector<std::complex<double>> phasor(P);
    // start from the superposition of the point lenses
    for (std::size_t p = 0; p < P; ++p) {
        std::complex<double> acc = 0.0;
        for (std::size_t m = 0; m < M; ++m) acc += prob.points[m].amplitude * std::conj(E[m * P + p]);
        phasor[p] = std::polar(1.0, std::arg(acc));
    }

    std::vector<std::complex<double>> V(M);
    auto forward = [&] {
        for (std::size_t m = 0; m < M; ++m) {
            std::complex<double> acc = 0.0;
            const auto* e = &E[m * P];
            for (std::size_t p = 0; p < P; ++p) acc += phasor[p] * e[p];
            V[m] = acc * inv_p;
        }
    };

    std::vector<double> amp(M);
    for (int it = 0; it < iterations; ++it) {
        forward();
        double mean = 0.0;
        for (std::size_t m = 0; m < M; ++m) {
            amp[m] = std::abs(V[m]) / prob.points[m].amplitude;
            mean += amp[m];
        }
        mean /= static_cast<double>(M);
        for (std::size_t m = 0; m < M; ++m)
            if (amp[m] > 0) res.weights[m] *= mean / amp[m];

        for (std::size_t p = 0; p < P; ++p) {
            std::complex<double> acc = 0.0;
            for (std::size_t m = 0; m < M; ++m) {
                const double mag = std::abs(V[m]);
                const std::complex<double> unit = mag > 0 ? V[m] / mag : std::complex<double>(1.0, 0.0);
                acc += res.weights[m] * prob.points[m].amplitude * unit * std::conj(E[m * P + p]);
            }
            phasor[p] = std::polar(1.0, std::arg(acc));
        }

        forward();
        std::vector<double> inten(M);
        for (std::size_t m = 0; m < M; ++m) inten[m] = std::norm(V[m]);
        res.uniformity.push_back(hologram_uniformity(inten, prob.points));
        if (it + 1 == iterations) res.intensity = inten;
    }

    for (std::size_t p = 0; p < P; ++p) res.phase.data[p] = wrap_f(std::arg(phasor[p]));
    return res;
}

ImageU16 quantize_phase(const ImageF& phase) {
    ImageU16 out(phase.width, phase.height, 1);
    for (std::size_t i = 0; i < phase.data.size(); ++i) {
        const double q = std::round(wrap(phase.data[i]) / kTwoPi * 65536.0);
        out.data[i] = static_cast<std::uint16_t>(static_cast<long>(q) % 65536);
    }
    return out;
}

}  // namespace xrsim

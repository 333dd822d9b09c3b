#include "xrsim/metrics/image_metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "xrsim/runtime/errors.hpp"

namespace xrsim {

Image<double> to_luma(const ImageU8& img) {
    Image<double> out(img.width, img.height, 1);
    if (img.channels == 1) {
        for (std::size_t i = 0; i < img.data.size(); ++i) out.data[i] = img.data[i];
        return out;
    }
    if (img.channels != 3) throw DimensionError("luma: need 1 or 3 channels");
    for (std::size_t i = 0; i < out.data.size(); ++i)
        out.data[i] = 0.299 * img.data[3 * i] + 0.587 * img.data[3 * i + 1] + 0.114 * img.data[3 * i + 2];
    return out;
}

namespace {

std::vector<double> gaussian_window(int size, double sigma) {
    std::vector<double> w(static_cast<std::size_t>(size));
    const int r = size / 2;
    double sum = 0.0;
    for (int i = 0; i < size; ++i) {
        const double x = i - r;
        w[static_cast<std::size_t>(i)] = std::exp(-x * x / (2 * sigma * sigma));
        sum += w[static_cast<std::size_t>(i)];
    }
    for (auto& v : w) v /= sum;
    return w;
}

// 'valid' separable filtering: output (w - k + 1) x (h - k + 1)
Image<double> filter_valid(const Image<double>& in, const std::vector<double>& k) {
    const int n = static_cast<int>(k.size());
    const int ow = in.width - n + 1;
    const int oh = in.height - n + 1;
    Image<double> tmp(ow, in.height, 1);
    for (int y = 0; y < in.height; ++y)
        for (int x = 0; x < ow; ++x) {
            double s = 0.0;
            for (int i = 0; i < n; ++i) s += k[static_cast<std::size_t>(i)] * in.at(x + i, y);
            tmp.at(x, y) = s;
        }
    Image<double> out(ow, oh, 1);
    for (int y = 0; y < oh; ++y)
        for (int x = 0; x < ow; ++x) {
            double s = 0.0;
            for (int i = 0; i < n; ++i) s += k[static_cast<std::size_t>(i)] * tmp.at(x, y + i);
            out.at(x, y) = s;
        }
    return out;
}

}  // namespace

double ssim(const ImageU8& a, const ImageU8& b) {
    if (!a.same_shape(b)) throw DimensionError("ssim: images differ in shape");
    constexpr int kWin = 11;
    if (a.width < kWin || a.height < kWin) throw DimensionError("ssim: image smaller than the 11x11 window");
    const auto x = to_luma(a);
    const auto y = to_luma(b);
    Image<double> xx = x, yy = y, xy = x;
    for (std::size_t i = 0; i < x.data.size(); ++i) {
        xx.data[i] = x.data[i] * x.data[i];
        yy.data[i] = y.data[i] * y.data[i];
        xy.data[i] = x.data[i] * y.data[i];
    }
    const auto w = gaussian_window(kWin, 1.5);
    const auto mx = filter_valid(x, w);
    const auto my = filter_valid(y, w);
    const auto sxx = filter_valid(xx, w);
    const auto syy = filter_valid(yy, w);
    const auto sxy = filter_valid(xy, w);
    constexpr double C1 = (0.01 * 255) * (0.01 * 255);
    constexpr double C2 = (0.03 * 255) * (0.03 * 255);
    double total = 0.0;
    for (std::size_t i = 0; i < mx.data.size(); ++i) {
        const double ux = mx.data[i];
        const double uy = my.data[i];
        const double vx = sxx.data[i] - ux * ux;
        const double vy = syy.data[i] - uy * uy;
        const double cxy = sxy.data[i] - ux * uy;
        total += ((2 * ux * uy + C1) * (2 * cxy + C2)) / ((ux * ux + uy * uy + C1) * (vx + vy + C2));
    }
    return total / static_cast<double>(mx.data.size());
}

// ---------------------------------------------------------------------------
// FLIP

namespace {

constexpr double kQc = 0.7;
constexpr double kPc = 0.4;
constexpr double kPt = 0.95;
constexpr double kW = 0.082;
constexpr double kQf = 0.5;
constexpr std::array<double, 3> kD65{0.950428545377181, 1.0, 1.088900370798128};

using Color = std::array<double, 3>;

double srgb_to_linear(double c) { return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4); }

Color linear_to_xyz(const Color& v) {
    return {10135552.0 / 24577794.0 * v[0] + 8788810.0 / 24577794.0 * v[1] + 4435075.0 / 24577794.0 * v[2],
            2613072.0 / 12288897.0 * v[0] + 8788810.0 / 12288897.0 * v[1] + 887015.0 / 12288897.0 * v[2],
            1425312.0 / 73733382.0 * v[0] + 8788810.0 / 73733382.0 * v[1] + 70074185.0 / 73733382.0 * v[2]};
}

Color xyz_to_linear(const Color& v) {
    return {3.241003232976358 * v[0] - 1.537398969488785 * v[1] - 0.498615881996363 * v[2],
            -0.969224252202516 * v[0] + 1.875929983695176 * v[1] + 0.041554226340085 * v[2],
            0.055639419851975 * v[0] - 0.204011206123910 * v[1] + 1.057148977187533 * v[2]};
}

Color xyz_to_ycxcz(const Color& v) {
    const double x = v[0] / kD65[0], y = v[1] / kD65[1], z = v[2] / kD65[2];
    return {116.0 * y - 16.0, 500.0 * (x - y), 200.0 * (y - z)};
}

Color ycxcz_to_xyz(const Color& v) {
    const double yy = (v[0] + 16.0) / 116.0;
    return {(yy + v[1] / 500.0) * kD65[0], yy * kD65[1], (yy - v[2] / 200.0) * kD65[2]};
}

double lab_f(double t) { return t > 0.008856 ? std::cbrt(t) : 7.787 * t + 16.0 / 116.0; }

Color xyz_to_lab(const Color& v) {
    const double x = lab_f(std::abs(v[0]) / kD65[0]);
    const double y = lab_f(std::abs(v[1]) / kD65[1]);
    const double z = lab_f(std::abs(v[2]) / kD65[2]);
    return {116.0 * y - 16.0, 500.0 * (x - y), 200.0 * (y - z)};
}

Color hunt(const Color& lab) { return {lab[0], 0.01 * lab[0] * lab[1], 0.01 * lab[0] * lab[2]}; }

double hyab(const Color& a, const Color& b) {
    return std::abs(a[0] - b[0]) + std::hypot(a[1] - b[1], a[2] - b[2]);
}

double max_color_distance() {
    const Color g = hunt(xyz_to_lab(linear_to_xyz({0.0, 1.0, 0.0})));
    const Color b = hunt(xyz_to_lab(linear_to_xyz({0.0, 0.0, 1.0})));
    return std::pow(hyab(g, b), kQc);
}

// clamp-to-edge separable correlation
Image<double> sep_filter(const Image<double>& in, const std::vector<double>& kx, const std::vector<double>& ky) {
    const int rx = static_cast<int>(kx.size()) / 2;
    const int ry = static_cast<int>(ky.size()) / 2;
    const int W = in.width, H = in.height;
    Image<double> tmp(W, H, 1);
    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x) {
            double s = 0.0;
            for (int i = -rx; i <= rx; ++i) s += kx[static_cast<std::size_t>(i + rx)] * in.at(std::clamp(x + i, 0, W - 1), y);
            tmp.at(x, y) = s;
        }
    Image<double> out(W, H, 1);
    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x) {
            double s = 0.0;
            for (int i = -ry; i <= ry; ++i) s += ky[static_cast<std::size_t>(i + ry)] * tmp.at(x, std::clamp(y + i, 0, H - 1));
            out.at(x, y) = s;
        }
    return out;
}

struct CsfChannel {
    // filter = c1 g1(x)g1(y) + c2 g2(x)g2(y)
    double c1 = 0.0, c2 = 0.0;
    std::vector<double> g1, g2;
};

std::array<CsfChannel, 3> csf_filters(double ppd) {
    constexpr double pi = std::numbers::pi;
    const std::array<double, 3> a1{1.0, 1.0, 34.1}, b1{0.0047, 0.0053, 0.04};
    const std::array<double, 3> a2{0.0, 0.0, 13.5}, b2{1e-5, 1e-5, 0.025};
    const double maxb = std::max({b1[0], b1[1], b1[2], b2[0], b2[1], b2[2]});
    const int r = static_cast<int>(std::ceil(3.0 * std::sqrt(maxb / (2.0 * pi * pi)) * ppd));
    const double dx = 1.0 / ppd;
    std::array<CsfChannel, 3> out;
    for (int c = 0; c < 3; ++c) {
        auto& ch = out[static_cast<std::size_t>(c)];
        double s1 = 0.0, s2 = 0.0;
        for (int i = -r; i <= r; ++i) {
            const double x2 = (i * dx) * (i * dx);
            ch.g1.push_back(std::exp(-pi * pi * x2 / b1[static_cast<std::size_t>(c)]));
            ch.g2.push_back(std::exp(-pi * pi * x2 / b2[static_cast<std::size_t>(c)]));
            s1 += ch.g1.back();
            s2 += ch.g2.back();
        }
        const double w1 = a1[static_cast<std::size_t>(c)] * std::sqrt(pi / b1[static_cast<std::size_t>(c)]);
        const double w2 = a2[static_cast<std::size_t>(c)] * std::sqrt(pi / b2[static_cast<std::size_t>(c)]);
        const double total = w1 * s1 * s1 + w2 * s2 * s2;
        ch.c1 = w1 / total;
        ch.c2 = w2 / total;
    }
    return out;
}

// 1D factors of the edge (first-derivative) and point (second-derivative)
// detectors; the 2D filters are outer products with a normalized Gaussian.
struct Detector {
    std::vector<double> deriv;
    std::vector<double> gauss;
};

Detector detection_filter(double ppd, bool point) {
    const double sd = 0.5 * kW * ppd;
    const int r = static_cast<int>(std::ceil(3.0 * sd));
    Detector d;
    double pos = 0.0, neg = 0.0, gs = 0.0;
    for (int i = -r; i <= r; ++i) {
        const double g = std::exp(-(i * i) / (2.0 * sd * sd));
        const double w = point ? (i * i / (sd * sd) - 1.0) * g : -i * g;
        d.deriv.push_back(w);
        d.gauss.push_back(g);
        (w > 0 ? pos : neg) += std::abs(w);
        gs += g;
    }
    for (auto& w : d.deriv) w /= (w > 0 ? pos : neg);
    for (auto& g : d.gauss) g /= gs;
    return d;
}

}  // namespace

FlipResult flip(const ImageU8& ref, const ImageU8& test, double ppd) {
    if (!ref.same_shape(test)) throw DimensionError("flip: images differ in shape");
    if (ref.channels != 3) throw DimensionError("flip: RGB images required");
    if (!(ppd > 0)) throw ConfigError("flip: pixels per degree must be positive");
    const int W = ref.width, H = ref.height;

    // opponent space planes
    std::array<Image<double>, 3> yr, yt;
    for (auto* set : {&yr, &yt})
        for (auto& p : *set) p = Image<double>(W, H, 1);
    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x) {
            for (int k = 0; k < 2; ++k) {
                const ImageU8& src = k == 0 ? ref : test;
                Color c{srgb_to_linear(src.at(x, y, 0) / 255.0), srgb_to_linear(src.at(x, y, 1) / 255.0),
                        srgb_to_linear(src.at(x, y, 2) / 255.0)};
                const Color o = xyz_to_ycxcz(linear_to_xyz(c));
                auto& dst = k == 0 ? yr : yt;
                for (int ch = 0; ch < 3; ++ch) dst[static_cast<std::size_t>(ch)].at(x, y) = o[static_cast<std::size_t>(ch)];
            }
        }

    // color pipeline
    const auto csf = csf_filters(ppd);
    auto spatial = [&](const std::array<Image<double>, 3>& in) {
        std::array<Image<double>, 3> out;
        for (int c = 0; c < 3; ++c) {
            const auto& f = csf[static_cast<std::size_t>(c)];
            auto a = sep_filter(in[static_cast<std::size_t>(c)], f.g1, f.g1);
            for (auto& v : a.data) v *= f.c1;
            if (f.c2 != 0.0) {
                const auto b = sep_filter(in[static_cast<std::size_t>(c)], f.g2, f.g2);
                for (std::size_t i = 0; i < a.data.size(); ++i) a.data[i] += f.c2 * b.data[i];
            }
            out[static_cast<std::size_t>(c)] = std::move(a);
        }
        return out;
    };
    const auto fr = spatial(yr);
    const auto ft = spatial(yt);
    auto to_hunt_lab = [](const std::array<Image<double>, 3>& f, std::size_t i) {
        Color lin = xyz_to_linear(ycxcz_to_xyz({f[0].data[i], f[1].data[i], f[2].data[i]}));
        for (auto& v : lin) v = std::clamp(v, 0.0, 1.0);
        return hunt(xyz_to_lab(linear_to_xyz(lin)));
    };
    const double cmax = max_color_distance();
    const double pccmax = kPc * cmax;

    // feature pipeline on normalized achromatic channel
    Image<double> gr(W, H, 1), gt(W, H, 1);
    for (std::size_t i = 0; i < gr.data.size(); ++i) {
        gr.data[i] = (yr[0].data[i] + 16.0) / 116.0;
        gt.data[i] = (yt[0].data[i] + 16.0) / 116.0;
    }
    const auto edge = detection_filter(ppd, false);
    const auto point = detection_filter(ppd, true);
    auto magnitude = [&](const Image<double>& g, const Detector& d) {
        const auto hx = sep_filter(g, d.deriv, d.gauss);
        const auto hy = sep_filter(g, d.gauss, d.deriv);
        Image<double> m(W, H, 1);
        for (std::size_t i = 0; i < m.data.size(); ++i) m.data[i] = std::hypot(hx.data[i], hy.data[i]);
        return m;
    };
    const auto er = magnitude(gr, edge), et = magnitude(gt, edge);
    const auto pr = magnitude(gr, point), pt = magnitude(gt, point);

    FlipResult res;
    res.error_map = Image<double>(W, H, 1);
    double sum = 0.0;
    for (std::size_t i = 0; i < res.error_map.data.size(); ++i) {
        double cd = std::pow(hyab(to_hunt_lab(fr, i), to_hunt_lab(ft, i)), kQc);
        cd = cd < pccmax ? cd * kPt / pccmax : kPt + (cd - pccmax) / (cmax - pccmax) * (1.0 - kPt);
        const double fd =
            std::pow(std::max(std::abs(er.data[i] - et.data[i]), std::abs(pr.data[i] - pt.data[i])) / std::sqrt(2.0), kQf);
        const double e = std::pow(cd, 1.0 - fd);
        res.error_map.data[i] = e;
        sum += e;
    }
    res.mean = sum / static_cast<double>(res.error_map.data.size());
    return res;
}

double flip_mean(const ImageU8& reference, const ImageU8& test, double ppd) { return flip(reference, test, ppd).mean; }

}  // namespace xrsim

#include "xrsim/audio/convolver.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <mutex>
#include <numbers>

#include <Eigen/Dense>

#include "xrsim/runtime/errors.hpp"

namespace xrsim {

namespace {
// FFTW planning is not thread-safe.
std::mutex& plan_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

struct FirBank::Plans {
    std::size_t n;
    double* time = nullptr;
    fftw_complex* freq = nullptr;
    fftw_plan fwd = nullptr;
    fftw_plan inv = nullptr;

    explicit Plans(std::size_t size) : n(size) {
        std::lock_guard lock(plan_mutex());
        time = fftw_alloc_real(n);
        freq = fftw_alloc_complex(n / 2 + 1);
        fwd = fftw_plan_dft_r2c_1d(static_cast<int>(n), time, freq, FFTW_ESTIMATE);
        inv = fftw_plan_dft_c2r_1d(static_cast<int>(n), freq, time, FFTW_ESTIMATE);
    }
    ~Plans() {
        std::lock_guard lock(plan_mutex());
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(inv);
        fftw_free(time);
        fftw_free(freq);
    }

    void forward(std::span<const double> x, std::vector<std::complex<double>>& out) {
        std::fill(time, time + n, 0.0);
        std::copy(x.begin(), x.end(), time);
        fftw_execute(fwd);
        out.resize(n / 2 + 1);
        for (std::size_t k = 0; k < n / 2 + 1; ++k) out[k] = {freq[k][0], freq[k][1]};
    }

    // result in `time`, unscaled
    void inverse(const std::vector<std::complex<double>>& spec) {
        for (std::size_t k = 0; k < n / 2 + 1; ++k) {
            freq[k][0] = spec[k].real();
            freq[k][1] = spec[k].imag();
        }
        fftw_execute(inv);
    }
};

FirBank::FirBank(int inputs, int outputs, int block_size, std::vector<Route> routes)
    : inputs_(inputs), outputs_(outputs), block_(block_size) {
    if (inputs <= 0 || outputs <= 0 || block_size <= 0) throw ConfigError("fir bank: sizes must be positive");
    if (routes.empty()) throw ConfigError("fir bank: no routes");
    taps_ = static_cast<int>(routes.front().taps.size());
    if (taps_ == 0) throw ConfigError("fir bank: empty filter");
    for (const auto& r : routes) {
        if (static_cast<int>(r.taps.size()) != taps_) throw ConfigError("fir bank: filters differ in length");
        if (r.input < 0 || r.input >= inputs || r.output < 0 || r.output >= outputs)
            throw ConfigError("fir bank: route index out of range");
    }
    n_ = next_pow2(static_cast<std::size_t>(block_size + taps_ - 1));
    plans_ = std::make_unique<Plans>(n_);
    for (const auto& r : routes) {
        route_in_.push_back(r.input);
        route_out_.push_back(r.output);
        spectra_.emplace_back();
        plans_->forward(r.taps, spectra_.back());
    }
    reset();
}

FirBank::~FirBank() = default;
FirBank::FirBank(FirBank&&) noexcept = default;
FirBank& FirBank::operator=(FirBank&&) noexcept = default;

void FirBank::reset() { tail_.assign(static_cast<std::size_t>(outputs_), std::vector<double>(n_ - block_, 0.0)); }

void FirBank::process(std::span<const double> in, std::span<double> out) {
    const auto B = static_cast<std::size_t>(block_);
    if (in.size() != B * inputs_ || out.size() != B * outputs_) throw DimensionError("fir bank: buffer size mismatch");
    const std::size_t bins = n_ / 2 + 1;

    std::vector<std::vector<std::complex<double>>> X(static_cast<std::size_t>(inputs_));
    std::vector<bool> used(static_cast<std::size_t>(inputs_), false);
    for (int r : route_in_) used[static_cast<std::size_t>(r)] = true;
    for (int c = 0; c < inputs_; ++c)
        if (used[static_cast<std::size_t>(c)]) plans_->forward(in.subspan(c * B, B), X[static_cast<std::size_t>(c)]);

    std::vector<std::complex<double>> Y(bins);
    const double scale = 1.0 / static_cast<double>(n_);
    for (int o = 0; o < outputs_; ++o) {
        std::fill(Y.begin(), Y.end(), std::complex<double>{});
        for (std::size_t r = 0; r < route_in_.size(); ++r) {
            if (route_out_[r] != o) continue;
            const auto& Xi = X[static_cast<std::size_t>(route_in_[r])];
            const auto& H = spectra_[r];
            for (std::size_t k = 0; k < bins; ++k) Y[k] += Xi[k] * H[k];
        }
        plans_->inverse(Y);
        auto& tail = tail_[static_cast<std::size_t>(o)];
        auto dst = out.subspan(o * B, B);
        const std::size_t T = tail.size();
        for (std::size_t i = 0; i < B; ++i) dst[i] = plans_->time[i] * scale + (i < T ? tail[i] : 0.0);
        // remaining samples carry into the next block
        std::vector<double> next(T, 0.0);
        for (std::size_t i = 0; i < T; ++i) {
            next[i] = plans_->time[B + i] * scale;
            if (B + i < T) next[i] += tail[B + i];
        }
        tail.swap(next);
    }
}

void HrtfSet::validate() const {
    if (left.size() != right.size() || left.empty()) throw ConfigError("hrtf: left/right channel counts differ");
    for (std::size_t c = 0; c < left.size(); ++c)
        if (static_cast<int>(left[c].size()) != taps || static_cast<int>(right[c].size()) != taps)
            throw ConfigError("hrtf: filters must all have the same length");
    if (sample_rate <= 0) throw ConfigError("hrtf: bad sample rate");
}

namespace {

std::vector<Vec3> fibonacci_sphere(int n) {
    std::vector<Vec3> pts;
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < n; ++i) {
        const double z = 1.0 - 2.0 * (i + 0.5) / n;
        const double r = std::sqrt(1.0 - z * z);
        pts.emplace_back(r * std::cos(golden * i), r * std::sin(golden * i), z);
    }
    return pts;
}

void add_impulse(std::vector<double>& h, double delay, double gain) {
    const auto i0 = static_cast<std::size_t>(std::floor(delay));
    const double f = delay - static_cast<double>(i0);
    if (i0 < h.size()) h[i0] += gain * (1.0 - f);
    if (i0 + 1 < h.size()) h[i0 + 1] += gain * f;
}

}  // namespace

HrtfSet synthetic_hrtf(int order, int sample_rate, int taps) {
    const int C = ambisonic_channels(order);
    const int S = 2 * C + 2;
    const auto dirs = fibonacci_sphere(S);
    Eigen::MatrixXd Y(C, S);
    for (int s = 0; s < S; ++s) {
        const auto sh = sh_coefficients(dirs[static_cast<std::size_t>(s)], order);
        for (int c = 0; c < C; ++c) Y(c, s) = sh[static_cast<std::size_t>(c)];
    }
    // speaker feeds = D * b
    const Eigen::MatrixXd D = Y.transpose() * (Y * Y.transpose()).inverse();

    constexpr double head_radius = 0.0875;  // m
    constexpr double speed_of_sound = 343.0;
    const double base_delay = 8.0;
    HrtfSet set;
    set.sample_rate = sample_rate;
    set.taps = taps;
    set.left.assign(static_cast<std::size_t>(C), std::vector<double>(static_cast<std::size_t>(taps), 0.0));
    set.right = set.left;
    for (int s = 0; s < S; ++s) {
        // lateral component: +Y is the listener's left
        const double lat = dirs[static_cast<std::size_t>(s)].y();
        const double itd = head_radius / speed_of_sound * (std::asin(std::clamp(lat, -1.0, 1.0)) + lat) * sample_rate;
        const double gl = 0.5 * (1.0 + 0.5 * lat);
        const double gr = 0.5 * (1.0 - 0.5 * lat);
        std::vector<double> hl(static_cast<std::size_t>(taps), 0.0);
        std::vector<double> hr(static_cast<std::size_t>(taps), 0.0);
        add_impulse(hl, base_delay + std::max(0.0, -itd), gl);
        add_impulse(hr, base_delay + std::max(0.0, itd), gr);
        for (int c = 0; c < C; ++c) {
            const double w = D(s, c);
            for (int t = 0; t < taps; ++t) {
                set.left[static_cast<std::size_t>(c)][static_cast<std::size_t>(t)] += w * hl[static_cast<std::size_t>(t)];
                set.right[static_cast<std::size_t>(c)][static_cast<std::size_t>(t)] += w * hr[static_cast<std::size_t>(t)];
            }
        }
    }
    return set;
}

HrtfSet load_hrtf(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw InputError("cannot open '" + path + "'");
    HrtfSet set;
    int channels = 0;
    if (!(is >> channels >> set.taps >> set.sample_rate) || channels <= 0 || set.taps <= 0)
        throw InputError("'" + path + "': bad HRTF header");
    set.left.assign(static_cast<std::size_t>(channels), std::vector<double>(static_cast<std::size_t>(set.taps)));
    set.right = set.left;
    for (int c = 0; c < channels; ++c) {
        for (auto* ear : {&set.left, &set.right})
            for (auto& v : (*ear)[static_cast<std::size_t>(c)])
                if (!(is >> v)) throw InputError("'" + path + "': truncated HRTF taps");
    }
    set.validate();
    return set;
}

void save_hrtf(const std::string& path, const HrtfSet& set) {
    std::ofstream os(path);
    if (!os) throw InputError("cannot open '" + path + "' for writing");
    os.precision(17);
    os << set.channels() << ' ' << set.taps << ' ' << set.sample_rate << '\n';
    for (int c = 0; c < set.channels(); ++c) {
        for (const auto* ear : {&set.left, &set.right}) {
            const auto& h = (*ear)[static_cast<std::size_t>(c)];
            for (std::size_t t = 0; t < h.size(); ++t) os << (t ? " " : "") << h[t];
            os << '\n';
        }
    }
}

namespace {

FirBank make_binaural_bank(const HrtfSet& hrtf, int order, int block_size, int sample_rate) {
    hrtf.validate();
    const int C = ambisonic_channels(order);
    if (hrtf.channels() < C) throw ConfigError("binauralizer: HRTF set has too few channels for the order");
    if (hrtf.sample_rate != sample_rate) throw ConfigError("binauralizer: HRTF sample rate differs from session");
    std::vector<FirBank::Route> routes;
    for (int c = 0; c < C; ++c) {
        routes.push_back({c, 0, hrtf.left[static_cast<std::size_t>(c)]});
        routes.push_back({c, 1, hrtf.right[static_cast<std::size_t>(c)]});
    }
    return FirBank(C, 2, block_size, std::move(routes));
}

FirBank make_channel_bank(std::vector<std::vector<double>>& filters, int block_size) {
    if (filters.empty()) throw ConfigError("psychoacoustic filter: no filters");
    std::vector<FirBank::Route> routes;
    const int C = static_cast<int>(filters.size());
    for (int c = 0; c < C; ++c) {
        if (filters[static_cast<std::size_t>(c)].size() != filters[0].size())
            throw ConfigError("psychoacoustic filter: filters differ in length");
        routes.push_back({c, c, filters[static_cast<std::size_t>(c)]});
    }
    return FirBank(C, C, block_size, std::move(routes));
}

}  // namespace

Binauralizer::Binauralizer(const HrtfSet& hrtf, int order, int block_size, int sample_rate)
    : bank_(make_binaural_bank(hrtf, order, block_size, sample_rate)), order_(order), sample_rate_(sample_rate) {}

AudioBlock Binauralizer::process(const AmbisonicBlock& block) {
    if (block.order != order_ || block.block_size != bank_.block_size())
        throw DimensionError("binauralizer: block shape differs from configuration");
    if (block.sample_rate != sample_rate_) throw ConfigError("binauralizer: block sample rate differs from HRTF");
    AudioBlock out(2, block.block_size, block.sample_rate);
    out.ts = block.ts;
    bank_.process(block.samples, out.samples);
    return out;
}

PsychoacousticFilter::PsychoacousticFilter(std::vector<std::vector<double>> filters, int block_size)
    : bank_(make_channel_bank(filters, block_size)), channels_(static_cast<int>(filters.size())) {}

AmbisonicBlock PsychoacousticFilter::process(const AmbisonicBlock& block) {
    if (block.channels != channels_ || block.block_size != bank_.block_size())
        throw DimensionError("psychoacoustic filter: block shape differs from configuration");
    AmbisonicBlock out = block;
    bank_.process(block.samples, out.samples);
    return out;
}

std::vector<std::vector<double>> PsychoacousticFilter::max_re_filters(int order, int taps) {
    const double theta = 137.9 * std::numbers::pi / 180.0 / (order + 1.51);
    std::vector<std::vector<double>> f;
    for (int l = 0; l <= order; ++l) {
        const double g = std::legendre(static_cast<unsigned>(l), std::cos(theta));
        for (int m = -l; m <= l; ++m) {
            std::vector<double> h(static_cast<std::size_t>(taps), 0.0);
            h[0] = g;
            f.push_back(std::move(h));
        }
    }
    return f;
}

}  // namespace xrsim

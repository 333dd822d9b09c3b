#pragma once

#include <complex>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "xrsim/audio/ambisonics.hpp"

namespace xrsim {

/// Smallest power of two >= n.
std::size_t next_pow2(std::size_t n);

/// Block overlap-add FIR bank: output o = sum over routes (in -> o) of in * filter.
/// All filters share one length; FFT size is next_pow2(block + taps - 1).
class FirBank {
public:
    struct Route {
        int input;
        int output;
        std::vector<double> taps;
    };

    FirBank(int inputs, int outputs, int block_size, std::vector<Route> routes);
    ~FirBank();
    FirBank(FirBank&&) noexcept;
    FirBank& operator=(FirBank&&) noexcept;

    /// in: inputs x block_size channel-major; out: outputs x block_size.
    void process(std::span<const double> in, std::span<double> out);
    void reset();

    int inputs() const { return inputs_; }
    int outputs() const { return outputs_; }
    int block_size() const { return block_; }
    int taps() const { return taps_; }
    std::size_t fft_size() const { return n_; }

private:
    struct Plans;
    int inputs_;
    int outputs_;
    int block_;
    int taps_ = 0;
    std::size_t n_ = 0;
    std::vector<int> route_in_;
    std::vector<int> route_out_;
    std::vector<std::vector<std::complex<double>>> spectra_;
    std::vector<std::vector<double>> tail_;  // per output, length n - block
    std::unique_ptr<Plans> plans_;
};

/// Per-ambisonic-channel left/right FIRs.
struct HrtfSet {
    int sample_rate = 48000;
    int taps = 0;
    std::vector<std::vector<double>> left;   ///< [channel][tap]
    std::vector<std::vector<double>> right;

    int channels() const { return static_cast<int>(left.size()); }
    void validate() const;
};

/// Virtual-speaker HRTF: each speaker is a delayed, attenuated impulse per
/// ear (interaural time and level differences), mixed through a
/// pseudo-inverse decoder into per-channel filters.
HrtfSet synthetic_hrtf(int order, int sample_rate = 48000, int taps = 256);

/// Text format: "channels taps sample_rate" then 2*channels lines of taps (left, right per channel).
HrtfSet load_hrtf(const std::string& path);
void save_hrtf(const std::string& path, const HrtfSet& set);

/// Soundfield -> stereo through an HRTF set, overlap-add across blocks.
class Binauralizer {
public:
    /// Throws ConfigError if the set has fewer channels than `order` needs or its rate differs.
    Binauralizer(const HrtfSet& hrtf, int order, int block_size, int sample_rate);
    AudioBlock process(const AmbisonicBlock& block);

private:
    FirBank bank_;
    int order_;
    int sample_rate_;
};

/// Channel-wise FIR on a soundfield; same machinery as the binauralizer.
class PsychoacousticFilter {
public:
    /// One filter per channel, all the same length; throws ConfigError otherwise.
    PsychoacousticFilter(std::vector<std::vector<double>> filters, int block_size);
    AmbisonicBlock process(const AmbisonicBlock& block);

    /// Per-order max-rE weights as single-tap filters padded to `taps`.
    static std::vector<std::vector<double>> max_re_filters(int order, int taps = 64);

private:
    FirBank bank_;
    int channels_;
};

}  // namespace xrsim

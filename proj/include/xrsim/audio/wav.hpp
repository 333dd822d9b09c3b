#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace xrsim {

struct WavData {
    int sample_rate = 48000;
    int channels = 1;
    std::vector<std::int16_t> samples;  ///< interleaved
};

/// PCM16 little-endian RIFF/WAVE. Throws InputError on other formats.
WavData read_wav(const std::string& path);
void write_wav(const std::string& path, const WavData& wav);

/// Interleaves channel-major doubles into PCM16 with clipping to [-1, 1).
std::vector<std::int16_t> to_pcm16_interleaved(const std::vector<std::vector<double>>& channels);

}  // namespace xrsim

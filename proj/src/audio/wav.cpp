#include "xrsim/audio/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "xrsim/runtime/errors.hpp"

namespace xrsim {

namespace {

void put_u32(std::ostream& os, std::uint32_t v) {
    const char b[4] = {char(v & 0xff), char((v >> 8) & 0xff), char((v >> 16) & 0xff), char((v >> 24) & 0xff)};
    os.write(b, 4);
}
void put_u16(std::ostream& os, std::uint16_t v) {
    const char b[2] = {char(v & 0xff), char((v >> 8) & 0xff)};
    os.write(b, 2);
}
std::uint32_t get_u32(const unsigned char* p) { return p[0] | (p[1] << 8) | (p[2] << 16) | (std::uint32_t(p[3]) << 24); }
std::uint16_t get_u16(const unsigned char* p) { return static_cast<std::uint16_t>(p[0] | (p[1] << 8)); }

}  // namespace

void write_wav(const std::string& path, const WavData& wav) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw InputError("cannot open '" + path + "' for writing");
    const auto data_bytes = static_cast<std::uint32_t>(wav.samples.size() * 2);
    os.write("RIFF", 4);
    put_u32(os, 36 + data_bytes);
    os.write("WAVEfmt ", 8);
    put_u32(os, 16);
    put_u16(os, 1);
    put_u16(os, static_cast<std::uint16_t>(wav.channels));
    put_u32(os, static_cast<std::uint32_t>(wav.sample_rate));
    put_u32(os, static_cast<std::uint32_t>(wav.sample_rate * wav.channels * 2));
    put_u16(os, static_cast<std::uint16_t>(wav.channels * 2));
    put_u16(os, 16);
    os.write("data", 4);
    put_u32(os, data_bytes);
    for (auto s : wav.samples) put_u16(os, static_cast<std::uint16_t>(s));
}

WavData read_wav(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw InputError("cannot open '" + path + "'");
    std::vector<unsigned char> buf((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    if (buf.size() < 12 || std::memcmp(buf.data(), "RIFF", 4) != 0 || std::memcmp(buf.data() + 8, "WAVE", 4) != 0)
        throw InputError("'" + path + "': not a RIFF/WAVE file");
    WavData wav;
    bool have_fmt = false;
    std::size_t pos = 12;
    while (pos + 8 <= buf.size()) {
        const std::uint32_t size = get_u32(&buf[pos + 4]);
        const unsigned char* body = &buf[pos + 8];
        if (pos + 8 + size > buf.size()) throw InputError("'" + path + "': truncated chunk");
        if (std::memcmp(&buf[pos], "fmt ", 4) == 0) {
            if (size < 16 || get_u16(body) != 1 || get_u16(body + 14) != 16)
                throw InputError("'" + path + "': only PCM16 is supported");
            wav.channels = get_u16(body + 2);
            wav.sample_rate = static_cast<int>(get_u32(body + 4));
            have_fmt = true;
        } else if (std::memcmp(&buf[pos], "data", 4) == 0) {
            if (!have_fmt) throw InputError("'" + path + "': data before fmt");
            wav.samples.resize(size / 2);
            for (std::size_t i = 0; i < wav.samples.size(); ++i)
                wav.samples[i] = static_cast<std::int16_t>(get_u16(body + 2 * i));
            return wav;
        }
        pos += 8 + size + (size & 1);
    }
    throw InputError("'" + path + "': no data chunk");
}

std::vector<std::int16_t> to_pcm16_interleaved(const std::vector<std::vector<double>>& channels) {
    if (channels.empty()) return {};
    const std::size_t n = channels[0].size();
    std::vector<std::int16_t> out(n * channels.size());
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < channels.size(); ++c) {
            const double v = std::clamp(channels[c][i], -1.0, 32767.0 / 32768.0);
            out[i * channels.size() + c] = static_cast<std::int16_t>(std::lround(v * 32768.0));
        }
    return out;
}

}  // namespace xrsim

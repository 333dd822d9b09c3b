#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "xrsim/runtime/errors.hpp"

namespace xrsim {

/// Interleaved row-major image.
template <typename T>
struct Image {
    int width = 0;
    int height = 0;
    int channels = 1;
    std::vector<T> data;

    Image() = default;
    Image(int w, int h, int c, T fill = T{})
        : width(w), height(h), channels(c), data(static_cast<std::size_t>(w) * h * c, fill) {}

    std::size_t index(int x, int y, int c = 0) const {
        return (static_cast<std::size_t>(y) * width + x) * channels + c;
    }
    T& at(int x, int y, int c = 0) { return data[index(x, y, c)]; }
    const T& at(int x, int y, int c = 0) const { return data[index(x, y, c)]; }

    bool empty() const { return data.empty(); }
    bool same_shape(const Image& o) const {
        return width == o.width && height == o.height && channels == o.channels;
    }
    bool operator==(const Image&) const = default;
};

using ImageU8 = Image<std::uint8_t>;
using ImageU16 = Image<std::uint16_t>;
using ImageF = Image<float>;

/// Binary PPM (P6, 3 channels) and PGM (P5, 1 channel, 8 or 16 bit big-endian).
void write_ppm(const std::string& path, const ImageU8& img);
ImageU8 read_ppm(const std::string& path);
void write_pgm(const std::string& path, const ImageU8& img);
void write_pgm16(const std::string& path, const ImageU16& img);
ImageU16 read_pgm16(const std::string& path);
ImageU8 read_pgm(const std::string& path);

/// Central crop keeping `fraction` of each dimension.
template <typename T>
Image<T> center_crop(const Image<T>& img, double fraction) {
    const int cw = static_cast<int>(img.width * fraction);
    const int ch = static_cast<int>(img.height * fraction);
    const int x0 = (img.width - cw) / 2;
    const int y0 = (img.height - ch) / 2;
    Image<T> out(cw, ch, img.channels);
    for (int y = 0; y < ch; ++y)
        for (int x = 0; x < cw; ++x)
            for (int c = 0; c < img.channels; ++c) out.at(x, y, c) = img.at(x0 + x, y0 + y, c);
    return out;
}

}  // namespace xrsim

#include "xrsim/common/image.hpp"

#include <fstream>
#include <istream>

namespace xrsim {

namespace {

struct PnmHeader {
    std::string magic;
    int width = 0;
    int height = 0;
    int maxval = 0;
};

void skip_ws_and_comments(std::istream& is) {
    for (;;) {
        int c = is.peek();
        if (c == '#') {
            std::string dummy;
            std::getline(is, dummy);
        } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
            is.get();
        } else {
            return;
        }
    }
}

PnmHeader read_header(std::istream& is, const std::string& path) {
    PnmHeader h;
    is >> h.magic;
    skip_ws_and_comments(is);
    is >> h.width;
    skip_ws_and_comments(is);
    is >> h.height;
    skip_ws_and_comments(is);
    is >> h.maxval;
    is.get();  // single whitespace before raster
    if (!is || h.width <= 0 || h.height <= 0 || h.maxval <= 0 || h.maxval > 65535)
        throw InputError("'" + path + "': malformed PNM header");
    return h;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw InputError("cannot open '" + path + "' for writing");
    return os;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw InputError("cannot open '" + path + "'");
    return is;
}

}  // namespace

void write_ppm(const std::string& path, const ImageU8& img) {
    if (img.channels != 3) throw DimensionError("PPM needs 3 channels");
    auto os = open_out(path);
    os << "P6\n" << img.width << ' ' << img.height << "\n255\n";
    os.write(reinterpret_cast<const char*>(img.data.data()), static_cast<std::streamsize>(img.data.size()));
}

ImageU8 read_ppm(const std::string& path) {
    auto is = open_in(path);
    auto h = read_header(is, path);
    if (h.magic != "P6" || h.maxval != 255) throw InputError("'" + path + "': expected 8-bit P6");
    ImageU8 img(h.width, h.height, 3);
    is.read(reinterpret_cast<char*>(img.data.data()), static_cast<std::streamsize>(img.data.size()));
    if (!is) throw InputError("'" + path + "': truncated raster");
    return img;
}

void write_pgm(const std::string& path, const ImageU8& img) {
    if (img.channels != 1) throw DimensionError("PGM needs 1 channel");
    auto os = open_out(path);
    os << "P5\n" << img.width << ' ' << img.height << "\n255\n";
    os.write(reinterpret_cast<const char*>(img.data.data()), static_cast<std::streamsize>(img.data.size()));
}

ImageU8 read_pgm(const std::string& path) {
    auto is = open_in(path);
    auto h = read_header(is, path);
    if (h.magic != "P5" || h.maxval != 255) throw InputError("'" + path + "': expected 8-bit P5");
    ImageU8 img(h.width, h.height, 1);
    is.read(reinterpret_cast<char*>(img.data.data()), static_cast<std::streamsize>(img.data.size()));
    if (!is) throw InputError("'" + path + "': truncated raster");
    return img;
}

void write_pgm16(const std::string& path, const ImageU16& img) {
    if (img.channels != 1) throw DimensionError("PGM needs 1 channel");
    auto os = open_out(path);
    os << "P5\n" << img.width << ' ' << img.height << "\n65535\n";
    std::vector<char> raw(img.data.size() * 2);
    for (std::size_t i = 0; i < img.data.size(); ++i) {
        raw[2 * i] = static_cast<char>(img.data[i] >> 8);
        raw[2 * i + 1] = static_cast<char>(img.data[i] & 0xff);
    }
    os.write(raw.data(), static_cast<std::streamsize>(raw.size()));
}

ImageU16 read_pgm16(const std::string& path) {
    auto is = open_in(path);
    auto h = read_header(is, path);
    if (h.magic != "P5" || h.maxval != 65535) throw InputError("'" + path + "': expected 16-bit P5");
    ImageU16 img(h.width, h.height, 1);
    std::vector<unsigned char> raw(img.data.size() * 2);
    is.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (!is) throw InputError("'" + path + "': truncated raster");
    for (std::size_t i = 0; i < img.data.size(); ++i)
        img.data[i] = static_cast<std::uint16_t>((raw[2 * i] << 8) | raw[2 * i + 1]);
    return img;
}

}  // namespace xrsim

#ifndef GLG_IMAGE_IO_HPP
#define GLG_IMAGE_IO_HPP

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <zlib.h>

#include "glg/image.hpp"

namespace glg {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline void put_u32be(std::vector<std::uint8_t>& v, std::uint32_t x) {
    v.push_back(static_cast<std::uint8_t>(x >> 24));
    v.push_back(static_cast<std::uint8_t>(x >> 16));
    v.push_back(static_cast<std::uint8_t>(x >> 8));
    v.push_back(static_cast<std::uint8_t>(x));
}

inline std::uint32_t get_u32be(const std::uint8_t* p) {
    return (static_cast<std::uint32_t>(p[0]) << 24) | (static_cast<std::uint32_t>(p[1]) << 16) |
           (static_cast<std::uint32_t>(p[2]) << 8) | static_cast<std::uint32_t>(p[3]);
}

inline void append_chunk(std::vector<std::uint8_t>& out, const char type[4],
                         const std::vector<std::uint8_t>& data) {
    put_u32be(out, static_cast<std::uint32_t>(data.size()));
    std::size_t start = out.size();
    out.insert(out.end(), type, type + 4);
    out.insert(out.end(), data.begin(), data.end());
    std::uint32_t crc = crc32(0L, Z_NULL, 0);
    crc = crc32(crc, out.data() + start, static_cast<uInt>(out.size() - start));
    put_u32be(out, crc);
}

inline int paeth(int a, int b, int c) {
    int p = a + b - c;
    int pa = std::abs(p - a), pb = std::abs(p - b), pc = std::abs(p - c);
    if (pa <= pb && pa <= pc) return a;
    if (pb <= pc) return b;
    return c;
}

} // namespace detail

inline const std::uint8_t kPngSignature[8] = {137, 80, 78, 71, 13, 10, 26, 10};

/// Encode Gray8/Rgb8 to an 8-bit non-interlaced PNG in memory.
inline std::vector<std::uint8_t> encode_png(const Image& img) {
    const int ch = channel_count(img.channels);
    const std::size_t row = static_cast<std::size_t>(img.width) * ch;

    std::vector<std::uint8_t> raw;
    raw.reserve((row + 1) * img.height);
    for (int y = 0; y < img.height; ++y) {
        raw.push_back(0); // filter: None
        const std::uint8_t* src = img.data.data() + static_cast<std::size_t>(y) * row;
        raw.insert(raw.end(), src, src + row);
    }

    uLongf bound = compressBound(static_cast<uLong>(raw.size()));
    std::vector<std::uint8_t> comp(bound);
    if (compress2(comp.data(), &bound, raw.data(), static_cast<uLong>(raw.size()), 6) != Z_OK)
        throw IoError("encode_png: deflate failed");
    comp.resize(bound);

    std::vector<std::uint8_t> ihdr;
    detail::put_u32be(ihdr, static_cast<std::uint32_t>(img.width));
    detail::put_u32be(ihdr, static_cast<std::uint32_t>(img.height));
    ihdr.push_back(8);                                        // bit depth
    ihdr.push_back(img.channels == Channels::Rgb8 ? 2 : 0);   // color type
    ihdr.push_back(0);                                        // compression
    ihdr.push_back(0);                                        // filter method
    ihdr.push_back(0);                                        // interlace

    std::vector<std::uint8_t> out(kPngSignature, kPngSignature + 8);
    detail::append_chunk(out, "IHDR", ihdr);
    detail::append_chunk(out, "IDAT", comp);
    detail::append_chunk(out, "IEND", {});
    return out;
}

/// Decode an 8-bit grayscale or RGB PNG (non-interlaced).
inline Image decode_png(const std::uint8_t* bytes, std::size_t size) {
    if (size < 8 || std::memcmp(bytes, kPngSignature, 8) != 0)
        throw IoError("decode_png: not a PNG file");

    std::size_t pos = 8;
    int width = 0, height = 0, ch = 0;
    bool have_ihdr = false, have_iend = false;
    std::vector<std::uint8_t> idat;

    while (pos + 12 <= size && !have_iend) {
        std::uint32_t len = detail::get_u32be(bytes + pos);
        if (pos + 12 + len > size) throw IoError("decode_png: truncated chunk");
        std::string type(reinterpret_cast<const char*>(bytes + pos + 4), 4);
        const std::uint8_t* data = bytes + pos + 8;

        if (type == "IHDR") {
            if (len != 13) throw IoError("decode_png: bad IHDR");
            width = static_cast<int>(detail::get_u32be(data));
            height = static_cast<int>(detail::get_u32be(data + 4));
            int depth = data[8], color = data[9], interlace = data[12];
            if (depth != 8) throw IoError("decode_png: only 8-bit depth supported");
            if (interlace != 0) throw IoError("decode_png: interlaced PNG not supported");
            if (color == 0)
                ch = 1;
            else if (color == 2)
                ch = 3;
            else
                throw IoError("decode_png: only grayscale and RGB color types supported");
            have_ihdr = true;
        } else if (type == "IDAT") {
            idat.insert(idat.end(), data, data + len);
        } else if (type == "IEND") {
            have_iend = true;
        }
        pos += 12 + len;
    }
    if (!have_ihdr || width < 1 || height < 1) throw IoError("decode_png: missing IHDR");
    if (idat.empty()) throw IoError("decode_png: missing IDAT");

    const std::size_t row = static_cast<std::size_t>(width) * ch;
    std::vector<std::uint8_t> raw((row + 1) * height);
    uLongf raw_len = static_cast<uLongf>(raw.size());
    if (uncompress(raw.data(), &raw_len, idat.data(), static_cast<uLong>(idat.size())) != Z_OK ||
        raw_len != raw.size())
        throw IoError("decode_png: inflate failed");

    Image img(width, height, ch == 3 ? Channels::Rgb8 : Channels::Gray8);
    std::vector<std::uint8_t> prev(row, 0);
    for (int y = 0; y < height; ++y) {
        const std::uint8_t* src = raw.data() + static_cast<std::size_t>(y) * (row + 1);
        std::uint8_t filter = src[0];
        std::uint8_t* dst = img.data.data() + static_cast<std::size_t>(y) * row;
        for (std::size_t i = 0; i < row; ++i) {
            int x = src[1 + i];
            int a = i >= static_cast<std::size_t>(ch) ? dst[i - ch] : 0;
            int b = prev[i];
            int c = i >= static_cast<std::size_t>(ch) ? prev[i - ch] : 0;
            switch (filter) {
                case 0: break;
                case 1: x += a; break;
                case 2: x += b; break;
                case 3: x += (a + b) / 2; break;
                case 4: x += detail::paeth(a, b, c); break;
                default: throw IoError("decode_png: unknown filter type");
            }
            dst[i] = static_cast<std::uint8_t>(x & 0xFF);
        }
        std::memcpy(prev.data(), dst, row);
    }
    return img;
}

inline Image decode_png(const std::vector<std::uint8_t>& bytes) {
    return decode_png(bytes.data(), bytes.size());
}

inline std::vector<std::uint8_t> read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open file: " + path);
    return std::vector<std::uint8_t>((std::istreambuf_iterator<char>(f)),
                                     std::istreambuf_iterator<char>());
}

inline void write_file(const std::string& path, const std::uint8_t* data, std::size_t size) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open file for writing: " + path);
    f.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(size));
    if (!f) throw IoError("write failed: " + path);
}

inline void save_png(const Image& img, const std::string& path) {
    auto bytes = encode_png(img);
    write_file(path, bytes.data(), bytes.size());
}

inline Image load_png(const std::string& path) {
    auto bytes = read_file(path);
    return decode_png(bytes.data(), bytes.size());
}

// ---------------------------------------------------------------------------
// Binary PNM (P5 gray / P6 RGB), maxval 255. Oracle interchange format.
// ---------------------------------------------------------------------------

inline void save_pnm(const Image& img, const std::string& path) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open file for writing: " + path);
    f << (img.channels == Channels::Rgb8 ? "P6" : "P5") << "\n"
      << img.width << " " << img.height << "\n255\n";
    f.write(reinterpret_cast<const char*>(img.data.data()),
            static_cast<std::streamsize>(img.data.size()));
    if (!f) throw IoError("write failed: " + path);
}

inline Image load_pnm(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open file: " + path);
    std::string magic;
    f >> magic;
    if (magic != "P5" && magic != "P6") throw IoError("load_pnm: not a binary PGM/PPM: " + path);

    auto next_int = [&]() -> int {
        // skip whitespace and # comments
        for (;;) {
            int c = f.peek();
            if (c == '#') {
                std::string line;
                std::getline(f, line);
            } else if (std::isspace(c)) {
                f.get();
            } else {
                break;
            }
        }
        int v;
        if (!(f >> v)) throw IoError("load_pnm: malformed header");
        return v;
    };

    int w = next_int(), h = next_int(), maxval = next_int();
    if (maxval != 255) throw IoError("load_pnm: only maxval 255 supported");
    f.get(); // single whitespace after maxval

    Image img(w, h, magic == "P6" ? Channels::Rgb8 : Channels::Gray8);
    f.read(reinterpret_cast<char*>(img.data.data()), static_cast<std::streamsize>(img.data.size()));
    if (f.gcount() != static_cast<std::streamsize>(img.data.size()))
        throw IoError("load_pnm: truncated pixel data");
    return img;
}

/// Load an image by extension (.png, .pgm, .ppm, .pnm).
inline Image load_image(const std::string& path) {
    auto dot = path.rfind('.');
    std::string ext = dot == std::string::npos ? "" : path.substr(dot);
    for (auto& c : ext) c = static_cast<char>(std::tolower(c));
    if (ext == ".png") return load_png(path);
    if (ext == ".pgm" || ext == ".ppm" || ext == ".pnm") return load_pnm(path);
    throw IoError("load_image: unsupported extension: " + path);
}

} // namespace glg

#endif // GLG_IMAGE_IO_HPP

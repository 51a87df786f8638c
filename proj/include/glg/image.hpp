#ifndef GLG_IMAGE_HPP
#define GLG_IMAGE_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace glg {

enum class Channels : std::uint8_t { Gray8 = 1, Rgb8 = 3 };

inline int channel_count(Channels c) { return static_cast<int>(c); }

/// Owned raster, row-major, no row padding.
struct Image {
    int width = 0;
    int height = 0;
    Channels channels = Channels::Gray8;
    std::vector<std::uint8_t> data;

    Image() = default;
    Image(int w, int h, Channels ch, std::uint8_t fill = 0)
        : width(w), height(h), channels(ch) {
        if (w < 1 || h < 1)
            throw std::invalid_argument("Image: width and height must be >= 1");
        data.assign(static_cast<std::size_t>(w) * h * channel_count(ch), fill);
    }

    static Image gray(int w, int h, std::uint8_t fill = 0) { return Image(w, h, Channels::Gray8, fill); }
    static Image rgb(int w, int h, std::uint8_t fill = 0) { return Image(w, h, Channels::Rgb8, fill); }

    bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }

    std::size_t index(int x, int y) const {
        return (static_cast<std::size_t>(y) * width + x) * channel_count(channels);
    }

    std::uint8_t& at(int x, int y, int c = 0) { return data[index(x, y) + c]; }
    std::uint8_t at(int x, int y, int c = 0) const { return data[index(x, y) + c]; }

    void set_rgb(int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
        std::size_t i = index(x, y);
        data[i] = r;
        data[i + 1] = g;
        data[i + 2] = b;
    }

    bool operator==(const Image& o) const {
        return width == o.width && height == o.height && channels == o.channels && data == o.data;
    }
};

/// Per-pixel boolean raster. One byte per pixel, value 0 or 1.
struct BinaryMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> bits;

    BinaryMask() = default;
    BinaryMask(int w, int h, bool fill = false) : width(w), height(h) {
        if (w < 1 || h < 1)
            throw std::invalid_argument("BinaryMask: width and height must be >= 1");
        bits.assign(static_cast<std::size_t>(w) * h, fill ? 1 : 0);
    }

    bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }
    bool get(int x, int y) const { return bits[static_cast<std::size_t>(y) * width + x] != 0; }
    void set(int x, int y, bool v = true) { bits[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0; }

    std::size_t count() const {
        std::size_t n = 0;
        for (auto b : bits) n += b;
        return n;
    }

    bool operator==(const BinaryMask& o) const {
        return width == o.width && height == o.height && bits == o.bits;
    }
};

/// Binary per-pixel edge flags, same dimensions as the source image.
struct EdgeMap : BinaryMask {
    EdgeMap() = default;
    EdgeMap(int w, int h) : BinaryMask(w, h) {}
    explicit EdgeMap(const BinaryMask& m) : BinaryMask(m) {}
};

/// Planar float HSV image: h in degrees [0,360), s and v in [0,1].
struct HsvImage {
    int width = 0;
    int height = 0;
    std::vector<float> h, s, v;

    HsvImage() = default;
    HsvImage(int w, int h_) : width(w), height(h_) {
        std::size_t n = static_cast<std::size_t>(w) * h_;
        h.assign(n, 0.f);
        s.assign(n, 0.f);
        v.assign(n, 0.f);
    }

    std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width + x; }
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

} // namespace glg

#endif // GLG_IMAGE_HPP

#ifndef GLG_IMGPROC_HPP
#define GLG_IMGPROC_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <vector>

#include "glg/geometry.hpp"
#include "glg/image.hpp"

namespace glg {

// ---------------------------------------------------------------------------
// Grayscale
// ---------------------------------------------------------------------------

/// ITU-R BT.601 luma: gray = round(0.299 R + 0.587 G + 0.114 B).
inline Image to_grayscale(const Image& img) {
    require(img.channels == Channels::Rgb8, "to_grayscale: input must be Rgb8");
    Image out = Image::gray(img.width, img.height);
    const std::uint8_t* src = img.data.data();
    std::uint8_t* dst = out.data.data();
    std::size_t n = static_cast<std::size_t>(img.width) * img.height;
    for (std::size_t i = 0; i < n; ++i) {
        double g = 0.299 * src[3 * i] + 0.587 * src[3 * i + 1] + 0.114 * src[3 * i + 2];
        long v = std::lround(g);
        dst[i] = static_cast<std::uint8_t>(std::clamp(v, 0L, 255L));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Gaussian blur
// ---------------------------------------------------------------------------

/// Normalized 1-D Gaussian kernel of odd size; weights sum to 1.
inline std::vector<double> gaussian_kernel(double sigma, int ksize) {
    require(ksize >= 1 && ksize % 2 == 1, "gaussian_kernel: ksize must be odd and >= 1");
    require(sigma > 0.0, "gaussian_kernel: sigma must be > 0");
    std::vector<double> k(ksize);
    int r = ksize / 2;
    double sum = 0.0;
    for (int i = -r; i <= r; ++i) {
        double w = std::exp(-(static_cast<double>(i) * i) / (2.0 * sigma * sigma));
        k[i + r] = w;
        sum += w;
    }
    for (auto& w : k) w /= sum;
    return k;
}

/// Separable Gaussian blur with replicated borders. The intermediate pass is
/// kept in floating point; quantization happens once at the end.
inline Image gaussian_blur(const Image& img, double sigma, int ksize) {
    require(img.channels == Channels::Gray8, "gaussian_blur: input must be Gray8");
    std::vector<double> k = gaussian_kernel(sigma, ksize);
    const int r = ksize / 2;
    const int w = img.width, h = img.height;

    auto clampx = [&](int x) { return std::clamp(x, 0, w - 1); };
    auto clampy = [&](int y) { return std::clamp(y, 0, h - 1); };

    std::vector<double> tmp(static_cast<std::size_t>(w) * h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -r; i <= r; ++i) acc += k[i + r] * img.at(clampx(x + i), y);
            tmp[static_cast<std::size_t>(y) * w + x] = acc;
        }

    Image out = Image::gray(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -r; i <= r; ++i) acc += k[i + r] * tmp[static_cast<std::size_t>(clampy(y + i)) * w + x];
            out.at(x, y) = static_cast<std::uint8_t>(std::clamp(std::lround(acc), 0L, 255L));
        }
    return out;
}

// ---------------------------------------------------------------------------
// Canny
// ---------------------------------------------------------------------------

/// 3x3 Sobel gradients with zero padding outside the image.
/// gx responds to left-to-right increase, gy to top-to-bottom increase.
inline void sobel(const Image& img, std::vector<int>& gx, std::vector<int>& gy) {
    require(img.channels == Channels::Gray8, "sobel: input must be Gray8");
    const int w = img.width, h = img.height;
    gx.assign(static_cast<std::size_t>(w) * h, 0);
    gy.assign(static_cast<std::size_t>(w) * h, 0);
    auto px = [&](int x, int y) -> int {
        if (x < 0 || x >= w || y < 0 || y >= h) return 0;
        return img.at(x, y);
    };
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            int a = px(x - 1, y - 1), b = px(x, y - 1), c = px(x + 1, y - 1);
            int d = px(x - 1, y), f = px(x + 1, y);
            int g = px(x - 1, y + 1), i = px(x, y + 1), j = px(x + 1, y + 1);
            gx[static_cast<std::size_t>(y) * w + x] = (c + 2 * f + j) - (a + 2 * d + g);
            gy[static_cast<std::size_t>(y) * w + x] = (g + 2 * i + j) - (a + 2 * b + c);
        }
}

/// Gradient direction quantized to 4 bins; returns the neighbor offset for
/// the positive direction. Bins: 0 deg -> (1,0), 45 -> (1,1), 90 -> (0,1),
/// 135 -> (-1,1). Angles are folded to [0,180).
inline std::pair<int, int> gradient_offset(int gx, int gy) {
    double ang = std::atan2(static_cast<double>(gy), static_cast<double>(gx)) * 180.0 / M_PI;
    if (ang < 0.0) ang += 180.0;
    int bin = static_cast<int>(std::floor((ang + 22.5) / 45.0)) % 4;
    switch (bin) {
        case 0: return {1, 0};
        case 1: return {1, 1};
        case 2: return {0, 1};
        default: return {-1, 1};
    }
}

/// Canny edge detection. Magnitude is hypot(gx, gy)/4, i.e. scaled to the
/// 8-bit step height, so thresholds are expressed in pixel-value units.
/// Non-maximum suppression keeps a pixel when its magnitude strictly exceeds
/// the backward neighbor and is >= the forward neighbor along the quantized
/// gradient direction. Hysteresis keeps weak pixels (>= low) 8-connected,
/// transitively, to a strong pixel (>= high). The one-pixel image border is
/// never part of the edge map: its zero-padded gradient support is
/// incomplete and would otherwise paint the frame outline on every image.
inline EdgeMap canny(const Image& img, double low, double high) {
    require(img.channels == Channels::Gray8, "canny: input must be Gray8");
    require(low <= high, "canny: low threshold must be <= high threshold");
    const int w = img.width, h = img.height;

    std::vector<int> gx, gy;
    sobel(img, gx, gy);

    std::vector<double> mag(static_cast<std::size_t>(w) * h);
    for (std::size_t i = 0; i < mag.size(); ++i)
        mag[i] = std::hypot(static_cast<double>(gx[i]), static_cast<double>(gy[i])) / 4.0;

    auto mag_at = [&](int x, int y) -> double {
        if (x < 0 || x >= w || y < 0 || y >= h) return 0.0;
        return mag[static_cast<std::size_t>(y) * w + x];
    };

    // 0 none, 1 weak candidate, 2 strong
    std::vector<std::uint8_t> cls(static_cast<std::size_t>(w) * h, 0);
    for (int y = 1; y < h - 1; ++y)
        for (int x = 1; x < w - 1; ++x) {
            std::size_t i = static_cast<std::size_t>(y) * w + x;
            double m = mag[i];
            if (m < low) continue;
            auto [dx, dy] = gradient_offset(gx[i], gy[i]);
            double fwd = mag_at(x + dx, y + dy);
            double bwd = mag_at(x - dx, y - dy);
            if (m > bwd && m >= fwd) cls[i] = (m >= high) ? 2 : 1;
        }

    EdgeMap edges(w, h);
    std::deque<std::pair<int, int>> queue;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (cls[static_cast<std::size_t>(y) * w + x] == 2) {
                edges.set(x, y);
                queue.emplace_back(x, y);
            }
    while (!queue.empty()) {
        auto [x, y] = queue.front();
        queue.pop_front();
        for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx) {
                int nx = x + dx, ny = y + dy;
                if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
                std::size_t i = static_cast<std::size_t>(ny) * w + nx;
                if (cls[i] == 1 && !edges.get(nx, ny)) {
                    edges.set(nx, ny);
                    queue.emplace_back(nx, ny);
                }
            }
    }
    return edges;
}

// ---------------------------------------------------------------------------
// HSV
// ---------------------------------------------------------------------------

/// Hexcone HSV for one pixel: h degrees in [0,360), s and v in [0,1].
/// Achromatic pixels get h = 0.
inline void rgb_to_hsv_pixel(std::uint8_t r8, std::uint8_t g8, std::uint8_t b8,
                             float& h, float& s, float& v) {
    double r = r8 / 255.0, g = g8 / 255.0, b = b8 / 255.0;
    double mx = std::max({r, g, b});
    double mn = std::min({r, g, b});
    double d = mx - mn;
    v = static_cast<float>(mx);
    s = (mx <= 0.0) ? 0.f : static_cast<float>(d / mx);
    if (d <= 0.0) {
        h = 0.f;
        return;
    }
    double hh;
    if (mx == r)
        hh = 60.0 * std::fmod((g - b) / d, 6.0);
    else if (mx == g)
        hh = 60.0 * ((b - r) / d + 2.0);
    else
        hh = 60.0 * ((r - g) / d + 4.0);
    if (hh < 0.0) hh += 360.0;
    if (hh >= 360.0) hh -= 360.0;
    h = static_cast<float>(hh);
}

inline HsvImage rgb_to_hsv(const Image& img) {
    require(img.channels == Channels::Rgb8, "rgb_to_hsv: input must be Rgb8");
    HsvImage out(img.width, img.height);
    std::size_t n = static_cast<std::size_t>(img.width) * img.height;
    for (std::size_t i = 0; i < n; ++i)
        rgb_to_hsv_pixel(img.data[3 * i], img.data[3 * i + 1], img.data[3 * i + 2],
                         out.h[i], out.s[i], out.v[i]);
    return out;
}

/// Inclusive HSV band; hue ranges may not wrap around 360.
struct HsvRange {
    double h_lo = 0.0, h_hi = 360.0;
    double s_lo = 0.0, s_hi = 1.0;
    double v_lo = 0.0, v_hi = 1.0;
};

inline void validate_range(const HsvRange& r, const char* what) {
    require(r.h_lo <= r.h_hi && r.s_lo <= r.s_hi && r.v_lo <= r.v_hi,
            std::string(what) + ": inverted range");
    require(r.h_lo >= 0.0 && r.h_hi < 360.0, std::string(what) + ": hue must lie in [0,360) without wraparound");
    require(r.s_lo >= 0.0 && r.s_hi <= 1.0 && r.v_lo >= 0.0 && r.v_hi <= 1.0,
            std::string(what) + ": s and v must lie in [0,1]");
}

inline BinaryMask hsv_in_range(const HsvImage& img, const HsvRange& r) {
    validate_range(r, "hsv_in_range");
    BinaryMask m(img.width, img.height);
    std::size_t n = static_cast<std::size_t>(img.width) * img.height;
    for (std::size_t i = 0; i < n; ++i) {
        bool in = img.h[i] >= r.h_lo && img.h[i] <= r.h_hi &&
                  img.s[i] >= r.s_lo && img.s[i] <= r.s_hi &&
                  img.v[i] >= r.v_lo && img.v[i] <= r.v_hi;
        m.bits[i] = in ? 1 : 0;
    }
    return m;
}

inline BinaryMask mask_or(const BinaryMask& a, const BinaryMask& b) {
    require(a.width == b.width && a.height == b.height, "mask_or: dimension mismatch");
    BinaryMask out(a.width, a.height);
    for (std::size_t i = 0; i < out.bits.size(); ++i) out.bits[i] = (a.bits[i] | b.bits[i]);
    return out;
}

// ---------------------------------------------------------------------------
// Binary morphology (full 3x3 kernel)
// ---------------------------------------------------------------------------

enum class MorphOp { Erode, Dilate, Open, Close };

namespace detail {

inline BinaryMask erode3x3(const BinaryMask& m) {
    BinaryMask out(m.width, m.height);
    for (int y = 0; y < m.height; ++y)
        for (int x = 0; x < m.width; ++x) {
            bool all = true;
            for (int dy = -1; dy <= 1 && all; ++dy)
                for (int dx = -1; dx <= 1 && all; ++dx) {
                    int nx = x + dx, ny = y + dy;
                    if (!m.in_bounds(nx, ny) || !m.get(nx, ny)) all = false;
                }
            if (all) out.set(x, y);
        }
    return out;
}

inline BinaryMask dilate3x3(const BinaryMask& m) {
    BinaryMask out(m.width, m.height);
    for (int y = 0; y < m.height; ++y)
        for (int x = 0; x < m.width; ++x) {
            bool any = false;
            for (int dy = -1; dy <= 1 && !any; ++dy)
                for (int dx = -1; dx <= 1 && !any; ++dx) {
                    int nx = x + dx, ny = y + dy;
                    if (m.in_bounds(nx, ny) && m.get(nx, ny)) any = true;
                }
            if (any) out.set(x, y);
        }
    return out;
}

} // namespace detail

/// Standard binary morphology with a full 3x3 structuring element. Pixels
/// outside the mask are treated as unset. Open = erode then dilate,
/// close = dilate then erode.
inline BinaryMask morphology(const BinaryMask& m, MorphOp op) {
    switch (op) {
        case MorphOp::Erode: return detail::erode3x3(m);
        case MorphOp::Dilate: return detail::dilate3x3(m);
        case MorphOp::Open: return detail::dilate3x3(detail::erode3x3(m));
        case MorphOp::Close: return detail::erode3x3(detail::dilate3x3(m));
    }
    return m;
}

// ---------------------------------------------------------------------------
// Connected components / contours / moments
// ---------------------------------------------------------------------------

/// Outer boundary of one 8-connected component. `points` traces the boundary
/// (consecutive points are 8-neighbors, closed); `area` is the component
/// pixel count. m00/m10/m01 are raw moments over the filled component.
struct Contour {
    std::vector<std::pair<int, int>> points;
    std::int64_t area = 0;
    std::int64_t m00 = 0, m10 = 0, m01 = 0;
};

namespace detail {

/// Moore-neighbor boundary trace starting from the component's first pixel
/// in raster order; stops on Jacob's criterion (the first move out of the
/// start pixel repeats). `inside` answers component membership.
template <typename Inside>
inline std::vector<std::pair<int, int>> trace_boundary(int sx, int sy, Inside inside,
                                                       std::size_t max_steps) {
    // 8 directions, clockwise in image coordinates (y down), starting west.
    static const int dx8[8] = {-1, -1, 0, 1, 1, 1, 0, -1};
    static const int dy8[8] = {0, -1, -1, -1, 0, 1, 1, 1};

    std::vector<std::pair<int, int>> pts;
    pts.emplace_back(sx, sy);

    int cx = sx, cy = sy;
    // The raster-first pixel has no component pixel to its west or above, so
    // scanning clockwise from west is a valid backtrack start.
    int scan_from = 0;
    int first_dir = -1;
    for (std::size_t step = 0; step < max_steps; ++step) {
        int found = -1;
        for (int i = 0; i < 8; ++i) {
            int dir = (scan_from + i) % 8;
            if (inside(cx + dx8[dir], cy + dy8[dir])) {
                found = dir;
                break;
            }
        }
        if (found < 0) break; // isolated pixel
        if (first_dir < 0)
            first_dir = found;
        else if (cx == sx && cy == sy && found == first_dir)
            break; // full cycle
        cx += dx8[found];
        cy += dy8[found];
        pts.emplace_back(cx, cy);
        scan_from = (found + 5) % 8; // neighbor after the one we came from
    }
    if (pts.size() > 1 && pts.back() == pts.front()) pts.pop_back();
    return pts;
}

} // namespace detail

/// Outer boundaries of all 8-connected components, in raster discovery order.
inline std::vector<Contour> find_contours(const BinaryMask& mask) {
    const int w = mask.width, h = mask.height;
    std::vector<int> label(static_cast<std::size_t>(w) * h, 0);
    std::vector<Contour> out;
    int next_label = 0;

    for (int y0 = 0; y0 < h; ++y0)
        for (int x0 = 0; x0 < w; ++x0) {
            std::size_t i0 = static_cast<std::size_t>(y0) * w + x0;
            if (!mask.bits[i0] || label[i0]) continue;
            ++next_label;
            Contour c;
            // BFS flood fill for area and moments.
            std::deque<std::pair<int, int>> q;
            q.emplace_back(x0, y0);
            label[i0] = next_label;
            while (!q.empty()) {
                auto [x, y] = q.front();
                q.pop_front();
                c.area += 1;
                c.m00 += 1;
                c.m10 += x;
                c.m01 += y;
                for (int dy = -1; dy <= 1; ++dy)
                    for (int dx = -1; dx <= 1; ++dx) {
                        int nx = x + dx, ny = y + dy;
                        if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
                        std::size_t ni = static_cast<std::size_t>(ny) * w + nx;
                        if (mask.bits[ni] && !label[ni]) {
                            label[ni] = next_label;
                            q.emplace_back(nx, ny);
                        }
                    }
            }
            int id = next_label;
            c.points = detail::trace_boundary(
                x0, y0,
                [&](int x, int y) {
                    return x >= 0 && x < w && y >= 0 && y < h &&
                           label[static_cast<std::size_t>(y) * w + x] == id;
                },
                8u * static_cast<std::size_t>(w) * h + 8u);
            out.push_back(std::move(c));
        }
    return out;
}

/// Centroid (m10/m00, m01/m00) over the filled component's pixels.
inline Vec2 centroid(const Contour& c) {
    require(c.m00 > 0, "centroid: degenerate contour with zero area");
    return {static_cast<double>(c.m10) / static_cast<double>(c.m00),
            static_cast<double>(c.m01) / static_cast<double>(c.m00)};
}

} // namespace glg

#endif // GLG_IMGPROC_HPP

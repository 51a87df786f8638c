#ifndef GLG_LASER_DETECT_HPP
#define GLG_LASER_DETECT_HPP

#include <algorithm>
#include <cmath>
#include <optional>

#include "glg/imgproc.hpp"

namespace glg {

/// Algorithm 2 parameters: two HSV bands (the saturated core of the dot and
/// its overexposed bright center), area gate, and mask smoothing.
struct LaserParams {
    HsvRange core_green{100.0, 140.0, 0.40, 1.0, 0.40, 1.0};
    HsvRange bright_green{90.0, 150.0, 0.05, 0.40, 0.85, 1.0};
    std::int64_t area_min = 3;     // px^2
    std::int64_t area_max = 2000;  // px^2
    double blur_sigma = 1.0;
    int blur_ksize = 3;
};

inline void validate(const LaserParams& p) {
    validate_range(p.core_green, "LaserParams.core_green");
    validate_range(p.bright_green, "LaserParams.bright_green");
    require(p.area_min >= 1, "LaserParams: area_min must be >= 1");
    require(p.area_min < p.area_max, "LaserParams: area_min must be < area_max");
    require(p.blur_sigma > 0.0 && p.blur_ksize >= 1 && p.blur_ksize % 2 == 1,
            "LaserParams: bad blur settings");
}

struct LaserSpot {
    Vec2 center;
    std::int64_t area = 0;       // px^2 of the selected component
    std::int64_t mask_pixels = 0; // set pixels in the cleaned mask
};

namespace detail {

/// Blur a binary mask as a 0/255 grayscale image and re-threshold at 128.
inline BinaryMask blur_rethreshold(const BinaryMask& m, double sigma, int ksize) {
    Image gray = Image::gray(m.width, m.height);
    for (std::size_t i = 0; i < m.bits.size(); ++i) gray.data[i] = m.bits[i] ? 255 : 0;
    Image blurred = gaussian_blur(gray, sigma, ksize);
    BinaryMask out(m.width, m.height);
    for (std::size_t i = 0; i < out.bits.size(); ++i) out.bits[i] = blurred.data[i] >= 128 ? 1 : 0;
    return out;
}

} // namespace detail

/// The combined, morphologically cleaned candidate mask prior to contouring.
inline BinaryMask laser_mask(const Image& img, const LaserParams& p) {
    validate(p);
    HsvImage hsv = rgb_to_hsv(img);
    BinaryMask core = hsv_in_range(hsv, p.core_green);
    BinaryMask bright = hsv_in_range(hsv, p.bright_green);
    BinaryMask combined = mask_or(core, bright);
    BinaryMask opened = morphology(combined, MorphOp::Open);
    return detail::blur_rethreshold(opened, p.blur_sigma, p.blur_ksize);
}

/// Algorithm 2: dual HSV masks -> union -> open -> blur/re-threshold ->
/// contours -> area gate -> largest candidate -> moment centroid. Returns
/// nothing when no candidate survives.
inline std::optional<LaserSpot> detect_laser(const Image& img, const LaserParams& p) {
    BinaryMask mask = laser_mask(img, p);
    std::vector<Contour> contours = find_contours(mask);

    const Contour* best = nullptr;
    Vec2 best_c;
    for (const auto& c : contours) {
        if (c.area < p.area_min || c.area > p.area_max) continue;
        Vec2 cc = centroid(c);
        // largest area wins; ties break toward smaller centroid y, then x
        bool take = !best || c.area > best->area ||
                    (c.area == best->area &&
                     (cc.y < best_c.y || (cc.y == best_c.y && cc.x < best_c.x)));
        if (take) {
            best = &c;
            best_c = cc;
        }
    }
    if (!best) return std::nullopt;

    LaserSpot spot;
    spot.center = best_c;
    spot.area = best->area;
    spot.mask_pixels = static_cast<std::int64_t>(mask.count());
    return spot;
}

} // namespace glg

#endif // GLG_LASER_DETECT_HPP

#ifndef GLG_SYNTH_SCENE_HPP
#define GLG_SYNTH_SCENE_HPP

#include <cmath>
#include <cstdint>
#include <vector>

#include "glg/guidance.hpp"
#include "glg/image.hpp"

namespace glg {

/// Synthetic downward-looking pinhole scene of the ground, the occluding
/// object corner, and the laser dot.
///
/// Camera frame: optical axis perpendicular to the ground, image x along the
/// object face, image y along the face normal. The attached face sits at
/// lateral offset camera_axis_offset from the optical axis and shows up as
/// the horizontal edge; the vertical corner edge projects to the diagonal
/// line through the principal point. The laser ray runs parallel to the
/// optical axis at the 17 mm camera-laser offset, displaced along the face
/// so its ground dot lies on the face's ground trace.
struct SceneSpec {
    int width = 640;
    int height = 480;
    double focal_px = 500.0;
    double ground_distance_m = 3.0;
    // Descending-edge angle magnitude in degrees, [25, 65]; NaN derives a
    // per-frame value from the seed.
    double edge_theta_deg = std::nan("");
    // Laser disc radius in px, [2, 4]; NaN derives from the seed.
    double disc_radius_px = std::nan("");
    double object_bottom_frac = 0.6; // object bottom depth as a fraction of ground distance
    ModuleGeometry geometry{};

    // Texture levels. The object shade is kept well below the ground level
    // so the occluder edges clear the default Canny strong threshold.
    int ground_level = 235;
    int ground_noise = 10;
    double grid_step_m = 0.5;
    int grid_darken = 18;
    int shade_level = 10;
};

struct SceneError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Exact per-frame ground truth for the rendered scene.
struct GroundTruth {
    Vec2 landing_pixel;   // projection of the object corner onto the ground
    double edge_theta = 0.0; // degrees, normalized to (-90, +90]
    Vec2 laser_pixel;
    double distance_m = 0.0;
    std::uint64_t seed = 0;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

inline double unit_hash(std::uint64_t seed, std::uint64_t salt) {
    return (splitmix64(seed ^ splitmix64(salt)) >> 11) * (1.0 / 9007199254740992.0);
}

inline double pixel_hash(std::uint64_t seed, int x, int y) {
    return unit_hash(seed, (static_cast<std::uint64_t>(static_cast<std::uint32_t>(x)) << 32) |
                               static_cast<std::uint32_t>(y));
}

inline std::uint8_t clamp_u8(double v) {
    return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

} // namespace detail

/// Seed for frame `index` of a sweep starting from `seed`.
inline std::uint64_t derive_seed(std::uint64_t seed, std::size_t index) {
    return detail::splitmix64(seed ^ detail::splitmix64(0x5CEE5EEDull + index));
}

/// Deterministic pinhole render. Returns the frame and its ground truth.
inline std::pair<Image, GroundTruth> render(const SceneSpec& spec, std::uint64_t seed) {
    if (spec.width < 16 || spec.height < 16) throw SceneError("render: frame too small");
    if (spec.focal_px <= 0.0) throw SceneError("render: focal must be > 0");
    if (spec.ground_distance_m <= 0.0) throw SceneError("render: ground distance must be > 0");
    validate(spec.geometry);

    double theta = spec.edge_theta_deg;
    if (std::isnan(theta)) theta = 25.0 + 40.0 * detail::unit_hash(seed, 0xA11CE);
    if (theta < 25.0 || theta > 65.0)
        throw SceneError("render: edge theta must lie in [25, 65] degrees");

    double radius = spec.disc_radius_px;
    if (std::isnan(radius)) radius = 2.0 + 2.0 * detail::unit_hash(seed, 0xD15C);
    if (radius < 1.0 || radius > 16.0) throw SceneError("render: disc radius out of range");

    const double f = spec.focal_px;
    const double zg = spec.ground_distance_m;
    const double zb = spec.object_bottom_frac * zg;
    const double cx = (spec.width - 1) / 2.0;
    const double cy = (spec.height - 1) / 2.0;

    const double face_off = spec.geometry.camera_axis_offset_mm / 1000.0; // m, along image y
    const double laser_off = spec.geometry.laser_lateral_offset_mm() / 1000.0; // m, along image x
    const double corner_x = -face_off / std::tan(theta * M_PI / 180.0);   // m, along image x

    GroundTruth gt;
    gt.landing_pixel = {cx + f * corner_x / zg, cy + f * face_off / zg};
    gt.laser_pixel = {cx + f * laser_off / zg, cy + f * face_off / zg};
    gt.edge_theta = direction_theta_deg(Vec2(corner_x, face_off));
    gt.distance_m = zg;
    gt.seed = seed;

    if (gt.landing_pixel.x < 0 || gt.landing_pixel.x > spec.width - 1 || gt.landing_pixel.y < 0 ||
        gt.landing_pixel.y > spec.height - 1)
        throw SceneError("render: landing pixel falls outside the frame");

    // Image-space occluder boundaries: horizontal edge at v_b (object bottom
    // edge), diagonal edge through the principal point with direction
    // (corner_x, face_off). Both get coverage-based anti-aliasing.
    const double v_b = cy + f * face_off / zb;
    Vec2 diag_dir = normalized(Vec2(corner_x, face_off));
    // Unit normal pointing into the occluder (to the right of the diagonal).
    Vec2 diag_n{-diag_dir.y, diag_dir.x};
    if (diag_n.x < 0) diag_n = {-diag_n.x, -diag_n.y};

    const double grid_px = f * spec.grid_step_m / zg;
    const double grid_phase_x = detail::unit_hash(seed, 0x6121D) * grid_px;
    const double grid_phase_y = detail::unit_hash(seed, 0x6121E) * grid_px;

    Image img = Image::rgb(spec.width, spec.height);
    for (int y = 0; y < spec.height; ++y) {
        for (int x = 0; x < spec.width; ++x) {
            double n = detail::pixel_hash(seed, x, y);
            double ground = spec.ground_level + (2.0 * n - 1.0) * spec.ground_noise;
            double gx = std::fmod(x - grid_phase_x, grid_px);
            double gy = std::fmod(y - grid_phase_y, grid_px);
            if (gx < 0) gx += grid_px;
            if (gy < 0) gy += grid_px;
            if (gx < 1.0 || gy < 1.0) ground -= spec.grid_darken;

            // occluder coverage: product of the two half-plane coverages
            double cov_h = std::clamp(y + 0.5 - v_b, 0.0, 1.0);
            double d = dot(Vec2(x - cx, y - cy), diag_n);
            double cov_d = std::clamp(0.5 + d, 0.0, 1.0);
            double cov = cov_h * cov_d;

            double shade = spec.shade_level + (2.0 * n - 1.0) * (spec.ground_noise / 3.0);
            double val = ground * (1.0 - cov) + shade * cov;
            std::uint8_t g8 = detail::clamp_u8(val);
            img.set_rgb(x, y, g8, g8, g8);
        }
    }

    // Laser disc: saturated core ring with an overexposed, washed-out center.
    const std::uint8_t core[3] = {20, 204, 20};
    const std::uint8_t bright[3] = {204, 255, 204};
    int x0 = std::max(0, static_cast<int>(std::floor(gt.laser_pixel.x - radius - 2)));
    int x1 = std::min(spec.width - 1, static_cast<int>(std::ceil(gt.laser_pixel.x + radius + 2)));
    int y0 = std::max(0, static_cast<int>(std::floor(gt.laser_pixel.y - radius - 2)));
    int y1 = std::min(spec.height - 1, static_cast<int>(std::ceil(gt.laser_pixel.y + radius + 2)));
    for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x) {
            double dist = std::hypot(x - gt.laser_pixel.x, y - gt.laser_pixel.y);
            double cov = std::clamp(radius + 0.5 - dist, 0.0, 1.0);
            if (cov <= 0.0) continue;
            const std::uint8_t* c = dist < 0.45 * radius ? bright : core;
            for (int ch = 0; ch < 3; ++ch) {
                double base = img.at(x, y, ch);
                img.at(x, y, ch) = detail::clamp_u8(base * (1.0 - cov) + c[ch] * cov);
            }
        }

    return {std::move(img), gt};
}

/// One frame per distance; per-frame seeds derive from (seed, index).
inline std::vector<std::pair<Image, GroundTruth>> sweep(const SceneSpec& base,
                                                        const std::vector<double>& distances_m,
                                                        std::uint64_t seed) {
    if (distances_m.empty()) throw SceneError("sweep: empty distance list");
    std::vector<std::pair<Image, GroundTruth>> out;
    out.reserve(distances_m.size());
    for (std::size_t i = 0; i < distances_m.size(); ++i) {
        SceneSpec s = base;
        s.ground_distance_m = distances_m[i];
        out.push_back(render(s, derive_seed(seed, i)));
    }
    return out;
}

} // namespace glg

#endif // GLG_SYNTH_SCENE_HPP

#ifndef GLG_HOUGH_HPP
#define GLG_HOUGH_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "glg/geometry.hpp"
#include "glg/image.hpp"

namespace glg {

/// Finite line segment in subpixel image coordinates. `length` and `theta`
/// are derived from the endpoints; theta is degrees in (-90, +90] with a
/// left-to-right horizontal segment at 0.
struct LineSegment {
    Vec2 p0, p1;
    double length = 0.0;
    double theta = 0.0;

    Vec2 midpoint() const { return {(p0.x + p1.x) / 2.0, (p0.y + p1.y) / 2.0}; }
    Vec2 direction() const { return normalized(p1 - p0); }
};

inline LineSegment make_segment(const Vec2& p0, const Vec2& p1) {
    require(!(p0 == p1), "make_segment: endpoints must differ");
    LineSegment s;
    s.p0 = p0;
    s.p1 = p1;
    s.length = distance(p0, p1);
    s.theta = direction_theta_deg(p1 - p0);
    return s;
}

struct HoughParams {
    double rho_res = 1.0;       // px
    double theta_res = 1.0;     // degrees
    int votes_min = 50;
    double min_len = 30.0;      // px
    double max_gap = 10.0;      // px
};

namespace detail {

// xorshift32; the sequence is fixed so segment extraction is deterministic
// for a given edge map.
struct XorShift32 {
    std::uint32_t state;
    explicit XorShift32(std::uint32_t seed) : state(seed ? seed : 0x9E3779B9u) {}
    std::uint32_t next() {
        std::uint32_t x = state;
        x ^= x << 13;
        x ^= x >> 17;
        x ^= x << 5;
        state = x;
        return x;
    }
    std::uint32_t bounded(std::uint32_t n) { return next() % n; }
};

} // namespace detail

/// Progressive probabilistic Hough transform over a binary edge map.
/// Returns segments supported by >= votes_min accumulator votes whose
/// collinear pixel run, allowing gaps <= max_gap, spans more than min_len.
inline std::vector<LineSegment> hough_segments(const EdgeMap& edges, const HoughParams& p) {
    require(p.rho_res > 0.0 && p.theta_res > 0.0, "hough_segments: resolutions must be > 0");
    require(p.votes_min >= 1, "hough_segments: votes_min must be >= 1");

    const int w = edges.width, h = edges.height;
    const int n_theta = std::max(1, static_cast<int>(std::lround(180.0 / p.theta_res)));
    const int half_rho = static_cast<int>(std::ceil((w + h) / p.rho_res));
    const int n_rho = 2 * half_rho + 1;

    std::vector<double> tsin(n_theta), tcos(n_theta);
    for (int k = 0; k < n_theta; ++k) {
        double t = (k * p.theta_res) * M_PI / 180.0;
        tcos[k] = std::cos(t) / p.rho_res;
        tsin[k] = std::sin(t) / p.rho_res;
    }

    std::vector<int> accum(static_cast<std::size_t>(n_theta) * n_rho, 0);
    auto rho_bin = [&](int x, int y, int k) {
        return static_cast<int>(std::lround(x * tcos[k] + y * tsin[k])) + half_rho;
    };

    std::vector<std::pair<int, int>> points;
    points.reserve(edges.count());
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (edges.get(x, y)) points.emplace_back(x, y);

    std::vector<std::uint8_t> mask = edges.bits;
    auto mask_at = [&](int x, int y) -> std::uint8_t& {
        return mask[static_cast<std::size_t>(y) * w + x];
    };

    detail::XorShift32 rng(0x9E3779B9u ^ (static_cast<std::uint32_t>(w) * 2654435761u) ^
                           static_cast<std::uint32_t>(h));

    std::vector<LineSegment> out;
    std::size_t remaining = points.size();
    while (remaining > 0) {
        std::uint32_t idx = rng.bounded(static_cast<std::uint32_t>(remaining));
        auto [px, py] = points[idx];
        points[idx] = points[--remaining];
        if (!mask_at(px, py)) continue;

        // Vote this point into every theta bin; remember the strongest bin.
        int best_k = 0, best_votes = -1;
        for (int k = 0; k < n_theta; ++k) {
            int r = rho_bin(px, py, k);
            int v = ++accum[static_cast<std::size_t>(k) * n_rho + r];
            if (v > best_votes) {
                best_votes = v;
                best_k = k;
            }
        }
        if (best_votes < p.votes_min) continue;

        // Walk the supporting run in both directions along the line.
        double theta_rad = (best_k * p.theta_res) * M_PI / 180.0;
        double dirx = -std::sin(theta_rad), diry = std::cos(theta_rad);
        // Step along the dominant axis one pixel at a time.
        double ax = std::abs(dirx), ay = std::abs(diry);
        double sx = dirx / std::max(ax, ay), sy = diry / std::max(ax, ay);

        int endx[2] = {px, px}, endy[2] = {py, py};
        for (int sign = 0; sign < 2; ++sign) {
            double fx = px, fy = py;
            double stepx = sign ? -sx : sx, stepy = sign ? -sy : sy;
            int gap = 0;
            while (true) {
                fx += stepx;
                fy += stepy;
                int xi = static_cast<int>(std::lround(fx));
                int yi = static_cast<int>(std::lround(fy));
                if (xi < 0 || xi >= w || yi < 0 || yi >= h) break;
                if (mask_at(xi, yi)) {
                    gap = 0;
                    endx[sign] = xi;
                    endy[sign] = yi;
                } else if (++gap > static_cast<int>(p.max_gap)) {
                    break;
                }
            }
        }

        double run_len = std::hypot(static_cast<double>(endx[0] - endx[1]),
                                    static_cast<double>(endy[0] - endy[1]));
        bool good = run_len > p.min_len;

        // Consume the run between the recorded ends: clear mask and, for
        // accepted segments, unvote. The walk repeats the discovery
        // arithmetic exactly, so it stops at the recorded endpoints.
        for (int sign = 0; sign < 2; ++sign) {
            double fx = px, fy = py;
            double stepx = sign ? -sx : sx, stepy = sign ? -sy : sy;
            int xi = px, yi = py;
            while (true) {
                if (xi < 0 || xi >= w || yi < 0 || yi >= h) break;
                if (mask_at(xi, yi)) {
                    if (good) {
                        for (int k = 0; k < n_theta; ++k)
                            --accum[static_cast<std::size_t>(k) * n_rho + rho_bin(xi, yi, k)];
                    }
                    mask_at(xi, yi) = 0;
                }
                if (xi == endx[sign] && yi == endy[sign]) break;
                fx += stepx;
                fy += stepy;
                xi = static_cast<int>(std::lround(fx));
                yi = static_cast<int>(std::lround(fy));
            }
        }

        if (good)
            out.push_back(make_segment(Vec2(endx[1], endy[1]), Vec2(endx[0], endy[0])));
    }
    return out;
}

} // namespace glg

#endif // GLG_HOUGH_HPP

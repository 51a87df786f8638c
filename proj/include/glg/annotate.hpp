#ifndef GLG_ANNOTATE_HPP
#define GLG_ANNOTATE_HPP

#include <cmath>
#include <cstdint>

#include "glg/guidance.hpp"

namespace glg {

struct Rgb {
    std::uint8_t r, g, b;
};

/// Overlay colors and marker sizes, fixed so golden renders stay stable.
struct AnnotateStyle {
    Rgb diagonal{0, 0, 0};
    Rgb horizontal{255, 0, 0};
    Rgb laser{0, 255, 0};
    Rgb corner{0, 0, 255};
    Rgb guidance{0, 0, 255};
    int cross_arm = 5;        // laser cross arm length, px
    int corner_r_inner = 4;   // double circle radii, px
    int corner_r_outer = 7;
    int dash_on = 8;          // guidance dash pattern, px
    int dash_off = 8;
};

namespace draw {

inline void plot(Image& img, int x, int y, Rgb c) {
    if (!img.in_bounds(x, y)) return;
    img.set_rgb(x, y, c.r, c.g, c.b);
}

/// Bresenham line; when `dash_on` > 0, draws dash_on pixels then skips
/// dash_off pixels, counting along the traversal.
inline void line(Image& img, Vec2 a, Vec2 b, Rgb c, int dash_on = 0, int dash_off = 0) {
    int x0 = static_cast<int>(std::lround(a.x)), y0 = static_cast<int>(std::lround(a.y));
    int x1 = static_cast<int>(std::lround(b.x)), y1 = static_cast<int>(std::lround(b.y));
    int dx = std::abs(x1 - x0), dy = -std::abs(y1 - y0);
    int sx = x0 < x1 ? 1 : -1, sy = y0 < y1 ? 1 : -1;
    int err = dx + dy;
    int period = dash_on > 0 ? dash_on + dash_off : 0;
    long step = 0;
    for (;;) {
        bool on = period == 0 || (step % period) < dash_on;
        if (on) plot(img, x0, y0, c);
        ++step;
        if (x0 == x1 && y0 == y1) break;
        int e2 = 2 * err;
        if (e2 >= dy) {
            err += dy;
            x0 += sx;
        }
        if (e2 <= dx) {
            err += dx;
            y0 += sy;
        }
    }
}

inline void cross(Image& img, Vec2 p, int arm, Rgb c) {
    int cx = static_cast<int>(std::lround(p.x)), cy = static_cast<int>(std::lround(p.y));
    for (int i = -arm; i <= arm; ++i) {
        plot(img, cx + i, cy, c);
        plot(img, cx, cy + i, c);
    }
}

/// 1-px midpoint circle.
inline void circle(Image& img, Vec2 p, int radius, Rgb c) {
    int cx = static_cast<int>(std::lround(p.x)), cy = static_cast<int>(std::lround(p.y));
    int x = radius, y = 0, err = 1 - radius;
    while (x >= y) {
        plot(img, cx + x, cy + y, c);
        plot(img, cx + y, cy + x, c);
        plot(img, cx - y, cy + x, c);
        plot(img, cx - x, cy + y, c);
        plot(img, cx - x, cy - y, c);
        plot(img, cx - y, cy - x, c);
        plot(img, cx + y, cy - x, c);
        plot(img, cx + x, cy - y, c);
        ++y;
        if (err < 0) {
            err += 2 * y + 1;
        } else {
            --x;
            err += 2 * (y - x) + 1;
        }
    }
}

} // namespace draw

/// Draw the guidance overlay onto a copy of the frame: diagonal extension
/// (black), horizontal representative (red), laser cross (green), corner
/// double circle (blue), dashed guidance line (blue). Absent primitives are
/// simply not drawn; an Empty result returns the input unchanged.
inline Image annotate(const Image& img, const GuidanceResult& r, const AnnotateStyle& style = {}) {
    require(img.channels == Channels::Rgb8, "annotate: input must be Rgb8");
    Image out = img;

    if (r.selection.diagonal && r.selection.diagonal->has_clip)
        draw::line(out, r.selection.diagonal->clipped[0], r.selection.diagonal->clipped[1],
                   style.diagonal);
    if (r.selection.horizontal && r.selection.horizontal->has_clip)
        draw::line(out, r.selection.horizontal->clipped[0], r.selection.horizontal->clipped[1],
                   style.horizontal);
    if (r.guidance_line && r.guidance_line->has_clip)
        draw::line(out, r.guidance_line->clipped[0], r.guidance_line->clipped[1], style.guidance,
                   style.dash_on, style.dash_off);
    if (r.laser) draw::cross(out, r.laser->center, style.cross_arm, style.laser);
    if (r.corner) {
        draw::circle(out, *r.corner, style.corner_r_inner, style.corner);
        draw::circle(out, *r.corner, style.corner_r_outer, style.corner);
    }
    return out;
}

} // namespace glg

#endif // GLG_ANNOTATE_HPP

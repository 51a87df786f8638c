#ifndef GLG_GEOMETRY_HPP
#define GLG_GEOMETRY_HPP

#include <cmath>
#include <optional>
#include <utility>

namespace glg {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double k) const { return {x * k, y * k}; }
    bool operator==(const Vec2& o) const { return x == o.x && y == o.y; }
};

inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Vec2& a) { return std::hypot(a.x, a.y); }
inline Vec2 normalized(const Vec2& a) {
    double n = norm(a);
    return {a.x / n, a.y / n};
}
inline double distance(const Vec2& a, const Vec2& b) { return norm(a - b); }

/// Segment angle in degrees, normalized to (-90, +90]. Image coordinates
/// (x right, y down); a left-to-right horizontal segment has theta = 0.
inline double normalize_theta_deg(double deg) {
    while (deg > 90.0) deg -= 180.0;
    while (deg <= -90.0) deg += 180.0;
    return deg;
}

inline double direction_theta_deg(const Vec2& d) {
    return normalize_theta_deg(std::atan2(d.y, d.x) * 180.0 / M_PI);
}

/// Unit direction for a theta in degrees.
inline Vec2 theta_direction(double theta_deg) {
    double r = theta_deg * M_PI / 180.0;
    return {std::cos(r), std::sin(r)};
}

/// Acute angle between two directions, in degrees [0, 90].
inline double angle_between_deg(const Vec2& a, const Vec2& b) {
    double c = std::abs(cross(normalized(a), normalized(b)));
    double d = std::abs(dot(normalized(a), normalized(b)));
    return std::atan2(std::min(c, 1.0), std::min(d, 1.0)) * 180.0 / M_PI;
}

/// Infinite 2D line with a point, a unit direction, and (when clipped) the
/// two intersection points with the image rectangle.
struct InfiniteLine {
    Vec2 point;
    Vec2 direction;       // unit
    Vec2 clipped[2]{};    // endpoints on the image rectangle boundary
    bool has_clip = false;
};

inline InfiniteLine make_line(const Vec2& p, const Vec2& dir) {
    InfiniteLine l;
    l.point = p;
    l.direction = normalized(dir);
    return l;
}

inline double point_line_distance(const Vec2& p, const InfiniteLine& l) {
    return std::abs(cross(l.direction, p - l.point));
}

// Degenerate below 1 degree between directions: the intersection position is
// numerically meaningless at image scale.
inline constexpr double kMinIntersectSinAngle = 0.017452406437283512; // sin(1 deg)

/// Unique intersection point of two infinite lines, or nullopt when the
/// directions are within 1 degree of parallel.
inline std::optional<Vec2> intersect(const InfiniteLine& a, const InfiniteLine& b) {
    double denom = cross(a.direction, b.direction);
    if (std::abs(denom) < kMinIntersectSinAngle) return std::nullopt;
    double t = cross(b.point - a.point, b.direction) / denom;
    return a.point + a.direction * t;
}

/// Clip an infinite line to the rectangle [0,w-1] x [0,h-1]. Returns the two
/// boundary points ordered along the direction, or nullopt when the line
/// misses the rectangle.
inline std::optional<std::pair<Vec2, Vec2>> clip_line_to_rect(const Vec2& p, const Vec2& dir,
                                                              int width, int height) {
    const double x0 = 0.0, y0 = 0.0;
    const double x1 = width - 1.0, y1 = height - 1.0;
    double tmin = -1e300, tmax = 1e300;

    auto slab = [&](double d, double lo, double hi, double origin) -> bool {
        if (std::abs(d) < 1e-300) return origin >= lo && origin <= hi;
        double ta = (lo - origin) / d;
        double tb = (hi - origin) / d;
        if (ta > tb) std::swap(ta, tb);
        tmin = std::max(tmin, ta);
        tmax = std::min(tmax, tb);
        return true;
    };

    if (!slab(dir.x, x0, x1, p.x)) return std::nullopt;
    if (!slab(dir.y, y0, y1, p.y)) return std::nullopt;
    if (tmin > tmax) return std::nullopt;
    return std::make_pair(p + dir * tmin, p + dir * tmax);
}

/// Build a clipped InfiniteLine through p with the given direction; nullopt
/// when the line does not cross the image rectangle.
inline std::optional<InfiniteLine> make_clipped_line(const Vec2& p, const Vec2& dir,
                                                     int width, int height) {
    InfiniteLine l = make_line(p, dir);
    auto c = clip_line_to_rect(l.point, l.direction, width, height);
    if (!c) return std::nullopt;
    l.clipped[0] = c->first;
    l.clipped[1] = c->second;
    l.has_clip = true;
    return l;
}

} // namespace glg

#endif // GLG_GEOMETRY_HPP

#ifndef GLG_GUIDANCE_HPP
#define GLG_GUIDANCE_HPP

#include <optional>
#include <sstream>
#include <string>

#include "glg/laser_detect.hpp"
#include "glg/line_detect.hpp"

namespace glg {

/// Camera-module standoffs from the object face, in millimeters. The 2D
/// guidance construction itself is purely image-space; these feed the
/// synthetic scene and the error budget.
struct ModuleGeometry {
    double body_w_mm = 50.0;
    double body_d_mm = 150.0;
    double body_h_mm = 127.0;
    double suction_tip_offset_mm = 7.8;
    double laser_axis_offset_mm = 19.8;
    double camera_axis_offset_mm = 36.8;

    double laser_lateral_offset_mm() const { return camera_axis_offset_mm - laser_axis_offset_mm; }
};

inline void validate(const ModuleGeometry& g) {
    require(g.suction_tip_offset_mm > 0.0 && g.laser_axis_offset_mm > 0.0 &&
                g.camera_axis_offset_mm > 0.0,
            "ModuleGeometry: offsets must be > 0");
    require(g.suction_tip_offset_mm < g.laser_axis_offset_mm &&
                g.laser_axis_offset_mm < g.camera_axis_offset_mm,
            "ModuleGeometry: offsets must increase suction < laser < camera");
}

enum class GuidanceStatus { Full, NoLaser, NoDiagonal, NoHorizontal, Degenerate, Empty };

inline const char* status_name(GuidanceStatus s) {
    switch (s) {
        case GuidanceStatus::Full: return "Full";
        case GuidanceStatus::NoLaser: return "NoLaser";
        case GuidanceStatus::NoDiagonal: return "NoDiagonal";
        case GuidanceStatus::NoHorizontal: return "NoHorizontal";
        case GuidanceStatus::Degenerate: return "Degenerate";
        case GuidanceStatus::Empty: return "Empty";
    }
    return "Empty";
}

/// Everything the overlay and the wire need: selected lines, laser point,
/// predicted landing corner, and the guidance line through it.
struct GuidanceResult {
    LineSelection selection;
    std::optional<LaserSpot> laser;
    std::optional<Vec2> corner;
    std::optional<InfiniteLine> guidance_line;
    GuidanceStatus status = GuidanceStatus::Empty;
};

/// Intersect the extended diagonal with the horizontal-parallel line through
/// the laser point. The corner exists only for a Full result; missing inputs
/// set the corresponding status while keeping every derivable field.
inline GuidanceResult construct_guidance(const LineSelection& selection,
                                         const std::optional<LaserSpot>& laser,
                                         int width, int height) {
    GuidanceResult r;
    r.selection = selection;
    r.laser = laser;

    bool has_h = selection.horizontal.has_value();
    bool has_d = selection.diagonal.has_value();
    bool has_l = laser.has_value();

    if (!has_h && !has_d && !has_l) {
        r.status = GuidanceStatus::Empty;
        return r;
    }
    if (!has_d) {
        r.status = GuidanceStatus::NoDiagonal;
        return r;
    }
    if (!has_h) {
        r.status = GuidanceStatus::NoHorizontal;
        return r;
    }
    if (!has_l) {
        r.status = GuidanceStatus::NoLaser;
        return r;
    }

    InfiniteLine laser_line = make_line(laser->center, selection.horizontal->direction);
    auto corner = intersect(*selection.diagonal, laser_line);
    if (!corner) {
        r.status = GuidanceStatus::Degenerate;
        return r;
    }
    r.corner = corner;
    // Clipped to the image; the corner itself may fall outside the frame, in
    // which case only the visible portion of the guidance line is drawn.
    r.guidance_line = make_clipped_line(*corner, selection.horizontal->direction, width, height);
    r.status = GuidanceStatus::Full;
    return r;
}

/// Single-line JSON guidance report; absent fields are null.
inline std::string report_json(const GuidanceResult& r) {
    std::ostringstream os;
    os.precision(10);
    auto point = [&](const std::optional<Vec2>& p) {
        if (!p) {
            os << "null";
            return;
        }
        os << "[" << p->x << "," << p->y << "]";
    };
    auto line = [&](const std::optional<InfiniteLine>& l) {
        if (!l || !l->has_clip) {
            os << "null";
            return;
        }
        os << "[[" << l->clipped[0].x << "," << l->clipped[0].y << "],[" << l->clipped[1].x << ","
           << l->clipped[1].y << "]]";
    };
    os << "{\"status\":\"" << status_name(r.status) << "\",\"corner\":";
    point(r.corner);
    os << ",\"laser\":";
    point(r.laser ? std::optional<Vec2>(r.laser->center) : std::nullopt);
    os << ",\"horiz\":";
    line(r.selection.horizontal);
    os << ",\"diag\":";
    line(r.selection.diagonal);
    os << "}";
    return os.str();
}

} // namespace glg

#endif // GLG_GUIDANCE_HPP

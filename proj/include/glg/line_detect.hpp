#ifndef GLG_LINE_DETECT_HPP
#define GLG_LINE_DETECT_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "glg/hough.hpp"
#include "glg/imgproc.hpp"

namespace glg {

enum class Border { Left, Right, Top, Bottom };

enum class Band { Horizontal, Diagonal };

/// Candidate banding and scoring parameters. Horizontal candidates satisfy
/// |theta| <= theta_horiz_max; diagonal candidates satisfy
/// theta_diag_lo < |theta| < theta_diag_hi.
struct LineParams {
    double theta_horiz_max = 10.0;
    double theta_diag_lo = 20.0;
    double theta_diag_hi = 70.0;
    double alpha_length = 0.5;
    double beta_angle = 0.3;
    double gamma_position = 0.2;
    Border horiz_border = Border::Bottom; // module side the horizontal edge hugs
    Border diag_border = Border::Left;    // module side the corner sits on
};

inline void validate(const LineParams& p) {
    require(p.theta_horiz_max > 0.0 && p.theta_horiz_max < p.theta_diag_lo &&
                p.theta_diag_lo < p.theta_diag_hi && p.theta_diag_hi < 90.0,
            "LineParams: need 0 < theta_horiz_max < theta_diag_lo < theta_diag_hi < 90");
    require(p.alpha_length >= 0.0 && p.beta_angle >= 0.0 && p.gamma_position >= 0.0,
            "LineParams: weights must be nonnegative");
    require(std::abs(p.alpha_length + p.beta_angle + p.gamma_position - 1.0) <= 1e-9,
            "LineParams: weights must sum to 1");
}

/// Selected representatives extended to the image boundary. Counts record
/// how many candidates each band held before selection.
struct LineSelection {
    std::optional<InfiniteLine> horizontal;
    std::optional<InfiniteLine> diagonal;
    std::optional<LineSegment> horizontal_source;
    std::optional<LineSegment> diagonal_source;
    int candidates_h = 0;
    int candidates_d = 0;
};

/// Split segments into horizontal and diagonal candidate sets; segments in
/// neither band are dropped. The bands are disjoint for any valid params.
inline std::pair<std::vector<LineSegment>, std::vector<LineSegment>>
classify(const std::vector<LineSegment>& segments, const LineParams& p) {
    validate(p);
    std::vector<LineSegment> H, D;
    for (const auto& s : segments) {
        double a = std::abs(s.theta);
        if (a <= p.theta_horiz_max)
            H.push_back(s);
        else if (a > p.theta_diag_lo && a < p.theta_diag_hi)
            D.push_back(s);
    }
    return {H, D};
}

namespace detail {

inline double band_center(Band band, const LineParams& p) {
    return band == Band::Horizontal ? 0.0 : (p.theta_diag_lo + p.theta_diag_hi) / 2.0;
}

inline double band_halfwidth(Band band, const LineParams& p) {
    return band == Band::Horizontal ? p.theta_horiz_max : (p.theta_diag_hi - p.theta_diag_lo) / 2.0;
}

inline double angle_conformity(const LineSegment& s, Band band, const LineParams& p) {
    double dev = std::abs(std::abs(s.theta) - band_center(band, p)) / band_halfwidth(band, p);
    return std::clamp(1.0 - dev, 0.0, 1.0);
}

inline double position_prior(const LineSegment& s, Border border, int width, int height) {
    Vec2 m = s.midpoint();
    double u = width > 1 ? std::clamp(m.x / (width - 1.0), 0.0, 1.0) : 0.0;
    double v = height > 1 ? std::clamp(m.y / (height - 1.0), 0.0, 1.0) : 0.0;
    switch (border) {
        case Border::Left: return 1.0 - u;
        case Border::Right: return u;
        case Border::Top: return 1.0 - v;
        case Border::Bottom: return v;
    }
    return 0.0;
}

} // namespace detail

/// Weighted candidate score in [0,1]: normalized length, angle conformity
/// to the band center, and closeness of the midpoint to the module-side
/// image border.
inline double score(const LineSegment& s, Band band, int width, int height, const LineParams& p) {
    double diag = std::hypot(static_cast<double>(width), static_cast<double>(height));
    double len_term = std::clamp(s.length / diag, 0.0, 1.0);
    double ang_term = detail::angle_conformity(s, band, p);
    Border border = band == Band::Horizontal ? p.horiz_border : p.diag_border;
    double pos_term = detail::position_prior(s, border, width, height);
    return p.alpha_length * len_term + p.beta_angle * ang_term + p.gamma_position * pos_term;
}

/// Argmax of score. Ties break toward greater length, then smaller angle
/// deviation from the band center, then lexicographically smaller midpoint,
/// so selection is independent of candidate order.
inline std::optional<LineSegment> select_representative(const std::vector<LineSegment>& candidates,
                                                        Band band, int width, int height,
                                                        const LineParams& p) {
    if (candidates.empty()) return std::nullopt;
    const LineSegment* best = nullptr;
    double best_score = -1.0;
    auto better = [&](const LineSegment& s, double sc) {
        if (!best) return true;
        if (sc != best_score) return sc > best_score;
        if (s.length != best->length) return s.length > best->length;
        double da = std::abs(std::abs(s.theta) - detail::band_center(band, p));
        double db = std::abs(std::abs(best->theta) - detail::band_center(band, p));
        if (da != db) return da < db;
        Vec2 ma = s.midpoint(), mb = best->midpoint();
        if (ma.x != mb.x) return ma.x < mb.x;
        return ma.y < mb.y;
    };
    for (const auto& s : candidates) {
        double sc = score(s, band, width, height, p);
        if (better(s, sc)) {
            best = &s;
            best_score = sc;
        }
    }
    return *best;
}

/// Verify the pair and extend to the image boundary. A full selection needs
/// both representatives, an intersection inside the image rectangle expanded
/// by 50% per side, and >= 10 degrees between the two lines; otherwise the
/// diagonal is rejected and the horizontal carried alone. Absent inputs
/// simply propagate.
inline LineSelection validate_and_extend(const std::optional<LineSegment>& h,
                                         const std::optional<LineSegment>& d,
                                         int width, int height, const LineParams& p) {
    validate(p);
    LineSelection sel;

    auto extend = [&](const LineSegment& s) {
        return make_clipped_line(s.p0, s.direction(), width, height);
    };

    std::optional<InfiniteLine> hl = h ? extend(*h) : std::nullopt;
    std::optional<InfiniteLine> dl = d ? extend(*d) : std::nullopt;

    if (hl && dl) {
        bool ok = angle_between_deg(hl->direction, dl->direction) >= 10.0;
        if (ok) {
            auto x = intersect(*hl, *dl);
            ok = x.has_value() && x->x >= -0.5 * width && x->x <= 1.5 * width &&
                 x->y >= -0.5 * height && x->y <= 1.5 * height;
        }
        if (!ok) dl.reset(); // keep the horizontal, drop the ill-conditioned diagonal
    }

    if (hl) {
        sel.horizontal = hl;
        sel.horizontal_source = h;
    }
    if (dl) {
        sel.diagonal = dl;
        sel.diagonal_source = d;
    }
    return sel;
}

/// End-to-end detection parameters for Algorithm 1's pipeline stages.
struct DetectParams {
    double blur_sigma = 0.8;
    int blur_ksize = 3;
    double canny_low = 50.0;
    double canny_high = 150.0;
    HoughParams hough;
    LineParams line;
};

/// Algorithm 1: grayscale -> blur -> Canny -> Hough -> classify ->
/// score/select per band -> validity check and extension.
inline LineSelection detect_lines(const Image& img, const DetectParams& p) {
    Image gray = to_grayscale(img);
    Image blurred = gaussian_blur(gray, p.blur_sigma, p.blur_ksize);
    EdgeMap edges = canny(blurred, p.canny_low, p.canny_high);
    std::vector<LineSegment> segments = hough_segments(edges, p.hough);
    auto [H, D] = classify(segments, p.line);
    auto h = select_representative(H, Band::Horizontal, img.width, img.height, p.line);
    auto d = select_representative(D, Band::Diagonal, img.width, img.height, p.line);
    LineSelection sel = validate_and_extend(h, d, img.width, img.height, p.line);
    sel.candidates_h = static_cast<int>(H.size());
    sel.candidates_d = static_cast<int>(D.size());
    return sel;
}

} // namespace glg

#endif // GLG_LINE_DETECT_HPP

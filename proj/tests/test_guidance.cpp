#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "glg/annotate.hpp"
#include "glg/guidance.hpp"
#include "oracles.hpp"

using namespace glg;

namespace {

LineSelection make_selection(std::optional<double> h_theta, std::optional<double> d_theta,
                             Vec2 through, int w = 640, int h = 480) {
    LineSelection sel;
    if (h_theta) {
        sel.horizontal = make_clipped_line(through, theta_direction(*h_theta), w, h);
        sel.horizontal_source = make_segment(through - theta_direction(*h_theta) * 50.0,
                                             through + theta_direction(*h_theta) * 50.0);
    }
    if (d_theta) {
        sel.diagonal = make_clipped_line(through, theta_direction(*d_theta), w, h);
        sel.diagonal_source = make_segment(through - theta_direction(*d_theta) * 50.0,
                                           through + theta_direction(*d_theta) * 50.0);
    }
    return sel;
}

LaserSpot spot_at(double x, double y) {
    LaserSpot s;
    s.center = {x, y};
    s.area = 20;
    s.mask_pixels = 20;
    return s;
}

} // namespace

TEST_CASE("construct_guidance intersects y=x with the laser horizontal") {
    // diagonal through (0,0) at 45 degrees, horizontal direction (1,0),
    // laser at (100,300): corner must be (300,300)
    LineSelection sel;
    sel.diagonal = make_clipped_line({0, 0}, {1, 1}, 640, 480);
    sel.horizontal = make_clipped_line({0, 300}, {1, 0}, 640, 480);
    REQUIRE(sel.diagonal.has_value());
    REQUIRE(sel.horizontal.has_value());
    GuidanceResult r = construct_guidance(sel, spot_at(100, 300), 640, 480);
    CHECK(r.status == GuidanceStatus::Full);
    REQUIRE(r.corner.has_value());
    CHECK(r.corner->x == doctest::Approx(300.0));
    CHECK(r.corner->y == doctest::Approx(300.0));
    REQUIRE(r.guidance_line.has_value());
    CHECK(std::abs(r.guidance_line->direction.y) <= 1e-12);
}

TEST_CASE("construct_guidance status ladder") {
    LineSelection both = make_selection(0.0, 45.0, {320, 240});
    LineSelection no_d = make_selection(0.0, std::nullopt, {320, 240});
    LineSelection no_h = make_selection(std::nullopt, 45.0, {320, 240});
    LineSelection none = make_selection(std::nullopt, std::nullopt, {320, 240});

    CHECK(construct_guidance(both, spot_at(10, 10), 640, 480).status == GuidanceStatus::Full);
    CHECK(construct_guidance(both, std::nullopt, 640, 480).status == GuidanceStatus::NoLaser);
    CHECK(construct_guidance(no_d, spot_at(10, 10), 640, 480).status == GuidanceStatus::NoDiagonal);
    CHECK(construct_guidance(no_h, spot_at(10, 10), 640, 480).status ==
          GuidanceStatus::NoHorizontal);
    CHECK(construct_guidance(none, std::nullopt, 640, 480).status == GuidanceStatus::Empty);
    // laser alone is a detection, not an empty frame
    CHECK(construct_guidance(none, spot_at(10, 10), 640, 480).status ==
          GuidanceStatus::NoDiagonal);

    // NoLaser still reports both lines
    GuidanceResult r = construct_guidance(both, std::nullopt, 640, 480);
    CHECK(r.selection.horizontal.has_value());
    CHECK(r.selection.diagonal.has_value());
    CHECK(!r.corner.has_value());
    CHECK(!r.guidance_line.has_value());
}

TEST_CASE("corner exists exactly when status is Full") {
    oracle::Rng rng(15);
    for (int trial = 0; trial < 100; ++trial) {
        bool has_h = rng.unit() < 0.7, has_d = rng.unit() < 0.7, has_l = rng.unit() < 0.7;
        LineSelection sel = make_selection(
            has_h ? std::optional<double>(rng.unit() * 16.0 - 8.0) : std::nullopt,
            has_d ? std::optional<double>(25.0 + rng.unit() * 40.0) : std::nullopt,
            {100.0 + rng.unit() * 400.0, 100.0 + rng.unit() * 280.0});
        auto laser = has_l ? std::optional<LaserSpot>(spot_at(rng.unit() * 640.0, rng.unit() * 480.0))
                           : std::nullopt;
        GuidanceResult r = construct_guidance(sel, laser, 640, 480);
        CHECK(r.corner.has_value() == (r.status == GuidanceStatus::Full));
        if (r.corner) {
            CHECK(point_line_distance(*r.corner, *sel.diagonal) <= 0.5);
            InfiniteLine laser_line = make_line(laser->center, sel.horizontal->direction);
            CHECK(point_line_distance(*r.corner, laser_line) <= 0.5);
        }
    }
}

TEST_CASE("near-parallel diagonal and laser-horizontal degenerate") {
    LineSelection sel = make_selection(0.0, std::nullopt, {320, 240});
    // hand-build a "diagonal" almost parallel to the horizontal
    sel.diagonal = make_clipped_line({320, 250}, theta_direction(0.5), 640, 480);
    sel.diagonal_source = make_segment({300, 250}, {340, 250.3});
    GuidanceResult r = construct_guidance(sel, spot_at(100, 300), 640, 480);
    CHECK(r.status == GuidanceStatus::Degenerate);
    CHECK(!r.corner.has_value());
}

TEST_CASE("construct_guidance is deterministic for equal inputs") {
    LineSelection sel = make_selection(2.0, 40.0, {300, 250});
    auto laser = spot_at(401.5, 322.25);
    GuidanceResult a = construct_guidance(sel, laser, 640, 480);
    GuidanceResult b = construct_guidance(sel, laser, 640, 480);
    REQUIRE(a.corner.has_value());
    REQUIRE(b.corner.has_value());
    CHECK(a.corner->x == b.corner->x);
    CHECK(a.corner->y == b.corner->y);
    CHECK(a.status == b.status);
}

TEST_CASE("sliding the laser along the horizontal leaves the corner bit-identical") {
    oracle::Rng rng(61);
    // horizontal direction exactly (1,0): translation along it cancels exactly
    LineSelection sel = make_selection(0.0, std::nullopt, {320, 240});
    sel.diagonal = make_clipped_line({57.5, 10.25}, theta_direction(38.0), 640, 480);
    sel.diagonal_source = make_segment({57.5, 10.25}, Vec2{57.5, 10.25} + theta_direction(38.0) * 60.0);
    for (int trial = 0; trial < 100; ++trial) {
        Vec2 base{rng.unit() * 600.0, rng.unit() * 460.0};
        double shift = (rng.unit() - 0.5) * 1000.0;
        GuidanceResult a = construct_guidance(sel, spot_at(base.x, base.y), 640, 480);
        GuidanceResult b = construct_guidance(sel, spot_at(base.x + shift, base.y), 640, 480);
        REQUIRE(a.corner.has_value());
        REQUIRE(b.corner.has_value());
        CHECK(a.corner->x == b.corner->x);
        CHECK(a.corner->y == b.corner->y);
    }
}

TEST_CASE("report_json shape for full and partial results") {
    LineSelection sel = make_selection(0.0, 45.0, {320, 240});
    GuidanceResult full = construct_guidance(sel, spot_at(100, 300), 640, 480);
    std::string s = report_json(full);
    CHECK(s.find("\"status\":\"Full\"") != std::string::npos);
    CHECK(s.find("\"corner\":[") != std::string::npos);
    CHECK(s.find("\"laser\":[") != std::string::npos);
    CHECK(s.find('\n') == std::string::npos); // single line

    GuidanceResult empty = construct_guidance(LineSelection{}, std::nullopt, 640, 480);
    s = report_json(empty);
    CHECK(s.find("\"status\":\"Empty\"") != std::string::npos);
    CHECK(s.find("\"corner\":null") != std::string::npos);
    CHECK(s.find("\"horiz\":null") != std::string::npos);
    CHECK(s.find("\"diag\":null") != std::string::npos);
}

TEST_CASE("annotate leaves an Empty result untouched") {
    Image img = Image::rgb(120, 90, 200);
    GuidanceResult r;
    r.status = GuidanceStatus::Empty;
    CHECK(annotate(img, r) == img);
}

TEST_CASE("annotate draws the five primitives of a full result") {
    Image img = Image::rgb(640, 480, 255);
    LineSelection sel;
    sel.diagonal = make_clipped_line({0, 0}, {1, 1}, 640, 480);
    sel.horizontal = make_clipped_line({0, 300}, {1, 0}, 640, 480);
    // laser off the horizontal so the guidance line gets its own row (y=350)
    GuidanceResult r = construct_guidance(sel, spot_at(100, 350), 640, 480);
    REQUIRE(r.status == GuidanceStatus::Full);
    REQUIRE(r.corner.has_value());
    CHECK(r.corner->x == doctest::Approx(350.0));
    CHECK(r.corner->y == doctest::Approx(350.0));
    Image out = annotate(img, r);

    // diagonal black on y=x
    CHECK(out.at(50, 50, 0) == 0);
    CHECK(out.at(50, 50, 1) == 0);
    CHECK(out.at(50, 50, 2) == 0);
    // horizontal red on y=300
    CHECK(out.at(20, 300, 0) == 255);
    CHECK(out.at(20, 300, 1) == 0);
    CHECK(out.at(20, 300, 2) == 0);
    // laser cross green at (100,350): the vertical arm escapes the dash row
    CHECK(out.at(100, 348, 1) == 255);
    CHECK(out.at(100, 348, 0) == 0);
    // corner double circle blue around (350,350)
    CHECK(out.at(350 + 7, 350, 2) == 255);
    CHECK(out.at(350 + 7, 350, 0) == 0);
    CHECK(out.at(350 + 4, 350, 2) == 255);
    // guidance dashes: 8-on/8-off along y=350; some blue must appear between
    // the markers
    bool any_blue_dash = false;
    for (int x = 380; x < 420; ++x)
        if (out.at(x, 350, 2) == 255 && out.at(x, 350, 0) == 0) any_blue_dash = true;
    CHECK(any_blue_dash);
    // and the off-phase must leave background gaps on the same row
    bool any_gap = false;
    for (int x = 380; x < 420; ++x)
        if (out.at(x, 350, 0) == 255 && out.at(x, 350, 2) == 255) any_gap = true;
    CHECK(any_gap);
}

TEST_CASE("annotate never touches pixels far from any primitive") {
    Image img = Image::rgb(640, 480, 137);
    LineSelection sel;
    sel.diagonal = make_clipped_line({0, 0}, {1, 1}, 640, 480);
    sel.horizontal = make_clipped_line({0, 300}, {1, 0}, 640, 480);
    GuidanceResult r = construct_guidance(sel, spot_at(100, 300), 640, 480);
    Image out = annotate(img, r);

    auto near_line = [](Vec2 p, Vec2 a, Vec2 b, double band) {
        Vec2 d = normalized(b - a);
        double t = dot(p - a, d);
        t = std::clamp(t, 0.0, distance(a, b));
        return distance(a + d * t, p) <= band;
    };
    int changed_far = 0;
    for (int y = 0; y < 480; y += 3)
        for (int x = 0; x < 640; x += 3) {
            Vec2 p{static_cast<double>(x), static_cast<double>(y)};
            bool near = near_line(p, r.selection.diagonal->clipped[0],
                                  r.selection.diagonal->clipped[1], 9.0) ||
                        near_line(p, r.selection.horizontal->clipped[0],
                                  r.selection.horizontal->clipped[1], 9.0) ||
                        near_line(p, r.guidance_line->clipped[0], r.guidance_line->clipped[1], 9.0) ||
                        distance(p, r.laser->center) <= 9.0 || distance(p, *r.corner) <= 9.0;
            bool same = out.at(x, y, 0) == 137 && out.at(x, y, 1) == 137 && out.at(x, y, 2) == 137;
            if (!near && !same) ++changed_far;
        }
    CHECK(changed_far == 0);
}

TEST_CASE("annotate of a NoLaser result draws no green or blue") {
    Image img = Image::rgb(640, 480, 255);
    LineSelection sel;
    sel.diagonal = make_clipped_line({0, 0}, {1, 1}, 640, 480);
    sel.horizontal = make_clipped_line({0, 300}, {1, 0}, 640, 480);
    GuidanceResult r = construct_guidance(sel, std::nullopt, 640, 480);
    REQUIRE(r.status == GuidanceStatus::NoLaser);
    Image out = annotate(img, r);
    for (int y = 0; y < 480; ++y)
        for (int x = 0; x < 640; ++x) {
            std::uint8_t red = out.at(x, y, 0), green = out.at(x, y, 1), blue = out.at(x, y, 2);
            // permitted colors: white background, black diagonal, red horizontal
            bool white = red == 255 && green == 255 && blue == 255;
            bool black = red == 0 && green == 0 && blue == 0;
            bool pure_red = red == 255 && green == 0 && blue == 0;
            CHECK((white || black || pure_red));
        }
}

TEST_CASE("module geometry invariants") {
    ModuleGeometry g;
    CHECK(g.laser_lateral_offset_mm() == doctest::Approx(17.0));
    validate(g);
    g.laser_axis_offset_mm = 40.0; // beyond the camera offset
    CHECK_THROWS_AS(validate(g), std::invalid_argument);
}

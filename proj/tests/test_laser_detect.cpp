#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "glg/laser_detect.hpp"
#include "glg/synth_scene.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace glg;
using testutil::paint_disc;

namespace {

Image gray_frame(int w, int h, std::uint8_t level) {
    Image img = Image::rgb(w, h);
    for (auto& v : img.data) v = level;
    return img;
}

} // namespace

TEST_CASE("detect_laser returns nothing on an all-black frame") {
    Image img = Image::rgb(64, 48, 0);
    CHECK(!detect_laser(img, LaserParams{}).has_value());
}

TEST_CASE("detect_laser centers a rendered disc within a pixel") {
    Image img = gray_frame(640, 480, 180);
    paint_disc(img, {320, 400}, 3.0);
    auto spot = detect_laser(img, LaserParams{});
    REQUIRE(spot.has_value());
    CHECK(distance(spot->center, {320, 400}) <= 1.0);
    CHECK(spot->area >= LaserParams{}.area_min);
    CHECK(spot->area <= LaserParams{}.area_max);
    CHECK(spot->center.x >= 0);
    CHECK(spot->center.x <= 639);
    CHECK(spot->center.y >= 0);
    CHECK(spot->center.y <= 479);
}

TEST_CASE("detect_laser picks the largest surviving candidate") {
    Image img = gray_frame(200, 200, 180);
    // small disc and a clearly larger one
    paint_disc(img, {40, 60}, 2.0);
    paint_disc(img, {140, 120}, 5.0);
    auto spot = detect_laser(img, LaserParams{});
    REQUIRE(spot.has_value());
    CHECK(distance(spot->center, {140, 120}) <= 1.5);

    // brute-force check: the reported area is the max over surviving areas
    BinaryMask mask = laser_mask(img, LaserParams{});
    std::int64_t best = 0;
    for (const auto& comp : oracle::components(mask)) {
        auto a = static_cast<std::int64_t>(comp.size());
        if (a >= LaserParams{}.area_min && a <= LaserParams{}.area_max) best = std::max(best, a);
    }
    CHECK(spot->area == best);
}

TEST_CASE("laser_mask covers a pure core-green frame and ignores red") {
    Image green = Image::rgb(32, 24);
    Image red = Image::rgb(32, 24);
    for (int y = 0; y < 24; ++y)
        for (int x = 0; x < 32; ++x) {
            green.set_rgb(x, y, 20, 204, 20);
            red.set_rgb(x, y, 204, 20, 20);
        }
    CHECK(laser_mask(green, LaserParams{}).count() == 32u * 24u);
    CHECK(laser_mask(red, LaserParams{}).count() == 0);
}

TEST_CASE("opening erases one- and two-pixel specks") {
    Image img = gray_frame(64, 48, 180);
    img.set_rgb(10, 10, 0, 255, 0);
    img.set_rgb(30, 20, 0, 255, 0);
    img.set_rgb(31, 20, 0, 255, 0);
    CHECK(laser_mask(img, LaserParams{}).count() == 0);
    CHECK(!detect_laser(img, LaserParams{}).has_value());
}

TEST_CASE("detect_laser is translation-equivariant on interior discs") {
    oracle::Rng rng(41);
    Image base = gray_frame(320, 240, 170);
    Vec2 origin{80.25, 90.75};
    paint_disc(base, origin, 3.0);
    auto base_spot = detect_laser(base, LaserParams{});
    REQUIRE(base_spot.has_value());

    for (int trial = 0; trial < 25; ++trial) {
        int dx = static_cast<int>(rng.below(160));
        int dy = static_cast<int>(rng.below(120));
        Image shifted = gray_frame(320, 240, 170);
        paint_disc(shifted, origin + Vec2(dx, dy), 3.0);
        auto spot = detect_laser(shifted, LaserParams{});
        REQUIRE(spot.has_value());
        CHECK(std::abs(spot->center.x - (base_spot->center.x + dx)) <= 0.5);
        CHECK(std::abs(spot->center.y - (base_spot->center.y + dy)) <= 0.5);
    }
}

TEST_CASE("enlarging area_max never loses a detection") {
    Image img = gray_frame(200, 200, 180);
    paint_disc(img, {100, 100}, 4.0);
    LaserParams p;
    auto base = detect_laser(img, p);
    REQUIRE(base.has_value());
    for (std::int64_t extra : {1, 100, 100000}) {
        LaserParams wider = p;
        wider.area_max = p.area_max + extra;
        CHECK(detect_laser(img, wider).has_value());
    }
}

TEST_CASE("area gate excludes candidates outside [area_min, area_max]") {
    Image img = gray_frame(200, 200, 180);
    paint_disc(img, {100, 100}, 5.0);
    LaserParams tight;
    tight.area_max = 10; // the disc is ~80 px^2
    CHECK(!detect_laser(img, tight).has_value());
}

TEST_CASE("laser params validation") {
    LaserParams p;
    p.area_min = 0;
    CHECK_THROWS_AS(validate(p), std::invalid_argument);
    p = LaserParams{};
    p.area_min = 500;
    p.area_max = 100;
    CHECK_THROWS_AS(validate(p), std::invalid_argument);
    p = LaserParams{};
    p.core_green.h_lo = 350.0;
    p.core_green.h_hi = 380.0; // wraps
    CHECK_THROWS_AS(validate(p), std::invalid_argument);
}

TEST_CASE("detect_laser finds the synthetic scene's dot") {
    SceneSpec spec;
    spec.ground_distance_m = 3.0;
    auto [img, gt] = render(spec, 4242);
    auto spot = detect_laser(img, LaserParams{});
    REQUIRE(spot.has_value());
    CHECK(distance(spot->center, gt.laser_pixel) <= 1.0);
}

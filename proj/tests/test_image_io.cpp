#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "glg/image_io.hpp"
#include "oracles.hpp"

using namespace glg;

namespace {

Image random_image(oracle::Rng& rng, Channels ch) {
    int w = 1 + static_cast<int>(rng.below(64));
    int h = 1 + static_cast<int>(rng.below(64));
    Image img(w, h, ch);
    for (auto& v : img.data) v = static_cast<std::uint8_t>(rng.below(256));
    return img;
}

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("glg_io_test_" + std::to_string(::getpid()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

} // namespace

TEST_CASE("png encode/decode round-trips random images") {
    oracle::Rng rng(2718);
    for (int trial = 0; trial < 40; ++trial) {
        for (Channels ch : {Channels::Gray8, Channels::Rgb8}) {
            Image img = random_image(rng, ch);
            Image back = decode_png(encode_png(img));
            CHECK(back == img);
        }
    }
}

TEST_CASE("png files start with the signature and survive disk round-trips") {
    TempDir tmp;
    oracle::Rng rng(3);
    Image img = random_image(rng, Channels::Rgb8);
    std::string path = tmp.file("img.png");
    save_png(img, path);
    auto bytes = read_file(path);
    REQUIRE(bytes.size() >= 8);
    for (int i = 0; i < 8; ++i) CHECK(bytes[i] == kPngSignature[i]);
    CHECK(load_png(path) == img);
}

TEST_CASE("png encoding is deterministic") {
    oracle::Rng rng(9);
    Image img = random_image(rng, Channels::Rgb8);
    CHECK(encode_png(img) == encode_png(img));
}

TEST_CASE("png decoder unfilters every filter type") {
    // hand-build a 3x3 grayscale PNG exercising Sub, Up, Average and Paeth
    Image img = Image::gray(3, 3);
    std::uint8_t vals[9] = {10, 60, 200, 35, 90, 170, 220, 5, 128};
    for (int i = 0; i < 9; ++i) img.data[i] = vals[i];

    const std::size_t row = 3;
    std::vector<std::uint8_t> raw;
    std::uint8_t filters[3] = {1, 2, 4}; // Sub, Up, Paeth
    std::uint8_t prev[3] = {0, 0, 0};
    for (int y = 0; y < 3; ++y) {
        raw.push_back(filters[y]);
        std::uint8_t line[3];
        for (std::size_t i = 0; i < row; ++i) {
            int x = img.data[y * row + i];
            int a = i > 0 ? img.data[y * row + i - 1] : 0;
            int b = prev[i];
            int c = i > 0 ? prev[i - 1] : 0;
            int v = 0;
            switch (filters[y]) {
                case 1: v = x - a; break;
                case 2: v = x - b; break;
                case 4: {
                    int pd = a + b - c;
                    int pa = std::abs(pd - a), pb = std::abs(pd - b), pc = std::abs(pd - c);
                    int pred = (pa <= pb && pa <= pc) ? a : (pb <= pc ? b : c);
                    v = x - pred;
                    break;
                }
            }
            line[i] = static_cast<std::uint8_t>(v & 0xFF);
        }
        raw.insert(raw.end(), line, line + 3);
        std::memcpy(prev, img.data.data() + y * row, row);
    }

    uLongf bound = compressBound(static_cast<uLong>(raw.size()));
    std::vector<std::uint8_t> comp(bound);
    REQUIRE(compress2(comp.data(), &bound, raw.data(), static_cast<uLong>(raw.size()), 6) == Z_OK);
    comp.resize(bound);

    std::vector<std::uint8_t> png(kPngSignature, kPngSignature + 8);
    std::vector<std::uint8_t> ihdr;
    detail::put_u32be(ihdr, 3);
    detail::put_u32be(ihdr, 3);
    ihdr.insert(ihdr.end(), {8, 0, 0, 0, 0});
    detail::append_chunk(png, "IHDR", ihdr);
    detail::append_chunk(png, "IDAT", comp);
    detail::append_chunk(png, "IEND", {});

    CHECK(decode_png(png) == img);
}

TEST_CASE("png decoder rejects damaged input") {
    CHECK_THROWS_AS(decode_png(std::vector<std::uint8_t>{1, 2, 3}), IoError);

    oracle::Rng rng(5);
    auto good = encode_png(random_image(rng, Channels::Gray8));
    auto bad = good;
    bad[0] = 0; // not a PNG signature
    CHECK_THROWS_AS(decode_png(bad), IoError);

    bad = good;
    bad.resize(40); // truncated mid-chunk
    CHECK_THROWS_AS(decode_png(bad), IoError);
}

TEST_CASE("pnm round-trips both P5 and P6") {
    TempDir tmp;
    oracle::Rng rng(11);
    Image gray = random_image(rng, Channels::Gray8);
    Image rgb = random_image(rng, Channels::Rgb8);
    save_pnm(gray, tmp.file("a.pgm"));
    save_pnm(rgb, tmp.file("b.ppm"));
    CHECK(load_pnm(tmp.file("a.pgm")) == gray);
    CHECK(load_pnm(tmp.file("b.ppm")) == rgb);
    // first bytes carry the magic
    CHECK(read_file(tmp.file("a.pgm"))[0] == 'P');
    CHECK(read_file(tmp.file("a.pgm"))[1] == '5');
    CHECK(read_file(tmp.file("b.ppm"))[1] == '6');
}

TEST_CASE("pnm parser handles comments and rejects junk") {
    TempDir tmp;
    {
        std::ofstream f(tmp.file("c.pgm"), std::ios::binary);
        f << "P5\n# a comment line\n2 1\n255\n";
        f.put(7);
        f.put(9);
    }
    Image img = load_pnm(tmp.file("c.pgm"));
    CHECK(img.width == 2);
    CHECK(img.height == 1);
    CHECK(img.at(0, 0) == 7);
    CHECK(img.at(1, 0) == 9);

    {
        std::ofstream f(tmp.file("d.pgm"), std::ios::binary);
        f << "P7\n2 1\n255\n";
    }
    CHECK_THROWS_AS(load_pnm(tmp.file("d.pgm")), IoError);

    {
        std::ofstream f(tmp.file("e.pgm"), std::ios::binary);
        f << "P5\n4 4\n255\n";
        f.put(1); // far too little pixel data
    }
    CHECK_THROWS_AS(load_pnm(tmp.file("e.pgm")), IoError);
}

TEST_CASE("load_image dispatches on extension") {
    TempDir tmp;
    oracle::Rng rng(13);
    Image img = random_image(rng, Channels::Rgb8);
    save_png(img, tmp.file("x.png"));
    save_pnm(img, tmp.file("x.ppm"));
    CHECK(load_image(tmp.file("x.png")) == img);
    CHECK(load_image(tmp.file("x.ppm")) == img);
    CHECK_THROWS_AS(load_image(tmp.file("x.bmp")), IoError);
    CHECK_THROWS_AS(load_image(tmp.file("missing.png")), IoError);
}

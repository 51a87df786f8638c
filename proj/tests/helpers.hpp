// Shared fixtures for the test suites.
#ifndef GLG_TESTS_HELPERS_HPP
#define GLG_TESTS_HELPERS_HPP

#include <cmath>
#include <filesystem>
#include <string>
#include <unistd.h>

#include "glg/image.hpp"
#include "glg/geometry.hpp"

namespace testutil {

/// Paint an anti-aliased laser-style disc (saturated ring, washed center).
inline void paint_disc(glg::Image& img, glg::Vec2 center, double radius) {
    const std::uint8_t core[3] = {20, 204, 20};
    const std::uint8_t bright[3] = {204, 255, 204};
    int x0 = std::max(0, static_cast<int>(std::floor(center.x - radius - 2)));
    int x1 = std::min(img.width - 1, static_cast<int>(std::ceil(center.x + radius + 2)));
    int y0 = std::max(0, static_cast<int>(std::floor(center.y - radius - 2)));
    int y1 = std::min(img.height - 1, static_cast<int>(std::ceil(center.y + radius + 2)));
    for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x) {
            double d = std::hypot(x - center.x, y - center.y);
            double cov = std::clamp(radius + 0.5 - d, 0.0, 1.0);
            if (cov <= 0) continue;
            const std::uint8_t* c = d < 0.45 * radius ? bright : core;
            for (int ch = 0; ch < 3; ++ch)
                img.at(x, y, ch) = static_cast<std::uint8_t>(
                    std::lround(img.at(x, y, ch) * (1.0 - cov) + c[ch] * cov));
        }
}

struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& tag) {
        path = std::filesystem::temp_directory_path() /
               ("glg_" + tag + "_" + std::to_string(::getpid()));
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

} // namespace testutil

#endif // GLG_TESTS_HELPERS_HPP

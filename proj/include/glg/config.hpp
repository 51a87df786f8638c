#ifndef GLG_CONFIG_HPP
#define GLG_CONFIG_HPP

#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>

#include "glg/pipeline.hpp"
#include "glg/synth_scene.hpp"

namespace glg {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Stream/transport knobs shared by the module daemon and the host.
struct WireConfig {
    int port = 7420;
    int max_modules = 3;
    double fps_cap = 10.0;
    int queue_depth = 4;
    int retry_attempts = 5;
    int retry_delay_ms = 1000;
};

struct AppConfig {
    PipelineParams pipeline;
    SceneSpec scene;
    WireConfig wire;
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

struct ConfigParser {
    AppConfig& cfg;
    int line_no = 0;

    [[noreturn]] void fail(const std::string& msg) const {
        std::ostringstream os;
        os << "config line " << line_no << ": " << msg;
        throw ConfigError(os.str());
    }

    double num(const std::string& v) const {
        try {
            std::size_t used = 0;
            double d = std::stod(v, &used);
            if (used != v.size()) fail("trailing characters after number: '" + v + "'");
            return d;
        } catch (const ConfigError&) {
            throw;
        } catch (...) {
            fail("expected a number, got '" + v + "'");
        }
    }

    int integer(const std::string& v) const {
        double d = num(v);
        if (d != static_cast<long long>(d)) fail("expected an integer, got '" + v + "'");
        return static_cast<int>(d);
    }

    Border border(const std::string& v) const {
        if (v == "left") return Border::Left;
        if (v == "right") return Border::Right;
        if (v == "top") return Border::Top;
        if (v == "bottom") return Border::Bottom;
        fail("expected left/right/top/bottom, got '" + v + "'");
    }

    void apply(const std::string& section, const std::string& key, const std::string& value) {
        auto& det = cfg.pipeline.detect;
        auto& las = cfg.pipeline.laser;
        auto& scn = cfg.scene;
        auto& wir = cfg.wire;

        if (section == "canny") {
            if (key == "low") det.canny_low = num(value);
            else if (key == "high") det.canny_high = num(value);
            else if (key == "blur_sigma") det.blur_sigma = num(value);
            else if (key == "blur_ksize") det.blur_ksize = integer(value);
            else fail("unknown key '" + key + "' in [canny]");
        } else if (section == "hough") {
            if (key == "rho_res") det.hough.rho_res = num(value);
            else if (key == "theta_res") det.hough.theta_res = num(value);
            else if (key == "votes_min") det.hough.votes_min = integer(value);
            else if (key == "min_len") det.hough.min_len = num(value);
            else if (key == "max_gap") det.hough.max_gap = num(value);
            else fail("unknown key '" + key + "' in [hough]");
        } else if (section == "line") {
            auto& ln = det.line;
            if (key == "theta_horiz_max") ln.theta_horiz_max = num(value);
            else if (key == "theta_diag_lo") ln.theta_diag_lo = num(value);
            else if (key == "theta_diag_hi") ln.theta_diag_hi = num(value);
            else if (key == "alpha_length") ln.alpha_length = num(value);
            else if (key == "beta_angle") ln.beta_angle = num(value);
            else if (key == "gamma_position") ln.gamma_position = num(value);
            else if (key == "horiz_border") ln.horiz_border = border(value);
            else if (key == "diag_border") ln.diag_border = border(value);
            else fail("unknown key '" + key + "' in [line]");
        } else if (section == "laser") {
            if (key == "core_h_lo") las.core_green.h_lo = num(value);
            else if (key == "core_h_hi") las.core_green.h_hi = num(value);
            else if (key == "core_s_lo") las.core_green.s_lo = num(value);
            else if (key == "core_s_hi") las.core_green.s_hi = num(value);
            else if (key == "core_v_lo") las.core_green.v_lo = num(value);
            else if (key == "core_v_hi") las.core_green.v_hi = num(value);
            else if (key == "bright_h_lo") las.bright_green.h_lo = num(value);
            else if (key == "bright_h_hi") las.bright_green.h_hi = num(value);
            else if (key == "bright_s_lo") las.bright_green.s_lo = num(value);
            else if (key == "bright_s_hi") las.bright_green.s_hi = num(value);
            else if (key == "bright_v_lo") las.bright_green.v_lo = num(value);
            else if (key == "bright_v_hi") las.bright_green.v_hi = num(value);
            else if (key == "area_min") las.area_min = integer(value);
            else if (key == "area_max") las.area_max = integer(value);
            else if (key == "blur_sigma") las.blur_sigma = num(value);
            else if (key == "blur_ksize") las.blur_ksize = integer(value);
            else fail("unknown key '" + key + "' in [laser]");
        } else if (section == "scene") {
            if (key == "width") scn.width = integer(value);
            else if (key == "height") scn.height = integer(value);
            else if (key == "focal_px") scn.focal_px = num(value);
            else if (key == "edge_theta_deg") scn.edge_theta_deg = num(value);
            else if (key == "disc_radius_px") scn.disc_radius_px = num(value);
            else if (key == "object_bottom_frac") scn.object_bottom_frac = num(value);
            else if (key == "ground_level") scn.ground_level = integer(value);
            else if (key == "ground_noise") scn.ground_noise = integer(value);
            else if (key == "grid_step_m") scn.grid_step_m = num(value);
            else if (key == "grid_darken") scn.grid_darken = integer(value);
            else if (key == "shade_level") scn.shade_level = integer(value);
            else if (key == "suction_tip_offset_mm") scn.geometry.suction_tip_offset_mm = num(value);
            else if (key == "laser_axis_offset_mm") scn.geometry.laser_axis_offset_mm = num(value);
            else if (key == "camera_axis_offset_mm") scn.geometry.camera_axis_offset_mm = num(value);
            else if (key == "body_w_mm") scn.geometry.body_w_mm = num(value);
            else if (key == "body_d_mm") scn.geometry.body_d_mm = num(value);
            else if (key == "body_h_mm") scn.geometry.body_h_mm = num(value);
            else fail("unknown key '" + key + "' in [scene]");
        } else if (section == "wire") {
            if (key == "port") wir.port = integer(value);
            else if (key == "max_modules") wir.max_modules = integer(value);
            else if (key == "fps_cap") wir.fps_cap = num(value);
            else if (key == "queue_depth") wir.queue_depth = integer(value);
            else if (key == "retry_attempts") wir.retry_attempts = integer(value);
            else if (key == "retry_delay_ms") wir.retry_delay_ms = integer(value);
            else fail("unknown key '" + key + "' in [wire]");
        } else {
            fail("unknown section [" + section + "]");
        }
    }
};

} // namespace detail

/// Parse a key=value config with [canny]/[hough]/[line]/[laser]/[scene]/[wire]
/// sections into `cfg`. Unknown sections or keys and malformed values are
/// rejected with the offending line number; cross-field constraints are
/// validated after parsing.
inline void parse_config_text(const std::string& text, AppConfig& cfg) {
    detail::ConfigParser p{cfg};
    std::istringstream in(text);
    std::string raw, section;
    while (std::getline(in, raw)) {
        ++p.line_no;
        std::string line = detail::trim(raw);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        if (line.front() == '[') {
            if (line.back() != ']') p.fail("unterminated section header");
            section = detail::trim(line.substr(1, line.size() - 2));
            if (section.empty()) p.fail("empty section name");
            continue;
        }
        std::size_t eq = line.find('=');
        if (eq == std::string::npos) p.fail("expected key=value");
        std::string key = detail::trim(line.substr(0, eq));
        std::string value = detail::trim(line.substr(eq + 1));
        if (key.empty()) p.fail("empty key");
        if (section.empty()) p.fail("key '" + key + "' before any [section]");
        p.apply(section, key, value);
    }

    try {
        validate(cfg.pipeline.detect.line);
        validate(cfg.pipeline.laser);
        require(cfg.pipeline.detect.blur_ksize >= 1 && cfg.pipeline.detect.blur_ksize % 2 == 1,
                "canny blur_ksize must be odd and >= 1");
        require(cfg.pipeline.detect.blur_sigma > 0.0, "canny blur_sigma must be > 0");
        require(cfg.pipeline.detect.canny_low <= cfg.pipeline.detect.canny_high,
                "canny low must be <= high");
        require(cfg.pipeline.detect.hough.rho_res > 0.0 && cfg.pipeline.detect.hough.theta_res > 0.0,
                "hough resolutions must be > 0");
        require(cfg.pipeline.detect.hough.votes_min >= 1, "hough votes_min must be >= 1");
        validate(cfg.scene.geometry);
        require(cfg.wire.port > 0 && cfg.wire.port < 65536, "wire port out of range");
        require(cfg.wire.max_modules >= 1 && cfg.wire.max_modules <= 3,
                "wire max_modules must be in [1,3]");
        require(cfg.wire.queue_depth >= 1, "wire queue_depth must be >= 1");
        require(cfg.wire.fps_cap > 0.0, "wire fps_cap must be > 0");
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

inline void load_config_file(const std::string& path, AppConfig& cfg) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    parse_config_text(ss.str(), cfg);
}

} // namespace glg

#endif // GLG_CONFIG_HPP

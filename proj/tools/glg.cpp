// glg: crane-lowering guidance toolkit.
//
// Subcommands: process a single frame, generate synthetic scenes, run a
// camera-module daemon, run the host aggregator, and evaluate accuracy
// across a distance sweep.

#include <atomic>
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "glg/config.hpp"
#include "glg/daemon.hpp"
#include "glg/host.hpp"
#include "glg/image_io.hpp"
#include "glg/pipeline.hpp"
#include "glg/synth_scene.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

std::atomic<bool> g_stop{false};

void handle_signal(int) { g_stop.store(true); }

void install_signal_handlers() {
    std::signal(SIGINT, handle_signal);
    std::signal(SIGTERM, handle_signal);
}

std::vector<double> parse_distances(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double d = std::stod(item, &used);
        if (used != item.size()) throw std::invalid_argument("bad distance: '" + item + "'");
        if (d <= 0.0) throw std::invalid_argument("distances must be > 0");
        out.push_back(d);
    }
    if (out.empty()) throw std::invalid_argument("empty distance list");
    return out;
}

/// flags > GLG_PORT env > config file > default.
int resolve_port(const CLI::App* cmd, int flag_port, int config_port) {
    if (cmd->count("--port") > 0) return flag_port;
    if (const char* env = std::getenv("GLG_PORT")) {
        std::size_t used = 0;
        int p = std::stoi(env, &used);
        if (used != std::strlen(env) || p <= 0 || p >= 65536)
            throw glg::ConfigError(std::string("bad GLG_PORT value: ") + env);
        return p;
    }
    return config_port;
}

struct SceneNames {
    static std::string png(std::size_t i) {
        std::ostringstream os;
        os << "scene_" << std::setw(3) << std::setfill('0') << i << ".png";
        return os.str();
    }
    static std::string json(std::size_t i) {
        std::ostringstream os;
        os << "scene_" << std::setw(3) << std::setfill('0') << i << ".json";
        return os.str();
    }
};

int cmd_process(const std::string& input, const std::string& output, const std::string& report,
                const glg::AppConfig& cfg) {
    glg::Image img = glg::load_image(input);
    if (img.channels != glg::Channels::Rgb8) {
        glg::Image rgb = glg::Image::rgb(img.width, img.height);
        for (int y = 0; y < img.height; ++y)
            for (int x = 0; x < img.width; ++x) {
                std::uint8_t g = img.at(x, y);
                rgb.set_rgb(x, y, g, g, g);
            }
        img = std::move(rgb);
    }
    glg::GuidanceResult result = glg::process_frame(img, cfg.pipeline);
    std::string line = glg::report_json(result);
    std::cout << line << "\n";
    if (!output.empty()) glg::save_png(glg::annotate(img, result, cfg.pipeline.style), output);
    if (!report.empty()) {
        std::ofstream f(report, std::ios::trunc);
        if (!f) throw glg::IoError("cannot write report: " + report);
        f << line << "\n";
    }
    return kExitOk;
}

int cmd_scene(const std::string& distances_text, const std::string& out_dir, std::uint64_t seed,
              const glg::AppConfig& cfg) {
    std::vector<double> distances = parse_distances(distances_text);
    std::filesystem::create_directories(out_dir);
    auto frames = glg::sweep(cfg.scene, distances, seed);
    for (std::size_t i = 0; i < frames.size(); ++i) {
        const auto& [img, gt] = frames[i];
        glg::save_png(img, out_dir + "/" + SceneNames::png(i));
        nlohmann::json j;
        j["landing"] = {gt.landing_pixel.x, gt.landing_pixel.y};
        j["laser"] = {gt.laser_pixel.x, gt.laser_pixel.y};
        j["theta"] = gt.edge_theta;
        j["distance_m"] = gt.distance_m;
        j["seed"] = gt.seed;
        std::ofstream f(out_dir + "/" + SceneNames::json(i), std::ios::trunc);
        if (!f) throw glg::IoError("cannot write sidecar JSON");
        f << j.dump() << "\n";
    }
    std::cout << "wrote " << frames.size() << " scene(s) to " << out_dir << "\n";
    return kExitOk;
}

int cmd_eval(const std::string& distances_text, std::uint64_t seed, const std::string& out_path,
             double corner_slack, double laser_tol, double theta_tol, const glg::AppConfig& cfg) {
    std::vector<double> distances = parse_distances(distances_text);
    auto frames = glg::sweep(cfg.scene, distances, seed);

    nlohmann::json rows = nlohmann::json::array();
    bool ok = true;
    std::cout << "distance_m  corner_err_px  laser_err_px  theta_err_deg  status\n";
    for (std::size_t i = 0; i < frames.size(); ++i) {
        const auto& [img, gt] = frames[i];
        glg::GuidanceResult r = glg::process_frame(img, cfg.pipeline);
        double budget = cfg.scene.focal_px *
                            (cfg.scene.geometry.laser_lateral_offset_mm() / 1000.0) /
                            gt.distance_m +
                        corner_slack;
        double corner_err = r.corner ? glg::distance(*r.corner, gt.landing_pixel) : -1.0;
        double laser_err = r.laser ? glg::distance(r.laser->center, gt.laser_pixel) : -1.0;
        double theta_err = r.selection.diagonal_source
                               ? std::abs(r.selection.diagonal_source->theta - gt.edge_theta)
                               : -1.0;
        bool row_ok = r.status == glg::GuidanceStatus::Full && corner_err >= 0.0 &&
                      corner_err <= budget && laser_err >= 0.0 && laser_err <= laser_tol &&
                      theta_err >= 0.0 && theta_err <= theta_tol;
        ok = ok && row_ok;

        std::ostringstream line;
        line.setf(std::ios::fixed);
        line << std::setprecision(1) << std::setw(10) << gt.distance_m << "  " << std::setprecision(3)
             << std::setw(13) << corner_err << "  " << std::setw(12) << laser_err << "  "
             << std::setw(13) << theta_err << "  " << glg::status_name(r.status)
             << (row_ok ? "" : "  [exceeds tolerance]");
        std::cout << line.str() << "\n";

        nlohmann::json row;
        row["distance_m"] = gt.distance_m;
        row["seed"] = gt.seed;
        row["corner_err_px"] = corner_err;
        row["corner_budget_px"] = budget;
        row["laser_err_px"] = laser_err;
        row["theta_err_deg"] = theta_err;
        row["status"] = glg::status_name(r.status);
        row["ok"] = row_ok;
        rows.push_back(row);
    }

    if (!out_path.empty()) {
        nlohmann::json report;
        report["rows"] = rows;
        report["pass"] = ok;
        std::ofstream f(out_path, std::ios::trunc);
        if (!f) throw glg::IoError("cannot write report: " + out_path);
        f << report.dump(2) << "\n";
    }
    std::cout << (ok ? "PASS" : "FAIL") << "\n";
    return ok ? kExitOk : kExitRuntime;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"crane-lowering guidance: line/laser detection, landing-corner "
                 "construction, synthetic scenes, and module-to-host streaming"};
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path, "key=value config file")->capture_default_str();

    // process
    auto* process = app.add_subcommand("process", "run the guidance pipeline on one image");
    process->fallthrough();
    std::string in_path, out_path, report_path;
    process->add_option("--input", in_path, "input image (PNG or PNM)")->required();
    process->add_option("--output", out_path, "annotated output PNG");
    process->add_option("--report", report_path, "guidance report JSON path");

    // scene
    auto* scene = app.add_subcommand("scene", "render synthetic scenes with ground truth");
    scene->fallthrough();
    std::string distances = "1,2,3,4,5";
    std::string scene_out;
    std::uint64_t seed = 0;
    scene->add_option("--distances", distances, "comma-separated distances in meters")
        ->capture_default_str();
    scene->add_option("--out", scene_out, "output directory")->required();
    scene->add_option("--seed", seed, "render seed")->capture_default_str();

    // module
    auto* module = app.add_subcommand("module", "run a camera-module daemon");
    module->fallthrough();
    std::string host_addr = "127.0.0.1";
    int port = 0;
    int module_id = 0;
    double fps = 0.0;
    std::string source_dir;
    bool use_synth = false;
    int synth_frames = 10;
    double synth_distance = 3.0;
    bool no_frames = false;
    std::string encoding = "png";
    module->add_option("--host", host_addr, "host address")->capture_default_str();
    module->add_option("--port", port, "host port (default 7420; GLG_PORT overrides)");
    module->add_option("--id", module_id, "module id (0-2)")->check(CLI::Range(0, 2));
    module->add_option("--fps", fps, "frame rate cap (default from config)");
    module->add_option("--source", source_dir, "directory of frames (PNG/PNM)");
    module->add_flag("--synth", use_synth, "use the synthetic scene generator as the source");
    module->add_option("--frames", synth_frames, "synthetic frame count")->capture_default_str();
    module->add_option("--distance", synth_distance, "synthetic ground distance in meters")
        ->capture_default_str();
    module->add_option("--seed", seed, "synthetic render seed")->capture_default_str();
    module->add_flag("--no-frames", no_frames, "send geometry only, no frame payload");
    module->add_option("--encoding", encoding, "frame payload encoding: png or raw")
        ->check(CLI::IsMember({"png", "raw"}))
        ->capture_default_str();

    // host
    auto* host = app.add_subcommand("host", "run the host aggregator");
    host->fallthrough();
    std::string listen_addr = "0.0.0.0";
    std::string host_out = ".";
    int max_modules = 0;
    host->add_option("--listen", listen_addr, "listen address")->capture_default_str();
    host->add_option("--port", port, "listen port (default 7420; GLG_PORT overrides)");
    host->add_option("--out", host_out, "output directory")->required();
    host->add_option("--max-modules", max_modules, "module slots (1-3, default from config)");

    // eval
    auto* eval = app.add_subcommand("eval", "accuracy sweep against synthetic ground truth");
    eval->fallthrough();
    std::string eval_out;
    double corner_slack = 3.0, laser_tol = 1.0, theta_tol = 2.0;
    eval->add_option("--distances", distances, "comma-separated distances in meters")
        ->capture_default_str();
    eval->add_option("--seed", seed, "sweep seed")->capture_default_str();
    eval->add_option("--out", eval_out, "JSON report path");
    eval->add_option("--corner-slack-px", corner_slack, "corner error slack beyond the modeled laser-offset term")
        ->capture_default_str();
    eval->add_option("--laser-tol", laser_tol, "laser centroid error tolerance, px")
        ->capture_default_str();
    eval->add_option("--theta-tol", theta_tol, "diagonal angle error tolerance, degrees")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        glg::AppConfig cfg;
        if (!config_path.empty()) glg::load_config_file(config_path, cfg);

        if (process->parsed()) return cmd_process(in_path, out_path, report_path, cfg);
        if (scene->parsed()) return cmd_scene(distances, scene_out, seed, cfg);
        if (eval->parsed())
            return cmd_eval(distances, seed, eval_out, corner_slack, laser_tol, theta_tol, cfg);

        if (module->parsed()) {
            install_signal_handlers();
            glg::DaemonOptions opt;
            opt.host = host_addr;
            opt.port = resolve_port(module, port, cfg.wire.port);
            opt.module_id = module_id;
            opt.fps_cap = module->count("--fps") ? fps : cfg.wire.fps_cap;
            opt.queue_depth = cfg.wire.queue_depth;
            opt.retry_attempts = cfg.wire.retry_attempts;
            opt.retry_delay_ms = cfg.wire.retry_delay_ms;
            opt.send_frames = !no_frames;
            opt.frame_encoding =
                encoding == "raw" ? glg::wire::FrameEncoding::RawRgb8 : glg::wire::FrameEncoding::Png;
            if (opt.fps_cap <= 0.0) throw glg::ConfigError("fps cap must be > 0");

            std::unique_ptr<glg::FrameSource> source;
            if (use_synth) {
                glg::SceneSpec spec = cfg.scene;
                spec.ground_distance_m = synth_distance;
                source = std::make_unique<glg::SynthSource>(spec, seed, synth_frames);
            } else if (!source_dir.empty()) {
                source = std::make_unique<glg::DirectorySource>(source_dir);
            } else {
                throw glg::ConfigError("module: provide --source DIR or --synth");
            }
            glg::DaemonStats stats = glg::run_module_daemon(*source, cfg.pipeline, opt, &g_stop);
            std::cout << "module " << module_id << ": frames=" << stats.frames_processed
                      << " sent=" << stats.packets_sent << " dropped=" << stats.packets_dropped
                      << "\n";
            return kExitOk;
        }

        if (host->parsed()) {
            install_signal_handlers();
            glg::HostOptions opt;
            opt.listen_addr = listen_addr;
            opt.port = resolve_port(host, port, cfg.wire.port);
            opt.out_dir = host_out;
            opt.max_modules = host->count("--max-modules") ? max_modules : cfg.wire.max_modules;
            if (opt.max_modules < 1 || opt.max_modules > 3)
                throw glg::ConfigError("max-modules must be in [1,3]");
            glg::run_host(opt, g_stop, [](int p) { std::cout << "listening on port " << p << "\n"; });
            return kExitOk;
        }
    } catch (const glg::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitUsage;
}

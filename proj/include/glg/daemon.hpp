#ifndef GLG_DAEMON_HPP
#define GLG_DAEMON_HPP

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <optional>
#include <thread>

#include "glg/config.hpp"
#include "glg/image_io.hpp"
#include "glg/net.hpp"
#include "glg/pipeline.hpp"
#include "glg/synth_scene.hpp"
#include "glg/wire.hpp"

namespace glg {

/// Sequential frame supply for the module daemon.
class FrameSource {
  public:
    virtual ~FrameSource() = default;
    /// Next RGB frame, or nullopt at end of source.
    virtual std::optional<Image> next() = 0;
};

/// Feeds image files from a directory in lexicographic order. Unreadable
/// files are skipped with a warning.
class DirectorySource : public FrameSource {
  public:
    explicit DirectorySource(const std::string& dir) {
        namespace fs = std::filesystem;
        if (!fs::is_directory(dir)) throw IoError("frame source is not a directory: " + dir);
        for (const auto& e : fs::directory_iterator(dir)) {
            if (!e.is_regular_file()) continue;
            std::string ext = e.path().extension().string();
            for (auto& c : ext) c = static_cast<char>(std::tolower(c));
            if (ext == ".png" || ext == ".ppm" || ext == ".pgm" || ext == ".pnm")
                paths_.push_back(e.path().string());
        }
        std::sort(paths_.begin(), paths_.end());
    }

    std::size_t size() const { return paths_.size(); }
    std::size_t skipped() const { return skipped_; }

    std::optional<Image> next() override {
        while (index_ < paths_.size()) {
            const std::string& path = paths_[index_++];
            try {
                Image img = load_image(path);
                if (img.channels == Channels::Gray8) {
                    Image rgb = Image::rgb(img.width, img.height);
                    for (int y = 0; y < img.height; ++y)
                        for (int x = 0; x < img.width; ++x) {
                            std::uint8_t g = img.at(x, y);
                            rgb.set_rgb(x, y, g, g, g);
                        }
                    return rgb;
                }
                return img;
            } catch (const std::exception& e) {
                ++skipped_;
                std::cerr << "warning: skipping unreadable frame " << path << ": " << e.what()
                          << "\n";
            }
        }
        return std::nullopt;
    }

  private:
    std::vector<std::string> paths_;
    std::size_t index_ = 0;
    std::size_t skipped_ = 0;
};

/// Renders a fixed number of synthetic frames at one distance.
class SynthSource : public FrameSource {
  public:
    SynthSource(const SceneSpec& spec, std::uint64_t seed, int count)
        : spec_(spec), seed_(seed), count_(count) {}

    std::optional<Image> next() override {
        if (produced_ >= count_) return std::nullopt;
        auto [img, gt] = render(spec_, derive_seed(seed_, static_cast<std::size_t>(produced_)));
        ++produced_;
        return std::move(img);
    }

  private:
    SceneSpec spec_;
    std::uint64_t seed_;
    int count_;
    int produced_ = 0;
};

struct DaemonOptions {
    std::string host = "127.0.0.1";
    int port = 7420;
    int module_id = 0;
    double fps_cap = 10.0;
    int queue_depth = 4;
    int retry_attempts = 5;
    int retry_delay_ms = 1000;
    bool send_frames = true;
    wire::FrameEncoding frame_encoding = wire::FrameEncoding::Png;
};

struct DaemonStats {
    std::uint64_t frames_processed = 0;
    std::uint64_t packets_sent = 0; // HELLO included
    std::uint64_t packets_dropped = 0;
    std::uint64_t reconnects = 0;
};

struct DaemonError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::uint64_t wall_clock_ms() {
    return static_cast<std::uint64_t>(std::chrono::duration_cast<std::chrono::milliseconds>(
                                          std::chrono::system_clock::now().time_since_epoch())
                                          .count());
}

/// Bounded send queue; when full the oldest unsent packet is dropped:
/// guidance is real-time, freshness beats completeness.
class SendQueue {
  public:
    explicit SendQueue(std::size_t depth) : depth_(depth) {}

    void push(std::vector<std::uint8_t> bytes, std::uint64_t* dropped) {
        std::lock_guard lock(mu_);
        if (q_.size() >= depth_) {
            q_.pop_front();
            if (dropped) ++(*dropped);
        }
        q_.push_back(std::move(bytes));
        cv_.notify_one();
    }

    void close() {
        std::lock_guard lock(mu_);
        closed_ = true;
        cv_.notify_all();
    }

    std::optional<std::vector<std::uint8_t>> pop() {
        std::unique_lock lock(mu_);
        cv_.wait(lock, [&] { return closed_ || !q_.empty(); });
        if (q_.empty()) return std::nullopt;
        auto b = std::move(q_.front());
        q_.pop_front();
        return b;
    }

  private:
    std::mutex mu_;
    std::condition_variable cv_;
    std::deque<std::vector<std::uint8_t>> q_;
    std::size_t depth_;
    bool closed_ = false;
};

} // namespace detail

/// Process frames from `source` through the full pipeline and stream
/// GuidancePackets (HELLO first, then seq 1..N) to the host. Connection loss
/// triggers up to retry_attempts reconnect cycles, 1 s apart by default;
/// exhausting them throws DaemonError. Stops early when `stop` goes true.
inline DaemonStats run_module_daemon(FrameSource& source, const PipelineParams& params,
                                     const DaemonOptions& opt,
                                     std::atomic<bool>* stop = nullptr) {
    if (opt.module_id < 0 || opt.module_id > 2)
        throw DaemonError("module_id must be 0-2");

    DaemonStats stats;
    detail::SendQueue queue(static_cast<std::size_t>(std::max(1, opt.queue_depth)));

    std::atomic<bool> sender_failed{false};
    std::string sender_error;
    std::mutex err_mu;

    auto connect_with_hello = [&]() -> net::Socket {
        net::Socket sock = net::tcp_connect(opt.host, opt.port);
        auto hello = wire::encode_packet(
            wire::make_hello(static_cast<std::uint8_t>(opt.module_id), detail::wall_clock_ms()));
        if (!net::send_all(sock, hello.data(), hello.size()))
            throw net::NetError("failed to send HELLO");
        return sock;
    };

    std::thread sender([&] {
        net::Socket sock;
        int failures = 0;
        while (true) {
            if (!sock.valid()) {
                try {
                    sock = connect_with_hello();
                    ++stats.packets_sent; // HELLO
                } catch (const std::exception& e) {
                    ++failures;
                    if (failures >= opt.retry_attempts) {
                        std::lock_guard lock(err_mu);
                        sender_error = e.what();
                        sender_failed = true;
                        return;
                    }
                    std::this_thread::sleep_for(std::chrono::milliseconds(opt.retry_delay_ms));
                    continue;
                }
            }
            auto bytes = queue.pop();
            if (!bytes) return; // queue closed and drained
            if (net::send_all(sock, bytes->data(), bytes->size())) {
                ++stats.packets_sent;
                failures = 0;
            } else {
                // connection lost: requeue nothing (freshness), reconnect
                sock.close_fd();
                ++stats.reconnects;
                ++failures;
                if (failures >= opt.retry_attempts) {
                    std::lock_guard lock(err_mu);
                    sender_error = "connection lost and retries exhausted";
                    sender_failed = true;
                    return;
                }
                std::this_thread::sleep_for(std::chrono::milliseconds(opt.retry_delay_ms));
            }
        }
    });

    auto frame_interval = std::chrono::duration<double>(1.0 / std::max(opt.fps_cap, 1e-6));
    auto start = std::chrono::steady_clock::now();
    std::uint32_t seq = 0;

    while (!sender_failed && (!stop || !stop->load())) {
        auto img = source.next();
        if (!img) break;
        GuidanceResult result = process_frame(*img, params);
        Image annotated = annotate(*img, result, params.style);

        wire::GuidancePacket pkt = wire::make_packet(static_cast<std::uint8_t>(opt.module_id),
                                                     ++seq, detail::wall_clock_ms(), result);
        if (opt.send_frames) {
            pkt.has_frame = true;
            pkt.frame_width = static_cast<std::uint16_t>(annotated.width);
            pkt.frame_height = static_cast<std::uint16_t>(annotated.height);
            pkt.frame_encoding = opt.frame_encoding;
            pkt.frame_data = opt.frame_encoding == wire::FrameEncoding::Png
                                 ? encode_png(annotated)
                                 : annotated.data;
        }
        queue.push(wire::encode_packet(pkt), &stats.packets_dropped);
        ++stats.frames_processed;

        // fps cap: hold each frame slot open for its full interval
        auto next_time = start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                     frame_interval * static_cast<double>(seq));
        while (!sender_failed && (!stop || !stop->load()) &&
               std::chrono::steady_clock::now() < next_time)
            std::this_thread::sleep_for(std::chrono::milliseconds(1));
    }

    queue.close();
    sender.join();
    if (sender_failed) throw DaemonError("module daemon: " + sender_error);
    return stats;
}

} // namespace glg

#endif // GLG_DAEMON_HPP

#ifndef GLG_HOST_HPP
#define GLG_HOST_HPP

#include <array>
#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>
#include <vector>

#include "glg/image_io.hpp"
#include "glg/net.hpp"
#include "glg/wire.hpp"

namespace glg {

struct HostOptions {
    std::string listen_addr = "0.0.0.0";
    int port = 7420;
    std::string out_dir = ".";
    int max_modules = 3; // module slots 0..max_modules-1
};

struct ModuleCounters {
    std::uint64_t packets = 0;  // data packets logged (HELLO excluded)
    std::uint64_t gaps = 0;     // seq discontinuities
    std::uint64_t rejected = 0; // malformed packets skipped by the decoder
    std::uint64_t protocol_errors = 0;
    bool connected = false;
};

struct HostStats {
    std::array<ModuleCounters, 3> modules{};
    std::uint64_t refused_connections = 0;
};

/// Accepts up to max_modules module streams, writes each received frame as
/// {out_dir}/{module_id}/{seq}.png, and appends one JSON line per packet to
/// {out_dir}/guidance.log. Runs until `stop` goes true; prints per-module
/// packet/gap counters on shutdown. A connection is refused when its first
/// packet is not a HELLO, when the module id has no free slot, or when the
/// id duplicates a live connection; per-connection protocol errors never
/// disturb other connections.
class Host {
  public:
    explicit Host(const HostOptions& opt) : opt_(opt) {
        namespace fs = std::filesystem;
        fs::create_directories(opt_.out_dir);
        log_.open(opt_.out_dir + "/guidance.log", std::ios::app);
        if (!log_) throw IoError("cannot open guidance.log in " + opt_.out_dir);
        listener_ = net::tcp_listen(opt_.listen_addr, opt_.port);
        bound_port_ = net::local_port(listener_);
    }

    int port() const { return bound_port_; }

    /// Serve until stop becomes true.
    HostStats run(std::atomic<bool>& stop) {
        std::vector<std::thread> readers;
        while (!stop.load()) {
            net::Socket conn = net::tcp_accept(listener_, 100);
            if (!conn.valid()) continue;
            readers.emplace_back(&Host::serve_connection, this, std::move(conn), std::ref(stop));
        }
        listener_.close_fd();
        for (auto& t : readers) t.join();
        print_counters();
        return stats_;
    }

    const HostStats& stats() const { return stats_; }

  private:
    void serve_connection(net::Socket conn, std::atomic<bool>& stop) {
        wire::PacketDecoder decoder;
        int module_id = -1;
        bool got_hello = false;
        std::uint32_t last_seq = 0;
        std::uint8_t buf[64 * 1024];

        auto cleanup = [&] {
            if (module_id >= 0) {
                std::lock_guard lock(mu_);
                slot_taken_[module_id] = false;
                stats_.modules[module_id].connected = false;
            }
        };

        try {
            while (!stop.load()) {
                ssize_t n = net::recv_some(conn, buf, sizeof(buf), 100);
                if (n == -1) continue; // timeout, poll stop flag
                if (n == -2) break;    // socket error
                if (n == 0) {          // orderly close
                    if (decoder.pending() != 0) {
                        std::cerr << "host: module " << module_id
                                  << " stream truncated mid-packet\n";
                        if (module_id >= 0) {
                            std::lock_guard lock(mu_);
                            ++stats_.modules[module_id].protocol_errors;
                        }
                    }
                    break;
                }
                decoder.feed(buf, static_cast<std::size_t>(n));

                while (auto pkt = decoder.next()) {
                    if (!got_hello) {
                        if (!wire::is_hello(*pkt) || !claim_slot(pkt->module_id)) {
                            std::lock_guard lock(mu_);
                            ++stats_.refused_connections;
                            std::cerr << "host: refusing connection (module "
                                      << static_cast<int>(pkt->module_id) << ")\n";
                            cleanup();
                            return;
                        }
                        got_hello = true;
                        module_id = pkt->module_id;
                        last_seq = 0;
                        continue;
                    }
                    if (pkt->module_id != module_id) {
                        std::lock_guard lock(mu_);
                        ++stats_.modules[module_id].rejected;
                        continue;
                    }
                    handle_packet(*pkt, last_seq);
                }
            }
        } catch (const wire::ProtocolError& e) {
            std::cerr << "host: protocol error on module " << module_id << ": " << e.what()
                      << "\n";
            if (module_id >= 0) {
                std::lock_guard lock(mu_);
                ++stats_.modules[module_id].protocol_errors;
            }
        } catch (const std::exception& e) {
            std::cerr << "host: connection error: " << e.what() << "\n";
        }
        if (module_id >= 0) {
            std::lock_guard lock(mu_);
            stats_.modules[module_id].rejected += decoder.rejected();
        }
        cleanup();
    }

    bool claim_slot(int id) {
        if (id < 0 || id >= opt_.max_modules || id > 2) return false;
        std::lock_guard lock(mu_);
        if (slot_taken_[id]) return false;
        slot_taken_[id] = true;
        stats_.modules[id].connected = true;
        return true;
    }

    void handle_packet(const wire::GuidancePacket& pkt, std::uint32_t& last_seq) {
        if (pkt.seq != last_seq + 1) {
            std::lock_guard lock(mu_);
            ++stats_.modules[pkt.module_id].gaps;
        }
        last_seq = pkt.seq;

        if (pkt.has_frame) write_frame(pkt);

        std::ostringstream line;
        line << "{\"module_id\":" << static_cast<int>(pkt.module_id) << ",\"seq\":" << pkt.seq
             << ",\"timestamp_ms\":" << pkt.timestamp_ms << ",\"status\":\""
             << status_name(wire::packet_status(pkt)) << "\",\"corner\":";
        if (pkt.geometry[5].present())
            line << "[" << pkt.geometry[5].x << "," << pkt.geometry[5].y << "]";
        else
            line << "null";
        line << "}";

        {
            std::lock_guard lock(mu_);
            log_ << line.str() << "\n";
            log_.flush();
            ++stats_.modules[pkt.module_id].packets;
        }
    }

    void write_frame(const wire::GuidancePacket& pkt) {
        namespace fs = std::filesystem;
        fs::path dir = fs::path(opt_.out_dir) / std::to_string(static_cast<int>(pkt.module_id));
        fs::create_directories(dir);
        fs::path final_path = dir / (std::to_string(pkt.seq) + ".png");
        fs::path tmp_path = dir / (std::to_string(pkt.seq) + ".png.tmp");

        try {
            if (pkt.frame_encoding == wire::FrameEncoding::Png) {
                write_file(tmp_path.string(), pkt.frame_data.data(), pkt.frame_data.size());
            } else {
                Image img(pkt.frame_width, pkt.frame_height, Channels::Rgb8);
                img.data = pkt.frame_data;
                save_png(img, tmp_path.string());
            }
            fs::rename(tmp_path, final_path); // frame files appear complete or not at all
        } catch (const std::exception& e) {
            std::cerr << "host: failed to write frame " << final_path << ": " << e.what() << "\n";
            std::error_code ec;
            fs::remove(tmp_path, ec);
        }
    }

    void print_counters() {
        std::lock_guard lock(mu_);
        for (int m = 0; m < 3; ++m) {
            const auto& c = stats_.modules[m];
            if (c.packets == 0 && c.gaps == 0 && c.rejected == 0 && !c.connected) continue;
            std::cout << "module " << m << ": packets=" << c.packets << " gaps=" << c.gaps
                      << " rejected=" << c.rejected << " protocol_errors=" << c.protocol_errors
                      << "\n";
        }
        if (stats_.refused_connections)
            std::cout << "refused connections: " << stats_.refused_connections << "\n";
        std::cout.flush();
    }

    HostOptions opt_;
    net::Socket listener_;
    int bound_port_ = 0;
    std::ofstream log_;
    std::mutex mu_;
    bool slot_taken_[3] = {false, false, false};
    HostStats stats_;
};

/// Convenience wrapper mirroring the daemon entry point.
inline HostStats run_host(const HostOptions& opt, std::atomic<bool>& stop,
                          const std::function<void(int)>& on_ready = nullptr) {
    Host host(opt);
    if (on_ready) on_ready(host.port());
    return host.run(stop);
}

} // namespace glg

#endif // GLG_HOST_HPP

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <thread>

#include "glg/daemon.hpp"
#include "glg/host.hpp"
#include "glg/image_io.hpp"

using namespace glg;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("glg_stream_" + tag + "_" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

struct HostFixture {
    HostOptions opt;
    std::atomic<bool> stop{false};
    std::unique_ptr<Host> host;
    std::thread thread;
    HostStats stats;

    explicit HostFixture(const std::string& out_dir, int max_modules = 3) {
        opt.listen_addr = "127.0.0.1";
        opt.port = 0; // ephemeral
        opt.out_dir = out_dir;
        opt.max_modules = max_modules;
        host = std::make_unique<Host>(opt);
        thread = std::thread([this] { stats = host->run(stop); });
    }

    int port() const { return host->port(); }

    HostStats finish() {
        stop.store(true);
        thread.join();
        return stats;
    }

    ~HostFixture() {
        if (thread.joinable()) {
            stop.store(true);
            thread.join();
        }
    }
};

struct InstantSource : FrameSource {
    int remaining;
    explicit InstantSource(int n) : remaining(n) {}
    std::optional<Image> next() override {
        if (remaining-- <= 0) return std::nullopt;
        return Image::rgb(16, 16, 128);
    }
};

std::vector<std::string> read_log_lines(const fs::path& dir) {
    std::ifstream f(dir / "guidance.log");
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(f, line))
        if (!line.empty()) lines.push_back(line);
    return lines;
}

SceneSpec small_scene() {
    SceneSpec spec;
    spec.width = 96;
    spec.height = 72;
    spec.focal_px = 80.0;
    spec.ground_distance_m = 2.0;
    return spec;
}

} // namespace

TEST_CASE("ten synthetic frames arrive as HELLO plus seq 1..10") {
    TempDir tmp("basic");
    HostFixture host(tmp.path.string());

    SynthSource source(small_scene(), 5, 10);
    DaemonOptions opt;
    opt.host = "127.0.0.1";
    opt.port = host.port();
    opt.module_id = 1;
    opt.fps_cap = 500.0;
    DaemonStats dstats = run_module_daemon(source, PipelineParams{}, opt);

    CHECK(dstats.frames_processed == 10);
    CHECK(dstats.packets_sent == 11); // HELLO + 10 data packets
    CHECK(dstats.packets_dropped == 0);

    // allow the reader to drain before stopping
    std::this_thread::sleep_for(std::chrono::milliseconds(300));
    HostStats hstats = host.finish();
    CHECK(hstats.modules[1].packets == 10);
    CHECK(hstats.modules[1].gaps == 0);
    CHECK(hstats.modules[1].rejected == 0);

    for (int s = 1; s <= 10; ++s) {
        fs::path frame = tmp.path / "1" / (std::to_string(s) + ".png");
        REQUIRE(fs::exists(frame));
        Image img = load_png(frame.string()); // complete, decodable files
        CHECK(img.width == 96);
        CHECK(img.height == 72);
    }

    auto lines = read_log_lines(tmp.path);
    REQUIRE(lines.size() == 10);
    for (int s = 1; s <= 10; ++s) {
        CHECK(lines[s - 1].find("\"module_id\":1") != std::string::npos);
        CHECK(lines[s - 1].find("\"seq\":" + std::to_string(s)) != std::string::npos);
    }
}

TEST_CASE("a ten-frame directory source yields HELLO plus ten packets at the host") {
    TempDir frames_dir("dirframes");
    SceneSpec spec = small_scene();
    for (int i = 0; i < 10; ++i) {
        auto [img, gt] = render(spec, derive_seed(31, i));
        char name[32];
        std::snprintf(name, sizeof(name), "frame_%02d.png", i);
        save_png(img, (frames_dir.path / name).string());
    }

    TempDir tmp("dirloop");
    HostFixture host(tmp.path.string());
    DirectorySource source(frames_dir.path.string());
    REQUIRE(source.size() == 10);
    DaemonOptions opt;
    opt.host = "127.0.0.1";
    opt.port = host.port();
    opt.module_id = 2;
    opt.fps_cap = 500.0;
    DaemonStats stats = run_module_daemon(source, PipelineParams{}, opt);
    CHECK(stats.packets_sent == 11); // HELLO + 10

    std::this_thread::sleep_for(std::chrono::milliseconds(300));
    HostStats hstats = host.finish();
    CHECK(hstats.modules[2].packets == 10);
    CHECK(hstats.modules[2].gaps == 0);
}

TEST_CASE("raw frame payloads are re-encoded to PNG by the host") {
    TempDir tmp("raw");
    HostFixture host(tmp.path.string());

    SynthSource source(small_scene(), 6, 2);
    DaemonOptions opt;
    opt.host = "127.0.0.1";
    opt.port = host.port();
    opt.module_id = 0;
    opt.fps_cap = 500.0;
    opt.frame_encoding = wire::FrameEncoding::RawRgb8;
    run_module_daemon(source, PipelineParams{}, opt);

    std::this_thread::sleep_for(std::chrono::milliseconds(300));
    host.finish();
    for (int s = 1; s <= 2; ++s) {
        Image img = load_png((tmp.path / "0" / (std::to_string(s) + ".png")).string());
        CHECK(img.channels == Channels::Rgb8);
    }
}

TEST_CASE("duplicate module ids are refused while the first stream continues") {
    TempDir tmp("dup");
    HostFixture host(tmp.path.string());

    // first connection claims slot 2
    net::Socket first = net::tcp_connect("127.0.0.1", host.port());
    auto hello = wire::encode_packet(wire::make_hello(2, 1));
    REQUIRE(net::send_all(first, hello.data(), hello.size()));

    std::this_thread::sleep_for(std::chrono::milliseconds(200));

    // second connection with the same id is closed by the host
    net::Socket second = net::tcp_connect("127.0.0.1", host.port());
    REQUIRE(net::send_all(second, hello.data(), hello.size()));
    std::uint8_t buf[16];
    ssize_t n = -1;
    for (int i = 0; i < 50 && n == -1; ++i) n = net::recv_some(second, buf, sizeof(buf), 100);
    CHECK(n == 0); // orderly close from the host

    // the first connection still works: send one data packet
    wire::GuidancePacket pkt;
    pkt.module_id = 2;
    pkt.seq = 1;
    pkt.timestamp_ms = 2;
    auto bytes = wire::encode_packet(pkt);
    REQUIRE(net::send_all(first, bytes.data(), bytes.size()));
    std::this_thread::sleep_for(std::chrono::milliseconds(300));

    first.shutdown_both();
    second.shutdown_both();
    HostStats stats = host.finish();
    CHECK(stats.refused_connections == 1);
    CHECK(stats.modules[2].packets == 1);
}

TEST_CASE("module ids beyond the slot count are refused") {
    TempDir tmp("slots");
    HostFixture host(tmp.path.string(), 1); // only module 0 allowed

    net::Socket conn = net::tcp_connect("127.0.0.1", host.port());
    auto hello = wire::encode_packet(wire::make_hello(1, 1));
    REQUIRE(net::send_all(conn, hello.data(), hello.size()));
    std::uint8_t buf[16];
    ssize_t n = -1;
    for (int i = 0; i < 50 && n == -1; ++i) n = net::recv_some(conn, buf, sizeof(buf), 100);
    CHECK(n == 0);
    HostStats stats = host.finish();
    CHECK(stats.refused_connections == 1);
}

TEST_CASE("a connection must open with HELLO") {
    TempDir tmp("nohello");
    HostFixture host(tmp.path.string());

    net::Socket conn = net::tcp_connect("127.0.0.1", host.port());
    wire::GuidancePacket pkt; // seq 0 but with geometry: not a HELLO
    pkt.module_id = 0;
    pkt.seq = 7;
    auto bytes = wire::encode_packet(pkt);
    REQUIRE(net::send_all(conn, bytes.data(), bytes.size()));
    std::uint8_t buf[16];
    ssize_t n = -1;
    for (int i = 0; i < 50 && n == -1; ++i) n = net::recv_some(conn, buf, sizeof(buf), 100);
    CHECK(n == 0);
    HostStats stats = host.finish();
    CHECK(stats.refused_connections == 1);
}

TEST_CASE("a dead connection frees its slot and truncation is flagged") {
    TempDir tmp("dead");
    HostFixture host(tmp.path.string());

    {
        net::Socket conn = net::tcp_connect("127.0.0.1", host.port());
        auto hello = wire::encode_packet(wire::make_hello(0, 1));
        REQUIRE(net::send_all(conn, hello.data(), hello.size()));
        wire::GuidancePacket pkt;
        pkt.module_id = 0;
        pkt.seq = 1;
        auto bytes = wire::encode_packet(pkt);
        REQUIRE(net::send_all(conn, bytes.data(), bytes.size()));
        // half a packet, then the socket dies
        REQUIRE(net::send_all(conn, bytes.data(), 30));
        std::this_thread::sleep_for(std::chrono::milliseconds(300));
    } // destructor closes mid-packet

    std::this_thread::sleep_for(std::chrono::milliseconds(300));

    // slot 0 is free again
    net::Socket conn2 = net::tcp_connect("127.0.0.1", host.port());
    auto hello = wire::encode_packet(wire::make_hello(0, 9));
    REQUIRE(net::send_all(conn2, hello.data(), hello.size()));
    wire::GuidancePacket pkt;
    pkt.module_id = 0;
    pkt.seq = 5; // discontinuity on purpose
    auto bytes = wire::encode_packet(pkt);
    REQUIRE(net::send_all(conn2, bytes.data(), bytes.size()));
    std::this_thread::sleep_for(std::chrono::milliseconds(300));
    conn2.shutdown_both();

    HostStats stats = host.finish();
    CHECK(stats.modules[0].packets == 2);
    CHECK(stats.modules[0].protocol_errors == 1); // truncated stream
    CHECK(stats.modules[0].gaps == 1);            // 0 -> 5 jump on the new connection
    CHECK(stats.refused_connections == 0);
}

TEST_CASE("fps cap holds the frame rate down") {
    TempDir tmp("fps");
    HostFixture host(tmp.path.string());

    InstantSource source(10);
    DaemonOptions opt;
    opt.host = "127.0.0.1";
    opt.port = host.port();
    opt.module_id = 0;
    opt.fps_cap = 5.0;
    opt.send_frames = false;
    auto t0 = std::chrono::steady_clock::now();
    DaemonStats stats = run_module_daemon(source, PipelineParams{}, opt);
    double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    CHECK(stats.frames_processed == 10);
    CHECK(elapsed >= 2.0);
    host.finish();
}

TEST_CASE("an unreachable host exhausts its retries and fails") {
    // grab an ephemeral port and close it again: nothing listens there
    int dead_port;
    {
        net::Socket probe = net::tcp_listen("127.0.0.1", 0);
        dead_port = net::local_port(probe);
    }
    InstantSource source(3);
    DaemonOptions opt;
    opt.host = "127.0.0.1";
    opt.port = dead_port;
    opt.module_id = 0;
    opt.fps_cap = 1000.0;
    opt.retry_attempts = 3;
    opt.retry_delay_ms = 20;
    opt.send_frames = false;
    CHECK_THROWS_AS(run_module_daemon(source, PipelineParams{}, opt), DaemonError);
}

TEST_CASE("directory sources skip unreadable frames with a warning") {
    TempDir tmp("dirsrc");
    Image img = Image::rgb(24, 18, 200);
    save_png(img, (tmp.path / "b.png").string());
    save_png(img, (tmp.path / "a.png").string());
    {
        std::ofstream f(tmp.path / "c.png");
        f << "not a png";
    }
    DirectorySource source(tmp.path.string());
    CHECK(source.size() == 3);
    int frames = 0;
    while (source.next()) ++frames;
    CHECK(frames == 2);
    CHECK(source.skipped() == 1);
}

#ifndef GLG_WIRE_HPP
#define GLG_WIRE_HPP

#include <array>
#include <cstdint>
#include <cstring>
#include <optional>
#include <stdexcept>
#include <vector>

#include "glg/guidance.hpp"

namespace glg::wire {

/// Fatal stream-level failure: bad magic, bad version, or an implausible
/// frame length. The connection cannot be trusted past this point.
struct ProtocolError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Packet-level validation failure on encode.
struct PacketError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

inline constexpr std::uint8_t kMagic[4] = {'G', 'L', 'G', '1'};
inline constexpr std::uint8_t kVersion = 1;
inline constexpr std::size_t kHeaderSize = 24;   // magic..timestamp + reserved
inline constexpr std::size_t kGeometrySize = 48; // 6 points x (i32, i32)
inline constexpr std::size_t kBaseSize = kHeaderSize + kGeometrySize;
inline constexpr std::size_t kFrameHeaderSize = 9; // w, h, encoding, data_len
inline constexpr std::uint32_t kMaxFrameBytes = 64u * 1024u * 1024u;

inline constexpr std::uint16_t kFlagFrame = 1u << 0;
inline constexpr std::uint16_t kFlagFull = 1u << 1;
inline constexpr std::uint16_t kFlagLaser = 1u << 2;
inline constexpr std::uint16_t kFlagHoriz = 1u << 3;
inline constexpr std::uint16_t kFlagDiag = 1u << 4;
inline constexpr std::uint16_t kKnownFlags = kFlagFrame | kFlagFull | kFlagLaser | kFlagHoriz | kFlagDiag;

enum class FrameEncoding : std::uint8_t { RawRgb8 = 0, Png = 1 };

/// Geometry slot; (-1,-1) is the absent sentinel.
struct PacketPoint {
    std::int32_t x = -1;
    std::int32_t y = -1;
    bool present() const { return !(x == -1 && y == -1); }
    bool operator==(const PacketPoint&) const = default;
};

/// One module->host message. Geometry order is fixed:
/// [horiz_p0, horiz_p1, diag_p0, diag_p1, laser, corner].
struct GuidancePacket {
    std::uint8_t module_id = 0;
    std::uint32_t seq = 0;
    std::uint64_t timestamp_ms = 0;
    std::array<PacketPoint, 6> geometry{};
    bool has_frame = false;
    std::uint16_t frame_width = 0;
    std::uint16_t frame_height = 0;
    FrameEncoding frame_encoding = FrameEncoding::RawRgb8;
    std::vector<std::uint8_t> frame_data;

    bool operator==(const GuidancePacket&) const = default;

    std::uint16_t flags() const {
        std::uint16_t f = 0;
        if (has_frame) f |= kFlagFrame;
        if (geometry[5].present()) f |= kFlagFull;
        if (geometry[4].present()) f |= kFlagLaser;
        if (geometry[0].present() && geometry[1].present()) f |= kFlagHoriz;
        if (geometry[2].present() && geometry[3].present()) f |= kFlagDiag;
        return f;
    }
};

namespace detail {

inline void put_u16(std::vector<std::uint8_t>& v, std::uint16_t x) {
    v.push_back(static_cast<std::uint8_t>(x >> 8));
    v.push_back(static_cast<std::uint8_t>(x));
}
inline void put_u32(std::vector<std::uint8_t>& v, std::uint32_t x) {
    put_u16(v, static_cast<std::uint16_t>(x >> 16));
    put_u16(v, static_cast<std::uint16_t>(x));
}
inline void put_u64(std::vector<std::uint8_t>& v, std::uint64_t x) {
    put_u32(v, static_cast<std::uint32_t>(x >> 32));
    put_u32(v, static_cast<std::uint32_t>(x));
}
inline void put_i32(std::vector<std::uint8_t>& v, std::int32_t x) {
    put_u32(v, static_cast<std::uint32_t>(x));
}

inline std::uint16_t get_u16(const std::uint8_t* p) {
    return static_cast<std::uint16_t>((p[0] << 8) | p[1]);
}
inline std::uint32_t get_u32(const std::uint8_t* p) {
    return (static_cast<std::uint32_t>(p[0]) << 24) | (static_cast<std::uint32_t>(p[1]) << 16) |
           (static_cast<std::uint32_t>(p[2]) << 8) | static_cast<std::uint32_t>(p[3]);
}
inline std::uint64_t get_u64(const std::uint8_t* p) {
    return (static_cast<std::uint64_t>(get_u32(p)) << 32) | get_u32(p + 4);
}
inline std::int32_t get_i32(const std::uint8_t* p) {
    return static_cast<std::int32_t>(get_u32(p));
}

/// Geometry pairs must be both-present or both-absent.
inline bool pairs_consistent(const GuidancePacket& p) {
    return p.geometry[0].present() == p.geometry[1].present() &&
           p.geometry[2].present() == p.geometry[3].present();
}

} // namespace detail

/// Exact byte layout: 24-byte header (magic, version, module_id, flags BE,
/// seq BE, timestamp BE, 4 reserved zero bytes), 48-byte geometry block,
/// then the optional frame block when the frame flag is set.
inline std::vector<std::uint8_t> encode_packet(const GuidancePacket& p) {
    if (p.module_id > 2) throw PacketError("encode_packet: module_id must be 0-2");
    if (!detail::pairs_consistent(p))
        throw PacketError("encode_packet: line endpoint pair half-present");
    if (p.has_frame) {
        if (p.frame_data.size() > kMaxFrameBytes)
            throw PacketError("encode_packet: frame data too large");
        if (p.frame_encoding == FrameEncoding::RawRgb8 &&
            p.frame_data.size() != static_cast<std::size_t>(p.frame_width) * p.frame_height * 3)
            throw PacketError("encode_packet: raw frame size mismatch");
    } else {
        if (!p.frame_data.empty() || p.frame_width != 0 || p.frame_height != 0)
            throw PacketError("encode_packet: frame fields set without frame flag");
    }

    std::vector<std::uint8_t> out;
    out.reserve(kBaseSize + (p.has_frame ? kFrameHeaderSize + p.frame_data.size() : 0));
    out.insert(out.end(), kMagic, kMagic + 4);
    out.push_back(kVersion);
    out.push_back(p.module_id);
    detail::put_u16(out, p.flags());
    detail::put_u32(out, p.seq);
    detail::put_u64(out, p.timestamp_ms);
    detail::put_u32(out, 0); // reserved
    for (const auto& pt : p.geometry) {
        detail::put_i32(out, pt.x);
        detail::put_i32(out, pt.y);
    }
    if (p.has_frame) {
        detail::put_u16(out, p.frame_width);
        detail::put_u16(out, p.frame_height);
        out.push_back(static_cast<std::uint8_t>(p.frame_encoding));
        detail::put_u32(out, static_cast<std::uint32_t>(p.frame_data.size()));
        out.insert(out.end(), p.frame_data.begin(), p.frame_data.end());
    }
    return out;
}

/// Incremental decoder. Feed bytes as they arrive; next() yields packets as
/// they complete. Inconsistent packets are consumed, counted, and skipped;
/// magic/version mismatches and implausible lengths throw ProtocolError.
class PacketDecoder {
  public:
    void feed(const std::uint8_t* data, std::size_t len) {
        buf_.insert(buf_.end(), data, data + len);
    }
    void feed(const std::vector<std::uint8_t>& data) { feed(data.data(), data.size()); }

    /// Bytes buffered but not yet consumed (nonzero at EOF means truncation).
    std::size_t pending() const { return buf_.size() - consumed_; }

    std::size_t rejected() const { return rejected_; }

    std::optional<GuidancePacket> next() {
        for (;;) {
            compact();
            if (pending() < kBaseSize) return std::nullopt;
            const std::uint8_t* p = buf_.data() + consumed_;

            if (std::memcmp(p, kMagic, 4) != 0) throw ProtocolError("bad magic");
            if (p[4] != kVersion) throw ProtocolError("unsupported protocol version");

            std::uint16_t flags = detail::get_u16(p + 6);
            std::size_t total = kBaseSize;
            std::uint32_t data_len = 0;
            if (flags & kFlagFrame) {
                if (pending() < kBaseSize + kFrameHeaderSize) return std::nullopt;
                data_len = detail::get_u32(p + kBaseSize + 5);
                if (data_len > kMaxFrameBytes) throw ProtocolError("frame length implausible");
                total = kBaseSize + kFrameHeaderSize + data_len;
                if (pending() < total) return std::nullopt;
            }

            GuidancePacket pkt;
            pkt.module_id = p[5];
            pkt.seq = detail::get_u32(p + 8);
            pkt.timestamp_ms = detail::get_u64(p + 12);
            for (int i = 0; i < 6; ++i) {
                pkt.geometry[i].x = detail::get_i32(p + kHeaderSize + 8 * i);
                pkt.geometry[i].y = detail::get_i32(p + kHeaderSize + 8 * i + 4);
            }
            bool ok = pkt.module_id <= 2 && (flags & ~kKnownFlags) == 0;
            if (flags & kFlagFrame) {
                pkt.has_frame = true;
                pkt.frame_width = detail::get_u16(p + kBaseSize);
                pkt.frame_height = detail::get_u16(p + kBaseSize + 2);
                std::uint8_t enc = p[kBaseSize + 4];
                ok = ok && enc <= 1;
                pkt.frame_encoding = static_cast<FrameEncoding>(enc);
                pkt.frame_data.assign(p + kBaseSize + kFrameHeaderSize,
                                      p + kBaseSize + kFrameHeaderSize + data_len);
                if (pkt.frame_encoding == FrameEncoding::RawRgb8)
                    ok = ok && pkt.frame_data.size() ==
                                   static_cast<std::size_t>(pkt.frame_width) * pkt.frame_height * 3;
            }
            // flag/sentinel consistency
            ok = ok && detail::pairs_consistent(pkt) && pkt.flags() == flags;

            consumed_ += total;
            if (!ok) {
                ++rejected_;
                continue; // packet rejected, connection continues
            }
            return pkt;
        }
    }

  private:
    void compact() {
        if (consumed_ > 0 && (consumed_ >= 4096 || consumed_ == buf_.size())) {
            buf_.erase(buf_.begin(), buf_.begin() + static_cast<std::ptrdiff_t>(consumed_));
            consumed_ = 0;
        }
    }

    std::vector<std::uint8_t> buf_;
    std::size_t consumed_ = 0;
    std::size_t rejected_ = 0;
};

/// Round a subpixel point into a packet slot; a present point that would
/// collide with the absent sentinel is nudged one pixel.
inline PacketPoint to_packet_point(const Vec2& p) {
    auto cvt = [](double v) {
        double c = std::clamp(v, -2147483648.0, 2147483647.0);
        return static_cast<std::int32_t>(std::llround(c));
    };
    PacketPoint pt{cvt(p.x), cvt(p.y)};
    if (!pt.present()) pt.y = 0;
    return pt;
}

/// Pack a pipeline result (and optional encoded frame) for the wire.
inline GuidancePacket make_packet(std::uint8_t module_id, std::uint32_t seq,
                                  std::uint64_t timestamp_ms, const GuidanceResult& r) {
    GuidancePacket p;
    p.module_id = module_id;
    p.seq = seq;
    p.timestamp_ms = timestamp_ms;
    if (r.selection.horizontal && r.selection.horizontal->has_clip) {
        p.geometry[0] = to_packet_point(r.selection.horizontal->clipped[0]);
        p.geometry[1] = to_packet_point(r.selection.horizontal->clipped[1]);
    }
    if (r.selection.diagonal && r.selection.diagonal->has_clip) {
        p.geometry[2] = to_packet_point(r.selection.diagonal->clipped[0]);
        p.geometry[3] = to_packet_point(r.selection.diagonal->clipped[1]);
    }
    if (r.laser) p.geometry[4] = to_packet_point(r.laser->center);
    if (r.corner) p.geometry[5] = to_packet_point(*r.corner);
    return p;
}

/// HELLO claims the module slot: seq 0, no flags, all geometry absent.
inline GuidancePacket make_hello(std::uint8_t module_id, std::uint64_t timestamp_ms) {
    GuidancePacket p;
    p.module_id = module_id;
    p.seq = 0;
    p.timestamp_ms = timestamp_ms;
    return p;
}

inline bool is_hello(const GuidancePacket& p) { return p.seq == 0 && p.flags() == 0; }

/// Reconstruct the pipeline status a packet's flags imply, mirroring the
/// precedence used by construct_guidance.
inline GuidanceStatus packet_status(const GuidancePacket& p) {
    std::uint16_t f = p.flags();
    bool laser = f & kFlagLaser, horiz = f & kFlagHoriz, diag = f & kFlagDiag;
    if (f & kFlagFull) return GuidanceStatus::Full;
    if (!laser && !horiz && !diag) return GuidanceStatus::Empty;
    if (!diag) return GuidanceStatus::NoDiagonal;
    if (!horiz) return GuidanceStatus::NoHorizontal;
    if (!laser) return GuidanceStatus::NoLaser;
    return GuidanceStatus::Degenerate;
}

} // namespace glg::wire

#endif // GLG_WIRE_HPP

#ifndef SVC_FRAMING_HPP
#define SVC_FRAMING_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "svc/bytes.hpp"
#include "svc/codec.hpp"
#include "svc/core.hpp"

namespace svc {

/// One media packet: little-endian header fields, payload, then CRC-32 of
/// everything before the CRC field.
struct Packet {
    std::uint32_t stream_id = 0;
    std::uint32_t frame_index = 0;
    std::uint8_t frame_type = 0;
    std::vector<std::uint8_t> payload;
    std::uint32_t crc = 0;
};

/// Independent per-packet loss with a seeded generator, so every run is
/// reproducible.
struct ChannelModel {
    double loss_probability = 0.0;
    std::uint64_t seed = 0;
};

/// Media packets plus the out-of-band session block (the container header).
/// The session travels on a reliable control channel, like a session
/// description would; only media packets face the lossy channel.
struct PacketizedStream {
    std::uint32_t stream_id = 1;
    std::vector<std::uint8_t> session;  // serialized container header
    std::vector<Packet> packets;        // one per frame, in order
};

struct LossReport {
    std::vector<std::uint32_t> lost;       // packets dropped or corrupt
    std::vector<std::uint32_t> concealed;  // frames emitted as held copies
    std::vector<std::uint32_t> absent;     // frames before the first decodable I-frame
};

struct SimulationResult {
    std::vector<SemanticMap> frames;
    LossReport report;
};

inline std::uint32_t crc32(std::span<const std::uint8_t> data) {
    static const std::array<std::uint32_t, 256> table = [] {
        std::array<std::uint32_t, 256> t{};
        for (std::uint32_t i = 0; i < 256; ++i) {
            std::uint32_t c = i;
            for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
            t[i] = c;
        }
        return t;
    }();
    std::uint32_t crc = 0xFFFFFFFFu;
    for (const std::uint8_t b : data) crc = table[(crc ^ b) & 0xFF] ^ (crc >> 8);
    return crc ^ 0xFFFFFFFFu;
}

namespace wire {
// Pseudo-packet carrying the session block in file dumps.
inline constexpr std::uint32_t kSessionFrameIndex = 0xFFFFFFFFu;
inline constexpr std::uint8_t kSessionFrameType = 0xFF;
}  // namespace wire

namespace detail {

inline void write_packet_body(ByteWriter& w, std::uint32_t stream_id, std::uint32_t frame_index,
                              std::uint8_t frame_type, std::span<const std::uint8_t> payload) {
    w.u32(stream_id);
    w.u32(frame_index);
    w.u8(frame_type);
    w.u32(std::uint32_t(payload.size()));
    w.bytes(payload);
}

}  // namespace detail

inline std::vector<std::uint8_t> packet_wire_bytes(const Packet& p) {
    ByteWriter w;
    detail::write_packet_body(w, p.stream_id, p.frame_index, p.frame_type, p.payload);
    w.u32(p.crc);
    return w.take();
}

inline Packet make_packet(std::uint32_t stream_id, std::uint32_t frame_index,
                          std::uint8_t frame_type, std::vector<std::uint8_t> payload) {
    Packet p;
    p.stream_id = stream_id;
    p.frame_index = frame_index;
    p.frame_type = frame_type;
    p.payload = std::move(payload);
    ByteWriter w;
    detail::write_packet_body(w, p.stream_id, p.frame_index, p.frame_type, p.payload);
    p.crc = crc32(w.data());
    return p;
}

inline bool packet_crc_ok(const Packet& p) {
    ByteWriter w;
    detail::write_packet_body(w, p.stream_id, p.frame_index, p.frame_type, p.payload);
    return crc32(w.data()) == p.crc;
}

/// One packet per frame, in order. The session block carries the container
/// header verbatim.
inline PacketizedStream packetize(const EncodedVideo& ev, std::uint32_t stream_id = 1) {
    const std::vector<std::uint8_t> container = serialize_video(ev);
    PacketizedStream out;
    out.stream_id = stream_id;
    out.session.assign(container.begin(), container.begin() + wire::kHeaderBytes);
    out.packets.reserve(ev.frames.size());
    for (std::size_t k = 0; k < ev.frames.size(); ++k)
        out.packets.push_back(make_packet(stream_id, std::uint32_t(k),
                                          std::uint8_t(ev.frames[k].frame_type),
                                          ev.frames[k].payload));
    return out;
}

/// Rebuilds the container from a complete packet sequence; byte-exact
/// inverse of packetize. CRC or ordering violations are DecodeErrors.
inline EncodedVideo depacketize(const PacketizedStream& stream) {
    ByteWriter w;
    w.bytes(stream.session);
    for (std::size_t k = 0; k < stream.packets.size(); ++k) {
        const Packet& p = stream.packets[k];
        if (!packet_crc_ok(p)) throw DecodeError("packet CRC mismatch", std::uint32_t(k));
        if (p.frame_index != k) throw DecodeError("packet out of order", std::uint32_t(k));
        w.u8(p.frame_type);
        w.u32(std::uint32_t(p.payload.size()));
        w.bytes(p.payload);
    }
    EncodedVideo ev = parse_video(w.data());
    if (ev.frames.size() != stream.packets.size())
        throw DecodeError("packet count does not match header frame count");
    return ev;
}

/// Session-packet-first concatenation of wire packets.
inline std::vector<std::uint8_t> write_packet_dump(const PacketizedStream& stream) {
    ByteWriter w;
    w.bytes(packet_wire_bytes(make_packet(stream.stream_id, wire::kSessionFrameIndex,
                                          wire::kSessionFrameType, stream.session)));
    for (const Packet& p : stream.packets) w.bytes(packet_wire_bytes(p));
    return w.take();
}

inline PacketizedStream read_packet_dump(std::span<const std::uint8_t> data) {
    ByteReader r(data, "packet dump: ");
    auto read_packet = [&r] {
        Packet p;
        p.stream_id = r.u32();
        p.frame_index = r.u32();
        p.frame_type = r.u8();
        const std::uint32_t len = r.u32();
        const auto payload = r.bytes(len);
        p.payload.assign(payload.begin(), payload.end());
        p.crc = r.u32();
        return p;
    };

    PacketizedStream out;
    const Packet session = read_packet();
    if (session.frame_index != wire::kSessionFrameIndex ||
        session.frame_type != wire::kSessionFrameType)
        throw DecodeError("packet dump does not start with a session packet");
    if (!packet_crc_ok(session)) throw DecodeError("session packet CRC mismatch");
    out.stream_id = session.stream_id;
    out.session = session.payload;
    while (!r.at_end()) out.packets.push_back(read_packet());
    return out;
}

/// Drops each packet independently with the channel's loss probability and
/// decodes what remains. Concealment holds the last emitted map; P-frames
/// whose GOP lost a packet are held rather than decoded against a stale
/// reference. Frames preceding the first decodable I-frame are absent.
inline SimulationResult simulate_and_decode(const PacketizedStream& stream,
                                            const ChannelModel& ch) {
    if (!(ch.loss_probability >= 0.0 && ch.loss_probability <= 1.0))
        throw std::invalid_argument("simulate_and_decode: loss probability outside [0, 1]");

    // Skeleton container (header, zero frames) so the frame decoders can see
    // dimensions and config. The session block travels reliably.
    EncodedVideo header_only;
    {
        std::vector<std::uint8_t> tmp(stream.session);
        if (tmp.size() != wire::kHeaderBytes) throw DecodeError("bad session block size");
        for (std::size_t i = 9; i < 13; ++i) tmp[i] = 0;  // frame_count := 0
        header_only = parse_video(tmp);
    }

    std::mt19937_64 rng(ch.seed);
    auto unit = [&rng] { return double(rng() >> 11) * 0x1.0p-53; };

    SimulationResult res;
    std::vector<InstanceContour> reference;
    bool gop_valid = false;
    std::optional<SemanticMap> last_output;

    for (std::size_t k = 0; k < stream.packets.size(); ++k) {
        const Packet& p = stream.packets[k];
        const bool dropped = unit() < ch.loss_probability;
        const bool usable =
            !dropped && packet_crc_ok(p) && p.frame_index == k && p.frame_type <= 1;
        bool lost = !usable;
        bool decoded = false;

        if (usable) {
            try {
                if (FrameType(p.frame_type) == FrameType::I) {
                    reference =
                        detail::decode_iframe_payload(p.payload, header_only, std::uint32_t(k));
                    gop_valid = true;
                    decoded = true;
                } else if (gop_valid) {
                    const detail::PFrameData pf =
                        detail::decode_pframe_payload(p.payload, header_only, std::uint32_t(k));
                    reference = detail::advance_reference(reference, pf, header_only.config.q,
                                                          std::uint32_t(k));
                    decoded = true;
                }
                // An intact P-frame after a broken reference is not lost; it
                // is merely concealed below.
            } catch (const DecodeError&) {
                decoded = false;
                lost = true;
            }
        }

        if (lost) res.report.lost.push_back(std::uint32_t(k));
        if (decoded) {
            last_output = rasterize(reference, header_only.width, header_only.height,
                                    header_only.config.background_label);
            res.frames.push_back(*last_output);
        } else {
            gop_valid = false;  // everything until the next I-frame is held
            if (last_output) {
                res.frames.push_back(*last_output);
                res.report.concealed.push_back(std::uint32_t(k));
            } else {
                res.report.absent.push_back(std::uint32_t(k));
            }
        }
    }
    return res;
}

}  // namespace svc

#endif  // SVC_FRAMING_HPP

#ifndef SVC_CODEC_HPP
#define SVC_CODEC_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "svc/bytes.hpp"
#include "svc/contour.hpp"
#include "svc/core.hpp"
#include "svc/frame_coder.hpp"
#include "svc/rangecoder.hpp"
#include "svc/simplify.hpp"

namespace svc {

enum class PFrameMode : std::uint8_t { Strict = 0, Extended = 1 };
enum class FrameType : std::uint8_t { I = 0, P = 1 };

struct CodecConfig {
    double xi = 6.0;
    std::uint32_t q = 256;
    std::uint32_t p = 4;  // I-frame period; 1 means all-I
    Label background_label = 0;
    PFrameMode pframe_mode = PFrameMode::Strict;
    Connectivity connectivity = Connectivity::Four;

    void validate() const {
        if (q < 2 || q > 65536) throw std::invalid_argument("CodecConfig: q must be in [2, 65536]");
        if (p < 1 || p > 255) throw std::invalid_argument("CodecConfig: p must be in [1, 255]");
        Tolerance check(xi);  // range-checks xi
        (void)check;
    }
};

struct EncodedFrame {
    FrameType frame_type = FrameType::I;
    std::vector<std::uint8_t> payload;
    std::uint64_t raw_bit_count = 0;  // always 8 * payload.size()
};

struct EncodedVideo {
    std::uint32_t width = 0;
    std::uint32_t height = 0;
    CodecConfig config;
    std::vector<EncodedFrame> frames;
};

namespace wire {

inline constexpr char kMagic[4] = {'S', 'V', 'C', '1'};
inline constexpr std::uint8_t kVersion = 1;
inline constexpr std::size_t kHeaderBytes = 21;
inline constexpr std::size_t kFrameHeaderBytes = 5;  // type u8 + payload length u32
inline constexpr std::uint32_t kMotionOffset = 32768;
inline constexpr std::uint32_t kMotionAlphabet = 65536;

// Extended-mode P-frame record tags.
inline constexpr std::uint8_t kRecMove = 0;
inline constexpr std::uint8_t kRecRemove = 1;
inline constexpr std::uint8_t kRecAdd = 2;

// Decoder resource limits. Any stream a real encoder can produce for maps up
// to a couple of thousand pixels on a side stays far below these; they exist
// so corrupt headers cannot turn near-zero-cost coded symbols into unbounded
// allocations.
inline constexpr std::uint64_t kMaxFramePoints = 1ull << 24;
inline constexpr std::uint64_t kMaxFrameInstances = 1ull << 20;

}  // namespace wire

/// Exact size of the serialized container in bits: global header, per-frame
/// type and length fields, and the frame payloads.
inline std::uint64_t coded_size_bits(const EncodedVideo& ev) {
    std::uint64_t bytes = wire::kHeaderBytes;
    for (const EncodedFrame& f : ev.frames) bytes += wire::kFrameHeaderBytes + f.payload.size();
    return bytes * 8;
}

// ---------------------------------------------------------------------------
// instance records and frame payloads

namespace detail {

inline void check_i16(std::int64_t v, const char* what) {
    if (v < -32768 || v > 32767)
        throw std::invalid_argument(std::string("encode: ") + what +
                                    " exceeds signed 16-bit range");
}

inline void write_instance_record(ByteWriter& w, const QuantizedContour& qc, std::uint32_t q) {
    if (qc.start.row < 0 || qc.start.row > 65535 || qc.start.col < 0 || qc.start.col > 65535)
        throw std::invalid_argument("encode: start point outside u16 range");
    check_i16(qc.delta_min.row, "delta_min.row");
    check_i16(qc.delta_min.col, "delta_min.col");
    check_i16(qc.delta_max.row, "delta_max.row");
    check_i16(qc.delta_max.col, "delta_max.col");

    w.u16(qc.label);
    w.varint(qc.symbols_row.size() + 1);  // point count
    w.u16(std::uint16_t(qc.start.row));
    w.u16(std::uint16_t(qc.start.col));
    w.i16(std::int16_t(qc.delta_min.row));
    w.i16(std::int16_t(qc.delta_min.col));
    w.i16(std::int16_t(qc.delta_max.row));
    w.i16(std::int16_t(qc.delta_max.col));
    w.bytes(encode_symbols(qc.symbols_row, q).bytes);
    w.bytes(encode_symbols(qc.symbols_col, q).bytes);
}

inline QuantizedContour read_instance_record(ByteReader& r, std::uint32_t q,
                                             std::uint64_t& point_budget) {
    QuantizedContour qc;
    qc.label = r.u16();
    const std::uint64_t point_count = r.varint();
    if (point_count < 1 || point_count > point_budget)
        throw DecodeError("instance point count exceeds the frame budget");
    point_budget -= point_count;
    qc.start = {std::int32_t(r.u16()), std::int32_t(r.u16())};
    qc.delta_min.row = r.i16();
    qc.delta_min.col = r.i16();
    qc.delta_max.row = r.i16();
    qc.delta_max.col = r.i16();
    if (qc.delta_min.row > qc.delta_max.row || qc.delta_min.col > qc.delta_max.col)
        throw DecodeError("instance delta range inverted");

    const std::size_t n = std::size_t(point_count - 1);
    const auto rest = r.peek_rest();
    std::size_t row_bytes = 0, col_bytes = 0;
    qc.symbols_row = decode_symbols_prefix(rest, n, q, row_bytes);
    qc.symbols_col = decode_symbols_prefix(rest.subspan(row_bytes), n, q, col_bytes);
    r.skip(row_bytes + col_bytes);
    return qc;
}

inline QuantizedContour quantize_instance(const InstanceContour& contour, Tolerance xi,
                                          std::uint32_t q) {
    return quantize_deltas(diff_encode(simplify(contour, xi)), q);
}

inline std::vector<std::uint8_t> encode_iframe_payload(const SemanticMap& map,
                                                       const CodecConfig& cfg, Tolerance xi,
                                                       std::vector<InstanceContour>& gt_instances) {
    gt_instances = extract_instances(map, cfg.connectivity);
    ByteWriter w;
    w.varint(gt_instances.size());
    for (const InstanceContour& ic : gt_instances)
        write_instance_record(w, quantize_instance(ic, xi, cfg.q), cfg.q);
    return w.take();
}

inline std::uint64_t frame_point_budget(const EncodedVideo& ev, std::uint64_t instances) {
    // A traced boundary never exceeds 8 * region area + a small slack, so
    // 8 * pixels + 16 * instances bounds any legitimate frame.
    const std::uint64_t pixels = std::uint64_t(ev.width) * ev.height;
    return std::min(8 * pixels + 16 * instances, wire::kMaxFramePoints);
}

inline std::vector<InstanceContour> decode_iframe_payload(std::span<const std::uint8_t> payload,
                                                          const EncodedVideo& ev,
                                                          std::uint32_t frame_index) {
    try {
        ByteReader r(payload);
        const std::uint64_t count = r.varint();
        const std::uint64_t pixels = std::uint64_t(ev.width) * ev.height;
        if (count > std::min(pixels, wire::kMaxFrameInstances))
            throw DecodeError("instance count exceeds decoder limits");
        std::uint64_t budget = frame_point_budget(ev, count);
        std::vector<InstanceContour> out;
        out.reserve(std::size_t(std::min(count, r.remaining() / 15 + 1)));  // record >= 15 bytes
        for (std::uint64_t i = 0; i < count; ++i)
            out.push_back(
                dequantize_and_sum(read_instance_record(r, ev.config.q, budget), ev.config.q));
        if (!r.at_end()) throw DecodeError("trailing bytes after last instance record");
        return out;
    } catch (const DecodeError& e) {
        throw DecodeError(e.what(), frame_index);
    }
}

struct PFrameData {
    std::vector<MotionRecord> moves;
    std::vector<std::uint32_t> removes;            // extended mode only
    std::vector<QuantizedContour> adds;            // extended mode only
};

inline std::vector<std::uint8_t> encode_pframe_payload(const PFrameData& pf, const CodecConfig& cfg) {
    ByteWriter w;
    if (cfg.pframe_mode == PFrameMode::Strict) {
        w.varint(pf.moves.size());
        for (const MotionRecord& m : pf.moves) {
            w.varint(m.instance_index);
            w.u16(m.label);
        }
    } else {
        w.varint(pf.moves.size() + pf.removes.size() + pf.adds.size());
        for (const MotionRecord& m : pf.moves) {
            w.u8(wire::kRecMove);
            w.varint(m.instance_index);
            w.u16(m.label);
        }
        for (const std::uint32_t idx : pf.removes) {
            w.u8(wire::kRecRemove);
            w.varint(idx);
        }
        for (const QuantizedContour& qc : pf.adds) {
            w.u8(wire::kRecAdd);
            write_instance_record(w, qc, cfg.q);
        }
    }
    // Motion components ride in one trailing coded block with one model per
    // axis, biased by +32768 into [0, 65536).
    AdaptiveModel row_model(wire::kMotionAlphabet), col_model(wire::kMotionAlphabet);
    RangeEncoder enc;
    for (const MotionRecord& m : pf.moves) {
        check_i16(m.v.row, "motion v.row");
        check_i16(m.v.col, "motion v.col");
        enc.encode_symbol(row_model, std::uint32_t(m.v.row + std::int32_t(wire::kMotionOffset)));
        enc.encode_symbol(col_model, std::uint32_t(m.v.col + std::int32_t(wire::kMotionOffset)));
    }
    w.bytes(enc.finish());
    return w.take();
}

inline PFrameData decode_pframe_payload(std::span<const std::uint8_t> payload,
                                        const EncodedVideo& ev, std::uint32_t frame_index) {
    try {
        ByteReader r(payload);
        PFrameData pf;
        const std::uint64_t count = r.varint();
        const std::uint64_t pixels = std::uint64_t(ev.width) * ev.height;
        if (count > std::min(pixels, wire::kMaxFrameInstances))
            throw DecodeError("record count exceeds decoder limits");
        std::uint64_t budget = frame_point_budget(ev, count);
        for (std::uint64_t i = 0; i < count; ++i) {
            std::uint8_t tag = wire::kRecMove;
            if (ev.config.pframe_mode == PFrameMode::Extended) tag = r.u8();
            switch (tag) {
                case wire::kRecMove: {
                    MotionRecord m;
                    const std::uint64_t idx = r.varint();
                    if (idx > 0xFFFFFFFFull) throw DecodeError("instance index out of range");
                    m.instance_index = std::uint32_t(idx);
                    m.label = r.u16();
                    pf.moves.push_back(m);
                    break;
                }
                case wire::kRecRemove: {
                    const std::uint64_t idx = r.varint();
                    if (idx > 0xFFFFFFFFull) throw DecodeError("instance index out of range");
                    pf.removes.push_back(std::uint32_t(idx));
                    break;
                }
                case wire::kRecAdd:
                    pf.adds.push_back(read_instance_record(r, ev.config.q, budget));
                    break;
                default:
                    throw DecodeError("unknown P-frame record tag " + std::to_string(tag));
            }
        }
        AdaptiveModel row_model(wire::kMotionAlphabet), col_model(wire::kMotionAlphabet);
        RangeDecoder dec(r.peek_rest());
        for (MotionRecord& m : pf.moves) {
            m.v.row = std::int32_t(dec.decode_symbol(row_model)) - std::int32_t(wire::kMotionOffset);
            m.v.col = std::int32_t(dec.decode_symbol(col_model)) - std::int32_t(wire::kMotionOffset);
        }
        r.skip(dec.bytes_consumed());
        if (!r.at_end()) throw DecodeError("trailing bytes after motion block");
        return pf;
    } catch (const DecodeError& e) {
        throw DecodeError(e.what(), frame_index);
    }
}

/// Applies a decoded P-frame to the reference instance list: moves first,
/// then removals (indices refer to the pre-frame list), then appends.
inline std::vector<InstanceContour> advance_reference(std::span<const InstanceContour> reference,
                                                      const PFrameData& pf, std::uint32_t q,
                                                      std::uint32_t frame_index) {
    for (const MotionRecord& m : pf.moves) {
        if (m.instance_index >= reference.size())
            throw DecodeError("motion record references instance " +
                                  std::to_string(m.instance_index) + " of " +
                                  std::to_string(reference.size()),
                              frame_index);
        if (reference[m.instance_index].label != m.label)
            throw DecodeError("motion record label mismatch", frame_index);
    }
    std::vector<InstanceContour> next;
    try {
        next = apply_motion(reference, pf.moves);
    } catch (const std::invalid_argument& e) {
        throw DecodeError(e.what(), frame_index);
    }
    if (!pf.removes.empty()) {
        std::vector<char> drop(next.size(), 0);
        for (const std::uint32_t idx : pf.removes) {
            if (idx >= next.size()) throw DecodeError("remove record index out of range", frame_index);
            drop[idx] = 1;
        }
        std::vector<InstanceContour> kept;
        kept.reserve(next.size());
        for (std::size_t i = 0; i < next.size(); ++i)
            if (!drop[i]) kept.push_back(std::move(next[i]));
        next = std::move(kept);
    }
    for (const QuantizedContour& qc : pf.adds) next.push_back(dequantize_and_sum(qc, q));
    return next;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// top-level encoder / decoder

inline EncodedVideo encode_video(std::span<const SemanticMap> frames, const CodecConfig& cfg) {
    cfg.validate();
    if (frames.empty()) throw std::invalid_argument("encode_video: no frames");
    const std::uint32_t w = frames[0].width(), h = frames[0].height();
    if (w > 65535 || h > 65535)
        throw std::invalid_argument("encode_video: dimensions exceed u16 range");
    for (const SemanticMap& f : frames)
        if (f.width() != w || f.height() != h)
            throw std::invalid_argument("encode_video: frame dimensions differ");

    const Tolerance xi(cfg.xi);
    EncodedVideo ev;
    ev.width = w;
    ev.height = h;
    ev.config = cfg;
    ev.frames.reserve(frames.size());

    // Encoder-side decoded state, kept in sync by decoding our own output.
    std::vector<InstanceContour> reference;
    // Instances of the previous source frame and the map from their position
    // to the reference list; motion is estimated source-to-source and then
    // retargeted onto reference indices.
    std::vector<InstanceContour> prev_gt;
    std::vector<std::optional<std::uint32_t>> ref_of_gt;

    for (std::size_t k = 0; k < frames.size(); ++k) {
        EncodedFrame ef;
        if (k % cfg.p == 0) {
            ef.frame_type = FrameType::I;
            ef.payload = detail::encode_iframe_payload(frames[k], cfg, xi, prev_gt);
            reference = detail::decode_iframe_payload(ef.payload, ev, std::uint32_t(k));
            ref_of_gt.assign(prev_gt.size(), std::nullopt);
            for (std::size_t i = 0; i < prev_gt.size(); ++i)
                ref_of_gt[i] = std::uint32_t(i);
        } else {
            ef.frame_type = FrameType::P;
            MotionEstimate est = estimate_motion(frames[k - 1], frames[k], prev_gt,
                                                 cfg.connectivity);

            detail::PFrameData pf;
            std::vector<std::optional<std::uint32_t>> next_ref_of_gt(est.cur_instances.size(),
                                                                     std::nullopt);
            for (std::size_t ri = 0; ri < est.records.size(); ++ri) {
                const MotionRecord& m = est.records[ri];
                const auto ref_idx = ref_of_gt[m.instance_index];
                if (!ref_idx) continue;  // instance appeared mid-GOP and is not tracked
                MotionRecord out = m;
                out.instance_index = *ref_idx;
                pf.moves.push_back(out);
                next_ref_of_gt[est.record_cur[ri]] = *ref_idx;
            }
            std::sort(pf.moves.begin(), pf.moves.end(),
                      [](const MotionRecord& a, const MotionRecord& b) {
                          return a.instance_index < b.instance_index;
                      });

            if (cfg.pframe_mode == PFrameMode::Extended) {
                // Drop reference instances whose source counterpart vanished.
                std::vector<char> still_tracked(reference.size(), 0);
                for (const auto& r : next_ref_of_gt)
                    if (r) still_tracked[*r] = 1;
                for (std::size_t i = 0; i < reference.size(); ++i)
                    if (!still_tracked[i]) pf.removes.push_back(std::uint32_t(i));
                // Intra-code instances with no reference counterpart.
                std::vector<std::size_t> additions;
                for (const std::size_t ci : est.unmatched_cur) additions.push_back(ci);
                for (std::size_t ri = 0; ri < est.records.size(); ++ri)
                    if (!ref_of_gt[est.records[ri].instance_index])
                        additions.push_back(est.record_cur[ri]);
                std::sort(additions.begin(), additions.end());
                // Index remap after removals, then appended adds.
                std::vector<std::uint32_t> new_index(reference.size(), 0);
                std::uint32_t next_idx = 0;
                for (std::size_t i = 0; i < reference.size(); ++i)
                    if (still_tracked[i]) new_index[i] = next_idx++;
                for (auto& r : next_ref_of_gt)
                    if (r) r = new_index[*r];
                for (const std::size_t ci : additions) {
                    pf.adds.push_back(detail::quantize_instance(est.cur_instances[ci], xi, cfg.q));
                    next_ref_of_gt[ci] = next_idx++;
                }
            }

            ef.payload = detail::encode_pframe_payload(pf, cfg);
            const detail::PFrameData decoded =
                detail::decode_pframe_payload(ef.payload, ev, std::uint32_t(k));
            reference = detail::advance_reference(reference, decoded, cfg.q, std::uint32_t(k));
            prev_gt = std::move(est.cur_instances);
            ref_of_gt = std::move(next_ref_of_gt);
        }
        ef.raw_bit_count = std::uint64_t(ef.payload.size()) * 8;
        ev.frames.push_back(std::move(ef));
    }
    return ev;
}

/// Decodes frames [first_frame, end). first_frame must be an I-frame; 0
/// replays the whole stream.
inline std::vector<SemanticMap> decode_video(const EncodedVideo& ev, std::uint32_t first_frame = 0) {
    if (ev.frames.empty()) return {};
    if (ev.width < 1 || ev.height < 1) throw DecodeError("invalid frame dimensions in header");
    if (first_frame >= ev.frames.size())
        throw std::invalid_argument("decode_video: first_frame out of range");
    if (ev.frames[first_frame].frame_type != FrameType::I)
        throw DecodeError("decode must start at an I-frame", first_frame);

    std::vector<SemanticMap> out;
    out.reserve(ev.frames.size() - first_frame);
    std::vector<InstanceContour> reference;
    for (std::uint32_t k = first_frame; k < ev.frames.size(); ++k) {
        const EncodedFrame& ef = ev.frames[k];
        if (ef.frame_type == FrameType::I) {
            reference = detail::decode_iframe_payload(ef.payload, ev, k);
        } else {
            const detail::PFrameData pf = detail::decode_pframe_payload(ef.payload, ev, k);
            reference = detail::advance_reference(reference, pf, ev.config.q, k);
        }
        out.push_back(rasterize(reference, ev.width, ev.height, ev.config.background_label));
    }
    return out;
}

// ---------------------------------------------------------------------------
// container serialization

inline std::vector<std::uint8_t> serialize_video(const EncodedVideo& ev) {
    if (ev.width > 65535 || ev.height > 65535)
        throw std::invalid_argument("serialize_video: dimensions exceed u16 range");
    ev.config.validate();
    if (!ev.frames.empty() && ev.frames[0].frame_type != FrameType::I)
        throw std::invalid_argument("serialize_video: frame 0 must be an I-frame");

    ByteWriter w;
    for (const char c : wire::kMagic) w.u8(std::uint8_t(c));
    w.u8(wire::kVersion);
    w.u16(std::uint16_t(ev.width));
    w.u16(std::uint16_t(ev.height));
    w.u32(std::uint32_t(ev.frames.size()));
    w.u16(std::uint16_t(Tolerance(ev.config.xi).fixed()));
    w.u16(std::uint16_t(ev.config.q & 0xFFFF));  // 0 encodes q = 65536
    w.u8(std::uint8_t(ev.config.p));
    w.u16(ev.config.background_label);
    w.u8(std::uint8_t(ev.config.pframe_mode));
    for (const EncodedFrame& f : ev.frames) {
        w.u8(std::uint8_t(f.frame_type));
        w.u32(std::uint32_t(f.payload.size()));
        w.bytes(f.payload);
    }
    return w.take();
}

inline EncodedVideo parse_video(std::span<const std::uint8_t> data) {
    ByteReader r(data, "container: ");
    for (const char c : wire::kMagic)
        if (r.u8() != std::uint8_t(c)) throw DecodeError("bad magic, not an SVC1 stream");
    const std::uint8_t version = r.u8();
    if (version != wire::kVersion)
        throw DecodeError("unsupported format version " + std::to_string(version));

    EncodedVideo ev;
    ev.width = r.u16();
    ev.height = r.u16();
    const std::uint32_t frame_count = r.u32();
    const std::uint16_t xi_fixed = r.u16();
    ev.config.xi = Tolerance::from_fixed(xi_fixed).value();
    const std::uint16_t q16 = r.u16();
    ev.config.q = q16 == 0 ? 65536u : q16;
    ev.config.p = r.u8();
    ev.config.background_label = r.u16();
    const std::uint8_t mode = r.u8();
    if (mode > 1) throw DecodeError("unknown pframe mode " + std::to_string(mode));
    ev.config.pframe_mode = PFrameMode(mode);
    if (ev.width < 1 || ev.height < 1) throw DecodeError("invalid dimensions in header");
    if (ev.config.q < 2) throw DecodeError("invalid q in header");
    if (ev.config.p < 1) throw DecodeError("invalid p in header");

    // each frame needs at least its 5-byte header; avoids reserving on lies
    ev.frames.reserve(std::min<std::size_t>(frame_count, r.remaining() / 5 + 1));
    for (std::uint32_t k = 0; k < frame_count; ++k) {
        EncodedFrame ef;
        std::uint8_t type = 0;
        try {
            type = r.u8();
            if (type > 1) throw DecodeError("unknown frame type " + std::to_string(type));
            ef.frame_type = FrameType(type);
            const std::uint32_t len = r.u32();
            const auto payload = r.bytes(len);
            ef.payload.assign(payload.begin(), payload.end());
        } catch (const DecodeError& e) {
            throw DecodeError(e.what(), k);
        }
        ef.raw_bit_count = std::uint64_t(ef.payload.size()) * 8;
        ev.frames.push_back(std::move(ef));
    }
    if (!r.at_end()) throw DecodeError("trailing bytes after last frame");
    if (!ev.frames.empty() && ev.frames[0].frame_type != FrameType::I)
        throw DecodeError("frame 0 is not an I-frame", 0);
    return ev;
}

}  // namespace svc

#endif  // SVC_CODEC_HPP

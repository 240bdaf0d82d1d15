#ifndef SVC_IO_HPP
#define SVC_IO_HPP

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "svc/bytes.hpp"
#include "svc/core.hpp"

namespace svc {

inline std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::vector<std::uint8_t> data((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
    if (in.bad()) throw std::runtime_error("read failed for " + path.string());
    return data;
}

inline void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot create " + path.string());
    out.write(reinterpret_cast<const char*>(data.data()), std::streamsize(data.size()));
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

// ---------------------------------------------------------------------------
// SMR1: raw semantic map sequence.
//   magic "SMR1" | width u16 | height u16 | frame_count u32 | label_width u8
//   then row-major labels per frame, little-endian when label_width == 2.

inline std::vector<std::uint8_t> write_smr(std::span<const SemanticMap> frames) {
    if (frames.empty()) throw std::invalid_argument("write_smr: no frames");
    const std::uint32_t w = frames[0].width(), h = frames[0].height();
    if (w > 65535 || h > 65535) throw std::invalid_argument("write_smr: dimensions exceed u16");
    std::uint8_t label_width = 1;
    for (const SemanticMap& f : frames) {
        if (f.width() != w || f.height() != h)
            throw std::invalid_argument("write_smr: frame dimensions differ");
        for (const Label l : f.labels())
            if (l > 255) { label_width = 2; break; }
    }

    ByteWriter out;
    out.u8('S');
    out.u8('M');
    out.u8('R');
    out.u8('1');
    out.u16(std::uint16_t(w));
    out.u16(std::uint16_t(h));
    out.u32(std::uint32_t(frames.size()));
    out.u8(label_width);
    for (const SemanticMap& f : frames) {
        for (const Label l : f.labels()) {
            if (label_width == 1)
                out.u8(std::uint8_t(l));
            else
                out.u16(l);
        }
    }
    return out.take();
}

inline std::vector<SemanticMap> read_smr(std::span<const std::uint8_t> data) {
    ByteReader r(data, "SMR1: ");
    if (r.u8() != 'S' || r.u8() != 'M' || r.u8() != 'R' || r.u8() != '1')
        throw DecodeError("SMR1: bad magic");
    const std::uint32_t w = r.u16();
    const std::uint32_t h = r.u16();
    const std::uint32_t n = r.u32();
    const std::uint8_t label_width = r.u8();
    if (w < 1 || h < 1) throw DecodeError("SMR1: invalid dimensions");
    if (label_width != 1 && label_width != 2) throw DecodeError("SMR1: invalid label width");
    const std::uint64_t expect = 13ull + std::uint64_t(w) * h * n * label_width;
    if (data.size() != expect)
        throw DecodeError("SMR1: file size " + std::to_string(data.size()) +
                          " does not match header arithmetic " + std::to_string(expect));

    std::vector<SemanticMap> frames;
    frames.reserve(n);
    for (std::uint32_t k = 0; k < n; ++k) {
        SemanticMap f(w, h);
        for (Label& l : f.labels()) l = label_width == 1 ? r.u8() : r.u16();
        frames.push_back(std::move(f));
    }
    return frames;
}

}  // namespace svc

#endif  // SVC_IO_HPP

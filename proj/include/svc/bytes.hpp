#ifndef SVC_BYTES_HPP
#define SVC_BYTES_HPP

#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <vector>

#include "svc/core.hpp"

namespace svc {

/// Little-endian byte sink with LEB128 varints.
class ByteWriter {
public:
    void u8(std::uint8_t v) { buf_.push_back(v); }
    void u16(std::uint16_t v) {
        buf_.push_back(std::uint8_t(v));
        buf_.push_back(std::uint8_t(v >> 8));
    }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) buf_.push_back(std::uint8_t(v >> (8 * i)));
    }
    void i16(std::int16_t v) { u16(std::uint16_t(v)); }
    void varint(std::uint64_t v) {
        while (v >= 0x80) {
            buf_.push_back(std::uint8_t(v) | 0x80);
            v >>= 7;
        }
        buf_.push_back(std::uint8_t(v));
    }
    void bytes(std::span<const std::uint8_t> data) {
        buf_.insert(buf_.end(), data.begin(), data.end());
    }

    const std::vector<std::uint8_t>& data() const { return buf_; }
    std::vector<std::uint8_t> take() { return std::move(buf_); }
    std::size_t size() const { return buf_.size(); }

private:
    std::vector<std::uint8_t> buf_;
};

/// Bounds-checked little-endian reader over a borrowed byte span. All reads
/// throw DecodeError past the end.
class ByteReader {
public:
    explicit ByteReader(std::span<const std::uint8_t> data, std::string context = {})
        : data_(data), context_(std::move(context)) {}

    std::uint8_t u8() {
        need(1);
        return data_[pos_++];
    }
    std::uint16_t u16() {
        need(2);
        const std::uint16_t v = std::uint16_t(data_[pos_] | (data_[pos_ + 1] << 8));
        pos_ += 2;
        return v;
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= std::uint32_t(data_[pos_ + std::size_t(i)]) << (8 * i);
        pos_ += 4;
        return v;
    }
    std::int16_t i16() { return std::int16_t(u16()); }
    std::uint64_t varint() {
        std::uint64_t v = 0;
        for (int shift = 0; shift < 64; shift += 7) {
            const std::uint8_t b = u8();
            v |= std::uint64_t(b & 0x7F) << shift;
            if (!(b & 0x80)) return v;
        }
        throw DecodeError(context_ + "varint too long");
    }
    std::span<const std::uint8_t> bytes(std::size_t count) {
        need(count);
        auto s = data_.subspan(pos_, count);
        pos_ += count;
        return s;
    }
    std::span<const std::uint8_t> peek_rest() const { return data_.subspan(pos_); }
    void skip(std::size_t count) {
        need(count);
        pos_ += count;
    }

    std::size_t pos() const { return pos_; }
    std::size_t remaining() const { return data_.size() - pos_; }
    bool at_end() const { return pos_ == data_.size(); }

private:
    void need(std::size_t n) const {
        if (data_.size() - pos_ < n) throw DecodeError(context_ + "truncated input");
    }

    std::span<const std::uint8_t> data_;
    std::size_t pos_ = 0;
    std::string context_;
};

}  // namespace svc

#endif  // SVC_BYTES_HPP

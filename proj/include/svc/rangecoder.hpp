#ifndef SVC_RANGECODER_HPP
#define SVC_RANGECODER_HPP

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "svc/core.hpp"

namespace svc {

/// Entropy-coded payload. The range coder emits whole bytes, so bit_length
/// is always 8 * bytes.size(); trailing pad bits are zero by construction.
struct Bitstream {
    std::vector<std::uint8_t> bytes;
    std::uint64_t bit_length = 0;
};

/// Adaptive order-0 frequency model over [0, alphabet). Counts start at one,
/// grow by 32 per coded symbol, and are halved (floored at one) when the
/// total would exceed 2^16 — the coder's precision budget. A Fenwick tree
/// keeps cumulative lookups logarithmic even for 2^16-symbol alphabets.
class AdaptiveModel {
public:
    static constexpr std::uint32_t kIncrement = 32;
    static constexpr std::uint32_t kMaxTotal = 1u << 16;

    explicit AdaptiveModel(std::uint32_t alphabet) : size_(alphabet) {
        if (alphabet < 2 || alphabet > kMaxTotal)
            throw std::invalid_argument("AdaptiveModel: alphabet must be in [2, 65536]");
        counts_.assign(size_, 1);
        tree_.assign(std::size_t(size_) + 1, 0);
        for (std::uint32_t i = 1; i <= size_; ++i) tree_[i] = i & (0u - i);  // all-ones tree
        total_ = size_;
        top_ = 1;
        while ((top_ << 1) <= size_) top_ <<= 1;
    }

    std::uint32_t alphabet() const { return size_; }
    std::uint32_t total() const { return total_; }

    std::uint32_t cum(std::uint32_t symbol) const {  // sum of counts below symbol
        std::uint32_t s = 0;
        for (std::uint32_t i = symbol; i > 0; i -= i & (0u - i)) s += tree_[i];
        return s;
    }
    std::uint32_t freq(std::uint32_t symbol) const { return counts_[symbol]; }

    /// Largest symbol whose cumulative count is <= target; also reports that
    /// cumulative count. Valid for target < total().
    std::uint32_t find(std::uint32_t target, std::uint32_t& cum_low) const {
        std::uint32_t idx = 0, rem = target;
        for (std::uint32_t mask = top_; mask; mask >>= 1) {
            const std::uint32_t next = idx + mask;
            if (next <= size_ && tree_[next] <= rem) {
                rem -= tree_[next];
                idx = next;
            }
        }
        cum_low = target - rem;
        return idx;
    }

    void update(std::uint32_t symbol) {
        if (total_ + kIncrement > kMaxTotal && total_ > size_) rescale();
        const std::uint32_t inc =
            total_ + kIncrement > kMaxTotal ? kMaxTotal - total_ : kIncrement;
        if (inc == 0) return;  // alphabet fills the budget; model stays static
        counts_[symbol] += inc;
        total_ += inc;
        for (std::uint32_t i = symbol + 1; i <= size_; i += i & (0u - i)) tree_[i] += inc;
    }

private:
    void rescale() {
        total_ = 0;
        for (std::uint32_t s = 0; s < size_; ++s) {
            counts_[s] = counts_[s] > 1 ? counts_[s] >> 1 : 1;
            total_ += counts_[s];
        }
        for (std::uint32_t i = 1; i <= size_; ++i) {
            tree_[i] = counts_[i - 1];
            // fold child ranges upward
        }
        for (std::uint32_t i = 1; i <= size_; ++i) {
            const std::uint32_t parent = i + (i & (0u - i));
            if (parent <= size_) tree_[parent] += tree_[i];
        }
    }

    std::uint32_t size_;
    std::uint32_t total_ = 0;
    std::uint32_t top_ = 1;
    std::vector<std::uint32_t> counts_;
    std::vector<std::uint32_t> tree_;
};

/// Carry-less 32-bit range encoder with byte renormalization and a four-byte
/// flush. Integer-only, so output is identical across platforms.
class RangeEncoder {
public:
    static constexpr std::uint32_t kTop = 1u << 24;
    static constexpr std::uint32_t kBot = 1u << 16;

    void encode(std::uint32_t cum_low, std::uint32_t freq, std::uint32_t total) {
        const std::uint32_t r = range_ / total;
        low_ += r * cum_low;
        range_ = r * freq;
        normalize();
    }

    void encode_symbol(AdaptiveModel& model, std::uint32_t symbol) {
        encode(model.cum(symbol), model.freq(symbol), model.total());
        model.update(symbol);
    }

    std::vector<std::uint8_t> finish() {
        for (int i = 0; i < 4; ++i) {
            out_.push_back(std::uint8_t(low_ >> 24));
            low_ <<= 8;
        }
        return std::move(out_);
    }

    std::size_t pending_bytes() const { return out_.size(); }

private:
    void normalize() {
        for (;;) {
            if ((low_ ^ (low_ + range_)) >= kTop) {
                if (range_ >= kBot) break;
                range_ = (0u - low_) & (kBot - 1);
            }
            out_.push_back(std::uint8_t(low_ >> 24));
            low_ <<= 8;
            range_ <<= 8;
        }
    }

    std::uint32_t low_ = 0;
    std::uint32_t range_ = 0xFFFFFFFFu;
    std::vector<std::uint8_t> out_;
};

/// Decoder mirror of RangeEncoder. Consumes exactly as many bytes as the
/// encoder produced for the same symbol sequence, so coded blocks can sit
/// back to back in a payload. Reads past the input are a DecodeError.
class RangeDecoder {
public:
    explicit RangeDecoder(std::span<const std::uint8_t> data) : data_(data) {
        for (int i = 0; i < 4; ++i) code_ = (code_ << 8) | next_byte();
    }

    std::uint32_t decode_target(std::uint32_t total) {
        r_ = range_ / total;
        const std::uint32_t t = (code_ - low_) / r_;
        return t < total ? t : total - 1;
    }

    void decode_update(std::uint32_t cum_low, std::uint32_t freq) {
        low_ += r_ * cum_low;
        range_ = r_ * freq;
        normalize();
    }

    std::uint32_t decode_symbol(AdaptiveModel& model) {
        const std::uint32_t target = decode_target(model.total());
        std::uint32_t cum_low = 0;
        const std::uint32_t symbol = model.find(target, cum_low);
        decode_update(cum_low, model.freq(symbol));
        model.update(symbol);
        return symbol;
    }

    std::size_t bytes_consumed() const { return pos_; }

private:
    std::uint8_t next_byte() {
        if (pos_ >= data_.size()) throw DecodeError("range coder ran past end of payload");
        return data_[pos_++];
    }

    void normalize() {
        for (;;) {
            if ((low_ ^ (low_ + range_)) >= RangeEncoder::kTop) {
                if (range_ >= RangeEncoder::kBot) break;
                range_ = (0u - low_) & (RangeEncoder::kBot - 1);
            }
            code_ = (code_ << 8) | next_byte();
            low_ <<= 8;
            range_ <<= 8;
        }
    }

    std::span<const std::uint8_t> data_;
    std::size_t pos_ = 0;
    std::uint32_t low_ = 0;
    std::uint32_t range_ = 0xFFFFFFFFu;
    std::uint32_t code_ = 0;
    std::uint32_t r_ = 1;
};

/// Encodes `symbols` (all < alphabet) with a fresh adaptive model.
inline Bitstream encode_symbols(std::span<const std::uint32_t> symbols, std::uint32_t alphabet) {
    AdaptiveModel model(alphabet);
    RangeEncoder enc;
    for (const std::uint32_t s : symbols) {
        if (s >= alphabet) throw std::invalid_argument("encode_symbols: symbol out of range");
        enc.encode_symbol(model, s);
    }
    Bitstream out;
    out.bytes = enc.finish();
    out.bit_length = std::uint64_t(out.bytes.size()) * 8;
    return out;
}

/// Decodes `count` symbols from the front of `data`, reporting how many
/// bytes the coded block occupied.
inline std::vector<std::uint32_t> decode_symbols_prefix(std::span<const std::uint8_t> data,
                                                        std::size_t count, std::uint32_t alphabet,
                                                        std::size_t& consumed) {
    AdaptiveModel model(alphabet);
    RangeDecoder dec(data);
    std::vector<std::uint32_t> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(dec.decode_symbol(model));
    consumed = dec.bytes_consumed();
    return out;
}

/// Exact inverse of encode_symbols; the bitstream must contain the coded
/// block and nothing else.
inline std::vector<std::uint32_t> decode_symbols(const Bitstream& bits, std::size_t count,
                                                 std::uint32_t alphabet) {
    std::size_t consumed = 0;
    auto out = decode_symbols_prefix(bits.bytes, count, alphabet, consumed);
    if (consumed != bits.bytes.size())
        throw DecodeError("coded block length mismatch: trailing bytes after last symbol");
    return out;
}

}  // namespace svc

#endif  // SVC_RANGECODER_HPP

#ifndef SVC_CORE_HPP
#define SVC_CORE_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace svc {

using Label = std::uint16_t;

/// Integer pixel coordinate, (row, col) order, row grows downward.
struct Point {
    std::int32_t row = 0;
    std::int32_t col = 0;

    friend constexpr bool operator==(const Point&, const Point&) = default;
    friend constexpr auto operator<=>(const Point&, const Point&) = default;

    friend constexpr Point operator+(Point a, Point b) { return {a.row + b.row, a.col + b.col}; }
    friend constexpr Point operator-(Point a, Point b) { return {a.row - b.row, a.col - b.col}; }
};

/// Chebyshev adjacency; distance 0 (same pixel) counts as adjacent.
constexpr bool are_8_neighbors(Point a, Point b) {
    const auto dr = a.row > b.row ? a.row - b.row : b.row - a.row;
    const auto dc = a.col > b.col ? a.col - b.col : b.col - a.col;
    return dr <= 1 && dc <= 1;
}

/// Dense per-pixel class-label grid, row-major.
class SemanticMap {
public:
    SemanticMap(std::uint32_t width, std::uint32_t height)
        : width_(width), height_(height), labels_(std::size_t(width) * height, 0) {
        validate_dims(width, height);
    }

    SemanticMap(std::uint32_t width, std::uint32_t height, std::vector<Label> labels)
        : width_(width), height_(height), labels_(std::move(labels)) {
        validate_dims(width, height);
        if (labels_.size() != std::size_t(width) * height)
            throw std::invalid_argument("SemanticMap: label count does not match width*height");
    }

    std::uint32_t width() const { return width_; }
    std::uint32_t height() const { return height_; }
    std::size_t pixel_count() const { return labels_.size(); }

    Label at(std::int64_t row, std::int64_t col) const {
        return labels_[std::size_t(row) * width_ + std::size_t(col)];
    }
    Label& at(std::int64_t row, std::int64_t col) {
        return labels_[std::size_t(row) * width_ + std::size_t(col)];
    }

    bool in_bounds(std::int64_t row, std::int64_t col) const {
        return row >= 0 && col >= 0 && row < std::int64_t(height_) && col < std::int64_t(width_);
    }
    bool in_bounds(Point p) const { return in_bounds(p.row, p.col); }

    const std::vector<Label>& labels() const { return labels_; }
    std::vector<Label>& labels() { return labels_; }

    friend bool operator==(const SemanticMap& a, const SemanticMap& b) {
        return a.width_ == b.width_ && a.height_ == b.height_ && a.labels_ == b.labels_;
    }

private:
    static void validate_dims(std::uint32_t w, std::uint32_t h) {
        if (w < 1 || h < 1) throw std::invalid_argument("SemanticMap: dimensions must be >= 1");
    }

    std::uint32_t width_;
    std::uint32_t height_;
    std::vector<Label> labels_;
};

/// One connected instance: class label plus its outer boundary traced
/// clockwise. `area` is the pixel count of the source region when produced
/// by extraction, and the filled-polygon pixel count when produced by the
/// decoder.
struct InstanceContour {
    Label label = 0;
    std::vector<Point> points;
    std::int64_t area = 0;
};

/// Raised on malformed or truncated coded input. Carries the frame index
/// when the failure is attributable to one frame.
class DecodeError : public std::runtime_error {
public:
    explicit DecodeError(const std::string& what, std::optional<std::uint32_t> frame = std::nullopt)
        : std::runtime_error(frame ? ("frame " + std::to_string(*frame) + ": " + what) : what),
          frame_(frame) {}

    std::optional<std::uint32_t> frame_index() const { return frame_; }

private:
    std::optional<std::uint32_t> frame_;
};

}  // namespace svc

#endif  // SVC_CORE_HPP

#ifndef SVC_SIMPLIFY_HPP
#define SVC_SIMPLIFY_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "svc/core.hpp"

namespace svc {

/// Maximum allowed perpendicular deviation, in pixels. Stored as a x256
/// fixed-point value so tolerance comparisons stay in exact integer
/// arithmetic and match the serialized form bit for bit.
class Tolerance {
public:
    Tolerance() = default;

    explicit Tolerance(double xi) {
        if (!(xi >= 0.0)) throw std::invalid_argument("Tolerance: xi must be >= 0");
        if (xi > 255.996) throw std::invalid_argument("Tolerance: xi exceeds fixed-point range");
        fp_ = std::uint32_t(std::lround(xi * 256.0));
    }

    static Tolerance from_fixed(std::uint16_t fp) {
        Tolerance t;
        t.fp_ = fp;
        return t;
    }

    double value() const { return double(fp_) / 256.0; }
    std::uint32_t fixed() const { return fp_; }
    bool is_zero() const { return fp_ == 0; }

private:
    std::uint32_t fp_ = 0;
};

namespace detail {

using Wide = __int128;

// Squared distance from p to the segment [a, b] as an exact rational
// (num / den): the projection is clamped to the endpoints, so dropped points
// satisfy a true Hausdorff bound, not just a line-distance one.
inline std::pair<Wide, std::int64_t> deviation_ratio(Point p, Point a, Point b) {
    const std::int64_t abr = b.row - a.row, abc = b.col - a.col;
    const std::int64_t apr = p.row - a.row, apc = p.col - a.col;
    const std::int64_t len2 = abr * abr + abc * abc;
    if (len2 == 0) return {Wide(apr) * apr + Wide(apc) * apc, 1};
    const std::int64_t dot = apr * abr + apc * abc;
    if (dot <= 0) return {Wide(apr) * apr + Wide(apc) * apc, 1};
    if (dot >= len2) {
        const std::int64_t bpr = p.row - b.row, bpc = p.col - b.col;
        return {Wide(bpr) * bpr + Wide(bpc) * bpc, 1};
    }
    const std::int64_t cross = abr * apc - abc * apr;
    return {Wide(cross) * cross, len2};
}

// True when the deviation of p from segment [a, b] is >= xi, with xi =
// fp/256; the comparison is exact in wide integers and equality keeps the
// point.
inline bool deviation_reaches(Point p, Point a, Point b, std::uint32_t fp) {
    const auto [num, den] = deviation_ratio(p, a, b);
    const Wide fp2 = Wide(std::int64_t(fp)) * std::int64_t(fp);
    return num * 65536 >= fp2 * den;
}

// Douglas-Peucker over pts[first..last], keeping both endpoints. The split
// point is always the true argmax (first index wins ties), so the retained
// set is monotone in the tolerance.
inline void dp_recurse(std::span<const Point> pts, std::size_t first, std::size_t last,
                       std::uint32_t fp, std::vector<char>& keep) {
    std::vector<std::pair<std::size_t, std::size_t>> stack{{first, last}};
    while (!stack.empty()) {
        const auto [lo, hi] = stack.back();
        stack.pop_back();
        if (hi <= lo + 1) continue;
        std::size_t split = 0;
        Wide best_num = -1;
        std::int64_t best_den = 1;
        for (std::size_t i = lo + 1; i < hi; ++i) {
            const auto [num, den] = deviation_ratio(pts[i], pts[lo], pts[hi]);
            if (best_num < 0 || num * best_den > best_num * den) {
                best_num = num;
                best_den = den;
                split = i;
            }
        }
        if (deviation_reaches(pts[split], pts[lo], pts[hi], fp)) {
            keep[split] = 1;
            stack.push_back({lo, split});
            stack.push_back({split, hi});
        }
    }
}

inline std::size_t count_distinct(std::span<const Point> pts) {
    std::vector<Point> sorted(pts.begin(), pts.end());
    std::sort(sorted.begin(), sorted.end());
    return std::size_t(std::unique(sorted.begin(), sorted.end()) - sorted.begin());
}

}  // namespace detail

/// Tolerance-xi simplification of a closed contour. The output is an ordered
/// subsequence of the input that keeps the start point; every dropped point
/// lies within perpendicular distance xi of the segment joining its
/// surviving neighbors. The contour is anchored at index 0 and at the point
/// farthest from it, then each open half is simplified independently.
/// xi = 0 returns the input verbatim.
inline InstanceContour simplify(const InstanceContour& contour, Tolerance xi) {
    if (contour.points.empty()) throw std::invalid_argument("simplify: empty contour");
    if (xi.is_zero()) return contour;

    const std::span<const Point> pts(contour.points);
    const std::size_t n = pts.size();
    if (n < 3 || detail::count_distinct(pts) < 3) return contour;

    // Farthest point from the start, first index on ties.
    std::size_t far = 1;
    std::int64_t far_d2 = -1;
    for (std::size_t i = 1; i < n; ++i) {
        const std::int64_t dr = pts[i].row - pts[0].row, dc = pts[i].col - pts[0].col;
        const std::int64_t d2 = dr * dr + dc * dc;
        if (d2 > far_d2) {
            far_d2 = d2;
            far = i;
        }
    }

    std::vector<char> keep(n, 0);
    keep[0] = keep[far] = 1;
    detail::dp_recurse(pts, 0, far, xi.fixed(), keep);
    // Second half wraps around; run it on a rotated copy ending at index 0.
    {
        std::vector<Point> half(pts.begin() + std::ptrdiff_t(far), pts.end());
        half.push_back(pts[0]);
        std::vector<char> hkeep(half.size(), 0);
        hkeep[0] = 1;
        hkeep[half.size() - 1] = 1;
        detail::dp_recurse(half, 0, half.size() - 1, xi.fixed(), hkeep);
        for (std::size_t i = 1; i + 1 < half.size(); ++i)
            if (hkeep[i]) keep[far + i] = 1;
    }

    InstanceContour out;
    out.label = contour.label;
    out.area = contour.area;
    for (std::size_t i = 0; i < n; ++i)
        if (keep[i]) out.points.push_back(pts[i]);

    // A polygon needs at least three vertices; when both halves collapse to
    // their chords, reinstate the globally most deviant interior point.
    if (out.points.size() < 3) {
        std::size_t best = 0;
        detail::Wide best_num = -1;
        std::int64_t best_den = 1;
        for (std::size_t i = 1; i < n; ++i) {
            if (i == far) continue;
            const auto [num, den] = detail::deviation_ratio(pts[i], pts[0], pts[far]);
            if (best_num < 0 || num * best_den > best_num * den) {
                best_num = num;
                best_den = den;
                best = i;
            }
        }
        if (best != 0) {
            keep[best] = 1;
            out.points.clear();
            for (std::size_t i = 0; i < n; ++i)
                if (keep[i]) out.points.push_back(pts[i]);
        }
    }
    return out;
}

}  // namespace svc

#endif  // SVC_SIMPLIFY_HPP

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>

#include "svc/contour.hpp"
#include "svc/simplify.hpp"
#include "test_support.hpp"

using namespace svc;
using namespace svc_test;

namespace {

InstanceContour make_contour(std::vector<Point> pts, Label label = 1) {
    InstanceContour ic;
    ic.label = label;
    ic.points = std::move(pts);
    ic.area = std::int64_t(ic.points.size());
    return ic;
}

std::vector<Point> rect_boundary(int rows, int cols) {  // clockwise from (0,0)
    std::vector<Point> pts;
    for (int c = 0; c < cols; ++c) pts.push_back({0, c});
    for (int r = 1; r < rows; ++r) pts.push_back({r, cols - 1});
    for (int c = cols - 2; c >= 0; --c) pts.push_back({rows - 1, c});
    for (int r = rows - 2; r >= 1; --r) pts.push_back({r, 0});
    return pts;
}

bool is_subsequence(const std::vector<Point>& sub, const std::vector<Point>& full) {
    std::size_t j = 0;
    for (const Point& p : full)
        if (j < sub.size() && sub[j] == p) ++j;
    return j == sub.size();
}

// Exact squared point-to-segment distance as a rational against xi^2.
bool within_tolerance(Point p, Point a, Point b, std::uint32_t fp) {
    const std::int64_t abr = b.row - a.row, abc = b.col - a.col;
    const std::int64_t len2 = abr * abr + abc * abc;
    using W = __int128;
    const W fp2 = W(std::int64_t(fp)) * std::int64_t(fp);
    if (len2 == 0) {
        const std::int64_t dr = p.row - a.row, dc = p.col - a.col;
        return (W(dr) * dr + W(dc) * dc) * 65536 <= fp2;
    }
    // distance to the segment: clamp the projection to the endpoints
    const std::int64_t apr = p.row - a.row, apc = p.col - a.col;
    const std::int64_t dot = apr * abr + apc * abc;
    if (dot <= 0) return (W(apr) * apr + W(apc) * apc) * 65536 <= fp2;
    if (dot >= len2) {
        const std::int64_t bpr = p.row - b.row, bpc = p.col - b.col;
        return (W(bpr) * bpr + W(bpc) * bpc) * 65536 <= fp2;
    }
    const std::int64_t cross = abr * apc - abc * apr;
    return W(cross) * cross * 65536 <= fp2 * len2;
}

// Hausdorff-style bound: every input point within xi of some output segment.
void check_deviation(const InstanceContour& in, const InstanceContour& out, Tolerance xi) {
    for (const Point& p : in.points) {
        bool ok = false;
        for (std::size_t i = 0; i < out.points.size() && !ok; ++i) {
            const Point a = out.points[i];
            const Point b = out.points[(i + 1) % out.points.size()];
            ok = within_tolerance(p, a, b, xi.fixed());
        }
        REQUIRE(ok);
    }
}

// Stronger per-point form: a dropped point stays within xi of the segment
// joining its surviving neighbors. Only meaningful when the subsequence
// embedding is unambiguous, so contours with repeated points are skipped.
void check_enclosing_segment(const InstanceContour& in, const InstanceContour& out, Tolerance xi) {
    std::vector<Point> sorted = in.points;
    std::sort(sorted.begin(), sorted.end());
    if (std::unique(sorted.begin(), sorted.end()) != sorted.end()) return;

    std::size_t j = 0;  // index into out, tracking the subsequence match
    for (std::size_t i = 0; i < in.points.size(); ++i) {
        if (j < out.points.size() && in.points[i] == out.points[j]) {
            ++j;
            continue;
        }
        const Point a = out.points[(j + out.points.size() - 1) % out.points.size()];
        const Point b = out.points[j % out.points.size()];
        REQUIRE(within_tolerance(in.points[i], a, b, xi.fixed()));
    }
}

std::vector<InstanceContour> random_contours(std::mt19937_64& rng, int count) {
    std::vector<InstanceContour> out;
    while (int(out.size()) < count) {
        const std::uint32_t w = 8 + std::uint32_t(rand_below(rng, 40));
        const std::uint32_t h = 8 + std::uint32_t(rand_below(rng, 40));
        for (auto& ic : extract_instances(random_blob_map(rng, w, h, 5, 3)))
            if (ic.points.size() >= 4) out.push_back(std::move(ic));
    }
    out.resize(std::size_t(count));
    return out;
}

}  // namespace

TEST_CASE("zero tolerance is the exact identity") {
    const auto ic = make_contour(rect_boundary(6, 9));
    const auto s = simplify(ic, Tolerance(0.0));
    CHECK(s.points == ic.points);

    // even exactly collinear interior points survive at xi = 0
    const auto line = make_contour({{0, 0}, {0, 1}, {0, 2}, {1, 2}, {1, 1}, {1, 0}});
    CHECK(simplify(line, Tolerance(0.0)).points == line.points);
}

TEST_CASE("collinear runs collapse to their endpoints") {
    const auto ic = make_contour(rect_boundary(10, 10));
    const auto s = simplify(ic, Tolerance(1.0));
    CHECK(s.points == std::vector<Point>{{0, 0}, {0, 9}, {9, 9}, {9, 0}});
}

TEST_CASE("the 12-point square keeps its corners at xi = 0.5") {
    const std::vector<Point> square = {{2, 2}, {2, 3}, {2, 4}, {2, 5}, {3, 5}, {4, 5},
                                       {5, 5}, {5, 4}, {5, 3}, {5, 2}, {4, 2}, {3, 2}};
    const auto s = simplify(make_contour(square), Tolerance(0.5));
    CHECK(s.points == std::vector<Point>{{2, 2}, {2, 5}, {5, 5}, {5, 2}});
}

TEST_CASE("tiny contours pass through unchanged") {
    const auto one = make_contour({{3, 3}});
    CHECK(simplify(one, Tolerance(5)).points == one.points);
    const auto bar = make_contour({{0, 0}, {0, 1}});
    CHECK(simplify(bar, Tolerance(5)).points == bar.points);
    // three points but only two distinct
    const auto thin = make_contour({{0, 0}, {0, 1}, {0, 0}});
    CHECK(simplify(thin, Tolerance(5)).points == thin.points);
}

TEST_CASE("at least three points survive for a real polygon") {
    // a flat-ish triangle that an unanchored simplifier would collapse
    const auto ic = make_contour({{0, 0}, {0, 4}, {0, 8}, {1, 4}});
    const auto s = simplify(ic, Tolerance(3.0));
    REQUIRE(s.points.size() >= 3);
    CHECK(is_subsequence(s.points, ic.points));
}

TEST_CASE("exact-tolerance points are kept") {
    // interior point exactly xi away from the chord
    const auto ic = make_contour({{0, 0}, {2, 4}, {0, 8}, {-3, 4}});
    const auto s = simplify(ic, Tolerance(2.0));  // deviation of (2,4) from (0,0)-(0,8) is exactly 2
    bool kept = false;
    for (const Point& p : s.points) kept = kept || p == Point{2, 4};
    CHECK(kept);
}

TEST_CASE("simplification properties hold on traced contours") {
    std::mt19937_64 rng(8101);
    const auto contours = random_contours(rng, 40);
    const double xis[] = {0.5, 1.0, 2.0, 3.5, 6.0, 12.0};

    for (const auto& ic : contours) {
        std::size_t prev_size = std::size_t(-1);
        for (const double x : xis) {
            const Tolerance xi(x);
            const auto s = simplify(ic, xi);

            CHECK(is_subsequence(s.points, ic.points));
            CHECK(s.points.front() == ic.points.front());
            check_deviation(ic, s, xi);
            check_enclosing_segment(ic, s, xi);

            // monotone point count across increasing tolerance
            CHECK(s.points.size() <= prev_size);
            prev_size = s.points.size();

            // idempotence
            const auto twice = simplify(s, xi);
            CHECK(twice.points == s.points);
        }
    }
}

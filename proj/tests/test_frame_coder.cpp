#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "svc/contour.hpp"
#include "svc/frame_coder.hpp"
#include "test_support.hpp"

using namespace svc;
using namespace svc_test;

namespace {

InstanceContour contour_of(std::vector<Point> pts, Label label = 1) {
    InstanceContour ic;
    ic.label = label;
    ic.points = std::move(pts);
    ic.area = std::int64_t(ic.points.size());
    return ic;
}

// Nearest quantizer level by exhaustive search; ties go to the larger index
// to match half-up rounding.
std::uint32_t oracle_nearest_level(std::int64_t v, std::int64_t mn, std::int64_t mx,
                                   std::int64_t q) {
    if (mx - mn + 1 <= q) return std::uint32_t(v - mn);
    std::uint32_t best = 0;
    double best_err = 1e300;
    for (std::int64_t i = 0; i < q; ++i) {
        const double level = double(mn) + double(i) * double(mx - mn) / double(q - 1);
        const double err = std::abs(double(v) - level);
        if (err < best_err - 1e-9) {
            best_err = err;
            best = std::uint32_t(i);
        } else if (err <= best_err + 1e-9) {
            best = std::uint32_t(i);  // half-up: ties go to the upper level
        }
    }
    return best;
}

SemanticMap translated(const SemanticMap& src, Point t, Label bg) {
    SemanticMap out(src.width(), src.height());
    std::fill(out.labels().begin(), out.labels().end(), bg);
    for (std::int64_t r = 0; r < src.height(); ++r)
        for (std::int64_t c = 0; c < src.width(); ++c) {
            if (src.at(r, c) == bg) continue;
            const std::int64_t nr = r + t.row, nc = c + t.col;
            if (out.in_bounds(nr, nc)) out.at(nr, nc) = src.at(r, c);
        }
    return out;
}

}  // namespace

TEST_CASE("differential encoding stores start plus increments") {
    const auto d = diff_encode(contour_of({{2, 2}, {2, 5}, {5, 5}}));
    CHECK(d.start == Point{2, 2});
    CHECK(d.deltas == std::vector<Point>{{0, 3}, {3, 0}});

    const auto single = diff_encode(contour_of({{4, 1}}));
    CHECK(single.start == Point{4, 1});
    CHECK(single.deltas.empty());

    SemanticMap m(8, 8);
    for (int r = 2; r <= 5; ++r)
        for (int c = 2; c <= 5; ++c) m.at(r, c) = 7;
    const auto square = extract_instances(m)[1];
    const auto ds = diff_encode(square);
    REQUIRE(ds.deltas.size() == 11);
    for (const Point& p : ds.deltas) {
        CHECK(std::abs(p.row) <= 1);
        CHECK(std::abs(p.col) <= 1);
    }

    // cumulative summation is the exact inverse
    Point acc = ds.start;
    for (std::size_t i = 0; i < ds.deltas.size(); ++i) {
        acc = acc + ds.deltas[i];
        CHECK(acc == square.points[i + 1]);
    }
}

TEST_CASE("quantizer is the identity shift when the range fits") {
    DifferentialContour d;
    d.label = 1;
    d.start = {0, 0};
    for (int i = -100; i <= 100; ++i) d.deltas.push_back({i, 0});
    const auto qc = quantize_deltas(d, 256);
    CHECK(qc.delta_min.row == -100);
    CHECK(qc.delta_max.row == 100);
    CHECK(qc.symbols_row[97] == 97);  // delta -3 at index 97
    CHECK(d.deltas[97].row == -3);

    const auto back = dequantize_and_sum(qc, 256);
    for (std::size_t i = 0; i < d.deltas.size(); ++i)
        CHECK(back.points[i + 1] - back.points[i] == d.deltas[i]);
}

TEST_CASE("saturated quantizer matches the stated formula") {
    DifferentialContour d;
    d.label = 1;
    d.start = {0, 0};
    d.deltas = {{-300, 0}, {300, 0}, {0, 0}};
    const auto qc = quantize_deltas(d, 256);
    CHECK(qc.delta_min.row == -300);
    CHECK(qc.delta_max.row == 300);
    CHECK(qc.symbols_row[2] == 128);  // delta 0 lands mid-scale

    // dequantized value: -300 + round(128 * 600 / 255) = 1
    const auto back = dequantize_and_sum(qc, 256);
    CHECK(back.points[3].row - back.points[2].row == 1);
}

TEST_CASE("all-equal deltas quantize to symbol zero exactly") {
    DifferentialContour d;
    d.label = 1;
    d.start = {5, 5};
    d.deltas.assign(10, Point{2, -1});
    const auto qc = quantize_deltas(d, 16);
    CHECK(qc.delta_min == Point{2, -1});
    CHECK(qc.delta_max == Point{2, -1});
    for (const auto s : qc.symbols_row) CHECK(s == 0);
    for (const auto s : qc.symbols_col) CHECK(s == 0);
    const auto back = dequantize_and_sum(qc, 16);
    CHECK(back.points.back() == Point{25, -5});
}

TEST_CASE("quantizer agrees with a brute-force nearest-level search") {
    std::mt19937_64 rng(4177);
    for (int iter = 0; iter < 30; ++iter) {
        const std::int64_t q = 2 + std::int64_t(rand_below(rng, 62));
        DifferentialContour d;
        d.start = {0, 0};
        const std::int64_t span = 1 + std::int64_t(rand_below(rng, 700));
        for (int i = 0; i < 60; ++i)
            d.deltas.push_back({std::int32_t(std::int64_t(rand_below(rng, span * 2 + 1)) - span), 0});
        const auto qc = quantize_deltas(d, std::uint32_t(q));
        for (std::size_t i = 0; i < d.deltas.size(); ++i)
            CHECK(qc.symbols_row[i] ==
                  oracle_nearest_level(d.deltas[i].row, qc.delta_min.row, qc.delta_max.row, q));
    }
}

TEST_CASE("per-delta reconstruction error is bounded by half a step") {
    std::mt19937_64 rng(4178);
    for (int iter = 0; iter < 20; ++iter) {
        const std::int64_t q = 2 + std::int64_t(rand_below(rng, 30));
        DifferentialContour d;
        d.start = {0, 0};
        for (int i = 0; i < 80; ++i)
            d.deltas.push_back({std::int32_t(std::int64_t(rand_below(rng, 2001)) - 1000), 0});
        const auto qc = quantize_deltas(d, std::uint32_t(q));
        const double step =
            double(qc.delta_max.row - qc.delta_min.row) / double(q - 1);
        const auto back = dequantize_and_sum(qc, std::uint32_t(q));
        for (std::size_t i = 0; i < d.deltas.size(); ++i) {
            const double err =
                std::abs(double((back.points[i + 1] - back.points[i]).row) - double(d.deltas[i].row));
            CHECK(err <= step / 2 + 0.5);
        }
    }
}

TEST_CASE("zero-delta contour reconstructs to repeated start points") {
    QuantizedContour qc;
    qc.label = 2;
    qc.start = {3, 4};
    qc.symbols_row.assign(5, 0);
    qc.symbols_col.assign(5, 0);
    const auto back = dequantize_and_sum(qc, 8);
    REQUIRE(back.points.size() == 6);
    for (const Point& p : back.points) CHECK(p == Point{3, 4});
}

TEST_CASE("motion of a translated scene is the translation exactly") {
    std::mt19937_64 rng(4179);
    SemanticMap prev(40, 30);
    // two blobs away from the borders
    for (int r = 5; r <= 12; ++r)
        for (int c = 6; c <= 14; ++c) prev.at(r, c) = 3;
    for (int r = 18; r <= 24; ++r)
        for (int c = 20; c <= 29; ++c) prev.at(r, c) = 4;
    const Point t{2, 1};
    const SemanticMap cur = translated(prev, t, 0);

    const auto prev_inst = extract_instances(prev);
    const auto est = estimate_motion(prev, cur, prev_inst);
    std::size_t foreground_records = 0;
    for (const MotionRecord& rec : est.records) {
        if (rec.label == 0) continue;
        ++foreground_records;
        CHECK(rec.v == t);
    }
    CHECK(foreground_records == 2);
}

TEST_CASE("identical frames give zero motion") {
    std::mt19937_64 rng(4180);
    const SemanticMap m = random_blob_map(rng, 32, 32, 5, 3);
    const auto inst = extract_instances(m);
    const auto est = estimate_motion(m, m, inst);
    REQUIRE(est.records.size() == inst.size());
    for (const MotionRecord& rec : est.records) CHECK(rec.v == Point{0, 0});
    CHECK(est.unmatched_cur.empty());
    CHECK(est.unmatched_prev.empty());
}

TEST_CASE("greedy matching picks the closer counterpart, like the optimum") {
    // two same-label squares that drift slightly toward each other
    SemanticMap prev(40, 40);
    for (int r = 4; r <= 9; ++r)
        for (int c = 4; c <= 9; ++c) prev.at(r, c) = 5;
    for (int r = 4; r <= 9; ++r)
        for (int c = 24; c <= 29; ++c) prev.at(r, c) = 5;
    SemanticMap cur(40, 40);
    for (int r = 6; r <= 11; ++r)
        for (int c = 6; c <= 11; ++c) cur.at(r, c) = 5;
    for (int r = 6; r <= 11; ++r)
        for (int c = 22; c <= 27; ++c) cur.at(r, c) = 5;

    const auto prev_inst = extract_instances(prev);
    const auto est = estimate_motion(prev, cur, prev_inst);

    // brute-force optimal assignment over the same-label foreground pairs
    std::vector<std::size_t> prev_fg, cur_fg;
    for (std::size_t i = 0; i < prev_inst.size(); ++i)
        if (prev_inst[i].label == 5) prev_fg.push_back(i);
    const auto cur_inst = extract_instances(cur);
    for (std::size_t i = 0; i < cur_inst.size(); ++i)
        if (cur_inst[i].label == 5) cur_fg.push_back(i);
    REQUIRE(prev_fg.size() == 2);
    REQUIRE(cur_fg.size() == 2);

    auto centroid = [](const InstanceContour& ic) {
        const FillMoments m = contour_fill_moments(ic.points);
        return std::pair<double, double>{double(m.sum_row) / double(m.count),
                                         double(m.sum_col) / double(m.count)};
    };
    auto dist2 = [&](std::size_t ci, std::size_t pi) {
        const auto [cr, cc] = centroid(cur_inst[ci]);
        const auto [pr, pc] = centroid(prev_inst[pi]);
        return (cr - pr) * (cr - pr) + (cc - pc) * (cc - pc);
    };
    std::vector<std::size_t> perm(prev_fg.size());
    std::iota(perm.begin(), perm.end(), 0);
    double best_cost = 1e300;
    std::vector<std::size_t> best = perm;
    do {
        double cost = 0;
        for (std::size_t i = 0; i < perm.size(); ++i) cost += dist2(cur_fg[i], prev_fg[perm[i]]);
        if (cost < best_cost) {
            best_cost = cost;
            best = perm;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));

    for (std::size_t i = 0; i < cur_fg.size(); ++i) {
        const std::size_t want_prev = prev_fg[best[i]];
        bool found = false;
        for (std::size_t ri = 0; ri < est.records.size(); ++ri)
            if (est.record_cur[ri] == cur_fg[i] && est.records[ri].instance_index == want_prev)
                found = true;
        CHECK(found);
    }
}

TEST_CASE("dimension mismatch is rejected") {
    SemanticMap a(8, 8), b(8, 9);
    CHECK_THROWS_AS(estimate_motion(a, b, {}), std::invalid_argument);
}

TEST_CASE("apply_motion translates referenced instances") {
    SemanticMap m(12, 12);
    for (int r = 2; r <= 5; ++r)
        for (int c = 2; c <= 5; ++c) m.at(r, c) = 7;
    const auto inst = extract_instances(m);

    SECTION("zero vector is the identity") {
        const std::vector<MotionRecord> recs{{7, 1, {0, 0}}};
        const auto moved = apply_motion(inst, recs);
        CHECK(moved[1].points == inst[1].points);
    }
    SECTION("translation moves every point") {
        const std::vector<MotionRecord> recs{{7, 1, {2, 1}}};
        const auto moved = apply_motion(inst, recs);
        CHECK(moved[1].points.front() == Point{4, 3});
        CHECK(moved[1].points[6] == Point{7, 6});  // opposite corner
        CHECK(moved[0].points == inst[0].points);  // untouched background
    }
    SECTION("invalid index and double reference are rejected") {
        CHECK_THROWS_AS(apply_motion(inst, std::vector<MotionRecord>{{7, 9, {0, 0}}}),
                        std::invalid_argument);
        CHECK_THROWS_AS(apply_motion(inst, std::vector<MotionRecord>{{7, 1, {0, 0}}, {7, 1, {1, 0}}}),
                        std::invalid_argument);
    }
}

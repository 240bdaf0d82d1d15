#ifndef SVC_FRAME_CODER_HPP
#define SVC_FRAME_CODER_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "svc/contour.hpp"
#include "svc/core.hpp"

namespace svc {

/// Contour as an explicit start point plus successive increments.
struct DifferentialContour {
    Label label = 0;
    Point start{};
    std::vector<Point> deltas;
};

/// Differential contour after per-axis uniform quantization to [0, Q).
struct QuantizedContour {
    Label label = 0;
    Point start{};
    Point delta_min{};
    Point delta_max{};
    std::vector<std::uint32_t> symbols_row;
    std::vector<std::uint32_t> symbols_col;
};

/// Instance-wise rigid translation for one P-frame instance.
struct MotionRecord {
    Label label = 0;
    std::uint32_t instance_index = 0;
    Point v{};
};

inline DifferentialContour diff_encode(const InstanceContour& contour) {
    if (contour.points.empty()) throw std::invalid_argument("diff_encode: empty contour");
    DifferentialContour d;
    d.label = contour.label;
    d.start = contour.points.front();
    d.deltas.reserve(contour.points.size() - 1);
    for (std::size_t i = 0; i + 1 < contour.points.size(); ++i)
        d.deltas.push_back(contour.points[i + 1] - contour.points[i]);
    return d;
}

namespace detail {

// Half-up rounding of num/den for den > 0 and num >= 0.
inline std::int64_t round_half_up(std::int64_t num, std::int64_t den) {
    return (2 * num + den) / (2 * den);
}

struct AxisQuantizer {
    std::int64_t min = 0;
    std::int64_t max = 0;
    std::int64_t q = 2;

    bool lossless() const { return max - min + 1 <= q; }

    std::uint32_t quantize(std::int64_t v) const {
        if (lossless()) return std::uint32_t(v - min);
        return std::uint32_t(round_half_up((v - min) * (q - 1), max - min));
    }
    std::int64_t dequantize(std::uint32_t sym) const {
        if (lossless()) return min + sym;
        return min + round_half_up(std::int64_t(sym) * (max - min), q - 1);
    }
};

inline std::int64_t ceil_div(std::int64_t num, std::int64_t den) {  // den > 0
    return num >= 0 ? (num + den - 1) / den : -((-num) / den);
}

}  // namespace detail

/// Per-axis uniform quantization of contour increments. When a delta range
/// fits the alphabet the mapping is the lossless shift symbol = delta - min;
/// otherwise symbols lie on a uniform grid of q levels with half-up rounding.
inline QuantizedContour quantize_deltas(const DifferentialContour& d, std::uint32_t q) {
    if (q < 2) throw std::invalid_argument("quantize_deltas: q must be >= 2");
    QuantizedContour out;
    out.label = d.label;
    out.start = d.start;
    if (!d.deltas.empty()) {
        std::int32_t rmin = d.deltas[0].row, rmax = d.deltas[0].row;
        std::int32_t cmin = d.deltas[0].col, cmax = d.deltas[0].col;
        for (const Point& p : d.deltas) {
            rmin = std::min(rmin, p.row);
            rmax = std::max(rmax, p.row);
            cmin = std::min(cmin, p.col);
            cmax = std::max(cmax, p.col);
        }
        out.delta_min = {rmin, cmin};
        out.delta_max = {rmax, cmax};
        const detail::AxisQuantizer qr{rmin, rmax, std::int64_t(q)};
        const detail::AxisQuantizer qc{cmin, cmax, std::int64_t(q)};
        out.symbols_row.reserve(d.deltas.size());
        out.symbols_col.reserve(d.deltas.size());
        for (const Point& p : d.deltas) {
            out.symbols_row.push_back(qr.quantize(p.row));
            out.symbols_col.push_back(qc.quantize(p.col));
        }
    }
    return out;
}

/// Inverse quantization followed by cumulative summation from the start
/// point. Coordinates are not clamped here; rasterize clips to the frame.
inline InstanceContour dequantize_and_sum(const QuantizedContour& qc, std::uint32_t q) {
    if (q < 2) throw std::invalid_argument("dequantize_and_sum: q must be >= 2");
    if (qc.symbols_row.size() != qc.symbols_col.size())
        throw std::invalid_argument("dequantize_and_sum: axis symbol counts differ");
    const detail::AxisQuantizer qr{qc.delta_min.row, qc.delta_max.row, std::int64_t(q)};
    const detail::AxisQuantizer qcix{qc.delta_min.col, qc.delta_max.col, std::int64_t(q)};

    InstanceContour out;
    out.label = qc.label;
    out.points.reserve(qc.symbols_row.size() + 1);
    Point p = qc.start;
    out.points.push_back(p);
    for (std::size_t i = 0; i < qc.symbols_row.size(); ++i) {
        p.row += std::int32_t(qr.dequantize(qc.symbols_row[i]));
        p.col += std::int32_t(qcix.dequantize(qc.symbols_col[i]));
        out.points.push_back(p);
    }
    out.area = contour_fill_area(out.points);
    return out;
}

/// Result of matching the current frame's instances against a reference
/// instance list.
struct MotionEstimate {
    std::vector<MotionRecord> records;        // sorted by instance_index
    std::vector<std::size_t> record_cur;      // matched cur instance per record
    std::vector<std::size_t> unmatched_prev;  // reference instances with no match
    std::vector<std::size_t> unmatched_cur;   // current instances with no match
    std::vector<InstanceContour> cur_instances;
};

/// Greedy same-label nearest-centroid matching between the instances of
/// `cur` and `prev_instances`; per match v = ceil(centroid_cur -
/// centroid_prev), componentwise toward +inf, evaluated in exact rational
/// arithmetic over filled-polygon moments. Centroids on both sides come from
/// the same polygon-fill definition, so a rigid translation of identical
/// contours yields the translation exactly.
inline MotionEstimate estimate_motion(const SemanticMap& prev, const SemanticMap& cur,
                                      std::span<const InstanceContour> prev_instances,
                                      Connectivity conn = Connectivity::Four) {
    if (prev.width() != cur.width() || prev.height() != cur.height())
        throw std::invalid_argument("estimate_motion: frame dimensions differ");

    MotionEstimate est;
    est.cur_instances = extract_instances(cur, conn);

    std::vector<FillMoments> prev_m(prev_instances.size());
    for (std::size_t i = 0; i < prev_instances.size(); ++i)
        prev_m[i] = contour_fill_moments(prev_instances[i].points);
    std::vector<FillMoments> cur_m(est.cur_instances.size());
    for (std::size_t i = 0; i < est.cur_instances.size(); ++i)
        cur_m[i] = contour_fill_moments(est.cur_instances[i].points);

    struct Candidate {
        double dist2;
        std::size_t cur;
        std::size_t prev;
    };
    std::vector<Candidate> cands;
    for (std::size_t ci = 0; ci < est.cur_instances.size(); ++ci) {
        if (cur_m[ci].count == 0) continue;
        for (std::size_t pi = 0; pi < prev_instances.size(); ++pi) {
            if (prev_instances[pi].label != est.cur_instances[ci].label) continue;
            if (prev_m[pi].count == 0) continue;
            const double dr = double(cur_m[ci].sum_row) / double(cur_m[ci].count) -
                              double(prev_m[pi].sum_row) / double(prev_m[pi].count);
            const double dc = double(cur_m[ci].sum_col) / double(cur_m[ci].count) -
                              double(prev_m[pi].sum_col) / double(prev_m[pi].count);
            cands.push_back({dr * dr + dc * dc, ci, pi});
        }
    }
    std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
        if (a.dist2 != b.dist2) return a.dist2 < b.dist2;
        if (a.cur != b.cur) return a.cur < b.cur;
        return a.prev < b.prev;
    });

    std::vector<char> cur_used(est.cur_instances.size(), 0);
    std::vector<char> prev_used(prev_instances.size(), 0);
    for (const Candidate& c : cands) {
        if (cur_used[c.cur] || prev_used[c.prev]) continue;
        cur_used[c.cur] = prev_used[c.prev] = 1;

        using Wide = __int128;
        const FillMoments& a = cur_m[c.cur];
        const FillMoments& b = prev_m[c.prev];
        const Wide den = Wide(a.count) * b.count;
        auto ceil_axis = [&](std::int64_t sa, std::int64_t sb) {
            const Wide num = Wide(sa) * b.count - Wide(sb) * a.count;
            const Wide v = num >= 0 ? (num + den - 1) / den : -((-num) / den);
            return std::int64_t(v);
        };
        const std::int64_t vr = ceil_axis(a.sum_row, b.sum_row);
        const std::int64_t vc = ceil_axis(a.sum_col, b.sum_col);
        if (std::abs(vr) > std::numeric_limits<std::int16_t>::max() ||
            std::abs(vc) > std::numeric_limits<std::int16_t>::max())
            throw std::invalid_argument("estimate_motion: motion exceeds signed 16-bit range");

        MotionRecord rec;
        rec.label = est.cur_instances[c.cur].label;
        rec.instance_index = std::uint32_t(c.prev);
        rec.v = {std::int32_t(vr), std::int32_t(vc)};
        est.records.push_back(rec);
        est.record_cur.push_back(c.cur);
    }

    std::vector<std::size_t> order(est.records.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return est.records[a].instance_index < est.records[b].instance_index;
    });
    std::vector<MotionRecord> recs;
    std::vector<std::size_t> rcur;
    recs.reserve(order.size());
    rcur.reserve(order.size());
    for (const std::size_t i : order) {
        recs.push_back(est.records[i]);
        rcur.push_back(est.record_cur[i]);
    }
    est.records = std::move(recs);
    est.record_cur = std::move(rcur);
    for (std::size_t i = 0; i < prev_instances.size(); ++i)
        if (!prev_used[i]) est.unmatched_prev.push_back(i);
    for (std::size_t i = 0; i < est.cur_instances.size(); ++i)
        if (!cur_used[i]) est.unmatched_cur.push_back(i);
    return est;
}

/// Translates the referenced reference contours by their motion vectors,
/// leaving unreferenced instances in place. Points may leave the frame;
/// rasterize clips them later.
inline std::vector<InstanceContour> apply_motion(std::span<const InstanceContour> prev_instances,
                                                 std::span<const MotionRecord> records) {
    std::vector<InstanceContour> out(prev_instances.begin(), prev_instances.end());
    std::vector<char> moved(out.size(), 0);
    for (const MotionRecord& rec : records) {
        if (rec.instance_index >= out.size())
            throw std::invalid_argument("apply_motion: instance index out of range");
        if (moved[rec.instance_index])
            throw std::invalid_argument("apply_motion: instance referenced twice");
        moved[rec.instance_index] = 1;
        for (Point& p : out[rec.instance_index].points) p = p + rec.v;
    }
    return out;
}

}  // namespace svc

#endif  // SVC_FRAME_CODER_HPP

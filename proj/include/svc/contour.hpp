#ifndef SVC_CONTOUR_HPP
#define SVC_CONTOUR_HPP

#include <algorithm>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "svc/core.hpp"

namespace svc {

enum class Connectivity : std::uint8_t { Four = 4, Eight = 8 };

namespace detail {

// Clockwise compass order, (drow, dcol), row axis pointing down.
// 0:N 1:NE 2:E 3:SE 4:S 5:SW 6:W 7:NW
inline constexpr std::int32_t kDir8Row[8] = {-1, -1, 0, 1, 1, 1, 0, -1};
inline constexpr std::int32_t kDir8Col[8] = {0, 1, 1, 1, 0, -1, -1, -1};

/// Maximal horizontal run of filled pixels, columns inclusive.
struct PixelRun {
    std::int32_t row;
    std::int32_t col_begin;
    std::int32_t col_end;
};

/// Rasterizes the closed polygon `pts` (vertices at pixel centers, segments
/// drawn 8-connected) and returns the pixel runs of boundary plus everything
/// not 4-reachable from outside. Holes enclosed by the polygon are covered.
std::vector<PixelRun> fill_contour_runs(std::span<const Point> pts);

}  // namespace detail

/// Pixel count of the filled polygon (boundary + enclosed interior).
std::int64_t contour_fill_area(std::span<const Point> pts);

/// Exact first moments of the filled polygon, for centroid arithmetic.
struct FillMoments {
    std::int64_t sum_row = 0;
    std::int64_t sum_col = 0;
    std::int64_t count = 0;
};
FillMoments contour_fill_moments(std::span<const Point> pts);

/// Decomposes the map into connected same-label components and traces each
/// component's outer boundary clockwise, starting from its lexicographically
/// smallest (row, col) pixel. Result is ordered by descending region area,
/// ties by (label, start point) ascending.
std::vector<InstanceContour> extract_instances(const SemanticMap& map,
                                               Connectivity conn = Connectivity::Four);

/// Paints filled contours over a background_label canvas. Contours are
/// painted in descending filled-pixel-count order so nested instances stay
/// visible; points outside the frame are clamped to the border first.
SemanticMap rasterize(std::span<const InstanceContour> contours, std::uint32_t width,
                      std::uint32_t height, Label background_label);

// ---------------------------------------------------------------------------

namespace detail {

inline void bresenham_mark(Point a, Point b, std::vector<std::uint8_t>& grid,
                           std::int32_t grid_w, std::int32_t row0, std::int32_t col0) {
    std::int32_t r = a.row, c = a.col;
    const std::int32_t dr = std::abs(b.row - a.row), dc = std::abs(b.col - a.col);
    const std::int32_t sr = a.row < b.row ? 1 : -1, sc = a.col < b.col ? 1 : -1;
    std::int32_t err = (dc > dr ? dc : -dr) / 2;
    for (;;) {
        grid[std::size_t(r - row0) * grid_w + (c - col0)] = 1;
        if (r == b.row && c == b.col) break;
        const std::int32_t e = err;
        if (e > -dc) { err -= dr; c += sc; }
        if (e < dr) { err += dc; r += sr; }
    }
}

inline std::vector<PixelRun> fill_contour_runs(std::span<const Point> pts) {
    std::vector<PixelRun> runs;
    if (pts.empty()) return runs;

    std::int32_t rmin = pts[0].row, rmax = pts[0].row, cmin = pts[0].col, cmax = pts[0].col;
    for (const Point& p : pts) {
        rmin = std::min(rmin, p.row); rmax = std::max(rmax, p.row);
        cmin = std::min(cmin, p.col); cmax = std::max(cmax, p.col);
    }
    // One-cell pad ring so the exterior flood can wrap around the polygon.
    const std::int32_t row0 = rmin - 1, col0 = cmin - 1;
    const std::int32_t gh = rmax - rmin + 3, gw = cmax - cmin + 3;

    // 0 = unknown, 1 = polygon path, 2 = exterior
    std::vector<std::uint8_t> grid(std::size_t(gh) * gw, 0);
    for (std::size_t i = 0; i + 1 < pts.size(); ++i)
        bresenham_mark(pts[i], pts[i + 1], grid, gw, row0, col0);
    bresenham_mark(pts.back(), pts.front(), grid, gw, row0, col0);

    // 4-connected exterior flood from the pad ring; an 8-connected closed
    // path cannot be crossed by a 4-path.
    std::vector<std::int32_t> stack;
    auto push_if_unknown = [&](std::int32_t idx) {
        if (grid[std::size_t(idx)] == 0) {
            grid[std::size_t(idx)] = 2;
            stack.push_back(idx);
        }
    };
    for (std::int32_t c = 0; c < gw; ++c) {
        push_if_unknown(c);
        push_if_unknown((gh - 1) * gw + c);
    }
    for (std::int32_t r = 0; r < gh; ++r) {
        push_if_unknown(r * gw);
        push_if_unknown(r * gw + gw - 1);
    }
    while (!stack.empty()) {
        const std::int32_t idx = stack.back();
        stack.pop_back();
        const std::int32_t r = idx / gw, c = idx % gw;
        if (r > 0) push_if_unknown(idx - gw);
        if (r + 1 < gh) push_if_unknown(idx + gw);
        if (c > 0) push_if_unknown(idx - 1);
        if (c + 1 < gw) push_if_unknown(idx + 1);
    }

    for (std::int32_t r = 1; r + 1 < gh; ++r) {
        std::int32_t c = 1;
        while (c + 1 < gw) {
            if (grid[std::size_t(r) * gw + c] == 2) { ++c; continue; }
            const std::int32_t begin = c;
            while (c + 1 < gw && grid[std::size_t(r) * gw + c] != 2) ++c;
            runs.push_back({r + row0, begin + col0, c - 1 + col0});
        }
    }
    return runs;
}

struct Component {
    Label label = 0;
    std::int64_t area = 0;
    Point start{};
};

/// Moore-neighbor clockwise trace of component `id`, starting at `start`
/// which must be the component's lexicographically smallest pixel. The walk
/// terminates when it stands on the start pixel about to repeat the very
/// first move; from that state the remaining walk provably replays the
/// first lap, so the lap collected so far is the complete boundary cycle.
inline std::vector<Point> trace_boundary(const std::vector<std::int32_t>& comp,
                                         std::int32_t width, std::int32_t height,
                                         std::int32_t id, Point start) {
    auto inside = [&](std::int32_t r, std::int32_t c) {
        return r >= 0 && c >= 0 && r < height && c < width &&
               comp[std::size_t(r) * width + c] == id;
    };

    std::vector<Point> out;
    out.push_back(start);

    Point p = start;
    int back = 6;  // the lexicographic minimum always has exterior to its west
    Point first_move{};
    bool have_first_move = false;

    for (;;) {
        int found = -1;
        for (int step = 1; step <= 8; ++step) {
            const int k = (back + step) & 7;
            if (inside(p.row + kDir8Row[k], p.col + kDir8Col[k])) { found = k; break; }
        }
        if (found < 0) break;  // isolated pixel

        const int prev = (found + 7) & 7;
        const Point last_exterior{p.row + kDir8Row[prev], p.col + kDir8Col[prev]};
        const Point n{p.row + kDir8Row[found], p.col + kDir8Col[found]};

        if (have_first_move && p == start && n == first_move) break;
        if (!have_first_move) {
            first_move = n;
            have_first_move = true;
        }

        // last_exterior is adjacent to n (consecutive compass cells around p
        // touch each other), so it is a valid backtrack for the next scan.
        int nback = 0;
        while (n.row + kDir8Row[nback] != last_exterior.row ||
               n.col + kDir8Col[nback] != last_exterior.col)
            ++nback;

        p = n;
        back = nback;
        out.push_back(p);
        if (out.size() > 8 * comp.size() + 16)
            throw std::logic_error("trace_boundary: failed to close contour");
    }
    // The stop above fires while standing on a re-appended start pixel; trim
    // it so the cycle lists the start exactly once at the front.
    if (out.size() > 1 && out.back() == out.front()) out.pop_back();
    return out;
}

}  // namespace detail

inline std::int64_t contour_fill_area(std::span<const Point> pts) {
    std::int64_t area = 0;
    for (const auto& run : detail::fill_contour_runs(pts)) area += run.col_end - run.col_begin + 1;
    return area;
}

inline FillMoments contour_fill_moments(std::span<const Point> pts) {
    FillMoments m;
    for (const auto& run : detail::fill_contour_runs(pts)) {
        const std::int64_t len = run.col_end - run.col_begin + 1;
        m.count += len;
        m.sum_row += std::int64_t(run.row) * len;
        m.sum_col += std::int64_t(run.col_begin + run.col_end) * len / 2;
    }
    return m;
}

inline std::vector<InstanceContour> extract_instances(const SemanticMap& map, Connectivity conn) {
    const std::int32_t w = std::int32_t(map.width()), h = std::int32_t(map.height());
    std::vector<std::int32_t> comp(map.pixel_count(), -1);
    std::vector<detail::Component> comps;

    const bool eight = conn == Connectivity::Eight;
    std::vector<std::int32_t> queue;
    for (std::int32_t r = 0; r < h; ++r) {
        for (std::int32_t c = 0; c < w; ++c) {
            const std::size_t idx = std::size_t(r) * w + c;
            if (comp[idx] >= 0) continue;
            const std::int32_t id = std::int32_t(comps.size());
            const Label lbl = map.at(r, c);
            detail::Component cm;
            cm.label = lbl;
            cm.start = {r, c};
            comp[idx] = id;
            queue.clear();
            queue.push_back(std::int32_t(idx));
            while (!queue.empty()) {
                const std::int32_t cur = queue.back();
                queue.pop_back();
                ++cm.area;
                const std::int32_t cr = cur / w, cc = cur % w;
                auto visit = [&](std::int32_t nr, std::int32_t nc) {
                    if (nr < 0 || nc < 0 || nr >= h || nc >= w) return;
                    const std::size_t ni = std::size_t(nr) * w + nc;
                    if (comp[ni] < 0 && map.at(nr, nc) == lbl) {
                        comp[ni] = id;
                        queue.push_back(std::int32_t(ni));
                    }
                };
                visit(cr - 1, cc);
                visit(cr + 1, cc);
                visit(cr, cc - 1);
                visit(cr, cc + 1);
                if (eight) {
                    visit(cr - 1, cc - 1);
                    visit(cr - 1, cc + 1);
                    visit(cr + 1, cc - 1);
                    visit(cr + 1, cc + 1);
                }
            }
            comps.push_back(cm);
        }
    }

    std::vector<std::int32_t> order(comps.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = std::int32_t(i);
    std::sort(order.begin(), order.end(), [&](std::int32_t a, std::int32_t b) {
        if (comps[a].area != comps[b].area) return comps[a].area > comps[b].area;
        if (comps[a].label != comps[b].label) return comps[a].label < comps[b].label;
        return comps[a].start < comps[b].start;
    });

    std::vector<InstanceContour> out;
    out.reserve(comps.size());
    for (const std::int32_t id : order) {
        InstanceContour ic;
        ic.label = comps[id].label;
        ic.area = comps[id].area;
        ic.points = detail::trace_boundary(comp, w, h, id, comps[id].start);
        out.push_back(std::move(ic));
    }
    return out;
}

inline SemanticMap rasterize(std::span<const InstanceContour> contours, std::uint32_t width,
                             std::uint32_t height, Label background_label) {
    struct Filled {
        std::vector<detail::PixelRun> runs;
        std::int64_t area;
        Label label;
        Point first;
        std::size_t index;
    };

    std::vector<Filled> filled;
    filled.reserve(contours.size());
    std::vector<Point> clamped;
    for (std::size_t i = 0; i < contours.size(); ++i) {
        const InstanceContour& ic = contours[i];
        if (ic.points.empty())
            throw std::invalid_argument("rasterize: contour without points");
        clamped.assign(ic.points.begin(), ic.points.end());
        for (Point& p : clamped) {
            p.row = std::clamp(p.row, 0, std::int32_t(height) - 1);
            p.col = std::clamp(p.col, 0, std::int32_t(width) - 1);
        }
        Filled f;
        f.runs = detail::fill_contour_runs(clamped);
        f.area = 0;
        for (const auto& run : f.runs) f.area += run.col_end - run.col_begin + 1;
        f.label = ic.label;
        f.first = clamped.front();
        f.index = i;
        filled.push_back(std::move(f));
    }

    std::sort(filled.begin(), filled.end(), [](const Filled& a, const Filled& b) {
        if (a.area != b.area) return a.area > b.area;
        if (a.label != b.label) return a.label < b.label;
        if (a.first != b.first) return a.first < b.first;
        return a.index < b.index;
    });

    SemanticMap out(width, height);
    std::fill(out.labels().begin(), out.labels().end(), background_label);
    for (const Filled& f : filled) {
        for (const auto& run : f.runs) {
            Label* row = &out.at(run.row, 0);
            for (std::int32_t c = run.col_begin; c <= run.col_end; ++c) row[c] = f.label;
        }
    }
    return out;
}

}  // namespace svc

#endif  // SVC_CONTOUR_HPP

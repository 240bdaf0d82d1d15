#ifndef SVC_SYNTHETIC_HPP
#define SVC_SYNTHETIC_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "svc/contour.hpp"
#include "svc/core.hpp"

namespace svc {

enum class ShapeKind : std::uint8_t { Rectangle = 0, Ellipse = 1, Polygon = 2 };

struct SyntheticObject {
    Label label = 1;
    ShapeKind shape = ShapeKind::Rectangle;
    Point velocity{};       // pixels per frame
    Point center{};         // initial center
    std::int32_t half_rows = 8;
    std::int32_t half_cols = 8;
    std::vector<Point> poly;  // vertex offsets relative to center (Polygon only)
};

/// Deterministic scene description. Objects translate by their velocity each
/// frame, clamped so the object's bounding box stays inside the frame; later
/// objects occlude earlier ones.
struct SyntheticSceneSpec {
    std::uint64_t seed = 0;  // seed the spec was drawn from; informational
    std::uint32_t width = 512;
    std::uint32_t height = 512;
    std::uint32_t frame_count = 30;
    Label background_label = 0;
    std::vector<SyntheticObject> objects;
};

namespace detail {

// Bounded draw from a raw engine; plain modulo keeps it reproducible
// independent of the standard library's distribution implementations.
inline std::uint64_t rand_range(std::mt19937_64& rng, std::uint64_t lo, std::uint64_t hi) {
    return lo + rng() % (hi - lo + 1);
}
inline std::int64_t rand_range_i(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi) {
    return lo + std::int64_t(rng() % std::uint64_t(hi - lo + 1));
}

inline void object_bbox_half(const SyntheticObject& obj, std::int32_t& hr, std::int32_t& hc) {
    if (obj.shape == ShapeKind::Polygon) {
        hr = hc = 0;
        for (const Point& p : obj.poly) {
            hr = std::max(hr, std::abs(p.row));
            hc = std::max(hc, std::abs(p.col));
        }
    } else {
        hr = obj.half_rows;
        hc = obj.half_cols;
    }
}

inline void paint_object(SemanticMap& frame, const SyntheticObject& obj, Point center) {
    const std::int32_t h = std::int32_t(frame.height()), w = std::int32_t(frame.width());
    switch (obj.shape) {
        case ShapeKind::Rectangle: {
            const std::int32_t r0 = std::max(0, center.row - obj.half_rows);
            const std::int32_t r1 = std::min(h - 1, center.row + obj.half_rows);
            const std::int32_t c0 = std::max(0, center.col - obj.half_cols);
            const std::int32_t c1 = std::min(w - 1, center.col + obj.half_cols);
            for (std::int32_t r = r0; r <= r1; ++r)
                for (std::int32_t c = c0; c <= c1; ++c) frame.at(r, c) = obj.label;
            break;
        }
        case ShapeKind::Ellipse: {
            const std::int64_t a2 = std::int64_t(obj.half_rows) * obj.half_rows;
            const std::int64_t b2 = std::int64_t(obj.half_cols) * obj.half_cols;
            const std::int32_t r0 = std::max(0, center.row - obj.half_rows);
            const std::int32_t r1 = std::min(h - 1, center.row + obj.half_rows);
            for (std::int32_t r = r0; r <= r1; ++r) {
                const std::int64_t dr = r - center.row;
                for (std::int32_t c = std::max(0, center.col - obj.half_cols);
                     c <= std::min(w - 1, center.col + obj.half_cols); ++c) {
                    const std::int64_t dc = c - center.col;
                    if (dr * dr * b2 + dc * dc * a2 <= a2 * b2) frame.at(r, c) = obj.label;
                }
            }
            break;
        }
        case ShapeKind::Polygon: {
            std::vector<Point> vertices;
            vertices.reserve(obj.poly.size());
            for (const Point& p : obj.poly) {
                Point v = center + p;
                v.row = std::clamp(v.row, 0, h - 1);
                v.col = std::clamp(v.col, 0, w - 1);
                vertices.push_back(v);
            }
            for (const auto& run : detail::fill_contour_runs(vertices)) {
                if (run.row < 0 || run.row >= h) continue;
                const std::int32_t c0 = std::max(0, run.col_begin);
                const std::int32_t c1 = std::min(w - 1, run.col_end);
                for (std::int32_t c = c0; c <= c1; ++c) frame.at(run.row, c) = obj.label;
            }
            break;
        }
    }
}

}  // namespace detail

inline std::vector<SemanticMap> generate_corpus(const SyntheticSceneSpec& spec) {
    if (spec.width < 1 || spec.height < 1 || spec.frame_count < 1)
        throw std::invalid_argument("generate_corpus: empty scene");
    const std::int32_t h = std::int32_t(spec.height), w = std::int32_t(spec.width);

    struct ObjState {
        std::int32_t hr, hc;
        Point center;
    };
    std::vector<ObjState> state;
    state.reserve(spec.objects.size());
    for (const SyntheticObject& obj : spec.objects) {
        std::int32_t hr = 0, hc = 0;
        detail::object_bbox_half(obj, hr, hc);
        if (2 * hr + 1 > h || 2 * hc + 1 > w)
            throw std::invalid_argument("generate_corpus: object larger than frame");
        state.push_back({hr, hc, obj.center});
    }

    std::vector<SemanticMap> frames;
    frames.reserve(spec.frame_count);
    for (std::uint32_t k = 0; k < spec.frame_count; ++k) {
        SemanticMap frame(spec.width, spec.height);
        std::fill(frame.labels().begin(), frame.labels().end(), spec.background_label);
        for (std::size_t i = 0; i < spec.objects.size(); ++i) {
            ObjState& st = state[i];
            if (k > 0) {
                st.center = st.center + spec.objects[i].velocity;
                st.center.row = std::clamp(st.center.row, st.hr, h - 1 - st.hr);
                st.center.col = std::clamp(st.center.col, st.hc, w - 1 - st.hc);
            }
            detail::paint_object(frame, spec.objects[i], st.center);
        }
        frames.push_back(std::move(frame));
    }
    return frames;
}

struct SceneParams {
    std::uint32_t width = 512;
    std::uint32_t height = 512;
    std::uint32_t frame_count = 30;
    std::uint32_t min_objects = 3;
    std::uint32_t max_objects = 8;
    std::int32_t min_half_extent = 24;
    std::int32_t max_half_extent = 88;
    std::int32_t max_speed = 2;     // per-axis velocity magnitude
    bool ensure_motion = false;     // reroll (0,0) velocities
    Label min_label = 1;
    Label max_label = 20;
};

/// Draws a random scene spec. Generation touches the engine in a fixed order
/// so equal seeds give byte-identical corpora.
inline SyntheticSceneSpec random_scene_spec(std::uint64_t seed, const SceneParams& params = {}) {
    std::mt19937_64 rng(seed);
    SyntheticSceneSpec spec;
    spec.seed = seed;
    spec.width = params.width;
    spec.height = params.height;
    spec.frame_count = params.frame_count;
    spec.background_label = 0;

    // keep every object placeable regardless of the requested extents
    const std::int32_t cap = (std::int32_t(std::min(params.width, params.height)) - 2) / 2;
    const std::int32_t hi_half = std::max(1, std::min(params.max_half_extent, cap));
    const std::int32_t lo_half = std::max(1, std::min(params.min_half_extent, hi_half));

    const std::uint64_t n = detail::rand_range(rng, params.min_objects, params.max_objects);
    for (std::uint64_t i = 0; i < n; ++i) {
        SyntheticObject obj;
        obj.label = Label(detail::rand_range(rng, params.min_label, params.max_label));
        const std::uint64_t kind = detail::rand_range(rng, 0, 9);
        obj.shape = kind < 3 ? ShapeKind::Rectangle : kind < 7 ? ShapeKind::Ellipse
                                                               : ShapeKind::Polygon;
        obj.half_rows =
            std::int32_t(detail::rand_range(rng, std::uint64_t(lo_half), std::uint64_t(hi_half)));
        obj.half_cols =
            std::int32_t(detail::rand_range(rng, std::uint64_t(lo_half), std::uint64_t(hi_half)));
        if (obj.shape == ShapeKind::Polygon) {
            const std::uint64_t sides = detail::rand_range(rng, 5, 9);
            const double radius = double(std::min(obj.half_rows, obj.half_cols));
            for (std::uint64_t s = 0; s < sides; ++s) {
                const double jitter = double(detail::rand_range(rng, 72, 100)) / 100.0;
                const double theta = 2.0 * 3.14159265358979323846 * double(s) / double(sides);
                obj.poly.push_back({std::int32_t(std::lround(radius * jitter * std::sin(theta))),
                                    std::int32_t(std::lround(radius * jitter * std::cos(theta)))});
            }
        }
        std::int32_t hr = 0, hc = 0;
        detail::object_bbox_half(obj, hr, hc);
        obj.center.row = std::int32_t(
            detail::rand_range(rng, std::uint64_t(hr), std::uint64_t(std::int32_t(params.height) - 1 - hr)));
        obj.center.col = std::int32_t(
            detail::rand_range(rng, std::uint64_t(hc), std::uint64_t(std::int32_t(params.width) - 1 - hc)));
        do {
            obj.velocity.row = std::int32_t(detail::rand_range_i(rng, -params.max_speed, params.max_speed));
            obj.velocity.col = std::int32_t(detail::rand_range_i(rng, -params.max_speed, params.max_speed));
        } while (params.ensure_motion && obj.velocity == Point{0, 0});
        spec.objects.push_back(std::move(obj));
    }
    return spec;
}

/// 25 videos of 30 frames at 512x512 with 3-8 objects each, labels 1-20.
inline std::vector<std::vector<SemanticMap>> default_corpus(std::uint64_t base_seed = 0xC0DEC,
                                                            std::uint32_t videos = 25) {
    std::vector<std::vector<SemanticMap>> corpus;
    corpus.reserve(videos);
    for (std::uint32_t i = 0; i < videos; ++i)
        corpus.push_back(generate_corpus(random_scene_spec(base_seed + i)));
    return corpus;
}

/// Corpus in which every object moves; suited to P-frame experiments.
inline std::vector<std::vector<SemanticMap>> moving_corpus(std::uint64_t base_seed = 0x50C0DEC,
                                                           std::uint32_t videos = 25) {
    SceneParams params;
    params.min_objects = 3;
    params.max_objects = 6;
    params.min_half_extent = 32;
    params.max_half_extent = 88;
    params.ensure_motion = true;
    std::vector<std::vector<SemanticMap>> corpus;
    corpus.reserve(videos);
    for (std::uint32_t i = 0; i < videos; ++i)
        corpus.push_back(generate_corpus(random_scene_spec(base_seed + i, params)));
    return corpus;
}

}  // namespace svc

#endif  // SVC_SYNTHETIC_HPP

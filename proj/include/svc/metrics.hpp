#ifndef SVC_METRICS_HPP
#define SVC_METRICS_HPP

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "svc/codec.hpp"
#include "svc/core.hpp"

namespace svc {

/// Mean intersection-over-union between two maps. Classes are those present
/// in either map; pixels whose ground-truth label equals ignore_label are
/// excluded from all counts and the ignore class never enters the average.
/// Classes with an empty union are skipped.
inline double miou(const SemanticMap& pred, const SemanticMap& gt,
                   std::optional<Label> ignore_label = std::nullopt) {
    if (pred.width() != gt.width() || pred.height() != gt.height())
        throw std::invalid_argument("miou: map dimensions differ");

    struct Counts {
        std::uint64_t inter = 0;
        std::uint64_t uni = 0;
    };
    std::map<Label, Counts> per_class;
    const auto& a = pred.labels();
    const auto& b = gt.labels();
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (ignore_label && b[i] == *ignore_label) continue;
        if (a[i] == b[i]) {
            auto& c = per_class[a[i]];
            ++c.inter;
            ++c.uni;
        } else {
            ++per_class[a[i]].uni;
            ++per_class[b[i]].uni;
        }
    }

    double sum = 0;
    std::size_t classes = 0;
    for (const auto& [label, c] : per_class) {
        if (ignore_label && label == *ignore_label) continue;
        if (c.uni == 0) continue;
        sum += double(c.inter) / double(c.uni);
        ++classes;
    }
    return classes == 0 ? 1.0 : sum / double(classes);
}

inline double bpp(std::uint64_t total_bits, std::uint32_t width, std::uint32_t height,
                  std::uint64_t frame_count) {
    if (width == 0 || height == 0 || frame_count == 0)
        throw std::invalid_argument("bpp: dimensions must be positive");
    return double(total_bits) / (double(width) * double(height) * double(frame_count));
}

inline double kbps(std::uint64_t total_bits, std::uint64_t frame_count, double fps) {
    if (frame_count == 0 || !(fps > 0)) throw std::invalid_argument("kbps: invalid arguments");
    return double(total_bits) * fps / (double(frame_count) * 1024.0);
}

/// bpp of a stream running at `rate_kbps`; frame count cancels out.
inline double bpp_from_kbps(double rate_kbps, std::uint32_t width, std::uint32_t height,
                            double fps) {
    return rate_kbps * 1024.0 / (double(width) * double(height) * fps);
}

/// One rate-distortion operating point, aggregated over a corpus.
struct RdPoint {
    double xi = 0;
    std::uint32_t q = 0;
    std::uint32_t p = 0;
    std::uint64_t total_bits = 0;  // summed over the corpus
    double bpp = 0;                // mean of per-video bpp
    double kbps = 0;               // mean of per-video kbps
    double miou = 0;               // mean over videos of per-video mean-frame mIoU
};

struct SweepGrid {
    std::vector<double> xi;
    std::vector<std::uint32_t> q;
    std::vector<std::uint32_t> p;
};

using Video = std::vector<SemanticMap>;

namespace detail {

struct VideoMeasurement {
    std::uint64_t bits = 0;
    double bpp = 0;
    double kbps = 0;
    double miou = 0;
};

inline VideoMeasurement measure_video(const Video& video, const CodecConfig& cfg, double fps) {
    const EncodedVideo ev = encode_video(video, cfg);
    const std::vector<SemanticMap> decoded = decode_video(ev);
    VideoMeasurement m;
    m.bits = coded_size_bits(ev);
    m.bpp = bpp(m.bits, video[0].width(), video[0].height(), video.size());
    m.kbps = kbps(m.bits, video.size(), fps);
    double sum = 0;
    for (std::size_t k = 0; k < video.size(); ++k) sum += miou(decoded[k], video[k]);
    m.miou = sum / double(video.size());
    return m;
}

}  // namespace detail

/// Encodes and decodes every (video, config) pair of the grid and aggregates
/// per-config means. Points come out sorted by (q, p, xi). Work units are
/// independent, so they run on a small thread pool with results stored by
/// index, which keeps the output deterministic.
inline std::vector<RdPoint> rd_sweep(std::span<const Video> corpus, const SweepGrid& grid,
                                     double fps, const CodecConfig& base = {},
                                     unsigned threads = std::thread::hardware_concurrency()) {
    if (corpus.empty()) throw std::invalid_argument("rd_sweep: empty corpus");
    if (grid.xi.empty() || grid.q.empty() || grid.p.empty())
        throw std::invalid_argument("rd_sweep: empty grid");
    for (const Video& v : corpus)
        if (v.empty()) throw std::invalid_argument("rd_sweep: empty video in corpus");

    std::vector<CodecConfig> configs;
    std::vector<std::uint32_t> qs = grid.q;
    std::vector<std::uint32_t> ps = grid.p;
    std::vector<double> xis = grid.xi;
    std::sort(qs.begin(), qs.end());
    std::sort(ps.begin(), ps.end());
    std::sort(xis.begin(), xis.end());
    for (const std::uint32_t q : qs)
        for (const std::uint32_t p : ps)
            for (const double xi : xis) {
                CodecConfig cfg = base;
                cfg.xi = xi;
                cfg.q = q;
                cfg.p = p;
                cfg.validate();
                configs.push_back(cfg);
            }

    const std::size_t jobs = configs.size() * corpus.size();
    std::vector<detail::VideoMeasurement> results(jobs);
    std::vector<std::string> errors(jobs);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t j = next.fetch_add(1);
            if (j >= jobs) return;
            const std::size_t ci = j / corpus.size(), vi = j % corpus.size();
            try {
                results[j] = detail::measure_video(corpus[vi], configs[ci], fps);
            } catch (const std::exception& e) {
                char buf[160];
                std::snprintf(buf, sizeof buf, "video %zu, config (xi=%g, q=%u, p=%u): ", vi,
                              configs[ci].xi, configs[ci].q, configs[ci].p);
                errors[j] = std::string(buf) + e.what();
            }
        }
    };
    const unsigned n_threads = std::max(1u, std::min<unsigned>(threads, unsigned(jobs)));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    for (const std::string& e : errors)
        if (!e.empty()) throw std::runtime_error("rd_sweep: " + e);

    std::vector<RdPoint> points;
    points.reserve(configs.size());
    for (std::size_t ci = 0; ci < configs.size(); ++ci) {
        RdPoint pt;
        pt.xi = configs[ci].xi;
        pt.q = configs[ci].q;
        pt.p = configs[ci].p;
        for (std::size_t vi = 0; vi < corpus.size(); ++vi) {
            const auto& m = results[ci * corpus.size() + vi];
            pt.total_bits += m.bits;
            pt.bpp += m.bpp;
            pt.kbps += m.kbps;
            pt.miou += m.miou;
        }
        pt.bpp /= double(corpus.size());
        pt.kbps /= double(corpus.size());
        pt.miou /= double(corpus.size());
        points.push_back(pt);
    }
    return points;
}

/// CSV rendering: header row, '.' decimal separator, reals with fixed six
/// decimals.
inline std::string rd_points_csv(std::span<const RdPoint> points) {
    std::string out = "xi,q,p,total_bits,bpp,kbps,miou\n";
    char buf[256];
    for (const RdPoint& pt : points) {
        std::snprintf(buf, sizeof buf, "%.6f,%u,%u,%llu,%.6f,%.6f,%.6f\n", pt.xi, pt.q, pt.p,
                      static_cast<unsigned long long>(pt.total_bits), pt.bpp, pt.kbps, pt.miou);
        out += buf;
    }
    return out;
}

}  // namespace svc

#endif  // SVC_METRICS_HPP

// Command-line front end: encode/decode semantic map sequences, evaluate
// fidelity, run rate-distortion sweeps, and exercise the packet layer.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "svc/io.hpp"
#include "svc/png_io.hpp"
#include "svc/svc.hpp"

namespace fs = std::filesystem;

namespace {

std::vector<svc::SemanticMap> load_maps(const fs::path& path) {
    if (fs::is_directory(path)) {
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(path))
            if (entry.is_regular_file() && entry.path().extension() == ".png")
                files.push_back(entry.path());
        if (files.empty()) throw std::runtime_error("no .png frames in " + path.string());
        std::sort(files.begin(), files.end());
        std::vector<svc::SemanticMap> maps;
        maps.reserve(files.size());
        for (const auto& f : files) {
            maps.push_back(svc::read_png_labels(f));
            if (maps.back().width() != maps[0].width() || maps.back().height() != maps[0].height())
                throw std::runtime_error("inconsistent frame size in " + f.string());
        }
        return maps;
    }
    return svc::read_smr(svc::read_file(path));
}

void save_maps(const fs::path& path, const std::vector<svc::SemanticMap>& maps,
               const std::string& format) {
    if (format == "png") {
        fs::create_directories(path);
        char name[32];
        for (std::size_t k = 0; k < maps.size(); ++k) {
            std::snprintf(name, sizeof name, "frame_%06zu.png", k);
            svc::write_png_labels(path / name, maps[k]);
        }
    } else {
        svc::write_file(path, svc::write_smr(maps));
    }
}

svc::Connectivity parse_connectivity(int c) {
    if (c == 4) return svc::Connectivity::Four;
    if (c == 8) return svc::Connectivity::Eight;
    throw CLI::ValidationError("--connectivity must be 4 or 8");
}

int cmd_encode(const fs::path& input, const fs::path& output, svc::CodecConfig cfg, double fps) {
    const auto maps = load_maps(input);
    const svc::EncodedVideo ev = svc::encode_video(maps, cfg);
    svc::write_file(output, svc::serialize_video(ev));
    const std::uint64_t bits = svc::coded_size_bits(ev);
    std::printf("total_bits %llu\n", static_cast<unsigned long long>(bits));
    std::printf("bpp %.6f\n", svc::bpp(bits, maps[0].width(), maps[0].height(), maps.size()));
    std::printf("kbps %.6f\n", svc::kbps(bits, maps.size(), fps));
    return 0;
}

// Lenient parse for --best-effort: keeps every frame that precedes the first
// structural failure.
svc::EncodedVideo parse_prefix(std::span<const std::uint8_t> data) {
    svc::ByteReader r(data, "container: ");
    std::vector<std::uint8_t> header(data.begin(),
                                     data.begin() + std::min<std::size_t>(data.size(), 21));
    if (header.size() < 21) throw svc::DecodeError("container shorter than its header");
    for (std::size_t i = 9; i < 13; ++i) header[i] = 0;
    svc::EncodedVideo ev = svc::parse_video(header);
    r.skip(21);
    while (r.remaining() >= 5) {
        svc::EncodedFrame ef;
        const std::uint8_t type = r.u8();
        if (type > 1) break;
        ef.frame_type = svc::FrameType(type);
        const std::uint32_t len = r.u32();
        if (len > r.remaining()) break;
        const auto payload = r.bytes(len);
        ef.payload.assign(payload.begin(), payload.end());
        ef.raw_bit_count = 8ull * ef.payload.size();
        ev.frames.push_back(std::move(ef));
    }
    return ev;
}

int cmd_decode(const fs::path& input, const fs::path& output, const std::string& format,
               bool best_effort, bool from_packets) {
    const auto data = svc::read_file(input);
    svc::EncodedVideo ev;
    if (from_packets) {
        ev = svc::depacketize(svc::read_packet_dump(data));
    } else if (best_effort) {
        ev = parse_prefix(data);
    } else {
        ev = svc::parse_video(data);
    }

    std::vector<svc::SemanticMap> maps;
    if (best_effort) {
        try {
            maps = svc::decode_video(ev);
        } catch (const svc::DecodeError& e) {
            const std::uint32_t upto = e.frame_index().value_or(0);
            std::cerr << "warning: " << e.what() << "; emitting " << upto << " frames\n";
            ev.frames.resize(upto);
            maps = ev.frames.empty() ? std::vector<svc::SemanticMap>{} : svc::decode_video(ev);
        }
        if (maps.empty()) throw svc::DecodeError("no decodable frames");
    } else {
        maps = svc::decode_video(ev);
    }
    save_maps(output, maps, format);
    return 0;
}

int cmd_eval(const fs::path& decoded, const fs::path& reference, std::optional<svc::Label> ignore) {
    const auto dec = load_maps(decoded);
    const auto ref = load_maps(reference);
    if (dec.size() != ref.size())
        throw std::runtime_error("frame counts differ: " + std::to_string(dec.size()) + " vs " +
                                 std::to_string(ref.size()));
    double sum = 0;
    for (std::size_t k = 0; k < dec.size(); ++k) {
        const double m = svc::miou(dec[k], ref[k], ignore);
        std::printf("frame %zu miou %.6f\n", k, m);
        sum += m;
    }
    std::printf("mean_miou %.6f\n", sum / double(dec.size()));
    return 0;
}

int cmd_sweep(const std::string& corpus_dir, bool synthetic, std::uint64_t seed,
              std::uint32_t videos, std::uint32_t frames, std::uint32_t size,
              const std::vector<double>& xi_list, const std::vector<std::uint32_t>& q_list,
              const std::vector<std::uint32_t>& p_list, double fps, const fs::path& output,
              unsigned threads) {
    std::vector<svc::Video> corpus;
    if (synthetic) {
        svc::SceneParams params;
        params.width = size;
        params.height = size;
        params.frame_count = frames;
        for (std::uint32_t i = 0; i < videos; ++i)
            corpus.push_back(svc::generate_corpus(svc::random_scene_spec(seed + i, params)));
    } else {
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(corpus_dir))
            if (entry.is_regular_file()) files.push_back(entry.path());
        std::sort(files.begin(), files.end());
        for (const auto& f : files) corpus.push_back(svc::read_smr(svc::read_file(f)));
        if (corpus.empty()) throw std::runtime_error("no corpus files in " + corpus_dir);
    }

    svc::SweepGrid grid;
    grid.xi = xi_list;
    grid.q = q_list;
    grid.p = p_list;
    const auto points = svc::rd_sweep(corpus, grid, fps, svc::CodecConfig{}, threads);
    const std::string csv = svc::rd_points_csv(points);
    if (output.empty()) {
        std::fputs(csv.c_str(), stdout);
    } else {
        svc::write_file(output, std::span(reinterpret_cast<const std::uint8_t*>(csv.data()),
                                          csv.size()));
    }
    return 0;
}

int cmd_losssim(const fs::path& input, double loss, std::uint64_t seed, const fs::path& output,
                const std::string& format) {
    const svc::EncodedVideo ev = svc::parse_video(svc::read_file(input));
    const auto sim = svc::simulate_and_decode(svc::packetize(ev), svc::ChannelModel{loss, seed});

    auto print_indices = [](const char* name, const std::vector<std::uint32_t>& v) {
        std::printf("%s %zu:", name, v.size());
        for (const std::uint32_t i : v) std::printf(" %u", i);
        std::printf("\n");
    };
    print_indices("lost", sim.report.lost);
    print_indices("concealed", sim.report.concealed);
    print_indices("absent", sim.report.absent);
    std::printf("decoded_frames %zu\n", sim.frames.size());

    if (!output.empty()) {
        if (sim.frames.empty()) throw std::runtime_error("nothing decodable to write");
        save_maps(output, sim.frames, format);
    }
    return 0;
}

int cmd_pack(const fs::path& input, const fs::path& output, std::uint32_t stream_id) {
    const svc::EncodedVideo ev = svc::parse_video(svc::read_file(input));
    svc::write_file(output, svc::write_packet_dump(svc::packetize(ev, stream_id)));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Contour-based IP-frame codec for semantic segmentation maps"};
    app.require_subcommand(1);

    // encode
    std::string in_path, out_path;
    double xi = 6.0, fps = 10.0;
    std::uint32_t q = 256, p = 4;
    std::uint32_t background = 0;
    std::string pframe_mode = "strict";
    int connectivity = 4;
    auto* enc = app.add_subcommand("encode", "Encode an SMR1 file or PNG directory to .svc1");
    enc->add_option("-i,--input", in_path)->required();
    enc->add_option("-o,--output", out_path)->required();
    enc->add_option("--xi", xi, "Simplification tolerance in pixels");
    enc->add_option("--q", q, "Quantizer symbol count");
    enc->add_option("--p", p, "I-frame period (1 = all I-frames)");
    enc->add_option("--background", background, "Background label");
    enc->add_option("--pframe-mode", pframe_mode)->check(CLI::IsMember({"strict", "extended"}));
    enc->add_option("--connectivity", connectivity, "Component connectivity (4 or 8)");
    enc->add_option("--fps", fps, "Frame rate used for kbps reporting");

    // decode
    std::string format = "smr";
    bool best_effort = false, from_packets = false;
    auto* dec = app.add_subcommand("decode", "Decode .svc1 to SMR1 or PNG frames");
    dec->add_option("-i,--input", in_path)->required();
    dec->add_option("-o,--output", out_path)->required();
    dec->add_option("--format", format)->check(CLI::IsMember({"smr", "png"}));
    dec->add_flag("--best-effort", best_effort, "Emit whatever precedes a corrupt frame");
    dec->add_flag("--from-packets", from_packets, "Input is a packet dump");

    // eval
    std::string ref_path;
    std::int64_t ignore_label = -1;
    auto* ev = app.add_subcommand("eval", "Per-frame and mean mIoU of decoded vs reference");
    ev->add_option("-d,--decoded", in_path)->required();
    ev->add_option("-r,--reference", ref_path)->required();
    ev->add_option("--ignore-label", ignore_label, "Label excluded from scoring");

    // sweep
    std::string corpus_dir;
    bool synthetic = false;
    std::uint64_t seed = 0xC0DEC;
    std::uint32_t videos = 25, frames = 30, size = 512;
    std::vector<double> xi_list{4, 6, 8, 12, 16, 20, 24};
    std::vector<std::uint32_t> q_list{64, 256, 1024};
    std::vector<std::uint32_t> p_list{1, 2, 4, 8};
    unsigned threads = std::thread::hardware_concurrency();
    auto* sw = app.add_subcommand("sweep", "Rate-distortion sweep over (xi, q, p)");
    auto* corpus_opt = sw->add_option("--corpus", corpus_dir, "Directory of SMR1 videos");
    sw->add_flag("--synthetic", synthetic, "Generate the synthetic corpus instead");
    sw->add_option("--seed", seed);
    sw->add_option("--videos", videos);
    sw->add_option("--frames", frames);
    sw->add_option("--size", size, "Square frame edge length");
    sw->add_option("--xi-list", xi_list)->delimiter(',');
    sw->add_option("--q-list", q_list)->delimiter(',');
    sw->add_option("--p-list", p_list)->delimiter(',');
    sw->add_option("--fps", fps);
    sw->add_option("-o,--output", out_path, "CSV path (stdout when omitted)");
    sw->add_option("--threads", threads);

    // losssim
    double loss = 0.0;
    auto* ls = app.add_subcommand("losssim", "Packetize, drop packets, decode with concealment");
    ls->add_option("-i,--input", in_path)->required();
    ls->add_option("--loss", loss)->check(CLI::Range(0.0, 1.0));
    ls->add_option("--seed", seed);
    ls->add_option("-o,--output", out_path, "Decoded output (optional)");
    ls->add_option("--format", format)->check(CLI::IsMember({"smr", "png"}));

    // pack
    std::uint32_t stream_id = 1;
    auto* pk = app.add_subcommand("pack", "Write the packet dump of a .svc1 stream");
    pk->add_option("-i,--input", in_path)->required();
    pk->add_option("-o,--output", out_path)->required();
    pk->add_option("--stream-id", stream_id);

    CLI11_PARSE(app, argc, argv);

    try {
        if (enc->parsed()) {
            svc::CodecConfig cfg;
            cfg.xi = xi;
            cfg.q = q;
            cfg.p = p;
            if (background > 65535) throw std::runtime_error("--background exceeds u16");
            cfg.background_label = svc::Label(background);
            cfg.pframe_mode =
                pframe_mode == "extended" ? svc::PFrameMode::Extended : svc::PFrameMode::Strict;
            cfg.connectivity = parse_connectivity(connectivity);
            cfg.validate();
            return cmd_encode(in_path, out_path, cfg, fps);
        }
        if (dec->parsed()) return cmd_decode(in_path, out_path, format, best_effort, from_packets);
        if (ev->parsed()) {
            std::optional<svc::Label> ignore;
            if (ignore_label >= 0) {
                if (ignore_label > 65535) throw std::runtime_error("--ignore-label exceeds u16");
                ignore = svc::Label(ignore_label);
            }
            return cmd_eval(in_path, ref_path, ignore);
        }
        if (sw->parsed()) {
            if (!synthetic && corpus_opt->count() == 0)
                throw std::runtime_error("sweep needs --corpus DIR or --synthetic");
            return cmd_sweep(corpus_dir, synthetic, seed, videos, frames, size, xi_list, q_list,
                             p_list, fps, out_path, threads);
        }
        if (ls->parsed()) return cmd_losssim(in_path, loss, seed, out_path, format);
        if (pk->parsed()) return cmd_pack(in_path, out_path, stream_id);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

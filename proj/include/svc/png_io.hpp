#ifndef SVC_PNG_IO_HPP
#define SVC_PNG_IO_HPP

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <png.h>

#include "svc/core.hpp"

namespace svc {

/// Reads the label channel of a PNG: grayscale bit depths 1-16 or the raw
/// palette index of indexed images. Color images are rejected; mapping RGB
/// triples to class labels would be guesswork.
inline SemanticMap read_png_labels(const std::filesystem::path& path) {
    std::unique_ptr<std::FILE, int (*)(std::FILE*)> fp(std::fopen(path.c_str(), "rb"),
                                                       &std::fclose);
    if (!fp) throw std::runtime_error("cannot open " + path.string());

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw std::runtime_error("libpng init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw std::runtime_error("libpng init failed");
    }
    std::vector<std::uint8_t> rowdata;
    std::vector<png_bytep> rows;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw std::runtime_error("PNG decode failed for " + path.string());
    }
    png_init_io(png, fp.get());
    png_read_info(png, info);

    const png_uint_32 w = png_get_image_width(png, info);
    const png_uint_32 h = png_get_image_height(png, info);
    const int color = png_get_color_type(png, info);
    const int depth = png_get_bit_depth(png, info);

    if (color != PNG_COLOR_TYPE_GRAY && color != PNG_COLOR_TYPE_PALETTE) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw std::runtime_error(path.string() +
                                 ": only grayscale or paletted label PNGs are supported");
    }
    if (depth < 8) png_set_packing(png);  // one byte per pixel, values preserved
    png_read_update_info(png, info);
    const int out_depth = png_get_bit_depth(png, info);

    const std::size_t rowbytes = png_get_rowbytes(png, info);
    rowdata.resize(rowbytes * h);
    rows.resize(h);
    for (png_uint_32 r = 0; r < h; ++r) rows[r] = rowdata.data() + rowbytes * r;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    SemanticMap map(w, h);
    for (png_uint_32 r = 0; r < h; ++r) {
        const std::uint8_t* row = rowdata.data() + rowbytes * r;
        for (png_uint_32 c = 0; c < w; ++c) {
            if (out_depth == 16)  // PNG stores 16-bit samples big-endian
                map.at(r, c) = Label((row[2 * c] << 8) | row[2 * c + 1]);
            else
                map.at(r, c) = row[c];
        }
    }
    return map;
}

/// Writes a map as grayscale PNG, 8-bit when labels fit a byte, else 16-bit.
inline void write_png_labels(const std::filesystem::path& path, const SemanticMap& map) {
    Label max_label = 0;
    for (const Label l : map.labels()) max_label = std::max(max_label, l);
    const int depth = max_label > 255 ? 16 : 8;

    std::unique_ptr<std::FILE, int (*)(std::FILE*)> fp(std::fopen(path.c_str(), "wb"),
                                                       &std::fclose);
    if (!fp) throw std::runtime_error("cannot create " + path.string());

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw std::runtime_error("libpng init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw std::runtime_error("libpng init failed");
    }
    std::vector<std::uint8_t> rowdata;
    std::vector<png_bytep> rows;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw std::runtime_error("PNG encode failed for " + path.string());
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, map.width(), map.height(), depth, PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);

    const std::size_t rowbytes = std::size_t(map.width()) * (depth / 8);
    rowdata.resize(rowbytes * map.height());
    rows.resize(map.height());
    for (std::uint32_t r = 0; r < map.height(); ++r) {
        std::uint8_t* row = rowdata.data() + rowbytes * r;
        rows[r] = row;
        for (std::uint32_t c = 0; c < map.width(); ++c) {
            const Label l = map.at(r, c);
            if (depth == 16) {
                row[2 * c] = std::uint8_t(l >> 8);
                row[2 * c + 1] = std::uint8_t(l);
            } else {
                row[c] = std::uint8_t(l);
            }
        }
    }
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

}  // namespace svc

#endif  // SVC_PNG_IO_HPP

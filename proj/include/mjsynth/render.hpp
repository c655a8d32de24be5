#pragma once

#include <cstdio>
#include <map>
#include <memory>
#include <string>

#include <png.h>

#include <json.hpp>

#include "mjsynth/grid.hpp"

namespace mjsynth {

struct Rgb {
    std::uint8_t r = 0, g = 0, b = 0;
    friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// Symbol character to color. Must cover the whole alphabet when rendering.
using Palette = std::map<char, Rgb>;

/// Deterministic fallback colors: hues spread by the golden angle.
inline Palette default_palette(const Alphabet& alphabet) {
    Palette p;
    for (int i = 0; i < alphabet.size(); ++i) {
        const double hue = std::fmod(i * 137.50776405, 360.0);
        const double h = hue / 60.0;
        const double x = 1.0 - std::abs(std::fmod(h, 2.0) - 1.0);
        double r = 0, g = 0, b = 0;
        switch (static_cast<int>(h)) {
            case 0: r = 1; g = x; break;
            case 1: r = x; g = 1; break;
            case 2: g = 1; b = x; break;
            case 3: g = x; b = 1; break;
            case 4: r = x; b = 1; break;
            default: r = 1; b = x; break;
        }
        const double v = 0.45 + 0.50 * ((i % 3) / 2.0); // vary brightness a little
        p[alphabet.display_of(static_cast<SymbolId>(i))] = {
            static_cast<std::uint8_t>(r * v * 255.0), static_cast<std::uint8_t>(g * v * 255.0),
            static_cast<std::uint8_t>(b * v * 255.0)};
    }
    return p;
}

/// Reads a palette JSON file: {"A": [r, g, b], ...}.
inline Palette load_palette(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open palette: " + path);
    const auto j = nlohmann::json::parse(in);
    Palette p;
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& key = it.key();
        if (key.size() != 1)
            throw std::runtime_error("palette key must be a single character: '" + key + "'");
        const auto rgb = it.value().get<std::vector<int>>();
        if (rgb.size() != 3)
            throw std::runtime_error("palette entry for '" + key + "' must be [r,g,b]");
        p[key[0]] = {static_cast<std::uint8_t>(rgb[0]), static_cast<std::uint8_t>(rgb[1]),
                     static_cast<std::uint8_t>(rgb[2])};
    }
    return p;
}

/// Writes the grid as an RGB PNG, each cell a cell_px-sized solid block.
inline void render_png(const Grid& g, const Alphabet& alphabet, const Palette& palette,
                       int cell_px, const std::string& path) {
    if (cell_px < 1) throw std::invalid_argument("cell_px must be at least 1");
    for (int i = 0; i < alphabet.size(); ++i) {
        const char c = alphabet.display_of(static_cast<SymbolId>(i));
        if (!palette.count(c))
            throw std::runtime_error(std::string("palette is missing symbol '") + c + "'");
    }

    const int out_w = g.width * cell_px;
    const int out_h = g.height * cell_px;

    std::unique_ptr<std::FILE, int (*)(std::FILE*)> fp(std::fopen(path.c_str(), "wb"),
                                                       &std::fclose);
    if (!fp) throw std::runtime_error("cannot write image: " + path);

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw std::runtime_error("png_create_write_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw std::runtime_error("png_create_info_struct failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw std::runtime_error("png write failed: " + path);
    }

    png_init_io(png, fp.get());
    png_set_IHDR(png, info, out_w, out_h, 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);

    std::vector<png_byte> row(static_cast<std::size_t>(out_w) * 3);
    for (int r = 0; r < g.height; ++r) {
        for (int c = 0; c < g.width; ++c) {
            const Rgb color = palette.at(alphabet.display_of(g.at(r, c)));
            for (int px = 0; px < cell_px; ++px) {
                const std::size_t base = (static_cast<std::size_t>(c) * cell_px + px) * 3;
                row[base] = color.r;
                row[base + 1] = color.g;
                row[base + 2] = color.b;
            }
        }
        for (int py = 0; py < cell_px; ++py) png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

} // namespace mjsynth

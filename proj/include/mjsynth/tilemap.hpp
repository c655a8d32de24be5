#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "mjsynth/grid.hpp"

namespace mjsynth {

struct Tilemap {
    Grid grid;
    Alphabet alphabet;
};

/// Splits tile-map text into rows. One printable character per cell, rows
/// newline-delimited; a single trailing blank line is ignored.
inline std::vector<std::string> split_tilemap_text(const std::string& text) {
    std::vector<std::string> rows;
    std::string line;
    std::istringstream in(text);
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        rows.push_back(line);
    }
    while (!rows.empty() && rows.back().empty()) rows.pop_back();
    return rows;
}

inline Tilemap tilemap_from_rows(const std::vector<std::string>& rows) {
    if (rows.empty()) throw std::runtime_error("empty sample");
    const std::size_t width = rows.front().size();
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != width) {
            throw std::runtime_error("ragged line " + std::to_string(i + 1) + ": expected width " +
                                     std::to_string(width) + ", got " +
                                     std::to_string(rows[i].size()));
        }
    }
    Tilemap t;
    t.alphabet = infer_alphabet(rows);
    t.grid = grid_from_rows(rows, t.alphabet);
    return t;
}

inline Tilemap tilemap_from_string(const std::string& text) {
    return tilemap_from_rows(split_tilemap_text(text));
}

inline Tilemap load_tilemap(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open tile map: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    auto rows = split_tilemap_text(text);
    if (rows.empty()) throw std::runtime_error("empty file: " + path);
    return tilemap_from_rows(rows);
}

inline std::string tilemap_to_string(const Grid& g, const Alphabet& alphabet) {
    std::string out;
    out.reserve(static_cast<std::size_t>(g.height) * (g.width + 1));
    for (int r = 0; r < g.height; ++r) {
        for (int c = 0; c < g.width; ++c) {
            const SymbolId s = g.at(r, c);
            if (s == kWildcard)
                throw std::runtime_error("grid contains a wildcard; cannot write tile map");
            out.push_back(alphabet.display_of(s));
        }
        out.push_back('\n');
    }
    return out;
}

inline void save_tilemap(const Grid& g, const Alphabet& alphabet, const std::string& path) {
    const std::string text = tilemap_to_string(g, alphabet);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write tile map: " + path);
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path);
}

} // namespace mjsynth

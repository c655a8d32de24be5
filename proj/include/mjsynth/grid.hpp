#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace mjsynth {

using SymbolId = std::uint8_t;

/// Reserved id that matches any symbol in an antecedent and means
/// "leave the cell unchanged" in a consequent. Never part of an alphabet.
inline constexpr SymbolId kWildcard = 0xFF;
inline constexpr char kWildcardChar = '*';
inline constexpr int kMaxAlphabetSize = 254;

struct Coord {
    int row = 0;
    int col = 0;

    friend bool operator==(Coord a, Coord b) { return a.row == b.row && a.col == b.col; }
    friend bool operator!=(Coord a, Coord b) { return !(a == b); }
    // Row-major order; used wherever ties must break deterministically.
    friend bool operator<(Coord a, Coord b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    }
};

/// The symbol set of one sample. Ids are dense, assigned in order of first
/// appearance; the wildcard is not a member and not counted in size().
class Alphabet {
  public:
    Alphabet() { index_.fill(-1); }

    SymbolId add(char display) {
        if (display == kWildcardChar)
            throw std::runtime_error("'*' is reserved for the wildcard");
        if (int existing = index_[byte(display)]; existing >= 0)
            return static_cast<SymbolId>(existing);
        if (static_cast<int>(display_.size()) >= kMaxAlphabetSize)
            throw std::runtime_error("alphabet overflow: more than 254 distinct symbols");
        const SymbolId id = static_cast<SymbolId>(display_.size());
        display_.push_back(display);
        neutral_.push_back(false);
        index_[byte(display)] = id;
        return id;
    }

    int size() const { return static_cast<int>(display_.size()); }
    bool contains(char display) const { return index_[byte(display)] >= 0; }

    SymbolId id_of(char display) const {
        const int id = index_[byte(display)];
        if (id < 0)
            throw std::runtime_error(std::string("unknown symbol '") + display + "'");
        return static_cast<SymbolId>(id);
    }

    char display_of(SymbolId id) const {
        if (id == kWildcard) return kWildcardChar;
        return display_.at(id);
    }

    bool is_neutral(SymbolId id) const { return id != kWildcard && neutral_.at(id); }

    void set_neutral(SymbolId id, bool value = true) { neutral_.at(id) = value; }

    /// Ids flagged neutral, ascending.
    std::vector<SymbolId> neutral_ids() const {
        std::vector<SymbolId> out;
        for (int i = 0; i < size(); ++i)
            if (neutral_[i]) out.push_back(static_cast<SymbolId>(i));
        return out;
    }

    const std::string& symbols() const { return display_; }

    friend bool operator==(const Alphabet& a, const Alphabet& b) {
        return a.display_ == b.display_ && a.neutral_ == b.neutral_;
    }

  private:
    static std::size_t byte(char c) { return static_cast<unsigned char>(c); }

    std::string display_;
    std::vector<bool> neutral_;
    std::array<int, 256> index_{};
};

/// A rectangular field of symbols; the environment every grammar rewrites.
struct Grid {
    int width = 0;
    int height = 0;
    std::vector<SymbolId> cells; // row-major, height*width

    Grid() = default;
    Grid(int w, int h, SymbolId fill = 0)
        : width(w), height(h), cells(static_cast<std::size_t>(w) * h, fill) {
        if (w < 1 || h < 1) throw std::invalid_argument("grid dimensions must be positive");
    }

    SymbolId at(int row, int col) const {
        return cells[static_cast<std::size_t>(row) * width + col];
    }
    SymbolId& at(int row, int col) {
        return cells[static_cast<std::size_t>(row) * width + col];
    }
    bool in_bounds(int row, int col) const {
        return row >= 0 && row < height && col >= 0 && col < width;
    }

    friend bool operator==(const Grid&, const Grid&) = default;
};

/// A fixed-shape sub-grid; wildcard cells are allowed.
struct Pattern {
    int rows = 0;
    int cols = 0;
    std::vector<SymbolId> cells;

    Pattern() = default;
    Pattern(int r, int c, std::vector<SymbolId> data)
        : rows(r), cols(c), cells(std::move(data)) {
        if (r < 1 || c < 1 || cells.size() != static_cast<std::size_t>(r) * c)
            throw std::invalid_argument("pattern shape does not match cell count");
    }

    SymbolId at(int r, int c) const {
        return cells[static_cast<std::size_t>(r) * cols + c];
    }
    SymbolId& at(int r, int c) {
        return cells[static_cast<std::size_t>(r) * cols + c];
    }

    bool has_wildcard() const {
        for (SymbolId s : cells)
            if (s == kWildcard) return true;
        return false;
    }

    // Identity is shape plus cells; occurrence lists live outside the pattern.
    friend bool operator==(const Pattern&, const Pattern&) = default;
};

struct PatternHasher {
    std::size_t operator()(const Pattern& p) const {
        std::uint64_t h = 1469598103934665603ULL; // FNV-1a
        auto mix = [&h](std::uint64_t v) {
            h ^= v;
            h *= 1099511628211ULL;
        };
        mix(static_cast<std::uint64_t>(p.rows));
        mix(static_cast<std::uint64_t>(p.cols));
        for (SymbolId s : p.cells) mix(s);
        return static_cast<std::size_t>(h);
    }
};

inline std::uint64_t grid_hash(const Grid& g) {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](std::uint64_t v) {
        h ^= v;
        h *= 1099511628211ULL;
    };
    mix(static_cast<std::uint64_t>(g.width));
    mix(static_cast<std::uint64_t>(g.height));
    for (SymbolId s : g.cells) mix(s);
    return h;
}

/// Collects the distinct symbols of a textual sample, in scan order.
inline Alphabet infer_alphabet(const std::vector<std::string>& rows) {
    bool empty = rows.empty();
    if (!empty) {
        empty = true;
        for (const auto& r : rows)
            if (!r.empty()) empty = false;
    }
    if (empty) throw std::runtime_error("empty sample");
    Alphabet a;
    for (const auto& r : rows)
        for (char c : r) a.add(c);
    return a;
}

/// Interns a rectangular block of characters against an alphabet.
inline Grid grid_from_rows(const std::vector<std::string>& rows, const Alphabet& alphabet) {
    if (rows.empty() || rows.front().empty()) throw std::runtime_error("empty sample");
    Grid g(static_cast<int>(rows.front().size()), static_cast<int>(rows.size()));
    for (int r = 0; r < g.height; ++r) {
        if (static_cast<int>(rows[r].size()) != g.width)
            throw std::runtime_error("ragged rows");
        for (int c = 0; c < g.width; ++c) g.at(r, c) = alphabet.id_of(rows[r][c]);
    }
    return g;
}

inline std::vector<std::string> grid_to_rows(const Grid& g, const Alphabet& alphabet) {
    std::vector<std::string> rows(g.height);
    for (int r = 0; r < g.height; ++r) {
        rows[r].resize(g.width);
        for (int c = 0; c < g.width; ++c) rows[r][c] = alphabet.display_of(g.at(r, c));
    }
    return rows;
}

/// True iff every non-wildcard pattern cell equals the grid cell under it.
/// Throws if the pattern does not fit inside the grid at pos.
inline bool match_at(const Grid& g, const Pattern& p, Coord pos) {
    if (pos.row < 0 || pos.col < 0 || pos.row + p.rows > g.height || pos.col + p.cols > g.width)
        throw std::out_of_range("pattern does not fit at position");
    for (int r = 0; r < p.rows; ++r)
        for (int c = 0; c < p.cols; ++c) {
            const SymbolId want = p.at(r, c);
            if (want != kWildcard && want != g.at(pos.row + r, pos.col + c)) return false;
        }
    return true;
}

/// All positions where the pattern matches, in row-major order.
/// Empty when the pattern does not fit anywhere.
inline std::vector<Coord> find_occurrences(const Grid& g, const Pattern& p) {
    std::vector<Coord> out;
    if (p.rows > g.height || p.cols > g.width) return out;
    for (int r = 0; r + p.rows <= g.height; ++r)
        for (int c = 0; c + p.cols <= g.width; ++c) {
            bool ok = true;
            for (int pr = 0; pr < p.rows && ok; ++pr)
                for (int pc = 0; pc < p.cols; ++pc) {
                    const SymbolId want = p.at(pr, pc);
                    if (want != kWildcard && want != g.at(r + pr, c + pc)) {
                        ok = false;
                        break;
                    }
                }
            if (ok) out.push_back({r, c});
        }
    return out;
}

struct PatternOccurrences {
    Pattern pattern;
    std::vector<Coord> occurrences;
};

/// Every distinct n-by-n sub-grid with its full occurrence list. Windows do
/// not wrap at the borders. Patterns are listed in first-seen (row-major)
/// order; occurrence counts over all patterns sum to the window count.
inline std::vector<PatternOccurrences> scan_patterns(const Grid& g, int n) {
    if (n < 1) throw std::invalid_argument("window must be positive");
    if (n > g.width || n > g.height) throw std::runtime_error("window exceeds grid");
    std::vector<PatternOccurrences> out;
    std::unordered_map<Pattern, std::size_t, PatternHasher> seen;
    std::vector<SymbolId> buf(static_cast<std::size_t>(n) * n);
    for (int r = 0; r + n <= g.height; ++r)
        for (int c = 0; c + n <= g.width; ++c) {
            for (int pr = 0; pr < n; ++pr)
                for (int pc = 0; pc < n; ++pc)
                    buf[static_cast<std::size_t>(pr) * n + pc] = g.at(r + pr, c + pc);
            Pattern p(n, n, buf);
            auto [it, inserted] = seen.emplace(std::move(p), out.size());
            if (inserted) out.push_back({it->first, {}});
            out[it->second].occurrences.push_back({r, c});
        }
    return out;
}

/// Copies the rectangle starting at pos with the given shape.
inline Pattern extract(const Grid& g, Coord pos, int rows, int cols) {
    if (pos.row < 0 || pos.col < 0 || pos.row + rows > g.height || pos.col + cols > g.width)
        throw std::out_of_range("extract rectangle out of bounds");
    Pattern p;
    p.rows = rows;
    p.cols = cols;
    p.cells.resize(static_cast<std::size_t>(rows) * cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) p.at(r, c) = g.at(pos.row + r, pos.col + c);
    return p;
}

} // namespace mjsynth

#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "mjsynth/grid.hpp"

namespace mjsynth {

struct Offset {
    int drow = 0;
    int dcol = 0;

    friend bool operator==(Offset a, Offset b) { return a.drow == b.drow && a.dcol == b.dcol; }
    friend bool operator!=(Offset a, Offset b) { return !(a == b); }
    friend bool operator<(Offset a, Offset b) {
        return a.drow != b.drow ? a.drow < b.drow : a.dcol < b.dcol;
    }
    Offset operator-() const { return {-drow, -dcol}; }
    double norm() const { return std::hypot(static_cast<double>(drow), static_cast<double>(dcol)); }
};

/// Euclidean distance between two occurrence coordinates.
inline double distance(Coord q, Coord p) {
    return std::hypot(static_cast<double>(q.row - p.row), static_cast<double>(q.col - p.col));
}

/// Componentwise difference q - p.
inline Offset offset(Coord q, Coord p) {
    return {q.row - p.row, q.col - p.col};
}

struct DistanceRelation {
    int from = 0; // pattern id of Q
    int to = 0;   // pattern id of P
    double distance = 0.0;
};

struct PositioningRelation {
    int from = 0;
    int to = 0;
    Offset offset;
};

/// Distinct patterns interned across one or more source grids. Pattern ids
/// are assigned in first-seen order, stable for a fixed sequence of
/// add_grid calls; occurrences are kept per source so relations never pair
/// coordinates from different grids.
class PatternDatabase {
  public:
    /// Scans g with an n-by-n window and merges its patterns into the
    /// database. Returns the source index of the grid.
    int add_grid(const Grid& g, int window) {
        const int source = static_cast<int>(source_count_++);
        for (auto& po : scan_patterns(g, window)) {
            auto [it, inserted] = index_.emplace(po.pattern, patterns_.size());
            if (inserted) patterns_.push_back(po.pattern);
            auto& per_source = occurrences_[it->second];
            per_source.resize(source_count_);
            per_source[source] = std::move(po.occurrences);
        }
        for (auto& per_source : occurrences_) per_source.resize(source_count_);
        return source;
    }

    int pattern_count() const { return static_cast<int>(patterns_.size()); }
    int source_count() const { return static_cast<int>(source_count_); }

    const Pattern& pattern(int id) const { return patterns_.at(id); }

    const std::vector<Coord>& occurrences(int id, int source) const {
        return occurrences_.at(id).at(source);
    }

    std::size_t total_occurrences(int id) const {
        std::size_t n = 0;
        for (const auto& occ : occurrences_.at(id)) n += occ.size();
        return n;
    }

    int find(const Pattern& p) const {
        auto it = index_.find(p);
        return it == index_.end() ? -1 : static_cast<int>(it->second);
    }

  private:
    std::vector<Pattern> patterns_;
    std::vector<std::vector<std::vector<Coord>>> occurrences_; // [pattern][source]
    std::unordered_map<Pattern, std::size_t, PatternHasher> index_;
    std::size_t source_count_ = 0;
};

struct RelationRecord {
    Coord q;
    Coord p;
    Offset off;    // q - p
    double dist;   // |q - p|
    int source;
};

/// Per ordered pattern pair: the relations from each Q-occurrence to its
/// top-k nearest P-occurrences within max_distance, computed per source
/// grid. Ties in distance break by row-major coordinate order.
struct RelationTable {
    int top_k = 1;
    double max_distance = 0.0;
    std::map<std::pair<int, int>, std::vector<RelationRecord>> records;
    std::vector<std::string> warnings;

    const std::vector<RelationRecord>* find(int q_id, int p_id) const {
        auto it = records.find({q_id, p_id});
        return it == records.end() ? nullptr : &it->second;
    }

    /// Distinct offsets recorded for the ordered pair, sorted.
    std::vector<Offset> offsets(int q_id, int p_id) const {
        std::vector<Offset> out;
        if (const auto* recs = find(q_id, p_id)) {
            for (const auto& r : *recs) out.push_back(r.off);
            std::sort(out.begin(), out.end());
            out.erase(std::unique(out.begin(), out.end()), out.end());
        }
        return out;
    }

    std::vector<DistanceRelation> distance_relations() const {
        std::vector<DistanceRelation> out;
        for (const auto& [pair, recs] : records)
            for (const auto& r : recs) out.push_back({pair.first, pair.second, r.dist});
        return out;
    }

    std::vector<PositioningRelation> positioning_relations() const {
        std::vector<PositioningRelation> out;
        for (const auto& [pair, recs] : records)
            for (const auto& r : recs) out.push_back({pair.first, pair.second, r.off});
        return out;
    }

    std::size_t record_count() const {
        std::size_t n = 0;
        for (const auto& [pair, recs] : records) n += recs.size();
        return n;
    }
};

inline RelationTable build_relation_table(const PatternDatabase& db, int top_k,
                                          double max_distance) {
    if (top_k < 1) throw std::invalid_argument("top_k must be at least 1");
    if (max_distance <= 0.0) throw std::invalid_argument("max_distance must be positive");

    RelationTable table;
    table.top_k = top_k;
    table.max_distance = max_distance;

    const int n = db.pattern_count();
    for (int q_id = 0; q_id < n; ++q_id) {
        if (db.total_occurrences(q_id) == 0) {
            table.warnings.push_back("pattern " + std::to_string(q_id) +
                                     " has no occurrences; skipped");
            continue;
        }
        for (int p_id = 0; p_id < n; ++p_id) {
            std::vector<RelationRecord> recs;
            for (int s = 0; s < db.source_count(); ++s) {
                const auto& q_occ = db.occurrences(q_id, s);
                const auto& p_occ = db.occurrences(p_id, s);
                if (q_occ.empty() || p_occ.empty()) continue;
                for (Coord q : q_occ) {
                    std::vector<RelationRecord> cand;
                    for (Coord p : p_occ) {
                        if (q_id == p_id && q == p) continue; // no self-relation
                        const double d = distance(q, p);
                        if (d <= max_distance) cand.push_back({q, p, offset(q, p), d, s});
                    }
                    std::sort(cand.begin(), cand.end(),
                              [](const RelationRecord& a, const RelationRecord& b) {
                                  if (a.dist != b.dist) return a.dist < b.dist;
                                  return a.p < b.p;
                              });
                    if (static_cast<int>(cand.size()) > top_k) cand.resize(top_k);
                    recs.insert(recs.end(), cand.begin(), cand.end());
                }
            }
            if (!recs.empty()) table.records.emplace(std::make_pair(q_id, p_id), std::move(recs));
        }
    }
    return table;
}

/// Applies user-configured neutral flags, or falls back to flagging the most
/// frequent sample symbol (lowest id on ties) when no configuration is given.
inline Alphabet classify_neutral(Alphabet alphabet, const std::vector<char>& neutral_chars,
                                 const Grid& sample) {
    if (!neutral_chars.empty()) {
        for (char c : neutral_chars) alphabet.set_neutral(alphabet.id_of(c));
        return alphabet;
    }
    std::vector<std::size_t> freq(alphabet.size(), 0);
    for (SymbolId s : sample.cells) freq.at(s)++;
    const auto best = std::max_element(freq.begin(), freq.end());
    alphabet.set_neutral(static_cast<SymbolId>(best - freq.begin()));
    return alphabet;
}

} // namespace mjsynth

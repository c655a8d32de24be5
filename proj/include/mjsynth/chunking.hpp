#pragma once

#include <numeric>
#include <stdexcept>
#include <vector>

#include "mjsynth/grid.hpp"

namespace mjsynth {

struct ChunkSpan {
    int start_col = 0;
    int end_col = 0; // exclusive

    int width() const { return end_col - start_col; }
    friend bool operator==(const ChunkSpan&, const ChunkSpan&) = default;
};

struct ChunkPlan {
    int chunk_width = 0;
    std::vector<ChunkSpan> spans; // consecutive, non-overlapping, covering [0, width)
};

/// Consecutive column spans of chunk_width; the last chunk may be narrower.
inline ChunkPlan plan_chunks(int width, int chunk_width) {
    if (chunk_width < 1 || chunk_width > width)
        throw std::invalid_argument("chunk width must lie in [1, sample width]");
    ChunkPlan plan;
    plan.chunk_width = chunk_width;
    for (int start = 0; start < width; start += chunk_width)
        plan.spans.push_back({start, std::min(start + chunk_width, width)});
    return plan;
}

inline Grid slice_columns(const Grid& g, ChunkSpan span) {
    if (span.start_col < 0 || span.end_col > g.width || span.width() < 1)
        throw std::out_of_range("chunk span out of bounds");
    Grid out(span.width(), g.height);
    for (int r = 0; r < g.height; ++r)
        for (int c = 0; c < span.width(); ++c) out.at(r, c) = g.at(r, span.start_col + c);
    return out;
}

inline std::vector<Grid> chunk(const Grid& g, int chunk_width) {
    std::vector<Grid> out;
    for (ChunkSpan span : plan_chunks(g.width, chunk_width).spans)
        out.push_back(slice_columns(g, span));
    return out;
}

/// Horizontal concatenation in order. All pieces must share a height.
inline Grid stitch(const std::vector<Grid>& pieces) {
    if (pieces.empty()) throw std::invalid_argument("nothing to stitch");
    const int height = pieces.front().height;
    int width = 0;
    for (const auto& p : pieces) {
        if (p.height != height) throw std::runtime_error("chunk height mismatch");
        width += p.width;
    }
    Grid out(width, height);
    int at = 0;
    for (const auto& p : pieces) {
        for (int r = 0; r < height; ++r)
            for (int c = 0; c < p.width; ++c) out.at(r, at + c) = p.at(r, c);
        at += p.width;
    }
    return out;
}

} // namespace mjsynth

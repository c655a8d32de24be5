#pragma once

#include <string>
#include <vector>

#include "mjsynth/chunking.hpp"
#include "mjsynth/evolution.hpp"
#include "mjsynth/fitness.hpp"
#include "mjsynth/relations.hpp"
#include "mjsynth/rule_synth.hpp"
#include "mjsynth/serialize.hpp"
#include "mjsynth/threads.hpp"
#include "mjsynth/tilemap.hpp"

namespace mjsynth {

struct LearnParams {
    int window = 2;             // extraction window side
    int top_k = 1;              // nearest occurrences kept per relation
    double max_distance = 0.0;  // 0 means 2 * window
    double wildcard_rate = 0.05;
    std::size_t pool_cap = 5000;
    InitPolicy init_policy = InitPolicy::Floor;
    int floor_row_count = 1;
    std::vector<char> neutral;  // empty means frequency heuristic
    FitnessConfig fitness;
    EvolutionConfig evolution;
    SamplerParams sampler;
    int chunk_width = 0;        // 0 disables the divide-and-conquer scheme
    int threads = 1;

    double effective_max_distance() const {
        return max_distance > 0.0 ? max_distance : 2.0 * window;
    }
};

struct ChunkLearnResult {
    ChunkSpan span;
    GrammarDoc doc;
    double best_fitness = 0.0;
    std::vector<GenerationStats> history;
    std::uint64_t seed = 0;  // master seed of this chunk's run
    Grid sample_chunk;
    Grid best_output;        // phenotype of the best individual
};

struct LearnOutput {
    ChunkPlan plan;
    std::vector<ChunkLearnResult> chunks;
    LearnParams params;

    bool chunked() const { return chunks.size() > 1; }
};

namespace detail {

inline void check_windows_fit(const Grid& g, const LearnParams& params, const std::string& what) {
    int required = params.window;
    for (int n : params.fitness.windows) required = std::max(required, n);
    if (g.width < required || g.height < required)
        throw std::runtime_error(what + " is " + std::to_string(g.width) + "x" +
                                 std::to_string(g.height) + ", smaller than window " +
                                 std::to_string(required));
}

} // namespace detail

/// Runs the full pipeline on one grid: initialization environment, pattern
/// scan over sample plus environment, relation table, rule pool, and the
/// evolutionary search. Pure function of (sample, alphabet, params, seed).
inline ChunkLearnResult learn_single(const Grid& sample, const Alphabet& alphabet,
                                     const LearnParams& params, std::uint64_t seed,
                                     int eval_threads = 1) {
    detail::check_windows_fit(sample, params, "sample");

    const Grid env = init_environment(sample, alphabet, params.init_policy, sample.width,
                                      sample.height, params.floor_row_count);

    PatternDatabase db;
    db.add_grid(sample, params.window);
    db.add_grid(env, params.window);

    const RelationTable relations =
        build_relation_table(db, params.top_k, params.effective_max_distance());

    Engine pool_rng(derive_seed(seed, 0x700Cu));
    PoolParams pool_params;
    pool_params.wildcard_rate = params.wildcard_rate;
    pool_params.max_rules = params.pool_cap;
    RulePool pool = build_rule_pool(db, relations, alphabet, pool_rng, pool_params);
    classify_pool(pool, env);

    EvolutionConfig ecfg = params.evolution;
    ecfg.master_seed = seed;
    ecfg.threads = eval_threads;
    GrammarEvolver evolver(sample, env, pool, params.fitness, ecfg, params.sampler);
    RunResult run = evolver.run();

    ChunkLearnResult result;
    result.span = {0, sample.width};
    result.best_fitness = *run.best.fitness;
    result.history = std::move(run.history);
    result.seed = seed;
    result.sample_chunk = sample;
    result.best_output = execute_grammar(
        env, run.best.tree, {params.evolution.max_steps, derive_seed(run.best.eval_seed, 0u)});

    GrammarDoc doc;
    doc.alphabet = alphabet;
    doc.policy = params.init_policy;
    doc.env_width = sample.width;
    doc.env_height = sample.height;
    if (params.init_policy == InitPolicy::Floor) {
        const int n = std::clamp(params.floor_row_count, 1, sample.height);
        for (int r = sample.height - n; r < sample.height; ++r) {
            std::string row(sample.width, ' ');
            for (int c = 0; c < sample.width; ++c) row[c] = alphabet.display_of(sample.at(r, c));
            doc.floor_rows.push_back(std::move(row));
        }
    } else if (params.init_policy == InitPolicy::CopyBorder) {
        doc.border_col.resize(sample.height);
        for (int r = 0; r < sample.height; ++r)
            doc.border_col[r] = alphabet.display_of(sample.at(r, 0));
    }
    doc.root = std::move(run.best.tree);
    result.doc = std::move(doc);
    return result;
}

/// Learns the sample whole, or as independent per-chunk jobs when
/// params.chunk_width is set. Chunk jobs run concurrently up to
/// params.threads workers; per-chunk seeds derive from the master seed, so
/// results are identical at any thread count.
inline LearnOutput learn(const Grid& sample, const Alphabet& alphabet, const LearnParams& params) {
    LearnOutput out;
    out.params = params;
    if (params.chunk_width <= 0) {
        out.plan.chunk_width = sample.width;
        out.plan.spans = {{0, sample.width}};
        out.chunks.push_back(
            learn_single(sample, alphabet, params, params.evolution.master_seed, params.threads));
        return out;
    }

    out.plan = plan_chunks(sample.width, params.chunk_width);
    for (ChunkSpan span : out.plan.spans)
        detail::check_windows_fit(slice_columns(sample, span), params,
                                  "chunk [" + std::to_string(span.start_col) + "," +
                                      std::to_string(span.end_col) + ")");

    out.chunks.resize(out.plan.spans.size());
    parallel_for(out.plan.spans.size(), params.threads, [&](std::size_t i) {
        const ChunkSpan span = out.plan.spans[i];
        const Grid piece = slice_columns(sample, span);
        const std::uint64_t seed =
            derive_seed(params.evolution.master_seed, 0xC09Eu, static_cast<std::uint64_t>(i));
        out.chunks[i] = learn_single(piece, alphabet, params, seed);
        out.chunks[i].span = span;
    });
    return out;
}

/// Executes every chunk grammar on its stored initialization environment
/// and stitches the outputs left to right.
inline Grid regenerate(const LearnOutput& learned, std::uint64_t seed, int threads = 1,
                       int max_steps = 10000) {
    std::vector<Grid> pieces(learned.chunks.size());
    parallel_for(learned.chunks.size(), threads, [&](std::size_t i) {
        const auto& chunk = learned.chunks[i];
        const Grid env = chunk.doc.rebuild_init_env();
        pieces[i] = execute_grammar(env, chunk.doc.root,
                                    {max_steps, derive_seed(seed, static_cast<std::uint64_t>(i))});
    });
    return stitch(pieces);
}

/// Swaps one chunk's grammar (for example with the grammar from another
/// run) and refreshes that chunk's fitness report against its stored
/// sample slice.
inline void replace_chunk_grammar(LearnOutput& learned, std::size_t index,
                                  const GrammarDoc& replacement) {
    if (index >= learned.chunks.size())
        throw std::out_of_range("chunk index " + std::to_string(index) + " out of range (have " +
                                std::to_string(learned.chunks.size()) + " chunks)");
    ChunkLearnResult& chunk = learned.chunks[index];
    if (replacement.env_width != chunk.doc.env_width ||
        replacement.env_height != chunk.doc.env_height)
        throw std::runtime_error("replacement grammar environment dimensions do not match chunk");
    chunk.doc = replacement;
    const Grid env = chunk.doc.rebuild_init_env();
    chunk.best_output = execute_grammar(
        env, chunk.doc.root, {learned.params.evolution.max_steps, derive_seed(chunk.seed, 0u)});
    if (chunk.sample_chunk.width > 0)
        chunk.best_fitness = fitness(chunk.sample_chunk, chunk.best_output, learned.params.fitness);
    chunk.history.clear(); // history belonged to the replaced run
}

inline Json history_to_json(const std::vector<GenerationStats>& history) {
    Json arr = Json::array();
    for (const auto& s : history) {
        Json j;
        j["generation"] = s.generation;
        j["best"] = s.best;
        j["mean"] = s.mean;
        arr.push_back(std::move(j));
    }
    return arr;
}

inline Json bundle_to_json(const LearnOutput& learned) {
    Json j;
    j["format"] = kBundleFormat;
    j["chunk_width"] = learned.plan.chunk_width;
    Json chunks = Json::array();
    for (const auto& c : learned.chunks) {
        Json cj;
        cj["start_col"] = c.span.start_col;
        cj["end_col"] = c.span.end_col;
        cj["seed"] = c.seed;
        cj["fitness"] = c.best_fitness;
        cj["history"] = history_to_json(c.history);
        cj["grammar"] = grammar_to_json(c.doc);
        chunks.push_back(std::move(cj));
    }
    j["chunks"] = std::move(chunks);
    return j;
}

/// Restores the parts of a bundle needed to regenerate and to swap chunk
/// grammars; sample slices and learn parameters are not stored in bundles.
inline LearnOutput bundle_from_json(const Json& j) {
    if (!j.contains("format") || j.at("format").get<std::string>() != kBundleFormat)
        throw std::runtime_error("not a bundle file (missing or unknown format tag)");
    LearnOutput out;
    out.plan.chunk_width = j.at("chunk_width").get<int>();
    for (const auto& cj : j.at("chunks")) {
        ChunkLearnResult c;
        c.span.start_col = cj.at("start_col").get<int>();
        c.span.end_col = cj.at("end_col").get<int>();
        c.seed = cj.at("seed").get<std::uint64_t>();
        c.best_fitness = cj.at("fitness").get<double>();
        c.doc = grammar_from_json(cj.at("grammar"));
        out.plan.spans.push_back(c.span);
        out.chunks.push_back(std::move(c));
    }
    if (out.chunks.empty()) throw std::runtime_error("bundle contains no chunks");
    return out;
}

} // namespace mjsynth

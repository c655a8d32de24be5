#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "mjsynth/grammar.hpp"
#include "mjsynth/grid.hpp"
#include "mjsynth/relations.hpp"
#include "mjsynth/rng.hpp"

namespace mjsynth {

enum class InitPolicy { Blank, Floor, CopyBorder };

inline const char* to_string(InitPolicy p) {
    switch (p) {
        case InitPolicy::Blank: return "blank";
        case InitPolicy::Floor: return "floor";
        case InitPolicy::CopyBorder: return "copy-border";
    }
    return "blank";
}

inline InitPolicy init_policy_from_string(const std::string& s) {
    if (s == "blank") return InitPolicy::Blank;
    if (s == "floor") return InitPolicy::Floor;
    if (s == "copy-border") return InitPolicy::CopyBorder;
    throw std::runtime_error("unknown init policy: " + s);
}

inline SymbolId neutral_fill_symbol(const Alphabet& alphabet) {
    const auto ids = alphabet.neutral_ids();
    if (ids.empty())
        throw std::runtime_error("init policy requires a neutral symbol but none is flagged");
    return ids.front();
}

/// Builds the starting environment from stored policy content rather than a
/// full sample grid. `floor_rows` holds the bottom rows (Floor), `border_col`
/// the leftmost column (CopyBorder); both tile cyclically when the output is
/// larger than the source.
inline Grid init_environment_from_content(const Alphabet& alphabet, InitPolicy policy,
                                          int out_width, int out_height,
                                          const std::vector<std::vector<SymbolId>>& floor_rows,
                                          const std::vector<SymbolId>& border_col) {
    if (out_width < 1 || out_height < 1)
        throw std::invalid_argument("environment dimensions must be positive");
    const SymbolId neutral = neutral_fill_symbol(alphabet);
    Grid env(out_width, out_height, neutral);
    switch (policy) {
        case InitPolicy::Blank:
            break;
        case InitPolicy::Floor: {
            if (floor_rows.empty() || floor_rows.front().empty())
                throw std::invalid_argument("floor policy requires stored bottom rows");
            const int n = std::min<int>(static_cast<int>(floor_rows.size()), out_height);
            for (int i = 0; i < n; ++i) {
                // i counts up from the bottom edge
                const auto& src = floor_rows[floor_rows.size() - 1 - i];
                for (int c = 0; c < out_width; ++c)
                    env.at(out_height - 1 - i, c) = src[c % src.size()];
            }
            break;
        }
        case InitPolicy::CopyBorder: {
            if (border_col.empty())
                throw std::invalid_argument("copy-border policy requires a stored column");
            for (int r = 0; r < out_height; ++r)
                env.at(r, 0) = border_col[r % border_col.size()];
            break;
        }
    }
    return env;
}

/// Derives the initialization environment from a sample: blank fills with
/// the neutral symbol, floor copies the sample's bottom row(s), copy-border
/// copies the leftmost column. Output defaults to the sample's dimensions.
inline Grid init_environment(const Grid& sample, const Alphabet& alphabet, InitPolicy policy,
                             int out_width = 0, int out_height = 0, int floor_row_count = 1) {
    if (sample.width < 1 || sample.height < 1) throw std::runtime_error("empty sample");
    if (out_width <= 0) out_width = sample.width;
    if (out_height <= 0) out_height = sample.height;

    std::vector<std::vector<SymbolId>> floor_rows;
    std::vector<SymbolId> border_col;
    if (policy == InitPolicy::Floor) {
        floor_row_count = std::clamp(floor_row_count, 1, sample.height);
        for (int r = sample.height - floor_row_count; r < sample.height; ++r) {
            std::vector<SymbolId> row(sample.width);
            for (int c = 0; c < sample.width; ++c) row[c] = sample.at(r, c);
            floor_rows.push_back(std::move(row));
        }
    } else if (policy == InitPolicy::CopyBorder) {
        border_col.resize(sample.height);
        for (int r = 0; r < sample.height; ++r) border_col[r] = sample.at(r, 0);
    }
    return init_environment_from_content(alphabet, policy, out_width, out_height, floor_rows,
                                         border_col);
}

enum class RuleClass { Anchoring, Progressive };

struct RuleSource {
    int q = 0;       // anchor pattern id
    int p = 0;       // pattern replaced
    int p_prime = 0; // replacement pattern
    Offset off;      // pr(Q,P) == pr(Q,P'); P sits at -off relative to Q

    friend bool operator==(const RuleSource&, const RuleSource&) = default;
};

struct RelationBoundedRule {
    Rule rule;
    RuleSource source;
    RuleClass kind = RuleClass::Progressive;

    double relation_distance() const { return source.off.norm(); }
};

struct RulePool {
    std::vector<RelationBoundedRule> rules;
    double one_mode_weight = 3.0;
    double all_mode_weight = 1.0;

    bool empty() const { return rules.empty(); }
    std::size_t size() const { return rules.size(); }
};

struct PoolParams {
    double wildcard_rate = 0.05;
    std::size_t max_rules = 5000; // retained by ascending relation distance
    double one_mode_weight = 3.0;
    double all_mode_weight = 1.0;
};

namespace detail {

// Places Q at the origin and P/P' at -off, merged into a bounding box with
// wildcards outside both footprints. Returns false on conflicting overlap
// or when the consequent would change a non-neutral antecedent cell.
inline bool build_rule_grids(const Pattern& q, const Pattern& p, const Pattern& p_prime,
                             Offset off, const Alphabet& alphabet, Rule& out) {
    const Coord p_pos{-off.drow, -off.dcol};
    const int top = std::min(0, p_pos.row);
    const int left = std::min(0, p_pos.col);
    const int bottom = std::max(q.rows, p_pos.row + p.rows);
    const int right = std::max(q.cols, p_pos.col + p.cols);

    Pattern antecedent(bottom - top, right - left,
                       std::vector<SymbolId>(static_cast<std::size_t>(bottom - top) *
                                                 (right - left),
                                             kWildcard));
    auto blit = [&](const Pattern& src, Coord pos, bool check_conflicts) {
        for (int r = 0; r < src.rows; ++r)
            for (int c = 0; c < src.cols; ++c) {
                SymbolId& cell = antecedent.at(pos.row - top + r, pos.col - left + c);
                if (check_conflicts && cell != kWildcard && cell != src.at(r, c)) return false;
                cell = src.at(r, c);
            }
        return true;
    };
    if (!blit(q, {0, 0}, false)) return false;
    if (!blit(p, p_pos, true)) return false;

    Pattern consequent = antecedent;
    for (int r = 0; r < p_prime.rows; ++r)
        for (int c = 0; c < p_prime.cols; ++c)
            consequent.at(p_pos.row - top + r, p_pos.col - left + c) = p_prime.at(r, c);

    // Only neutral cells may be rewritten.
    for (std::size_t i = 0; i < antecedent.cells.size(); ++i)
        if (consequent.cells[i] != antecedent.cells[i] &&
            !alphabet.is_neutral(antecedent.cells[i]))
            return false;

    out.antecedent = std::move(antecedent);
    out.consequent = std::move(consequent);
    return true;
}

inline bool inside_footprint(int r, int c, Coord pos, const Pattern& p) {
    return r >= pos.row && r < pos.row + p.rows && c >= pos.col && c < pos.col + p.cols;
}

} // namespace detail

/// Enumerates all (Q, P, P') triples that share one positioning offset and
/// turns each into a relation-bounded rule; conflicting overlaps and rules
/// that would touch non-neutral cells are skipped. Antecedent cells outside
/// P's footprint may independently become wildcards. When more than
/// params.max_rules survive, the pool keeps the shortest-distance rules.
inline RulePool build_rule_pool(const PatternDatabase& db, const RelationTable& relations,
                                const Alphabet& alphabet, Engine& rng,
                                const PoolParams& params = {}) {
    RulePool pool;
    pool.one_mode_weight = params.one_mode_weight;
    pool.all_mode_weight = params.all_mode_weight;

    std::bernoulli_distribution wildcard(params.wildcard_rate);
    std::bernoulli_distribution one_mode(params.one_mode_weight /
                                         (params.one_mode_weight + params.all_mode_weight));

    std::size_t triples = 0, conflicts = 0, non_neutral = 0;
    for (int q_id = 0; q_id < db.pattern_count(); ++q_id) {
        // partners[off] = pattern ids observed at that offset from Q
        std::map<Offset, std::vector<int>> partners;
        for (int p_id = 0; p_id < db.pattern_count(); ++p_id)
            for (Offset off : relations.offsets(q_id, p_id)) partners[off].push_back(p_id);

        for (const auto& [off, plist] : partners) {
            for (int p_id : plist) {
                for (int pp_id : plist) {
                    if (p_id == pp_id) continue;
                    ++triples;
                    Rule rule;
                    if (!detail::build_rule_grids(db.pattern(q_id), db.pattern(p_id),
                                                  db.pattern(pp_id), off, alphabet, rule)) {
                        // distinguish conflict from neutrality in diagnostics
                        Rule probe;
                        if (detail::build_rule_grids(db.pattern(q_id), db.pattern(p_id),
                                                     db.pattern(p_id), off, alphabet, probe))
                            ++non_neutral;
                        else
                            ++conflicts;
                        continue;
                    }
                    // wildcard injection, never inside P's footprint
                    const Pattern& p = db.pattern(p_id);
                    const Coord p_pos{-off.drow, -off.dcol};
                    const int top = std::min(0, p_pos.row);
                    const int left = std::min(0, p_pos.col);
                    for (int r = 0; r < rule.antecedent.rows; ++r)
                        for (int c = 0; c < rule.antecedent.cols; ++c) {
                            if (rule.antecedent.at(r, c) == kWildcard) continue;
                            if (detail::inside_footprint(r + top, c + left, p_pos, p)) continue;
                            if (wildcard(rng)) {
                                rule.antecedent.at(r, c) = kWildcard;
                                rule.consequent.at(r, c) = kWildcard;
                            }
                        }
                    rule.mode = one_mode(rng) ? RuleMode::One : RuleMode::All;
                    pool.rules.push_back({rule, {q_id, p_id, pp_id, off}});
                }
            }
        }
    }

    if (pool.rules.empty())
        throw std::runtime_error(
            "sample yields no admissible rules (patterns: " + std::to_string(db.pattern_count()) +
            ", relation records: " + std::to_string(relations.record_count()) +
            ", triples considered: " + std::to_string(triples) +
            ", overlap conflicts: " + std::to_string(conflicts) +
            ", non-neutral rewrites: " + std::to_string(non_neutral) + ")");

    if (pool.rules.size() > params.max_rules) {
        std::stable_sort(pool.rules.begin(), pool.rules.end(),
                         [](const RelationBoundedRule& a, const RelationBoundedRule& b) {
                             return a.relation_distance() < b.relation_distance();
                         });
        pool.rules.resize(params.max_rules);
    }
    return pool;
}

/// Anchoring iff the antecedent occurs somewhere in the initialization
/// environment; such rules can fire first and seed structure growth.
inline RuleClass classify_rule(const RelationBoundedRule& rule, const Grid& init_env) {
    return find_occurrences(init_env, rule.rule.antecedent).empty() ? RuleClass::Progressive
                                                                    : RuleClass::Anchoring;
}

inline void classify_pool(RulePool& pool, const Grid& init_env) {
    for (auto& r : pool.rules) r.kind = classify_rule(r, init_env);
}

struct SamplerParams {
    double markov_prob = 0.5;  // chance a rule-set node is Markov when allowed
    double ruleset_prob = 0.4; // chance a child is a nested rule set while depth allows
};

/// Uniformly samples a pool rule as a leaf node; the mode is re-rolled with
/// One weighted over All by the pool's mode weights.
inline GrammarNode sample_rule_node(const RulePool& pool, Engine& rng) {
    if (pool.empty()) throw std::runtime_error("rule pool is empty");
    std::uniform_int_distribution<std::size_t> pick(0, pool.rules.size() - 1);
    Rule rule = pool.rules[pick(rng)].rule;
    std::bernoulli_distribution one_mode(pool.one_mode_weight /
                                         (pool.one_mode_weight + pool.all_mode_weight));
    rule.mode = one_mode(rng) ? RuleMode::One : RuleMode::All;
    return GrammarNode::make_rule(std::move(rule));
}

/// Samples a Sequence or Markov node with 1-5 children. depth_remaining is
/// the number of tree levels available below this node; children recurse
/// while it exceeds 1. Markov subtrees never receive Markov descendants.
inline GrammarNode sample_ruleset_node(const RulePool& pool, Engine& rng, bool allow_markov,
                                       int depth_remaining, const SamplerParams& params = {}) {
    if (depth_remaining < 1) throw std::invalid_argument("depth_remaining must be at least 1");
    const bool markov = allow_markov && std::bernoulli_distribution(params.markov_prob)(rng);
    GrammarNode node = markov
                           ? GrammarNode::make_markov({})
                           : GrammarNode::make_sequence(
                                 std::uniform_int_distribution<int>(kMinIterations,
                                                                    kMaxIterations)(rng),
                                 {});
    const int n_children = std::uniform_int_distribution<int>(1, kMaxChildren)(rng);
    const bool child_markov = allow_markov && !markov;
    std::bernoulli_distribution nested(params.ruleset_prob);
    for (int i = 0; i < n_children; ++i) {
        if (depth_remaining > 1 && nested(rng))
            node.children.push_back(
                sample_ruleset_node(pool, rng, child_markov, depth_remaining - 1, params));
        else
            node.children.push_back(sample_rule_node(pool, rng));
    }
    return node;
}

/// A first-level child for a root: either a rule leaf or a rule-set subtree.
inline GrammarNode sample_child_node(const RulePool& pool, Engine& rng, bool allow_markov,
                                     int depth_remaining, const SamplerParams& params = {}) {
    if (depth_remaining >= 1 && std::bernoulli_distribution(params.ruleset_prob)(rng))
        return sample_ruleset_node(pool, rng, allow_markov, depth_remaining, params);
    return sample_rule_node(pool, rng);
}

} // namespace mjsynth

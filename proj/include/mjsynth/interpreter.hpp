#pragma once

#include <stdexcept>
#include <vector>

#include "mjsynth/grammar.hpp"
#include "mjsynth/grid.hpp"
#include "mjsynth/rng.hpp"

namespace mjsynth {

/// Caps the number of single rule applications in one grammar execution so
/// Markov loops always terminate.
struct ExecutionBudget {
    int max_steps = 10000;
    std::uint64_t rng_seed = 0;
};

struct ExecStatus {
    bool changed = false;
    bool truncated = false; // budget ran out before the tree finished
    int steps = 0;          // rule applications performed
};

/// Writes the non-wildcard consequent cells at pos. Returns whether any
/// cell value actually changed.
inline bool rewrite_at(Grid& g, const Pattern& consequent, Coord pos) {
    bool changed = false;
    for (int r = 0; r < consequent.rows; ++r)
        for (int c = 0; c < consequent.cols; ++c) {
            const SymbolId s = consequent.at(r, c);
            if (s == kWildcard) continue;
            SymbolId& cell = g.at(pos.row + r, pos.col + c);
            if (cell != s) {
                cell = s;
                changed = true;
            }
        }
    return changed;
}

/// One: rewrites a single occurrence chosen uniformly at random. The
/// generator is only consumed when at least one occurrence exists.
inline bool apply_one(Grid& g, const Rule& rule, Engine& rng) {
    const auto occ = find_occurrences(g, rule.antecedent);
    if (occ.empty()) return false;
    std::uniform_int_distribution<std::size_t> pick(0, occ.size() - 1);
    return rewrite_at(g, rule.consequent, occ[pick(rng)]);
}

/// All: scans occurrences of the input grid in row-major order and rewrites
/// each whose footprint does not overlap a footprint already rewritten in
/// this call. Deterministic.
inline bool apply_all(Grid& g, const Rule& rule) {
    const auto occ = find_occurrences(g, rule.antecedent);
    if (occ.empty()) return false;
    std::vector<char> taken(static_cast<std::size_t>(g.width) * g.height, 0);
    auto overlaps = [&](Coord pos) {
        for (int r = 0; r < rule.antecedent.rows; ++r)
            for (int c = 0; c < rule.antecedent.cols; ++c)
                if (taken[static_cast<std::size_t>(pos.row + r) * g.width + pos.col + c])
                    return true;
        return false;
    };
    auto mark = [&](Coord pos) {
        for (int r = 0; r < rule.antecedent.rows; ++r)
            for (int c = 0; c < rule.antecedent.cols; ++c)
                taken[static_cast<std::size_t>(pos.row + r) * g.width + pos.col + c] = 1;
    };
    bool changed = false;
    for (Coord pos : occ) {
        if (overlaps(pos)) continue;
        mark(pos);
        if (rewrite_at(g, rule.consequent, pos)) changed = true;
    }
    return changed;
}

namespace detail {

inline ExecStatus execute_node_impl(Grid& g, const GrammarNode& node, int& steps_remaining,
                                    Engine& rng) {
    ExecStatus status;
    switch (node.kind) {
        case NodeKind::Rule: {
            if (steps_remaining <= 0) {
                status.truncated = true;
                return status;
            }
            --steps_remaining;
            status.steps = 1;
            status.changed = node.rule.mode == RuleMode::One ? apply_one(g, node.rule, rng)
                                                             : apply_all(g, node.rule);
            return status;
        }
        case NodeKind::Sequence: {
            for (int it = 0; it < node.iterations && !status.truncated; ++it) {
                for (const auto& child : node.children) {
                    if (steps_remaining <= 0) {
                        status.truncated = true;
                        break;
                    }
                    const ExecStatus st = execute_node_impl(g, child, steps_remaining, rng);
                    status.steps += st.steps;
                    status.changed |= st.changed;
                    if (st.truncated) {
                        status.truncated = true;
                        break;
                    }
                }
            }
            return status;
        }
        case NodeKind::Markov: {
            // Run the first child (in list order) that changes the grid,
            // then restart the scan; stop once a full pass changes nothing.
            bool progressed = true;
            while (progressed && !status.truncated) {
                progressed = false;
                for (const auto& child : node.children) {
                    if (steps_remaining <= 0) {
                        status.truncated = true;
                        break;
                    }
                    const ExecStatus st = execute_node_impl(g, child, steps_remaining, rng);
                    status.steps += st.steps;
                    if (st.truncated) {
                        status.truncated = true;
                        break;
                    }
                    if (st.changed) {
                        status.changed = true;
                        progressed = true;
                        break;
                    }
                }
            }
            return status;
        }
    }
    return status;
}

} // namespace detail

/// Executes a node against g in place. `changed` reports whether the grid
/// differs from its state on entry; a rule-set node that nets out to no
/// difference counts as unchanged.
inline ExecStatus execute_node(Grid& g, const GrammarNode& node, int& steps_remaining,
                               Engine& rng) {
    if (node.is_ruleset()) {
        const Grid before = g;
        ExecStatus status = detail::execute_node_impl(g, node, steps_remaining, rng);
        status.changed = !(g == before);
        return status;
    }
    return detail::execute_node_impl(g, node, steps_remaining, rng);
}

/// Runs a validated grammar on a copy of the environment. Bit-identical
/// output for identical (env, root, budget) inputs.
inline Grid execute_grammar(const Grid& env, const GrammarNode& root, const ExecutionBudget& budget,
                            ExecStatus* status_out = nullptr) {
    if (budget.max_steps < 1) throw std::invalid_argument("max_steps must be at least 1");
    const auto violations = validate_tree(root);
    if (!violations.empty()) {
        std::string msg = "invalid grammar tree:";
        for (const auto& v : violations) msg += "\n  " + v;
        throw std::invalid_argument(msg);
    }
    Grid g = env;
    Engine rng(budget.rng_seed);
    int steps_remaining = budget.max_steps;
    ExecStatus status = execute_node(g, root, steps_remaining, rng);
    if (status_out) *status_out = status;
    return g;
}

} // namespace mjsynth

#pragma once

#include <string>
#include <vector>

#include "mjsynth/grid.hpp"

namespace mjsynth {

enum class RuleMode { One, All };

/// Equal-shape rewrite. Wildcards in the antecedent match any symbol;
/// wildcards in the consequent leave the grid cell untouched.
struct Rule {
    Pattern antecedent;
    Pattern consequent;
    RuleMode mode = RuleMode::One;

    friend bool operator==(const Rule&, const Rule&) = default;
};

enum class NodeKind { Rule, Sequence, Markov };

inline constexpr int kMaxDepthBelowRoot = 3;
inline constexpr int kMaxChildren = 5;
inline constexpr int kMinIterations = 1;
inline constexpr int kMaxIterations = 10;

/// One node of a grammar tree. Rule kind carries a rewrite; Sequence and
/// Markov kinds carry ordered children. The root is always a Sequence.
struct GrammarNode {
    NodeKind kind = NodeKind::Sequence;
    int iterations = 1; // Sequence only
    Rule rule;          // Rule only
    std::vector<GrammarNode> children;

    static GrammarNode make_rule(Rule r) {
        GrammarNode n;
        n.kind = NodeKind::Rule;
        n.rule = std::move(r);
        return n;
    }
    static GrammarNode make_sequence(int iterations, std::vector<GrammarNode> children) {
        GrammarNode n;
        n.kind = NodeKind::Sequence;
        n.iterations = iterations;
        n.children = std::move(children);
        return n;
    }
    static GrammarNode make_markov(std::vector<GrammarNode> children) {
        GrammarNode n;
        n.kind = NodeKind::Markov;
        n.children = std::move(children);
        return n;
    }

    bool is_ruleset() const { return kind != NodeKind::Rule; }

    friend bool operator==(const GrammarNode&, const GrammarNode&) = default;
};

namespace detail {

inline void validate_node(const GrammarNode& node, int depth, bool inside_markov,
                          std::vector<std::string>& out) {
    if (depth > kMaxDepthBelowRoot) {
        out.push_back("max depth exceeded at depth " + std::to_string(depth));
        return;
    }
    switch (node.kind) {
        case NodeKind::Rule: {
            if (!node.children.empty()) out.push_back("rule node must not have children");
            const Rule& r = node.rule;
            if (r.antecedent.rows != r.consequent.rows || r.antecedent.cols != r.consequent.cols)
                out.push_back("rule antecedent and consequent shapes differ");
            else {
                bool can_change = false;
                for (std::size_t i = 0; i < r.consequent.cells.size(); ++i)
                    if (r.consequent.cells[i] != kWildcard &&
                        r.consequent.cells[i] != r.antecedent.cells[i])
                        can_change = true;
                if (!can_change) out.push_back("rule cannot change the grid");
            }
            return;
        }
        case NodeKind::Markov:
            if (inside_markov) out.push_back("Markov node nested inside a Markov subtree");
            break;
        case NodeKind::Sequence:
            if (node.iterations < kMinIterations)
                out.push_back("sequence iterations must be positive");
            break;
    }
    if (node.children.empty() || static_cast<int>(node.children.size()) > kMaxChildren)
        out.push_back("rule-set node must have 1 to " + std::to_string(kMaxChildren) +
                      " children, has " + std::to_string(node.children.size()));
    const bool markov_scope = inside_markov || node.kind == NodeKind::Markov;
    for (const auto& child : node.children)
        validate_node(child, depth + 1, markov_scope, out);
}

} // namespace detail

/// Structural-constraint check: Sequence root, depth at most 3 below the
/// root, 1-5 children per rule-set node, no Markov inside a Markov subtree,
/// equal rule shapes. Empty result means the tree is valid.
inline std::vector<std::string> validate_tree(const GrammarNode& root) {
    std::vector<std::string> out;
    if (root.kind != NodeKind::Sequence) {
        out.push_back("root node must be a Sequence");
        return out;
    }
    if (root.iterations < kMinIterations) out.push_back("sequence iterations must be positive");
    if (root.children.empty() || static_cast<int>(root.children.size()) > kMaxChildren)
        out.push_back("rule-set node must have 1 to " + std::to_string(kMaxChildren) +
                      " children, has " + std::to_string(root.children.size()));
    for (const auto& child : root.children) detail::validate_node(child, 1, false, out);
    return out;
}

inline bool is_valid_tree(const GrammarNode& root) { return validate_tree(root).empty(); }

/// Total number of rule leaves in a tree.
inline int count_rules(const GrammarNode& node) {
    if (node.kind == NodeKind::Rule) return 1;
    int n = 0;
    for (const auto& c : node.children) n += count_rules(c);
    return n;
}

} // namespace mjsynth

#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mjsynth/grammar.hpp"
#include "mjsynth/grid.hpp"
#include "mjsynth/rule_synth.hpp"

namespace mjsynth {

using Json = nlohmann::ordered_json;

inline constexpr const char* kGrammarFormat = "mjsynth/grammar-v1";
inline constexpr const char* kBundleFormat = "mjsynth/bundle-v1";

/// A learned grammar plus everything needed to execute it without the
/// original sample: the alphabet, neutrality flags, and the initialization
/// recipe (policy and the content rows/column it tiles from).
struct GrammarDoc {
    Alphabet alphabet;
    InitPolicy policy = InitPolicy::Floor;
    int env_width = 0;
    int env_height = 0;
    std::vector<std::string> floor_rows; // bottom rows, Floor policy
    std::string border_col;              // leftmost column, CopyBorder policy
    GrammarNode root;

    friend bool operator==(const GrammarDoc&, const GrammarDoc&) = default;

    /// Rebuilds the initialization environment, optionally at other
    /// dimensions (content tiles cyclically).
    Grid rebuild_init_env(int out_width = 0, int out_height = 0) const {
        if (out_width <= 0) out_width = env_width;
        if (out_height <= 0) out_height = env_height;
        std::vector<std::vector<SymbolId>> rows;
        for (const auto& line : floor_rows) {
            std::vector<SymbolId> row;
            row.reserve(line.size());
            for (char c : line) row.push_back(alphabet.id_of(c));
            rows.push_back(std::move(row));
        }
        std::vector<SymbolId> col;
        col.reserve(border_col.size());
        for (char c : border_col) col.push_back(alphabet.id_of(c));
        return init_environment_from_content(alphabet, policy, out_width, out_height, rows, col);
    }
};

namespace detail {

inline std::vector<std::string> pattern_to_strings(const Pattern& p, const Alphabet& a) {
    std::vector<std::string> rows(p.rows);
    for (int r = 0; r < p.rows; ++r) {
        rows[r].resize(p.cols);
        for (int c = 0; c < p.cols; ++c) rows[r][c] = a.display_of(p.at(r, c));
    }
    return rows;
}

inline Pattern pattern_from_strings(const std::vector<std::string>& rows, const Alphabet& a) {
    if (rows.empty() || rows.front().empty())
        throw std::runtime_error("grammar file: empty rule grid");
    Pattern p;
    p.rows = static_cast<int>(rows.size());
    p.cols = static_cast<int>(rows.front().size());
    for (const auto& row : rows) {
        if (static_cast<int>(row.size()) != p.cols)
            throw std::runtime_error("grammar file: ragged rule grid");
        for (char c : row)
            p.cells.push_back(c == kWildcardChar ? kWildcard : a.id_of(c));
    }
    return p;
}

inline Json node_to_json(const GrammarNode& node, const Alphabet& a) {
    Json j;
    switch (node.kind) {
        case NodeKind::Rule:
            j["kind"] = "rule";
            j["mode"] = node.rule.mode == RuleMode::One ? "one" : "all";
            j["antecedent"] = pattern_to_strings(node.rule.antecedent, a);
            j["consequent"] = pattern_to_strings(node.rule.consequent, a);
            break;
        case NodeKind::Sequence: {
            j["kind"] = "sequence";
            j["iterations"] = node.iterations;
            Json children = Json::array();
            for (const auto& c : node.children) children.push_back(node_to_json(c, a));
            j["children"] = std::move(children);
            break;
        }
        case NodeKind::Markov: {
            j["kind"] = "markov";
            Json children = Json::array();
            for (const auto& c : node.children) children.push_back(node_to_json(c, a));
            j["children"] = std::move(children);
            break;
        }
    }
    return j;
}

inline GrammarNode node_from_json(const Json& j, const Alphabet& a) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "rule") {
        Rule r;
        const std::string mode = j.at("mode").get<std::string>();
        if (mode == "one")
            r.mode = RuleMode::One;
        else if (mode == "all")
            r.mode = RuleMode::All;
        else
            throw std::runtime_error("grammar file: unknown rule mode: " + mode);
        r.antecedent = pattern_from_strings(j.at("antecedent").get<std::vector<std::string>>(), a);
        r.consequent = pattern_from_strings(j.at("consequent").get<std::vector<std::string>>(), a);
        return GrammarNode::make_rule(std::move(r));
    }
    std::vector<GrammarNode> children;
    for (const auto& cj : j.at("children")) children.push_back(node_from_json(cj, a));
    if (kind == "sequence")
        return GrammarNode::make_sequence(j.at("iterations").get<int>(), std::move(children));
    if (kind == "markov") return GrammarNode::make_markov(std::move(children));
    throw std::runtime_error("grammar file: unknown node kind: " + kind);
}

inline Json alphabet_to_json(const Alphabet& a) {
    std::string neutral;
    for (SymbolId id : a.neutral_ids()) neutral.push_back(a.display_of(id));
    Json j;
    j["symbols"] = a.symbols();
    j["neutral"] = neutral;
    return j;
}

inline Alphabet alphabet_from_json(const Json& j) {
    Alphabet a;
    for (char c : j.at("symbols").get<std::string>()) a.add(c);
    for (char c : j.at("neutral").get<std::string>()) a.set_neutral(a.id_of(c));
    return a;
}

} // namespace detail

inline Json grammar_to_json(const GrammarDoc& doc) {
    Json j;
    j["format"] = kGrammarFormat;
    j["alphabet"] = detail::alphabet_to_json(doc.alphabet);
    Json init;
    init["policy"] = to_string(doc.policy);
    init["width"] = doc.env_width;
    init["height"] = doc.env_height;
    if (doc.policy == InitPolicy::Floor) init["floor_rows"] = doc.floor_rows;
    if (doc.policy == InitPolicy::CopyBorder) init["border_col"] = doc.border_col;
    j["init"] = std::move(init);
    // reserved: which occurrence One-mode rewrites
    j["one_policy"] = "uniform-random";
    j["root"] = detail::node_to_json(doc.root, doc.alphabet);
    return j;
}

inline GrammarDoc grammar_from_json(const Json& j) {
    if (!j.contains("format") || j.at("format").get<std::string>() != kGrammarFormat)
        throw std::runtime_error("not a grammar file (missing or unknown format tag)");
    if (j.contains("one_policy") && j.at("one_policy").get<std::string>() != "uniform-random")
        throw std::runtime_error("unsupported one_policy: " +
                                 j.at("one_policy").get<std::string>());
    GrammarDoc doc;
    doc.alphabet = detail::alphabet_from_json(j.at("alphabet"));
    const Json& init = j.at("init");
    doc.policy = init_policy_from_string(init.at("policy").get<std::string>());
    doc.env_width = init.at("width").get<int>();
    doc.env_height = init.at("height").get<int>();
    if (init.contains("floor_rows"))
        doc.floor_rows = init.at("floor_rows").get<std::vector<std::string>>();
    if (init.contains("border_col")) doc.border_col = init.at("border_col").get<std::string>();
    doc.root = detail::node_from_json(j.at("root"), doc.alphabet);
    const auto violations = validate_tree(doc.root);
    if (!violations.empty()) {
        std::string msg = "grammar file violates structural constraints:";
        for (const auto& v : violations) msg += "\n  " + v;
        throw std::runtime_error(msg);
    }
    return doc;
}

inline std::string serialize_grammar(const GrammarDoc& doc) {
    return grammar_to_json(doc).dump(2) + "\n";
}

inline GrammarDoc parse_grammar(const std::string& text) {
    return grammar_from_json(Json::parse(text));
}

inline void save_json(const Json& j, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write: " + path);
    out << j.dump(2) << '\n';
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline Json load_json(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    return Json::parse(in);
}

inline void save_grammar(const GrammarDoc& doc, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write: " + path);
    out << serialize_grammar(doc);
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline GrammarDoc load_grammar(const std::string& path) {
    return grammar_from_json(load_json(path));
}

} // namespace mjsynth

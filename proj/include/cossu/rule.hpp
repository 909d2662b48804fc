#ifndef COSSU_RULE_HPP
#define COSSU_RULE_HPP

#include <algorithm>
#include <cstddef>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cossu/closed_miner.hpp"
#include "cossu/error.hpp"
#include "cossu/sequence.hpp"

namespace cossu {

// A sequential rule A -> C with a non-empty consequent.
class Rule {
public:
    Rule(Sequence antecedent, Sequence consequent)
        : antecedent_(std::move(antecedent)), consequent_(std::move(consequent)) {
        if (consequent_.empty()) throw Error("rule consequent must be non-empty");
    }

    static Rule singleton(SymbolId symbol) { return Rule(Sequence{}, Sequence{symbol}); }

    const Sequence& antecedent() const { return antecedent_; }
    const Sequence& consequent() const { return consequent_; }
    std::size_t length() const { return antecedent_.size() + consequent_.size(); }
    bool is_singleton() const { return antecedent_.empty() && consequent_.size() == 1; }

    // A followed by C.
    Sequence pattern() const { return antecedent_.concat(consequent_); }

    auto operator<=>(const Rule&) const = default;
    bool operator==(const Rule&) const = default;

private:
    Sequence antecedent_;
    Sequence consequent_;
};

// One (rule, stage) pair that is active against a history. The rule has
// seen A followed by C[1, stage] and predicts C[stage + 1].
struct ActiveMatch {
    std::size_t rule = 0;
    std::size_t stage = 0;
    SymbolId predicted = 0;

    bool operator==(const ActiveMatch&) const = default;
};

// The empty antecedent triggers at every boundary i in [0, n-1]; a non-empty
// one at each 1-based end position of its matches.
inline bool triggers_at(const Rule& r, const Sequence& s, std::size_t i) {
    if (r.antecedent().empty()) return i < s.size();
    return occurs_ending_at(r.antecedent().elements(), s.elements(), i);
}

inline bool applies_at(const Rule& r, const Sequence& s, std::size_t i) {
    if (!triggers_at(r, s, i)) return false;
    const auto c = r.consequent().elements();
    const auto t = s.elements();
    if (i + c.size() > t.size()) return false;
    return std::equal(c.begin(), c.end(), t.begin() + i);
}

inline std::size_t trigger_count(const Rule& r, const Sequence& s) {
    if (r.antecedent().empty()) return s.size();
    return support(r.antecedent(), s);
}

struct RuleStats {
    std::size_t support = 0;
    double confidence = 0.0;
};

inline RuleStats rule_support_confidence(const Rule& r, const Sequence& s) {
    RuleStats st;
    st.support = support(r.pattern(), s);
    const std::size_t triggers = trigger_count(r, s);
    st.confidence = triggers == 0 ? 0.0 : static_cast<double>(st.support) / static_cast<double>(triggers);
    return st;
}

inline std::vector<ActiveMatch> active_matches(const std::vector<Rule>& rules, std::span<const SymbolId> h) {
    std::vector<ActiveMatch> out;
    std::vector<SymbolId> prefix;
    for (std::size_t r = 0; r < rules.size(); ++r) {
        const auto a = rules[r].antecedent().elements();
        const auto c = rules[r].consequent().elements();
        prefix.assign(a.begin(), a.end());
        for (std::size_t j = 0; j < c.size(); ++j) {
            if (j > 0) prefix.push_back(c[j - 1]);
            if (occurs_ending_at(prefix, h, h.size())) out.push_back({r, j, c[j]});
        }
    }
    return out;
}

inline std::vector<ActiveMatch> active_matches(const std::vector<Rule>& rules, const Sequence& history) {
    return active_matches(rules, history.elements());
}

// All antecedent/consequent splits of each pattern, singletons dropped,
// duplicates merged. Returned in canonical (A, C) order.
inline std::vector<Rule> generate_candidates(const std::vector<ClosedPattern>& closed) {
    std::set<Rule> rules;
    for (const auto& cp : closed) {
        const std::size_t len = cp.pattern.size();
        for (std::size_t k = 0; k < len; ++k) {
            Rule r(cp.pattern.slice(1, k), cp.pattern.slice(k + 1, len));
            if (!r.is_singleton()) rules.insert(std::move(r));
        }
    }
    return {rules.begin(), rules.end()};
}

// conf * supp * cl(C) - (cl(A) + cl(C)), symbol code lengths -log2 f.
inline double compression_gain(const Rule& r, const Sequence& s, const FrequencyTable& f) {
    const double cl_a = f.code_length(r.antecedent().elements());
    const double cl_c = f.code_length(r.consequent().elements());
    const RuleStats st = rule_support_confidence(r, s);
    return st.confidence * static_cast<double>(st.support) * cl_c - (cl_a + cl_c);
}

struct Candidate {
    Rule rule;
    double gain = 0.0;
};

// Selection order: decreasing gain, then shorter rules, then canonical (A, C).
inline bool candidate_order(const Candidate& a, const Candidate& b) {
    if (a.gain != b.gain) return a.gain > b.gain;
    if (a.rule.length() != b.rule.length()) return a.rule.length() < b.rule.length();
    return a.rule < b.rule;
}

inline std::string to_string(const Alphabet& alphabet, const Rule& r) {
    std::string out = r.antecedent().empty() ? std::string("∅") : to_text(alphabet, r.antecedent());
    out += " -> ";
    out += to_text(alphabet, r.consequent());
    return out;
}

// Parses "a b -> c", "∅ -> a b", or the compact "AB->C" (characters become
// tokens when a side has no whitespace and is not itself a known token).
inline Rule parse_rule(const Alphabet& alphabet, const std::string& text) {
    const auto arrow = text.find("->");
    if (arrow == std::string::npos) throw Error("rule '" + text + "' lacks '->'");
    auto side = [&](std::string part) {
        std::istringstream in(part);
        std::vector<std::string> toks;
        for (std::string t; in >> t;)
            if (t != "∅") toks.push_back(t);
        if (toks.size() == 1 && !alphabet.find(toks[0])) {
            std::istringstream chars(toks[0]);
            toks = tokenize(chars, true);
        }
        return Sequence::from_tokens(alphabet, toks);
    };
    return Rule(side(text.substr(0, arrow)), side(text.substr(arrow + 2)));
}

} // namespace cossu

#endif // COSSU_RULE_HPP

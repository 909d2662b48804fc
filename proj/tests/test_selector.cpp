#include <gtest/gtest.h>

#include <regex>
#include <sstream>

#include "oracles.hpp"

using namespace cossu;

namespace {

struct TraceLine {
    std::string event, decision;
    double total = 0, incumbent = 0;
};

std::vector<TraceLine> parse_trace(const std::string& text) {
    std::vector<TraceLine> out;
    std::istringstream in(text);
    const std::regex kv(R"re((\w+)=("[^"]*"|\S+))re");
    for (std::string line; std::getline(in, line);) {
        TraceLine t;
        for (auto it = std::sregex_iterator(line.begin(), line.end(), kv); it != std::sregex_iterator(); ++it) {
            const std::string key = (*it)[1], value = (*it)[2];
            if (key == "event") t.event = value;
            if (key == "decision") t.decision = value;
            if (key == "total_dl") t.total = std::stod(value);
            if (key == "incumbent") t.incumbent = std::stod(value);
        }
        out.push_back(t);
    }
    return out;
}

} // namespace

TEST(Selector, WorkedExampleYieldsNoRules) {
    const oracle::Chars s("abceabcadeab");
    const auto res = cossu_mine_detailed(s.alphabet, s.seq);
    EXPECT_EQ(res.model.proper_rule_count(), 0u);
    // two candidates gain (e -> ab and a -> b) but neither pays for itself
    const auto ranked = rank_candidates(generate_candidates(mine_closed(s.seq)), s.seq,
                                        frequencies(s.seq, s.alphabet.size()));
    ASSERT_EQ(ranked.size(), 2u);
    EXPECT_EQ(ranked[0].rule, s.rule("e", "ab"));
    EXPECT_EQ(ranked[1].rule, s.rule("a", "b"));
    EXPECT_EQ(res.stats.accepted, 0u);
}

TEST(Selector, PlantedRuleRecovered) {
    const auto spec = SyntheticSpec::standard(1);
    const Model m = cossu_mine(spec.alphabet, synth_generate(spec));
    EXPECT_TRUE(same_rule_set(m.proper_rules(), spec.targets));
}

TEST(Selector, RandomSequenceYieldsNoRules) {
    auto spec = SyntheticSpec::standard(2);
    spec.targets.clear();
    const Model m = cossu_mine(spec.alphabet, synth_generate(spec));
    EXPECT_EQ(m.proper_rule_count(), 0u);
}

TEST(Selector, SingletonsAlwaysPresentAndWeightsInRange) {
    const auto spec = SyntheticSpec::standard(3);
    const Model m = cossu_mine(spec.alphabet, synth_generate(spec));
    for (SymbolId id = 0; id < m.alphabet_size(); ++id) EXPECT_EQ(m.rules()[id], Rule::singleton(id));
    for (double w : m.weights()) {
        EXPECT_GT(w, 0.0);
        EXPECT_LT(w, 1.0);
        EXPECT_EQ(quantize_weight(w, m.precision()), w);
    }
}

TEST(Selector, IncumbentMonotoneAndDecisionsConsistent) {
    for (std::uint64_t seed : {5u, 6u}) {
        SyntheticSpec spec;
        spec.alphabet = Alphabet::from_tokens({"A", "B", "C", "D"});
        spec.targets = {parse_rule(spec.alphabet, "A->B"), parse_rule(spec.alphabet, "C->D")};
        spec.n = 3000;
        spec.seed = seed;
        const Sequence s = synth_generate(spec);
        std::ostringstream trace;
        MiningConfig cfg;
        cfg.trace = &trace;
        const auto res = cossu_mine_detailed(spec.alphabet, s, cfg);

        const auto& h = res.stats.incumbent_history;
        ASSERT_FALSE(h.empty());
        for (std::size_t i = 1; i < h.size(); ++i) EXPECT_LE(h[i], h[i - 1]);
        EXPECT_LE(res.report.total(), h.front());
        EXPECT_EQ(h.size(), 1 + res.stats.accepted + res.stats.pruned);

        std::size_t accepts = 0, removes = 0;
        for (const auto& t : parse_trace(trace.str())) {
            if (t.event == "candidate" && t.decision == "accept") {
                ++accepts;
                EXPECT_LT(t.total, t.incumbent);
            }
            if (t.event == "candidate" && t.decision == "reject") EXPECT_GE(t.total, t.incumbent);
            if (t.event == "prune" && t.decision == "remove") {
                ++removes;
                EXPECT_LE(t.total, t.incumbent);
            }
            if (t.event == "prune" && t.decision == "keep") EXPECT_GT(t.total, t.incumbent);
        }
        EXPECT_EQ(accepts, res.stats.accepted);
        EXPECT_EQ(removes, res.stats.pruned);
        EXPECT_EQ(res.model.proper_rule_count(), accepts - removes);
    }
}

TEST(Selector, ReportMatchesReturnedModel) {
    const auto spec = SyntheticSpec::standard(8);
    const Sequence s = synth_generate(spec);
    const auto res = cossu_mine_detailed(spec.alphabet, s);
    const DLReport dl = total_dl(res.model, s);
    EXPECT_NEAR(dl.model_bits, res.report.model_bits, 1e-9);
    EXPECT_NEAR(dl.data_bits, res.report.data_bits, 1e-6);
}

TEST(Selector, Deterministic) {
    const auto spec = SyntheticSpec::standard(9);
    const Sequence s = synth_generate(spec);
    EXPECT_EQ(model_to_string(cossu_mine(spec.alphabet, s)), model_to_string(cossu_mine(spec.alphabet, s)));
}

TEST(Selector, FastScreenFindsPlantedRule) {
    const auto spec = SyntheticSpec::standard(10);
    MiningConfig cfg;
    cfg.fast_screen = true;
    const Model m = cossu_mine(spec.alphabet, synth_generate(spec), cfg);
    EXPECT_TRUE(same_rule_set(m.proper_rules(), spec.targets));
}

TEST(Selector, TraceIsKeyValue) {
    const oracle::Chars s("abcabcabcabcabcabcxyz");
    std::ostringstream trace;
    MiningConfig cfg;
    cfg.trace = &trace;
    cossu_mine(s.alphabet, s.seq, cfg);
    const std::regex line(R"re(event=\w+( \w+=("[^"]*"|\S+))*)re");
    std::istringstream in(trace.str());
    std::size_t count = 0;
    for (std::string l; std::getline(in, l); ++count) EXPECT_TRUE(std::regex_match(l, line)) << l;
    EXPECT_GE(count, 3u);
}

TEST(Selector, SingleSymbolSequence) {
    const oracle::Chars s("aaaaaaaa");
    const auto res = cossu_mine_detailed(s.alphabet, s.seq);
    EXPECT_NEAR(res.report.data_bits, 0.0, 1e-9);
}

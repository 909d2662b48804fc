#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace cossu;
using oracle::Chars;

TEST(Synth, NoInsertionEqualsBase) {
    auto spec = SyntheticSpec::standard(1);
    spec.insertion_probability = 0.0;
    EXPECT_EQ(synth_generate(spec), synth_base(spec));
}

TEST(Synth, ForcedInsertionAfterEveryA) {
    auto spec = SyntheticSpec::standard(2);
    spec.insertion_probability = 1.0;
    const Sequence base = synth_base(spec);
    const Sequence full = synth_generate(spec, false);
    const SymbolId A = spec.alphabet.id("A"), B = spec.alphabet.id("B");
    std::size_t k = 0;
    for (SymbolId x : base.elements()) {
        ASSERT_EQ(full.ids().at(k++), x);
        if (x == A) ASSERT_EQ(full.ids().at(k++), B);
    }
    EXPECT_EQ(k, full.size());
    EXPECT_EQ(synth_generate(spec).size(), spec.n);
}

TEST(Synth, LengthAndReproducibility) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        auto spec = SyntheticSpec::standard(seed);
        spec.n = 1000 + 37 * seed;
        EXPECT_EQ(synth_generate(spec).size(), spec.n);
        EXPECT_EQ(synth_generate(spec), synth_generate(spec));
    }
    EXPECT_NE(synth_generate(SyntheticSpec::standard(1)), synth_generate(SyntheticSpec::standard(2)));
}

TEST(Synth, RealizedConfidence) {
    double sum = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto spec = SyntheticSpec::standard(seed);
        sum += rule_support_confidence(spec.targets[0], synth_generate(spec)).confidence;
    }
    EXPECT_NEAR(sum / 20, 0.5 + 0.5 * 0.2, 0.03);
}

TEST(Synth, InvalidSpecs) {
    auto spec = SyntheticSpec::standard();
    spec.distribution = {0.5, 0.5};
    EXPECT_THROW(synth_generate(spec), Error);
    spec.distribution = {0.5, 0.5, 0.5, 0, 0};
    EXPECT_THROW(synth_generate(spec), Error);
    spec = SyntheticSpec::standard();
    spec.insertion_probability = 1.5;
    EXPECT_THROW(synth_generate(spec), Error);
    spec = SyntheticSpec::standard();
    spec.targets.push_back(Rule(Sequence{}, Sequence{7}));
    EXPECT_THROW(synth_generate(spec), Error);
}

TEST(Synth, SkewedDistribution) {
    auto spec = SyntheticSpec::standard(3);
    spec.targets.clear();
    spec.distribution = {0.7, 0.1, 0.1, 0.1, 0.0};
    const FrequencyTable f = frequencies(synth_generate(spec), 5);
    EXPECT_NEAR(f.frequency(0), 0.7, 0.03);
    EXPECT_EQ(f.count(4), 0u);
}

TEST(HitRate, Examples) {
    const Alphabet a = Alphabet::from_tokens({"A", "B", "C"});
    const Rule ab = parse_rule(a, "A->B"), bc = parse_rule(a, "∅->BC");
    EXPECT_DOUBLE_EQ(hit_rate(std::vector<std::vector<Rule>>{{ab}, {ab}, {ab}}, {ab}), 100.0);
    EXPECT_DOUBLE_EQ(hit_rate(std::vector<std::vector<Rule>>{{ab}, {ab, bc}, {ab}, {ab}}, {ab}), 75.0);
    EXPECT_DOUBLE_EQ(hit_rate(std::vector<std::vector<Rule>>{{}, {}}, {}), 100.0);
    EXPECT_DOUBLE_EQ(hit_rate(std::vector<std::vector<Rule>>{{ab}}, {}), 0.0);
    EXPECT_TRUE(same_rule_set({ab, bc}, {bc, ab}));
}

TEST(Predict, Thresholds) {
    const Chars s("abceabcadeab");
    const Model empty = Model::empty_for(s.alphabet, s.seq);
    EXPECT_TRUE(predict_next(empty, s("e"), 0.0));
    // f_a = 1/3 is the largest frequency
    EXPECT_EQ(predict_next(empty, s("cde"), 0.3), s.id('a'));
    EXPECT_FALSE(predict_next(empty, s("cde"), 0.34));

    Model m = empty;
    m.add_rule(s.rule("ab", "c"), 1.0);
    EXPECT_EQ(predict_next(m, s("eab"), 0.5), s.id('c'));
    EXPECT_FALSE(predict_next(m, s("eab"), 0.59));
}

TEST(Predict, DeterministicAlternation) {
    const Chars s("abababab");
    Model m = Model::empty_for(s.alphabet, s.seq);
    m.add_rule(s.rule("a", "b"), 1.0);
    m.add_rule(s.rule("b", "a"), 1.0);
    const auto out = evaluate_prediction(m, s.seq, {0.0, 0.5}, s("ab"));
    const auto& p = out.points[1];
    EXPECT_DOUBLE_EQ(p.precision, 1.0);
    EXPECT_DOUBLE_EQ(p.recall, 1.0);
    EXPECT_DOUBLE_EQ(out.points[0].recall, 1.0);

    const auto bigram = evaluate_prediction(bigram_baseline(s.seq, 2), s.seq, {0.5}, s("ab"));
    EXPECT_DOUBLE_EQ(bigram.points[0].precision, 1.0);
    EXPECT_DOUBLE_EQ(bigram.points[0].recall, 1.0);
}

TEST(Predict, RecallIsOneAtZeroThreshold) {
    const auto spec = SyntheticSpec::standard(4);
    const Sequence s = synth_generate(spec);
    const Sequence train = s.slice(1, 4000), test = s.slice(4001, 5000);
    const Model m = cossu_mine(spec.alphabet, train);
    const auto out = evaluate_prediction(m, test, default_tau_grid(), train);
    ASSERT_EQ(out.points.size(), 20u);
    EXPECT_EQ(out.points[0].predicted, test.size());
    EXPECT_GE(out.points[0].recall, out.points[0].precision - 1e-12);
    double prev_recall = 2.0;
    for (const auto& p : out.points) {
        EXPECT_GE(p.precision, 0.0);
        EXPECT_LE(p.precision, 1.0);
        EXPECT_LE(p.recall, prev_recall + 1e-12);
        EXPECT_GE(p.tpr, 0.0);
        EXPECT_LE(p.fpr, 1.0);
        prev_recall = p.recall;
    }
    EXPECT_DOUBLE_EQ(out.points[0].tpr, 1.0);
    EXPECT_DOUBLE_EQ(out.points[0].fpr, 1.0);
    EXPECT_GT(out.auc, 0.5);
    EXPECT_LE(out.auc, 1.0);
}

TEST(Predict, RandomBaselines) {
    auto spec = SyntheticSpec::standard(5);
    spec.targets.clear();
    spec.n = 20000;
    const Sequence s = synth_generate(spec);
    const auto rnd = evaluate_prediction(uniform_random_baseline(5, 1), s, {0.0});
    EXPECT_NEAR(rnd.points[0].precision, 0.2, 0.02);
    const auto bg = evaluate_prediction(bigram_baseline(s.slice(1, 10000), 5), s.slice(10001, 20000), {0.0});
    EXPECT_NEAR(bg.points[0].precision, 0.2, 0.03);
}

TEST(Predict, BigramAbstainsWithoutHistory) {
    const Chars s("abab");
    const BigramPredictor bg(s.seq, 2);
    EXPECT_FALSE(bg(std::span<const SymbolId>{}).symbol);
    const SymbolId a = s.id('a');
    EXPECT_EQ(bg(std::span<const SymbolId>(&a, 1)).symbol, s.id('b'));
}

TEST(Classify, TieGoesToFirstLabel) {
    const Chars s("abcabc");
    ClassifierModel cm;
    cm.alphabet = s.alphabet;
    const Model m = Model::empty_for(s.alphabet, s.seq);
    cm.classes.emplace("beta", m);
    cm.classes.emplace("alpha", m);
    EXPECT_EQ(classify(cm, s("abc")), "alpha");
}

TEST(Classify, UnigramLikelihoodWithoutRules) {
    const Chars s("aaaabbbbcc");
    ClassifierModel cm = train_classifier(s.alphabet, {{"x", s("aaaaaab")}, {"y", s("bbbbbba")}});
    EXPECT_EQ(cm.classes.at("x").proper_rule_count(), 0u);
    EXPECT_EQ(classify(cm, s("aab")), "x");
    EXPECT_EQ(classify(cm, s("abb")), "y");
    // c never occurs in training: smoothed, still encodable
    EXPECT_NO_THROW(classify(cm, s("cc")));
}

TEST(Classify, PlantedClasses) {
    const Alphabet a = Alphabet::from_tokens({"A", "B", "C", "D", "E"});
    auto spec_for = [&](const char* rule, std::uint64_t seed, std::size_t n) {
        SyntheticSpec spec;
        spec.alphabet = a;
        spec.targets = {parse_rule(a, rule)};
        spec.insertion_probability = 0.7;
        spec.n = n;
        spec.seed = seed;
        return spec;
    };
    const ClassifierModel cm = train_classifier(
        a, {{"one", synth_generate(spec_for("A->B", 1, 5000))}, {"two", synth_generate(spec_for("C->D", 2, 5000))}});
    std::size_t correct = 0;
    for (std::uint64_t k = 0; k < 20; ++k) {
        correct += classify(cm, synth_generate(spec_for("A->B", 100 + k, 200))) == "one";
        correct += classify(cm, synth_generate(spec_for("C->D", 200 + k, 200))) == "two";
    }
    EXPECT_GE(correct, 36u);
}

TEST(ParallelFor, RunsEveryIndexAndPropagatesErrors) {
    std::vector<int> hits(100, 0);
    parallel_for(100, 4, [&](std::size_t i) { hits[i] += 1; });
    for (int h : hits) EXPECT_EQ(h, 1);
    EXPECT_THROW(parallel_for(10, 3, [](std::size_t i) { if (i == 5) throw Error("boom"); }), Error);
}

TEST(Predict, RecallIsCoverage) {
    // always proposes a; confident only after b
    const Chars s("abababba");
    const Predictor p = [&](std::span<const SymbolId> h) {
        const bool sure = !h.empty() && h.back() == s.id('b');
        return Proposal{s.id('a'), sure ? 0.9 : 0.1};
    };
    const auto out = evaluate_prediction(p, s.seq, {0.0, 0.5});
    EXPECT_DOUBLE_EQ(out.points[0].recall, 1.0);
    EXPECT_DOUBLE_EQ(out.points[0].precision, 4.0 / 8.0);
    // after b: positions 3, 5, 7, 8 of which 3 are a
    EXPECT_EQ(out.points[1].predicted, 4u);
    EXPECT_DOUBLE_EQ(out.points[1].recall, 4.0 / 8.0);
    EXPECT_DOUBLE_EQ(out.points[1].precision, 3.0 / 4.0);
    EXPECT_NEAR(out.points[1].f1, 2 * 0.75 * 0.5 / 1.25, 1e-12);

    // precision 26.67% with full coverage gives F1 42.11%
    const double prec = 0.2667;
    EXPECT_NEAR(2 * prec / (prec + 1), 0.4211, 1e-4);
}

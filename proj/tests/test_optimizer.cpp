#include <gtest/gtest.h>

#include <limits>
#include <random>

#include "oracles.hpp"

using namespace cossu;

namespace {

int evaluation_bound(double lo, double hi, double tol) {
    return static_cast<int>(std::ceil(std::log((hi - lo) / tol) / std::log(1.618))) + 2;
}

struct Planted {
    SyntheticSpec spec = SyntheticSpec::standard(4);
    Sequence seq = synth_generate(spec);
    Model model() const {
        Model m = Model::empty_for(spec.alphabet, seq);
        m.add_rule(spec.targets[0], 1.0);
        return m;
    }
};

} // namespace

TEST(GoldenSection, Quadratic) {
    const auto r = golden_section_minimize([](double x) { return (x - 2) * (x - 2); }, 0, 10, 1e-4);
    EXPECT_NEAR(r.x, 2.0, 1e-4);
    EXPECT_LE(r.evaluations, evaluation_bound(0, 10, 1e-4));
}

TEST(GoldenSection, VShape) {
    const auto r = golden_section_minimize([](double x) { return std::abs(x - 0.3); }, 0, 1, 1e-4);
    EXPECT_NEAR(r.x, 0.3, 1e-4);
    EXPECT_LE(r.evaluations, evaluation_bound(0, 1, 1e-4));
}

TEST(GoldenSection, EvaluationBoundOverBrackets) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-50, 50);
    for (int t = 0; t < 100; ++t) {
        const double target = u(rng), lo = target - std::abs(u(rng)) - 1, hi = target + std::abs(u(rng)) + 1;
        const double tol = std::pow(10.0, -static_cast<double>(1 + rng() % 6));
        const auto r = golden_section_minimize([&](double x) { return std::abs(x - target); }, lo, hi, tol);
        EXPECT_NEAR(r.x, target, tol);
        EXPECT_LE(r.evaluations, evaluation_bound(lo, hi, tol));
    }
}

TEST(GoldenSection, NonFiniteIsAnError) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(golden_section_minimize([&](double) { return nan; }, 0, 1, 1e-3), std::domain_error);
    EXPECT_THROW(golden_section_minimize([](double x) { return 1.0 / (x - x); }, 0, 1, 1e-3), std::domain_error);
}

TEST(GoldenSection, ImprovesPlantedRuleWeight) {
    const Planted p;
    Model m = p.model();
    const std::size_t rule = m.size() - 1;
    auto f = [&](double w) {
        Model t = m;
        t.set_weight(rule, w);
        return data_code_length(t, p.seq);
    };
    const double w = golden_section_minimize(f, 1e-6, 1e3, 1e-3).x;
    EXPECT_LT(f(w), f(1.0));
}

TEST(OptimizerConfig, Validation) {
    OptimizerConfig cfg;
    EXPECT_NO_THROW(cfg.validate());
    cfg.lower = 5;
    cfg.upper = 1;
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
    cfg = {};
    cfg.tolerance = 0;
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
    cfg = {};
    cfg.passes = 0;
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(AdjustWeights, EmptyModelNearClosedForm) {
    std::mt19937_64 rng(2);
    for (int t = 0; t < 10; ++t) {
        const std::size_t sigma = 2 + rng() % 6;
        const Sequence s(oracle::random_ids(rng, 200 + rng() % 800, sigma));
        const Model m = Model::empty_for(oracle::letters(sigma), s);
        const double closed = oracle::empty_model_bits(s.ids());
        const double adjusted = data_code_length(adjust_weights(m, s), s);
        EXPECT_LE(adjusted, closed + 1e-9);
        EXPECT_NEAR(adjusted, closed, 1e-3 * closed);
    }
}

TEST(AdjustWeights, SecondPassGainsLittle) {
    const Planted p;
    const Model once = adjust_weights(p.model(), p.seq);
    const Model twice = adjust_weights(once, p.seq);
    const double d1 = data_code_length(once, p.seq), d2 = data_code_length(twice, p.seq);
    EXPECT_LE(d2, d1 + 1e-9);
    EXPECT_LT(d1 - d2, 1e-3 * d1);
}

TEST(AdjustWeights, PlantedRuleOutweighsSingletons) {
    const Planted p;
    const Model m = adjust_weights(p.model(), p.seq);
    for (std::size_t i = 0; i < m.alphabet_size(); ++i) EXPECT_GT(m.weight(m.size() - 1), m.weight(i));
}

TEST(AdjustWeights, MonotoneSteps) {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 30; ++t) {
        const std::size_t sigma = 2 + rng() % 4;
        const Alphabet a = oracle::letters(sigma);
        const Sequence s(oracle::random_ids(rng, 50 + rng() % 300, sigma));
        const Model m = oracle::random_model(rng, a, s, rng() % 6);
        std::size_t steps = 0;
        double last = data_code_length(m, s);
        OptimizerConfig cfg;
        cfg.passes = 2;
        const Model out = adjust_weights(m, s, cfg, [&](const StepRecord& r) {
            ++steps;
            EXPECT_LE(r.bits_after, r.bits_before + 1e-9);
            EXPECT_NEAR(r.bits_before, last, 1e-6);
            last = r.bits_after;
        });
        EXPECT_EQ(steps, 2 * m.size());
        EXPECT_LE(data_code_length(out, s), data_code_length(m, s) + 1e-9);
        EXPECT_NEAR(data_code_length(out, s), last, 1e-6);
    }
}

TEST(Normalize, Examples) {
    const oracle::Chars c("abc");
    Model m = Model::empty_for(c.alphabet, c.seq);
    m.set_weights({2, 1, 1});
    const Model n = normalize_weights(m);
    // divided by max * (1 + 1e-9)
    EXPECT_NEAR(n.weight(0), 1.0, 1e-8);
    EXPECT_LT(n.weight(0), 1.0);
    EXPECT_NEAR(n.weight(1), 0.5, 1e-9);
    EXPECT_NEAR(n.weight(2), 0.5, 1e-9);

    // already normalized: unchanged up to rounding
    const Model twice = normalize_weights(n);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(twice.weight(i), n.weight(i), 1e-8);

    const Model q = quantize_weights(m);
    EXPECT_EQ(q.weights(), (std::vector<double>{0.9999, 0.5, 0.5}));
}

TEST(Normalize, ScaleInvarianceAndArgmax) {
    std::mt19937_64 rng(4);
    for (int t = 0; t < 40; ++t) {
        const std::size_t sigma = 2 + rng() % 5;
        const Alphabet a = oracle::letters(sigma);
        const Sequence s(oracle::random_ids(rng, 20 + rng() % 200, sigma));
        const Model m = oracle::random_model(rng, a, s, rng() % 6);
        const Model n = normalize_weights(m);
        for (double w : n.weights()) {
            EXPECT_GT(w, 0.0);
            EXPECT_LT(w, 1.0);
        }
        EXPECT_NEAR(data_code_length(n, s), data_code_length(m, s), 1e-9);
        Model scaled = m;
        std::vector<double> w = m.weights();
        const double lambda = std::exp(std::uniform_real_distribution<double>(-8, 8)(rng));
        for (double& x : w) x *= lambda;
        scaled.set_weights(w);
        EXPECT_NEAR(data_code_length(scaled, s), data_code_length(m, s), 1e-9);
        for (std::size_t k = 0; k <= s.size(); k += 5) {
            const Sequence h = s.slice(1, k);
            EXPECT_EQ(propose(m, h.elements()).symbol, propose(n, h.elements()).symbol);
        }
    }
}

TEST(Workspace, DeltaMatchesFullRecompute) {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 30; ++t) {
        const std::size_t sigma = 2 + rng() % 4;
        const Alphabet a = oracle::letters(sigma);
        const Sequence s(oracle::random_ids(rng, 30 + rng() % 200, sigma));
        const Model m = oracle::random_model(rng, a, s, rng() % 4);
        const Rule r(Sequence(oracle::random_ids(rng, rng() % 2, sigma)),
                     Sequence(oracle::random_ids(rng, 2, sigma)));
        if (m.find(r)) continue;
        const double w = 0.1 + static_cast<double>(rng() % 100) / 10.0;
        const WeightWorkspace ws(m, s);
        Model bigger = m;
        bigger.add_rule(r, w);
        const double expected = data_code_length(bigger, s) - data_code_length(m, s);
        EXPECT_NEAR(ws.delta_if_added(compute_activity(r, s), w), expected, 1e-9);
    }
}

TEST(Workspace, DataBitsTrackAddAndRemove) {
    const Planted p;
    const Model m = p.model();
    WeightWorkspace ws(Model::empty_for(p.spec.alphabet, p.seq), p.seq);
    ws.add_rule(std::make_shared<const RuleActivity>(compute_activity(p.spec.targets[0], p.seq)), 1.0);
    EXPECT_NEAR(ws.data_bits(), data_code_length(m, p.seq), 1e-9);
    ws.remove_rule(m.alphabet_size());
    EXPECT_NEAR(ws.data_bits(), oracle::empty_model_bits(p.seq.ids()), 1e-9);
}

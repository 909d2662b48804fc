#ifndef COSSU_EVALUATION_HPP
#define COSSU_EVALUATION_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "cossu/encoding.hpp"
#include "cossu/error.hpp"
#include "cossu/rule.hpp"
#include "cossu/selector.hpp"
#include "cossu/sequence.hpp"

namespace cossu {

// ---------------------------------------------------------------------------
// Synthetic data with planted rules

struct SyntheticSpec {
    Alphabet alphabet = Alphabet::from_tokens({"A", "B", "C", "D", "E"});
    // Probability per symbol id; empty means uniform.
    std::vector<double> distribution;
    std::vector<Rule> targets;
    std::size_t n = 5000;
    double insertion_probability = 0.5;
    std::uint64_t seed = 0;

    // n = 5000 over uniform {A..E} with A -> B planted at ip = 0.5.
    static SyntheticSpec standard(std::uint64_t seed = 0) {
        SyntheticSpec spec;
        spec.targets.push_back(parse_rule(spec.alphabet, "A -> B"));
        spec.seed = seed;
        return spec;
    }

    std::vector<double> probabilities() const {
        if (distribution.empty()) return std::vector<double>(alphabet.size(), 1.0 / static_cast<double>(alphabet.size()));
        return distribution;
    }

    void validate() const {
        if (alphabet.empty()) throw Error("synthetic alphabet is empty");
        const auto p = probabilities();
        if (p.size() != alphabet.size()) throw Error("distribution size does not match alphabet");
        double sum = 0.0;
        for (double x : p) {
            if (!(x >= 0.0)) throw Error("distribution entries must be non-negative");
            sum += x;
        }
        if (std::abs(sum - 1.0) > 1e-9) throw Error("distribution must sum to 1");
        if (insertion_probability < 0.0 || insertion_probability > 1.0)
            throw Error("insertion probability must lie in [0,1]");
        for (const Rule& r : targets) {
            const Sequence pattern = r.pattern();
            for (SymbolId id : pattern.elements())
                if (id >= alphabet.size()) throw Error("target rule uses a symbol outside the alphabet");
        }
    }
};

namespace detail {

// Uniform double in [0,1) from the top 53 bits; portable across standard
// libraries, unlike std::uniform_real_distribution.
inline double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline SymbolId draw(std::mt19937_64& rng, const std::vector<double>& cumulative) {
    const double u = unit(rng) * cumulative.back();
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    if (it == cumulative.end()) --it;
    return static_cast<SymbolId>(it - cumulative.begin());
}

inline std::vector<SymbolId> draw_base(const SyntheticSpec& spec, std::mt19937_64& rng) {
    std::vector<double> cumulative = spec.probabilities();
    for (std::size_t i = 1; i < cumulative.size(); ++i) cumulative[i] += cumulative[i - 1];
    std::vector<SymbolId> base(spec.n);
    for (auto& x : base) x = draw(rng, cumulative);
    return base;
}

} // namespace detail

// The i.i.d. base draw before any insertion.
inline Sequence synth_base(const SyntheticSpec& spec) {
    spec.validate();
    std::mt19937_64 rng(spec.seed);
    return Sequence(detail::draw_base(spec, rng));
}

// Draws the base sequence, then walks it left to right: after every match
// of a target antecedent in the base, the consequent is inserted with
// probability ip (targets tried in listed order). Inserted symbols are never
// matched against. The result is cut to n elements.
inline Sequence synth_generate(const SyntheticSpec& spec, bool truncate = true) {
    spec.validate();
    std::mt19937_64 rng(spec.seed);
    const std::vector<SymbolId> base = detail::draw_base(spec, rng);

    std::vector<SymbolId> out;
    out.reserve(spec.n * 2);
    for (std::size_t i = 0; i < base.size(); ++i) {
        out.push_back(base[i]);
        for (const Rule& r : spec.targets) {
            if (!occurs_ending_at(r.antecedent().elements(), base, i + 1)) continue;
            if (detail::unit(rng) < spec.insertion_probability) {
                const auto c = r.consequent().elements();
                out.insert(out.end(), c.begin(), c.end());
            }
        }
    }
    if (truncate && out.size() > spec.n) out.resize(spec.n);
    return Sequence(std::move(out));
}

// ---------------------------------------------------------------------------
// Hit rate

inline bool same_rule_set(std::vector<Rule> a, std::vector<Rule> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    return a == b;
}

// Percentage of models whose proper rules equal the targets exactly.
inline double hit_rate(const std::vector<std::vector<Rule>>& mined, const std::vector<Rule>& targets) {
    if (mined.empty()) return 0.0;
    std::size_t hits = 0;
    for (const auto& rules : mined) hits += same_rule_set(rules, targets) ? 1 : 0;
    return 100.0 * static_cast<double>(hits) / static_cast<double>(mined.size());
}

inline double hit_rate(const std::vector<Model>& models, const std::vector<Rule>& targets) {
    std::vector<std::vector<Rule>> mined;
    for (const Model& m : models) mined.push_back(m.proper_rules());
    return hit_rate(mined, targets);
}

// Runs fn(i) for i in [0, count) on up to `threads` workers.
inline void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& fn) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, count);
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

// ---------------------------------------------------------------------------
// Next-element prediction

// A predictor proposes one symbol together with its confidence, or nothing.
struct Proposal {
    std::optional<SymbolId> symbol;
    double confidence = 0.0;
};

using Predictor = std::function<Proposal(std::span<const SymbolId> history)>;

inline Proposal propose(const Model& m, std::span<const SymbolId> history) {
    const auto p = predictive_distribution(m, history);
    // max_element keeps the first maximum, i.e. the canonical tie break.
    const auto it = std::max_element(p.begin(), p.end());
    return {static_cast<SymbolId>(it - p.begin()), *it};
}

// argmax of the predictive distribution if it exceeds tau.
inline std::optional<SymbolId> predict_next(const Model& m, const Sequence& history, double tau) {
    const Proposal pr = propose(m, history.elements());
    if (pr.confidence > tau) return pr.symbol;
    return std::nullopt;
}

inline Predictor model_predictor(const Model& m) {
    return [&m](std::span<const SymbolId> h) { return propose(m, h); };
}

// Successor frequencies of the training bigrams.
class BigramPredictor {
public:
    BigramPredictor(const Sequence& train, std::size_t alphabet_size)
        : sigma_(alphabet_size), counts_(alphabet_size * alphabet_size, 0), totals_(alphabet_size, 0) {
        const auto s = train.elements();
        for (std::size_t i = 1; i < s.size(); ++i) {
            if (s[i - 1] >= sigma_ || s[i] >= sigma_) throw Error("unknown symbol in bigram training data");
            ++counts_[s[i - 1] * sigma_ + s[i]];
            ++totals_[s[i - 1]];
        }
    }

    Proposal operator()(std::span<const SymbolId> history) const {
        if (history.empty()) return {};
        const SymbolId a = history.back();
        if (a >= sigma_ || totals_[a] == 0) return {};
        const auto row = counts_.begin() + static_cast<std::ptrdiff_t>(a * sigma_);
        const auto it = std::max_element(row, row + static_cast<std::ptrdiff_t>(sigma_));
        return {static_cast<SymbolId>(it - row), static_cast<double>(*it) / static_cast<double>(totals_[a])};
    }

private:
    std::size_t sigma_;
    std::vector<std::size_t> counts_;
    std::vector<std::size_t> totals_;
};

inline Predictor bigram_baseline(const Sequence& train, std::size_t alphabet_size) {
    return BigramPredictor(train, alphabet_size);
}

// Guesses uniformly at random with confidence 1/|alphabet|.
inline Predictor uniform_random_baseline(std::size_t alphabet_size, std::uint64_t seed) {
    auto rng = std::make_shared<std::mt19937_64>(seed);
    return [rng, alphabet_size](std::span<const SymbolId>) {
        const auto sym = static_cast<SymbolId>(detail::unit(*rng) * static_cast<double>(alphabet_size));
        return Proposal{std::min<SymbolId>(sym, static_cast<SymbolId>(alphabet_size - 1)),
                        1.0 / static_cast<double>(alphabet_size)};
    };
}

struct PredictionPoint {
    double tau = 0.0;
    std::size_t total = 0;
    std::size_t predicted = 0;
    std::size_t correct = 0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    // ROC axes: positives are events whose proposal is right.
    double tpr = 0.0;
    double fpr = 0.0;
};

struct PredictionOutcome {
    std::vector<PredictionPoint> points;
    double auc = 0.0;

    const PredictionPoint& at(double tau) const {
        for (const auto& p : points)
            if (std::abs(p.tau - tau) < 1e-12) return p;
        throw Error("threshold not evaluated");
    }
};

inline std::vector<double> default_tau_grid() {
    std::vector<double> taus;
    for (int i = 0; i < 20; ++i) taus.push_back(0.05 * i);
    return taus;
}

// Predicts every element of `test` from its full preceding history (within
// test, after an optional context prefix). Abstentions lower recall only;
// precision counts correct predictions among those made.
inline PredictionOutcome evaluate_prediction(const Predictor& predictor, const Sequence& test,
                                             const std::vector<double>& taus,
                                             const Sequence& context = Sequence{}) {
    const Sequence full = context.concat(test);
    const auto s = full.elements();
    const std::size_t offset = context.size();

    std::vector<Proposal> proposals;
    proposals.reserve(test.size());
    std::size_t positives = 0, negatives = 0;
    for (std::size_t m = offset; m < s.size(); ++m) {
        proposals.push_back(predictor(s.first(m)));
        const auto& pr = proposals.back();
        if (pr.symbol) (*pr.symbol == s[m] ? positives : negatives) += 1;
    }

    PredictionOutcome out;
    for (double tau : taus) {
        PredictionPoint pt;
        pt.tau = tau;
        pt.total = test.size();
        std::size_t wrong = 0;
        for (std::size_t k = 0; k < proposals.size(); ++k) {
            const auto& pr = proposals[k];
            if (!pr.symbol || !(pr.confidence > tau)) continue;
            ++pt.predicted;
            if (*pr.symbol == s[offset + k])
                ++pt.correct;
            else
                ++wrong;
        }
        pt.precision = pt.predicted ? static_cast<double>(pt.correct) / static_cast<double>(pt.predicted) : 0.0;
        // recall is coverage: the share of events that received a prediction
        pt.recall = pt.total ? static_cast<double>(pt.predicted) / static_cast<double>(pt.total) : 0.0;
        pt.f1 = pt.precision + pt.recall > 0.0 ? 2.0 * pt.precision * pt.recall / (pt.precision + pt.recall) : 0.0;
        pt.tpr = positives ? static_cast<double>(pt.correct) / static_cast<double>(positives) : 0.0;
        pt.fpr = negatives ? static_cast<double>(wrong) / static_cast<double>(negatives) : 0.0;
        out.points.push_back(pt);
    }

    // Trapezoid AUC over the ROC points anchored at (0,0) and (1,1).
    std::vector<std::pair<double, double>> roc{{0.0, 0.0}, {1.0, 1.0}};
    for (const auto& p : out.points) roc.emplace_back(p.fpr, p.tpr);
    std::sort(roc.begin(), roc.end());
    for (std::size_t i = 1; i < roc.size(); ++i)
        out.auc += (roc[i].first - roc[i - 1].first) * (roc[i].second + roc[i - 1].second) / 2.0;
    return out;
}

inline PredictionOutcome evaluate_prediction(const Model& m, const Sequence& test, const std::vector<double>& taus,
                                             const Sequence& context = Sequence{}) {
    return evaluate_prediction(model_predictor(m), test, taus, context);
}

// ---------------------------------------------------------------------------
// Compression-based classification

struct ClassifierModel {
    Alphabet alphabet;
    std::map<std::string, Model> classes;
};

// One model per class, mined from that class's concatenated training data
// over the shared alphabet.
inline ClassifierModel train_classifier(const Alphabet& shared, const std::map<std::string, Sequence>& training,
                                        const MiningConfig& cfg = {}, std::size_t threads = 1) {
    ClassifierModel cm;
    cm.alphabet = shared;
    std::vector<std::string> labels;
    for (const auto& [label, seq] : training) labels.push_back(label);
    std::vector<Model> models(labels.size());
    parallel_for(labels.size(), threads, [&](std::size_t i) {
        MiningConfig local = cfg;
        local.trace = nullptr;
        models[i] = cossu_mine(shared, training.at(labels[i]), local);
    });
    for (std::size_t i = 0; i < labels.size(); ++i) cm.classes.emplace(labels[i], std::move(models[i]));
    return cm;
}

// The class whose model gives s the shortest data code; ties go to the
// canonically smallest label.
inline std::string classify(const ClassifierModel& cm, const Sequence& s) {
    if (cm.classes.empty()) throw Error("classifier has no classes");
    const std::string* best = nullptr;
    double best_bits = 0.0;
    for (const auto& [label, model] : cm.classes) {
        const double bits = data_code_length(model, s);
        if (!best || bits < best_bits) {
            best = &label;
            best_bits = bits;
        }
    }
    return *best;
}

} // namespace cossu

#endif // COSSU_EVALUATION_HPP

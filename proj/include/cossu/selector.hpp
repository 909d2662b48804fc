#ifndef COSSU_SELECTOR_HPP
#define COSSU_SELECTOR_HPP

#include <algorithm>
#include <cstddef>
#include <iomanip>
#include <memory>
#include <ostream>
#include <vector>

#include "cossu/closed_miner.hpp"
#include "cossu/encoding.hpp"
#include "cossu/optimizer.hpp"
#include "cossu/rule.hpp"
#include "cossu/sequence.hpp"

namespace cossu {

struct MiningConfig {
    std::size_t minsup = 2;
    std::size_t max_pattern_len = 20;
    OptimizerConfig optimizer;
    int precision = kDefaultPrecision;
    // Screen candidates by optimizing only the new rule's weight, then run a
    // full pass only for candidates that pass the screen.
    bool fast_screen = false;
    // Line-oriented key=value log of every decision, when set.
    std::ostream* trace = nullptr;
};

struct MiningStats {
    std::size_t closed_patterns = 0;
    std::size_t generated_candidates = 0;
    std::size_t positive_candidates = 0;
    std::size_t accepted = 0;
    std::size_t pruned = 0;
    // Incumbent total description length after initialization and after
    // every acceptance and every removal.
    std::vector<double> incumbent_history;
};

struct MiningResult {
    Model model;
    DLReport report;
    MiningStats stats;
};

// Candidate rules with strictly positive compression gain, in selection order.
inline std::vector<Candidate> rank_candidates(const std::vector<Rule>& rules, const Sequence& s,
                                              const FrequencyTable& f) {
    std::vector<Candidate> out;
    for (const Rule& r : rules) {
        const double gain = compression_gain(r, s, f);
        if (gain > 0.0) out.push_back({r, gain});
    }
    std::sort(out.begin(), out.end(), candidate_order);
    return out;
}

namespace detail {

class Selection {
public:
    Selection(const Alphabet& alphabet, const Sequence& s, const MiningConfig& cfg)
        : s_(s), cfg_(cfg), freq_(frequencies(s, alphabet.size())),
          base_(Model::empty(alphabet, freq_, cfg.precision)),
          ws_(s, std::vector<double>(base_.weights())) {
        rules_ = base_.rules();
    }

    MiningResult run() {
        MiningResult res;
        const auto closed = mine_closed(s_, cfg_.minsup, cfg_.max_pattern_len);
        const auto generated = generate_candidates(closed);
        const auto candidates = rank_candidates(generated, s_, freq_);
        res.stats.closed_patterns = closed.size();
        res.stats.generated_candidates = generated.size();
        res.stats.positive_candidates = candidates.size();
        trace() << "event=start n=" << s_.size() << " closed=" << closed.size()
                << " generated=" << generated.size() << " candidates=" << candidates.size() << '\n';

        ws_.adjust(cfg_.optimizer);
        incumbent_ = score(ws_, rules_);
        res.stats.incumbent_history.push_back(incumbent_.total());
        trace() << "event=init total_dl=" << incumbent_.total() << '\n';

        for (const Candidate& cand : candidates) {
            WeightWorkspace trial = ws_;
            trial.add_rule(std::make_shared<const RuleActivity>(compute_activity(cand.rule, s_)),
                           cfg_.optimizer.initial_weight);
            std::vector<Rule> trial_rules = rules_;
            trial_rules.push_back(cand.rule);
            if (cfg_.fast_screen)
                trial.adjust_single(trial.size() - 1, cfg_.optimizer);
            else
                trial.adjust(cfg_.optimizer);
            DLReport dl = score(trial, trial_rules);
            if (cfg_.fast_screen && dl.total() < incumbent_.total()) {
                trial.adjust(cfg_.optimizer);
                dl = score(trial, trial_rules);
            }
            const bool accept = dl.total() < incumbent_.total();
            trace() << "event=candidate rule=\"" << to_string(base_.alphabet(), cand.rule) << "\" gain=" << cand.gain
                    << " total_dl=" << dl.total() << " incumbent=" << incumbent_.total()
                    << " decision=" << (accept ? "accept" : "reject") << '\n';
            if (!accept) continue;

            ws_ = std::move(trial);
            rules_ = std::move(trial_rules);
            incumbent_ = dl;
            ++res.stats.accepted;
            res.stats.incumbent_history.push_back(incumbent_.total());
            prune(res.stats);
        }

        Model m = Model::empty(base_.alphabet(), freq_, cfg_.precision);
        for (std::size_t i = base_.size(); i < rules_.size(); ++i) m.add_rule(rules_[i], 1.0);
        m.set_weights(quantized(ws_.weights(), cfg_.precision));
        res.model = std::move(m);
        res.report = incumbent_;
        trace() << "event=done rules=" << res.model.proper_rule_count() << " model_bits=" << incumbent_.model_bits
                << " data_bits=" << incumbent_.data_bits << " total_dl=" << incumbent_.total() << '\n';
        return res;
    }

private:
    std::ostream& trace() { return cfg_.trace ? *cfg_.trace : null_; }

    DLReport score(const WeightWorkspace& ws, const std::vector<Rule>& rules) const {
        const std::vector<double> q = quantized(ws.weights(), cfg_.precision);
        DLReport dl;
        dl.model_bits = universal_int_code_length(rules.size());
        for (std::size_t i = 0; i < rules.size(); ++i)
            dl.model_bits += rule_code_length(rules[i], freq_, q[i], cfg_.precision);
        dl.data_bits = ws.index().data_bits(q);
        return dl;
    }

    // Tentatively drop each proper rule in insertion order; removals that do
    // not lengthen the description are kept.
    void prune(MiningStats& stats) {
        const std::vector<Rule> snapshot(rules_.begin() + static_cast<std::ptrdiff_t>(base_.size()), rules_.end());
        for (const Rule& r : snapshot) {
            auto it = std::find(rules_.begin(), rules_.end(), r);
            const auto idx = static_cast<std::size_t>(it - rules_.begin());
            WeightWorkspace trial = ws_;
            trial.remove_rule(idx);
            std::vector<Rule> trial_rules = rules_;
            trial_rules.erase(trial_rules.begin() + static_cast<std::ptrdiff_t>(idx));
            trial.adjust(cfg_.optimizer);
            const DLReport dl = score(trial, trial_rules);
            const bool remove = dl.total() <= incumbent_.total();
            trace() << "event=prune rule=\"" << to_string(base_.alphabet(), r) << "\" total_dl=" << dl.total()
                    << " incumbent=" << incumbent_.total() << " decision=" << (remove ? "remove" : "keep") << '\n';
            if (!remove) continue;
            ws_ = std::move(trial);
            rules_ = std::move(trial_rules);
            incumbent_ = dl;
            ++stats.pruned;
            stats.incumbent_history.push_back(incumbent_.total());
        }
    }

    struct NullBuffer : std::streambuf {
        int overflow(int c) override { return c; }
    };

    const Sequence& s_;
    const MiningConfig& cfg_;
    FrequencyTable freq_;
    Model base_;
    WeightWorkspace ws_;
    std::vector<Rule> rules_;
    DLReport incumbent_;
    NullBuffer null_buf_;
    std::ostream null_{&null_buf_};
};

} // namespace detail

inline MiningResult cossu_mine_detailed(const Alphabet& alphabet, const Sequence& s, const MiningConfig& cfg = {}) {
    if (s.empty()) throw Error("empty input");
    cfg.optimizer.validate();
    detail::Selection sel(alphabet, s, cfg);
    return sel.run();
}

// Greedy MDL rule selection. The returned model carries normalized weights
// rounded to cfg.precision digits.
inline Model cossu_mine(const Alphabet& alphabet, const Sequence& s, const MiningConfig& cfg = {}) {
    return cossu_mine_detailed(alphabet, s, cfg).model;
}

} // namespace cossu

#endif // COSSU_SELECTOR_HPP

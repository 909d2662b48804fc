#ifndef COSSU_ENCODING_HPP
#define COSSU_ENCODING_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "cossu/coding.hpp"
#include "cossu/error.hpp"
#include "cossu/rule.hpp"
#include "cossu/sequence.hpp"

namespace cossu {

inline constexpr int kDefaultPrecision = 4;

// Weighted rule table. The first |alphabet| rules are the singleton rules in
// symbol-id order; the rest are proper rules in insertion order.
class Model {
public:
    Model() = default;

    // The empty model: singleton rules weighted by background frequency.
    static Model empty(Alphabet alphabet, FrequencyTable freq, int precision = kDefaultPrecision) {
        if (freq.alphabet_size() != alphabet.size()) throw Error("frequency table does not match alphabet");
        Model m;
        m.alphabet_ = std::make_shared<const Alphabet>(std::move(alphabet));
        m.freq_ = std::move(freq);
        m.precision_ = precision;
        for (SymbolId id = 0; id < m.alphabet_->size(); ++id) {
            m.rules_.push_back(Rule::singleton(id));
            m.weights_.push_back(m.freq_.background(id));
        }
        return m;
    }

    static Model empty_for(const Alphabet& alphabet, const Sequence& training, int precision = kDefaultPrecision) {
        return empty(alphabet, cossu::frequencies(training, alphabet.size()), precision);
    }

    const Alphabet& alphabet() const { return *alphabet_; }
    const FrequencyTable& frequencies() const { return freq_; }
    int precision() const { return precision_; }
    std::size_t alphabet_size() const { return alphabet_ ? alphabet_->size() : 0; }

    const std::vector<Rule>& rules() const { return rules_; }
    const std::vector<double>& weights() const { return weights_; }
    std::size_t size() const { return rules_.size(); }
    std::size_t proper_rule_count() const { return rules_.size() - alphabet_size(); }

    double weight(std::size_t i) const { return weights_.at(i); }
    void set_weight(std::size_t i, double w) {
        if (!(w > 0.0) || !std::isfinite(w)) throw Error("rule weights must be positive and finite");
        weights_.at(i) = w;
    }

    // Proper (non-singleton) rules in insertion order.
    std::vector<Rule> proper_rules() const { return {rules_.begin() + alphabet_size(), rules_.end()}; }

    std::optional<std::size_t> find(const Rule& r) const {
        auto it = std::find(rules_.begin(), rules_.end(), r);
        if (it == rules_.end()) return std::nullopt;
        return static_cast<std::size_t>(it - rules_.begin());
    }

    void add_rule(Rule r, double w) {
        if (r.is_singleton()) throw Error("singleton rules are always part of the model");
        const Sequence pattern = r.pattern();
        for (SymbolId id : pattern.elements())
            if (id >= alphabet_size()) throw Error("unknown symbol id " + std::to_string(id));
        if (find(r)) throw Error("duplicate rule");
        rules_.push_back(std::move(r));
        weights_.push_back(1.0);
        set_weight(rules_.size() - 1, w);
    }

    void remove_rule(std::size_t i) {
        if (i < alphabet_size() || i >= rules_.size()) throw Error("only proper rules can be removed");
        rules_.erase(rules_.begin() + static_cast<std::ptrdiff_t>(i));
        weights_.erase(weights_.begin() + static_cast<std::ptrdiff_t>(i));
    }

    void set_weights(std::vector<double> w) {
        if (w.size() != rules_.size()) throw Error("weight vector size mismatch");
        for (double x : w)
            if (!(x > 0.0) || !std::isfinite(x)) throw Error("rule weights must be positive and finite");
        weights_ = std::move(w);
    }

private:
    std::shared_ptr<const Alphabet> alphabet_;
    FrequencyTable freq_;
    int precision_ = kDefaultPrecision;
    std::vector<Rule> rules_;
    std::vector<double> weights_;
};

struct DLReport {
    double model_bits = 0.0;
    double data_bits = 0.0;
    double total() const { return model_bits + data_bits; }
};

// [cl_N(|A|+1) + cl(A)] + [cl_N(|C|) + cl(C)] + cl_D(w)
inline double rule_code_length(const Rule& r, const FrequencyTable& f, double w, int precision) {
    const auto& a = r.antecedent();
    const auto& c = r.consequent();
    return universal_int_code_length(a.size() + 1) + f.code_length(a.elements()) +
           universal_int_code_length(c.size()) + f.code_length(c.elements()) + weight_code_length(w, precision);
}

// Number of rules followed by every rule, singletons included.
inline double model_code_length(const Model& m) {
    double bits = universal_int_code_length(m.size());
    for (std::size_t i = 0; i < m.size(); ++i)
        bits += rule_code_length(m.rules()[i], m.frequencies(), m.weight(i), m.precision());
    return bits;
}

inline std::vector<double> predictive_distribution(const Model& m, std::span<const SymbolId> history) {
    std::vector<double> p(m.alphabet_size(), 0.0);
    double total = 0.0;
    for (const ActiveMatch& a : active_matches(m.rules(), history)) {
        const double w = m.weight(a.rule);
        p[a.predicted] += w;
        total += w;
    }
    for (double& x : p) x /= total;
    return p;
}

inline std::vector<double> predictive_distribution(const Model& m, const Sequence& history) {
    return predictive_distribution(m, history.elements());
}

// Where one proper rule is active over a sequence: for each 0-based position
// m it records how many of its stages are active (stages) and how many of
// those predict s[m] (hits).
struct RuleActivity {
    std::vector<std::uint32_t> position;
    std::vector<std::uint16_t> hits;
    std::vector<std::uint16_t> stages;

    std::size_t size() const { return position.size(); }
};

inline RuleActivity compute_activity(const Rule& r, const Sequence& seq) {
    const auto s = seq.elements();
    const auto a = r.antecedent().elements();
    const auto c = r.consequent().elements();
    const std::size_t n = s.size();

    std::vector<std::pair<std::uint32_t, bool>> entries;
    auto scan_from = [&](std::size_t e0) {
        for (std::size_t j = 0; j < c.size(); ++j) {
            const std::size_t m = e0 + j;
            if (m >= n) break;
            if (j > 0 && s[m - 1] != c[j - 1]) break;
            entries.emplace_back(static_cast<std::uint32_t>(m), s[m] == c[j]);
        }
    };
    if (a.empty()) {
        for (std::size_t e0 = 0; e0 < n; ++e0) scan_from(e0);
    } else {
        for (std::size_t e0 = a.size(); e0 < n; ++e0)
            if (std::equal(a.begin(), a.end(), s.begin() + (e0 - a.size()))) scan_from(e0);
    }
    std::stable_sort(entries.begin(), entries.end(),
                     [](const auto& x, const auto& y) { return x.first < y.first; });

    RuleActivity act;
    for (const auto& [m, hit] : entries) {
        if (act.position.empty() || act.position.back() != m) {
            act.position.push_back(m);
            act.hits.push_back(0);
            act.stages.push_back(0);
        }
        act.hits.back() += hit ? 1 : 0;
        act.stages.back() += 1;
    }
    return act;
}

// Per-position numerator/denominator sums of a weighted rule table over one
// sequence. Singletons are implicit (active everywhere at stage 0), proper
// rules contribute through their RuleActivity. Sums are always accumulated
// in rule order so identical inputs give bitwise identical results.
class ActivityIndex {
public:
    ActivityIndex(const Sequence& seq, std::size_t alphabet_size) : seq_(&seq), sigma_(alphabet_size) {
        for (SymbolId id : seq.elements())
            if (id >= sigma_) throw Error("unknown symbol id " + std::to_string(id));
    }

    const Sequence& sequence() const { return *seq_; }
    std::size_t alphabet_size() const { return sigma_; }
    std::size_t rule_count() const { return acts_.size(); }
    const RuleActivity& activity(std::size_t k) const { return *acts_.at(k); }

    void add(std::shared_ptr<const RuleActivity> act) { acts_.push_back(std::move(act)); }
    void remove(std::size_t k) { acts_.erase(acts_.begin() + static_cast<std::ptrdiff_t>(k)); }

    // Extra numerator/denominator mass from proper rules; `proper` holds one
    // weight per added activity.
    void accumulate(const std::vector<double>& proper, std::vector<double>& xn, std::vector<double>& xd) const {
        const auto s = seq_->elements();
        xn.assign(s.size(), 0.0);
        xd.assign(s.size(), 0.0);
        for (std::size_t k = 0; k < acts_.size(); ++k) {
            const RuleActivity& act = *acts_[k];
            const double w = proper[k];
            for (std::size_t e = 0; e < act.size(); ++e) {
                xn[act.position[e]] += act.hits[e] * w;
                xd[act.position[e]] += act.stages[e] * w;
            }
        }
    }

    // Data bits for a full weight vector in model order (singletons first).
    double data_bits(const std::vector<double>& weights) const {
        if (weights.size() != sigma_ + acts_.size()) throw Error("weight vector size mismatch");
        std::vector<double> proper(weights.begin() + static_cast<std::ptrdiff_t>(sigma_), weights.end());
        std::vector<double> xn, xd;
        accumulate(proper, xn, xd);
        return data_bits(weights, xn, xd);
    }

    double data_bits(const std::vector<double>& weights, const std::vector<double>& xn,
                     const std::vector<double>& xd) const {
        double psi = 0.0;
        for (std::size_t i = 0; i < sigma_; ++i) psi += weights[i];
        const auto s = seq_->elements();
        double bits = 0.0;
        for (std::size_t m = 0; m < s.size(); ++m) bits -= std::log2((weights[s[m]] + xn[m]) / (psi + xd[m]));
        return bits;
    }

private:
    const Sequence* seq_;
    std::size_t sigma_;
    std::vector<std::shared_ptr<const RuleActivity>> acts_;
};

inline ActivityIndex make_activity_index(const Model& m, const Sequence& s) {
    ActivityIndex index(s, m.alphabet_size());
    for (std::size_t i = m.alphabet_size(); i < m.size(); ++i)
        index.add(std::make_shared<const RuleActivity>(compute_activity(m.rules()[i], s)));
    return index;
}

// Sum over positions of -log2 P(s[m] | s[1, m-1]).
inline double data_code_length(const Model& m, const Sequence& s) {
    return make_activity_index(m, s).data_bits(m.weights());
}

inline DLReport total_dl(const Model& m, const Sequence& s) {
    return {model_code_length(m), data_code_length(m, s)};
}

} // namespace cossu

#endif // COSSU_ENCODING_HPP

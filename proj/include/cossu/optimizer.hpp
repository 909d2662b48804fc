#ifndef COSSU_OPTIMIZER_HPP
#define COSSU_OPTIMIZER_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <stdexcept>
#include <tuple>
#include <utility>
#include <vector>

#include "cossu/encoding.hpp"
#include "cossu/error.hpp"

namespace cossu {

struct OptimizerConfig {
    double lower = 1e-6;
    double upper = 1e3;
    double tolerance = 1e-3;
    int passes = 1;
    double initial_weight = 1.0;

    void validate() const {
        if (!(lower > 0.0) || !(lower < upper)) throw std::invalid_argument("optimizer bounds must satisfy 0 < lo < hi");
        if (!(tolerance > 0.0)) throw std::invalid_argument("optimizer tolerance must be positive");
        if (passes < 1) throw std::invalid_argument("optimizer passes must be >= 1");
        if (!(initial_weight > 0.0)) throw std::invalid_argument("initial weight must be positive");
    }
};

struct GoldenResult {
    double x = 0.0;
    int evaluations = 0;
};

// Golden-section search for a minimizer of f on [lo, hi]; stops when the
// bracket is narrower than tol and returns its midpoint.
template <typename F>
GoldenResult golden_section_minimize(F&& f, double lo, double hi, double tol) {
    if (!(lo < hi)) throw std::invalid_argument("golden section needs lo < hi");
    if (!(tol > 0.0)) throw std::invalid_argument("golden section needs tol > 0");
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    GoldenResult res;
    auto eval = [&](double x) {
        ++res.evaluations;
        const double y = f(x);
        if (!std::isfinite(y)) throw std::domain_error("golden section objective is not finite");
        return y;
    };
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = eval(c), fd = eval(d);
    while (b - a > tol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = eval(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = eval(d);
        }
    }
    res.x = (a + b) / 2.0;
    return res;
}

// One accepted or rejected coordinate update, reported in data bits.
struct StepRecord {
    std::size_t rule = 0;
    double old_weight = 0.0;
    double new_weight = 0.0;
    double bits_before = 0.0;
    double bits_after = 0.0;
};

// Mutable optimization state for one sequence: the weight vector (model
// order), the activity of every proper rule and the cached per-position
// numerator/denominator mass contributed by proper rules.
//
// A coordinate step only touches positions where the rule is active; the
// objective is evaluated over groups of positions with identical sums.
class WeightWorkspace {
public:
    WeightWorkspace(const Sequence& seq, std::vector<double> singleton_weights)
        : index_(seq, singleton_weights.size()), weights_(std::move(singleton_weights)) {
        rebuild();
    }

    explicit WeightWorkspace(const Model& m, const Sequence& seq)
        : WeightWorkspace(seq, std::vector<double>(m.weights().begin(), m.weights().begin() + static_cast<std::ptrdiff_t>(m.alphabet_size()))) {
        for (std::size_t i = m.alphabet_size(); i < m.size(); ++i)
            add_rule(std::make_shared<const RuleActivity>(compute_activity(m.rules()[i], seq)), m.weight(i));
    }

    std::size_t alphabet_size() const { return index_.alphabet_size(); }
    std::size_t size() const { return weights_.size(); }
    const std::vector<double>& weights() const { return weights_; }
    const ActivityIndex& index() const { return index_; }

    void set_weights(std::vector<double> w) {
        if (w.size() != weights_.size()) throw Error("weight vector size mismatch");
        weights_ = std::move(w);
        rebuild();
    }

    void add_rule(std::shared_ptr<const RuleActivity> act, double w) {
        index_.add(std::move(act));
        weights_.push_back(w);
        rebuild();
    }

    // i is a model index (>= alphabet size).
    void remove_rule(std::size_t i) {
        if (i < alphabet_size() || i >= weights_.size()) throw Error("only proper rules can be removed");
        index_.remove(i - alphabet_size());
        weights_.erase(weights_.begin() + static_cast<std::ptrdiff_t>(i));
        rebuild();
    }

    double data_bits() const { return index_.data_bits(weights_, xn_, xd_); }

    // Change in data bits if a rule with this activity were added at weight w.
    double delta_if_added(const RuleActivity& act, double w) const {
        const auto s = index_.sequence().elements();
        double delta = 0.0;
        for (std::size_t e = 0; e < act.size(); ++e) {
            const std::size_t m = act.position[e];
            const double num = weights_[s[m]] + xn_[m];
            const double den = psi_ + xd_[m];
            delta += std::log2(num / den) - std::log2((num + act.hits[e] * w) / (den + act.stages[e] * w));
        }
        return delta;
    }

    // Golden-section search on weight i with all others fixed. The new
    // weight is kept only if it does not increase the data bits.
    StepRecord coordinate_step(std::size_t i, const OptimizerConfig& cfg) {
        std::function<double(double)> objective = i < alphabet_size() ? singleton_objective(static_cast<SymbolId>(i))
                                                                       : rule_objective(i);
        StepRecord rec;
        rec.rule = i;
        rec.old_weight = weights_[i];
        const double f_old = objective(rec.old_weight);
        const double candidate = golden_section_minimize(objective, cfg.lower, cfg.upper, cfg.tolerance).x;
        const double f_new = objective(candidate);
        rec.bits_before = f_old;
        rec.bits_after = f_old;
        rec.new_weight = rec.old_weight;
        if (f_new <= f_old) {
            set_coordinate(i, candidate);
            rec.new_weight = candidate;
            rec.bits_after = f_new;
        }
        return rec;
    }

    // cfg.passes sweeps over all rules in model order. The optional observer
    // sees every step with bits_before/bits_after as full data bits.
    void adjust(const OptimizerConfig& cfg, const std::function<void(const StepRecord&)>& observer = {}) {
        cfg.validate();
        rebuild();
        for (int pass = 0; pass < cfg.passes; ++pass) {
            for (std::size_t i = 0; i < weights_.size(); ++i) {
                const double before = observer ? data_bits() : 0.0;
                StepRecord rec = coordinate_step(i, cfg);
                if (observer) {
                    rec.bits_before = before;
                    rec.bits_after = data_bits();
                    observer(rec);
                }
            }
        }
    }

    // Only the given weight; used for cheap screening.
    void adjust_single(std::size_t i, const OptimizerConfig& cfg) {
        cfg.validate();
        rebuild();
        coordinate_step(i, cfg);
    }

private:
    using Histogram = std::vector<std::pair<double, double>>;

    static Histogram run_length(std::vector<double>& values) {
        std::sort(values.begin(), values.end());
        Histogram h;
        for (double v : values) {
            if (!h.empty() && h.back().first == v)
                h.back().second += 1.0;
            else
                h.emplace_back(v, 1.0);
        }
        return h;
    }

    void rebuild() {
        std::vector<double> proper(weights_.begin() + static_cast<std::ptrdiff_t>(alphabet_size()), weights_.end());
        index_.accumulate(proper, xn_, xd_);
        psi_ = 0.0;
        for (std::size_t i = 0; i < alphabet_size(); ++i) psi_ += weights_[i];
        histograms_valid_ = false;
    }

    void build_histograms() {
        if (histograms_valid_) return;
        std::vector<double> xd = xd_;
        xd_hist_ = run_length(xd);
        const auto s = index_.sequence().elements();
        std::vector<std::vector<double>> per_symbol(alphabet_size());
        for (std::size_t m = 0; m < s.size(); ++m) per_symbol[s[m]].push_back(xn_[m]);
        xn_hist_.assign(alphabet_size(), {});
        for (std::size_t sym = 0; sym < alphabet_size(); ++sym) xn_hist_[sym] = run_length(per_symbol[sym]);
        histograms_valid_ = true;
    }

    // Data bits as a function of singleton weight w, up to a constant.
    std::function<double(double)> singleton_objective(SymbolId sym) {
        build_histograms();
        const double rest = psi_ - weights_[sym];
        const Histogram* den = &xd_hist_;
        const Histogram* num = &xn_hist_[sym];
        return [rest, den, num](double w) {
            double bits = 0.0;
            for (const auto& [x, cnt] : *den) bits += cnt * std::log2(rest + w + x);
            for (const auto& [x, cnt] : *num) bits -= cnt * std::log2(w + x);
            return bits;
        };
    }

    // Data bits as a function of proper-rule weight w, up to a constant.
    std::function<double(double)> rule_objective(std::size_t i) {
        const RuleActivity& act = index_.activity(i - alphabet_size());
        const auto s = index_.sequence().elements();
        const double w0 = weights_[i];
        std::vector<std::tuple<double, double, int, int>> terms;
        terms.reserve(act.size());
        for (std::size_t e = 0; e < act.size(); ++e) {
            const std::size_t m = act.position[e];
            const double a = weights_[s[m]] + std::max(0.0, xn_[m] - act.hits[e] * w0);
            const double b = psi_ + std::max(0.0, xd_[m] - act.stages[e] * w0);
            terms.emplace_back(a, b, act.hits[e], act.stages[e]);
        }
        std::sort(terms.begin(), terms.end());
        struct Group {
            double a, b, c, d, count;
        };
        auto groups = std::make_shared<std::vector<Group>>();
        for (const auto& [a, b, c, d] : terms) {
            if (!groups->empty()) {
                Group& g = groups->back();
                if (g.a == a && g.b == b && g.c == c && g.d == d) {
                    g.count += 1.0;
                    continue;
                }
            }
            groups->push_back({a, b, static_cast<double>(c), static_cast<double>(d), 1.0});
        }
        return [groups](double w) {
            double bits = 0.0;
            for (const Group& g : *groups) bits += g.count * (std::log2(g.b + g.d * w) - std::log2(g.a + g.c * w));
            return bits;
        };
    }

    void set_coordinate(std::size_t i, double w) {
        const double delta = w - weights_[i];
        weights_[i] = w;
        if (i < alphabet_size()) {
            psi_ += delta;
            return;
        }
        const RuleActivity& act = index_.activity(i - alphabet_size());
        for (std::size_t e = 0; e < act.size(); ++e) {
            xn_[act.position[e]] += act.hits[e] * delta;
            xd_[act.position[e]] += act.stages[e] * delta;
        }
        histograms_valid_ = false;
    }

    ActivityIndex index_;
    std::vector<double> weights_;
    std::vector<double> xn_, xd_;
    double psi_ = 0.0;

    bool histograms_valid_ = false;
    Histogram xd_hist_;
    std::vector<Histogram> xn_hist_;
};

// Coordinate descent over all weights (singletons included) minimizing the
// data bits; model bits are not part of the objective.
inline Model adjust_weights(const Model& m, const Sequence& s, const OptimizerConfig& cfg = {},
                            const std::function<void(const StepRecord&)>& observer = {}) {
    WeightWorkspace ws(m, s);
    ws.adjust(cfg, observer);
    Model out = m;
    out.set_weights(ws.weights());
    return out;
}

// Divides by (max weight)(1 + 1e-9) so every weight lies strictly in (0,1).
inline std::vector<double> normalized(const std::vector<double>& w) {
    const double top = *std::max_element(w.begin(), w.end()) * (1.0 + 1e-9);
    std::vector<double> out(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) out[i] = w[i] / top;
    return out;
}

inline Model normalize_weights(const Model& m) {
    Model out = m;
    out.set_weights(normalized(m.weights()));
    return out;
}

// Normalized weights rounded to the model precision; the form that is
// serialized and scored.
inline std::vector<double> quantized(const std::vector<double>& w, int precision) {
    std::vector<double> out = normalized(w);
    for (double& x : out) x = quantize_weight(x, precision);
    return out;
}

inline Model quantize_weights(const Model& m) {
    Model out = m;
    out.set_weights(quantized(m.weights(), m.precision()));
    return out;
}

} // namespace cossu

#endif // COSSU_OPTIMIZER_HPP

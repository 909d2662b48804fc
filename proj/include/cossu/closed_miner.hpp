#ifndef COSSU_CLOSED_MINER_HPP
#define COSSU_CLOSED_MINER_HPP

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "cossu/sequence.hpp"

namespace cossu {

struct ClosedPattern {
    Sequence pattern;
    std::size_t support = 0;

    bool operator==(const ClosedPattern&) const = default;
};

// Canonical output order: descending support, then shorter first, then
// lexicographic on symbol ids.
inline bool closed_pattern_order(const ClosedPattern& a, const ClosedPattern& b) {
    if (a.support != b.support) return a.support > b.support;
    if (a.pattern.size() != b.pattern.size()) return a.pattern.size() < b.pattern.size();
    return a.pattern < b.pattern;
}

namespace detail {

// Prefix-doubling suffix array, O(n log^2 n).
inline std::vector<std::size_t> suffix_array(std::span<const SymbolId> s) {
    const std::size_t n = s.size();
    std::vector<std::size_t> sa(n), rank(n), tmp(n);
    std::iota(sa.begin(), sa.end(), std::size_t{0});
    for (std::size_t i = 0; i < n; ++i) rank[i] = s[i];
    if (n <= 1) return sa;
    for (std::size_t k = 1;; k <<= 1) {
        auto key = [&](std::size_t i) {
            return std::pair<std::size_t, std::size_t>(rank[i], i + k < n ? rank[i + k] + 1 : 0);
        };
        std::sort(sa.begin(), sa.end(), [&](std::size_t a, std::size_t b) { return key(a) < key(b); });
        tmp[sa[0]] = 0;
        for (std::size_t i = 1; i < n; ++i) tmp[sa[i]] = tmp[sa[i - 1]] + (key(sa[i - 1]) < key(sa[i]) ? 1 : 0);
        rank.swap(tmp);
        if (rank[sa[n - 1]] == n - 1) break;
    }
    return sa;
}

// Kasai et al.; lcp[i] = lcp(suffix sa[i-1], suffix sa[i]), lcp[0] = 0.
inline std::vector<std::size_t> lcp_array(std::span<const SymbolId> s, const std::vector<std::size_t>& sa) {
    const std::size_t n = s.size();
    std::vector<std::size_t> rank(n), lcp(n, 0);
    for (std::size_t i = 0; i < n; ++i) rank[sa[i]] = i;
    std::size_t h = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (rank[i] == 0) {
            h = 0;
            continue;
        }
        std::size_t j = sa[rank[i] - 1];
        while (i + h < n && j + h < n && s[i + h] == s[j + h]) ++h;
        lcp[rank[i]] = h;
        if (h > 0) --h;
    }
    return lcp;
}

} // namespace detail

// All closed frequent contiguous patterns of s with support >= minsup and
// length <= max_len.
//
// Right-closed repeats are exactly the labels of lcp-intervals; a label is
// also left-closed unless every occurrence is preceded by the same symbol.
inline std::vector<ClosedPattern> mine_closed(const Sequence& seq, std::size_t minsup = 2,
                                              std::size_t max_len = 20) {
    if (minsup < 2) throw std::invalid_argument("minsup must be at least 2");
    std::vector<ClosedPattern> out;
    const auto s = seq.elements();
    const std::size_t n = s.size();
    if (n < 2) return out;

    const auto sa = detail::suffix_array(s);
    const auto lcp = detail::lcp_array(s, sa);

    // changes[i] = number of left-context changes among sa[1..i].
    std::size_t start_rank = 0;
    std::vector<std::size_t> changes(n, 0);
    auto left = [&](std::size_t r) -> std::int64_t { return sa[r] == 0 ? -1 : static_cast<std::int64_t>(s[sa[r] - 1]); };
    for (std::size_t r = 0; r < n; ++r) {
        if (sa[r] == 0) start_rank = r;
        if (r > 0) changes[r] = changes[r - 1] + (left(r) != left(r - 1) ? 1 : 0);
    }
    auto left_uniform = [&](std::size_t lb, std::size_t rb) {
        if (lb <= start_rank && start_rank <= rb) return false;
        return changes[rb] == changes[lb];
    };

    auto report = [&](std::size_t depth, std::size_t lb, std::size_t rb) {
        const std::size_t supp = rb - lb + 1;
        if (depth == 0 || depth > max_len || supp < minsup || left_uniform(lb, rb)) return;
        std::vector<SymbolId> p(s.begin() + sa[lb], s.begin() + sa[lb] + depth);
        out.push_back({Sequence(std::move(p)), supp});
    };

    struct Open {
        std::size_t depth;
        std::size_t lb;
    };
    std::vector<Open> stack{{0, 0}};
    for (std::size_t i = 1; i <= n; ++i) {
        const std::size_t cur = i < n ? lcp[i] : 0;
        std::size_t lb = i - 1;
        while (cur < stack.back().depth) {
            Open top = stack.back();
            stack.pop_back();
            report(top.depth, top.lb, i - 1);
            lb = top.lb;
        }
        if (cur > stack.back().depth) stack.push_back({cur, lb});
    }

    std::sort(out.begin(), out.end(), closed_pattern_order);
    return out;
}

} // namespace cossu

#endif // COSSU_CLOSED_MINER_HPP

#ifndef COSSU_SEQUENCE_HPP
#define COSSU_SEQUENCE_HPP

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <istream>
#include <iterator>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cossu/error.hpp"

namespace cossu {

using SymbolId = std::uint32_t;

// Interned token table. Ids follow the canonical (bytewise lexicographic)
// token order, so comparing ids compares tokens.
class Alphabet {
public:
    Alphabet() = default;

    template <typename Range>
    static Alphabet from_tokens(const Range& tokens) {
        Alphabet a;
        a.tokens_.assign(std::begin(tokens), std::end(tokens));
        std::sort(a.tokens_.begin(), a.tokens_.end());
        a.tokens_.erase(std::unique(a.tokens_.begin(), a.tokens_.end()), a.tokens_.end());
        for (SymbolId i = 0; i < a.tokens_.size(); ++i) a.index_.emplace(a.tokens_[i], i);
        return a;
    }
    static Alphabet from_tokens(std::initializer_list<std::string> tokens) {
        return from_tokens(std::vector<std::string>(tokens));
    }

    std::size_t size() const { return tokens_.size(); }
    bool empty() const { return tokens_.empty(); }
    const std::vector<std::string>& tokens() const { return tokens_; }

    const std::string& token(SymbolId id) const {
        if (id >= tokens_.size()) throw Error("unknown symbol id " + std::to_string(id));
        return tokens_[id];
    }

    std::optional<SymbolId> find(std::string_view token) const {
        auto it = index_.find(std::string(token));
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    SymbolId id(std::string_view token) const {
        auto found = find(token);
        if (!found) throw Error("unknown symbol '" + std::string(token) + "'");
        return *found;
    }

    bool operator==(const Alphabet& other) const { return tokens_ == other.tokens_; }

private:
    std::vector<std::string> tokens_;
    std::unordered_map<std::string, SymbolId> index_;
};

// A sequence of interned symbols. The public accessors are 1-based:
// at(i) for 1 <= i <= size(), slice(i, j) is empty when i > j.
class Sequence {
public:
    Sequence() = default;
    explicit Sequence(std::vector<SymbolId> elements) : elements_(std::move(elements)) {}
    Sequence(std::initializer_list<SymbolId> elements) : elements_(elements) {}

    static Sequence from_tokens(const Alphabet& alphabet, const std::vector<std::string>& tokens) {
        std::vector<SymbolId> ids;
        ids.reserve(tokens.size());
        for (const auto& t : tokens) ids.push_back(alphabet.id(t));
        return Sequence(std::move(ids));
    }

    // Convenience for single-character tokens, e.g. "abceabcadeab".
    static Sequence from_chars(const Alphabet& alphabet, std::string_view text) {
        std::vector<SymbolId> ids;
        ids.reserve(text.size());
        for (char c : text) ids.push_back(alphabet.id(std::string(1, c)));
        return Sequence(std::move(ids));
    }

    std::size_t size() const { return elements_.size(); }
    bool empty() const { return elements_.empty(); }

    SymbolId at(std::size_t i) const {
        if (i < 1 || i > elements_.size()) throw std::out_of_range("sequence position out of range");
        return elements_[i - 1];
    }

    Sequence slice(std::size_t i, std::size_t j) const {
        if (i < 1 || i > j || j > elements_.size()) return {};
        return Sequence(std::vector<SymbolId>(elements_.begin() + (i - 1), elements_.begin() + j));
    }

    std::span<const SymbolId> elements() const { return elements_; }
    const std::vector<SymbolId>& ids() const { return elements_; }

    Sequence concat(const Sequence& other) const {
        std::vector<SymbolId> out = elements_;
        out.insert(out.end(), other.elements_.begin(), other.elements_.end());
        return Sequence(std::move(out));
    }

    auto operator<=>(const Sequence&) const = default;
    bool operator==(const Sequence&) const = default;

private:
    std::vector<SymbolId> elements_;
};

// True iff pattern occurs in s immediately before 0-based offset end_exclusive.
inline bool occurs_ending_at(std::span<const SymbolId> pattern, std::span<const SymbolId> s, std::size_t end_exclusive) {
    if (pattern.size() > end_exclusive || end_exclusive > s.size()) return false;
    return std::equal(pattern.begin(), pattern.end(), s.begin() + (end_exclusive - pattern.size()));
}

// All 1-based end positions j with s[j-|p|+1, j] = p, ascending.
inline std::vector<std::size_t> matches_ending_at(const Sequence& pattern, const Sequence& s) {
    std::vector<std::size_t> out;
    const auto p = pattern.elements();
    const auto t = s.elements();
    if (p.empty() || p.size() > t.size()) return out;
    for (std::size_t j = p.size(); j <= t.size(); ++j)
        if (std::equal(p.begin(), p.end(), t.begin() + (j - p.size()))) out.push_back(j);
    return out;
}

// All 1-based start positions i with s[i, i+|p|-1] = p, ascending.
inline std::vector<std::size_t> matches_starting_at(const Sequence& pattern, const Sequence& s) {
    std::vector<std::size_t> out;
    for (std::size_t j : matches_ending_at(pattern, s)) out.push_back(j - pattern.size() + 1);
    return out;
}

inline std::size_t support(const Sequence& pattern, const Sequence& s) {
    return matches_ending_at(pattern, s).size();
}

// Symbol counts of a training sequence over a fixed alphabet.
// Symbols that never occur get the smoothing weight 1/(2n) so that every
// alphabet symbol stays encodable.
class FrequencyTable {
public:
    FrequencyTable() = default;
    FrequencyTable(std::vector<std::size_t> counts, std::size_t n) : counts_(std::move(counts)), n_(n) {
        if (n_ == 0) throw Error("empty input");
    }

    std::size_t n() const { return n_; }
    std::size_t alphabet_size() const { return counts_.size(); }
    const std::vector<std::size_t>& counts() const { return counts_; }

    std::size_t count(SymbolId id) const {
        check(id);
        return counts_[id];
    }
    bool occurs(SymbolId id) const { return count(id) > 0; }

    // count/n; 0 for absent symbols.
    double frequency(SymbolId id) const { return static_cast<double>(count(id)) / static_cast<double>(n_); }

    double smoothing() const { return 1.0 / (2.0 * static_cast<double>(n_)); }

    // Background weight used for singleton rules and symbol code lengths.
    double background(SymbolId id) const {
        std::size_t c = count(id);
        return c > 0 ? static_cast<double>(c) / static_cast<double>(n_) : smoothing();
    }

    double code_length(SymbolId id) const { return -std::log2(background(id)); }

    double code_length(std::span<const SymbolId> symbols) const {
        double bits = 0.0;
        for (SymbolId s : symbols) bits += code_length(s);
        return bits;
    }

private:
    void check(SymbolId id) const {
        if (id >= counts_.size()) throw Error("unknown symbol id " + std::to_string(id));
    }

    std::vector<std::size_t> counts_;
    std::size_t n_ = 0;
};

inline FrequencyTable frequencies(const Sequence& s, std::size_t alphabet_size) {
    if (s.empty()) throw Error("empty input");
    std::vector<std::size_t> counts(alphabet_size, 0);
    for (SymbolId id : s.elements()) {
        if (id >= alphabet_size) throw Error("unknown symbol id " + std::to_string(id));
        ++counts[id];
    }
    return FrequencyTable(std::move(counts), s.size());
}

// Sequence file format: whitespace separated tokens (newlines are spaces).
// In char mode every non-whitespace UTF-8 code point is a token.
inline std::vector<std::string> tokenize(std::istream& in, bool char_mode = false) {
    std::vector<std::string> tokens;
    if (!char_mode) {
        std::string tok;
        while (in >> tok) tokens.push_back(tok);
        return tokens;
    }
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    for (std::size_t i = 0; i < text.size();) {
        unsigned char c = static_cast<unsigned char>(text[i]);
        std::size_t len = c < 0x80 ? 1 : (c >> 5) == 0x6 ? 2 : (c >> 4) == 0xE ? 3 : (c >> 3) == 0x1E ? 4 : 1;
        if (len == 1 && std::isspace(c)) {
            ++i;
            continue;
        }
        tokens.push_back(text.substr(i, len));
        i += len;
    }
    return tokens;
}

inline std::vector<std::string> read_tokens(const std::string& path, bool char_mode = false) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open sequence file '" + path + "'");
    return tokenize(in, char_mode);
}

inline std::string to_text(const Alphabet& alphabet, const Sequence& s) {
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i) out += ' ';
        out += alphabet.token(s.elements()[i]);
    }
    return out;
}

} // namespace cossu

#endif // COSSU_SEQUENCE_HPP

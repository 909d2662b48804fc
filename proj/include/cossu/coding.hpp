#ifndef COSSU_CODING_HPP
#define COSSU_CODING_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "cossu/error.hpp"

namespace cossu {

// Normalizing constant of the universal code for positive integers.
inline constexpr double kUniversalC0 = 2.865064;

// Sum of the strictly positive iterated base-2 logarithms of z.
inline double log2_star(double z) {
    double bits = 0.0;
    for (double x = std::log2(z); x > 0.0; x = std::log2(x)) bits += x;
    return bits;
}

inline double universal_int_code_length(std::uint64_t z) {
    if (z < 1) throw std::invalid_argument("universal code is defined for z >= 1");
    return log2_star(static_cast<double>(z)) + std::log2(kUniversalC0);
}

inline std::uint64_t pow10(int k) {
    std::uint64_t p = 1;
    for (int i = 0; i < k; ++i) p *= 10;
    return p;
}

// The k decimal digits d1..dk of a weight in (0,1), as an integer, clamped
// to [1, 10^k - 1] so the rounded weight stays strictly inside (0,1).
inline std::uint64_t weight_digits(double w, int k) {
    if (k < 1 || k > 18) throw std::invalid_argument("weight precision must be in [1, 18]");
    const std::uint64_t scale = pow10(k);
    double scaled = std::round(w * static_cast<double>(scale));
    if (scaled < 1.0) scaled = 1.0;
    if (scaled > static_cast<double>(scale - 1)) scaled = static_cast<double>(scale - 1);
    return static_cast<std::uint64_t>(scaled);
}

inline double quantize_weight(double w, int k) {
    return static_cast<double>(weight_digits(w, k)) / static_cast<double>(pow10(k));
}

// "0.d1d2...dk"
inline std::string format_weight(double w, int k) {
    std::string digits = std::to_string(weight_digits(w, k));
    return "0." + std::string(static_cast<std::size_t>(k) - digits.size(), '0') + digits;
}

// The weight 0.d1...dk is coded as the integer dk...d1 after dropping
// trailing zeros, so only significant digits cost bits.
inline double weight_code_length(double w, int k) {
    if (!(w > 0.0) || !(w < 1.0)) throw std::invalid_argument("weight must lie in (0,1)");
    std::string digits = format_weight(w, k).substr(2);
    while (!digits.empty() && digits.back() == '0') digits.pop_back();
    std::uint64_t z = 0;
    for (auto it = digits.rbegin(); it != digits.rend(); ++it) z = z * 10 + static_cast<std::uint64_t>(*it - '0');
    return universal_int_code_length(z);
}

inline double parse_weight(const std::string& text) {
    if (text.size() < 3 || text[0] != '0' || text[1] != '.')
        throw Error("malformed weight '" + text + "'");
    for (std::size_t i = 2; i < text.size(); ++i)
        if (text[i] < '0' || text[i] > '9') throw Error("malformed weight '" + text + "'");
    double w = std::stod(text);
    if (!(w > 0.0) || !(w < 1.0)) throw Error("weight '" + text + "' outside (0,1)");
    return w;
}

} // namespace cossu

#endif // COSSU_CODING_HPP

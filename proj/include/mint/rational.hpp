#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

namespace mint {

// Exact arbitrary-precision rational. Weights in formal sums and operation
// parameters are never rounded; everything downstream assumes exactness.
using Rational = boost::multiprecision::cpp_rational;
using Integer = boost::multiprecision::cpp_int;

inline std::string to_string(const Rational& r) {
    std::ostringstream os;
    os << numerator(r);
    if (denominator(r) != 1) os << '/' << denominator(r);
    return os.str();
}

// Accepts "n" or "n/d". Returns nullopt on malformed input or zero denominator.
inline std::optional<Rational> parse_rational(const std::string& s) {
    if (s.empty()) return std::nullopt;
    auto slash = s.find('/');
    try {
        if (slash == std::string::npos) {
            for (char c : s)
                if (!isdigit(static_cast<unsigned char>(c)) && c != '-') return std::nullopt;
            return Rational(Integer(s));
        }
        std::string num = s.substr(0, slash), den = s.substr(slash + 1);
        if (num.empty() || den.empty()) return std::nullopt;
        for (char c : num)
            if (!isdigit(static_cast<unsigned char>(c)) && c != '-') return std::nullopt;
        for (char c : den)
            if (!isdigit(static_cast<unsigned char>(c))) return std::nullopt;
        Integer d(den);
        if (d == 0) return std::nullopt;
        return Rational(Integer(num), d);
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

}  // namespace mint

#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>

#include "ndekit/errors.hpp"

namespace ndekit {

// Exact rational used for the NDE exponents so that branch selection on the
// sign of delta never depends on rounding.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    constexpr Rational() = default;
    constexpr Rational(std::int64_t n, std::int64_t d = 1) : num(n), den(d) { normalize(); }

    constexpr void normalize() {
        if (den == 0) throw ValidationError("Rational: zero denominator");
        if (den < 0) {
            num = -num;
            den = -den;
        }
        std::int64_t g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
    }

    constexpr double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    constexpr int sign() const { return num > 0 ? 1 : (num < 0 ? -1 : 0); }

    friend constexpr Rational operator+(Rational a, Rational b) {
        return Rational(a.num * b.den + b.num * a.den, a.den * b.den);
    }
    friend constexpr Rational operator-(Rational a, Rational b) {
        return Rational(a.num * b.den - b.num * a.den, a.den * b.den);
    }
    friend constexpr bool operator==(Rational a, Rational b) {
        return a.num == b.num && a.den == b.den;
    }
    std::string str() const {
        return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
    }
};

inline double gamma_function(double x) {
    double g = std::tgamma(x);
    if (!std::isfinite(g)) throw ValidationError("gamma_function: argument at a pole or overflow");
    return g;
}

inline double beta_function(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0)) throw ValidationError("beta_function: arguments must be positive");
    // Log form keeps large arguments finite; small ones go through tgamma directly.
    if (a + b < 100.0) return std::tgamma(a) * std::tgamma(b) / std::tgamma(a + b);
    return std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
}

}  // namespace ndekit

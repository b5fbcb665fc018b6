#pragma once

#include <cassert>
#include <compare>
#include <cstdint>
#include <numeric>
#include <string>

namespace kgfake {

// Non-negative exact fraction kept in lowest terms. Comparison is exact
// (cross-multiplication in 128 bits); to_double() is for display only.
class Rational {
public:
    constexpr Rational() = default;
    constexpr Rational(std::uint64_t numerator, std::uint64_t denominator)
        : num_(numerator), den_(denominator) {
        assert(denominator != 0);
        auto g = std::gcd(num_, den_);
        if (g > 1) {
            num_ /= g;
            den_ /= g;
        }
        if (num_ == 0) den_ = 1;
    }

    constexpr std::uint64_t numerator() const noexcept { return num_; }
    constexpr std::uint64_t denominator() const noexcept { return den_; }
    double to_double() const noexcept { return static_cast<double>(num_) / static_cast<double>(den_); }

    friend constexpr bool operator==(const Rational& a, const Rational& b) noexcept {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend constexpr std::strong_ordering operator<=>(const Rational& a, const Rational& b) noexcept {
        using Wide = unsigned __int128;
        return static_cast<Wide>(a.num_) * b.den_ <=> static_cast<Wide>(b.num_) * a.den_;
    }

    std::string str() const { return std::to_string(num_) + "/" + std::to_string(den_); }

private:
    std::uint64_t num_ = 0;
    std::uint64_t den_ = 1;
};

}  // namespace kgfake

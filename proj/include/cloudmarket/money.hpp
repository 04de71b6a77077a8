#pragma once

#include <compare>
#include <cstdint>

namespace cloudmarket {

// Monetary amount as an integer count of milli-cents. One exact unit for
// ledger balances, bills and auction midpoints: a k=0.5 midpoint of two
// cent-denominated orders is always representable without rounding.
class Money {
public:
    constexpr Money() = default;

    static constexpr Money cents(std::int64_t c) { return Money{c * 1000}; }
    static constexpr Money millicents(std::int64_t mc) { return Money{mc}; }

    constexpr std::int64_t millicents() const { return mc_; }

    constexpr Money operator+(Money rhs) const { return Money{mc_ + rhs.mc_}; }
    constexpr Money operator-(Money rhs) const { return Money{mc_ - rhs.mc_}; }
    constexpr Money operator*(std::int64_t k) const { return Money{mc_ * k}; }
    Money& operator+=(Money rhs) {
        mc_ += rhs.mc_;
        return *this;
    }
    Money& operator-=(Money rhs) {
        mc_ -= rhs.mc_;
        return *this;
    }
    constexpr auto operator<=>(const Money&) const = default;

private:
    constexpr explicit Money(std::int64_t mc) : mc_(mc) {}

    std::int64_t mc_ = 0;
};

constexpr Money min(Money a, Money b) { return a < b ? a : b; }

}  // namespace cloudmarket

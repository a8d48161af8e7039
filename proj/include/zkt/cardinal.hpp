#pragma once

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "zkt/order.hpp"

namespace zkt {

// Finite cardinal or the first infinite one (written "w" in the text forms).
class Cardinal {
public:
    constexpr Cardinal() = default;

    static constexpr Cardinal fin(std::uint64_t k) { return Cardinal(k, false); }
    static constexpr Cardinal omega() { return Cardinal(0, true); }

    constexpr bool is_finite() const { return !infinite_; }
    constexpr bool is_zero() const { return !infinite_ && value_ == 0; }
    constexpr bool is_positive() const { return infinite_ || value_ > 0; }

    std::uint64_t finite_value() const {
        if (infinite_) throw std::logic_error("finite_value() on an infinite cardinal");
        return value_;
    }

    Cardinal operator+(Cardinal o) const {
        if (infinite_ || o.infinite_) return omega();
        return fin(value_ + o.value_);
    }
    Cardinal& operator+=(Cardinal o) { return *this = *this + o; }

    Cardinal times(std::uint64_t k) const {
        if (k == 0) return fin(0);
        if (infinite_) return omega();
        return fin(checked_mul(value_, k));
    }

    // Fin(a) < Fin(b) < Omega.
    friend constexpr bool operator==(Cardinal a, Cardinal b) {
        return a.infinite_ == b.infinite_ && (a.infinite_ || a.value_ == b.value_);
    }
    friend constexpr std::strong_ordering operator<=>(Cardinal a, Cardinal b) {
        if (a.infinite_ != b.infinite_) return a.infinite_ ? std::strong_ordering::greater
                                                           : std::strong_ordering::less;
        if (a.infinite_) return std::strong_ordering::equal;
        return a.value_ <=> b.value_;
    }

    std::string str() const { return infinite_ ? "w" : std::to_string(value_); }

private:
    constexpr Cardinal(std::uint64_t v, bool inf) : value_(v), infinite_(inf) {}
    std::uint64_t value_ = 0;
    bool infinite_ = false;
};

}  // namespace zkt

#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace zkt {

// Order values: a nonnegative integer where 0 encodes "infinite/unbounded".
// Divisibility follows the convention that every d >= 1 is a proper divisor
// of 0, and gcd(0,0) = 0.
using Order = std::uint64_t;

inline constexpr Order kUnbounded = 0;

inline std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
    if (a != 0 && b > UINT64_MAX / a)
        throw std::overflow_error("order arithmetic overflow");
    return a * b;
}

inline Order order_gcd(Order a, Order b) { return std::gcd(a, b); }

// lcm with 0 absorbing: G[n] + G[0] = G[0].
inline Order order_lcm(Order a, Order b) {
    if (a == 0 || b == 0) return 0;
    return checked_mul(a / std::gcd(a, b), b);
}

// d | n, with every d dividing 0 and 0 dividing only 0.
inline bool order_divides(Order d, Order n) {
    if (d == 0) return n == 0;
    return n % d == 0;
}

// d is a proper divisor of n: d not in {0, n} and d | n, where every
// d >= 1 properly divides 0.
inline bool is_proper_divisor(Order d, Order n) {
    if (d == 0 || d == n) return false;
    return order_divides(d, n);
}

inline std::vector<Order> divisors(Order n) {
    if (n == 0) throw std::invalid_argument("divisors: order 0 has infinitely many divisors");
    std::vector<Order> small, large;
    for (Order d = 1; d * d <= n; ++d) {
        if (n % d != 0) continue;
        small.push_back(d);
        if (d != n / d) large.push_back(n / d);
    }
    for (auto it = large.rbegin(); it != large.rend(); ++it) small.push_back(*it);
    return small;
}

inline std::vector<Order> proper_divisors(Order n) {
    std::vector<Order> out;
    if (n == 0) throw std::invalid_argument("proper_divisors: infinite for order 0");
    for (Order d : divisors(n))
        if (d != n) out.push_back(d);
    return out;
}

inline std::uint32_t valuation(std::uint64_t p, std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("valuation of 0");
    std::uint32_t v = 0;
    while (n % p == 0) { n /= p; ++v; }
    return v;
}

inline std::uint64_t pow_u64(std::uint64_t base, std::uint32_t exp) {
    std::uint64_t r = 1;
    while (exp--) r = checked_mul(r, base);
    return r;
}

inline bool is_prime_u64(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

// Prime factorization by trial division; inputs here stay small.
inline std::vector<std::pair<std::uint64_t, std::uint32_t>> factorize(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("factorize(0)");
    std::vector<std::pair<std::uint64_t, std::uint32_t>> out;
    for (std::uint64_t p = 2; p * p <= n; ++p) {
        if (n % p != 0) continue;
        std::uint32_t v = 0;
        while (n % p == 0) { n /= p; ++v; }
        out.emplace_back(p, v);
    }
    if (n > 1) out.emplace_back(n, 1);
    return out;
}

// Number of prime factors counted with multiplicity.
inline std::uint64_t prime_factor_count(Order n) {
    if (n == 0) throw std::invalid_argument("prime_factor_count(0)");
    std::uint64_t total = 0;
    for (auto& [p, v] : factorize(n)) { (void)p; total += v; }
    return total;
}

}  // namespace zkt

#pragma once

#include <cstdint>

namespace zkt {

// Tunable caps and defaults shared by the engine, the verifiers and the CLI.
struct Config {
    // structural computations
    std::uint64_t max_transversal = 4096;  // component decomposition fan-out
    std::uint64_t max_enumeration = 4096;  // finite subgroup / coset materialization

    // round-set certification
    std::uint64_t prefix_length = 1000;
    std::uint64_t count_bound = 8;
    std::uint64_t zero_divisor_window = 64;  // divisors sampled when the order tag is 0

    // realization
    std::uint32_t chars = 4;
    std::uint64_t realize_prefix = 2000;
    double eps = 0.05;
    std::uint64_t truncation_window = 64;  // instantiated indices per omega summand
    std::uint32_t quasi_depth = 12;        // Zp(p,inf) truncated at 1/p^depth
    std::uint64_t rational_den = 720720;   // Q coordinates truncated to (1/d)Z
    std::uint32_t build_retries = 12;
    std::uint64_t sample_points = 32;      // closure samples per realize check

    std::uint64_t seed = 0;
};

}  // namespace zkt

#pragma once

#include <cstdint>
#include <random>

namespace contrastshap {

// Identifier recorded in report metadata. Standard library distributions are not used
// because their output is implementation-defined; the engine itself is fully specified.
inline constexpr const char* kRngAlgorithm =
    "mt19937_64/seed_seq(seed_lo,seed_hi,stream_lo,stream_hi)/bounded-rejection/box-muller";

// Independent stream `stream` under a 64-bit master seed.
std::mt19937_64 make_substream(std::uint64_t seed, std::uint64_t stream);

// Uniform integer in [0, bound), bound > 0, without modulo bias.
std::uint64_t uniform_below(std::mt19937_64& engine, std::uint64_t bound);

// Uniform in [0, 1) with 53 random bits.
double uniform_unit(std::mt19937_64& engine);

double standard_normal(std::mt19937_64& engine);

}  // namespace contrastshap

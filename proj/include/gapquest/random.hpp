#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <string_view>

namespace gapquest {

/// Seeded generator with platform-stable draws.
///
/// The std distributions are implementation-defined, so index and unit
/// draws are mapped from the raw 64-bit engine output here.
class Rng
{
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in [0, n); n must be positive.
    std::uint64_t index(std::uint64_t n);
    /// Uniform in [0, 1) with 53 bits of precision.
    double unit();
    /// Index drawn proportionally to weights; returns weights.size() when
    /// every weight is zero.
    std::size_t weighted(std::span<const double> weights);

private:
    std::mt19937_64 engine_;
};

/// splitmix64 finalizer over a sequence of words.
std::uint64_t mix_seed(std::initializer_list<std::uint64_t> words);

/// FNV-1a, for folding identifiers into seeds.
std::uint64_t hash_text(std::string_view text);

} // namespace gapquest

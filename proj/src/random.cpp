#include "gapquest/random.hpp"

#include <limits>

namespace gapquest {

std::uint64_t Rng::index(std::uint64_t n)
{
    // Rejection sampling removes modulo bias.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x = 0;
    do {
        x = engine_();
    } while (x >= limit);
    return x % n;
}

double Rng::unit()
{
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::size_t Rng::weighted(std::span<const double> weights)
{
    double total = 0.0;
    for (double w : weights) {
        total += w > 0.0 ? w : 0.0;
    }
    if (total <= 0.0) {
        return weights.size();
    }
    const double target = unit() * total;
    double acc = 0.0;
    std::size_t last_positive = weights.size();
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] <= 0.0) {
            continue;
        }
        acc += weights[i];
        last_positive = i;
        if (target < acc) {
            return i;
        }
    }
    return last_positive;
}

std::uint64_t mix_seed(std::initializer_list<std::uint64_t> words)
{
    std::uint64_t h = 0x9e3779b97f4a7c15ULL;
    for (auto w : words) {
        std::uint64_t z = h ^ (w + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        h = z ^ (z >> 31);
    }
    return h;
}

std::uint64_t hash_text(std::string_view text)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace gapquest

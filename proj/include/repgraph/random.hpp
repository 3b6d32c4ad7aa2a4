#pragma once

// Small deterministic random utilities.
//
// Everything here produces the same stream on every platform: the standard
// distributions are implementation-defined, so reproducible reports use these.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

namespace repgraph {

// SplitMix64 (Steele, Lea, Flood). Cheap to seed, so each permutation draw or
// simulation replicate can own an independent stream.
class SplitMix64 {
public:
    using result_type = std::uint64_t;

    explicit SplitMix64(std::uint64_t seed = 0) noexcept : state_(seed) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t state_;
};

// Seed for stream `index` derived from a master seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept;

// Uniform double in [0, 1) with 53 random bits.
template <typename Rng>
double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, n), unbiased (rejection on the top partial block).
template <typename Rng>
std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % n;
}

template <typename T, typename Rng>
void shuffle_range(std::vector<T>& v, std::size_t first, std::size_t last, Rng& rng) {
    for (std::size_t i = last - first; i > 1; --i) {
        const std::size_t j = first + uniform_index(rng, i);
        std::swap(v[first + i - 1], v[j]);
    }
}

// Draws without replacement: number of successes when `draws` items are
// taken from a population holding `successes` marked items. Inversion that
// walks outward from the mode, one uniform per call.
std::uint64_t sample_hypergeometric(SplitMix64& rng, std::uint64_t population,
                                    std::uint64_t successes, std::uint64_t draws);

// Fills counts[u] for the values listed in `order`, where value u holds
// capacity[u] items and `total_marked` of all items are marked.
void sample_multivariate_hypergeometric(SplitMix64& rng, const std::vector<std::size_t>& capacity,
                                        const std::vector<std::size_t>& order,
                                        std::size_t total_marked, std::vector<std::size_t>& counts);

}  // namespace repgraph

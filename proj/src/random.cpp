#include "repgraph/random.hpp"

#include <algorithm>
#include <cmath>

#include "repgraph/errors.hpp"

namespace repgraph {

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
    SplitMix64 a(master);
    const std::uint64_t base = a();
    SplitMix64 b(base ^ (index * 0xD1B54A32D192ED03ull + 0x8CB92BA72F3D8DD7ull));
    return b();
}

namespace {

double log_choose(double n, double k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

}  // namespace

std::uint64_t sample_hypergeometric(SplitMix64& rng, std::uint64_t population,
                                    std::uint64_t successes, std::uint64_t draws) {
    if (successes > population || draws > population)
        throw DomainError("hypergeometric parameters out of range");
    const std::uint64_t failures = population - successes;
    const std::uint64_t lo = draws > failures ? draws - failures : 0;
    const std::uint64_t hi = std::min(draws, successes);
    if (lo == hi) return lo;

    const double big_n = static_cast<double>(population);
    const double big_k = static_cast<double>(successes);
    const double n = static_cast<double>(draws);

    auto mode = static_cast<std::uint64_t>(std::floor((n + 1.0) * (big_k + 1.0) / (big_n + 2.0)));
    mode = std::clamp(mode, lo, hi);
    const double md = static_cast<double>(mode);
    const double p_mode =
        std::exp(log_choose(big_k, md) + log_choose(big_n - big_k, n - md) - log_choose(big_n, n));

    double u = uniform01(rng);
    u -= p_mode;
    if (u <= 0.0) return mode;

    std::uint64_t up = mode, down = mode;
    double p_up = p_mode, p_down = p_mode;
    while (true) {
        bool moved = false;
        if (up < hi) {
            const double k = static_cast<double>(up);
            // p(k+1) / p(k)
            p_up *= (big_k - k) * (n - k) / ((k + 1.0) * (big_n - big_k - n + k + 1.0));
            ++up;
            u -= p_up;
            if (u <= 0.0) return up;
            moved = true;
        }
        if (down > lo) {
            const double k = static_cast<double>(down);
            // p(k-1) / p(k)
            p_down *= k * (big_n - big_k - n + k) / ((big_k - k + 1.0) * (n - k + 1.0));
            --down;
            u -= p_down;
            if (u <= 0.0) return down;
            moved = true;
        }
        // Rounding left a sliver of mass unassigned.
        if (!moved) return mode;
    }
}

void sample_multivariate_hypergeometric(SplitMix64& rng, const std::vector<std::size_t>& capacity,
                                        const std::vector<std::size_t>& order,
                                        std::size_t total_marked, std::vector<std::size_t>& counts) {
    std::size_t remaining_population = 0;
    for (std::size_t u : order) remaining_population += capacity[u];
    std::size_t remaining_marked = total_marked;
    counts.assign(capacity.size(), 0);
    for (std::size_t u : order) {
        if (remaining_marked == 0) break;
        const std::size_t c = capacity[u];
        const std::size_t x =
            remaining_marked == remaining_population
                ? c
                : static_cast<std::size_t>(sample_hypergeometric(rng, remaining_population, remaining_marked, c));
        counts[u] = x;
        remaining_marked -= x;
        remaining_population -= c;
    }
}

}  // namespace repgraph

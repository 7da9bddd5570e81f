#pragma once

#include <cstdint>
#include <vector>

namespace blowup {

// Deterministic 64-bit generator (splitmix64). Chosen over std engines so
// that streams can be forked cheaply per row/trial/task, which keeps
// parallel generation independent of thread count.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Unbiased draw from [0, bound). bound must be nonzero.
    std::uint64_t below(std::uint64_t bound) {
        // rejection sampling over the largest multiple of bound
        const std::uint64_t limit = ~std::uint64_t{0} - ~std::uint64_t{0} % bound;
        std::uint64_t x;
        do {
            x = next();
        } while (x >= limit);
        return x % bound;
    }

    /// Bernoulli with exact probability num/den.
    bool chance(std::uint64_t num, std::uint64_t den) { return below(den) < num; }

private:
    std::uint64_t state_;
};

/// Forks an independent stream from a seed and one or two stream indices.
inline std::uint64_t fork_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
    Rng mixer(seed ^ (a * 0xd1342543de82ef95ULL) ^ (b * 0xaf251af3b0f025b5ULL));
    mixer.next();
    return mixer.next();
}

template <typename T>
void shuffle(std::vector<T>& items, Rng& rng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(rng.below(i));
        std::swap(items[i - 1], items[j]);
    }
}

/// Draws a k-subset of {0,..,n-1}, returned in increasing order.
std::vector<std::size_t> sample_subset(std::size_t n, std::size_t k, Rng& rng);

} // namespace blowup

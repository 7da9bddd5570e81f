#include "blowup/rng.hpp"

#include <algorithm>
#include <stdexcept>

namespace blowup {

std::vector<std::size_t> sample_subset(std::size_t n, std::size_t k, Rng& rng) {
    if (k > n) throw std::invalid_argument("sample_subset: k exceeds n");
    // partial Fisher-Yates over an index pool
    std::vector<std::size_t> pool(n);
    for (std::size_t i = 0; i < n; ++i) pool[i] = i;
    for (std::size_t i = 0; i < k; ++i) {
        std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    std::sort(pool.begin(), pool.end());
    return pool;
}

} // namespace blowup

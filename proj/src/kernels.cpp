#include "blowup/kernels.hpp"

#include <omp.h>

namespace blowup::kernels {

namespace serial {

std::vector<std::size_t> low_degree_offsets(const std::vector<Bitset>& rows,
                                            const Rational& threshold, std::int64_t scale) {
    std::vector<std::size_t> out;
    for (std::size_t v = 0; v < rows.size(); ++v)
        if (threshold.scaled_above(static_cast<std::int64_t>(rows[v].count()), scale)) out.push_back(v);
    return out;
}

std::vector<std::uint32_t> coverage_counts(const std::vector<const Bitset*>& sets,
                                           std::size_t universe) {
    std::vector<std::uint32_t> counts(universe, 0);
    for (std::size_t v = 0; v < universe; ++v)
        for (const Bitset* s : sets)
            if (s->test(v)) ++counts[v];
    return counts;
}

std::vector<std::size_t> difference_sizes(const std::vector<const Bitset*>& sets,
                                          const Bitset& minus) {
    std::vector<std::size_t> sizes(sets.size());
    for (std::size_t k = 0; k < sets.size(); ++k) sizes[k] = Bitset::count_minus(*sets[k], minus);
    return sizes;
}

std::pair<std::size_t, std::size_t> min_degree(const std::vector<Bitset>& rows) {
    std::pair<std::size_t, std::size_t> best{Bitset::npos, Bitset::npos};
    for (std::size_t v = 0; v < rows.size(); ++v) {
        std::size_t d = rows[v].count();
        if (d < best.first) best = {d, v};
    }
    return best;
}

std::int64_t total_edges(const std::vector<Bitset>& rows) {
    std::int64_t total = 0;
    for (const auto& row : rows) total += static_cast<std::int64_t>(row.count());
    return total;
}

} // namespace serial

std::vector<std::size_t> low_degree_offsets(const std::vector<Bitset>& rows,
                                            const Rational& threshold, std::int64_t scale) {
    const std::int64_t n = static_cast<std::int64_t>(rows.size());
    std::vector<char> flagged(rows.size(), 0);
#pragma omp parallel for schedule(static)
    for (std::int64_t v = 0; v < n; ++v)
        flagged[v] = threshold.scaled_above(static_cast<std::int64_t>(rows[v].count()), scale);
    std::vector<std::size_t> out;
    for (std::size_t v = 0; v < rows.size(); ++v)
        if (flagged[v]) out.push_back(v);
    return out;
}

std::vector<std::uint32_t> coverage_counts(const std::vector<const Bitset*>& sets,
                                           std::size_t universe) {
    std::vector<std::uint32_t> counts(universe, 0);
    const std::int64_t n = static_cast<std::int64_t>(universe);
#pragma omp parallel for schedule(static)
    for (std::int64_t v = 0; v < n; ++v) {
        std::uint32_t c = 0;
        for (const Bitset* s : sets) c += s->test(static_cast<std::size_t>(v));
        counts[v] = c;
    }
    return counts;
}

std::vector<std::size_t> difference_sizes(const std::vector<const Bitset*>& sets,
                                          const Bitset& minus) {
    std::vector<std::size_t> sizes(sets.size());
    const std::int64_t n = static_cast<std::int64_t>(sets.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t k = 0; k < n; ++k) sizes[k] = Bitset::count_minus(*sets[k], minus);
    return sizes;
}

std::pair<std::size_t, std::size_t> min_degree(const std::vector<Bitset>& rows) {
    std::pair<std::size_t, std::size_t> best{Bitset::npos, Bitset::npos};
    const std::int64_t n = static_cast<std::int64_t>(rows.size());
#pragma omp parallel
    {
        std::pair<std::size_t, std::size_t> local{Bitset::npos, Bitset::npos};
#pragma omp for schedule(static) nowait
        for (std::int64_t v = 0; v < n; ++v) {
            std::size_t d = rows[v].count();
            if (d < local.first || (d == local.first && static_cast<std::size_t>(v) < local.second))
                local = {d, static_cast<std::size_t>(v)};
        }
#pragma omp critical(blowup_min_degree)
        {
            // tie-break on offset so the result does not depend on thread count
            if (local.first < best.first || (local.first == best.first && local.second < best.second))
                best = local;
        }
    }
    return best;
}

std::int64_t total_edges(const std::vector<Bitset>& rows) {
    std::int64_t total = 0;
    const std::int64_t n = static_cast<std::int64_t>(rows.size());
#pragma omp parallel for schedule(static) reduction(+ : total)
    for (std::int64_t v = 0; v < n; ++v) total += static_cast<std::int64_t>(rows[v].count());
    return total;
}

} // namespace blowup::kernels

#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "blowup/bitset.hpp"
#include "blowup/rational.hpp"

namespace blowup::kernels {

// Data-parallel scans used by the regularity checker, the exceptional-set
// detection passes and the generators. Each kernel has an equivalent
// implementation in kernels::serial; outputs are identical regardless of
// thread count, and the test suite holds the two variants to that.

/// Offsets v with |rows[v]| < threshold * scale, ascending. Exact comparison.
std::vector<std::size_t> low_degree_offsets(const std::vector<Bitset>& rows,
                                            const Rational& threshold, std::int64_t scale);

/// counts[v] = number of sets containing v.
std::vector<std::uint32_t> coverage_counts(const std::vector<const Bitset*>& sets,
                                           std::size_t universe);

/// sizes[k] = |*sets[k] \ minus|.
std::vector<std::size_t> difference_sizes(const std::vector<const Bitset*>& sets,
                                          const Bitset& minus);

/// (smallest row popcount, its offset); (npos, npos) when rows is empty.
std::pair<std::size_t, std::size_t> min_degree(const std::vector<Bitset>& rows);

/// Sum of row popcounts.
std::int64_t total_edges(const std::vector<Bitset>& rows);

namespace serial {

std::vector<std::size_t> low_degree_offsets(const std::vector<Bitset>& rows,
                                            const Rational& threshold, std::int64_t scale);
std::vector<std::uint32_t> coverage_counts(const std::vector<const Bitset*>& sets,
                                           std::size_t universe);
std::vector<std::size_t> difference_sizes(const std::vector<const Bitset*>& sets,
                                          const Bitset& minus);
std::pair<std::size_t, std::size_t> min_degree(const std::vector<Bitset>& rows);
std::int64_t total_edges(const std::vector<Bitset>& rows);

} // namespace serial

} // namespace blowup::kernels

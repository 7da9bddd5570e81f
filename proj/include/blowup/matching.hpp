#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "blowup/bitset.hpp"

namespace blowup {

/// Bipartite matching instance, adjacency as one right-side bitset per left
/// vertex.
struct BipartiteInstance {
    std::size_t left_count = 0;
    std::size_t right_count = 0;
    std::vector<Bitset> edges;

    BipartiteInstance(std::size_t lefts, std::size_t rights)
        : left_count(lefts), right_count(rights), edges(lefts, Bitset(rights)) {}

    void add_edge(std::size_t l, std::size_t r) { edges.at(l).set(r); }
};

/// Maximum-cardinality matching via layered augmentation (Hopcroft-Karp).
/// Deterministic: fixed ascending scan order.
std::vector<std::pair<std::size_t, std::size_t>> max_matching(const BipartiteInstance& inst);

struct PerfectOrViolator {
    /// set when a perfect matching exists
    std::optional<std::vector<std::pair<std::size_t, std::size_t>>> matching;
    /// otherwise a Hall violator: left set S with |N(S)| < |S|
    std::vector<std::size_t> violator;
};

/// Requires a square instance. Exactly one of the two outcomes is produced;
/// the violator is the left set reachable by alternating paths from the
/// unmatched left vertices.
PerfectOrViolator perfect_or_violator(const BipartiteInstance& inst);

/// |N(S)| < |S| re-check by direct bitset union.
bool violator_is_valid(const BipartiteInstance& inst, const std::vector<std::size_t>& violator);

} // namespace blowup

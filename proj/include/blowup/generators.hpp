#pragma once

#include <cstdint>
#include <vector>

#include "blowup/graph.hpp"
#include "blowup/rational.hpp"

namespace blowup {

/// Inputs for the random super-regular-style host construction.
struct HostRecipe {
    ClusterGraph reduced;
    std::size_t class_size = 1;
    Rational d{1, 2};                    // per-pair edge probability, (0,1]
    Rational delta{1, 2};                // degraded-vertex degree fraction, (0,d]
    Rational low_degree_fraction{0, 1};  // share of each class pinned to degree ceil(delta*N)
    std::uint64_t seed = 0;

    HostRecipe(ClusterGraph r, std::size_t n) : reduced(std::move(r)), class_size(n) {}
};

/// R(N): every reduced-graph edge becomes a complete bipartite pair.
PartitionedHost complete_blowup(const ClusterGraph& reduced, std::size_t class_size);

/// Independent Bernoulli(d) pairs along the reduced graph; the first
/// floor(low_degree_fraction*N) vertices of each class get their degree into
/// every incident class pinned to exactly ceil(delta*N). Deterministic in the
/// seed, independent of thread count.
PartitionedHost random_host(const HostRecipe& recipe);

/// N disjoint cycles through the given cluster sequence (a Hamiltonian cycle
/// of the reduced graph). Every class ends up with exactly N vertices.
Pattern pattern_cycles(const ClusterGraph& reduced, std::size_t class_size,
                       const std::vector<std::size_t>& cycle_order);

/// Convenience: cycle order 0,1,...,r-1.
Pattern pattern_cycles(const ClusterGraph& reduced, std::size_t class_size);

/// Random pattern with max degree <= degree_cap: floor(fill_fraction*N)
/// vertices per cluster, then edge attempts between random cluster-edge
/// endpoints until edge_target edges are placed or the attempt budget runs
/// out. Attempt k draws from its own substream, so a longer budget extends a
/// shorter run edge-for-edge.
Pattern pattern_random_bounded(const ClusterGraph& reduced, std::size_t class_size,
                               std::size_t degree_cap, const Rational& fill_fraction,
                               std::uint64_t seed, std::size_t edge_target = Bitset::npos,
                               std::size_t attempt_budget = Bitset::npos);

/// Appends isolated vertices until every class has exactly class_size
/// vertices. Rejects patterns with an oversized class.
Pattern pad_to_balance(const Pattern& pattern, std::size_t class_size, const ClusterGraph& reduced);

} // namespace blowup

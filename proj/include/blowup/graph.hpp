#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "blowup/bitset.hpp"
#include "blowup/rational.hpp"

namespace blowup {

/// Undirected simple graph over vertices 0..n-1, adjacency stored as one
/// neighbor bitset per vertex. Immutable once built; construction is
/// single-threaded.
class SimpleGraph {
public:
    explicit SimpleGraph(std::size_t n);

    void add_edge(std::size_t u, std::size_t v);
    bool adjacent(std::size_t u, std::size_t v) const;

    std::size_t vertex_count() const { return adj_.size(); }
    std::size_t edge_count() const { return edges_; }
    std::size_t degree(std::size_t v) const { return neighbors(v).count(); }
    const Bitset& neighbors(std::size_t v) const;
    std::size_t max_degree() const;

    /// Sorted (u < v) edge list, lexicographic.
    std::vector<std::pair<std::size_t, std::size_t>> edges() const;

private:
    std::vector<Bitset> adj_;
    std::size_t edges_ = 0;
};

/// The reduced graph on r >= 2 clusters. Behaves like a small SimpleGraph
/// but keeps the order-r constraint explicit.
class ClusterGraph {
public:
    explicit ClusterGraph(std::size_t r);

    static ClusterGraph cycle(std::size_t r);
    static ClusterGraph single_edge() { return cycle_or_edge(2); }

    void add_edge(std::size_t i, std::size_t j) { graph_.add_edge(i, j); }
    bool adjacent(std::size_t i, std::size_t j) const { return graph_.adjacent(i, j); }
    std::size_t order() const { return graph_.vertex_count(); }
    std::size_t edge_count() const { return graph_.edge_count(); }
    const Bitset& neighbors(std::size_t i) const { return graph_.neighbors(i); }
    std::vector<std::pair<std::size_t, std::size_t>> edges() const { return graph_.edges(); }
    const SimpleGraph& graph() const { return graph_; }

    bool operator==(const ClusterGraph& o) const;

private:
    static ClusterGraph cycle_or_edge(std::size_t r);
    SimpleGraph graph_;
};

/// Host graph G: r vertex classes of size N; edges only across cluster-graph
/// edges, stored as bipartite adjacency rows in both directions. Global
/// vertex ids are cluster*N + offset.
class PartitionedHost {
public:
    PartitionedHost(ClusterGraph reduced, std::size_t class_size);

    void add_pair_edge(std::size_t i, std::size_t off_i, std::size_t j, std::size_t off_j);
    /// Replaces the whole pair {i,j} with the given i->j rows; the j->i
    /// direction is rebuilt by transposition. Bulk construction path for the
    /// generators.
    void install_pair(std::size_t i, std::size_t j, std::vector<Bitset> forward_rows);

    const ClusterGraph& reduced() const { return reduced_; }
    std::size_t class_size() const { return class_size_; }
    std::size_t cluster_count() const { return reduced_.order(); }
    std::size_t vertex_count() const { return reduced_.order() * class_size_; }
    std::size_t edge_count() const { return edges_; }

    std::size_t global(std::size_t cluster, std::size_t offset) const { return cluster * class_size_ + offset; }
    std::size_t cluster_of(std::size_t v) const { return v / class_size_; }
    std::size_t offset_of(std::size_t v) const { return v % class_size_; }

    /// Neighbors of (i, off) inside class j, as offsets. {i,j} must be a
    /// reduced-graph edge.
    const Bitset& adjacency_row(std::size_t i, std::size_t off, std::size_t j) const;
    /// All rows of the directed pair i -> j, indexed by source offset.
    const std::vector<Bitset>& pair_rows(std::size_t i, std::size_t j) const;
    bool has_edge(std::size_t u, std::size_t v) const;

    /// |N(v) ∩ Y| for Y a subset of class j (offset universe).
    std::size_t degree_into_class(std::size_t v, std::size_t j, const Bitset& class_subset) const;
    std::size_t degree_between(std::size_t v, std::size_t j) const;
    std::size_t degree(std::size_t v) const;

    /// Exact density e(V_i,V_j) / N^2 of a reduced-graph edge pair.
    Rational pair_density(std::size_t i, std::size_t j) const;

private:
    std::size_t pair_slot(std::size_t i, std::size_t j) const;
    void check_vertex(std::size_t v) const;

    ClusterGraph reduced_;
    std::size_t class_size_;
    std::vector<int> slot_of_dir_pair_;        // r*r -> rows_ index or -1
    std::vector<std::vector<Bitset>> rows_;    // per directed pair, per source offset
    std::size_t edges_ = 0;
};

/// Pattern graph H with its cluster assignment. Construction rejects
/// assignments that are not homomorphisms into the reduced graph.
class Pattern {
public:
    Pattern(SimpleGraph graph, std::vector<std::size_t> assignment, const ClusterGraph& reduced);

    const SimpleGraph& graph() const { return graph_; }
    std::size_t cluster_of(std::size_t x) const { return assignment_[x]; }
    const std::vector<std::size_t>& assignment() const { return assignment_; }
    std::size_t cluster_count() const { return cluster_count_; }

    const std::vector<std::size_t>& class_members(std::size_t cluster) const { return members_[cluster]; }
    std::size_t class_size(std::size_t cluster) const { return members_[cluster].size(); }
    std::size_t max_class_size() const;

private:
    SimpleGraph graph_;
    std::vector<std::size_t> assignment_;
    std::vector<std::vector<std::size_t>> members_;
    std::size_t cluster_count_;
};

/// |N(v) ∩ Y| by bitset intersection.
std::size_t degree_into(const SimpleGraph& g, std::size_t v, const Bitset& subset);

/// e(X,Y)/(|X||Y|) as an exact rational. X and Y must be disjoint and
/// nonempty.
Rational density(const SimpleGraph& g, const Bitset& X, const Bitset& Y);

/// Shortest-path length, or nullopt when unreachable.
std::optional<std::size_t> bfs_distance(const SimpleGraph& g, std::size_t u, std::size_t v);

} // namespace blowup

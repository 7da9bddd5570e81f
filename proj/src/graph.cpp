#include "blowup/graph.hpp"

#include <algorithm>
#include <queue>
#include <stdexcept>

namespace blowup {

SimpleGraph::SimpleGraph(std::size_t n) : adj_(n, Bitset(n)) {}

void SimpleGraph::add_edge(std::size_t u, std::size_t v) {
    if (u >= adj_.size() || v >= adj_.size()) throw std::invalid_argument("SimpleGraph: vertex out of range");
    if (u == v) throw std::invalid_argument("SimpleGraph: self-loop rejected");
    if (adj_[u].test(v)) return;
    adj_[u].set(v);
    adj_[v].set(u);
    ++edges_;
}

bool SimpleGraph::adjacent(std::size_t u, std::size_t v) const {
    if (u >= adj_.size() || v >= adj_.size()) throw std::invalid_argument("SimpleGraph: vertex out of range");
    return adj_[u].test(v);
}

const Bitset& SimpleGraph::neighbors(std::size_t v) const {
    if (v >= adj_.size()) throw std::invalid_argument("SimpleGraph: vertex out of range");
    return adj_[v];
}

std::size_t SimpleGraph::max_degree() const {
    std::size_t best = 0;
    for (std::size_t v = 0; v < adj_.size(); ++v) best = std::max(best, adj_[v].count());
    return best;
}

std::vector<std::pair<std::size_t, std::size_t>> SimpleGraph::edges() const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    out.reserve(edges_);
    for (std::size_t u = 0; u < adj_.size(); ++u)
        adj_[u].for_each([&](std::size_t v) {
            if (u < v) out.emplace_back(u, v);
        });
    return out;
}

ClusterGraph::ClusterGraph(std::size_t r) : graph_(r) {
    if (r < 2) throw std::invalid_argument("ClusterGraph: order must be at least 2");
}

ClusterGraph ClusterGraph::cycle_or_edge(std::size_t r) {
    ClusterGraph g(r);
    for (std::size_t i = 0; i + 1 < r; ++i) g.add_edge(i, i + 1);
    if (r > 2) g.add_edge(r - 1, 0);
    return g;
}

ClusterGraph ClusterGraph::cycle(std::size_t r) {
    if (r < 3) throw std::invalid_argument("ClusterGraph::cycle: need r >= 3");
    return cycle_or_edge(r);
}

bool ClusterGraph::operator==(const ClusterGraph& o) const {
    return order() == o.order() && edges() == o.edges();
}

PartitionedHost::PartitionedHost(ClusterGraph reduced, std::size_t class_size)
    : reduced_(std::move(reduced)), class_size_(class_size) {
    if (class_size_ < 1) throw std::invalid_argument("PartitionedHost: class size must be positive");
    const std::size_t r = reduced_.order();
    slot_of_dir_pair_.assign(r * r, -1);
    for (auto [i, j] : reduced_.edges()) {
        slot_of_dir_pair_[i * r + j] = static_cast<int>(rows_.size());
        rows_.emplace_back(class_size_, Bitset(class_size_));
        slot_of_dir_pair_[j * r + i] = static_cast<int>(rows_.size());
        rows_.emplace_back(class_size_, Bitset(class_size_));
    }
}

std::size_t PartitionedHost::pair_slot(std::size_t i, std::size_t j) const {
    const std::size_t r = reduced_.order();
    if (i >= r || j >= r) throw std::invalid_argument("PartitionedHost: cluster out of range");
    int slot = slot_of_dir_pair_[i * r + j];
    if (slot < 0) throw std::invalid_argument("PartitionedHost: clusters are not a reduced-graph edge");
    return static_cast<std::size_t>(slot);
}

void PartitionedHost::add_pair_edge(std::size_t i, std::size_t off_i, std::size_t j, std::size_t off_j) {
    if (off_i >= class_size_ || off_j >= class_size_) throw std::invalid_argument("PartitionedHost: offset out of range");
    Bitset& fwd = rows_[pair_slot(i, j)][off_i];
    if (fwd.test(off_j)) return;
    fwd.set(off_j);
    rows_[pair_slot(j, i)][off_j].set(off_i);
    ++edges_;
}

void PartitionedHost::install_pair(std::size_t i, std::size_t j, std::vector<Bitset> forward_rows) {
    if (forward_rows.size() != class_size_) throw std::invalid_argument("PartitionedHost: row count mismatch");
    for (const auto& row : forward_rows)
        if (row.universe() != class_size_) throw std::invalid_argument("PartitionedHost: row universe mismatch");
    std::vector<Bitset>& fwd = rows_[pair_slot(i, j)];
    std::vector<Bitset>& rev = rows_[pair_slot(j, i)];
    std::size_t old_count = 0;
    for (const auto& row : fwd) old_count += row.count();
    rev.assign(class_size_, Bitset(class_size_));
    std::size_t new_count = 0;
    for (std::size_t a = 0; a < class_size_; ++a) {
        new_count += forward_rows[a].count();
        forward_rows[a].for_each([&](std::size_t b) { rev[b].set(a); });
    }
    fwd = std::move(forward_rows);
    edges_ += new_count - old_count;
}

const Bitset& PartitionedHost::adjacency_row(std::size_t i, std::size_t off, std::size_t j) const {
    if (off >= class_size_) throw std::invalid_argument("PartitionedHost: offset out of range");
    return rows_[pair_slot(i, j)][off];
}

const std::vector<Bitset>& PartitionedHost::pair_rows(std::size_t i, std::size_t j) const {
    return rows_[pair_slot(i, j)];
}

bool PartitionedHost::has_edge(std::size_t u, std::size_t v) const {
    check_vertex(u);
    check_vertex(v);
    std::size_t i = cluster_of(u), j = cluster_of(v);
    if (i == j || !reduced_.adjacent(i, j)) return false;
    return adjacency_row(i, offset_of(u), j).test(offset_of(v));
}

std::size_t PartitionedHost::degree_into_class(std::size_t v, std::size_t j, const Bitset& class_subset) const {
    check_vertex(v);
    if (class_subset.universe() != class_size_) throw std::invalid_argument("PartitionedHost: subset universe mismatch");
    std::size_t i = cluster_of(v);
    if (i == j || !reduced_.adjacent(i, j)) return 0;
    return Bitset::count_and(adjacency_row(i, offset_of(v), j), class_subset);
}

std::size_t PartitionedHost::degree_between(std::size_t v, std::size_t j) const {
    check_vertex(v);
    std::size_t i = cluster_of(v);
    if (i == j || !reduced_.adjacent(i, j)) return 0;
    return adjacency_row(i, offset_of(v), j).count();
}

std::size_t PartitionedHost::degree(std::size_t v) const {
    check_vertex(v);
    std::size_t total = 0;
    reduced_.neighbors(cluster_of(v)).for_each([&](std::size_t j) { total += degree_between(v, j); });
    return total;
}

Rational PartitionedHost::pair_density(std::size_t i, std::size_t j) const {
    const auto& rows = rows_[pair_slot(i, j)];
    std::int64_t e = 0;
    for (const auto& row : rows) e += static_cast<std::int64_t>(row.count());
    return Rational(e, static_cast<std::int64_t>(class_size_ * class_size_));
}

void PartitionedHost::check_vertex(std::size_t v) const {
    if (v >= vertex_count()) throw std::invalid_argument("PartitionedHost: vertex out of range");
}

Pattern::Pattern(SimpleGraph graph, std::vector<std::size_t> assignment, const ClusterGraph& reduced)
    : graph_(std::move(graph)), assignment_(std::move(assignment)), cluster_count_(reduced.order()) {
    if (assignment_.size() != graph_.vertex_count())
        throw std::invalid_argument("Pattern: assignment size mismatch");
    for (std::size_t x = 0; x < assignment_.size(); ++x)
        if (assignment_[x] >= cluster_count_)
            throw std::invalid_argument("Pattern: assignment targets unknown cluster");
    for (auto [x, y] : graph_.edges()) {
        std::size_t cx = assignment_[x], cy = assignment_[y];
        if (cx == cy || !reduced.adjacent(cx, cy))
            throw std::invalid_argument("Pattern: assignment is not a homomorphism into the reduced graph");
    }
    members_.resize(cluster_count_);
    for (std::size_t x = 0; x < assignment_.size(); ++x) members_[assignment_[x]].push_back(x);
}

std::size_t Pattern::max_class_size() const {
    std::size_t best = 0;
    for (const auto& m : members_) best = std::max(best, m.size());
    return best;
}

std::size_t degree_into(const SimpleGraph& g, std::size_t v, const Bitset& subset) {
    if (v >= g.vertex_count()) throw std::invalid_argument("degree_into: vertex out of range");
    return Bitset::count_and(g.neighbors(v), subset);
}

Rational density(const SimpleGraph& g, const Bitset& X, const Bitset& Y) {
    if (X.none() || Y.none()) throw std::invalid_argument("density: empty side");
    if (Bitset::intersects(X, Y)) throw std::invalid_argument("density: sides overlap");
    std::int64_t e = 0;
    X.for_each([&](std::size_t v) { e += static_cast<std::int64_t>(degree_into(g, v, Y)); });
    return Rational(e, static_cast<std::int64_t>(X.count() * Y.count()));
}

std::optional<std::size_t> bfs_distance(const SimpleGraph& g, std::size_t u, std::size_t v) {
    if (u >= g.vertex_count() || v >= g.vertex_count())
        throw std::invalid_argument("bfs_distance: vertex out of range");
    if (u == v) return 0;
    std::vector<std::size_t> dist(g.vertex_count(), Bitset::npos);
    dist[u] = 0;
    std::queue<std::size_t> frontier;
    frontier.push(u);
    while (!frontier.empty()) {
        std::size_t x = frontier.front();
        frontier.pop();
        std::size_t found = Bitset::npos;
        g.neighbors(x).for_each([&](std::size_t y) {
            if (dist[y] == Bitset::npos) {
                dist[y] = dist[x] + 1;
                if (y == v) found = dist[y];
                frontier.push(y);
            }
        });
        if (found != Bitset::npos) return found;
    }
    return std::nullopt;
}

} // namespace blowup

#include "blowup/generators.hpp"

#include <stdexcept>

#include "blowup/rng.hpp"

namespace blowup {

namespace {

// substream channels for random_host
constexpr std::uint64_t kBaseRows = 1;
constexpr std::uint64_t kDegradedLeft = 2;
constexpr std::uint64_t kDegradedRight = 3;

std::int64_t ceil_scaled(const Rational& frac, std::int64_t scale) {
    __int128 num = static_cast<__int128>(frac.num()) * scale;
    return static_cast<std::int64_t>((num + frac.den() - 1) / frac.den());
}

std::int64_t floor_scaled(const Rational& frac, std::int64_t scale) {
    return static_cast<std::int64_t>(static_cast<__int128>(frac.num()) * scale / frac.den());
}

void validate(const HostRecipe& r) {
    if (r.class_size < 1) throw std::invalid_argument("random_host: class size must be positive");
    Rational zero(0), one(1);
    if (!(zero < r.d) || r.d > one) throw std::invalid_argument("random_host: d must be in (0,1]");
    if (!(zero < r.delta) || r.delta > r.d) throw std::invalid_argument("random_host: delta must be in (0,d]");
    if (r.low_degree_fraction < zero || !(r.low_degree_fraction < one))
        throw std::invalid_argument("random_host: low_degree_fraction must be in [0,1)");
}

} // namespace

PartitionedHost complete_blowup(const ClusterGraph& reduced, std::size_t class_size) {
    if (class_size < 1) throw std::invalid_argument("complete_blowup: class size must be positive");
    PartitionedHost host(reduced, class_size);
    for (auto [i, j] : reduced.edges()) {
        std::vector<Bitset> rows(class_size, Bitset::all_set(class_size));
        host.install_pair(i, j, std::move(rows));
    }
    return host;
}

PartitionedHost random_host(const HostRecipe& recipe) {
    validate(recipe);
    const std::size_t N = recipe.class_size;
    const std::size_t degraded = static_cast<std::size_t>(floor_scaled(recipe.low_degree_fraction,
                                                                       static_cast<std::int64_t>(N)));
    const std::size_t pinned_degree = static_cast<std::size_t>(ceil_scaled(recipe.delta,
                                                                           static_cast<std::int64_t>(N)));
    if (degraded > 0 && pinned_degree > N - degraded)
        throw std::invalid_argument("random_host: delta too large for the degraded construction");

    PartitionedHost host(recipe.reduced, N);
    const auto edges = recipe.reduced.edges();
    for (std::size_t p = 0; p < edges.size(); ++p) {
        auto [i, j] = edges[p];
        std::vector<Bitset> rows(N, Bitset(N));

        const std::int64_t normal_lo = static_cast<std::int64_t>(degraded);
#pragma omp parallel for schedule(static)
        for (std::int64_t a = normal_lo; a < static_cast<std::int64_t>(N); ++a) {
            Rng rng(fork_seed(recipe.seed, kBaseRows * 0x10000 + p, static_cast<std::uint64_t>(a)));
            for (std::size_t b = degraded; b < N; ++b)
                if (rng.chance(static_cast<std::uint64_t>(recipe.d.num()),
                               static_cast<std::uint64_t>(recipe.d.den())))
                    rows[a].set(b);
        }

        // Degraded rows pick exactly pinned_degree neighbors among the
        // non-degraded opposite offsets; degraded-degraded cells stay empty
        // so both endpoints keep their exact degree.
        for (std::size_t a = 0; a < degraded; ++a) {
            Rng rng(fork_seed(recipe.seed, kDegradedLeft * 0x10000 + p, a));
            for (auto b : sample_subset(N - degraded, pinned_degree, rng)) rows[a].set(b + degraded);
        }
        for (std::size_t b = 0; b < degraded; ++b) {
            Rng rng(fork_seed(recipe.seed, kDegradedRight * 0x10000 + p, b));
            for (auto a : sample_subset(N - degraded, pinned_degree, rng)) rows[a + degraded].set(b);
        }

        host.install_pair(i, j, std::move(rows));
    }
    return host;
}

Pattern pattern_cycles(const ClusterGraph& reduced, std::size_t class_size,
                       const std::vector<std::size_t>& cycle_order) {
    const std::size_t r = reduced.order();
    if (r < 3) throw std::invalid_argument("pattern_cycles: needs r >= 3, a 2-cycle is not simple");
    if (cycle_order.size() != r) throw std::invalid_argument("pattern_cycles: cycle must visit every cluster once");
    std::vector<char> seen(r, 0);
    for (std::size_t k = 0; k < r; ++k) {
        std::size_t c = cycle_order[k];
        if (c >= r || seen[c]) throw std::invalid_argument("pattern_cycles: cycle must visit every cluster once");
        seen[c] = 1;
        if (!reduced.adjacent(c, cycle_order[(k + 1) % r]))
            throw std::invalid_argument("pattern_cycles: sequence is not a cycle in the reduced graph");
    }

    SimpleGraph g(class_size * r);
    std::vector<std::size_t> psi(class_size * r);
    for (std::size_t c = 0; c < class_size; ++c)
        for (std::size_t k = 0; k < r; ++k) {
            psi[c * r + k] = cycle_order[k];
            g.add_edge(c * r + k, c * r + (k + 1) % r);
        }
    return Pattern(std::move(g), std::move(psi), reduced);
}

Pattern pattern_cycles(const ClusterGraph& reduced, std::size_t class_size) {
    std::vector<std::size_t> order(reduced.order());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    return pattern_cycles(reduced, class_size, order);
}

Pattern pattern_random_bounded(const ClusterGraph& reduced, std::size_t class_size,
                               std::size_t degree_cap, const Rational& fill_fraction,
                               std::uint64_t seed, std::size_t edge_target,
                               std::size_t attempt_budget) {
    if (!(Rational(0) < fill_fraction) || fill_fraction > Rational(1))
        throw std::invalid_argument("pattern_random_bounded: fill_fraction must be in (0,1]");
    const std::size_t r = reduced.order();
    const std::size_t per_cluster =
        static_cast<std::size_t>(floor_scaled(fill_fraction, static_cast<std::int64_t>(class_size)));
    const std::size_t n = per_cluster * r;

    SimpleGraph g(n);
    std::vector<std::size_t> psi(n);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t v = 0; v < per_cluster; ++v) psi[i * per_cluster + v] = i;

    if (edge_target == Bitset::npos) edge_target = n * degree_cap / 2;
    if (attempt_budget == Bitset::npos) attempt_budget = 20 * (edge_target + 1);

    const auto redges = reduced.edges();
    if (per_cluster > 0 && degree_cap > 0 && !redges.empty()) {
        for (std::size_t attempt = 0; attempt < attempt_budget && g.edge_count() < edge_target; ++attempt) {
            Rng rng(fork_seed(seed, attempt));
            auto [i, j] = redges[rng.below(redges.size())];
            std::size_t x = i * per_cluster + rng.below(per_cluster);
            std::size_t y = j * per_cluster + rng.below(per_cluster);
            if (g.degree(x) >= degree_cap || g.degree(y) >= degree_cap || g.adjacent(x, y)) continue;
            g.add_edge(x, y);
        }
    }
    return Pattern(std::move(g), std::move(psi), reduced);
}

Pattern pad_to_balance(const Pattern& pattern, std::size_t class_size, const ClusterGraph& reduced) {
    const std::size_t r = pattern.cluster_count();
    std::size_t extra = 0;
    for (std::size_t i = 0; i < r; ++i) {
        if (pattern.class_size(i) > class_size)
            throw std::invalid_argument("pad_to_balance: a class exceeds the host class size");
        extra += class_size - pattern.class_size(i);
    }
    const std::size_t old_n = pattern.graph().vertex_count();
    SimpleGraph g(old_n + extra);
    for (auto [u, v] : pattern.graph().edges()) g.add_edge(u, v);
    std::vector<std::size_t> psi(pattern.assignment());
    psi.reserve(old_n + extra);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t k = pattern.class_size(i); k < class_size; ++k) psi.push_back(i);
    return Pattern(std::move(g), std::move(psi), reduced);
}

} // namespace blowup

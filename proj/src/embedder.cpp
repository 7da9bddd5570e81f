#include "blowup/embedder.hpp"

#include <algorithm>
#include <chrono>
#include <memory>
#include <optional>
#include <sstream>

#include "blowup/generators.hpp"
#include "blowup/kernels.hpp"
#include "blowup/matching.hpp"

namespace blowup {

namespace {

std::uint64_t pair_key(std::size_t a, std::size_t b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint64_t>(b);
}

std::int64_t ceil_scaled(const Rational& frac, std::int64_t scale) {
    __int128 num = static_cast<__int128>(frac.num()) * scale;
    return static_cast<std::int64_t>((num + frac.den() - 1) / frac.den());
}

// deterministic pseudo-sampling of step indices, independent of the run rng
bool sample_step(std::size_t t, int percent) {
    if (percent <= 0) return false;
    if (percent >= 100) return true;
    return ((t * 2654435761ULL) >> 16) % 100 < static_cast<std::uint64_t>(percent);
}

/// Marks the radius-2 ball of x (x itself, neighbors, second neighbors).
void block_ball(const SimpleGraph& g, std::size_t x, std::vector<char>& blocked) {
    blocked[x] = 1;
    g.neighbors(x).for_each([&](std::size_t y) {
        blocked[y] = 1;
        g.neighbors(y).for_each([&](std::size_t z) { blocked[z] = 1; });
    });
}

/// Stable bring-forward of `chosen` within the unembedded suffix.
void bring_forward(std::vector<std::size_t>& order, std::size_t from,
                   const std::vector<char>& chosen) {
    std::stable_partition(order.begin() + static_cast<std::ptrdiff_t>(from), order.end(),
                          [&](std::size_t x) { return chosen[x] != 0; });
}

} // namespace

const char* outcome_name(EmbedOutcome outcome) {
    switch (outcome) {
        case EmbedOutcome::success: return "success";
        case EmbedOutcome::phase1_stuck: return "phase1-stuck";
        case EmbedOutcome::phase2_hall_failure: return "phase2-hall-failure";
        case EmbedOutcome::preprocessing_failure: return "preprocessing-failure";
    }
    return "unknown";
}

EmbedConfig EmbedConfig::practical(const Rational& d, const Rational& delta, std::uint64_t seed) {
    EmbedConfig cfg;
    cfg.d = d;
    cfg.delta = delta;
    cfg.seed = seed;
    return cfg;
}

Bitset EmbeddingState::free_set(std::size_t y) const {
    return difference(candidates[y], occupied[cluster_of(y)]);
}

std::size_t EmbeddingState::free_size(std::size_t y) const {
    return Bitset::count_minus(candidates[y], occupied[cluster_of(y)]);
}

bool EmbeddingState::bad_pair(std::size_t a, std::size_t b) const {
    return bad_pairs.count(pair_key(a, b)) != 0;
}

void EmbeddingState::add_bad_pair(std::size_t a, std::size_t b) { bad_pairs.insert(pair_key(a, b)); }

std::vector<std::vector<std::size_t>> select_buffers(const Pattern& pattern, std::size_t class_size,
                                                     const Rational& d1, Rng& rng) {
    const SimpleGraph& g = pattern.graph();
    const std::size_t r = pattern.cluster_count();
    const std::size_t quota =
        static_cast<std::size_t>(ceil_scaled(d1, static_cast<std::int64_t>(class_size)));

    // Distance >= 3 is enforced across the whole selection, not only inside
    // each cluster: adjacent leftovers would make the per-cluster matchings
    // of the final stage unsound.
    std::vector<std::vector<std::size_t>> buffers(r);
    std::vector<char> blocked(g.vertex_count(), 0);
    for (std::size_t i = 0; i < r; ++i) {
        std::vector<std::size_t> scan(pattern.class_members(i));
        shuffle(scan, rng);
        for (std::size_t x : scan) {
            if (buffers[i].size() == quota) break;
            if (blocked[x]) continue;
            buffers[i].push_back(x);
            block_ball(g, x, blocked);
        }
        if (buffers[i].size() < quota) {
            std::ostringstream ss;
            ss << "buffer quota not met in cluster " << i << ": wanted " << quota << ", found "
               << buffers[i].size();
            throw EmbedFailure(EmbedOutcome::preprocessing_failure, ss.str());
        }
        std::sort(buffers[i].begin(), buffers[i].end());
    }
    return buffers;
}

std::pair<std::vector<std::size_t>, std::size_t> initial_order(
    const Pattern& pattern, const std::vector<std::vector<std::size_t>>& buffers, Rng& rng) {
    const std::size_t n = pattern.graph().vertex_count();
    std::vector<char> is_buffer(n, 0), queued(n, 0);
    for (const auto& list : buffers)
        for (std::size_t b : list) is_buffer[b] = 1;

    std::vector<std::size_t> order;
    order.reserve(n);
    for (const auto& list : buffers)
        for (std::size_t b : list)
            pattern.graph().neighbors(b).for_each([&](std::size_t y) {
                if (!is_buffer[y] && !queued[y]) {
                    queued[y] = 1;
                    order.push_back(y);
                }
            });
    const std::size_t prefix_len = order.size();

    std::vector<std::size_t> middle;
    for (std::size_t x = 0; x < n; ++x)
        if (!is_buffer[x] && !queued[x]) middle.push_back(x);
    shuffle(middle, rng);
    order.insert(order.end(), middle.begin(), middle.end());
    for (const auto& list : buffers) order.insert(order.end(), list.begin(), list.end());
    return {std::move(order), prefix_len};
}

EmbeddingState make_state(const Pattern& pattern, const PartitionedHost& host, const EmbedConfig& cfg) {
    const std::size_t r = host.cluster_count();
    const std::size_t N = host.class_size();
    if (pattern.cluster_count() != r)
        throw std::invalid_argument("embed: pattern and host disagree on the cluster count");
    for (auto [x, y] : pattern.graph().edges())
        if (!host.reduced().adjacent(pattern.cluster_of(x), pattern.cluster_of(y)))
            throw std::invalid_argument(
                "embed: pattern assignment is not a homomorphism into the host's reduced graph");
    for (std::size_t i = 0; i < r; ++i) {
        if (pattern.class_size(i) > N)
            throw std::invalid_argument("embed: pattern class exceeds the host class size");
        if (pattern.class_size(i) != N)
            throw std::invalid_argument("embed: every pattern class must have exactly N vertices "
                                        "(use lenient balance to pad)");
    }
    const std::size_t actual_max_degree = pattern.graph().max_degree();
    if (cfg.max_degree > 0 && actual_max_degree > static_cast<std::size_t>(cfg.max_degree))
        throw std::invalid_argument("embed: pattern max degree exceeds the configured bound");

    EmbeddingState state;
    state.pattern = &pattern;
    state.host = &host;
    state.cfg = cfg;
    if (state.cfg.max_degree == 0)
        state.cfg.max_degree = static_cast<int>(std::max<std::size_t>(actual_max_degree, 1));
    state.n = pattern.graph().vertex_count();
    state.class_size = N;
    state.clusters = r;
    state.image.assign(state.n, -1);
    state.occupied.assign(r, Bitset(N));
    state.candidates.assign(state.n, Bitset::all_set(N));
    state.embedded_neighbors.assign(state.n, 0);
    state.embedded.assign(state.n, 0);
    state.is_buffer.assign(state.n, 0);
    state.exception_level.assign(state.n, 0);
    state.host_exc1.assign(r, {});
    state.host_exc2.assign(r, {});
    state.exc1_used.assign(r, {});
    state.exc2_used.assign(r, {});
    state.rng = Rng(fork_seed(cfg.seed, 0xe3bedd1ULL));
    state.diag.exc1_sizes.assign(r, 0);
    state.diag.exc2_sizes.assign(r, 0);

    state.density_basis.assign(r * r, Rational(0));
    for (auto [i, j] : host.reduced().edges()) {
        Rational basis = cfg.use_measured_density ? host.pair_density(i, j) : cfg.d;
        state.density_basis[i * r + j] = basis;
        state.density_basis[j * r + i] = basis;
    }

    state.buffers = select_buffers(pattern, N, state.cfg.d1, state.rng);
    for (const auto& list : state.buffers) {
        state.buffer_total += list.size();
        for (std::size_t b : list) state.is_buffer[b] = 1;
    }
    auto [order, prefix] = initial_order(pattern, state.buffers, state.rng);
    state.order = std::move(order);
    state.prefix_len = prefix;
    state.nonbuffer_unembedded = state.n - state.buffer_total;

    const std::size_t t1 =
        static_cast<std::size_t>(ceil_scaled(state.cfg.d2, static_cast<std::int64_t>(state.n)));
    state.reorder_period = std::max<std::size_t>(1, t1);

    detect_exceptional_hosts_low_degree(state);
    state.diag.prefix_len = state.prefix_len;
    return state;
}

void detect_exceptional_hosts_low_degree(EmbeddingState& state) {
    const PartitionedHost& host = *state.host;
    const Pattern& pattern = *state.pattern;
    const std::size_t r = state.clusters;
    const std::size_t N = state.class_size;

    std::vector<std::vector<std::size_t>> pools(r);
    for (std::size_t i = 0; i < r; ++i) {
        Bitset low(N);
        host.reduced().neighbors(i).for_each([&](std::size_t j) {
            const Rational threshold = state.basis(i, j) - state.cfg.eps;
            for (std::size_t v : kernels::low_degree_offsets(host.pair_rows(i, j), threshold,
                                                             static_cast<std::int64_t>(N)))
                low.set(v);
        });
        pools[i] = low.to_indices();
        state.diag.exc1_sizes[i] = pools[i].size();
        // |E1_i| <= r*eps*N is guaranteed only on truly regular pairs
        if (!state.cfg.eps.scaled_at_least(static_cast<std::int64_t>(pools[i].size()),
                                           static_cast<std::int64_t>(r * N)))
            state.diag.exc1_within_paper_bound = false;
    }

    // Absorbing pattern vertices: per cluster, as many non-buffers as the
    // pool holds, pairwise distance >= 3 and distance >= 3 from every buffer.
    std::vector<char> blocked(state.n, 0);
    for (const auto& list : state.buffers)
        for (std::size_t b : list) block_ball(pattern.graph(), b, blocked);

    std::vector<char> chosen(state.n, 0);
    std::size_t total_chosen = 0;
    for (std::size_t i = 0; i < r; ++i) {
        if (pools[i].empty()) continue;
        std::vector<std::size_t> scan(pattern.class_members(i));
        shuffle(scan, state.rng);
        std::size_t need = pools[i].size();
        for (std::size_t x : scan) {
            if (need == 0) break;
            if (blocked[x] || state.is_buffer[x]) continue;
            chosen[x] = 1;
            state.exception_level[x] = 1;
            block_ball(pattern.graph(), x, blocked);
            --need;
            ++total_chosen;
        }
        if (need > 0) {
            std::ostringstream ss;
            ss << "cannot place " << pools[i].size() << " low-degree absorbers in cluster " << i;
            throw EmbedFailure(EmbedOutcome::preprocessing_failure, ss.str());
        }
        state.host_exc1[i] = std::move(pools[i]);
        state.exc1_used[i].assign(state.host_exc1[i].size(), 0);
    }

    if (total_chosen > 0) {
        bring_forward(state.order, state.time, chosen);
        state.prefix_len += total_chosen;
    }
}

void detect_exceptional_hosts_buffer_starved(EmbeddingState& state) {
    const Pattern& pattern = *state.pattern;
    const std::size_t r = state.clusters;
    const std::size_t N = state.class_size;

    std::vector<std::vector<std::size_t>> pools(r);
    for (std::size_t i = 0; i < r; ++i) {
        std::vector<const Bitset*> buffer_sets;
        buffer_sets.reserve(state.buffers[i].size());
        for (std::size_t b : state.buffers[i]) buffer_sets.push_back(&state.candidates[b]);
        const auto counts = kernels::coverage_counts(buffer_sets, N);
        const std::int64_t buffer_count = static_cast<std::int64_t>(state.buffers[i].size());
        for (std::size_t v = 0; v < N; ++v) {
            if (state.occupied[i].test(v)) continue;
            if (state.cfg.d2.scaled_above(static_cast<std::int64_t>(counts[v]), buffer_count))
                pools[i].push_back(v);
        }
        state.diag.exc2_sizes[i] = pools[i].size();
        if (!state.cfg.eps2.scaled_at_least(static_cast<std::int64_t>(pools[i].size()),
                                            static_cast<std::int64_t>(N)))
            state.diag.exc2_within_paper_bound = false;
    }

    // Absorbers need untouched candidate sets and distance >= 3 from both
    // the embedded vertices and each other.
    std::vector<char> blocked(state.n, 0);
    for (std::size_t x = 0; x < state.n; ++x)
        if (state.embedded[x]) block_ball(pattern.graph(), x, blocked);

    std::vector<char> chosen(state.n, 0);
    std::size_t total_chosen = 0;
    for (std::size_t i = 0; i < r; ++i) {
        if (pools[i].empty()) continue;
        std::vector<std::size_t> scan(pattern.class_members(i));
        shuffle(scan, state.rng);
        std::size_t need = pools[i].size();
        for (std::size_t x : scan) {
            if (need == 0) break;
            if (state.embedded[x] || state.is_buffer[x] || blocked[x]) continue;
            if (state.embedded_neighbors[x] != 0) continue;
            chosen[x] = 1;
            state.exception_level[x] = 2;
            block_ball(pattern.graph(), x, blocked);
            --need;
            ++total_chosen;
        }
        if (need > 0) {
            std::ostringstream ss;
            ss << "cannot place " << pools[i].size() << " buffer-starvation absorbers in cluster " << i;
            throw EmbedFailure(EmbedOutcome::phase1_stuck, ss.str());
        }
        state.host_exc2[i] = std::move(pools[i]);
        state.exc2_used[i].assign(state.host_exc2[i].size(), 0);
    }

    if (total_chosen > 0) bring_forward(state.order, state.time, chosen);
}

void detect_exceptional_pattern_vertices(EmbeddingState& state) {
    // free sizes of the whole unembedded suffix, grouped by cluster so the
    // scan runs as one kernel call per class
    std::vector<char> chosen(state.n, 0);
    std::size_t pulled = 0;
    const Rational threshold = state.cfg.d1 * state.cfg.d1;

    for (std::size_t i = 0; i < state.clusters; ++i) {
        std::vector<std::size_t> members;
        std::vector<const Bitset*> sets;
        for (std::size_t x : state.pattern->class_members(i)) {
            if (state.embedded[x]) continue;
            members.push_back(x);
            sets.push_back(&state.candidates[x]);
        }
        const auto sizes = kernels::difference_sizes(sets, state.occupied[i]);
        for (std::size_t k = 0; k < members.size(); ++k) {
            state.diag.min_free_set = std::min(state.diag.min_free_set, sizes[k]);
            if (threshold.scaled_at_least(static_cast<std::int64_t>(sizes[k]),
                                          static_cast<std::int64_t>(state.n))) {
                chosen[members[k]] = 1;
                ++pulled;
                if (state.is_buffer[members[k]]) ++state.diag.buffer_pulls;
            }
        }
    }
    if (pulled == 0) return;
    state.diag.starvation_pulls += pulled;
    if (state.time <= 2 * state.prefix_len) state.diag.early_pulls += pulled;
    bring_forward(state.order, state.time, chosen);
}

namespace {

struct ConditionContext {
    std::size_t y = 0;              // unembedded neighbor
    std::size_t cluster = 0;        // psi(y)
    Bitset free_set;                // its free candidates
    std::size_t free_size = 0;
    std::size_t cand_size = 0;
    Rational lo, hi;                // density window of the pair (psi(x), psi(y))
    std::vector<std::size_t> peers;      // eligible y' for the intersection condition
    std::vector<std::size_t> peer_inter; // |C_y ∩ C_y'|
};

bool within(const Rational& lo, const Rational& hi, std::int64_t deg, std::int64_t size) {
    // lo*size <= deg <= hi*size, exactly
    if (static_cast<__int128>(lo.num()) * size > static_cast<__int128>(deg) * lo.den()) return false;
    return static_cast<__int128>(deg) * hi.den() <= static_cast<__int128>(hi.num()) * size;
}

// 0 = valid, otherwise index of the violated condition
int evaluate_candidate(const EmbeddingState& state, const PartitionedHost& host, std::size_t ci,
                       std::size_t v, const std::vector<ConditionContext>& contexts,
                       std::vector<std::pair<std::size_t, std::size_t>>& fails) {
    fails.clear();
    for (const auto& ctx : contexts) {
        const Bitset& row = host.adjacency_row(ci, v, ctx.cluster);
        const std::int64_t deg_free = static_cast<std::int64_t>(Bitset::count_and(row, ctx.free_set));
        if (!within(ctx.lo, ctx.hi, deg_free, static_cast<std::int64_t>(ctx.free_size))) return 1;
        const std::int64_t deg_cand =
            static_cast<std::int64_t>(Bitset::count_and(row, state.candidates[ctx.y]));
        if (!within(ctx.lo, ctx.hi, deg_cand, static_cast<std::int64_t>(ctx.cand_size))) return 2;
        std::size_t bad_here = 0;
        const std::size_t mark = fails.size();
        for (std::size_t k = 0; k < ctx.peers.size(); ++k) {
            const std::int64_t deg3 = static_cast<std::int64_t>(
                Bitset::count_and(row, state.candidates[ctx.y], state.candidates[ctx.peers[k]]));
            if (!within(ctx.lo, ctx.hi, deg3, static_cast<std::int64_t>(ctx.peer_inter[k]))) {
                ++bad_here;
                fails.emplace_back(ctx.y, ctx.peers[k]);
            }
        }
        // tolerate at most an eps1 share of misbehaving intersections
        if (!state.cfg.eps1.scaled_at_least(static_cast<std::int64_t>(bad_here),
                                            static_cast<std::int64_t>(ctx.peers.size()))) {
            fails.resize(mark);
            return 3;
        }
    }
    return 0;
}

} // namespace

std::size_t select_image_regular(EmbeddingState& state, std::size_t x) {
    const Pattern& pattern = *state.pattern;
    const PartitionedHost& host = *state.host;
    const std::size_t ci = state.cluster_of(x);

    std::vector<std::size_t> free_offsets = state.free_set(x).to_indices();
    if (free_offsets.empty())
        throw EmbedFailure(EmbedOutcome::phase1_stuck,
                           "no free candidate for vertex " + std::to_string(x));

    // Per-neighbor data is candidate independent; hoist it out of the scan.
    std::vector<ConditionContext> contexts;
    pattern.graph().neighbors(x).for_each([&](std::size_t y) {
        if (state.embedded[y]) return;
        ConditionContext ctx;
        ctx.y = y;
        ctx.cluster = state.cluster_of(y);
        ctx.free_set = state.free_set(y);
        ctx.free_size = ctx.free_set.count();
        ctx.cand_size = state.candidates[y].count();
        const Rational& basis = state.basis(ci, ctx.cluster);
        ctx.lo = basis - state.cfg.eps;
        ctx.hi = basis + state.cfg.eps;
        for (std::size_t peer : pattern.class_members(ctx.cluster)) {
            if (state.embedded[peer]) continue;
            if (peer == ctx.y && !state.cfg.include_self_pairs) continue;
            if (state.bad_pair(ctx.y, peer)) continue;
            ctx.peers.push_back(peer);
            ctx.peer_inter.push_back(Bitset::count_and(state.candidates[ctx.y], state.candidates[peer]));
        }
        contexts.push_back(std::move(ctx));
    });

    std::size_t accepted = Bitset::npos;
    std::vector<std::pair<std::size_t, std::size_t>> accepted_fails;

    if (state.cfg.exhaustive_selection) {
        std::vector<int> verdicts(free_offsets.size(), -1);
        std::vector<std::vector<std::pair<std::size_t, std::size_t>>> all_fails(free_offsets.size());
#pragma omp parallel for schedule(dynamic, 8)
        for (std::int64_t k = 0; k < static_cast<std::int64_t>(free_offsets.size()); ++k)
            verdicts[k] = evaluate_candidate(state, host, ci, free_offsets[k], contexts, all_fails[k]);
        std::vector<std::size_t> winners;
        for (std::size_t k = 0; k < free_offsets.size(); ++k) {
            switch (verdicts[k]) {
                case 0: winners.push_back(k); break;
                case 1: ++state.diag.cond1_rejects; break;
                case 2: ++state.diag.cond2_rejects; break;
                default: ++state.diag.cond3_rejects; break;
            }
        }
        if (!winners.empty()) {
            std::size_t pick = winners[state.rng.below(winners.size())];
            accepted = free_offsets[pick];
            accepted_fails = std::move(all_fails[pick]);
        }
    } else {
        // a random scan order accepting the first valid candidate is a
        // uniform draw over the valid ones
        shuffle(free_offsets, state.rng);
        std::vector<std::pair<std::size_t, std::size_t>> fails;
        for (std::size_t v : free_offsets) {
            switch (evaluate_candidate(state, host, ci, v, contexts, fails)) {
                case 0: accepted = v; break;
                case 1: ++state.diag.cond1_rejects; break;
                case 2: ++state.diag.cond2_rejects; break;
                default: ++state.diag.cond3_rejects; break;
            }
            if (accepted != Bitset::npos) {
                accepted_fails = std::move(fails);
                break;
            }
        }
    }

    if (accepted == Bitset::npos) {
        std::ostringstream ss;
        ss << "selection failed for vertex " << x << " with " << free_offsets.size()
           << " candidates (cumulative rejects: free-degree " << state.diag.cond1_rejects
           << ", candidate-degree " << state.diag.cond2_rejects << ", intersection "
           << state.diag.cond3_rejects << ")";
        throw EmbedFailure(EmbedOutcome::phase1_stuck, ss.str());
    }

    std::size_t added = 0;
    for (auto [a, b] : accepted_fails) {
        if (!state.bad_pair(a, b)) ++added;
        state.add_bad_pair(a, b);
    }
    state.diag.bad_added_max_step = std::max(state.diag.bad_added_max_step, added);
    const std::int64_t cap = static_cast<std::int64_t>(state.cfg.max_degree) *
                             static_cast<std::int64_t>(state.class_size);
    if (!state.cfg.eps1.scaled_at_least(static_cast<std::int64_t>(added), cap))
        ++state.diag.bad_growth_violations;
    return accepted;
}

std::size_t select_image_exceptional(EmbeddingState& state, std::size_t x) {
    const std::size_t ci = state.cluster_of(x);
    const int level = state.exception_level[x];
    auto& pool = level == 1 ? state.host_exc1[ci] : state.host_exc2[ci];
    auto& used = level == 1 ? state.exc1_used[ci] : state.exc2_used[ci];

    bool any_unconsumed = false;
    for (std::size_t k = 0; k < pool.size(); ++k) {
        if (used[k]) continue;
        const std::size_t v = pool[k];
        if (state.occupied[ci].test(v)) {
            // stolen by an ordinary selection in the meantime
            used[k] = 1;
            ++state.diag.case2_skipped_covered;
            continue;
        }
        any_unconsumed = true;
        if (!state.candidates[x].test(v)) continue; // inconsistent with x's embedded neighbors
        used[k] = 1;
        ++state.diag.case2_count;

        // post-conditions, recorded not enforced: near-full degree into every
        // unembedded neighbor's candidate set, and the free-set slack bound
        std::size_t exc_total = 0;
        for (std::size_t c = 0; c < state.clusters; ++c)
            exc_total += state.host_exc1[c].size() + state.host_exc2[c].size();
        state.pattern->graph().neighbors(x).for_each([&](std::size_t y) {
            if (state.embedded[y]) return;
            const std::size_t cy = state.cluster_of(y);
            const Bitset& row = state.host->adjacency_row(ci, v, cy);
            const std::int64_t deg_cand =
                static_cast<std::int64_t>(Bitset::count_and(row, state.candidates[y]));
            if (state.cfg.delta.scaled_above(deg_cand, static_cast<std::int64_t>(state.class_size)))
                ++state.diag.case2_postcondition_failures;
            const std::int64_t deg_free =
                static_cast<std::int64_t>(Bitset::count_and(row, state.free_set(y)));
            const std::int64_t floor =
                ceil_scaled(state.cfg.delta, static_cast<std::int64_t>(state.class_size)) -
                static_cast<std::int64_t>(state.prefix_len) - static_cast<std::int64_t>(exc_total);
            state.diag.case2_min_slack = std::min(state.diag.case2_min_slack, deg_free - floor);
        });
        return v;
    }

    if (!any_unconsumed && state.diag.case2_skipped_covered == 0)
        throw std::logic_error("exceptional pool exhausted: absorber/pool count mismatch");
    throw EmbedFailure(EmbedOutcome::phase1_stuck,
                       "no usable exceptional host left for vertex " + std::to_string(x));
}

void embed_vertex(EmbeddingState& state, std::size_t x, std::size_t offset) {
    const std::size_t ci = state.cluster_of(x);
    if (state.embedded[x]) throw std::logic_error("embed_vertex: vertex already embedded");
    if (state.occupied[ci].test(offset)) throw std::logic_error("embed_vertex: host already occupied");
    state.image[x] = static_cast<std::int64_t>(state.host->global(ci, offset));
    state.occupied[ci].set(offset);
    state.embedded[x] = 1;
    if (!state.is_buffer[x]) --state.nonbuffer_unembedded;
    state.pattern->graph().neighbors(x).for_each([&](std::size_t y) {
        if (state.embedded[y]) return;
        state.candidates[y] &= state.host->adjacency_row(ci, offset, state.cluster_of(y));
        ++state.embedded_neighbors[y];
    });
}

void run_phase1(EmbeddingState& state) {
    if (state.prefix_len == 0) detect_exceptional_hosts_buffer_starved(state);

    while (state.nonbuffer_unembedded > 0) {
        const std::size_t x = state.order[state.time];
        state.diag.min_free_set = std::min(state.diag.min_free_set, state.free_size(x));
        const std::size_t offset = state.exception_level[x] != 0
                                       ? select_image_exceptional(state, x)
                                       : select_image_regular(state, x);
        embed_vertex(state, x, offset);
        ++state.time;

        if (state.time == state.prefix_len) detect_exceptional_hosts_buffer_starved(state);
        if (state.time % state.reorder_period == 0) detect_exceptional_pattern_vertices(state);
        if (sample_step(state.time, state.cfg.invariant_sample_percent)) {
            validate_state(state);
            ++state.diag.invariant_checks;
        }
    }
    state.phase1_end = state.time;
    state.diag.phase1_steps = state.time;

    if (state.diag.min_free_set != Bitset::npos &&
        state.cfg.d2.scaled_at_least(static_cast<std::int64_t>(state.diag.min_free_set),
                                     static_cast<std::int64_t>(state.class_size)))
        state.diag.min_free_above_floor = false;

    std::size_t min_uncovered = Bitset::npos;
    for (std::size_t i = 0; i < state.clusters; ++i)
        min_uncovered = std::min(min_uncovered, state.class_size - state.occupied[i].count());
    state.diag.min_uncovered_at_end = min_uncovered;
    const Rational uncovered_floor = state.cfg.d1 - state.cfg.d2;
    state.diag.uncovered_bound_ok = !uncovered_floor.scaled_above(
        static_cast<std::int64_t>(min_uncovered), static_cast<std::int64_t>(state.class_size));
}

namespace {

// Union condition behind the matching stage: every left subset of size at
// least d3*M must cover at least (1-d3)*M hosts. Exhaustive for small M,
// sampled otherwise.
bool check_union_condition(const std::vector<Bitset>& sets, std::size_t M, const Rational& d3,
                           std::uint64_t seed, bool& exhaustive) {
    if (sets.empty()) return true;
    const std::int64_t min_size =
        std::max<std::int64_t>(1, ceil_scaled(d3, static_cast<std::int64_t>(M)));
    const std::int64_t union_floor =
        static_cast<std::int64_t>(M) - ceil_scaled(d3, static_cast<std::int64_t>(M));
    exhaustive = sets.size() <= 15;
    if (exhaustive) {
        const std::size_t total = std::size_t{1} << sets.size();
        std::vector<Bitset> unions(total, Bitset(M));
        for (std::size_t mask = 1; mask < total; ++mask) {
            const std::size_t low = static_cast<std::size_t>(std::countr_zero(mask));
            unions[mask] = unions[mask & (mask - 1)] | sets[low];
            if (std::popcount(mask) >= min_size &&
                static_cast<std::int64_t>(unions[mask].count()) < union_floor)
                return false;
        }
        return true;
    }
    Rng rng(fork_seed(seed, 0x60213ULL));
    for (int trial = 0; trial < 512; ++trial) {
        const std::size_t size = static_cast<std::size_t>(min_size) +
                                 rng.below(sets.size() - static_cast<std::size_t>(min_size) + 1);
        Bitset joint(M);
        for (std::size_t k : sample_subset(sets.size(), size, rng)) joint |= sets[k];
        if (static_cast<std::int64_t>(joint.count()) < union_floor) return false;
    }
    return true;
}

} // namespace

void run_phase2(EmbeddingState& state) {
    for (std::size_t i = 0; i < state.clusters; ++i) {
        std::vector<std::size_t> lefts;
        for (std::size_t x : state.pattern->class_members(i))
            if (!state.embedded[x]) lefts.push_back(x);
        std::vector<std::size_t> rights;
        for (std::size_t v = 0; v < state.class_size; ++v)
            if (!state.occupied[i].test(v)) rights.push_back(v);
        if (lefts.size() != rights.size())
            throw std::logic_error("phase 2: non-square matching instance");
        if (lefts.empty()) continue;

        std::vector<std::size_t> right_index(state.class_size, Bitset::npos);
        for (std::size_t k = 0; k < rights.size(); ++k) right_index[rights[k]] = k;

        const std::size_t M = lefts.size();
        BipartiteInstance inst(M, M);
        for (std::size_t l = 0; l < M; ++l)
            state.free_set(lefts[l]).for_each([&](std::size_t v) { inst.edges[l].set(right_index[v]); });

        Phase2ClusterStats stats;
        stats.cluster = i;
        stats.size = M;
        stats.min_free = Bitset::npos;
        std::vector<std::uint32_t> cover(M, 0);
        for (std::size_t l = 0; l < M; ++l) {
            stats.min_free = std::min(stats.min_free, inst.edges[l].count());
            inst.edges[l].for_each([&](std::size_t rk) { ++cover[rk]; });
            if (state.cfg.d3.scaled_at_least(static_cast<std::int64_t>(inst.edges[l].count()),
                                             static_cast<std::int64_t>(M)))
                stats.konig1_ok = false; // needs strict |H_y| > d3*M
        }
        stats.min_cover = *std::min_element(cover.begin(), cover.end());
        for (std::uint32_t c : cover)
            if (state.cfg.d3.scaled_above(static_cast<std::int64_t>(c), static_cast<std::int64_t>(M)))
                stats.konig3_ok = false; // every host in at least d3*M free sets
        stats.konig2_ok =
            check_union_condition(inst.edges, M, state.cfg.d3, state.cfg.seed + i, stats.konig2_exhaustive);

        auto outcome = perfect_or_violator(inst);
        if (!outcome.matching) {
            for (std::size_t l : outcome.violator) stats.violator.push_back(lefts[l]);
            state.diag.phase2.push_back(stats);
            std::ostringstream ss;
            ss << "Hall violator of size " << outcome.violator.size() << " in cluster " << i;
            throw EmbedFailure(EmbedOutcome::phase2_hall_failure, ss.str());
        }
        for (auto [l, rk] : *outcome.matching) {
            const std::size_t x = lefts[l];
            const std::size_t offset = rights[rk];
            state.image[x] = static_cast<std::int64_t>(state.host->global(i, offset));
            state.occupied[i].set(offset);
            state.embedded[x] = 1;
        }
        state.diag.phase2.push_back(stats);
    }
    state.diag.bad_pairs_final = state.bad_pairs.size();
}

void validate_state(const EmbeddingState& state) {
    std::size_t occupied_total = 0;
    for (const auto& z : state.occupied) occupied_total += z.count();
    if (occupied_total != state.time) throw std::logic_error("state check: |Z| != t");

    for (std::size_t y = 0; y < state.n; ++y) {
        if (state.embedded[y]) continue;
        Bitset expect = Bitset::all_set(state.class_size);
        std::uint32_t nu = 0;
        state.pattern->graph().neighbors(y).for_each([&](std::size_t x) {
            if (!state.embedded[x]) return;
            ++nu;
            expect &= state.host->adjacency_row(
                state.cluster_of(x), state.host->offset_of(static_cast<std::size_t>(state.image[x])),
                state.cluster_of(y));
        });
        if (nu != state.embedded_neighbors[y])
            throw std::logic_error("state check: embedded-neighbor counter drift");
        if (!(expect == state.candidates[y]))
            throw std::logic_error("state check: candidate set differs from scratch recomputation");
        const Bitset free = difference(expect, state.occupied[state.cluster_of(y)]);
        if (!(free == state.free_set(y)))
            throw std::logic_error("state check: free set is not candidates minus occupied");
    }
}

VerifyReport verify_embedding(const Pattern& pattern, const PartitionedHost& host,
                              const std::vector<std::int64_t>& image) {
    VerifyReport report;
    constexpr std::size_t kSampleCap = 10;
    const std::size_t n = pattern.graph().vertex_count();
    if (image.size() != n) {
        report.total = false;
        report.samples.push_back("image has wrong arity");
        return report;
    }
    report.total = true;
    for (std::size_t x = 0; x < n; ++x) {
        if (image[x] < 0 || static_cast<std::size_t>(image[x]) >= host.vertex_count()) {
            report.total = false;
            if (report.samples.size() < kSampleCap)
                report.samples.push_back("vertex " + std::to_string(x) + " unassigned or out of range");
        }
    }
    if (!report.total) return report;

    std::vector<char> seen(host.vertex_count(), 0);
    std::size_t injectivity_logged = 0, cluster_logged = 0, edge_logged = 0;
    for (std::size_t x = 0; x < n; ++x) {
        const std::size_t v = static_cast<std::size_t>(image[x]);
        if (seen[v]) {
            ++report.injectivity_violations;
            if (injectivity_logged++ < kSampleCap)
                report.samples.push_back("duplicate image " + std::to_string(v));
        }
        seen[v] = 1;
        if (host.cluster_of(v) != pattern.cluster_of(x)) {
            ++report.cluster_violations;
            if (cluster_logged++ < kSampleCap)
                report.samples.push_back("vertex " + std::to_string(x) + " lands outside its class");
        }
    }
    for (auto [x, y] : pattern.graph().edges()) {
        if (!host.has_edge(static_cast<std::size_t>(image[x]), static_cast<std::size_t>(image[y]))) {
            ++report.edge_violations;
            if (edge_logged++ < kSampleCap)
                report.samples.push_back("edge {" + std::to_string(x) + "," + std::to_string(y) +
                                         "} not preserved");
        }
    }
    return report;
}

EmbeddingReport embed(const Pattern& pattern, const PartitionedHost& host, const EmbedConfig& cfg) {
    using clock = std::chrono::steady_clock;
    const auto t0 = clock::now();
    auto ms = [](clock::time_point a, clock::time_point b) {
        return std::chrono::duration<double, std::milli>(b - a).count();
    };

    EmbeddingReport report;
    report.seed = cfg.seed;
    report.cascade = compute_cascade(cfg.d, cfg.delta,
                                     cfg.max_degree > 0
                                         ? cfg.max_degree
                                         : static_cast<int>(std::max<std::size_t>(
                                               pattern.graph().max_degree(), 1)),
                                     host.cluster_count(), cfg.explicit_overrides);

    const Pattern* effective = &pattern;
    std::optional<Pattern> padded;
    const std::size_t original_n = pattern.graph().vertex_count();
    if (!cfg.strict_balance) {
        padded = pad_to_balance(pattern, host.class_size(), host.reduced());
        effective = &*padded;
    }

    std::unique_ptr<EmbeddingState> state;
    try {
        state = std::make_unique<EmbeddingState>(make_state(*effective, host, cfg));
        state->diag.padded_vertices = effective->graph().vertex_count() - original_n;
        const auto t1 = clock::now();
        run_phase1(*state);
        const auto t2 = clock::now();
        run_phase2(*state);
        const auto t3 = clock::now();
        report.phase1_ms = ms(t1, t2);
        report.phase2_ms = ms(t2, t3);
        report.outcome = EmbedOutcome::success;
        report.diagnostics = state->diag;
        report.image.assign(state->image.begin(),
                            state->image.begin() + static_cast<std::ptrdiff_t>(original_n));
    } catch (const EmbedFailure& failure) {
        report.outcome = failure.outcome;
        report.detail = failure.what();
        if (state) report.diagnostics = state->diag;
        report.total_ms = ms(t0, clock::now());
        return report;
    }

    report.verification = verify_embedding(pattern, host, report.image);
    report.verified = report.verification.ok();
    if (!report.verified)
        throw std::logic_error("embed: algorithm reported success but the verifier rejected the embedding");
    report.total_ms = ms(t0, clock::now());
    return report;
}

} // namespace blowup

#include "blowup/regularity.hpp"

#include <atomic>
#include <bit>

#include "blowup/kernels.hpp"
#include "blowup/rng.hpp"

namespace blowup {

namespace {

// ceil(frac * scale) for a nonnegative rational
std::int64_t ceil_scaled(const Rational& frac, std::int64_t scale) {
    __int128 num = static_cast<__int128>(frac.num()) * scale;
    __int128 den = frac.den();
    return static_cast<std::int64_t>((num + den - 1) / den);
}

// |e_sub * na * nb - E * x * y| >= eps * x * y * na * nb, exactly
bool deviation_at_least(std::int64_t e_sub, std::int64_t x, std::int64_t y, std::int64_t E,
                        std::int64_t na, std::int64_t nb, const Rational& eps) {
    __int128 lhs = static_cast<__int128>(e_sub) * na * nb - static_cast<__int128>(E) * x * y;
    if (lhs < 0) lhs = -lhs;
    __int128 rhs = static_cast<__int128>(eps.num()) * x * y * na * nb;
    return lhs * eps.den() >= rhs;
}

Bitset mask_to_bitset(std::uint64_t mask, std::size_t universe) {
    Bitset b(universe);
    while (mask) {
        b.set(static_cast<std::size_t>(std::countr_zero(mask)));
        mask &= mask - 1;
    }
    return b;
}

struct ExactHit {
    std::uint64_t x_mask = ~std::uint64_t{0};
    std::uint64_t step = ~std::uint64_t{0};
    std::uint64_t y_mask = 0;
    std::int64_t e_sub = 0;

    bool beats(const ExactHit& o) const {
        return x_mask < o.x_mask || (x_mask == o.x_mask && step < o.step);
    }
    bool found() const { return x_mask != ~std::uint64_t{0}; }
};

// Scans all Y subsets for one fixed X via gray-code edge-count updates.
ExactHit scan_y_subsets(std::uint64_t x_mask, const std::vector<std::int64_t>& col_counts,
                        std::int64_t x_size, std::int64_t y_min, std::int64_t E, std::int64_t na,
                        std::int64_t nb, const Rational& eps) {
    ExactHit hit;
    const std::uint64_t y_total = std::uint64_t{1} << nb;
    std::uint64_t y_mask = 0;
    std::int64_t e_sub = 0, y_size = 0;
    for (std::uint64_t g = 1; g < y_total; ++g) {
        const int bit = std::countr_zero(g);
        const std::uint64_t flip = std::uint64_t{1} << bit;
        if (y_mask & flip) {
            e_sub -= col_counts[bit];
            --y_size;
        } else {
            e_sub += col_counts[bit];
            ++y_size;
        }
        y_mask ^= flip;
        if (y_size < y_min) continue;
        if (deviation_at_least(e_sub, x_size, y_size, E, na, nb, eps)) {
            hit = {x_mask, g, y_mask, e_sub};
            return hit;
        }
    }
    return hit;
}

} // namespace

BipartitePair BipartitePair::from_rows(std::vector<Bitset> rows_a, std::size_t right_size) {
    BipartitePair p;
    p.rows_b.assign(right_size, Bitset(rows_a.size()));
    for (std::size_t a = 0; a < rows_a.size(); ++a) {
        if (rows_a[a].universe() != right_size)
            throw std::invalid_argument("BipartitePair: row universe mismatch");
        rows_a[a].for_each([&](std::size_t b) { p.rows_b[b].set(a); });
    }
    p.rows_a = std::move(rows_a);
    return p;
}

BipartitePair BipartitePair::from_host(const PartitionedHost& host, std::size_t i, std::size_t j) {
    BipartitePair p;
    p.rows_a = host.pair_rows(i, j);
    p.rows_b = host.pair_rows(j, i);
    return p;
}

std::int64_t BipartitePair::edge_count() const { return kernels::total_edges(rows_a); }

Rational BipartitePair::density() const {
    if (rows_a.empty() || rows_b.empty()) return Rational(0);
    return Rational(edge_count(), static_cast<std::int64_t>(left_size() * right_size()));
}

RegularityVerdict check_regular_exact(const BipartitePair& pair, const Rational& eps,
                                      std::size_t side_limit) {
    const std::size_t na = pair.left_size(), nb = pair.right_size();
    if (na > side_limit || nb > side_limit)
        throw CapabilityError("check_regular_exact: side exceeds exhaustive limit, use the sampled checker");

    RegularityVerdict verdict;
    verdict.status = RegStatus::regular_certified;
    if (na == 0 || nb == 0) return verdict;

    const std::int64_t E = pair.edge_count();
    const std::int64_t x_min = ceil_scaled(eps, static_cast<std::int64_t>(na)) + 1; // strict |X| > eps|A|
    const std::int64_t y_min = ceil_scaled(eps, static_cast<std::int64_t>(nb)) + 1;
    if (x_min > static_cast<std::int64_t>(na) || y_min > static_cast<std::int64_t>(nb)) return verdict;

    const std::uint64_t x_total = std::uint64_t{1} << na;
    ExactHit best;
    std::atomic<std::uint64_t> bound{~std::uint64_t{0}};

#pragma omp parallel
    {
        ExactHit local;
#pragma omp for schedule(dynamic, 256) nowait
        for (std::int64_t xm = 1; xm < static_cast<std::int64_t>(x_total); ++xm) {
            const std::uint64_t x_mask = static_cast<std::uint64_t>(xm);
            if (x_mask >= bound.load(std::memory_order_relaxed)) continue;
            const std::int64_t x_size = std::popcount(x_mask);
            if (x_size < x_min) continue;
            std::vector<std::int64_t> col_counts(nb);
            for (std::size_t b = 0; b < nb; ++b) {
                std::int64_t c = 0;
                pair.rows_b[b].for_each([&](std::size_t a) { c += (x_mask >> a) & 1; });
                col_counts[b] = c;
            }
            ExactHit hit = scan_y_subsets(x_mask, col_counts, x_size, y_min, E,
                                          static_cast<std::int64_t>(na), static_cast<std::int64_t>(nb), eps);
            if (hit.found() && hit.beats(local)) {
                local = hit;
                std::uint64_t seen = bound.load(std::memory_order_relaxed);
                while (seen > hit.x_mask &&
                       !bound.compare_exchange_weak(seen, hit.x_mask, std::memory_order_relaxed)) {
                }
            }
        }
#pragma omp critical(blowup_reg_exact)
        if (local.found() && local.beats(best)) best = local;
    }

    if (best.found()) {
        verdict.status = RegStatus::irregular_witnessed;
        RegularityWitness w;
        w.X = mask_to_bitset(best.x_mask, na);
        w.Y = mask_to_bitset(best.y_mask, nb);
        w.subset_density = Rational(best.e_sub, static_cast<std::int64_t>(w.X.count() * w.Y.count()));
        w.pair_density = pair.density();
        verdict.witness = std::move(w);
    }
    return verdict;
}

RegularityVerdict check_regular_sampled(const BipartitePair& pair, const Rational& eps,
                                        std::uint64_t trials, std::uint64_t seed) {
    const std::size_t na = pair.left_size(), nb = pair.right_size();
    RegularityVerdict verdict;
    verdict.trials = trials;
    if (na == 0 || nb == 0) return verdict;

    const std::int64_t E = pair.edge_count();
    const std::int64_t x_min = ceil_scaled(eps, static_cast<std::int64_t>(na)) + 1;
    const std::int64_t y_min = ceil_scaled(eps, static_cast<std::int64_t>(nb)) + 1;
    if (x_min > static_cast<std::int64_t>(na) || y_min > static_cast<std::int64_t>(nb)) return verdict;

    struct Hit {
        std::uint64_t trial;
        RegularityWitness witness;
    };
    std::optional<Hit> best;
    std::atomic<std::uint64_t> bound{~std::uint64_t{0}};

#pragma omp parallel
    {
        std::optional<Hit> local;
#pragma omp for schedule(dynamic, 64) nowait
        for (std::int64_t t = 0; t < static_cast<std::int64_t>(trials); ++t) {
            if (static_cast<std::uint64_t>(t) >= bound.load(std::memory_order_relaxed)) continue;
            Rng rng(fork_seed(seed, static_cast<std::uint64_t>(t)));
            const std::int64_t x_size =
                x_min + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(na - x_min + 1)));
            const std::int64_t y_size =
                y_min + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(nb - y_min + 1)));
            auto xs = sample_subset(na, static_cast<std::size_t>(x_size), rng);
            auto ys = sample_subset(nb, static_cast<std::size_t>(y_size), rng);
            Bitset Y(nb);
            for (auto b : ys) Y.set(b);
            std::int64_t e_sub = 0;
            for (auto a : xs) e_sub += static_cast<std::int64_t>(Bitset::count_and(pair.rows_a[a], Y));
            if (!deviation_at_least(e_sub, x_size, y_size, E, static_cast<std::int64_t>(na),
                                    static_cast<std::int64_t>(nb), eps))
                continue;
            if (!local || static_cast<std::uint64_t>(t) < local->trial) {
                Bitset X(na);
                for (auto a : xs) X.set(a);
                RegularityWitness w;
                w.X = std::move(X);
                w.Y = std::move(Y);
                w.subset_density = Rational(e_sub, x_size * y_size);
                w.pair_density = pair.density();
                local = Hit{static_cast<std::uint64_t>(t), std::move(w)};
                std::uint64_t seen = bound.load(std::memory_order_relaxed);
                while (seen > local->trial &&
                       !bound.compare_exchange_weak(seen, local->trial, std::memory_order_relaxed)) {
                }
            }
        }
#pragma omp critical(blowup_reg_sampled)
        if (local && (!best || local->trial < best->trial)) best = std::move(local);
    }

    if (best) {
        verdict.status = RegStatus::irregular_witnessed;
        verdict.witness = std::move(best->witness);
    }
    return verdict;
}

bool witness_is_valid(const BipartitePair& pair, const Rational& eps, const RegularityWitness& w) {
    const std::int64_t na = static_cast<std::int64_t>(pair.left_size());
    const std::int64_t nb = static_cast<std::int64_t>(pair.right_size());
    const std::int64_t x = static_cast<std::int64_t>(w.X.count());
    const std::int64_t y = static_cast<std::int64_t>(w.Y.count());
    if (x == 0 || y == 0) return false;
    // strict size thresholds
    if (static_cast<__int128>(x) * eps.den() <= static_cast<__int128>(eps.num()) * na) return false;
    if (static_cast<__int128>(y) * eps.den() <= static_cast<__int128>(eps.num()) * nb) return false;
    std::int64_t e_sub = 0;
    w.X.for_each([&](std::size_t a) { e_sub += static_cast<std::int64_t>(Bitset::count_and(pair.rows_a[a], w.Y)); });
    return deviation_at_least(e_sub, x, y, pair.edge_count(), na, nb, eps);
}

SuperRegularityReport check_super_regular(const BipartitePair& pair, const Rational& eps,
                                          const Rational& d, const Rational& delta,
                                          std::uint64_t trials, std::uint64_t seed,
                                          std::size_t side_limit) {
    SuperRegularityReport report;
    report.density = pair.density();
    report.density_at_least_d = !(report.density < d);

    auto [min_a, arg_a] = kernels::min_degree(pair.rows_a);
    auto [min_b, arg_b] = kernels::min_degree(pair.rows_b);
    report.min_deg_a = min_a == Bitset::npos ? 0 : min_a;
    report.min_deg_b = min_b == Bitset::npos ? 0 : min_b;
    // deg(a) >= delta|B| for all a, exactly
    report.degree_ok_a = !delta.scaled_above(static_cast<std::int64_t>(report.min_deg_a),
                                             static_cast<std::int64_t>(pair.right_size()));
    report.degree_ok_b = !delta.scaled_above(static_cast<std::int64_t>(report.min_deg_b),
                                             static_cast<std::int64_t>(pair.left_size()));
    if (!report.degree_ok_a) report.offender_a = arg_a;
    if (!report.degree_ok_b) report.offender_b = arg_b;

    if (pair.left_size() <= side_limit && pair.right_size() <= side_limit)
        report.regularity = check_regular_exact(pair, eps, side_limit);
    else
        report.regularity = check_regular_sampled(pair, eps, trials, seed);
    return report;
}

std::vector<std::size_t> list_low_degree_vertices(const PartitionedHost& host, std::size_t i,
                                                  std::size_t j, const Rational& threshold_fraction) {
    return kernels::low_degree_offsets(host.pair_rows(i, j), threshold_fraction,
                                       static_cast<std::int64_t>(host.class_size()));
}

} // namespace blowup

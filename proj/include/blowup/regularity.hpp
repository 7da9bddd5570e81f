#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "blowup/bitset.hpp"
#include "blowup/graph.hpp"
#include "blowup/rational.hpp"

namespace blowup {

/// One bipartite pair (A, B) with adjacency rows in both directions.
struct BipartitePair {
    std::vector<Bitset> rows_a;    // per a in A, neighbors in B
    std::vector<Bitset> rows_b;    // per b in B, neighbors in A

    static BipartitePair from_rows(std::vector<Bitset> rows_a, std::size_t right_size);
    static BipartitePair from_host(const PartitionedHost& host, std::size_t i, std::size_t j);

    std::size_t left_size() const { return rows_a.size(); }
    std::size_t right_size() const { return rows_b.size(); }
    std::int64_t edge_count() const;
    Rational density() const;
};

enum class RegStatus { regular_certified, irregular_witnessed, no_witness_found };

struct RegularityWitness {
    Bitset X, Y;          // subsets of A and B
    Rational subset_density;
    Rational pair_density;
};

struct RegularityVerdict {
    RegStatus status = RegStatus::no_witness_found;
    std::optional<RegularityWitness> witness;
    std::uint64_t trials = 0;

    bool witnessed() const { return status == RegStatus::irregular_witnessed; }
};

/// Raised when a pair is too large for the exhaustive checker.
class CapabilityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kExhaustiveSideLimit = 14;

/// Enumerates every subset pair above the size thresholds; returns
/// regular_certified or irregular_witnessed. Deterministic: the witness is
/// the first one in (X-mask, gray-step) order.
RegularityVerdict check_regular_exact(const BipartitePair& pair, const Rational& eps,
                                      std::size_t side_limit = kExhaustiveSideLimit);

/// Random subset-pair probing; one-sided (no_witness_found is not a
/// certificate). Identical (pair, eps, trials, seed) give identical verdicts
/// regardless of thread count.
RegularityVerdict check_regular_sampled(const BipartitePair& pair, const Rational& eps,
                                        std::uint64_t trials, std::uint64_t seed);

/// Re-derives the witness conditions from scratch: |X| > eps|A|,
/// |Y| > eps|B|, |d(X,Y) - d(A,B)| >= eps.
bool witness_is_valid(const BipartitePair& pair, const Rational& eps, const RegularityWitness& w);

struct SuperRegularityReport {
    bool degree_ok_a = false, degree_ok_b = false;
    std::size_t min_deg_a = 0, min_deg_b = 0;
    std::size_t offender_a = Bitset::npos, offender_b = Bitset::npos;
    Rational density;
    bool density_at_least_d = false;
    RegularityVerdict regularity;

    bool all_ok() const {
        return degree_ok_a && degree_ok_b && density_at_least_d &&
               regularity.status != RegStatus::irregular_witnessed;
    }
};

/// Exact min-degree checks plus a regularity sub-verdict (exhaustive when the
/// pair fits under side_limit, sampled otherwise).
SuperRegularityReport check_super_regular(const BipartitePair& pair, const Rational& eps,
                                          const Rational& d, const Rational& delta,
                                          std::uint64_t trials = 2000, std::uint64_t seed = 0,
                                          std::size_t side_limit = kExhaustiveSideLimit);

/// All offsets v in V_i with deg(v, V_j) < threshold_fraction * N, ascending.
std::vector<std::size_t> list_low_degree_vertices(const PartitionedHost& host, std::size_t i,
                                                  std::size_t j, const Rational& threshold_fraction);

} // namespace blowup

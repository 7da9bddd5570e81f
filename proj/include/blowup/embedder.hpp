#pragma once

#include <cstdint>
#include <string>
#include <unordered_set>
#include <vector>

#include "blowup/cascade.hpp"
#include "blowup/graph.hpp"
#include "blowup/rational.hpp"
#include "blowup/rng.hpp"

namespace blowup {

enum class EmbedOutcome { success, phase1_stuck, phase2_hall_failure, preprocessing_failure };

const char* outcome_name(EmbedOutcome outcome);

/// Thrown by the phase runners; embed() converts it into a report.
class EmbedFailure : public std::runtime_error {
public:
    EmbedFailure(EmbedOutcome outcome, const std::string& detail)
        : std::runtime_error(detail), outcome(outcome) {}
    EmbedOutcome outcome;
};

struct EmbedConfig {
    std::uint64_t seed = 0;
    bool strict_balance = true;        // lenient mode pads the pattern with isolated vertices
    bool exhaustive_selection = false; // score every candidate instead of first-fit in random order
    bool use_measured_density = true;  // selection thresholds center on the measured pair density
    bool include_self_pairs = false;   // count y'=y in the intersection-condition denominator
    int invariant_sample_percent = 0;  // from-scratch state re-checks on this share of steps
    int max_degree = 0;                // 0: take the pattern's actual max degree

    Rational d{1, 2};
    Rational delta{1, 2};

    // Effective tolerance tower. Desk-scale instances cannot run on the
    // paper-exact values (they underflow any representable scale), so the
    // embedder always executes on these; compute_cascade reports the exact
    // tower alongside.
    Rational d1{1, 10};
    Rational d2{1, 500};
    Rational d3{1, 1000};
    Rational eps3{1, 10};
    Rational eps2{1, 20};
    Rational eps1{1, 2};
    Rational eps{2, 25};
    DerivedValues explicit_overrides;  // echoed into the report

    static EmbedConfig practical(const Rational& d, const Rational& delta, std::uint64_t seed);
};

struct Phase2ClusterStats {
    std::size_t cluster = 0;
    std::size_t size = 0;              // M, lefts = rights
    std::size_t min_free = 0;          // min |H_y| over the cluster's lefts
    bool konig1_ok = true;             // every |H_y| > d3*M
    std::size_t min_cover = 0;         // min over hosts of #sets containing it
    bool konig3_ok = true;             // every host covered by >= d3*M sets
    bool konig2_ok = true;             // unions of large left-subsets nearly exhaust the hosts
    bool konig2_exhaustive = false;
    std::vector<std::size_t> violator; // pattern vertices of a Hall violator, if any
};

struct EmbedDiagnostics {
    std::vector<std::size_t> exc1_sizes, exc2_sizes;   // per cluster
    bool exc1_within_paper_bound = true;               // |E1_i| <= r*eps*N
    bool exc2_within_paper_bound = true;               // |E2_i| <= eps2*N
    std::size_t min_free_set = Bitset::npos;           // min |H_{t,y}| observed
    bool min_free_above_floor = true;                  // > d2*N (paper-regime bound)
    std::size_t min_uncovered_at_end = 0;              // min_i |V_i \ Z_T|
    bool uncovered_bound_ok = true;                    // >= (d1-d2)*N
    std::size_t bad_pairs_final = 0;
    std::size_t bad_added_max_step = 0;
    std::size_t bad_growth_violations = 0;             // steps exceeding max_degree*eps1*N
    std::size_t case2_count = 0;
    std::size_t case2_skipped_covered = 0;
    std::size_t case2_postcondition_failures = 0;
    std::int64_t case2_min_slack = INT64_MAX;          // deg(v, H_y) - (delta*N - T0 - |E_H|)
    std::size_t starvation_pulls = 0;                  // vertices brought forward on small free sets
    std::size_t buffer_pulls = 0;
    std::size_t early_pulls = 0;                       // pulls at t <= 2*T0
    std::size_t cond1_rejects = 0, cond2_rejects = 0, cond3_rejects = 0;
    std::size_t invariant_checks = 0;
    std::size_t phase1_steps = 0;                      // T
    std::size_t prefix_len = 0;                        // T0 after the low-degree pass
    std::size_t padded_vertices = 0;
    std::vector<Phase2ClusterStats> phase2;
};

struct VerifyReport {
    bool total = false;
    std::size_t injectivity_violations = 0;
    std::size_t cluster_violations = 0;
    std::size_t edge_violations = 0;
    std::vector<std::string> samples;  // first few violations of each kind

    bool ok() const {
        return total && injectivity_violations == 0 && cluster_violations == 0 && edge_violations == 0;
    }
};

struct EmbeddingReport {
    EmbedOutcome outcome = EmbedOutcome::preprocessing_failure;
    std::string detail;
    std::vector<std::int64_t> image;   // -1 where unassigned
    ParameterCascade cascade;
    EmbedDiagnostics diagnostics;
    VerifyReport verification;
    bool verified = false;
    double phase1_ms = 0.0, phase2_ms = 0.0, total_ms = 0.0;
    std::uint64_t seed = 0;

    bool success() const { return outcome == EmbedOutcome::success; }
};

/// Mutable run state. Exposed so tests can drive the passes directly and
/// poke candidate sets; a single run is strictly sequential.
struct EmbeddingState {
    const Pattern* pattern = nullptr;
    const PartitionedHost* host = nullptr;
    EmbedConfig cfg;
    std::size_t n = 0, class_size = 0, clusters = 0;

    std::vector<std::size_t> order;                 // S; the first `time` entries are embedded
    std::size_t time = 0;                           // t
    std::vector<std::int64_t> image;                // phi, -1 = unassigned
    std::vector<Bitset> occupied;                   // Z, per cluster
    std::vector<Bitset> candidates;                 // C, per pattern vertex (offset universe)
    std::vector<std::uint32_t> embedded_neighbors;  // per pattern vertex
    std::vector<char> embedded;
    std::vector<char> is_buffer;
    std::vector<char> exception_level;              // 0 none, 1, 2
    std::vector<std::vector<std::size_t>> buffers;  // per cluster
    std::vector<std::vector<std::size_t>> host_exc1, host_exc2;  // per-cluster offset pools
    std::vector<std::vector<char>> exc1_used, exc2_used;
    std::unordered_set<std::uint64_t> bad_pairs;
    std::vector<Rational> density_basis;            // per directed cluster pair (r*r)
    std::size_t prefix_len = 0;                     // T0
    std::size_t reorder_period = 1;                 // T1
    std::size_t phase1_end = 0;                     // T
    std::size_t buffer_total = 0;                   // m
    std::size_t nonbuffer_unembedded = 0;
    Rng rng;
    EmbedDiagnostics diag;

    EmbeddingState() : rng(0) {}

    std::size_t cluster_of(std::size_t x) const { return pattern->cluster_of(x); }
    Bitset free_set(std::size_t y) const;
    std::size_t free_size(std::size_t y) const;
    bool bad_pair(std::size_t a, std::size_t b) const;
    void add_bad_pair(std::size_t a, std::size_t b);
    const Rational& basis(std::size_t i, std::size_t j) const { return density_basis[i * clusters + j]; }
};

/// One buffer list per cluster, ceil(d1*N) vertices each, pairwise pattern
/// distance >= 3 across the whole selection. Greedy over an rng-shuffled
/// scan; throws EmbedFailure when a quota cannot be met.
std::vector<std::vector<std::size_t>> select_buffers(const Pattern& pattern, std::size_t class_size,
                                                     const Rational& d1, Rng& rng);

/// Buffer neighborhoods first (deduplicated, buffers excluded), then the
/// rest shuffled, then the buffers. Returns the order and the prefix length.
std::pair<std::vector<std::size_t>, std::size_t> initial_order(
    const Pattern& pattern, const std::vector<std::vector<std::size_t>>& buffers, Rng& rng);

/// Allocates state and runs preprocessing: buffers, order, and the
/// low-degree host scan (run before any embedding so the reorder cannot race
/// the first image choice).
EmbeddingState make_state(const Pattern& pattern, const PartitionedHost& host, const EmbedConfig& cfg);

/// Low-degree host vertices per cluster; matching pattern vertices brought
/// to the front. Runs at t=0.
void detect_exceptional_hosts_low_degree(EmbeddingState& state);

/// Hosts covered by too few buffer candidate sets; untouched pattern
/// vertices brought forward to absorb them. Runs at t=T0.
void detect_exceptional_hosts_buffer_starved(EmbeddingState& state);

/// Pattern vertices whose free sets fell to the starvation threshold are
/// pulled to the front of the remaining order. Runs when the reorder period
/// divides t.
void detect_exceptional_pattern_vertices(EmbeddingState& state);

/// Selection for ordinary vertices: a free candidate satisfying the degree
/// conditions against every unembedded neighbor, uniform among the valid
/// ones. Throws EmbedFailure(phase1_stuck) when none qualifies.
std::size_t select_image_regular(EmbeddingState& state, std::size_t x);

/// Selection for exception-absorbing vertices: consumes the matching host
/// pool in order.
std::size_t select_image_exceptional(EmbeddingState& state, std::size_t x);

/// Records the image and shrinks the neighbors' candidate sets.
void embed_vertex(EmbeddingState& state, std::size_t x, std::size_t offset);

/// Main loop until every non-buffer vertex is embedded.
void run_phase1(EmbeddingState& state);

/// One matching per cluster between the leftover vertices and the uncovered
/// hosts.
void run_phase2(EmbeddingState& state);

/// Recomputes candidate sets from scratch and cross-checks the state; throws
/// std::logic_error on any mismatch.
void validate_state(const EmbeddingState& state);

/// Injectivity, cluster-respect and edge preservation. Reports the first few
/// violations of each kind.
VerifyReport verify_embedding(const Pattern& pattern, const PartitionedHost& host,
                              const std::vector<std::int64_t>& image);

/// Full pipeline; failures come back in the report, verifier always runs on
/// success.
EmbeddingReport embed(const Pattern& pattern, const PartitionedHost& host, const EmbedConfig& cfg);

} // namespace blowup

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "blowup/embedder.hpp"
#include "blowup/generators.hpp"

namespace blowup {

struct PatternSpec {
    enum class Kind { cycles, random_bounded };
    Kind kind = Kind::cycles;
    std::size_t degree_cap = 2;      // random_bounded only
    Rational fill{1, 1};             // random_bounded only
};

/// One batch: the cross product of the axes, times the seed list. Every row
/// regenerates its instance from the row seed, so results depend only on
/// this config.
struct SweepConfig {
    ClusterGraph reduced;
    std::vector<std::size_t> class_sizes;
    std::vector<Rational> densities;
    std::vector<Rational> deltas;
    std::vector<Rational> low_degree_fractions;
    PatternSpec pattern;
    bool blowup_host = false;        // complete pairs instead of random ones
    std::vector<std::uint64_t> seeds;
    EmbedConfig base;                // d, delta, seed overwritten per row
    std::string out_dir;             // empty: nothing written
    bool include_timings = false;    // timings make files non-reproducible
    bool write_run_json = true;

    explicit SweepConfig(ClusterGraph r) : reduced(std::move(r)) {}
};

struct RunRow {
    std::size_t class_size = 0;
    Rational d, delta, low_degree_fraction;
    std::uint64_t seed = 0;
    EmbedOutcome outcome = EmbedOutcome::preprocessing_failure;
    bool verified = false;
    std::string error;               // non-empty when the row aborted outside the embedder
    double phase1_ms = 0.0, phase2_ms = 0.0;
    std::size_t min_free = 0, exc1_total = 0, exc2_total = 0, bad_final = 0, case2_count = 0;
};

struct SweepResults {
    std::vector<RunRow> rows;        // canonical order: sweep point major, seed minor
    std::string csv;                 // results.csv payload
    std::size_t successes = 0;
    std::size_t verified = 0;
};

/// Runs every (point, seed) task, in parallel, and merges rows in canonical
/// order. Identical configs produce byte-identical CSV payloads.
SweepResults run_experiment(const SweepConfig& cfg);

/// Re-checks a persisted run: loads the three files, runs the verifier,
/// prints violations. Returns the process exit status (0 ok, 1 violations,
/// 2 parse errors).
int verify_files(const std::string& pattern_path, const std::string& host_path,
                 const std::string& map_path, std::ostream& log);

/// Report as a stable-key-order JSON document.
std::string report_to_json(const EmbeddingReport& report, bool include_timings);

} // namespace blowup

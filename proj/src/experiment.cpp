#include "blowup/experiment.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "json.hpp"

#include "blowup/io.hpp"

namespace blowup {

namespace {

using ordered_json = nlohmann::ordered_json;

struct Task {
    std::size_t class_size;
    Rational d, delta, lf;
    std::uint64_t seed;
};

RunRow run_task(const SweepConfig& cfg, const Task& task, std::string* run_json) {
    RunRow row;
    row.class_size = task.class_size;
    row.d = task.d;
    row.delta = task.delta;
    row.low_degree_fraction = task.lf;
    row.seed = task.seed;
    try {
        PartitionedHost host = [&] {
            if (cfg.blowup_host) return complete_blowup(cfg.reduced, task.class_size);
            HostRecipe recipe(cfg.reduced, task.class_size);
            recipe.d = task.d;
            recipe.delta = task.delta;
            recipe.low_degree_fraction = task.lf;
            recipe.seed = fork_seed(task.seed, 0x5057ULL);
            return random_host(recipe);
        }();
        Pattern pattern = [&] {
            if (cfg.pattern.kind == PatternSpec::Kind::cycles)
                return pattern_cycles(cfg.reduced, task.class_size);
            return pattern_random_bounded(cfg.reduced, task.class_size, cfg.pattern.degree_cap,
                                          cfg.pattern.fill, fork_seed(task.seed, 0x9a77ULL));
        }();

        EmbedConfig run_cfg = cfg.base;
        run_cfg.seed = task.seed;
        run_cfg.d = task.d;
        run_cfg.delta = task.delta;
        if (cfg.pattern.kind == PatternSpec::Kind::random_bounded && cfg.pattern.fill != Rational(1))
            run_cfg.strict_balance = false;

        EmbeddingReport report = embed(pattern, host, run_cfg);
        if (run_json) *run_json = report_to_json(report, cfg.include_timings);
        row.outcome = report.outcome;
        row.verified = report.verified;
        row.phase1_ms = report.phase1_ms;
        row.phase2_ms = report.phase2_ms;
        row.min_free = report.diagnostics.min_free_set == Bitset::npos
                           ? 0
                           : report.diagnostics.min_free_set;
        for (auto s : report.diagnostics.exc1_sizes) row.exc1_total += s;
        for (auto s : report.diagnostics.exc2_sizes) row.exc2_total += s;
        row.bad_final = report.diagnostics.bad_pairs_final;
        row.case2_count = report.diagnostics.case2_count;
    } catch (const std::exception& e) {
        row.error = e.what();
    }
    return row;
}

void append_csv_row(std::ostringstream& csv, const RunRow& row, bool include_timings) {
    csv << row.class_size << "," << row.d.str() << "," << row.delta.str() << ","
        << row.low_degree_fraction.str() << "," << row.seed << ","
        << (row.error.empty() ? outcome_name(row.outcome) : "error") << ","
        << (row.verified ? 1 : 0) << ",";
    if (include_timings)
        csv << static_cast<long long>(row.phase1_ms) << "," << static_cast<long long>(row.phase2_ms);
    else
        csv << ",";
    csv << "," << row.min_free << "," << row.exc1_total << "," << row.exc2_total << ","
        << row.bad_final << "," << row.case2_count << "\n";
}

ordered_json diagnostics_json(const EmbedDiagnostics& d) {
    ordered_json j;
    j["prefix_len"] = d.prefix_len;
    j["phase1_steps"] = d.phase1_steps;
    j["exc1_sizes"] = d.exc1_sizes;
    j["exc2_sizes"] = d.exc2_sizes;
    j["exc1_within_paper_bound"] = d.exc1_within_paper_bound;
    j["exc2_within_paper_bound"] = d.exc2_within_paper_bound;
    j["min_free_set"] = d.min_free_set == Bitset::npos ? -1 : static_cast<long long>(d.min_free_set);
    j["min_free_above_floor"] = d.min_free_above_floor;
    j["min_uncovered_at_end"] = d.min_uncovered_at_end;
    j["uncovered_bound_ok"] = d.uncovered_bound_ok;
    j["bad_pairs_final"] = d.bad_pairs_final;
    j["bad_added_max_step"] = d.bad_added_max_step;
    j["bad_growth_violations"] = d.bad_growth_violations;
    j["case2_count"] = d.case2_count;
    j["case2_skipped_covered"] = d.case2_skipped_covered;
    j["case2_postcondition_failures"] = d.case2_postcondition_failures;
    j["case2_min_slack"] =
        d.case2_min_slack == INT64_MAX ? ordered_json(nullptr) : ordered_json(d.case2_min_slack);
    j["starvation_pulls"] = d.starvation_pulls;
    j["buffer_pulls"] = d.buffer_pulls;
    j["early_pulls"] = d.early_pulls;
    j["cond_rejects"] = {d.cond1_rejects, d.cond2_rejects, d.cond3_rejects};
    j["invariant_checks"] = d.invariant_checks;
    j["padded_vertices"] = d.padded_vertices;
    ordered_json stages = ordered_json::array();
    for (const auto& s : d.phase2) {
        ordered_json c;
        c["cluster"] = s.cluster;
        c["size"] = s.size;
        c["min_free"] = s.min_free;
        c["konig1_ok"] = s.konig1_ok;
        c["min_cover"] = s.min_cover;
        c["konig3_ok"] = s.konig3_ok;
        c["konig2_ok"] = s.konig2_ok;
        c["konig2_exhaustive"] = s.konig2_exhaustive;
        if (!s.violator.empty()) c["violator"] = s.violator;
        stages.push_back(std::move(c));
    }
    j["phase2"] = std::move(stages);
    return j;
}

} // namespace

std::string report_to_json(const EmbeddingReport& report, bool include_timings) {
    ordered_json j;
    j["outcome"] = outcome_name(report.outcome);
    if (!report.detail.empty()) j["detail"] = report.detail;
    j["seed"] = report.seed;
    j["verified"] = report.verified;

    ordered_json cascade;
    cascade["d"] = report.cascade.d.str();
    cascade["delta"] = report.cascade.delta.str();
    cascade["max_degree"] = report.cascade.max_degree;
    cascade["r"] = report.cascade.r;
    cascade["log10_base"] = report.cascade.log10_base;
    for (std::size_t k = 0; k < 7; ++k)
        cascade[std::string("log10_") + ParameterCascade::names()[k]] = report.cascade.log10_derived[k];
    cascade["mode"] =
        report.cascade.mode == CascadeMode::paper_exact ? "paper-exact" : "practical-override";
    j["cascade"] = std::move(cascade);

    j["diagnostics"] = diagnostics_json(report.diagnostics);
    if (include_timings) {
        j["phase1_ms"] = report.phase1_ms;
        j["phase2_ms"] = report.phase2_ms;
        j["total_ms"] = report.total_ms;
    }
    if (report.success()) {
        std::ostringstream lines;
        write_map(lines, report.image);
        j["embedding"] = lines.str();
    }
    if (!report.verification.samples.empty()) j["verifier_samples"] = report.verification.samples;
    return j.dump(2) + "\n";
}

SweepResults run_experiment(const SweepConfig& cfg) {
    std::vector<Task> tasks;
    for (std::size_t N : cfg.class_sizes)
        for (const auto& d : cfg.densities)
            for (const auto& delta : cfg.deltas)
                for (const auto& lf : cfg.low_degree_fractions)
                    for (auto seed : cfg.seeds) tasks.push_back({N, d, delta, lf, seed});
    if (tasks.empty()) throw std::invalid_argument("run_experiment: empty sweep");

    const bool keep_json = cfg.write_run_json && !cfg.out_dir.empty();
    SweepResults results;
    results.rows.resize(tasks.size());
    std::vector<std::string> run_jsons(keep_json ? tasks.size() : 0);
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t k = 0; k < static_cast<std::int64_t>(tasks.size()); ++k)
        results.rows[k] = run_task(cfg, tasks[k], keep_json ? &run_jsons[k] : nullptr);

    std::ostringstream csv;
    csv << "N,d,delta,low_degree_fraction,seed,outcome,verified,t_phase1_ms,t_phase2_ms,"
           "min_H_set,E1,E2,Bad_T,case2\n";
    for (const auto& row : results.rows) {
        append_csv_row(csv, row, cfg.include_timings);
        results.successes += row.error.empty() && row.outcome == EmbedOutcome::success;
        results.verified += row.verified;
    }
    results.csv = csv.str();

    if (!cfg.out_dir.empty()) {
        namespace fs = std::filesystem;
        fs::create_directories(cfg.out_dir);
        save_text((fs::path(cfg.out_dir) / "results.csv").string(), results.csv);
        if (keep_json) {
            fs::create_directories(fs::path(cfg.out_dir) / "runs");
            for (std::size_t k = 0; k < run_jsons.size(); ++k) {
                if (run_jsons[k].empty()) continue;
                save_text((fs::path(cfg.out_dir) / "runs" / ("run_" + std::to_string(k) + ".json")).string(),
                          run_jsons[k]);
            }
        }
    }
    return results;
}

int verify_files(const std::string& pattern_path, const std::string& host_path,
                 const std::string& map_path, std::ostream& log) {
    try {
        PartitionedHost host = load_host(host_path);
        Pattern pattern = load_pattern(pattern_path, host.reduced());
        auto image = load_map(map_path, pattern.graph().vertex_count());
        VerifyReport report = verify_embedding(pattern, host, image);
        if (report.ok()) {
            log << "ok: injective, class-respecting, all " << pattern.graph().edge_count()
                << " edges preserved\n";
            return 0;
        }
        if (!report.total) log << "violation: image is not total\n";
        if (report.injectivity_violations > 0)
            log << "violation: injectivity (" << report.injectivity_violations << " duplicates)\n";
        if (report.cluster_violations > 0)
            log << "violation: class-respect (" << report.cluster_violations << " vertices)\n";
        if (report.edge_violations > 0)
            log << "violation: edge preservation (" << report.edge_violations << " edges)\n";
        for (const auto& s : report.samples) log << "  " << s << "\n";
        return 1;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        return 2;
    }
}

} // namespace blowup

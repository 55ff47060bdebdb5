#pragma once

// End-to-end run: ingest -> encode -> k-means -> per-cluster
// {transactions -> apriori -> top assignees -> class rules -> redundancy}
// -> reports, followed by a self-audit and an atomic write of the outputs.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <istream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "triage_miner/cluster.hpp"
#include "triage_miner/error.hpp"
#include "triage_miner/ingest.hpp"
#include "triage_miner/mine.hpp"
#include "triage_miner/report.hpp"
#include "triage_miner/rules.hpp"

namespace triage_miner {

struct PipelineConfig {
    std::string input_path;
    ColumnMap column_map;
    std::size_t k = 5;
    std::size_t min_support_count = 3;
    double min_confidence = 0.10;
    std::size_t top_n = 5;
    std::uint64_t seed = 0;
    std::size_t max_iterations = 100;
    std::size_t parallelism = 0;  // 0: one worker per cluster
    std::string output_dir = "triage_report";

    std::size_t workers() const noexcept { return std::max<std::size_t>(1, parallelism == 0 ? k : parallelism); }
};

/// Parameters as archived in config_used.json. The output directory is left
/// out so that runs into different directories produce identical files.
inline nlohmann::json config_to_json(const PipelineConfig& c) {
    return {{"input_path", c.input_path},
            {"column_map", column_map_to_json(c.column_map)},
            {"k", c.k},
            {"min_support_count", c.min_support_count},
            {"min_confidence", c.min_confidence},
            {"top_n", c.top_n},
            {"seed", c.seed},
            {"max_iterations", c.max_iterations},
            {"parallelism", c.parallelism}};
}

/// Parses a JSON config (empty text means `{}`), applies `overrides` on top
/// and validates. Every violation is collected before throwing ConfigError.
inline PipelineConfig validate_config(std::string_view text,
                                      const nlohmann::json& overrides = nlohmann::json::object()) {
    nlohmann::json j = nlohmann::json::object();
    if (text.find_first_not_of(" \t\r\n") != std::string_view::npos) {
        try {
            j = nlohmann::json::parse(text);
        } catch (const nlohmann::json::parse_error& e) {
            throw ConfigError({std::string("config: not valid JSON (") + e.what() + ")"});
        }
        if (!j.is_object()) throw ConfigError({"config: top level must be a JSON object"});
    }
    for (const auto& [key, value] : overrides.items()) j[key] = value;

    PipelineConfig c;
    std::vector<std::string> errors;
    static const std::set<std::string> kKnown = {"input_path", "column_map", "k", "min_support_count",
                                                 "min_confidence", "top_n", "seed", "max_iterations",
                                                 "parallelism", "output_dir"};
    for (const auto& [key, value] : j.items()) {
        if (!kKnown.contains(key)) errors.push_back(key + ": unknown field");
    }

    const auto read_count = [&](const char* key, std::size_t& out, bool allow_zero) {
        if (!j.contains(key)) return;
        const auto& v = j.at(key);
        if (!v.is_number_integer()) {
            errors.push_back(std::string(key) + ": must be an integer");
        } else if (v.is_number_unsigned() ? (!allow_zero && v.get<std::uint64_t>() == 0)
                                          : v.get<std::int64_t>() < (allow_zero ? 0 : 1)) {
            errors.push_back(std::string(key) + (allow_zero ? ": must be non-negative" : ": must be positive"));
        } else {
            out = static_cast<std::size_t>(v.get<std::uint64_t>());
        }
    };
    const auto read_string = [&](const char* key, std::string& out) {
        if (!j.contains(key)) return;
        if (!j.at(key).is_string()) {
            errors.push_back(std::string(key) + ": must be a string");
        } else {
            out = j.at(key).get<std::string>();
        }
    };

    read_string("input_path", c.input_path);
    read_string("output_dir", c.output_dir);
    read_count("k", c.k, false);
    read_count("min_support_count", c.min_support_count, false);
    read_count("top_n", c.top_n, false);
    read_count("max_iterations", c.max_iterations, false);
    read_count("parallelism", c.parallelism, true);

    if (j.contains("seed")) {
        const auto& v = j.at("seed");
        if (v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
            c.seed = v.get<std::uint64_t>();
        } else if (v.is_number_integer()) {
            errors.push_back("seed: must be non-negative");
        } else {
            errors.push_back("seed: must be an integer");
        }
    }
    if (j.contains("min_confidence")) {
        const auto& v = j.at("min_confidence");
        if (!v.is_number()) {
            errors.push_back("min_confidence: must be a number");
        } else if (const double d = v.get<double>(); !(d > 0.0 && d <= 1.0)) {
            errors.push_back("min_confidence: must be in (0, 1]");
        } else {
            c.min_confidence = d;
        }
    }
    if (j.contains("column_map")) {
        const auto& m = j.at("column_map");
        static const std::set<std::string> kFields = {"bug_id", "severity", "priority", "component",
                                                      "operating_system", "assignee"};
        if (!m.is_object()) {
            errors.push_back("column_map: must be an object");
        } else {
            bool ok = true;
            for (const auto& [key, value] : m.items()) {
                if (!kFields.contains(key)) {
                    errors.push_back("column_map." + key + ": unknown field");
                    ok = false;
                } else if (!value.is_string() || value.get<std::string>().empty()) {
                    errors.push_back("column_map." + key + ": must be a non-empty string");
                    ok = false;
                }
            }
            if (ok) c.column_map = column_map_from_json(m);
        }
    }
    if (c.input_path.empty()) errors.push_back("input_path: required");
    if (c.output_dir.empty()) errors.push_back("output_dir: must be non-empty");

    if (!errors.empty()) throw ConfigError(std::move(errors));
    return c;
}

struct ClusterOutcome {
    std::vector<Code> top_assignees;
    std::size_t frequent_itemsets = 0;
    std::size_t generated_rules = 0;
    RulePartition partition;
};

struct PipelineResult {
    EncodedDataset data;
    ClusterModel model;
    std::vector<std::vector<BugRecord>> clusters;
    std::vector<ClusterOutcome> outcomes;
    std::vector<ClusterReport> reports;
    std::vector<std::string> table_problems;  // from the per-cluster frequent-table audit
};

using ProgressSink = std::function<void(std::string_view)>;

inline ClusterOutcome mine_cluster(std::span<const BugRecord> records, const PipelineConfig& config,
                                   std::vector<std::string>* table_problems = nullptr) {
    ClusterOutcome out;
    const auto transactions = to_transactions(records);
    const auto table = apriori(transactions, config.min_support_count);
    out.frequent_itemsets = table.size();
    if (table_problems) *table_problems = audit_frequent_table(table);
    out.top_assignees = top_assignees(records, config.top_n);
    const std::set<Code> allowed(out.top_assignees.begin(), out.top_assignees.end());
    auto rules = generate_class_rules(table, config.min_confidence, allowed);
    out.generated_rules = rules.size();
    out.partition = eliminate_redundant(std::move(rules));
    return out;
}

/// Runs every stage in memory. Per-cluster mining fans out over
/// config.workers() threads; results are joined in cluster order.
inline PipelineResult run_pipeline_in_memory(const PipelineConfig& config, std::istream& input,
                                             const ProgressSink& progress = {}) {
    const auto note = [&](const std::string& s) {
        if (progress) progress(s);
    };
    PipelineResult result;
    const auto rows = parse_csv(input, config.column_map);
    note("parsed " + std::to_string(rows.size()) + " bug reports");
    result.data = build_codebooks_and_encode(rows);

    const auto points = features(result.data.records);
    result.model = kmeans_fit(points, config.k, config.seed, config.max_iterations);
    note("k-means converged after " + std::to_string(result.model.iterations_run) + " iterations");
    result.clusters = split_by_cluster(result.data.records, result.model);

    const std::size_t k = result.clusters.size();
    result.outcomes.resize(k);
    std::vector<std::vector<std::string>> problems(k);
    std::vector<std::exception_ptr> failures(k);
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t c = next++; c < k; c = next++) {
            try {
                result.outcomes[c] = mine_cluster(result.clusters[c], config, &problems[c]);
            } catch (...) {
                failures[c] = std::current_exception();
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        for (std::size_t t = 1; t < std::min(config.workers(), k); ++t) pool.emplace_back(worker);
        worker();
    }
    for (const auto& f : failures) {
        if (f) std::rethrow_exception(f);
    }
    for (std::size_t c = 0; c < k; ++c) {
        for (auto& p : problems[c]) result.table_problems.push_back("cluster " + std::to_string(c) + ": " + p);
        const auto& o = result.outcomes[c];
        result.reports.push_back(
            build_cluster_report(c, result.clusters[c], o.partition, result.data.codebooks, o.top_assignees));
        note("cluster " + std::to_string(c) + ": " + std::to_string(result.clusters[c].size()) + " records, " +
             std::to_string(o.partition.essential.size()) + " essential, " +
             std::to_string(o.partition.redundant.size()) + " redundant rules");
    }
    return result;
}

/// Accounting and invariant checks over a finished run; one message per violation.
inline std::vector<std::string> audit_pipeline(const PipelineResult& r, const PipelineConfig& config) {
    std::vector<std::string> problems = r.table_problems;
    const auto points = features(r.data.records);
    for (auto& p : audit_cluster_model(r.model, points)) problems.push_back("k-means: " + p);

    std::size_t total = 0;
    for (const auto& report : r.reports) total += report.size;
    if (total != r.data.records.size()) {
        problems.push_back("cluster sizes sum to " + std::to_string(total) + ", input has " +
                           std::to_string(r.data.records.size()));
    }
    if (r.reports.size() != r.outcomes.size() || r.outcomes.size() != r.clusters.size()) {
        problems.push_back("cluster count mismatch between stages");
        return problems;
    }
    for (std::size_t c = 0; c < r.reports.size(); ++c) {
        const auto prefix = "cluster " + std::to_string(c) + ": ";
        const auto& report = r.reports[c];
        const auto& outcome = r.outcomes[c];
        if (report.size != r.clusters[c].size()) problems.push_back(prefix + "report size differs from cluster");
        if (report.rule_count() != outcome.generated_rules) {
            problems.push_back(prefix + "essential + redundant differs from mined rule count");
        }
        std::size_t hist = 0;
        for (auto h : report.length_histogram) hist += h;
        if (hist != outcome.generated_rules) problems.push_back(prefix + "length histogram differs from rule count");
        if (report.rules.size() != outcome.generated_rules) problems.push_back(prefix + "rendered rule count differs");
        for (auto& p : audit_partition(outcome.partition, outcome.generated_rules, config.min_support_count,
                                       config.min_confidence)) {
            problems.push_back(prefix + p);
        }
    }
    return problems;
}

inline std::string dump_json(const nlohmann::json& j) { return j.dump(2) + "\n"; }

/// Relative path -> file contents for every output file.
inline std::vector<std::pair<std::string, std::string>> render_outputs(const PipelineResult& r,
                                                                       const PipelineConfig& config) {
    std::vector<std::pair<std::string, std::string>> files;
    files.emplace_back("config_used.json", dump_json(config_to_json(config)));
    files.emplace_back("codebooks.json", dump_json(codebooks_to_json(r.data.codebooks)));
    files.emplace_back("clusters.json", dump_json(cluster_model_to_json(r.model, r.data.records)));

    std::size_t essential = 0;
    std::size_t redundant = 0;
    nlohmann::json clusters = nlohmann::json::array();
    for (const auto& report : r.reports) {
        essential += report.essential_count;
        redundant += report.redundant_count;
        clusters.push_back(cluster_report_to_json(report));
    }
    const nlohmann::json summary = {
        {"input_records", r.data.records.size()},
        {"parameters", config_to_json(config)},
        {"kmeans", {{"iterations_run", r.model.iterations_run}, {"inertia", r.model.inertia}}},
        {"totals", {{"rules", essential + redundant}, {"essential", essential}, {"redundant", redundant}}},
        {"clusters", std::move(clusters)}};
    files.emplace_back("report/summary.json", dump_json(summary));
    for (const auto& report : r.reports) {
        files.emplace_back("report/cluster_" + std::to_string(report.cluster_index) + ".txt",
                           render_cluster_text(report));
    }
    files.emplace_back("report/figures/cluster_sizes.csv", cluster_sizes_csv(r.reports));
    files.emplace_back("report/figures/essential_redundant.csv", essential_redundant_csv(r.reports));
    files.emplace_back("report/figures/rule_lengths.csv", rule_lengths_csv(r.reports));
    files.emplace_back("report/rules.csv", rules_csv(r.reports));
    files.emplace_back("report/rules.json", dump_json(rules_json(r.reports)));
    return files;
}

/// Writes into a sibling temporary directory, then renames it over `dir`.
/// On failure nothing is left at `dir` beyond what was there before.
inline void write_outputs_atomically(const std::filesystem::path& dir,
                                     const std::vector<std::pair<std::string, std::string>>& files) {
    namespace fs = std::filesystem;
    const auto stamp = std::to_string(std::chrono::steady_clock::now().time_since_epoch().count());
    const fs::path target = fs::absolute(dir).lexically_normal();
    const fs::path parent = target.parent_path();
    const fs::path staging = parent / (target.filename().string() + ".tmp-" + stamp);
    const fs::path previous = parent / (target.filename().string() + ".old-" + stamp);
    try {
        fs::create_directories(parent);
        fs::create_directories(staging);
        for (const auto& [rel, contents] : files) {
            const fs::path p = staging / rel;
            fs::create_directories(p.parent_path());
            std::ofstream out(p, std::ios::binary);
            out << contents;
            out.close();
            if (!out) throw IoError("failed to write " + p.string());
        }
        const bool replace = fs::exists(target);
        if (replace) fs::rename(target, previous);
        fs::rename(staging, target);
        if (replace) fs::remove_all(previous);
    } catch (const fs::filesystem_error& e) {
        std::error_code ignored;
        fs::remove_all(staging, ignored);
        throw IoError(e.what());
    } catch (...) {
        std::error_code ignored;
        fs::remove_all(staging, ignored);
        throw;
    }
}

/// Full run from config.input_path to config.output_dir. Throws IoError for
/// unreadable input, ValidationError subclasses for bad data and
/// InvariantError when the self-audit fails (no outputs are written then).
inline PipelineResult run_pipeline(const PipelineConfig& config, const ProgressSink& progress = {}) {
    std::ifstream input(config.input_path, std::ios::binary);
    if (!input) throw IoError("cannot open input file: " + config.input_path);
    auto result = run_pipeline_in_memory(config, input, progress);
    if (const auto problems = audit_pipeline(result, config); !problems.empty()) {
        std::string message = "self-audit failed:";
        for (const auto& p : problems) message += "\n  " + p;
        throw InvariantError(message);
    }
    write_outputs_atomically(config.output_dir, render_outputs(result, config));
    return result;
}

}  // namespace triage_miner

// triage-miner: bug-assignee class association rules per K-means cluster.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "triage_miner/triage_miner.hpp"

namespace miner = triage_miner;

namespace {

enum ExitCode : int { kOk = 0, kValidation = 1, kIo = 2, kInternal = 3 };

void setup_logging() {
    auto logger = spdlog::stderr_color_mt("triage-miner");
    logger->set_pattern("[%l] %v");
    spdlog::set_default_logger(logger);
    spdlog::set_level(spdlog::level::info);
    if (const char* env = std::getenv("TRIAGE_MINER_LOG"); env != nullptr && *env != '\0') {
        spdlog::set_level(spdlog::level::from_str(env));
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw miner::IoError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Flags that override config-file fields. Only flags given on the command line are applied.
struct RunFlags {
    std::string config_path;
    std::string input;
    std::string output;
    std::size_t clusters = 0;
    std::size_t min_support = 0;
    double min_confidence = 0.0;
    std::size_t top_assignees = 0;
    std::uint64_t seed = 0;
    std::size_t max_iterations = 0;
    std::size_t parallelism = 0;
};

void add_run_flags(CLI::App* cmd, RunFlags& f) {
    cmd->add_option("--config", f.config_path, "JSON config file");
    cmd->add_option("--input", f.input, "bug-report CSV");
    cmd->add_option("--output", f.output, "output directory");
    cmd->add_option("--clusters", f.clusters, "number of K-means clusters (default 5)");
    cmd->add_option("--min-support", f.min_support, "minimum rule support count (default 3)");
    cmd->add_option("--min-confidence", f.min_confidence, "minimum rule confidence in (0,1] (default 0.10)");
    cmd->add_option("--top-assignees", f.top_assignees, "assignees per cluster used as consequents (default 5)");
    cmd->add_option("--seed", f.seed, "K-means seed (default 0)");
    cmd->add_option("--max-iterations", f.max_iterations, "K-means iteration cap (default 100)");
    cmd->add_option("--parallelism", f.parallelism, "worker threads for per-cluster mining (default k)");
}

miner::PipelineConfig resolve_config(const CLI::App* cmd, const RunFlags& f) {
    nlohmann::json overrides = nlohmann::json::object();
    const auto given = [&](const char* name) { return cmd->count(name) > 0; };
    if (given("--input")) overrides["input_path"] = f.input;
    if (given("--output")) overrides["output_dir"] = f.output;
    if (given("--clusters")) overrides["k"] = f.clusters;
    if (given("--min-support")) overrides["min_support_count"] = f.min_support;
    if (given("--min-confidence")) overrides["min_confidence"] = f.min_confidence;
    if (given("--top-assignees")) overrides["top_n"] = f.top_assignees;
    if (given("--seed")) overrides["seed"] = f.seed;
    if (given("--max-iterations")) overrides["max_iterations"] = f.max_iterations;
    if (given("--parallelism")) overrides["parallelism"] = f.parallelism;
    const std::string text = f.config_path.empty() ? std::string() : read_file(f.config_path);
    return miner::validate_config(text, overrides);
}

int run_command(const CLI::App* cmd, const RunFlags& flags) {
    const auto config = resolve_config(cmd, flags);
    const auto result = miner::run_pipeline(config, [](std::string_view s) { spdlog::info("{}", s); });

    std::size_t essential = 0;
    std::size_t redundant = 0;
    std::cout << "cluster,size,rules,essential,redundant\n";
    for (const auto& r : result.reports) {
        std::cout << r.cluster_index << ',' << r.size << ',' << r.rule_count() << ',' << r.essential_count << ','
                  << r.redundant_count << '\n';
        essential += r.essential_count;
        redundant += r.redundant_count;
    }
    std::cout << "total," << result.data.records.size() << ',' << essential + redundant << ',' << essential << ','
              << redundant << '\n';
    spdlog::info("wrote {}", config.output_dir);
    return kOk;
}

struct VerifyFlags {
    RunFlags run;
    std::size_t datasets = 100;
    std::size_t max_transactions = 200;
    miner::Code max_codes = 12;
    std::size_t rule_sets = 100;
    std::size_t max_rules = 50;
    std::uint64_t verify_seed = 1;
};

int verify_command(const CLI::App* cmd, const VerifyFlags& f) {
    bool ok = true;
    const auto report = [&](const char* what, const miner::oracle::VerifySummary& s) {
        std::cout << what << ": " << s.instances << " instances, " << s.failures << " mismatches\n";
        for (const auto& m : s.messages) std::cout << "  " << m << '\n';
        ok = ok && s.failures == 0;
    };
    report("apriori vs enumeration",
           miner::oracle::verify_apriori_random(f.datasets, f.max_transactions, f.max_codes, f.verify_seed));
    report("redundancy vs all-pairs",
           miner::oracle::verify_redundancy_random(f.rule_sets, f.max_rules, f.verify_seed));

    if (cmd->count("--input") > 0 || cmd->count("--config") > 0) {
        const auto config = resolve_config(cmd, f.run);
        std::ifstream input(config.input_path, std::ios::binary);
        if (!input) throw miner::IoError("cannot open input file: " + config.input_path);
        const auto result = miner::run_pipeline_in_memory(config, input);
        for (std::size_t c = 0; c < result.clusters.size(); ++c) {
            const auto& records = result.clusters[c];
            if (records.size() > f.max_transactions) {
                std::cout << "cluster " << c << ": " << records.size() << " transactions exceed cap "
                          << f.max_transactions << ", skipped\n";
                continue;
            }
            const auto txns = miner::to_transactions(records);
            const auto itemset_diffs = miner::oracle::diff_apriori(txns, config.min_support_count);
            const auto table = miner::apriori(txns, config.min_support_count);
            const auto top = miner::top_assignees(records, config.top_n);
            const auto rules = miner::generate_class_rules(table, config.min_confidence, {top.begin(), top.end()});
            const auto rule_diffs = rules.size() <= f.max_rules ? miner::oracle::diff_redundancy(rules)
                                                                 : std::vector<std::string>{};
            std::cout << "cluster " << c << ": itemsets " << (itemset_diffs.empty() ? "match" : "MISMATCH")
                      << ", redundancy "
                      << (rules.size() > f.max_rules ? "skipped (rule cap)"
                                                     : (rule_diffs.empty() ? "match" : "MISMATCH"))
                      << '\n';
            ok = ok && itemset_diffs.empty() && rule_diffs.empty();
        }
        if (const auto problems = miner::audit_pipeline(result, config); !problems.empty()) {
            for (const auto& p : problems) std::cout << "audit: " << p << '\n';
            ok = false;
        }
    }
    std::cout << (ok ? "verify: PASS\n" : "verify: FAIL\n");
    return ok ? kOk : kInternal;
}

int synthesize_command(const miner::SynthesisOptions& opt, const std::string& output) {
    const auto rows = miner::synthesize_rows(opt);
    std::ofstream out(output, std::ios::binary);
    if (!out) throw miner::IoError("cannot write " + output);
    miner::write_rows_csv(out, rows);
    out.close();
    if (!out) throw miner::IoError("failed writing " + output);
    spdlog::info("wrote {} synthetic bug reports to {}", rows.size(), output);
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    setup_logging();
    CLI::App app{"Mine bug-assignee association rules per K-means cluster and separate redundant rules"};
    app.require_subcommand(1);

    RunFlags run_flags;
    auto* run = app.add_subcommand("run", "run the full pipeline and write the report directory");
    add_run_flags(run, run_flags);

    VerifyFlags verify_flags;
    auto* verify = app.add_subcommand("verify", "check the fast paths against brute-force oracles");
    add_run_flags(verify, verify_flags.run);
    verify->add_option("--datasets", verify_flags.datasets, "random transaction datasets");
    verify->add_option("--max-transactions", verify_flags.max_transactions, "transaction cap per dataset/cluster");
    verify->add_option("--max-codes", verify_flags.max_codes, "distinct codes per attribute cap");
    verify->add_option("--rule-sets", verify_flags.rule_sets, "random rule sets");
    verify->add_option("--max-rules", verify_flags.max_rules, "rules per set cap");
    verify->add_option("--verify-seed", verify_flags.verify_seed, "seed for random instances");

    miner::SynthesisOptions synth;
    std::string synth_output;
    auto* synthesize = app.add_subcommand("synthesize", "write a deterministic synthetic bug-report CSV");
    synthesize->add_option("--output", synth_output, "CSV path")->required();
    synthesize->add_option("--records", synth.records, "number of bug reports");
    synthesize->add_option("--seed", synth.seed, "generator seed");
    synthesize->add_option("--components", synth.components, "distinct components");
    synthesize->add_option("--operating-systems", synth.operating_systems, "distinct operating systems");
    synthesize->add_option("--assignees", synth.assignees, "distinct assignees");
    synthesize->add_option("--skew", synth.skew, "Zipf exponent of category popularity");
    synthesize->add_option("--team-affinity", synth.team_affinity,
                           "probability a bug goes to its component's team");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kValidation;
    }

    try {
        if (*run) return run_command(run, run_flags);
        if (*verify) return verify_command(verify, verify_flags);
        if (*synthesize) return synthesize_command(synth, synth_output);
    } catch (const miner::ValidationError& e) {
        spdlog::error("{}", e.what());
        return kValidation;
    } catch (const miner::IoError& e) {
        spdlog::error("{}", e.what());
        return kIo;
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return kInternal;
    }
    return kOk;
}

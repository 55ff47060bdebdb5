// Acceptance suite: prints one PASS/FAIL line per criterion, exits non-zero if any fails.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include <nlohmann/json.hpp>

#include "triage_miner/oracle.hpp"
#include "triage_miner/pipeline.hpp"
#include "triage_miner/synthesize.hpp"

namespace fs = std::filesystem;
using namespace triage_miner;

namespace {

const fs::path kSource = TRIAGE_MINER_SOURCE_DIR;
const std::string kExe = TRIAGE_MINER_EXE;

struct Outcome {
    bool pass = false;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int run_cli(const std::string& args) {
    const std::string cmd = "cd \"" + kSource.string() + "\" && \"" + kExe + "\" " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::map<std::string, std::string> tree(const fs::path& root) {
    std::map<std::string, std::string> files;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
        if (e.is_regular_file()) files[fs::relative(e.path(), root).generic_string()] = slurp(e.path());
    }
    return files;
}

fs::path scratch() {
    static const fs::path dir = [] {
        auto d = fs::temp_directory_path() / ("triage_miner_acceptance_" + std::to_string(::getpid()));
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

Outcome apriori_oracle() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto s = oracle::verify_apriori_random(120, 200, 12, 2024);
    const double secs = seconds_since(t0);
    std::ostringstream d;
    d << s.instances << " datasets, " << s.failures << " mismatches, " << secs << " s";
    for (const auto& m : s.messages) d << "; " << m;
    return {s.instances >= 100 && s.failures == 0 && secs < 60.0, d.str()};
}

Outcome rule_thresholds() {
    std::mt19937_64 rng(77);
    std::size_t rules_checked = 0;
    std::size_t violations = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const auto n = std::uniform_int_distribution<std::size_t>(5, 200)(rng);
        const auto ts = oracle::random_transactions(rng, n, 1 + trial % 6);
        std::vector<BugRecord> recs;
        for (const auto& t : ts) {
            recs.push_back({t.bug_id, t.itemset[0].code, t.itemset[1].code, t.itemset[2].code, t.itemset[3].code,
                            t.itemset[4].code});
        }
        PipelineConfig defaults;
        const auto outcome = mine_cluster(recs, defaults);
        std::vector<Rule> all = outcome.partition.essential;
        for (const auto& r : outcome.partition.redundant) all.push_back(r.rule);
        for (const auto& r : all) {
            ++rules_checked;
            const auto sup = support_count(r.antecedent.with(r.consequent), ts);
            const auto ante = support_count(r.antecedent, ts);
            // Exact check against one tenth: 10 * sup >= ante.
            if (sup < 3 || 10 * sup < ante || sup != r.support_count || ante != r.antecedent_support) ++violations;
        }
    }
    return {rules_checked > 0 && violations == 0,
            std::to_string(rules_checked) + " rules over 200 random clusters, " + std::to_string(violations) +
                " violations"};
}

Outcome redundancy_oracle() {
    const auto s = oracle::verify_redundancy_random(150, 50, 99);
    std::ostringstream d;
    d << s.instances << " rule sets, " << s.failures << " mismatches or invalid witnesses";
    for (const auto& m : s.messages) d << "; " << m;
    return {s.instances >= 100 && s.failures == 0, d.str()};
}

Outcome partition_accounting() {
    std::size_t runs = 0;
    std::size_t problems = 0;
    std::size_t detected = 0;
    const auto check = [&](PipelineConfig c, std::istream& in) {
        auto r = run_pipeline_in_memory(c, in);
        ++runs;
        problems += audit_pipeline(r, c).size();
        auto corrupted = r;
        corrupted.reports.back().essential_count += 1;
        if (!audit_pipeline(corrupted, c).empty()) ++detected;
    };
    PipelineConfig c;
    c.input_path = (kSource / "data/sample_bugs.csv").string();
    for (std::size_t k : {1, 3, 5, 8}) {
        c.k = k;
        std::ifstream in(c.input_path);
        check(c, in);
    }
    for (std::uint64_t seed : {1, 2, 3}) {
        SynthesisOptions o;
        o.records = 1500;
        o.seed = seed;
        std::stringstream csv;
        write_rows_csv(csv, synthesize_rows(o));
        c.k = 5;
        c.seed = seed;
        check(c, csv);
    }
    const int cli = run_cli("run --input data/sample_bugs.csv --output " + (scratch() / "audit").string());
    return {problems == 0 && detected == runs && cli == 0,
            std::to_string(runs) + " runs, " + std::to_string(problems) + " audit violations, corruption detected in " +
                std::to_string(detected) + "/" + std::to_string(runs) + ", CLI exit " + std::to_string(cli)};
}

Outcome kmeans_invariants() {
    std::mt19937_64 rng(5);
    std::size_t failures = 0;
    for (int trial = 0; trial < 50; ++trial) {
        std::uniform_int_distribution<int> sev(1, 7), pri(1, 5), comp(1, 20), os(1, 6);
        std::vector<FeatureVector> pts;
        for (int i = 0; i < 50 + trial * 10; ++i) {
            pts.push_back({double(sev(rng)), double(pri(rng)), double(comp(rng)), double(os(rng))});
        }
        const std::size_t k = 1 + trial % 10;
        const auto m = kmeans_fit(pts, k, trial, 100);
        const auto again = kmeans_fit(pts, k, trial, 100);
        bool ok = audit_cluster_model(m, pts).empty() && m.assignments == again.assignments &&
                  m.centroids == again.centroids;
        for (std::size_t i = 1; i < m.inertia_history.size(); ++i) ok = ok && m.inertia_history[i] <= m.inertia_history[i - 1];
        for (auto size : m.cluster_sizes()) ok = ok && size > 0;
        if (!ok) ++failures;
    }
    std::vector<FeatureVector> clumps(5, FeatureVector{1, 1, 1, 1});
    clumps.insert(clumps.end(), 5, FeatureVector{9, 9, 9, 9});
    const auto m = kmeans_fit(clumps, 2, 0, 100);
    bool split = m.inertia == 0.0;
    for (std::size_t i = 0; i < 10; ++i) split = split && (m.assignments[i] == m.assignments[0]) == (i < 5);
    return {failures == 0 && split, std::to_string(failures) + "/50 random fits violated invariants; two-clump " +
                                        (split ? "exact partition, inertia 0" : "WRONG")};
}

Outcome rendering_goldens() {
    Codebooks books;
    const auto os = [&](std::string_view l) { return Item{Attribute::OperatingSystem, books[Attribute::OperatingSystem].learn(l)}; };
    const auto comp = [&](std::string_view l) { return Item{Attribute::Component, books[Attribute::Component].learn(l)}; };
    const auto who = [&](std::string_view l) { return Item{Attribute::Assignee, books[Attribute::Assignee].learn(l)}; };
    const Item normal{Attribute::Severity, encode_severity("normal")};
    const Item p3{Attribute::Priority, encode_priority("P3")};

    const std::vector<std::pair<Rule, std::string>> cases = {
        {Rule::make(Itemset{normal, p3, os("Linux"), comp("Build Config")}, who("Jon Granrose"), 9, 17),
         "Severity {Normal} ∧ Priority {P3} ∧ Os {Linux} ∧ Component{Build Config} ⇒ Assignee {Jon Granrose} @ "
         "(9,52.94%)"},
        {Rule::make(Itemset{os("All"), comp("User Interface")}, who("Ben Goodger"), 3, 4),
         "Os {All} ∧ Component{User Interface} ⇒ Assignee {Ben Goodger} @ (3,75%)"},
        {Rule::make(Itemset{normal, p3, os("Unspecified"), comp("Developer Tools: Debugger")}, who("Jason Laster"), 7,
                    7),
         "Severity {Normal} ∧ Priority {P3} ∧ Os {Unspecified} ∧ Component{Developer Tools: Debugger} ⇒ Assignee "
         "{Jason Laster} @ (7,100%)"},
    };
    std::size_t matched = 0;
    std::string detail;
    for (const auto& [rule, expected] : cases) {
        const auto got = render_rule(rule, books);
        if (got == expected) {
            ++matched;
        } else {
            detail += "; got `" + got + "`";
        }
    }
    return {matched == cases.size(), std::to_string(matched) + "/3 strings identical" + detail};
}

Outcome end_to_end_determinism() {
    const auto a = scratch() / "det_a";
    const auto b = scratch() / "det_b";
    const auto t0 = std::chrono::steady_clock::now();
    const int ca = run_cli("run --input data/sample_bugs.csv --output " + a.string());
    const double first = seconds_since(t0);
    const auto t1 = std::chrono::steady_clock::now();
    const int cb = run_cli("run --input data/sample_bugs.csv --output " + b.string());
    const double second = seconds_since(t1);
    if (ca != 0 || cb != 0) return {false, "run exited " + std::to_string(ca) + "/" + std::to_string(cb)};
    const auto ta = tree(a);
    const auto tb = tree(b);
    std::ostringstream d;
    d << ta.size() << " files, " << (ta == tb ? "byte-identical" : "DIFFERENT") << ", runs took " << first << " s and "
      << second << " s";
    return {!ta.empty() && ta == tb && first < 10.0 && second < 10.0, d.str()};
}

Outcome trend_harness() {
    std::ostringstream d;
    bool ok = true;
    d << "size:essential/redundant";
    for (std::size_t size : {500, 2000, 8000}) {
        const auto csv = scratch() / ("synth_" + std::to_string(size) + ".csv");
        const auto out = scratch() / ("trend_" + std::to_string(size));
        const int cs = run_cli("synthesize --records " + std::to_string(size) + " --seed 1 --output " + csv.string());
        const int cr = run_cli("run --input " + csv.string() + " --output " + out.string());
        if (cs != 0 || cr != 0) {
            ok = false;
            d << ' ' << size << ":exit " << cs << '/' << cr;
            continue;
        }
        const auto summary = nlohmann::json::parse(slurp(out / "report/summary.json"));
        const auto& totals = summary.at("totals");
        d << ' ' << size << ':' << totals.at("essential").get<std::size_t>() << '/'
          << totals.at("redundant").get<std::size_t>();
    }
    return {ok, d.str()};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"1 apriori matches brute-force enumeration", apriori_oracle},
        {"2 emitted rules meet support >= 3 and confidence >= 0.10", rule_thresholds},
        {"3 redundancy elimination matches all-pairs oracle", redundancy_oracle},
        {"4 partition accounting holds under self-audit", partition_accounting},
        {"5 k-means invariants and two-clump recovery", kmeans_invariants},
        {"6 rendering goldens", rendering_goldens},
        {"7 end-to-end determinism on sample data", end_to_end_determinism},
        {"8 trend harness across 500/2000/8000 records", trend_harness},
    };
    int failed = 0;
    for (const auto& [name, check] : criteria) {
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::cout << (o.pass ? "PASS " : "FAIL ") << name << " (" << o.detail << ")\n";
        if (!o.pass) ++failed;
    }
    fs::remove_all(scratch());
    std::cout << (criteria.size() - failed) << '/' << criteria.size() << " criteria passed\n";
    return failed == 0 ? 0 : 1;
}

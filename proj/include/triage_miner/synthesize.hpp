#pragma once

// Deterministic synthetic bug-report datasets for exploring how rule counts
// and redundancy behave as the data grows.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "triage_miner/cluster.hpp"
#include "triage_miner/csv.hpp"
#include "triage_miner/error.hpp"
#include "triage_miner/ingest.hpp"

namespace triage_miner {

struct SynthesisOptions {
    std::size_t records = 1000;
    std::uint64_t seed = 0;
    std::size_t components = 12;
    std::size_t operating_systems = 5;
    std::size_t assignees = 20;
    double skew = 1.1;           // Zipf exponent for component, os and assignee popularity
    double team_affinity = 0.7;  // probability a bug goes to its component's team
};

namespace detail {

inline constexpr std::array<std::string_view, 20> kComponentNames = {
    "General", "Build Config", "MailNews: Message Display", "MailNews: Backend", "Bookmarks & History",
    "Preferences", "Sync", "Developer Tools: Debugger", "User Interface", "Networking",
    "Security", "Layout", "JavaScript Engine", "Toolbars", "Tabbed Browser",
    "Session Restore", "Downloads Panel", "Search", "Theme", "Installer"};

inline constexpr std::array<std::string_view, 10> kOsNames = {
    "All", "Linux", "Windows", "Mac OS X", "Unspecified", "Windows XP", "Windows 7", "FreeBSD", "Solaris", "Android"};

inline constexpr std::array<std::string_view, 24> kAssigneeNames = {
    "Ada Okafor",    "Bruno Lindqvist", "Chen Wei",      "Dana Whitfield", "Elif Kaya",    "Farid Haddad",
    "Greta Novak",   "Hiro Tanaka",     "Ines Duarte",   "Jonas Berg",     "Kavya Rao",    "Luca Romano",
    "Maya Cohen",    "Nils Jensen",     "Olga Petrova",  "Pablo Ruiz",     "Quinn Harper", "Rosa Alvarez",
    "Sven Larsen",   "Tara Singh",      "Umar Farouk",   "Vera Kuznetsova", "Will Turner", "Yara Nasser"};

inline std::string pooled_label(std::span<const std::string_view> pool, std::size_t index, std::string_view stem) {
    if (index < pool.size()) return std::string(pool[index]);
    return std::string(stem) + " " + std::to_string(index + 1);
}

/// Index drawn from unnormalised weights by inverse CDF.
inline std::size_t draw(std::mt19937_64& rng, std::span<const double> weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    const double target = unit_uniform(rng) * total;
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        acc += weights[i];
        if (acc > target) return i;
    }
    return weights.size() - 1;
}

inline std::vector<double> zipf_weights(std::size_t n, double exponent) {
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = 1.0 / std::pow(static_cast<double>(i + 1), exponent);
    return w;
}

}  // namespace detail

/// Rows with realistic-looking labels. Assignees cluster around components
/// so that class rules exist to be mined.
inline std::vector<RawBugRow> synthesize_rows(const SynthesisOptions& opt) {
    if (opt.records == 0 || opt.components == 0 || opt.operating_systems == 0 || opt.assignees == 0) {
        throw ParameterError("synthesis sizes must be positive");
    }
    if (!(opt.skew >= 0.0) || !(opt.team_affinity >= 0.0 && opt.team_affinity <= 1.0)) {
        throw ParameterError("skew must be >= 0 and team_affinity in [0, 1]");
    }
    static constexpr std::array<double, 7> kSeverityWeights = {2, 5, 12, 60, 8, 5, 8};
    static constexpr std::array<double, 5> kPriorityWeights = {10, 15, 55, 12, 8};
    static constexpr std::array<std::string_view, 7> kSeverityLabels = {
        "blocker", "critical", "major", "normal", "minor", "trivial", "enhancement"};

    const auto component_w = detail::zipf_weights(opt.components, opt.skew);
    const auto os_w = detail::zipf_weights(opt.operating_systems, opt.skew);
    const auto assignee_w = detail::zipf_weights(opt.assignees, opt.skew);
    const std::size_t team_size = std::min<std::size_t>(3, opt.assignees);
    const auto team_w = detail::zipf_weights(team_size, 1.0);

    std::mt19937_64 rng(opt.seed);
    std::vector<RawBugRow> rows;
    rows.reserve(opt.records);
    for (std::size_t i = 0; i < opt.records; ++i) {
        const auto sev = detail::draw(rng, kSeverityWeights);
        const auto pri = detail::draw(rng, kPriorityWeights);
        const auto comp = detail::draw(rng, component_w);
        const auto os = detail::draw(rng, os_w);
        std::size_t who = 0;
        if (detail::unit_uniform(rng) < opt.team_affinity) {
            who = (comp * team_size + detail::draw(rng, team_w)) % opt.assignees;
        } else {
            who = detail::draw(rng, assignee_w);
        }
        rows.push_back(RawBugRow{std::to_string(100000 + i), std::string(kSeverityLabels[sev]),
                                 "P" + std::to_string(pri + 1),
                                 detail::pooled_label(detail::kComponentNames, comp, "Component"),
                                 detail::pooled_label(detail::kOsNames, os, "OS"),
                                 detail::pooled_label(detail::kAssigneeNames, who, "Developer")});
    }
    return rows;
}

/// Writes rows under the default (Bugzilla export) column headers.
inline void write_rows_csv(std::ostream& out, std::span<const RawBugRow> rows, const ColumnMap& columns = {}) {
    csv::write_row(out, {columns.bug_id, columns.severity, columns.priority, columns.component,
                         columns.operating_system, columns.assignee});
    for (const auto& r : rows) {
        csv::write_row(out, {r.bug_id, r.severity, r.priority, r.component, r.operating_system, r.assignee});
    }
}

}  // namespace triage_miner

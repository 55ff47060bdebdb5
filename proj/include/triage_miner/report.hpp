#pragma once

// Rule rendering and the per-cluster report artifacts: rule tables, cluster
// sizes, essential/redundant counts and rule lengths.

#include <algorithm>
#include <array>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "triage_miner/csv.hpp"
#include "triage_miner/error.hpp"
#include "triage_miner/ingest.hpp"
#include "triage_miner/rules.hpp"

namespace triage_miner {

inline constexpr std::string_view kAnd = " ∧ ";
inline constexpr std::string_view kImplies = " ⇒ ";

/// 100 * support / antecedent_support, rounded half-up to two decimals.
/// Integral percentages print without a fraction ("75"), others keep both
/// digits ("52.94", "52.90").
inline std::string format_confidence_percent(std::size_t support, std::size_t antecedent_support) {
    if (antecedent_support == 0) throw ParameterError("antecedent support must be positive");
    const auto s = static_cast<unsigned __int128>(support);
    const auto a = static_cast<unsigned __int128>(antecedent_support);
    const auto hundredths = static_cast<std::uint64_t>((20000 * s + a) / (2 * a));
    std::string out = std::to_string(hundredths / 100);
    if (const auto frac = hundredths % 100; frac != 0) {
        out += '.';
        out += static_cast<char>('0' + frac / 10);
        out += static_cast<char>('0' + frac % 10);
    }
    return out;
}

/// `Severity {Normal} ∧ Priority {P3} ∧ Os {Linux} ∧ Component{Build Config}`;
/// attributes absent from the itemset are omitted.
inline std::string render_antecedent(const Itemset& antecedent, const Codebooks& books) {
    static constexpr std::array<std::pair<Attribute, std::string_view>, 4> kDisplay = {{
        {Attribute::Severity, "Severity {"},
        {Attribute::Priority, "Priority {"},
        {Attribute::OperatingSystem, "Os {"},
        {Attribute::Component, "Component{"},
    }};
    std::string out;
    for (const auto& [attribute, prefix] : kDisplay) {
        for (const auto& item : antecedent) {
            if (item.attribute != attribute) continue;
            if (!out.empty()) out += kAnd;
            out += prefix;
            out += books[attribute].decode(item.code);
            out += '}';
        }
    }
    return out;
}

inline std::string render_rule(const Rule& rule, const Codebooks& books) {
    std::string out = render_antecedent(rule.antecedent, books);
    out += kImplies;
    out += "Assignee {";
    out += books[Attribute::Assignee].decode(rule.consequent.code);
    out += "} @ (";
    out += std::to_string(rule.support_count);
    out += ',';
    out += format_confidence_percent(rule.support_count, rule.antecedent_support);
    out += "%)";
    return out;
}

/// Rule counts by antecedent length; index 0 holds length 1.
using LengthHistogram = std::array<std::size_t, kAttributeCount - 1>;

inline LengthHistogram length_histogram(std::span<const Rule> rules) {
    LengthHistogram h{};
    for (const auto& r : rules) {
        if (r.antecedent.empty() || r.antecedent.size() > h.size()) {
            throw ParameterError("rule antecedent length " + std::to_string(r.antecedent.size()) + " out of range");
        }
        ++h[r.antecedent.size() - 1];
    }
    return h;
}

struct RenderedRule {
    std::string text;
    std::string antecedent;
    std::string consequent;
    std::size_t support_count = 0;
    double confidence = 0.0;
    bool essential = true;
    std::string witness;  // rendered witness rule when redundant
};

struct ClusterReport {
    std::size_t cluster_index = 0;
    std::size_t size = 0;
    std::vector<std::string> top_assignees;
    std::vector<std::size_t> top_assignee_counts;
    std::size_t essential_count = 0;
    std::size_t redundant_count = 0;
    LengthHistogram length_histogram{};
    std::vector<RenderedRule> rules;  // essential first

    std::size_t rule_count() const noexcept { return essential_count + redundant_count; }
};

inline ClusterReport build_cluster_report(std::size_t cluster_index, std::span<const BugRecord> records,
                                          const RulePartition& partition, const Codebooks& books,
                                          std::span<const Code> top_assignee_codes) {
    ClusterReport report;
    report.cluster_index = cluster_index;
    report.size = records.size();

    std::map<Code, std::size_t> counts;
    for (const auto& r : records) ++counts[r.assignee];
    for (auto code : top_assignee_codes) {
        report.top_assignees.push_back(books[Attribute::Assignee].decode(code));
        report.top_assignee_counts.push_back(counts[code]);
    }

    report.essential_count = partition.essential.size();
    report.redundant_count = partition.redundant.size();

    std::vector<Rule> all = partition.essential;
    for (const auto& r : partition.redundant) all.push_back(r.rule);
    report.length_histogram = length_histogram(all);

    const auto render = [&](const Rule& r, bool essential) {
        return RenderedRule{render_rule(r, books),
                            render_antecedent(r.antecedent, books),
                            books[Attribute::Assignee].decode(r.consequent.code),
                            r.support_count,
                            r.confidence,
                            essential,
                            {}};
    };
    std::vector<Rule> essential = partition.essential;
    std::sort(essential.begin(), essential.end(), rule_order);
    for (const auto& r : essential) report.rules.push_back(render(r, true));

    std::vector<RedundantRule> redundant = partition.redundant;
    std::sort(redundant.begin(), redundant.end(),
              [](const auto& a, const auto& b) { return rule_order(a.rule, b.rule); });
    for (const auto& r : redundant) {
        auto rendered = render(r.rule, false);
        rendered.witness = render_rule(r.witness, books);
        report.rules.push_back(std::move(rendered));
    }
    return report;
}

/// Shortest round-trip decimal form of a double.
inline std::string format_real(double v) {
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

/// Human-readable cluster listing in the style of the rule tables.
inline std::string render_cluster_text(const ClusterReport& report) {
    std::ostringstream out;
    out << "Cluster " << report.cluster_index << '\n';
    out << "Records: " << report.size << '\n';
    out << "Top assignees:";
    for (std::size_t i = 0; i < report.top_assignees.size(); ++i) {
        out << (i == 0 ? " " : ", ") << report.top_assignees[i] << " (" << report.top_assignee_counts[i] << ')';
    }
    out << '\n';
    out << "Rules: " << report.rule_count() << " (essential " << report.essential_count << ", redundant "
        << report.redundant_count << ")\n";
    out << "Rules by antecedent length:";
    for (std::size_t i = 0; i < report.length_histogram.size(); ++i) {
        out << ' ' << (i + 1) << ':' << report.length_histogram[i];
    }
    out << "\n\nEssential rules\n";
    std::size_t n = 0;
    for (const auto& r : report.rules) {
        if (r.essential) out << ++n << ". " << r.text << '\n';
    }
    out << "\nRedundant rules\n";
    n = 0;
    for (const auto& r : report.rules) {
        if (!r.essential) {
            out << ++n << ". " << r.text << '\n';
            out << "   subsumed by " << r.witness << '\n';
        }
    }
    return out.str();
}

inline std::string cluster_sizes_csv(std::span<const ClusterReport> reports) {
    std::ostringstream out;
    csv::write_row(out, {"cluster", "size"});
    for (const auto& r : reports) csv::write_row(out, {std::to_string(r.cluster_index), std::to_string(r.size)});
    return out.str();
}

inline std::string essential_redundant_csv(std::span<const ClusterReport> reports) {
    std::ostringstream out;
    csv::write_row(out, {"cluster", "essential", "redundant"});
    for (const auto& r : reports) {
        csv::write_row(out, {std::to_string(r.cluster_index), std::to_string(r.essential_count),
                             std::to_string(r.redundant_count)});
    }
    return out.str();
}

inline std::string rule_lengths_csv(std::span<const ClusterReport> reports) {
    std::ostringstream out;
    csv::write_row(out, {"cluster", "length_1", "length_2", "length_3", "length_4"});
    for (const auto& r : reports) {
        std::vector<std::string> row{std::to_string(r.cluster_index)};
        for (auto c : r.length_histogram) row.push_back(std::to_string(c));
        csv::write_row(out, row);
    }
    return out.str();
}

inline std::string rules_csv(std::span<const ClusterReport> reports) {
    std::ostringstream out;
    csv::write_row(out, {"cluster", "antecedent", "consequent", "support_count", "confidence", "status", "witness"});
    for (const auto& report : reports) {
        for (const auto& r : report.rules) {
            csv::write_row(out, {std::to_string(report.cluster_index), r.antecedent, r.consequent,
                                 std::to_string(r.support_count), format_real(r.confidence),
                                 r.essential ? "essential" : "redundant", r.witness});
        }
    }
    return out.str();
}

inline nlohmann::json rules_json(std::span<const ClusterReport> reports) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& report : reports) {
        for (const auto& r : report.rules) {
            nlohmann::json row = {{"cluster", report.cluster_index},
                                  {"rule", r.text},
                                  {"antecedent", r.antecedent},
                                  {"consequent", r.consequent},
                                  {"support_count", r.support_count},
                                  {"confidence", r.confidence},
                                  {"status", r.essential ? "essential" : "redundant"}};
            if (!r.essential) row["witness"] = r.witness;
            out.push_back(std::move(row));
        }
    }
    return out;
}

inline nlohmann::json cluster_report_to_json(const ClusterReport& r) {
    nlohmann::json top = nlohmann::json::array();
    for (std::size_t i = 0; i < r.top_assignees.size(); ++i) {
        top.push_back({{"assignee", r.top_assignees[i]}, {"bug_count", r.top_assignee_counts[i]}});
    }
    nlohmann::json lengths = nlohmann::json::object();
    for (std::size_t i = 0; i < r.length_histogram.size(); ++i) lengths[std::to_string(i + 1)] = r.length_histogram[i];
    return {{"cluster", r.cluster_index},
            {"size", r.size},
            {"top_assignees", std::move(top)},
            {"rule_count", r.rule_count()},
            {"essential_count", r.essential_count},
            {"redundant_count", r.redundant_count},
            {"length_histogram", std::move(lengths)}};
}

}  // namespace triage_miner

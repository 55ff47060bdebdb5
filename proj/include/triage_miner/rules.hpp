#pragma once

// Class association rules (assignee consequent) and redundant-rule elimination.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "triage_miner/error.hpp"
#include "triage_miner/ingest.hpp"
#include "triage_miner/mine.hpp"

namespace triage_miner {

/// antecedent => consequent. Confidence is support_count / antecedent_support;
/// both counts are kept so comparisons can be exact.
struct Rule {
    Itemset antecedent;
    Item consequent;
    std::size_t support_count = 0;
    std::size_t antecedent_support = 0;
    double confidence = 0.0;

    static Rule make(Itemset antecedent, Item consequent, std::size_t support, std::size_t antecedent_support) {
        return Rule{std::move(antecedent), consequent, support, antecedent_support,
                    static_cast<double>(support) / static_cast<double>(antecedent_support)};
    }

    friend bool operator==(const Rule&, const Rule&) = default;
};

/// Sign of conf(a) - conf(b), by cross-multiplication.
inline int compare_confidence(const Rule& a, const Rule& b) noexcept {
    const auto lhs = static_cast<unsigned __int128>(a.support_count) * b.antecedent_support;
    const auto rhs = static_cast<unsigned __int128>(b.support_count) * a.antecedent_support;
    return lhs < rhs ? -1 : (lhs > rhs ? 1 : 0);
}

/// Output order: antecedent size asc, confidence desc, support desc, then
/// canonical antecedent and consequent.
inline bool rule_order(const Rule& a, const Rule& b) noexcept {
    if (a.antecedent.size() != b.antecedent.size()) return a.antecedent.size() < b.antecedent.size();
    if (const int c = compare_confidence(a, b); c != 0) return c > 0;
    if (a.support_count != b.support_count) return a.support_count > b.support_count;
    if (a.antecedent != b.antecedent) return a.antecedent < b.antecedent;
    return a.consequent < b.consequent;
}

/// Rules A => c for every frequent A u {c} with c an allowed assignee and A
/// free of assignee items, keeping those with confidence >= min_confidence.
inline std::vector<Rule> generate_class_rules(const FrequentItemsetTable& table, double min_confidence,
                                              const std::set<Code>& allowed_consequents) {
    if (!(min_confidence > 0.0 && min_confidence <= 1.0)) {
        throw ParameterError("min_confidence must be in (0, 1]");
    }
    if (allowed_consequents.empty()) throw ParameterError("no allowed consequents");

    std::vector<Rule> rules;
    for (const auto& [set, support] : table.supports) {
        if (set.size() < 2) continue;
        // Assignee sorts last, so a rule itemset ends with its only assignee item.
        const Item& last = set[set.size() - 1];
        if (last.attribute != Attribute::Assignee || !allowed_consequents.contains(last.code)) continue;
        Itemset antecedent = set.without_index(set.size() - 1);
        if (antecedent.find(Attribute::Assignee)) continue;

        const auto antecedent_support = table.supports.find(antecedent);
        if (antecedent_support == table.supports.end()) {
            throw TableIntegrityError("frequent itemset table lacks a subset of a stored itemset");
        }
        Rule rule = Rule::make(std::move(antecedent), last, support, antecedent_support->second);
        if (rule.confidence >= min_confidence) rules.push_back(std::move(rule));
    }
    std::sort(rules.begin(), rules.end(), rule_order);
    return rules;
}

/// The n most frequent assignees, count desc then code asc.
inline std::vector<Code> top_assignees(std::span<const BugRecord> records, std::size_t n) {
    std::map<Code, std::size_t> counts;
    for (const auto& r : records) ++counts[r.assignee];
    std::vector<std::pair<Code, std::size_t>> ranked(counts.begin(), counts.end());
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    std::vector<Code> out;
    for (std::size_t i = 0; i < ranked.size() && i < n; ++i) out.push_back(ranked[i].first);
    return out;
}

struct RedundantRule {
    Rule rule;
    Rule witness;

    friend bool operator==(const RedundantRule&, const RedundantRule&) = default;
};

struct RulePartition {
    std::vector<Rule> essential;
    std::vector<RedundantRule> redundant;

    std::size_t total() const noexcept { return essential.size() + redundant.size(); }
};

/// True when `witness` makes `rule` redundant: same consequent, strictly
/// smaller antecedent, confidence no lower.
inline bool subsumes(const Rule& witness, const Rule& rule) noexcept {
    return witness.consequent == rule.consequent && witness.antecedent.is_strict_subset_of(rule.antecedent) &&
           compare_confidence(witness, rule) >= 0;
}

/// Splits rules into essential and redundant. Rules are visited by ascending
/// antecedent size, so every witness is an essential rule. A redundant rule
/// records the qualifying essential rule with the smallest antecedent, then
/// highest confidence, then canonical antecedent.
inline RulePartition eliminate_redundant(std::vector<Rule> rules) {
    std::set<std::pair<Itemset, Item>> seen;
    for (const auto& r : rules) {
        if (!seen.insert({r.antecedent, r.consequent}).second) throw DuplicateRuleError("duplicate rule in input");
    }
    std::sort(rules.begin(), rules.end(), rule_order);

    std::map<std::pair<Itemset, Item>, std::size_t> essential_index;  // -> position in partition.essential
    RulePartition partition;
    for (auto& rule : rules) {
        const Rule* witness = nullptr;
        const std::size_t m = rule.antecedent.size();
        for (std::uint32_t mask = 1; mask + 1 < (1u << m); ++mask) {
            auto it = essential_index.find({rule.antecedent.subset(mask), rule.consequent});
            if (it == essential_index.end()) continue;
            const Rule& w = partition.essential[it->second];
            if (compare_confidence(w, rule) < 0) continue;
            if (witness == nullptr || w.antecedent.size() < witness->antecedent.size() ||
                (w.antecedent.size() == witness->antecedent.size() &&
                 (compare_confidence(w, *witness) > 0 ||
                  (compare_confidence(w, *witness) == 0 && w.antecedent < witness->antecedent)))) {
                witness = &w;
            }
        }
        if (witness != nullptr) {
            partition.redundant.push_back({std::move(rule), *witness});
        } else {
            essential_index.emplace(std::pair{rule.antecedent, rule.consequent}, partition.essential.size());
            partition.essential.push_back(std::move(rule));
        }
    }
    return partition;
}

/// Re-checks a partition against its input: disjoint cover, witness validity,
/// thresholds. Returns one message per violation.
inline std::vector<std::string> audit_partition(const RulePartition& partition, std::size_t input_count,
                                                std::size_t min_support_count, double min_confidence) {
    std::vector<std::string> problems;
    if (partition.total() != input_count) {
        problems.push_back("essential + redundant = " + std::to_string(partition.total()) + ", expected " +
                           std::to_string(input_count));
    }
    std::set<std::pair<Itemset, Item>> essential_keys;
    for (const auto& r : partition.essential) essential_keys.insert({r.antecedent, r.consequent});

    const auto check_rule = [&](const Rule& r) {
        if (r.support_count < min_support_count) problems.push_back("rule below minimum support");
        if (r.confidence < min_confidence || r.confidence > 1.0) problems.push_back("rule confidence out of range");
        if (r.consequent.attribute != Attribute::Assignee || r.antecedent.find(Attribute::Assignee)) {
            problems.push_back("rule is not a class association rule");
        }
        if (r.antecedent.empty() || r.antecedent.size() > kAttributeCount - 1) {
            problems.push_back("rule antecedent size out of range");
        }
    };
    for (const auto& r : partition.essential) check_rule(r);
    for (const auto& [r, w] : partition.redundant) {
        check_rule(r);
        if (!subsumes(w, r)) problems.push_back("witness does not subsume its redundant rule");
        if (!essential_keys.contains({w.antecedent, w.consequent})) problems.push_back("witness is not essential");
    }
    return problems;
}

}  // namespace triage_miner

#pragma once

// Brute-force reference implementations and random instance generators.
// These deliberately share no code path with apriori() or
// eliminate_redundant(): itemsets are counted by enumerating every subset of
// every transaction, and redundancy by an all-pairs scan.

#include <cstddef>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "triage_miner/ingest.hpp"
#include "triage_miner/mine.hpp"
#include "triage_miner/rules.hpp"

namespace triage_miner::oracle {

/// Exact support of every itemset of size 1..max_size that meets min_support.
inline std::map<Itemset, std::size_t> enumerate_frequent_itemsets(std::span<const Transaction> transactions,
                                                                  std::size_t min_support, std::size_t max_size) {
    std::map<Itemset, std::size_t> counts;
    for (const auto& t : transactions) {
        const std::size_t m = t.itemset.size();
        for (std::uint32_t mask = 1; mask < (1u << m); ++mask) {
            std::vector<Item> items;
            for (std::size_t i = 0; i < m; ++i) {
                if (mask & (1u << i)) items.push_back(t.itemset[i]);
            }
            if (items.size() <= max_size) ++counts[Itemset(std::move(items))];
        }
    }
    std::erase_if(counts, [&](const auto& kv) { return kv.second < min_support; });
    return counts;
}

/// Naive subsumption: a rule is redundant iff some other rule in the set has
/// the same consequent, a strict-subset antecedent and confidence no lower.
/// Returns the (antecedent, consequent) keys of the essential rules.
inline std::set<std::pair<Itemset, Item>> essential_keys_all_pairs(std::span<const Rule> rules) {
    std::set<std::pair<Itemset, Item>> essential;
    for (const auto& r : rules) {
        bool redundant = false;
        for (const auto& w : rules) {
            if (&w == &r || !(w.consequent == r.consequent)) continue;
            if (w.antecedent.size() >= r.antecedent.size()) continue;
            bool subset = true;
            for (const auto& item : w.antecedent) subset = subset && r.antecedent.contains(item);
            if (!subset) continue;
            // w.s / w.a >= r.s / r.a
            if (static_cast<unsigned __int128>(w.support_count) * r.antecedent_support >=
                static_cast<unsigned __int128>(r.support_count) * w.antecedent_support) {
                redundant = true;
                break;
            }
        }
        if (!redundant) essential.insert({r.antecedent, r.consequent});
    }
    return essential;
}

/// Random one-value-per-attribute transactions with `codes` values per attribute.
inline std::vector<Transaction> random_transactions(std::mt19937_64& rng, std::size_t count, Code codes) {
    std::vector<Transaction> out;
    out.reserve(count);
    std::uniform_int_distribution<Code> pick(1, codes);
    for (std::size_t i = 0; i < count; ++i) {
        std::vector<Item> items;
        for (auto a : kAllAttributes) items.push_back({a, pick(rng)});
        out.push_back({std::to_string(i), Itemset(std::move(items))});
    }
    return out;
}

/// Random set of distinct class rules over a small item universe so that
/// subset relations are common. Confidence lies in (0, 1].
inline std::vector<Rule> random_rules(std::mt19937_64& rng, std::size_t max_rules, Code codes = 2,
                                      Code assignees = 2) {
    std::uniform_int_distribution<std::size_t> count_dist(1, max_rules);
    std::uniform_int_distribution<Code> code_dist(0, codes);  // 0 = attribute absent
    std::uniform_int_distribution<Code> who_dist(1, assignees);
    std::uniform_int_distribution<std::size_t> ante_dist(1, 12);

    const std::size_t target = count_dist(rng);
    std::set<std::pair<Itemset, Item>> seen;
    std::vector<Rule> rules;
    for (std::size_t attempts = 0; rules.size() < target && attempts < 50 * max_rules; ++attempts) {
        std::vector<Item> items;
        for (auto a : {Attribute::Severity, Attribute::Priority, Attribute::Component, Attribute::OperatingSystem}) {
            if (const Code c = code_dist(rng); c != 0) items.push_back({a, c});
        }
        if (items.empty()) continue;
        Itemset antecedent(std::move(items));
        const Item consequent{Attribute::Assignee, who_dist(rng)};
        if (!seen.insert({antecedent, consequent}).second) continue;
        const std::size_t ante = ante_dist(rng);
        const std::size_t support = std::uniform_int_distribution<std::size_t>(1, ante)(rng);
        rules.push_back(Rule::make(std::move(antecedent), consequent, support, ante));
    }
    return rules;
}

/// Differences between apriori() and full enumeration; empty when they agree.
inline std::vector<std::string> diff_apriori(std::span<const Transaction> transactions, std::size_t min_support,
                                             std::size_t max_size = kMaxItemsetSize) {
    std::vector<std::string> diffs;
    const auto fast = apriori(transactions, min_support, max_size);
    const auto slow = enumerate_frequent_itemsets(transactions, min_support, max_size);
    if (fast.supports.size() != slow.size()) {
        diffs.push_back("apriori found " + std::to_string(fast.supports.size()) + " itemsets, enumeration " +
                        std::to_string(slow.size()));
    }
    for (const auto& [set, count] : slow) {
        auto it = fast.supports.find(set);
        if (it == fast.supports.end()) {
            diffs.push_back("itemset of size " + std::to_string(set.size()) + " missing from apriori");
        } else if (it->second != count) {
            diffs.push_back("support mismatch: apriori " + std::to_string(it->second) + ", enumeration " +
                            std::to_string(count));
        }
    }
    return diffs;
}

/// Differences between eliminate_redundant() and the all-pairs scan, plus
/// any witness that fails an independent subsumption check.
inline std::vector<std::string> diff_redundancy(std::span<const Rule> rules) {
    std::vector<std::string> diffs;
    const auto partition = eliminate_redundant(std::vector<Rule>(rules.begin(), rules.end()));
    const auto expected = essential_keys_all_pairs(rules);
    std::set<std::pair<Itemset, Item>> got;
    for (const auto& r : partition.essential) got.insert({r.antecedent, r.consequent});
    if (got != expected) {
        diffs.push_back("essential set has " + std::to_string(got.size()) + " rules, all-pairs scan " +
                        std::to_string(expected.size()));
    }
    if (partition.essential.size() + partition.redundant.size() != rules.size()) {
        diffs.push_back("partition does not cover the input exactly once");
    }
    for (const auto& [r, w] : partition.redundant) {
        bool subset = w.antecedent.size() < r.antecedent.size();
        for (const auto& item : w.antecedent) subset = subset && r.antecedent.contains(item);
        const bool conf_ok = static_cast<unsigned __int128>(w.support_count) * r.antecedent_support >=
                             static_cast<unsigned __int128>(r.support_count) * w.antecedent_support;
        if (!(w.consequent == r.consequent) || !subset || !conf_ok) diffs.push_back("invalid witness");
        if (!expected.contains({w.antecedent, w.consequent})) diffs.push_back("witness is not essential");
    }
    return diffs;
}

struct VerifySummary {
    std::size_t instances = 0;
    std::size_t failures = 0;
    std::vector<std::string> messages;  // first few diffs
};

/// Random apriori-vs-enumeration trials with min_support cycling over {1, 2, 3, 5}.
inline VerifySummary verify_apriori_random(std::size_t datasets, std::size_t max_transactions, Code max_codes,
                                           std::uint64_t seed) {
    VerifySummary s;
    std::mt19937_64 rng(seed);
    static constexpr std::size_t kSupports[] = {1, 2, 3, 5};
    for (std::size_t d = 0; d < datasets; ++d) {
        const auto n = std::uniform_int_distribution<std::size_t>(0, max_transactions)(rng);
        const auto codes = std::uniform_int_distribution<Code>(1, max_codes)(rng);
        const auto txns = random_transactions(rng, n, codes);
        const auto diffs = diff_apriori(txns, kSupports[d % 4]);
        ++s.instances;
        if (!diffs.empty()) {
            ++s.failures;
            if (s.messages.size() < 10) s.messages.push_back("dataset " + std::to_string(d) + ": " + diffs.front());
        }
    }
    return s;
}

inline VerifySummary verify_redundancy_random(std::size_t rule_sets, std::size_t max_rules, std::uint64_t seed) {
    VerifySummary s;
    std::mt19937_64 rng(seed);
    for (std::size_t d = 0; d < rule_sets; ++d) {
        const auto codes = std::uniform_int_distribution<Code>(1, 3)(rng);
        const auto rules = random_rules(rng, max_rules, codes, 2);
        const auto diffs = diff_redundancy(rules);
        ++s.instances;
        if (!diffs.empty()) {
            ++s.failures;
            if (s.messages.size() < 10) s.messages.push_back("rule set " + std::to_string(d) + ": " + diffs.front());
        }
    }
    return s;
}

}  // namespace triage_miner::oracle

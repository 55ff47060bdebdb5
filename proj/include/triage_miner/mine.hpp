#pragma once

// Level-wise Apriori over bug transactions with vertical (tid-list) support
// counting. A transaction holds exactly one item per attribute.

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <iterator>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "triage_miner/attribute.hpp"
#include "triage_miner/error.hpp"
#include "triage_miner/ingest.hpp"

namespace triage_miner {

struct Item {
    Attribute attribute = Attribute::Severity;
    Code code = 0;

    friend auto operator<=>(const Item&, const Item&) = default;
};

/// Set of items in canonical order (attribute, then code). An itemset may
/// hold two items of the same attribute; such a set never occurs in a
/// transaction.
class Itemset {
public:
    Itemset() = default;
    Itemset(std::initializer_list<Item> items) : items_(items) { canonicalize(); }
    explicit Itemset(std::vector<Item> items) : items_(std::move(items)) { canonicalize(); }

    std::span<const Item> items() const noexcept { return items_; }
    std::size_t size() const noexcept { return items_.size(); }
    bool empty() const noexcept { return items_.empty(); }
    const Item& operator[](std::size_t i) const noexcept { return items_[i]; }
    auto begin() const noexcept { return items_.begin(); }
    auto end() const noexcept { return items_.end(); }

    bool contains(const Item& item) const noexcept {
        return std::binary_search(items_.begin(), items_.end(), item);
    }

    std::optional<Item> find(Attribute a) const noexcept {
        for (const auto& i : items_) {
            if (i.attribute == a) return i;
        }
        return std::nullopt;
    }

    /// True when no attribute appears twice.
    bool one_per_attribute() const noexcept {
        for (std::size_t i = 1; i < items_.size(); ++i) {
            if (items_[i].attribute == items_[i - 1].attribute) return false;
        }
        return true;
    }

    bool is_subset_of(const Itemset& other) const noexcept {
        return std::includes(other.items_.begin(), other.items_.end(), items_.begin(), items_.end());
    }

    bool is_strict_subset_of(const Itemset& other) const noexcept {
        return size() < other.size() && is_subset_of(other);
    }

    Itemset with(const Item& item) const {
        Itemset out = *this;
        out.items_.insert(std::upper_bound(out.items_.begin(), out.items_.end(), item), item);
        out.canonicalize();
        return out;
    }

    Itemset without(const Item& item) const {
        Itemset out = *this;
        std::erase(out.items_, item);
        return out;
    }

    Itemset without_index(std::size_t i) const {
        Itemset out = *this;
        out.items_.erase(out.items_.begin() + static_cast<std::ptrdiff_t>(i));
        return out;
    }

    /// Items selected by the bits of `mask` (bit i -> items()[i]).
    Itemset subset(std::uint32_t mask) const {
        Itemset out;
        for (std::size_t i = 0; i < items_.size(); ++i) {
            if (mask & (1u << i)) out.items_.push_back(items_[i]);
        }
        return out;
    }

    friend bool operator==(const Itemset&, const Itemset&) = default;
    friend auto operator<=>(const Itemset& a, const Itemset& b) {
        return std::lexicographical_compare_three_way(a.items_.begin(), a.items_.end(), b.items_.begin(),
                                                      b.items_.end());
    }

private:
    void canonicalize() {
        std::sort(items_.begin(), items_.end());
        items_.erase(std::unique(items_.begin(), items_.end()), items_.end());
    }

    std::vector<Item> items_;
};

struct Transaction {
    std::string bug_id;
    Itemset itemset;
};

inline Transaction to_transaction(const BugRecord& r) {
    return {r.bug_id, Itemset{{Attribute::Severity, r.severity},
                              {Attribute::Priority, r.priority},
                              {Attribute::Component, r.component},
                              {Attribute::OperatingSystem, r.operating_system},
                              {Attribute::Assignee, r.assignee}}};
}

inline std::vector<Transaction> to_transactions(std::span<const BugRecord> records) {
    std::vector<Transaction> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back(to_transaction(r));
    return out;
}

/// Number of transactions containing `candidate` (horizontal scan).
inline std::size_t support_count(const Itemset& candidate, std::span<const Transaction> transactions) {
    return static_cast<std::size_t>(std::count_if(transactions.begin(), transactions.end(), [&](const auto& t) {
        return candidate.is_subset_of(t.itemset);
    }));
}

struct FrequentItemsetTable {
    std::map<Itemset, std::size_t> supports;
    std::size_t min_support_count = 1;
    std::size_t transaction_count = 0;

    std::optional<std::size_t> find(const Itemset& s) const {
        if (s.empty()) return transaction_count;
        auto it = supports.find(s);
        if (it == supports.end()) return std::nullopt;
        return it->second;
    }

    std::size_t size() const noexcept { return supports.size(); }
    bool empty() const noexcept { return supports.empty(); }

    friend bool operator==(const FrequentItemsetTable&, const FrequentItemsetTable&) = default;
};

inline constexpr std::size_t kMaxItemsetSize = kAttributeCount;

struct AprioriOptions {
    /// Skip joins of two items with the same attribute. Such candidates have
    /// support 0, so disabling this never changes the result.
    bool attribute_pruning = true;
};

namespace detail {

using TidList = std::vector<std::uint32_t>;

inline TidList intersect(const TidList& a, const TidList& b) {
    TidList out;
    out.reserve(std::min(a.size(), b.size()));
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

}  // namespace detail

/// Every itemset of size 1..max_size with support >= min_support_count.
inline FrequentItemsetTable apriori(std::span<const Transaction> transactions, std::size_t min_support_count,
                                    std::size_t max_size = kMaxItemsetSize, AprioriOptions options = {}) {
    if (min_support_count == 0) throw ParameterError("min_support_count must be positive");
    if (max_size == 0 || max_size > kMaxItemsetSize) {
        throw ParameterError("max_size must be in 1.." + std::to_string(kMaxItemsetSize));
    }

    FrequentItemsetTable table;
    table.min_support_count = min_support_count;
    table.transaction_count = transactions.size();

    std::map<Item, detail::TidList> vertical;
    for (std::size_t t = 0; t < transactions.size(); ++t) {
        for (const auto& item : transactions[t].itemset) vertical[item].push_back(static_cast<std::uint32_t>(t));
    }

    // Current level: frequent itemsets in canonical order with their tid-lists.
    std::vector<std::pair<Itemset, detail::TidList>> level;
    for (auto& [item, tids] : vertical) {
        if (tids.size() >= min_support_count) level.emplace_back(Itemset{item}, std::move(tids));
    }

    for (std::size_t size = 1; !level.empty(); ++size) {
        for (const auto& [set, tids] : level) table.supports.emplace(set, tids.size());
        if (size == max_size) break;

        std::vector<std::pair<Itemset, detail::TidList>> next;
        for (std::size_t i = 0; i < level.size(); ++i) {
            const auto& a = level[i].first;
            for (std::size_t j = i + 1; j < level.size(); ++j) {
                const auto& b = level[j].first;
                // Join on a shared (size-1)-prefix; the level is sorted, so stop at the first mismatch.
                if (!std::equal(a.begin(), a.end() - 1, b.begin())) break;
                const Item& last_a = a[size - 1];
                const Item& last_b = b[size - 1];
                if (options.attribute_pruning && last_a.attribute == last_b.attribute) continue;

                Itemset candidate = a.with(last_b);
                // Dropping last_a or last_b yields b or a; only prefix drops need a lookup.
                bool all_subsets_frequent = true;
                for (std::size_t drop = 0; drop + 1 < size && all_subsets_frequent; ++drop) {
                    all_subsets_frequent = table.supports.contains(candidate.without_index(drop));
                }
                if (!all_subsets_frequent) continue;

                auto tids = detail::intersect(level[i].second, level[j].second);
                if (tids.size() >= min_support_count) next.emplace_back(std::move(candidate), std::move(tids));
            }
        }
        std::sort(next.begin(), next.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
        level = std::move(next);
    }
    return table;
}

/// Downward closure and threshold checks on a table; returns violations.
inline std::vector<std::string> audit_frequent_table(const FrequentItemsetTable& table) {
    std::vector<std::string> problems;
    for (const auto& [set, count] : table.supports) {
        if (count < table.min_support_count) problems.push_back("stored itemset below minimum support");
        if (count > table.transaction_count) problems.push_back("support exceeds transaction count");
        for (std::size_t i = 0; i < set.size() && set.size() > 1; ++i) {
            const auto sub = table.supports.find(set.without_index(i));
            if (sub == table.supports.end()) {
                problems.push_back("table is not downward closed");
            } else if (sub->second < count) {
                problems.push_back("subset support below superset support");
            }
        }
    }
    return problems;
}

inline nlohmann::json item_to_json(const Item& item) {
    return {{"attribute", std::string(attribute_name(item.attribute))}, {"code", item.code}};
}

/// Debug dump of a frequent-itemset table (codes, not labels).
inline nlohmann::json frequent_itemsets_to_json(const FrequentItemsetTable& table) {
    nlohmann::json sets = nlohmann::json::array();
    for (const auto& [set, count] : table.supports) {
        nlohmann::json items = nlohmann::json::array();
        for (const auto& item : set) items.push_back(item_to_json(item));
        sets.push_back({{"items", std::move(items)}, {"support_count", count}});
    }
    return {{"min_support_count", table.min_support_count},
            {"transaction_count", table.transaction_count},
            {"itemsets", std::move(sets)}};
}

}  // namespace triage_miner

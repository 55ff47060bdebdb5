#pragma once

// Bug-report CSV ingestion and categorical encoding.

#include <array>
#include <cstddef>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "triage_miner/attribute.hpp"
#include "triage_miner/csv.hpp"
#include "triage_miner/error.hpp"

namespace triage_miner {

/// Category used for blank or "--" attribute cells.
inline constexpr std::string_view kUnspecified = "Unspecified";

/// Logical field -> CSV header name. Defaults follow Bugzilla's CSV export.
struct ColumnMap {
    std::string bug_id = "bug_id";
    std::string severity = "bug_severity";
    std::string priority = "priority";
    std::string component = "component";
    std::string operating_system = "op_sys";
    std::string assignee = "assigned_to";

    bool operator==(const ColumnMap&) const = default;
};

struct RawBugRow {
    std::string bug_id;
    std::string severity;
    std::string priority;
    std::string component;
    std::string operating_system;
    std::string assignee;

    const std::string& label(Attribute a) const noexcept {
        switch (a) {
            case Attribute::Severity: return severity;
            case Attribute::Priority: return priority;
            case Attribute::Component: return component;
            case Attribute::OperatingSystem: return operating_system;
            case Attribute::Assignee: return assignee;
        }
        return assignee;
    }

    friend bool operator==(const RawBugRow&, const RawBugRow&) = default;
};

struct BugRecord {
    std::string bug_id;
    Code severity = 0;
    Code priority = 0;
    Code component = 0;
    Code operating_system = 0;
    Code assignee = 0;

    Code code(Attribute a) const noexcept {
        switch (a) {
            case Attribute::Severity: return severity;
            case Attribute::Priority: return priority;
            case Attribute::Component: return component;
            case Attribute::OperatingSystem: return operating_system;
            case Attribute::Assignee: return assignee;
        }
        return 0;
    }

    friend bool operator==(const BugRecord&, const BugRecord&) = default;
};

/// Bijective label <-> code mapping for one attribute. Codes are 1..size().
/// Lookup is case-insensitive and ignores surrounding whitespace; the stored
/// label keeps the casing it was first seen with.
class Codebook {
public:
    explicit Codebook(Attribute attribute) : attribute_(attribute) {}

    Codebook(Attribute attribute, std::initializer_list<std::string_view> labels)
        : attribute_(attribute) {
        for (auto l : labels) learn(l);
        fixed_ = true;
    }

    Attribute attribute() const noexcept { return attribute_; }
    std::size_t size() const noexcept { return labels_.size(); }
    bool fixed() const noexcept { return fixed_; }

    std::optional<Code> find(std::string_view label) const {
        auto it = forward_.find(detail::normalize_label(label));
        if (it == forward_.end()) return std::nullopt;
        return it->second;
    }

    Code encode(std::string_view label) const {
        if (auto c = find(label)) return *c;
        throw UnknownCategoryError(std::string(attribute_name(attribute_)), std::string(label));
    }

    /// Returns the existing code or appends a new one. Fixed codebooks never grow.
    Code learn(std::string_view label) {
        if (auto c = find(label)) return *c;
        if (fixed_) {
            throw UnknownCategoryError(std::string(attribute_name(attribute_)), std::string(label));
        }
        labels_.emplace_back(detail::trim(label));
        const auto code = static_cast<Code>(labels_.size());
        forward_.emplace(detail::normalize_label(label), code);
        return code;
    }

    bool contains(Code code) const noexcept { return code >= 1 && code <= labels_.size(); }

    const std::string& decode(Code code) const {
        if (!contains(code)) {
            throw CodebookError("no " + std::string(attribute_name(attribute_)) + " label for code " +
                                std::to_string(code));
        }
        return labels_[code - 1];
    }

    /// Labels in code order (index 0 holds code 1).
    std::span<const std::string> labels() const noexcept { return labels_; }

private:
    Attribute attribute_;
    bool fixed_ = false;
    std::vector<std::string> labels_;
    std::unordered_map<std::string, Code> forward_;
};

inline Codebook severity_codebook() {
    return Codebook(Attribute::Severity, {"Blocker", "Critical", "Major", "Normal", "Minor",
                                          "Trivial", "Enhancement"});
}

inline Codebook priority_codebook() {
    return Codebook(Attribute::Priority, {"P1", "P2", "P3", "P4", "P5"});
}

inline Code encode_severity(std::string_view label) {
    static const Codebook book = severity_codebook();
    return book.encode(label);
}

inline Code encode_priority(std::string_view label) {
    static const Codebook book = priority_codebook();
    return book.encode(label);
}

struct Codebooks {
    std::array<Codebook, kAttributeCount> books{
        severity_codebook(), priority_codebook(), Codebook(Attribute::Component),
        Codebook(Attribute::OperatingSystem), Codebook(Attribute::Assignee)};

    const Codebook& operator[](Attribute a) const noexcept { return books[index_of(a)]; }
    Codebook& operator[](Attribute a) noexcept { return books[index_of(a)]; }
};

struct EncodedDataset {
    Codebooks codebooks;
    std::vector<BugRecord> records;
};

/// Parses a bug-report CSV export. One row per data line, in file order.
inline std::vector<RawBugRow> parse_csv(std::istream& source, const ColumnMap& columns = {}) {
    auto records = csv::read(source);
    if (records.empty()) throw RowError(1, "missing header row");

    const auto& header = records.front().fields;
    const auto column_index = [&](const std::string& name) {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (detail::trim(header[i]) == detail::trim(name)) return i;
        }
        throw SchemaError(name);
    };
    const std::array<std::size_t, 6> idx = {
        column_index(columns.bug_id),    column_index(columns.severity),
        column_index(columns.priority),  column_index(columns.component),
        column_index(columns.operating_system), column_index(columns.assignee)};

    const auto attribute_cell = [](std::string_view cell) {
        cell = detail::trim(cell);
        if (cell.empty() || cell == "--") return std::string(kUnspecified);
        return std::string(cell);
    };

    std::vector<RawBugRow> rows;
    rows.reserve(records.size() - 1);
    std::unordered_set<std::string> seen;
    for (std::size_t r = 1; r < records.size(); ++r) {
        const auto& rec = records[r];
        if (rec.fields.size() != header.size()) {
            throw RowError(rec.line, "expected " + std::to_string(header.size()) + " fields, got " +
                                         std::to_string(rec.fields.size()));
        }
        RawBugRow row;
        row.bug_id = std::string(detail::trim(rec.fields[idx[0]]));
        if (row.bug_id.empty()) throw RowError(rec.line, "empty bug id");
        if (!seen.insert(row.bug_id).second) throw DuplicateIdError(row.bug_id);
        row.severity = attribute_cell(rec.fields[idx[1]]);
        row.priority = attribute_cell(rec.fields[idx[2]]);
        row.component = attribute_cell(rec.fields[idx[3]]);
        row.operating_system = attribute_cell(rec.fields[idx[4]]);
        row.assignee = attribute_cell(rec.fields[idx[5]]);
        rows.push_back(std::move(row));
    }
    return rows;
}

/// Encodes rows against the fixed severity/priority scales and learns
/// first-appearance codes for component, operating system and assignee.
inline EncodedDataset build_codebooks_and_encode(std::span<const RawBugRow> rows) {
    if (rows.empty()) throw ParameterError("no bug reports to encode");
    EncodedDataset out;
    out.records.reserve(rows.size());
    for (const auto& row : rows) {
        BugRecord rec;
        rec.bug_id = row.bug_id;
        rec.severity = out.codebooks[Attribute::Severity].encode(row.severity);
        rec.priority = out.codebooks[Attribute::Priority].encode(row.priority);
        rec.component = out.codebooks[Attribute::Component].learn(row.component);
        rec.operating_system = out.codebooks[Attribute::OperatingSystem].learn(row.operating_system);
        rec.assignee = out.codebooks[Attribute::Assignee].learn(row.assignee);
        out.records.push_back(std::move(rec));
    }
    return out;
}

/// Inverse of encoding: labels as stored in the codebooks.
inline RawBugRow decode_record(const BugRecord& rec, const Codebooks& books) {
    return RawBugRow{rec.bug_id,
                     books[Attribute::Severity].decode(rec.severity),
                     books[Attribute::Priority].decode(rec.priority),
                     books[Attribute::Component].decode(rec.component),
                     books[Attribute::OperatingSystem].decode(rec.operating_system),
                     books[Attribute::Assignee].decode(rec.assignee)};
}

/// `{attribute: {label: code}}`, keys of each attribute object sorted by label.
inline nlohmann::json codebooks_to_json(const Codebooks& books) {
    nlohmann::json j = nlohmann::json::object();
    for (auto a : kAllAttributes) {
        nlohmann::json entries = nlohmann::json::object();
        const auto labels = books[a].labels();
        for (std::size_t i = 0; i < labels.size(); ++i) entries[labels[i]] = i + 1;
        j[std::string(attribute_name(a))] = std::move(entries);
    }
    return j;
}

inline ColumnMap column_map_from_json(const nlohmann::json& j) {
    ColumnMap m;
    if (j.contains("bug_id")) m.bug_id = j.at("bug_id").get<std::string>();
    if (j.contains("severity")) m.severity = j.at("severity").get<std::string>();
    if (j.contains("priority")) m.priority = j.at("priority").get<std::string>();
    if (j.contains("component")) m.component = j.at("component").get<std::string>();
    if (j.contains("operating_system")) m.operating_system = j.at("operating_system").get<std::string>();
    if (j.contains("assignee")) m.assignee = j.at("assignee").get<std::string>();
    return m;
}

inline nlohmann::json column_map_to_json(const ColumnMap& m) {
    return {{"bug_id", m.bug_id},       {"severity", m.severity},
            {"priority", m.priority},   {"component", m.component},
            {"operating_system", m.operating_system}, {"assignee", m.assignee}};
}

}  // namespace triage_miner

#pragma once

#include <array>
#include <cctype>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

namespace triage_miner {

/// Categorical code. Valid codes start at 1.
using Code = std::uint32_t;

/// Bug attributes in canonical order. Itemsets sort by this order.
enum class Attribute : std::uint8_t {
    Severity = 0,
    Priority = 1,
    Component = 2,
    OperatingSystem = 3,
    Assignee = 4,
};

inline constexpr std::size_t kAttributeCount = 5;

inline constexpr std::array<Attribute, kAttributeCount> kAllAttributes = {
    Attribute::Severity, Attribute::Priority, Attribute::Component,
    Attribute::OperatingSystem, Attribute::Assignee};

constexpr std::size_t index_of(Attribute a) noexcept { return static_cast<std::size_t>(a); }

constexpr std::string_view attribute_name(Attribute a) noexcept {
    switch (a) {
        case Attribute::Severity: return "Severity";
        case Attribute::Priority: return "Priority";
        case Attribute::Component: return "Component";
        case Attribute::OperatingSystem: return "OperatingSystem";
        case Attribute::Assignee: return "Assignee";
    }
    return "?";
}

namespace detail {

inline std::string_view trim(std::string_view s) noexcept {
    const auto is_space = [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; };
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

/// Lookup key for case-insensitive, whitespace-trimmed label matching.
inline std::string normalize_label(std::string_view s) {
    s = trim(s);
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

}  // namespace detail

}  // namespace triage_miner

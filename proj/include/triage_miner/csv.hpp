#pragma once

#include <cstddef>
#include <istream>
#include <iterator>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "triage_miner/error.hpp"

namespace triage_miner::csv {

struct Record {
    std::size_t line = 0;  // physical line on which the record starts
    std::vector<std::string> fields;
};

/// RFC 4180 reader: quoted fields, doubled quotes, CRLF or LF, embedded newlines.
/// A leading UTF-8 byte order mark is skipped. Blank lines are dropped.
inline std::vector<Record> read(std::istream& in) {
    std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    if (in.bad()) throw IoError("failed to read CSV stream");
    std::string_view s = text;
    if (s.starts_with("\xEF\xBB\xBF")) s.remove_prefix(3);

    std::vector<Record> records;
    Record current;
    std::string field;
    std::size_t line = 1;
    current.line = 1;
    bool in_quotes = false;
    bool after_quote = false;  // just closed a quoted field
    bool field_started = false;

    const auto end_field = [&] {
        current.fields.push_back(std::move(field));
        field.clear();
        after_quote = false;
        field_started = false;
    };
    const auto end_record = [&](std::size_t next_line) {
        end_field();
        const bool blank = current.fields.size() == 1 && current.fields.front().empty();
        if (!blank) records.push_back(std::move(current));
        current = Record{};
        current.line = next_line;
    };

    for (std::size_t i = 0; i < s.size(); ++i) {
        const char c = s[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < s.size() && s[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    in_quotes = false;
                    after_quote = true;
                }
            } else {
                if (c == '\n') ++line;
                field += c;
            }
            continue;
        }
        if (c == ',') {
            end_field();
        } else if (c == '\n' || c == '\r') {
            if (c == '\r' && i + 1 < s.size() && s[i + 1] == '\n') ++i;
            ++line;
            end_record(line);
        } else if (after_quote) {
            throw RowError(line, "unexpected character after closing quote");
        } else if (c == '"' && !field_started) {
            in_quotes = true;
            field_started = true;
        } else {
            field += c;
            field_started = true;
        }
    }
    if (in_quotes) throw RowError(current.line, "unterminated quoted field");
    if (field_started || after_quote || !current.fields.empty()) end_record(line);
    return records;
}

inline std::string escape(std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

inline void write_row(std::ostream& out, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i != 0) out << ',';
        out << escape(fields[i]);
    }
    out << '\n';
}

}  // namespace triage_miner::csv

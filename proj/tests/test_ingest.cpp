#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "triage_miner/ingest.hpp"

using namespace triage_miner;

namespace {

ColumnMap short_columns() {
    ColumnMap m;
    m.bug_id = "id";
    m.severity = "sev";
    m.priority = "pri";
    m.component = "comp";
    m.operating_system = "os";
    m.assignee = "who";
    return m;
}

std::vector<RawBugRow> parse(const std::string& text, const ColumnMap& m = short_columns()) {
    std::istringstream in(text);
    return parse_csv(in, m);
}

RawBugRow row(std::string id, std::string sev, std::string pri, std::string comp, std::string os, std::string who) {
    return {std::move(id), std::move(sev), std::move(pri), std::move(comp), std::move(os), std::move(who)};
}

}  // namespace

TEST(ParseCsv, MapsColumnsByHeaderName) {
    const auto rows = parse("id,sev,pri,comp,os,who\n42,normal,P3,General,Linux,alice\n");
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_EQ(rows[0], row("42", "normal", "P3", "General", "Linux", "alice"));
}

TEST(ParseCsv, MissingColumnNamesTheHeader) {
    auto m = short_columns();
    m.severity = "severity";
    try {
        parse("id,sev,pri,comp,os,who\n42,normal,P3,General,Linux,alice\n", m);
        FAIL() << "expected SchemaError";
    } catch (const SchemaError& e) {
        EXPECT_EQ(e.column(), "severity");
    }
}

TEST(ParseCsv, BlankCellBecomesUnspecified) {
    const auto rows = parse("id,sev,pri,comp,os,who\n42,normal,P3,General,,alice\n43,minor,P2,General,--,bob\n");
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0].operating_system, "Unspecified");
    EXPECT_EQ(rows[1].operating_system, "Unspecified");
}

TEST(ParseCsv, DuplicateIdIsRejected) {
    try {
        parse("id,sev,pri,comp,os,who\n7,normal,P3,A,B,c\n7,normal,P3,A,B,c\n");
        FAIL() << "expected DuplicateIdError";
    } catch (const DuplicateIdError& e) {
        EXPECT_EQ(e.id(), "7");
    }
}

TEST(ParseCsv, ShortRowReportsLineNumber) {
    try {
        parse("id,sev,pri,comp,os,who\n1,normal,P3,A,B,c\n2,normal,P3\n");
        FAIL() << "expected RowError";
    } catch (const RowError& e) {
        EXPECT_EQ(e.line(), 3u);
    }
}

TEST(ParseCsv, QuotedFieldsAndColumnOrder) {
    const auto rows = parse(
        "who,os,comp,pri,sev,id,extra\r\n"
        "\"Smith, Jo\",All,\"MailNews: \"\"Backend\"\"\",P1,major,9,x\r\n"
        "bob,Linux,\"multi\nline\",P2,minor,10,y\r\n");
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0], row("9", "major", "P1", "MailNews: \"Backend\"", "All", "Smith, Jo"));
    EXPECT_EQ(rows[1].component, "multi\nline");
}

TEST(ParseCsv, UnterminatedQuoteIsRowError) {
    EXPECT_THROW(parse("id,sev,pri,comp,os,who\n1,normal,P3,\"A,B,c\n"), RowError);
}

TEST(ParseCsv, EmptyBugIdIsRowError) {
    EXPECT_THROW(parse("id,sev,pri,comp,os,who\n ,normal,P3,A,B,c\n"), RowError);
}

TEST(ParseCsv, SkipsBomAndBlankLines) {
    const auto rows = parse("\xEF\xBB\xBFid,sev,pri,comp,os,who\n\n1,normal,P3,A,B,c\n\n");
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_EQ(rows[0].bug_id, "1");
}

TEST(EncodeSeverity, FixedScale) {
    EXPECT_EQ(encode_severity("blocker"), 1u);
    EXPECT_EQ(encode_severity("critical"), 2u);
    EXPECT_EQ(encode_severity("major"), 3u);
    EXPECT_EQ(encode_severity("normal"), 4u);
    EXPECT_EQ(encode_severity("minor"), 5u);
    EXPECT_EQ(encode_severity("trivial"), 6u);
    EXPECT_EQ(encode_severity("enhancement"), 7u);
    EXPECT_EQ(encode_severity("Normal"), 4u);
    EXPECT_EQ(encode_severity("  MAJOR "), 3u);
}

TEST(EncodeSeverity, UnknownLabelCarriesLabel) {
    try {
        encode_severity("S1");
        FAIL() << "expected UnknownCategoryError";
    } catch (const UnknownCategoryError& e) {
        EXPECT_EQ(e.label(), "S1");
    }
}

TEST(EncodePriority, FixedScale) {
    EXPECT_EQ(encode_priority("P1"), 1u);
    EXPECT_EQ(encode_priority("P5"), 5u);
    EXPECT_EQ(encode_priority("p3"), 3u);
    EXPECT_THROW(encode_priority("P6"), UnknownCategoryError);
    EXPECT_THROW(encode_priority("--"), UnknownCategoryError);
}

TEST(BuildCodebooks, FirstAppearanceOrder) {
    const std::vector<RawBugRow> rows = {row("1", "normal", "P3", "General", "Linux", "a"),
                                         row("2", "normal", "P3", "Sync", "Linux", "a"),
                                         row("3", "normal", "P3", "General", "Linux", "a")};
    const auto ds = build_codebooks_and_encode(rows);
    const auto& comp = ds.codebooks[Attribute::Component];
    ASSERT_EQ(comp.size(), 2u);
    EXPECT_EQ(comp.encode("General"), 1u);
    EXPECT_EQ(comp.encode("Sync"), 2u);
    EXPECT_EQ(ds.records[1].component, 2u);
}

TEST(BuildCodebooks, SingleRowGivesSingletonLearnedBooks) {
    const std::vector<RawBugRow> rows = {row("1", "minor", "P2", "General", "Linux", "a")};
    const auto ds = build_codebooks_and_encode(rows);
    for (auto a : {Attribute::Component, Attribute::OperatingSystem, Attribute::Assignee}) {
        ASSERT_EQ(ds.codebooks[a].size(), 1u);
        EXPECT_EQ(ds.records[0].code(a), 1u);
    }
    EXPECT_EQ(ds.records[0].severity, 5u);
    EXPECT_EQ(ds.records[0].priority, 2u);
}

TEST(BuildCodebooks, AssigneeCodesRoundTrip) {
    const std::vector<std::string> who = {"ann", "bo", "ann", "cy", "di", "bo", "cy", "ann", "di", "di"};
    std::vector<RawBugRow> rows;
    for (std::size_t i = 0; i < who.size(); ++i) rows.push_back(row(std::to_string(i), "normal", "P3", "c", "o", who[i]));
    const auto ds = build_codebooks_and_encode(rows);

    std::set<Code> codes;
    for (const auto& r : ds.records) codes.insert(r.assignee);
    EXPECT_EQ(codes, (std::set<Code>{1, 2, 3, 4}));
    // Independent decode pass over the reverse map.
    const auto labels = ds.codebooks[Attribute::Assignee].labels();
    for (std::size_t i = 0; i < rows.size(); ++i) EXPECT_EQ(labels[ds.records[i].assignee - 1], who[i]);
}

TEST(BuildCodebooks, CaseInsensitiveMatchKeepsFirstCasing) {
    const std::vector<RawBugRow> rows = {row("1", "normal", "P3", "Build Config", "Linux", "a"),
                                         row("2", "NORMAL", "p3", "build config ", "LINUX", "A")};
    const auto ds = build_codebooks_and_encode(rows);
    EXPECT_EQ(ds.codebooks[Attribute::Component].size(), 1u);
    EXPECT_EQ(ds.codebooks[Attribute::Component].decode(1), "Build Config");
    EXPECT_EQ(ds.records[0], (BugRecord{"1", 4, 3, 1, 1, 1}));
    EXPECT_EQ(ds.records[1], (BugRecord{"2", 4, 3, 1, 1, 1}));
}

TEST(BuildCodebooks, RejectsUnknownSeverityAndEmptyInput) {
    EXPECT_THROW(build_codebooks_and_encode(std::vector<RawBugRow>{row("1", "S2", "P3", "c", "o", "a")}),
                 UnknownCategoryError);
    EXPECT_THROW(build_codebooks_and_encode(std::vector<RawBugRow>{}), ParameterError);
}

TEST(BuildCodebooks, PropertyRoundTripAndContiguousCodes) {
    // Hand-rolled generator: labels drawn from small pools with random casing.
    std::uint64_t state = 12345;
    const auto next = [&] {
        state = state * 6364136223846793005ULL + 1442695040888963407ULL;
        return static_cast<std::size_t>(state >> 33);
    };
    const std::vector<std::string> sev = {"blocker", "critical", "major", "normal", "minor", "trivial", "enhancement"};
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<RawBugRow> rows;
        const std::size_t n = 1 + next() % 60;
        for (std::size_t i = 0; i < n; ++i) {
            rows.push_back(row(std::to_string(i), sev[next() % 7], "P" + std::to_string(1 + next() % 5),
                               "comp" + std::to_string(next() % 9), "os" + std::to_string(next() % 4),
                               "dev" + std::to_string(next() % 12)));
        }
        const auto ds = build_codebooks_and_encode(rows);
        const auto again = build_codebooks_and_encode(rows);
        ASSERT_EQ(ds.records, again.records);
        for (std::size_t i = 0; i < n; ++i) {
            const auto back = decode_record(ds.records[i], ds.codebooks);
            EXPECT_EQ(back.component, rows[i].component);
            EXPECT_EQ(back.operating_system, rows[i].operating_system);
            EXPECT_EQ(back.assignee, rows[i].assignee);
            EXPECT_EQ(detail::normalize_label(back.severity), rows[i].severity);
            EXPECT_EQ(back.priority, rows[i].priority);
        }
        for (auto a : {Attribute::Component, Attribute::OperatingSystem, Attribute::Assignee}) {
            std::set<std::string> distinct;
            for (const auto& r : rows) distinct.insert(r.label(a));
            ASSERT_EQ(ds.codebooks[a].size(), distinct.size());
            std::set<Code> used;
            for (const auto& r : ds.records) used.insert(r.code(a));
            EXPECT_EQ(*used.begin(), 1u);
            EXPECT_EQ(*used.rbegin(), distinct.size());
            EXPECT_EQ(used.size(), distinct.size());
        }
    }
}

TEST(CodebooksJson, MapsLabelsToCodes) {
    const std::vector<RawBugRow> rows = {row("1", "normal", "P3", "General", "Linux", "ann"),
                                         row("2", "major", "P1", "Sync", "All", "bo")};
    const auto ds = build_codebooks_and_encode(rows);
    const auto j = codebooks_to_json(ds.codebooks);
    EXPECT_EQ(j["Severity"]["Blocker"], 1);
    EXPECT_EQ(j["Severity"]["Enhancement"], 7);
    EXPECT_EQ(j["Priority"]["P5"], 5);
    EXPECT_EQ(j["Component"]["Sync"], 2);
    EXPECT_EQ(j["OperatingSystem"]["All"], 2);
    EXPECT_EQ(j["Assignee"]["ann"], 1);
}

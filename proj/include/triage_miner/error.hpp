#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace triage_miner {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input data or parameters violate a precondition. Maps to exit status 1.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// A column named in the column map is absent from the CSV header.
class SchemaError : public ValidationError {
public:
    explicit SchemaError(std::string column)
        : ValidationError("missing column: " + column), column_(std::move(column)) {}

    const std::string& column() const noexcept { return column_; }

private:
    std::string column_;
};

class DuplicateIdError : public ValidationError {
public:
    explicit DuplicateIdError(std::string id)
        : ValidationError("duplicate bug id: " + id), id_(std::move(id)) {}

    const std::string& id() const noexcept { return id_; }

private:
    std::string id_;
};

/// Malformed CSV row. `line` is 1-based and counts physical lines.
class RowError : public ValidationError {
public:
    RowError(std::size_t line, const std::string& what)
        : ValidationError("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class UnknownCategoryError : public ValidationError {
public:
    UnknownCategoryError(const std::string& attribute, std::string label)
        : ValidationError("unknown " + attribute + " label: '" + label + "'"),
          label_(std::move(label)) {}

    const std::string& label() const noexcept { return label_; }

private:
    std::string label_;
};

class ParameterError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// k exceeds the number of distinct feature vectors.
class InfeasibleKError : public ValidationError {
public:
    InfeasibleKError(std::size_t k, std::size_t distinct)
        : ValidationError("infeasible k: k=" + std::to_string(k) + " exceeds " +
                          std::to_string(distinct) + " distinct feature vectors") {}
};

class DuplicateRuleError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// A code has no entry in its codebook.
class CodebookError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// Every configuration violation found in one pass.
class ConfigError : public ValidationError {
public:
    explicit ConfigError(std::vector<std::string> violations)
        : ValidationError(join(violations)), violations_(std::move(violations)) {}

    const std::vector<std::string>& violations() const noexcept { return violations_; }

private:
    static std::string join(const std::vector<std::string>& v) {
        std::string out = "invalid configuration:";
        for (const auto& s : v) {
            out += "\n  ";
            out += s;
        }
        return out;
    }

    std::vector<std::string> violations_;
};

/// Filesystem failure. Maps to exit status 2.
class IoError : public Error {
public:
    using Error::Error;
};

/// Internal inconsistency between pipeline stages. Maps to exit status 3.
class InvariantError : public Error {
public:
    using Error::Error;
};

class ConsistencyError : public InvariantError {
public:
    using InvariantError::InvariantError;
};

/// A frequent itemset table is not downward closed.
class TableIntegrityError : public InvariantError {
public:
    using InvariantError::InvariantError;
};

}  // namespace triage_miner

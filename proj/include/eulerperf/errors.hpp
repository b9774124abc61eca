#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace eulerperf {

// Bad shapes, missing series, violated preconditions.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A risk measure that is zero or negative where a positive one is needed.
class DegenerateError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Raised by the CSV reader; row and column are 1-based file coordinates.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t row, std::size_t column, const std::string& what)
        : std::runtime_error("row " + std::to_string(row) + ", column " +
                             std::to_string(column) + ": " + what),
          row_(row),
          column_(column) {}

    std::size_t row() const noexcept { return row_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t row_;
    std::size_t column_;
};

// Schema validation failure carrying every problem found, not just the first.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(std::vector<std::string> issues)
        : std::runtime_error(join(issues)), issues_(std::move(issues)) {}

    const std::vector<std::string>& issues() const noexcept { return issues_; }

private:
    static std::string join(const std::vector<std::string>& issues) {
        std::string out;
        for (const auto& issue : issues) {
            if (!out.empty()) out += "; ";
            out += issue;
        }
        return out;
    }

    std::vector<std::string> issues_;
};

}  // namespace eulerperf

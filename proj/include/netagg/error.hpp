#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace netagg {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A structural problem found by one of the validators. `subject` names the
/// offending entity (node id, "edges/3", ...).
struct Violation {
    std::string subject;
    std::string message;

    friend bool operator==(const Violation&, const Violation&) = default;
};

/// Raised when an operation receives input that fails validation. Carries the
/// full violation list, never only the first problem.
class ValidationError : public Error {
public:
    explicit ValidationError(std::vector<Violation> violations)
        : Error(summarize(violations)), violations_(std::move(violations)) {}

    ValidationError(std::string subject, std::string message)
        : ValidationError(std::vector<Violation>{{std::move(subject), std::move(message)}}) {}

    const std::vector<Violation>& violations() const noexcept { return violations_; }

private:
    static std::string summarize(const std::vector<Violation>& violations) {
        std::string out = "validation failed";
        for (const auto& v : violations) {
            out += "\n  ";
            out += v.subject;
            out += ": ";
            out += v.message;
        }
        return out;
    }

    std::vector<Violation> violations_;
};

} // namespace netagg

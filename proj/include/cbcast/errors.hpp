#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace cbcast {

/// A single well-formedness problem found while checking an input.
/// `code` is a stable kebab-case identifier, `detail` is for humans.
struct Violation {
    std::string code;
    std::string detail;
};

inline std::string join_violations(const std::vector<Violation>& vs) {
    std::string out;
    for (const auto& v : vs) {
        if (!out.empty()) out += "; ";
        out += v.code + ": " + v.detail;
    }
    return out;
}

/// Thrown when an input violates a documented precondition.
class ValidationError : public std::invalid_argument {
public:
    explicit ValidationError(std::vector<Violation> vs)
        : std::invalid_argument(join_violations(vs)), violations_(std::move(vs)) {}

    const std::vector<Violation>& violations() const noexcept { return violations_; }

private:
    std::vector<Violation> violations_;
};

/// Size guard or wall-clock budget exceeded.
class GuardError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class TimeoutError : public GuardError {
public:
    using GuardError::GuardError;
};

} // namespace cbcast

#pragma once

#include <stdexcept>
#include <string>

namespace cyclepatrol {

// Input rejected before any simulation starts. `assumption` is "A2", "A3",
// "premise" or "input".
class ValidationError : public std::runtime_error {
public:
    ValidationError(std::string assumption, const std::string& detail)
        : std::runtime_error(assumption == "input" || assumption == "premise"
                                 ? detail
                                 : assumption + " violated: " + detail),
          assumption_(std::move(assumption)) {}

    const std::string& assumption() const noexcept { return assumption_; }

private:
    std::string assumption_;
};

// L <= 2 * sum(r): the robots can cover the cycle without moving.
class StaticCoverageError : public ValidationError {
public:
    explicit StaticCoverageError(const std::string& detail)
        : ValidationError("premise", "statically coverable: " + detail) {}
};

class RangeError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

class DeadlockError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace cyclepatrol

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace spskit {

// Bad input: out-of-domain parameters, malformed files, unknown config keys.
// Maps to CLI exit code 1.
class ValidationError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

// A well-posed computation that failed: non-convergence, missing root or
// crossing, bracket without a maximum. Maps to CLI exit code 2.
class NumericalError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// Optimizer ran out of iterations; carries the last iterate.
class NonConvergenceError : public NumericalError
{
public:
    NonConvergenceError(const std::string& what, std::vector<double> last_iterate)
        : NumericalError(what), last_iterate_(std::move(last_iterate))
    {
    }

    const std::vector<double>& last_iterate() const noexcept { return last_iterate_; }

private:
    std::vector<double> last_iterate_;
};

inline void require(bool condition, const std::string& message)
{
    if (!condition) {
        throw ValidationError(message);
    }
}

}  // namespace spskit

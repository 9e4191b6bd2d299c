#ifndef SMCKIT_ERRORS_HPP
#define SMCKIT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace smckit {

// Rejected inputs: bad shapes, non-finite values, unusable configurations.
// Maps to exit code 2 in the CLI.
class InvalidInputError : public std::runtime_error {
public:
    explicit InvalidInputError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failure inside a solver or factorization.
// Maps to exit code 3 in the CLI.
class SolverFailureError : public std::runtime_error {
public:
    explicit SolverFailureError(const std::string& what) : std::runtime_error(what) {}
};

// Raised by the lambda grid search when no grid point attains the
// requested rank. Carries the range of ranks that were reachable.
class RankUnreachableError : public SolverFailureError {
public:
    RankUnreachableError(const std::string& what, int rank_min, int rank_max)
        : SolverFailureError(what), attained_rank_min(rank_min), attained_rank_max(rank_max) {}

    int attained_rank_min;
    int attained_rank_max;
};

} // namespace smckit

#endif

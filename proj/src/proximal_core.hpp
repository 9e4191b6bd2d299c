#ifndef SMCKIT_PROXIMAL_CORE_HPP
#define SMCKIT_PROXIMAL_CORE_HPP

#include <vector>

#include "smckit/completion.hpp"
#include "smckit/mask.hpp"

namespace smckit::detail {

struct IterationOutput {
    Matrix w;
    Vector singular_values; // of the final w, already thresholded
    int iters = 0;
    bool converged = false;
    std::vector<double> trace;
};

// Shared loop for LRMC and SMC: fill unobserved entries from the current
// iterate, optionally project onto the design column space, then
// soft-threshold the SVD. p_obs is the zero-filled centered data.
IterationOutput proximal_iterate(const Matrix& p_obs, const BoolGrid& observed,
                                 const ColumnSpaceProjector* projector,
                                 const SolverSettings& settings, const Matrix* warm_start);

Index rank_from_singular_values(const Vector& d, double rel_tol = 1e-8);

} // namespace smckit::detail

#endif

#ifndef SMCKIT_COMPLETION_HPP
#define SMCKIT_COMPLETION_HPP

#include <vector>

#include "smckit/mask.hpp"
#include "smckit/matrix.hpp"

namespace smckit {

struct SolverSettings {
    double lambda = 0.0;
    int max_iters = 500;
    double rel_tol = 1e-5;
    bool record_trace = false;

    // lambda grid search controls
    int grid_points = 25;
    int refine_points = 10;
    double grid_min_factor = 1e-3;
    bool path_warm_start = true;

    void validate() const;
};

// Output of a completion solve. w_hat is the low-rank estimate on
// column-centered data; x_hat keeps observed entries of the input exactly and
// fills the rest from w_hat with the column offsets restored.
struct CompletionFit {
    DenseMatrix w_hat;
    DenseMatrix x_hat;
    double lambda = 0.0;
    Index attained_rank = 0;
    int iters = 0;
    bool converged = false;
    std::vector<double> objective_trace; // populated when record_trace is set
    Vector offsets;
};

// Nonincreasing up to a slack of `rel_slack * max(1, |value|)`.
bool trace_is_nonincreasing(const std::vector<double>& trace, double rel_slack = 1e-10);

// Complete-data solution: soft-thresholded SVD of the centered input.
CompletionFit lrmc_closed_form(const DenseMatrix& x, double lambda);

// Proximal iteration for masked data: fill unobserved entries from the
// current iterate, then soft-threshold the SVD. Optional warm start
// (previous fit on the same data) replaces the zero initializer.
CompletionFit lrmc_solve(const DenseMatrix& x, const ObservationMask& mask,
                         const SolverSettings& settings,
                         const CompletionFit* warm_start = nullptr);

// 0.5 * ||P(x) - P(w)||_F^2 + lambda * ||w||_*
double lrmc_objective(const DenseMatrix& x, const ObservationMask& mask, const DenseMatrix& w,
                      double lambda);

} // namespace smckit

#endif

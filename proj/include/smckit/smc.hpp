#ifndef SMCKIT_SMC_HPP
#define SMCKIT_SMC_HPP

#include "smckit/completion.hpp"
#include "smckit/design.hpp"

namespace smckit {

// Completion fit constrained to the column space of a design matrix Z.
// w_hat = Z * m_hat; scores and loadings are the principal components of the
// imputed matrix x_hat.
struct SmcFit : CompletionFit {
    DenseMatrix m_hat;    // k x p coefficients
    DenseMatrix loadings; // p x q, orthonormal columns
    DenseMatrix scores;   // n x q
    Index target_rank = 0;
};

// Complete-data solution: soft-thresholded SVD of the design-projected
// centered input.
SmcFit smc_closed_form(const DenseMatrix& x, const DesignMatrix& z, double lambda);

// Proximal iteration with a projection step onto the column space of Z
// between the fill and the soft-thresholded SVD.
SmcFit smc_solve(const DenseMatrix& x, const ObservationMask& mask, const DesignMatrix& z,
                 const SolverSettings& settings, const CompletionFit* warm_start = nullptr);

// 0.5 * ||P(x) - P(z m)||_F^2 + lambda * ||z m||_*
double smc_objective(const DenseMatrix& x, const ObservationMask& mask, const DesignMatrix& z,
                     const DenseMatrix& m, double lambda);

struct LrmcSelection {
    double lambda = 0.0;
    CompletionFit fit;
};

struct SmcSelection {
    double lambda = 0.0;
    SmcFit fit;
};

// Largest lambda on a descending geometric grid whose fit attains the target
// rank exactly, refined once between the bracketing pair. Throws
// RankUnreachableError when no grid point attains the rank.
LrmcSelection select_lambda_for_rank(const DenseMatrix& x, const ObservationMask& mask,
                                     Index target_rank, const SolverSettings& settings);
SmcSelection select_lambda_for_rank(const DenseMatrix& x, const ObservationMask& mask,
                                    const DesignMatrix& z, Index target_rank,
                                    const SolverSettings& settings);

// Z_new * m_hat with column offsets restored: full p-column profile at
// locations with no observed data.
DenseMatrix predict_new_locations(const SmcFit& fit, const DesignMatrix& z_new);

struct PcScores {
    DenseMatrix scores;   // n x q
    DenseMatrix loadings; // p x q
};

// First q right singular vectors of the centered input and the coordinates
// of the centered input on them.
PcScores extract_pc_scores(const DenseMatrix& x, Index q);

} // namespace smckit

#endif

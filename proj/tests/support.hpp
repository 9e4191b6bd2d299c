#ifndef SMCKIT_TESTS_SUPPORT_HPP
#define SMCKIT_TESTS_SUPPORT_HPP

#include <Eigen/QR>

#include "smckit/mask.hpp"
#include "smckit/matrix.hpp"
#include "smckit/rng.hpp"

namespace testsupport {

using smckit::BoolGrid;
using smckit::Index;
using smckit::Matrix;
using smckit::Vector;

inline Matrix random_orthonormal(smckit::Rng& rng, Index n, Index r) {
    const Matrix gauss = rng.normal_matrix(n, r);
    Eigen::HouseholderQR<Matrix> qr(gauss);
    return qr.householderQ() * Matrix::Identity(n, r);
}

// Orthonormal columns that are also orthogonal to the all-ones vector, so a
// matrix built from them is unchanged by column centering.
inline Matrix random_orthonormal_centered(smckit::Rng& rng, Index n, Index r) {
    Matrix gauss = rng.normal_matrix(n, r);
    gauss.rowwise() -= gauss.colwise().mean();
    Eigen::HouseholderQR<Matrix> qr(gauss);
    return qr.householderQ() * Matrix::Identity(n, r);
}

inline smckit::ObservationMask random_mask(smckit::Rng& rng, Index rows, Index cols,
                                           double observe_prob) {
    BoolGrid grid(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i) grid(i, j) = rng.uniform() < observe_prob;
    return smckit::ObservationMask(std::move(grid));
}

// As above but guarantees at least one observed entry per column.
inline smckit::ObservationMask random_mask_colsafe(smckit::Rng& rng, Index rows, Index cols,
                                                   double observe_prob) {
    BoolGrid grid(rows, cols);
    for (Index j = 0; j < cols; ++j) {
        bool any = false;
        for (Index i = 0; i < rows; ++i) {
            grid(i, j) = rng.uniform() < observe_prob;
            any = any || grid(i, j);
        }
        if (!any) grid(static_cast<Index>(rng.uniform_below(static_cast<std::uint64_t>(rows))), j) = true;
    }
    return smckit::ObservationMask(std::move(grid));
}

inline double rel_fro_error(const Matrix& a, const Matrix& b) {
    const double denom = b.norm();
    return (a - b).norm() / (denom > 0 ? denom : 1.0);
}

} // namespace testsupport

#endif

#ifndef SMCKIT_METRICS_HPP
#define SMCKIT_METRICS_HPP

#include "smckit/mask.hpp"
#include "smckit/matrix.hpp"

namespace smckit {

// Mean squared deviation over the unobserved entries only.
double mse_missing_entries(const DenseMatrix& x_true, const DenseMatrix& x_hat,
                           const ObservationMask& mask);

// Mean squared deviation over every entry.
double mse_new_locations(const DenseMatrix& x_true_new, const DenseMatrix& predicted);

// Per-column means of the observed entries, broadcast to n_rows rows; the
// no-information baseline for new-location prediction.
DenseMatrix column_mean_predictor(const DenseMatrix& x, const ObservationMask& mask,
                                  Index n_rows);

} // namespace smckit

#endif

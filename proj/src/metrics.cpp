#include "smckit/metrics.hpp"

namespace smckit {

double mse_missing_entries(const DenseMatrix& x_true, const DenseMatrix& x_hat,
                           const ObservationMask& mask) {
    if (x_true.rows() != x_hat.rows() || x_true.cols() != x_hat.cols())
        throw InvalidInputError("mse_missing_entries: shapes differ");
    if (mask.rows() != x_true.rows() || mask.cols() != x_true.cols())
        throw InvalidInputError("mse_missing_entries: mask shape does not match");

    double sum = 0.0;
    Index count = 0;
    for (Index j = 0; j < x_true.cols(); ++j)
        for (Index i = 0; i < x_true.rows(); ++i)
            if (!mask.is_observed(i, j)) {
                const double d = x_true(i, j) - x_hat(i, j);
                sum += d * d;
                ++count;
            }
    if (count == 0)
        throw InvalidInputError("mse_missing_entries: mask has no missing entries");
    return sum / static_cast<double>(count);
}

double mse_new_locations(const DenseMatrix& x_true_new, const DenseMatrix& predicted) {
    if (x_true_new.rows() != predicted.rows() || x_true_new.cols() != predicted.cols())
        throw InvalidInputError("mse_new_locations: shapes differ");
    if (x_true_new.rows() == 0 || x_true_new.cols() == 0)
        throw InvalidInputError("mse_new_locations: empty entry set");
    return (x_true_new.values() - predicted.values()).squaredNorm() /
           static_cast<double>(x_true_new.rows() * x_true_new.cols());
}

DenseMatrix column_mean_predictor(const DenseMatrix& x, const ObservationMask& mask,
                                  Index n_rows) {
    const CenteredMatrix cm = center_columns(x, mask);
    Matrix pred(n_rows, x.cols());
    pred.rowwise() = cm.offsets.transpose();
    return DenseMatrix(std::move(pred), x.col_names());
}

} // namespace smckit

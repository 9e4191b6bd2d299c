#include "smckit/mask.hpp"

namespace smckit {

namespace {

void require_same_shape(const DenseMatrix& a, const ObservationMask& m, const char* op) {
    if (a.rows() != m.rows() || a.cols() != m.cols())
        throw InvalidInputError(std::string(op) + ": matrix shape (" + std::to_string(a.rows()) +
                                " x " + std::to_string(a.cols()) + ") does not match mask shape (" +
                                std::to_string(m.rows()) + " x " + std::to_string(m.cols()) + ")");
}

} // namespace

ObservationMask::ObservationMask(Index rows, Index cols,
                                 const std::vector<std::pair<Index, Index>>& observed)
    : grid_(BoolGrid::Constant(rows, cols, false)) {
    for (const auto& [i, j] : observed) {
        if (i < 0 || i >= rows || j < 0 || j >= cols)
            throw InvalidInputError("ObservationMask: index (" + std::to_string(i) + ", " +
                                    std::to_string(j) + ") outside " + std::to_string(rows) +
                                    " x " + std::to_string(cols));
        if (grid_(i, j))
            throw InvalidInputError("ObservationMask: duplicate index (" + std::to_string(i) +
                                    ", " + std::to_string(j) + ")");
        grid_(i, j) = true;
    }
}

ObservationMask::ObservationMask(BoolGrid observed) : grid_(std::move(observed)) {}

ObservationMask ObservationMask::full(Index rows, Index cols) {
    return ObservationMask(BoolGrid::Constant(rows, cols, true));
}

ObservationMask ObservationMask::empty(Index rows, Index cols) {
    return ObservationMask(BoolGrid::Constant(rows, cols, false));
}

DenseMatrix project_observed(const DenseMatrix& a, const ObservationMask& m) {
    require_same_shape(a, m, "project_observed");
    Matrix out = m.grid().select(a.values(), Matrix::Zero(a.rows(), a.cols()));
    return DenseMatrix(std::move(out), a.col_names());
}

DenseMatrix project_unobserved(const DenseMatrix& a, const ObservationMask& m) {
    require_same_shape(a, m, "project_unobserved");
    Matrix out = m.grid().select(Matrix::Zero(a.rows(), a.cols()), a.values());
    return DenseMatrix(std::move(out), a.col_names());
}

DenseMatrix fill_combine(const DenseMatrix& x, const DenseMatrix& w, const ObservationMask& m) {
    require_same_shape(x, m, "fill_combine");
    if (w.rows() != x.rows() || w.cols() != x.cols())
        throw InvalidInputError("fill_combine: shapes of x and w differ");
    Matrix out = m.grid().select(x.values(), w.values());
    return DenseMatrix(std::move(out), x.col_names());
}

} // namespace smckit

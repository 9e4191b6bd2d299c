#include "smckit/matrix.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <cmath>

#include "smckit/mask.hpp"

namespace smckit {

namespace {

void require_finite(const Matrix& values) {
    if (!values.allFinite())
        throw InvalidInputError("DenseMatrix: non-finite entry");
}

std::string column_label(const DenseMatrix& a, Index j) {
    if (a.has_col_names()) return a.col_names()[static_cast<std::size_t>(j)];
    return "column " + std::to_string(j);
}

} // namespace

DenseMatrix::DenseMatrix(Matrix values) : values_(std::move(values)) {
    require_finite(values_);
}

DenseMatrix::DenseMatrix(Matrix values, std::vector<std::string> col_names)
    : values_(std::move(values)), col_names_(std::move(col_names)) {
    require_finite(values_);
    if (!col_names_.empty() && static_cast<Index>(col_names_.size()) != values_.cols())
        throw InvalidInputError("DenseMatrix: column name count does not match column count");
}

DenseMatrix DenseMatrix::with_col_names(std::vector<std::string> names) const {
    return DenseMatrix(values_, std::move(names));
}

Index SvdFactors::rank_count(double rel_tol) const {
    if (d.size() == 0) return 0;
    const double cutoff = rel_tol * d(0);
    Index r = 0;
    for (Index i = 0; i < d.size(); ++i)
        if (d(i) > cutoff) ++r;
    return r;
}

SvdFactors thin_svd(const Matrix& a) {
    Eigen::BDCSVD<Matrix> dec(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (dec.info() != Eigen::Success)
        throw SolverFailureError("thin_svd: SVD iteration did not converge on a " +
                                 std::to_string(a.rows()) + " x " + std::to_string(a.cols()) +
                                 " matrix");
    return SvdFactors{dec.matrixU(), dec.singularValues(), dec.matrixV()};
}

SvdFactors svd(const DenseMatrix& a) {
    return thin_svd(a.values());
}

Matrix soft_threshold_singular_values(const SvdFactors& f, double lambda) {
    if (!(lambda >= 0.0))
        throw InvalidInputError("soft_threshold_singular_values: lambda must be >= 0");
    const Vector shrunk = (f.d.array() - lambda).max(0.0).matrix();
    return f.u * shrunk.asDiagonal() * f.v.transpose();
}

ColumnSpaceProjector::ColumnSpaceProjector(Matrix orthonormal_basis)
    : basis_(std::move(orthonormal_basis)) {}

Matrix ColumnSpaceProjector::apply(const Matrix& a) const {
    return basis_ * (basis_.transpose() * a);
}

ColumnSpaceProjector column_space_projector(const Matrix& z) {
    if (z.rows() == 0 || z.cols() == 0)
        throw InvalidInputError("column_space_projector: matrix has zero rows or zero columns");

    Eigen::ColPivHouseholderQR<Matrix> qr(z);
    // |R(k,k)| is the residual norm of the column pivoted in at step k and is
    // nonincreasing, so a threshold on it drops near-dependent columns.
    const double threshold = 1e-10 * z.norm();
    const Index max_rank = std::min(z.rows(), z.cols());
    Index rank = 0;
    for (Index k = 0; k < max_rank; ++k) {
        if (std::abs(qr.matrixR()(k, k)) > threshold)
            ++rank;
        else
            break;
    }
    if (rank == 0)
        throw InvalidInputError("column_space_projector: matrix has zero effective rank");

    Matrix q = Matrix::Identity(z.rows(), rank);
    q.applyOnTheLeft(qr.householderQ());
    return ColumnSpaceProjector(std::move(q));
}

ColumnSpaceProjector column_space_projector(const DenseMatrix& z) {
    return column_space_projector(z.values());
}

CenteredMatrix center_columns(const DenseMatrix& a) {
    const Vector means = a.values().colwise().mean();
    Matrix centered = a.values();
    centered.rowwise() -= means.transpose();
    return CenteredMatrix{DenseMatrix(std::move(centered), a.col_names()), means};
}

CenteredMatrix center_columns(const DenseMatrix& a, const ObservationMask& mask) {
    if (mask.rows() != a.rows() || mask.cols() != a.cols())
        throw InvalidInputError("center_columns: mask shape does not match matrix shape");

    Matrix centered = a.values();
    Vector offsets(a.cols());
    for (Index j = 0; j < a.cols(); ++j) {
        double sum = 0.0;
        Index count = 0;
        for (Index i = 0; i < a.rows(); ++i) {
            if (mask.is_observed(i, j)) {
                sum += centered(i, j);
                ++count;
            }
        }
        if (count == 0)
            throw InvalidInputError("center_columns: " + column_label(a, j) +
                                    " has no observed entries");
        const double mean = sum / static_cast<double>(count);
        offsets(j) = mean;
        for (Index i = 0; i < a.rows(); ++i)
            if (mask.is_observed(i, j)) centered(i, j) -= mean;
    }
    return CenteredMatrix{DenseMatrix(std::move(centered), a.col_names()), std::move(offsets)};
}

double frobenius_norm(const DenseMatrix& a) {
    return a.values().norm();
}

double nuclear_norm(const DenseMatrix& a) {
    return thin_svd(a.values()).d.sum();
}

} // namespace smckit

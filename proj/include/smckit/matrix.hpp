#ifndef SMCKIT_MATRIX_HPP
#define SMCKIT_MATRIX_HPP

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "smckit/errors.hpp"

namespace smckit {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

class ObservationMask;

// Dense real matrix with optional column labels. Construction rejects
// non-finite entries, so downstream code can assume finite values.
class DenseMatrix {
public:
    DenseMatrix() = default;
    explicit DenseMatrix(Matrix values);
    DenseMatrix(Matrix values, std::vector<std::string> col_names);

    Index rows() const { return values_.rows(); }
    Index cols() const { return values_.cols(); }
    double operator()(Index i, Index j) const { return values_(i, j); }

    const Matrix& values() const { return values_; }
    bool has_col_names() const { return !col_names_.empty(); }
    const std::vector<std::string>& col_names() const { return col_names_; }

    // Same values, relabeled columns.
    DenseMatrix with_col_names(std::vector<std::string> names) const;

private:
    Matrix values_;
    std::vector<std::string> col_names_;
};

// Thin SVD a = u * diag(d) * v^T with d nonincreasing and nonnegative,
// u and v having orthonormal columns.
struct SvdFactors {
    Matrix u;
    Vector d;
    Matrix v;

    Index rank_count(double rel_tol = 1e-8) const;
};

SvdFactors thin_svd(const Matrix& a);
SvdFactors svd(const DenseMatrix& a);

// u * diag((d_i - lambda)_+) * v^T, the proximal operator of the nuclear norm.
Matrix soft_threshold_singular_values(const SvdFactors& f, double lambda);

// Orthogonal projector onto the column space of some matrix Z, held as an
// orthonormal basis Q and applied as Q (Q^T a). Never forms the n x n matrix.
class ColumnSpaceProjector {
public:
    explicit ColumnSpaceProjector(Matrix orthonormal_basis);

    Index rank() const { return basis_.cols(); }
    const Matrix& basis() const { return basis_; }
    Matrix apply(const Matrix& a) const;

private:
    Matrix basis_;
};

// Rank-revealing construction: columns of z whose residual after
// orthogonalization falls below 1e-10 * ||z||_F are dropped.
ColumnSpaceProjector column_space_projector(const DenseMatrix& z);
ColumnSpaceProjector column_space_projector(const Matrix& z);

struct CenteredMatrix {
    DenseMatrix centered;
    Vector offsets; // per-column means that were subtracted
};

// Subtracts per-column means. The masked overload uses means of observed
// entries only and leaves unobserved entries untouched; a fully-missing
// column is an error.
CenteredMatrix center_columns(const DenseMatrix& a);
CenteredMatrix center_columns(const DenseMatrix& a, const ObservationMask& mask);

double frobenius_norm(const DenseMatrix& a);
double nuclear_norm(const DenseMatrix& a);

} // namespace smckit

#endif

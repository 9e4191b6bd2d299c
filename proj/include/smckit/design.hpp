#ifndef SMCKIT_DESIGN_HPP
#define SMCKIT_DESIGN_HPP

#include <optional>
#include <string>
#include <vector>

#include "smckit/matrix.hpp"

namespace smckit {

struct Point2 {
    double s1 = 0.0;
    double s2 = 0.0;
};

double distance(const Point2& a, const Point2& b);

// Planar locations. Duplicates are allowed; the TPS kernel is defined at r=0.
class Coordinates {
public:
    Coordinates() = default;
    explicit Coordinates(Eigen::MatrixX2d points);
    explicit Coordinates(const std::vector<Point2>& points);

    Index size() const { return points_.rows(); }
    Point2 point(Index i) const { return Point2{points_(i, 0), points_(i, 1)}; }
    const Eigen::MatrixX2d& points() const { return points_; }

    Coordinates head(Index n) const;
    Coordinates tail(Index n) const;

private:
    Eigen::MatrixX2d points_;
};

struct ColumnScaling {
    double center = 0.0;
    double spread = 1.0;
};

// Everything needed to rebuild design columns at new locations: which
// covariates were kept, the knots, and the per-column standardization fitted
// on the training data.
struct DesignRecipe {
    bool include_linear_terms = true;
    std::vector<std::string> covariate_labels;
    std::vector<std::string> dropped_covariates; // zero-spread columns dropped at build
    std::vector<Point2> knots;
    std::vector<ColumnScaling> scaling; // one per non-constant column, in design order
};

// Design matrix Z together with the recipe that produced it. Raw designs
// (user-supplied Z without construction metadata) carry no recipe.
struct DesignMatrix {
    DenseMatrix matrix;
    std::optional<DesignRecipe> recipe;

    DesignMatrix() = default;
    explicit DesignMatrix(DenseMatrix raw) : matrix(std::move(raw)) {}
    DesignMatrix(DenseMatrix m, DesignRecipe r) : matrix(std::move(m)), recipe(std::move(r)) {}

    Index rows() const { return matrix.rows(); }
    Index cols() const { return matrix.cols(); }
};

struct DesignOptions {
    Index knot_count = -1; // -1: default_knot_count(n)
    bool include_linear_terms = true;
    std::vector<Point2> knots; // explicit knots override knot_count
};

// clamp(n / 16, 1, 50)
Index default_knot_count(Index n);

// Space-filling knot subset: greedy farthest-point selection seeded at the
// point nearest the centroid, then deterministic maximin exchange sweeps.
std::vector<Point2> choose_knots(const Coordinates& coords, Index count);

// Basis entry (i, j) = eta(||s_i - knot_j||) with eta(r) = r^2 log r, eta(0) = 0.
DenseMatrix tps_basis(const Coordinates& coords, const std::vector<Point2>& knots);

// Columns: [constant, s1, s2 (if linear terms), covariates, TPS columns];
// non-constant columns standardized to mean 0, spread 1 on the training data.
// Zero-spread covariates are dropped and recorded on the recipe.
DesignMatrix build_design_matrix(const Coordinates& coords, const DenseMatrix& covariates,
                                 const DesignOptions& options = {});

// Applies a stored recipe (same knots, same scaling, no refitting) at new
// locations. Covariates are matched to the recipe by label.
DesignMatrix evaluate_design(const DesignRecipe& recipe, const Coordinates& coords,
                             const DenseMatrix& covariates);

} // namespace smckit

#endif

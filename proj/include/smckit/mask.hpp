#ifndef SMCKIT_MASK_HPP
#define SMCKIT_MASK_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "smckit/matrix.hpp"

namespace smckit {

using BoolGrid = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

// The set of observed (row, col) positions over an n x p shape, stored as a
// dense boolean grid.
class ObservationMask {
public:
    ObservationMask() = default;
    ObservationMask(Index rows, Index cols, const std::vector<std::pair<Index, Index>>& observed);
    explicit ObservationMask(BoolGrid observed);

    static ObservationMask full(Index rows, Index cols);
    static ObservationMask empty(Index rows, Index cols);

    Index rows() const { return grid_.rows(); }
    Index cols() const { return grid_.cols(); }
    bool is_observed(Index i, Index j) const { return grid_(i, j); }

    Index observed_count() const { return grid_.count(); }
    Index col_observed_count(Index j) const { return grid_.col(j).count(); }

    const BoolGrid& grid() const { return grid_; }

private:
    BoolGrid grid_;
};

// P_Omega: observed entries kept, the rest exactly zero.
DenseMatrix project_observed(const DenseMatrix& a, const ObservationMask& m);

// P_Omega^perp: complement, so P(a) + Pperp(a) == a entrywise.
DenseMatrix project_unobserved(const DenseMatrix& a, const ObservationMask& m);

// Observed entries from x, unobserved entries from w.
DenseMatrix fill_combine(const DenseMatrix& x, const DenseMatrix& w, const ObservationMask& m);

} // namespace smckit

#endif

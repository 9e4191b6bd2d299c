#include "smckit/completion.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "proximal_core.hpp"

namespace smckit {

void SolverSettings::validate() const {
    if (!(lambda >= 0.0)) throw InvalidInputError("SolverSettings: lambda must be >= 0");
    if (max_iters < 1) throw InvalidInputError("SolverSettings: max_iters must be >= 1");
    if (!(rel_tol > 0.0)) throw InvalidInputError("SolverSettings: rel_tol must be > 0");
    if (grid_points < 2) throw InvalidInputError("SolverSettings: grid_points must be >= 2");
    if (refine_points < 0) throw InvalidInputError("SolverSettings: refine_points must be >= 0");
    if (!(grid_min_factor > 0.0 && grid_min_factor < 1.0))
        throw InvalidInputError("SolverSettings: grid_min_factor must lie in (0, 1)");
}

bool trace_is_nonincreasing(const std::vector<double>& trace, double rel_slack) {
    for (std::size_t i = 1; i < trace.size(); ++i) {
        const double slack = rel_slack * std::max(1.0, std::abs(trace[i - 1]));
        if (trace[i] > trace[i - 1] + slack) return false;
    }
    return true;
}

namespace detail {

Index rank_from_singular_values(const Vector& d, double rel_tol) {
    if (d.size() == 0) return 0;
    const double top = d.maxCoeff();
    if (top <= 0.0) return 0;
    return (d.array() > rel_tol * top).count();
}

IterationOutput proximal_iterate(const Matrix& p_obs, const BoolGrid& observed,
                                 const ColumnSpaceProjector* projector,
                                 const SolverSettings& settings, const Matrix* warm_start) {
    const Index n = p_obs.rows();
    const Index p = p_obs.cols();
    const Matrix zero = Matrix::Zero(n, p);

    IterationOutput out;
    out.w = warm_start ? *warm_start : zero;
    out.singular_values = Vector::Zero(std::min(n, p));
    if (settings.record_trace) out.trace.reserve(static_cast<std::size_t>(settings.max_iters));

    for (int t = 1; t <= settings.max_iters; ++t) {
        const Matrix filled = observed.select(p_obs, out.w);

        SvdFactors f;
        Matrix w_next;
        if (projector) {
            // SVD of Q^T filled has the same singular values as the projected
            // matrix; reconstruct through the basis.
            f = thin_svd(projector->basis().transpose() * filled);
            const Vector shrunk = (f.d.array() - settings.lambda).max(0.0).matrix();
            w_next = projector->basis() * (f.u * shrunk.asDiagonal() * f.v.transpose());
            out.singular_values = shrunk;
        } else {
            f = thin_svd(filled);
            const Vector shrunk = (f.d.array() - settings.lambda).max(0.0).matrix();
            w_next = f.u * shrunk.asDiagonal() * f.v.transpose();
            out.singular_values = shrunk;
        }

        if (!w_next.allFinite())
            throw SolverFailureError("proximal iteration produced a non-finite iterate at iteration " +
                                     std::to_string(t));

        if (settings.record_trace) {
            const double residual = observed.select(p_obs - w_next, zero).squaredNorm();
            out.trace.push_back(0.5 * residual + settings.lambda * out.singular_values.sum());
        }

        const double delta = (w_next - out.w).norm() / std::max(1.0, out.w.norm());
        out.w = std::move(w_next);
        out.iters = t;
        if (delta < settings.rel_tol) {
            out.converged = true;
            break;
        }
    }
    return out;
}

} // namespace detail

namespace {

// Observed entries copied from the original input so they match exactly;
// unobserved entries come from the low-rank estimate plus the offsets.
DenseMatrix assemble_x_hat(const DenseMatrix& x, const Matrix& w, const Vector& offsets,
                           const ObservationMask& mask) {
    Matrix low_rank = w;
    low_rank.rowwise() += offsets.transpose();
    return fill_combine(x, DenseMatrix(std::move(low_rank), x.col_names()), mask);
}

void require_nonempty(const DenseMatrix& x, const char* op) {
    if (x.rows() == 0 || x.cols() == 0)
        throw InvalidInputError(std::string(op) + ": input matrix is empty");
}

} // namespace

CompletionFit lrmc_closed_form(const DenseMatrix& x, double lambda) {
    require_nonempty(x, "lrmc_closed_form");
    if (!(lambda >= 0.0)) throw InvalidInputError("lrmc_closed_form: lambda must be >= 0");

    auto [xc, offsets] = center_columns(x);
    const SvdFactors f = svd(xc);
    const Vector shrunk = (f.d.array() - lambda).max(0.0).matrix();

    CompletionFit fit;
    fit.w_hat = DenseMatrix(f.u * shrunk.asDiagonal() * f.v.transpose(), x.col_names());
    fit.x_hat = x;
    fit.lambda = lambda;
    fit.attained_rank = detail::rank_from_singular_values(shrunk);
    fit.iters = 0;
    fit.converged = true;
    fit.offsets = offsets;
    return fit;
}

CompletionFit lrmc_solve(const DenseMatrix& x, const ObservationMask& mask,
                         const SolverSettings& settings, const CompletionFit* warm_start) {
    require_nonempty(x, "lrmc_solve");
    settings.validate();
    if (warm_start &&
        (warm_start->w_hat.rows() != x.rows() || warm_start->w_hat.cols() != x.cols()))
        throw InvalidInputError("lrmc_solve: warm start shape does not match input");

    auto [xc, offsets] = center_columns(x, mask);
    const DenseMatrix p_obs = project_observed(xc, mask);
    const Matrix* warm = warm_start ? &warm_start->w_hat.values() : nullptr;

    detail::IterationOutput out =
        detail::proximal_iterate(p_obs.values(), mask.grid(), nullptr, settings, warm);

    CompletionFit fit;
    fit.w_hat = DenseMatrix(std::move(out.w), x.col_names());
    fit.x_hat = assemble_x_hat(x, fit.w_hat.values(), offsets, mask);
    fit.lambda = settings.lambda;
    fit.attained_rank = detail::rank_from_singular_values(out.singular_values);
    fit.iters = out.iters;
    fit.converged = out.converged;
    fit.objective_trace = std::move(out.trace);
    fit.offsets = offsets;
    return fit;
}

double lrmc_objective(const DenseMatrix& x, const ObservationMask& mask, const DenseMatrix& w,
                      double lambda) {
    if (x.rows() != w.rows() || x.cols() != w.cols())
        throw InvalidInputError("lrmc_objective: shapes of x and w differ");
    const DenseMatrix rx = project_observed(x, mask);
    const DenseMatrix rw = project_observed(w, mask);
    const double residual = (rx.values() - rw.values()).squaredNorm();
    return 0.5 * residual + lambda * nuclear_norm(w);
}

} // namespace smckit

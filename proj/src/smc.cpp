#include "smckit/smc.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "proximal_core.hpp"

namespace smckit {

namespace {

void require_design_compatible(const DenseMatrix& x, const DesignMatrix& z, const char* op) {
    if (z.rows() != x.rows())
        throw InvalidInputError(std::string(op) + ": design matrix has " + std::to_string(z.rows()) +
                                " rows but data has " + std::to_string(x.rows()));
}

DenseMatrix recover_coefficients(const Matrix& z, const Matrix& w,
                                 const std::vector<std::string>& names) {
    // Minimum-norm least squares; unique on the retained column basis even
    // when z has near-dependent columns.
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(z);
    return DenseMatrix(cod.solve(w), names);
}

void attach_pc_fields(SmcFit& fit, Index q) {
    PcScores pcs = extract_pc_scores(fit.x_hat, q);
    fit.loadings = std::move(pcs.loadings);
    fit.scores = std::move(pcs.scores);
}

} // namespace

SmcFit smc_closed_form(const DenseMatrix& x, const DesignMatrix& z, double lambda) {
    if (x.rows() == 0 || x.cols() == 0)
        throw InvalidInputError("smc_closed_form: input matrix is empty");
    if (!(lambda >= 0.0)) throw InvalidInputError("smc_closed_form: lambda must be >= 0");
    require_design_compatible(x, z, "smc_closed_form");

    const ColumnSpaceProjector projector = column_space_projector(z.matrix);
    auto [xc, offsets] = center_columns(x);

    const SvdFactors f = thin_svd(projector.basis().transpose() * xc.values());
    const Vector shrunk = (f.d.array() - lambda).max(0.0).matrix();

    SmcFit fit;
    fit.w_hat = DenseMatrix(projector.basis() * (f.u * shrunk.asDiagonal() * f.v.transpose()),
                            x.col_names());
    fit.x_hat = x;
    fit.lambda = lambda;
    fit.attained_rank = detail::rank_from_singular_values(shrunk);
    fit.iters = 0;
    fit.converged = true;
    fit.offsets = offsets;
    fit.m_hat = recover_coefficients(z.matrix.values(), fit.w_hat.values(), x.col_names());
    fit.target_rank = fit.attained_rank;
    attach_pc_fields(fit, fit.attained_rank);
    return fit;
}

SmcFit smc_solve(const DenseMatrix& x, const ObservationMask& mask, const DesignMatrix& z,
                 const SolverSettings& settings, const CompletionFit* warm_start) {
    if (x.rows() == 0 || x.cols() == 0)
        throw InvalidInputError("smc_solve: input matrix is empty");
    settings.validate();
    require_design_compatible(x, z, "smc_solve");
    if (warm_start &&
        (warm_start->w_hat.rows() != x.rows() || warm_start->w_hat.cols() != x.cols()))
        throw InvalidInputError("smc_solve: warm start shape does not match input");

    const ColumnSpaceProjector projector = column_space_projector(z.matrix);
    auto [xc, offsets] = center_columns(x, mask);
    const DenseMatrix p_obs = project_observed(xc, mask);
    const Matrix* warm = warm_start ? &warm_start->w_hat.values() : nullptr;

    detail::IterationOutput out =
        detail::proximal_iterate(p_obs.values(), mask.grid(), &projector, settings, warm);

    SmcFit fit;
    fit.w_hat = DenseMatrix(std::move(out.w), x.col_names());
    {
        Matrix low_rank = fit.w_hat.values();
        low_rank.rowwise() += offsets.transpose();
        fit.x_hat = fill_combine(x, DenseMatrix(std::move(low_rank), x.col_names()), mask);
    }
    fit.lambda = settings.lambda;
    fit.attained_rank = detail::rank_from_singular_values(out.singular_values);
    fit.iters = out.iters;
    fit.converged = out.converged;
    fit.objective_trace = std::move(out.trace);
    fit.offsets = offsets;
    fit.m_hat = recover_coefficients(z.matrix.values(), fit.w_hat.values(), x.col_names());
    fit.target_rank = fit.attained_rank;
    attach_pc_fields(fit, fit.attained_rank);
    return fit;
}

double smc_objective(const DenseMatrix& x, const ObservationMask& mask, const DesignMatrix& z,
                     const DenseMatrix& m, double lambda) {
    require_design_compatible(x, z, "smc_objective");
    if (z.cols() != m.rows())
        throw InvalidInputError("smc_objective: coefficient rows do not match design columns");
    if (m.cols() != x.cols())
        throw InvalidInputError("smc_objective: coefficient columns do not match data columns");
    const DenseMatrix w(z.matrix.values() * m.values());
    return lrmc_objective(x, mask, w, lambda);
}

namespace {

// Shared grid search. solve_at(lambda, warm) must return a fit whose
// attained_rank is comparable against the target.
template <typename Fit, typename SolveAt>
std::pair<double, Fit> select_lambda_impl(double sigma1, Index target_rank,
                                          const SolverSettings& settings, SolveAt solve_at) {
    if (!(sigma1 > 0.0))
        throw RankUnreachableError("select_lambda_for_rank: observed data has no signal; every "
                                   "fit has rank 0",
                                   0, 0);

    const int grid = settings.grid_points;
    int rank_min = std::numeric_limits<int>::max();
    int rank_max = std::numeric_limits<int>::min();
    const auto note_rank = [&](Index r) {
        rank_min = std::min(rank_min, static_cast<int>(r));
        rank_max = std::max(rank_max, static_cast<int>(r));
    };
    const auto unreachable = [&](const std::string& where) -> RankUnreachableError {
        return RankUnreachableError("select_lambda_for_rank: no grid point attains rank " +
                                        std::to_string(target_rank) + " (" + where +
                                        "; attained ranks span [" + std::to_string(rank_min) +
                                        ", " + std::to_string(rank_max) + "])",
                                    rank_min, rank_max);
    };

    // Descending geometric candidates between hi and lo, exclusive.
    const auto refine_between = [&](double hi, double lo, const Fit* warm_hi,
                                    std::optional<std::pair<double, Fit>>& found) {
        std::optional<Fit> prev;
        if (warm_hi) prev = *warm_hi;
        for (int t = 1; t <= settings.refine_points; ++t) {
            const double frac =
                static_cast<double>(t) / static_cast<double>(settings.refine_points + 1);
            const double lambda = hi * std::pow(lo / hi, frac);
            Fit fit = solve_at(lambda, settings.path_warm_start && prev ? &*prev : nullptr);
            note_rank(fit.attained_rank);
            if (fit.attained_rank == target_rank) {
                found.emplace(lambda, std::move(fit));
                return;
            }
            if (fit.attained_rank > target_rank) return; // smaller lambdas only overshoot further
            prev = std::move(fit);
        }
    };

    std::optional<Fit> prev;
    double prev_lambda = 0.0;
    for (int i = 0; i < grid; ++i) {
        const double frac = static_cast<double>(i) / static_cast<double>(grid - 1);
        const double lambda = sigma1 * std::pow(settings.grid_min_factor, frac);
        Fit fit = solve_at(lambda, settings.path_warm_start && prev ? &*prev : nullptr);
        note_rank(fit.attained_rank);

        if (fit.attained_rank == target_rank) {
            // Look for an even larger lambda between the bracketing pair.
            std::optional<std::pair<double, Fit>> refined;
            if (i > 0) refine_between(prev_lambda, lambda, prev ? &*prev : nullptr, refined);
            if (refined) return std::move(*refined);
            return {lambda, std::move(fit)};
        }
        if (fit.attained_rank > target_rank) {
            if (i == 0) throw unreachable("rank exceeded at the top of the grid");
            std::optional<std::pair<double, Fit>> refined;
            refine_between(prev_lambda, lambda, prev ? &*prev : nullptr, refined);
            if (refined) return std::move(*refined);
            throw unreachable("rank jumps past the target between grid points");
        }
        prev = std::move(fit);
        prev_lambda = lambda;
    }
    throw unreachable("rank stays below the target over the whole grid");
}

double top_singular_value_lrmc(const DenseMatrix& x, const ObservationMask& mask) {
    auto [xc, offsets] = center_columns(x, mask);
    (void)offsets;
    const DenseMatrix p_obs = project_observed(xc, mask);
    const SvdFactors f = thin_svd(p_obs.values());
    return f.d.size() > 0 ? f.d(0) : 0.0;
}

double top_singular_value_smc(const DenseMatrix& x, const ObservationMask& mask,
                              const ColumnSpaceProjector& projector) {
    auto [xc, offsets] = center_columns(x, mask);
    (void)offsets;
    const DenseMatrix p_obs = project_observed(xc, mask);
    const SvdFactors f = thin_svd(projector.basis().transpose() * p_obs.values());
    return f.d.size() > 0 ? f.d(0) : 0.0;
}

} // namespace

LrmcSelection select_lambda_for_rank(const DenseMatrix& x, const ObservationMask& mask,
                                     Index target_rank, const SolverSettings& settings) {
    settings.validate();
    const Index rank_cap = std::min(x.rows(), x.cols());
    if (target_rank < 1 || target_rank > rank_cap)
        throw InvalidInputError("select_lambda_for_rank: target rank " +
                                std::to_string(target_rank) + " outside [1, " +
                                std::to_string(rank_cap) + "]");

    const double sigma1 = top_singular_value_lrmc(x, mask);
    auto solve_at = [&](double lambda, const CompletionFit* warm) {
        SolverSettings s = settings;
        s.lambda = lambda;
        return lrmc_solve(x, mask, s, warm);
    };
    auto [lambda, fit] =
        select_lambda_impl<CompletionFit>(sigma1, target_rank, settings, solve_at);
    return LrmcSelection{lambda, std::move(fit)};
}

SmcSelection select_lambda_for_rank(const DenseMatrix& x, const ObservationMask& mask,
                                    const DesignMatrix& z, Index target_rank,
                                    const SolverSettings& settings) {
    settings.validate();
    require_design_compatible(x, z, "select_lambda_for_rank");
    const ColumnSpaceProjector projector = column_space_projector(z.matrix);
    const Index rank_cap = std::min({x.rows(), x.cols(), projector.rank()});
    if (target_rank < 1 || target_rank > rank_cap)
        throw InvalidInputError("select_lambda_for_rank: target rank " +
                                std::to_string(target_rank) + " outside [1, " +
                                std::to_string(rank_cap) + "]");

    const double sigma1 = top_singular_value_smc(x, mask, projector);
    auto solve_at = [&](double lambda, const CompletionFit* warm) {
        SolverSettings s = settings;
        s.lambda = lambda;
        return smc_solve(x, mask, z, s, warm);
    };
    auto [lambda, fit] = select_lambda_impl<SmcFit>(sigma1, target_rank, settings, solve_at);
    fit.target_rank = target_rank;
    return SmcSelection{lambda, std::move(fit)};
}

DenseMatrix predict_new_locations(const SmcFit& fit, const DesignMatrix& z_new) {
    if (z_new.cols() != fit.m_hat.rows())
        throw InvalidInputError("predict_new_locations: design has " + std::to_string(z_new.cols()) +
                                " columns but the fit expects " + std::to_string(fit.m_hat.rows()));
    Matrix pred = z_new.matrix.values() * fit.m_hat.values();
    pred.rowwise() += fit.offsets.transpose();
    return DenseMatrix(std::move(pred), fit.m_hat.col_names());
}

PcScores extract_pc_scores(const DenseMatrix& x, Index q) {
    if (q < 0 || q > std::min(x.rows(), x.cols()))
        throw InvalidInputError("extract_pc_scores: q = " + std::to_string(q) + " outside [0, " +
                                std::to_string(std::min(x.rows(), x.cols())) + "]");
    auto [xc, offsets] = center_columns(x);
    (void)offsets;
    const SvdFactors f = svd(xc);
    Matrix loadings = f.v.leftCols(q);
    Matrix scores = xc.values() * loadings;
    return PcScores{DenseMatrix(std::move(scores)), DenseMatrix(std::move(loadings))};
}

} // namespace smckit

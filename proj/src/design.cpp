#include "smckit/design.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace smckit {

double distance(const Point2& a, const Point2& b) {
    return std::hypot(a.s1 - b.s1, a.s2 - b.s2);
}

Coordinates::Coordinates(Eigen::MatrixX2d points) : points_(std::move(points)) {
    if (!points_.allFinite()) throw InvalidInputError("Coordinates: non-finite coordinate");
}

Coordinates::Coordinates(const std::vector<Point2>& points)
    : points_(static_cast<Index>(points.size()), 2) {
    for (Index i = 0; i < points_.rows(); ++i) {
        points_(i, 0) = points[static_cast<std::size_t>(i)].s1;
        points_(i, 1) = points[static_cast<std::size_t>(i)].s2;
    }
    if (!points_.allFinite()) throw InvalidInputError("Coordinates: non-finite coordinate");
}

Coordinates Coordinates::head(Index n) const {
    return Coordinates(Eigen::MatrixX2d(points_.topRows(n)));
}

Coordinates Coordinates::tail(Index n) const {
    return Coordinates(Eigen::MatrixX2d(points_.bottomRows(n)));
}

Index default_knot_count(Index n) {
    return std::clamp<Index>(n / 16, 1, 50);
}

namespace {

double squared_dist(const Eigen::MatrixX2d& pts, Index a, Index b) {
    const double dx = pts(a, 0) - pts(b, 0);
    const double dy = pts(a, 1) - pts(b, 1);
    return dx * dx + dy * dy;
}

// Smallest pairwise squared distance within `selected`, +inf for singletons.
double min_pairwise_sq(const Eigen::MatrixX2d& pts, const std::vector<Index>& selected) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a + 1 < selected.size(); ++a)
        for (std::size_t b = a + 1; b < selected.size(); ++b)
            best = std::min(best, squared_dist(pts, selected[a], selected[b]));
    return best;
}

} // namespace

std::vector<Point2> choose_knots(const Coordinates& coords, Index count) {
    const Index n = coords.size();
    if (count < 1) throw InvalidInputError("choose_knots: count must be >= 1");
    if (count > n)
        throw InvalidInputError("choose_knots: count " + std::to_string(count) + " exceeds " +
                                std::to_string(n) + " available points");

    const Eigen::MatrixX2d& pts = coords.points();
    const Eigen::RowVector2d centroid = pts.colwise().mean();

    // seed: the point nearest the centroid, lowest index on ties
    Index seed = 0;
    double seed_dist = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < n; ++i) {
        const double d = (pts.row(i) - centroid).squaredNorm();
        if (d < seed_dist) {
            seed_dist = d;
            seed = i;
        }
    }

    std::vector<Index> selected{seed};
    std::vector<bool> in_set(static_cast<std::size_t>(n), false);
    in_set[static_cast<std::size_t>(seed)] = true;
    std::vector<double> dist_to_set(static_cast<std::size_t>(n),
                                    std::numeric_limits<double>::infinity());

    while (static_cast<Index>(selected.size()) < count) {
        const Index last = selected.back();
        Index best = -1;
        double best_dist = -1.0;
        for (Index i = 0; i < n; ++i) {
            if (in_set[static_cast<std::size_t>(i)]) continue;
            auto& d = dist_to_set[static_cast<std::size_t>(i)];
            d = std::min(d, squared_dist(pts, i, last));
            if (d > best_dist) {
                best_dist = d;
                best = i;
            }
        }
        selected.push_back(best);
        in_set[static_cast<std::size_t>(best)] = true;
    }

    // Maximin exchange sweeps: greedy alone can strand the seed in the
    // interior; swaps that raise the minimum pairwise distance fix that.
    if (count >= 2 && count < n) {
        for (int sweep = 0; sweep < 16; ++sweep) {
            bool improved = false;
            const double current = min_pairwise_sq(pts, selected);
            for (std::size_t si = 0; si < selected.size() && !improved; ++si) {
                std::vector<Index> without = selected;
                without.erase(without.begin() + static_cast<std::ptrdiff_t>(si));
                const double base = min_pairwise_sq(pts, without);
                if (base <= current) continue; // removing si cannot help
                for (Index c = 0; c < n; ++c) {
                    if (in_set[static_cast<std::size_t>(c)]) continue;
                    double cand = base;
                    for (const Index s : without)
                        cand = std::min(cand, squared_dist(pts, c, s));
                    if (cand > current) {
                        in_set[static_cast<std::size_t>(selected[si])] = false;
                        in_set[static_cast<std::size_t>(c)] = true;
                        selected[si] = c;
                        improved = true;
                        break;
                    }
                }
            }
            if (!improved) break;
        }
    }

    std::vector<Point2> knots;
    knots.reserve(selected.size());
    for (const Index i : selected) knots.push_back(coords.point(i));
    return knots;
}

DenseMatrix tps_basis(const Coordinates& coords, const std::vector<Point2>& knots) {
    if (knots.empty()) throw InvalidInputError("tps_basis: knot list is empty");
    Matrix basis(coords.size(), static_cast<Index>(knots.size()));
    for (Index j = 0; j < basis.cols(); ++j) {
        const Point2& knot = knots[static_cast<std::size_t>(j)];
        for (Index i = 0; i < basis.rows(); ++i) {
            const double r = distance(coords.point(i), knot);
            basis(i, j) = r > 0.0 ? r * r * std::log(r) : 0.0;
        }
    }
    return DenseMatrix(std::move(basis));
}

namespace {

std::vector<std::string> covariate_labels_or_default(const DenseMatrix& covariates) {
    if (covariates.has_col_names()) return covariates.col_names();
    std::vector<std::string> labels;
    labels.reserve(static_cast<std::size_t>(covariates.cols()));
    for (Index j = 0; j < covariates.cols(); ++j) labels.push_back("cov" + std::to_string(j + 1));
    return labels;
}

ColumnScaling fit_scaling(const Eigen::Ref<const Vector>& column) {
    ColumnScaling s;
    s.center = column.mean();
    s.spread = std::sqrt((column.array() - s.center).square().mean());
    return s;
}

std::vector<std::string> design_column_names(const DesignRecipe& recipe) {
    std::vector<std::string> names;
    if (recipe.include_linear_terms) {
        names.push_back("const");
        names.push_back("s1");
        names.push_back("s2");
    }
    for (const auto& label : recipe.covariate_labels) names.push_back(label);
    for (std::size_t j = 0; j < recipe.knots.size(); ++j)
        names.push_back("tps" + std::to_string(j + 1));
    return names;
}

// Raw (unscaled) non-constant design columns in recipe order.
Matrix assemble_raw_columns(const DesignRecipe& recipe, const Coordinates& coords,
                            const Matrix& kept_covariates) {
    const Index n = coords.size();
    const Index n_linear = recipe.include_linear_terms ? 2 : 0;
    const Index n_cov = kept_covariates.cols();
    const Index n_tps = static_cast<Index>(recipe.knots.size());
    Matrix raw(n, n_linear + n_cov + n_tps);
    Index col = 0;
    if (recipe.include_linear_terms) {
        raw.col(col++) = coords.points().col(0);
        raw.col(col++) = coords.points().col(1);
    }
    for (Index j = 0; j < n_cov; ++j) raw.col(col++) = kept_covariates.col(j);
    if (n_tps > 0) {
        raw.rightCols(n_tps) = tps_basis(coords, recipe.knots).values();
    }
    return raw;
}

DesignMatrix finalize_design(const DesignRecipe& recipe, const Coordinates& coords,
                             const Matrix& kept_covariates) {
    Matrix raw = assemble_raw_columns(recipe, coords, kept_covariates);
    if (static_cast<std::size_t>(raw.cols()) != recipe.scaling.size())
        throw InvalidInputError("design recipe scaling does not match column count");
    for (Index j = 0; j < raw.cols(); ++j) {
        const ColumnScaling& s = recipe.scaling[static_cast<std::size_t>(j)];
        raw.col(j) = (raw.col(j).array() - s.center) / s.spread;
    }
    const Index n_const = recipe.include_linear_terms ? 1 : 0;
    Matrix z(coords.size(), n_const + raw.cols());
    if (n_const) z.col(0).setOnes();
    z.rightCols(raw.cols()) = raw;
    return DesignMatrix(DenseMatrix(std::move(z), design_column_names(recipe)), recipe);
}

} // namespace

DesignMatrix build_design_matrix(const Coordinates& coords, const DenseMatrix& covariates,
                                 const DesignOptions& options) {
    const Index n = coords.size();
    if (n == 0) throw InvalidInputError("build_design_matrix: no coordinates");
    if (covariates.cols() > 0 && covariates.rows() != n)
        throw InvalidInputError("build_design_matrix: covariate rows do not match coordinates");

    DesignRecipe recipe;
    recipe.include_linear_terms = options.include_linear_terms;
    if (!options.knots.empty())
        recipe.knots = options.knots;
    else if (options.knot_count != 0)
        recipe.knots = choose_knots(
            coords, options.knot_count > 0 ? options.knot_count : default_knot_count(n));

    // Drop zero-spread covariates; everything else is standardized.
    const std::vector<std::string> all_labels = covariate_labels_or_default(covariates);
    std::vector<Index> kept_idx;
    for (Index j = 0; j < covariates.cols(); ++j) {
        const ColumnScaling s = fit_scaling(covariates.values().col(j));
        if (s.spread > 0.0) {
            kept_idx.push_back(j);
            recipe.covariate_labels.push_back(all_labels[static_cast<std::size_t>(j)]);
        } else {
            recipe.dropped_covariates.push_back(all_labels[static_cast<std::size_t>(j)]);
        }
    }
    Matrix kept(n, static_cast<Index>(kept_idx.size()));
    for (std::size_t j = 0; j < kept_idx.size(); ++j)
        kept.col(static_cast<Index>(j)) = covariates.values().col(kept_idx[j]);

    const Matrix raw = assemble_raw_columns(recipe, coords, kept);
    recipe.scaling.reserve(static_cast<std::size_t>(raw.cols()));
    for (Index j = 0; j < raw.cols(); ++j) {
        ColumnScaling s = fit_scaling(raw.col(j));
        if (!(s.spread > 0.0)) s.spread = 1.0; // degenerate column; projector drops it later
        recipe.scaling.push_back(s);
    }
    return finalize_design(recipe, coords, kept);
}

DesignMatrix evaluate_design(const DesignRecipe& recipe, const Coordinates& coords,
                             const DenseMatrix& covariates) {
    const Index n = coords.size();
    if (n == 0) throw InvalidInputError("evaluate_design: no coordinates");
    if (!recipe.covariate_labels.empty() && covariates.rows() != n)
        throw InvalidInputError("evaluate_design: covariate rows do not match coordinates");
    if (recipe.scaling.empty() && !recipe.include_linear_terms)
        throw InvalidInputError("evaluate_design: recipe has no columns");

    const std::vector<std::string> labels = covariate_labels_or_default(covariates);
    Matrix kept(n, static_cast<Index>(recipe.covariate_labels.size()));
    for (std::size_t j = 0; j < recipe.covariate_labels.size(); ++j) {
        const auto it = std::find(labels.begin(), labels.end(), recipe.covariate_labels[j]);
        if (it == labels.end())
            throw InvalidInputError("evaluate_design: missing covariate column '" +
                                    recipe.covariate_labels[j] + "'");
        kept.col(static_cast<Index>(j)) =
            covariates.values().col(static_cast<Index>(it - labels.begin()));
    }
    return finalize_design(recipe, coords, kept);
}

} // namespace smckit

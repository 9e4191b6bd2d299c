#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "smckit/design.hpp"
#include "smckit/rng.hpp"
#include "support.hpp"

using namespace smckit;

namespace {

std::set<std::pair<double, double>> as_set(const std::vector<Point2>& pts) {
    std::set<std::pair<double, double>> out;
    for (const auto& p : pts) out.insert({p.s1, p.s2});
    return out;
}

Coordinates random_coords(Rng& rng, Index n, double span) {
    Eigen::MatrixX2d pts(n, 2);
    for (Index i = 0; i < n; ++i) {
        pts(i, 0) = span * rng.uniform();
        pts(i, 1) = span * rng.uniform();
    }
    return Coordinates(std::move(pts));
}

} // namespace

TEST_CASE("default knot count follows the n/16 heuristic with clamps") {
    CHECK(default_knot_count(400) == 25);
    CHECK(default_knot_count(4) == 1);
    CHECK(default_knot_count(10000) == 50);
}

TEST_CASE("choosing all points returns all points") {
    Rng rng(401);
    const Coordinates coords = random_coords(rng, 7, 10.0);
    const std::vector<Point2> knots = choose_knots(coords, 7);
    std::vector<Point2> all;
    for (Index i = 0; i < 7; ++i) all.push_back(coords.point(i));
    CHECK(as_set(knots) == as_set(all));
}

TEST_CASE("a single knot sits nearest the centroid") {
    const Coordinates coords(std::vector<Point2>{{0, 0}, {4, 0}, {0, 4}, {4, 4}, {2.2, 1.9}});
    const std::vector<Point2> knots = choose_knots(coords, 1);
    REQUIRE(knots.size() == 1);
    CHECK(knots[0].s1 == 2.2);
    CHECK(knots[0].s2 == 1.9);
}

TEST_CASE("four knots among square corners plus center pick the corners") {
    // oracle: enumerate all 4-point subsets and maximize the minimum
    // pairwise distance
    const std::vector<Point2> pts{{0, 0}, {1, 0}, {0, 1}, {1, 1}, {0.5, 0.5}};
    const Coordinates coords(pts);

    double best = -1.0;
    std::set<std::pair<double, double>> best_subset;
    for (std::size_t skip = 0; skip < pts.size(); ++skip) {
        std::vector<Point2> subset;
        for (std::size_t i = 0; i < pts.size(); ++i)
            if (i != skip) subset.push_back(pts[i]);
        double min_pair = std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a + 1 < subset.size(); ++a)
            for (std::size_t b = a + 1; b < subset.size(); ++b)
                min_pair = std::min(min_pair, distance(subset[a], subset[b]));
        if (min_pair > best) {
            best = min_pair;
            best_subset = as_set(subset);
        }
    }
    REQUIRE(best_subset ==
            as_set({{0, 0}, {1, 0}, {0, 1}, {1, 1}})); // the corners, by enumeration

    CHECK(as_set(choose_knots(coords, 4)) == best_subset);
}

TEST_CASE("knot selection is deterministic and validates the count") {
    Rng rng(403);
    const Coordinates coords = random_coords(rng, 40, 25.0);
    const std::vector<Point2> a = choose_knots(coords, 10);
    const std::vector<Point2> b = choose_knots(coords, 10);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].s1 == b[i].s1);
        CHECK(a[i].s2 == b[i].s2);
    }
    CHECK_THROWS_AS(choose_knots(coords, 0), InvalidInputError);
    CHECK_THROWS_AS(choose_knots(coords, 41), InvalidInputError);
}

TEST_CASE("tps kernel values") {
    const Coordinates coords(std::vector<Point2>{{0, 0}, {1, 0}, {std::exp(1.0), 0}});
    const std::vector<Point2> knots{{0, 0}};
    const DenseMatrix basis = tps_basis(coords, knots);
    CHECK(basis(0, 0) == 0.0);                                            // r = 0
    CHECK(basis(1, 0) == doctest::Approx(0.0).scale(1.0).epsilon(1e-15)); // r = 1
    CHECK(basis(2, 0) == doctest::Approx(std::exp(2.0)).epsilon(1e-12));  // r = e
    CHECK_THROWS_AS(tps_basis(coords, {}), InvalidInputError);
}

TEST_CASE("tps values are symmetric in point and knot roles") {
    Rng rng(405);
    const Coordinates coords = random_coords(rng, 6, 8.0);
    std::vector<Point2> knots;
    for (Index i = 0; i < 6; ++i) knots.push_back(coords.point(i));
    const DenseMatrix basis = tps_basis(coords, knots);
    for (Index i = 0; i < 6; ++i)
        for (Index j = 0; j < 6; ++j) CHECK(basis(i, j) == basis(j, i));
}

TEST_CASE("design matrix column layout and round trip") {
    Rng rng(407);
    const Coordinates coords = random_coords(rng, 24, 12.0);

    SUBCASE("no covariates, one knot, linear terms on gives k = 4") {
        DesignOptions options;
        options.knot_count = 1;
        const DesignMatrix z = build_design_matrix(coords, DenseMatrix(), options);
        CHECK(z.cols() == 4);
        CHECK(z.matrix.col_names()[0] == "const");
        CHECK(z.matrix.col_names()[3] == "tps1");
    }

    SUBCASE("two covariates, 25 knots... needs n >= 25") {
        const Coordinates big = random_coords(rng, 60, 12.0);
        const DenseMatrix covariates(rng.normal_matrix(60, 2), {"r1", "r2"});
        DesignOptions options;
        options.knot_count = 25;
        const DesignMatrix z = build_design_matrix(big, covariates, options);
        CHECK(z.cols() == 30); // 3 linear + 2 covariates + 25 knots
    }

    SUBCASE("recipe round trip reproduces the training design exactly") {
        const DenseMatrix covariates(rng.normal_matrix(24, 2), {"a", "b"});
        DesignOptions options;
        options.knot_count = 5;
        const DesignMatrix z = build_design_matrix(coords, covariates, options);
        REQUIRE(z.recipe.has_value());
        const DesignMatrix again = evaluate_design(*z.recipe, coords, covariates);
        CHECK(again.matrix.values() == z.matrix.values()); // bitwise
    }

    SUBCASE("without linear terms the three polynomial columns disappear") {
        const DenseMatrix covariates(rng.normal_matrix(24, 2), {"a", "b"});
        DesignOptions options;
        options.knot_count = 5;
        options.include_linear_terms = false;
        const DesignMatrix z = build_design_matrix(coords, covariates, options);
        CHECK(z.cols() == 7);
    }
}

TEST_CASE("standardization, dropped covariates and evaluation errors") {
    Rng rng(409);
    const Coordinates coords = random_coords(rng, 30, 9.0);
    Matrix cov(30, 3);
    cov.col(0) = rng.normal_matrix(30, 1);
    cov.col(1).setConstant(7.5); // zero spread: dropped
    cov.col(2) = rng.normal_matrix(30, 1);
    const DenseMatrix covariates(cov, {"keep1", "flat", "keep2"});

    DesignOptions options;
    options.knot_count = 4;
    const DesignMatrix z = build_design_matrix(coords, covariates, options);
    REQUIRE(z.recipe.has_value());
    CHECK(z.recipe->dropped_covariates == std::vector<std::string>{"flat"});
    CHECK(z.recipe->covariate_labels == std::vector<std::string>{"keep1", "keep2"});
    CHECK(z.cols() == 3 + 2 + 4);

    // standardized columns have mean 0 and unit spread
    for (Index j = 1; j < z.cols(); ++j) {
        const Vector col = z.matrix.values().col(j);
        CHECK(std::abs(col.mean()) < 1e-12);
        CHECK(std::sqrt((col.array() - col.mean()).square().mean()) == doctest::Approx(1.0));
    }

    // evaluation needs every recipe covariate
    const DenseMatrix missing(rng.normal_matrix(5, 1), {"keep1"});
    const Coordinates new_coords = random_coords(rng, 5, 9.0);
    CHECK_THROWS_AS(evaluate_design(*z.recipe, new_coords, missing), InvalidInputError);

    // far outside the training hull stays finite
    const Coordinates far(std::vector<Point2>{{1e4, -1e4}});
    const DenseMatrix far_cov(Matrix::Zero(1, 2), {"keep1", "keep2"});
    const DesignMatrix z_far = evaluate_design(*z.recipe, far, far_cov);
    CHECK(z_far.matrix.values().allFinite());

    // a training coordinate with identical covariates reproduces its row
    const Coordinates one(std::vector<Point2>{coords.point(3)});
    Matrix one_cov(1, 2);
    one_cov << cov(3, 0), cov(3, 2);
    const DesignMatrix z_one =
        evaluate_design(*z.recipe, one, DenseMatrix(one_cov, {"keep1", "keep2"}));
    CHECK(z_one.matrix.values() == Matrix(z.matrix.values().row(3)));
}

TEST_CASE("covariate rows must match the coordinates") {
    Rng rng(411);
    const Coordinates coords = random_coords(rng, 10, 5.0);
    CHECK_THROWS_AS(build_design_matrix(coords, DenseMatrix(rng.normal_matrix(9, 1))),
                    InvalidInputError);
}

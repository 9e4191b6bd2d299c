#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <regex>
#include <sstream>

#include "smckit/experiment.hpp"
#include "smckit/metrics.hpp"
#include "smckit/rng.hpp"
#include "support.hpp"

using namespace smckit;

namespace {

ScenarioConfig small_config() {
    ScenarioConfig cfg = make_preset("toy-C");
    cfg.name = "small-C";
    cfg.grid_side = 12;
    cfg.n_monitor = 60;
    cfg.n_new = 15;
    cfg.field_range = 3.0;
    cfg.covariate_range = 6.0;
    cfg.seed = 42;
    return cfg;
}

std::string strip_wall_column(const std::string& csv) {
    // wall_ms is the last column; drop it from every line
    std::string out;
    std::istringstream in(csv);
    std::string line;
    while (std::getline(in, line)) {
        const auto comma = line.rfind(',');
        out += line.substr(0, comma);
        out += '\n';
    }
    return out;
}

} // namespace

TEST_CASE("mse metrics follow their definitions") {
    Rng rng(801);
    const DenseMatrix x(rng.normal_matrix(6, 3));
    const ObservationMask mask = testsupport::random_mask(rng, 6, 3, 0.5);

    SUBCASE("identical matrices have zero error") {
        CHECK(mse_missing_entries(x, x, mask) == 0.0);
        CHECK(mse_new_locations(x, x) == 0.0);
    }
    SUBCASE("a constant offset squares") {
        const DenseMatrix shifted(x.values().array() + 0.5);
        CHECK(mse_missing_entries(x, shifted, mask) == doctest::Approx(0.25).epsilon(1e-12));
        CHECK(mse_new_locations(x, shifted) == doctest::Approx(0.25).epsilon(1e-12));
    }
    SUBCASE("hand-computed 2x2 case with one missing entry") {
        Matrix t(2, 2), h(2, 2);
        t << 1, 2, 3, 4;
        h = t;
        h(1, 0) = 3.5; // error 0.5 at the single missing entry
        BoolGrid grid = BoolGrid::Constant(2, 2, true);
        grid(1, 0) = false;
        CHECK(mse_missing_entries(DenseMatrix(t), DenseMatrix(h), ObservationMask(grid)) ==
              doctest::Approx(0.25).epsilon(1e-12));
    }
    SUBCASE("degenerate entry sets are rejected") {
        CHECK_THROWS_AS(mse_missing_entries(x, x, ObservationMask::full(6, 3)),
                        InvalidInputError);
        CHECK_THROWS_AS(mse_new_locations(DenseMatrix(), DenseMatrix()), InvalidInputError);
        CHECK_THROWS_AS(mse_missing_entries(x, DenseMatrix(Matrix::Zero(5, 3)), mask),
                        InvalidInputError);
    }
}

TEST_CASE("column mean predictor broadcasts observed means") {
    Matrix x(3, 2);
    x << 1, 10, 2, 20, 3, 30;
    BoolGrid grid = BoolGrid::Constant(3, 2, true);
    grid(2, 0) = false; // first column mean over rows 0,1 only
    const DenseMatrix pred =
        column_mean_predictor(DenseMatrix(x), ObservationMask(grid), 2);
    CHECK(pred.rows() == 2);
    CHECK(pred(0, 0) == doctest::Approx(1.5));
    CHECK(pred(1, 1) == doctest::Approx(20.0));
}

TEST_CASE("level grids parse inclusively") {
    const std::vector<double> grid = parse_level_grid("0.05:0.40:0.05");
    REQUIRE(grid.size() == 8);
    CHECK(grid.front() == doctest::Approx(0.05));
    CHECK(grid.back() == doctest::Approx(0.40));
    CHECK(parse_level_grid("0.2").size() == 1);
    CHECK_THROWS_AS(parse_level_grid("0.4:0.1:0.05"), InvalidInputError);
    CHECK_THROWS_AS(parse_level_grid("abc"), InvalidInputError);
    CHECK_THROWS_AS(parse_level_grid("0.9:0.99:0.06"), InvalidInputError);
}

TEST_CASE("method names round trip") {
    CHECK(method_from_name("lrmc") == Method::lrmc);
    CHECK(method_from_name("smc") == Method::smc);
    CHECK_THROWS_AS(method_from_name("pca"), InvalidInputError);
}

TEST_CASE("a small sweep produces canonical, deterministic rows") {
    SweepOptions options;
    options.cfg = small_config();
    options.mcar_levels = {0.1, 0.3};
    options.replicates = 2;
    options.seed = 7;
    options.threads = 1;

    const SweepResult first = run_sweep(options);
    REQUIRE(first.rows.size() == 8); // 2 levels x 2 methods x 2 replicates
    CHECK(first.failures == 0);

    // canonical order: level, then method (lrmc before smc), then replicate
    CHECK(first.rows[0].mcar_level == 0.1);
    CHECK(first.rows[0].method == Method::lrmc);
    CHECK(first.rows[0].replicate == 0);
    CHECK(first.rows[1].replicate == 1);
    CHECK(first.rows[2].method == Method::smc);
    CHECK(first.rows[4].mcar_level == 0.3);

    for (const auto& row : first.rows) {
        CHECK(row.ok());
        CHECK(row.converged);
        CHECK(row.attained_rank == 1);
        CHECK(row.mse_missing >= 0.0);
        if (row.method == Method::smc) {
            REQUIRE(row.mse_new.has_value());
            REQUIRE(row.mse_new_baseline.has_value());
        } else {
            CHECK_FALSE(row.mse_new.has_value());
        }
    }

    // a second run with more threads gives identical numbers
    options.threads = 4;
    const SweepResult second = run_sweep(options);
    REQUIRE(second.rows.size() == first.rows.size());
    for (std::size_t i = 0; i < first.rows.size(); ++i) {
        CHECK(first.rows[i].mse_missing == second.rows[i].mse_missing);
        CHECK(first.rows[i].lambda == second.rows[i].lambda);
        CHECK(first.rows[i].iters == second.rows[i].iters);
        if (first.rows[i].mse_new)
            CHECK(*first.rows[i].mse_new == *second.rows[i].mse_new);
    }

    // report bytes are identical up to the timing column; the plot is stable
    std::stringstream rep1, rep2, agg1, agg2, svg1, svg2;
    write_replicates_csv(rep1, first.rows);
    write_replicates_csv(rep2, second.rows);
    CHECK(strip_wall_column(rep1.str()) == strip_wall_column(rep2.str()));

    const auto aggregates1 = aggregate_rows(first.rows);
    const auto aggregates2 = aggregate_rows(second.rows);
    write_aggregates_csv(agg1, first.rows, aggregates1);
    write_aggregates_csv(agg2, second.rows, aggregates2);
    CHECK(agg1.str() == agg2.str());

    write_series_svg(svg1, "t", "x", "y", mse_series(aggregates1));
    write_series_svg(svg2, "t", "x", "y", mse_series(aggregates2));
    CHECK(svg1.str() == svg2.str());
    CHECK(svg1.str().find("</svg>") != std::string::npos);
}

TEST_CASE("aggregates recompute means and sds from the rows") {
    ReplicateRow a;
    a.scenario = "s";
    a.mcar_level = 0.2;
    a.method = Method::lrmc;
    a.replicate = 0;
    a.mse_missing = 1.0;
    ReplicateRow b = a;
    b.replicate = 1;
    b.mse_missing = 3.0;
    ReplicateRow failed = a;
    failed.replicate = 2;
    failed.status = "error: synthetic";

    const auto aggs = aggregate_rows({a, b, failed});
    REQUIRE(aggs.size() == 1);
    CHECK(aggs[0].count == 2);
    CHECK(aggs[0].mse_missing_mean == doctest::Approx(2.0));
    CHECK(aggs[0].mse_missing_sd == doctest::Approx(std::sqrt(2.0)));

    // the writer cross-checks the aggregates against the rows
    std::stringstream out;
    CHECK_NOTHROW(write_aggregates_csv(out, {a, b, failed}, aggs));
    auto corrupted = aggs;
    corrupted[0].mse_missing_mean += 1e-6;
    std::stringstream out2;
    CHECK_THROWS_AS(write_aggregates_csv(out2, {a, b, failed}, corrupted), InvalidInputError);
}

TEST_CASE("replicate csv encodes failures as NA rows") {
    ReplicateRow ok;
    ok.scenario = "s";
    ok.mcar_level = 0.1;
    ok.method = Method::smc;
    ok.replicate = 0;
    ok.mse_missing = 0.5;
    ok.mse_new = 0.7;
    ok.mse_new_baseline = 1.4;
    ok.attained_rank = 1;
    ok.lambda = 0.25;
    ok.iters = 12;
    ok.converged = true;
    ReplicateRow bad = ok;
    bad.replicate = 1;
    bad.status = "error: did not converge";

    std::stringstream out;
    write_replicates_csv(out, {ok, bad});
    const std::string text = out.str();
    CHECK(text.find("s,0.1,smc,0,ok,0.5,0.7,1.4,1,0.25,12,true") != std::string::npos);
    CHECK(text.find("s,0.1,smc,1,error: did not converge,NA,NA,NA,NA,NA,NA,NA") !=
          std::string::npos);
}

TEST_CASE("sweeps abort when too many cells fail") {
    SweepOptions options;
    options.cfg = small_config();
    options.cfg.p = 4;
    options.mcar_levels = {0.1};
    options.replicates = 2;
    options.threads = 1;
    options.target_rank = 40; // unattainable: caps at min(p, k)
    CHECK_THROWS_AS(run_sweep(options), SolverFailureError);

    // with a forgiving threshold the failure is recorded per row instead
    options.max_failure_rate = 1.0;
    const SweepResult result = run_sweep(options);
    CHECK(result.failures == static_cast<int>(result.rows.size()));
    for (const auto& row : result.rows) CHECK(row.status.find("error") == 0);
}

TEST_CASE("sweep validation") {
    SweepOptions options;
    options.cfg = small_config();
    options.mcar_levels = {};
    CHECK_THROWS_AS(run_sweep(options), InvalidInputError);
    options.mcar_levels = {0.99};
    CHECK_THROWS_AS(run_sweep(options), InvalidInputError);
    options.mcar_levels = {0.1};
    options.replicates = 0;
    CHECK_THROWS_AS(run_sweep(options), InvalidInputError);
    options.replicates = 1;
    options.methods = {};
    CHECK_THROWS_AS(run_sweep(options), InvalidInputError);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "smckit/simgen.hpp"
#include "stat_helpers.hpp"
#include "support.hpp"

using namespace smckit;

namespace {

ScenarioConfig tiny_config(char scenario, std::uint64_t seed) {
    ScenarioConfig cfg = make_preset(std::string("toy-") + scenario);
    cfg.name = std::string("tiny-") + scenario;
    cfg.grid_side = 20;
    cfg.n_monitor = 150;
    cfg.n_new = 0;
    cfg.field_range = 4.0;
    cfg.covariate_range = 8.0;
    cfg.seed = seed;
    return cfg;
}

} // namespace

TEST_CASE("zero sill produces the zero field") {
    const Coordinates coords(std::vector<Point2>{{0, 0}, {1, 2}, {3, 1}});
    const Vector s = gen_gaussian_field(coords, 10.0, 0.0, 77);
    CHECK(s.isZero(0.0));
}

TEST_CASE("single-point draws match the sill variance") {
    // Monte-Carlo oracle: 10,000 seeded draws
    const Coordinates coords(std::vector<Point2>{{0, 0}});
    const double sill = 2.3;
    const GaussianFieldSampler sampler(coords, 10.0, sill);
    Rng rng(501);
    double sum = 0.0, sum_sq = 0.0;
    const int draws = 10000;
    for (int d = 0; d < draws; ++d) {
        const double v = sampler.draw(rng)(0);
        sum += v;
        sum_sq += v * v;
    }
    const double mean = sum / draws;
    const double var = sum_sq / draws - mean * mean;
    CHECK(std::abs(var - sill) < 0.05 * sill);
}

TEST_CASE("two points at distance phi decorrelate to exp(-1)") {
    const double phi = 10.0;
    const Coordinates coords(std::vector<Point2>{{0, 0}, {phi, 0}});
    const GaussianFieldSampler sampler(coords, phi, 1.0);
    Rng rng(503);
    const int draws = 10000;
    Vector a(draws), b(draws);
    for (int d = 0; d < draws; ++d) {
        const Vector s = sampler.draw(rng);
        a(d) = s(0);
        b(d) = s(1);
    }
    a.array() -= a.mean();
    b.array() -= b.mean();
    const double corr = a.dot(b) / (a.norm() * b.norm());
    CHECK(std::abs(corr - std::exp(-1.0)) < 0.03);
}

TEST_CASE("empirical correlations track the exponential model across distances") {
    // all points of a 30x30 grid; pairs at exact separations phi/2, phi, 2*phi
    const double phi = 10.0;
    std::vector<Point2> pts;
    for (int x = 0; x < 30; ++x)
        for (int y = 0; y < 30; ++y) pts.push_back({static_cast<double>(x), static_cast<double>(y)});
    const Coordinates coords(pts);
    const GaussianFieldSampler sampler(coords, phi, 1.0);

    Rng rng(505);
    for (const double h : {phi / 2.0, phi, 2.0 * phi}) {
        const auto pairs = teststat::pairs_at_distance(coords, h);
        REQUIRE(pairs.size() > 100);
        Rng pair_rng(derive_seed(505, static_cast<std::uint64_t>(h)));
        const double corr =
            teststat::empirical_pair_correlation(sampler, pairs, 1.0, pair_rng, 200);
        CHECK(std::abs(corr - std::exp(-h / phi)) < 0.05);
    }
}

TEST_CASE("duplicate coordinates survive through the jitter ladder") {
    const Coordinates coords(std::vector<Point2>{{1, 1}, {1, 1}, {2, 2}});
    const Vector s = gen_gaussian_field(coords, 5.0, 1.0, 79);
    CHECK(s.allFinite());
}

TEST_CASE("field generation validates parameters") {
    const Coordinates coords(std::vector<Point2>{{0, 0}});
    CHECK_THROWS_AS(gen_gaussian_field(coords, 0.0, 1.0, 1), InvalidInputError);
    CHECK_THROWS_AS(gen_gaussian_field(coords, 1.0, -1.0, 1), InvalidInputError);
}

TEST_CASE("scenario A with no noise is an exact function of the covariates") {
    ScenarioConfig cfg = tiny_config('A', 601);
    cfg.noise_sd = 0.0;
    const SimulatedDataset ds = gen_dataset(cfg);
    for (Index j = 0; j < cfg.p; ++j) {
        const Vector residual =
            teststat::regression_residual(ds.x_true.values().col(j), ds.r_o.values());
        CHECK(residual.norm() <= 1e-8 * std::max(1.0, ds.x_true.values().col(j).norm()));
    }
}

TEST_CASE("noiseless rank-1 scenarios generate numerically rank-1 data") {
    ScenarioConfig cfg = tiny_config('C', 603);
    cfg.noise_sd = 0.0;
    const SimulatedDataset ds = gen_dataset(cfg);
    const Vector d = thin_svd(ds.x_true.values()).d;
    CHECK(d(0) > 0.0);
    CHECK(d(1) <= 1e-10 * d(0));
}

TEST_CASE("identical seed and config reproduce the dataset bit for bit") {
    const ScenarioConfig cfg = tiny_config('D', 605);
    const SimulatedDataset a = gen_dataset(cfg);
    const SimulatedDataset b = gen_dataset(cfg);
    CHECK(a.coords.points() == b.coords.points());
    CHECK(a.x_true.values() == b.x_true.values());
    CHECK(a.x_masked.values() == b.x_masked.values());
    CHECK((a.mask.grid() == b.mask.grid()).all());
    CHECK(a.r_o.values() == b.r_o.values());
}

TEST_CASE("different seeds give different data") {
    ScenarioConfig cfg = tiny_config('C', 607);
    const SimulatedDataset a = gen_dataset(cfg);
    cfg.seed = 608;
    const SimulatedDataset b = gen_dataset(cfg);
    CHECK(a.x_true.values() != b.x_true.values());
}

TEST_CASE("mcar edge levels") {
    Rng rng(609);
    const DenseMatrix x(rng.normal_matrix(6, 3));
    const McarResult full = apply_mcar(x, 0.0, 11);
    CHECK(full.mask.observed_count() == 18);
    CHECK(full.x_masked.values() == x.values());
    CHECK_THROWS_AS(apply_mcar(x, 1.0, 11), InvalidInputError);
    CHECK_THROWS_AS(apply_mcar(x, -0.1, 11), InvalidInputError);
}

TEST_CASE("hidden fractions follow the binomial law at 40 percent") {
    // oracle: pooled fraction over 400 x 12 entries is Bin(4800, 0.4)/4800,
    // so +-3 percentage points is a 4.2-sigma band
    const DenseMatrix x(Matrix::Zero(400, 12));
    int within = 0;
    const int reps = 1000;
    double mean_fraction = 0.0;
    for (int r = 0; r < reps; ++r) {
        const McarResult mc = apply_mcar(x, 0.4, derive_seed(611, static_cast<std::uint64_t>(r)));
        const double hidden =
            1.0 - static_cast<double>(mc.mask.observed_count()) / (400.0 * 12.0);
        mean_fraction += hidden;
        if (std::abs(hidden - 0.4) <= 0.03) ++within;
    }
    mean_fraction /= reps;
    CHECK(within >= static_cast<int>(0.95 * reps));
    CHECK(std::abs(mean_fraction - 0.4) < 0.005);
}

TEST_CASE("generated datasets hide entries at the configured rate") {
    int within = 0;
    const int reps = 50;
    for (int r = 0; r < reps; ++r) {
        ScenarioConfig cfg = make_preset("high-C");
        cfg.name = "mcar-check";
        cfg.grid_side = 20;
        cfg.n_monitor = 300;
        cfg.n_new = 0;
        cfg.mcar_level = 0.4;
        cfg.seed = derive_seed(613, static_cast<std::uint64_t>(r));
        const SimulatedDataset ds = gen_dataset(cfg);
        CHECK(ds.mask.rows() == 300);
        const double hidden =
            1.0 - static_cast<double>(ds.mask.observed_count()) /
                      static_cast<double>(ds.mask.grid().size());
        if (std::abs(hidden - 0.4) <= 0.03) ++within;
    }
    CHECK(within >= static_cast<int>(0.9 * reps));
}

TEST_CASE("scenarios without a spatial field leave no residual spatial pattern") {
    // Moran z pooled across features, null band +-1.96/sqrt(p)
    for (const char scenario : {'A', 'B'}) {
        int within = 0;
        const int reps = 100;
        for (int r = 0; r < reps; ++r) {
            ScenarioConfig cfg = tiny_config(scenario, derive_seed(617, static_cast<std::uint64_t>(
                                                                            100 * scenario + r)));
            const SimulatedDataset ds = gen_dataset(cfg);

            Matrix covariates(ds.coords.size(), ds.r_o.cols() + cfg.q);
            covariates.leftCols(ds.r_o.cols()) = ds.r_o.values();
            covariates.rightCols(cfg.q) = ds.unmeasured_component;
            const teststat::MoranResidualTest moran(ds.coords, 8, covariates);

            double z_sum = 0.0;
            for (Index j = 0; j < cfg.p; ++j) {
                const Vector residual =
                    teststat::regression_residual(ds.x_true.values().col(j), covariates);
                z_sum += moran.z(residual);
            }
            const double pooled = z_sum / std::sqrt(static_cast<double>(cfg.p));
            if (std::abs(pooled) <= 1.96) ++within;
        }
        CHECK(within >= 90);
    }
}

TEST_CASE("spatial scenarios do show residual spatial pattern") {
    // complement of the contract above, at a strong field setting
    ScenarioConfig cfg = tiny_config('C', 619);
    cfg.noise_sd = 0.1;
    const SimulatedDataset ds = gen_dataset(cfg);
    const Matrix w = teststat::knn_weights(ds.coords, 8);
    double z_sum = 0.0;
    for (Index j = 0; j < cfg.p; ++j) {
        const Vector residual =
            teststat::regression_residual(ds.x_true.values().col(j), ds.r_o.values());
        z_sum += teststat::moran_z(residual, w);
    }
    CHECK(z_sum / std::sqrt(static_cast<double>(cfg.p)) > 1.96);
}

TEST_CASE("presets cover both study sizes and all four scenarios") {
    CHECK(preset_names().size() == 8);
    for (const auto& name : preset_names()) {
        const ScenarioConfig cfg = make_preset(name);
        CHECK_NOTHROW(cfg.validate());
        CHECK(cfg.name == name);
        if (name.rfind("toy", 0) == 0) {
            CHECK(cfg.p == 4);
            CHECK(cfg.q == 1);
        } else {
            CHECK(cfg.p == 12);
            CHECK(cfg.q == 3);
        }
        const bool unmeasured = cfg.scenario == 'B' || cfg.scenario == 'D';
        CHECK((cfg.b_u.norm() > 0) == unmeasured);
    }
    CHECK_THROWS_AS(make_preset("toy-E"), InvalidInputError);
}

TEST_CASE("config validation rejects inconsistent setups") {
    ScenarioConfig cfg = make_preset("toy-C");
    cfg.n_monitor = 3000;
    cfg.grid_side = 50;
    CHECK_THROWS_AS(cfg.validate(), InvalidInputError);

    cfg = make_preset("toy-C");
    cfg.mcar_level = 0.96;
    CHECK_THROWS_AS(cfg.validate(), InvalidInputError);

    cfg = make_preset("toy-C");
    cfg.b_u = Matrix::Ones(2, 1); // scenario C must have zero unmeasured effect
    CHECK_THROWS_AS(cfg.validate(), InvalidInputError);

    cfg = make_preset("toy-B");
    cfg.b_u = Matrix::Zero(2, 1); // scenario B needs one
    CHECK_THROWS_AS(cfg.validate(), InvalidInputError);

    cfg = make_preset("toy-C");
    cfg.v = Matrix::Ones(4, 1); // not orthonormal
    CHECK_THROWS_AS(cfg.validate(), InvalidInputError);
}

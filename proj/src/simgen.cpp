#include "smckit/simgen.hpp"

#include <Eigen/Cholesky>
#include <cmath>

namespace smckit {

namespace {

// per-stage stream tags for seed derivation
enum Stream : std::uint64_t {
    kCoords = 1,
    kCovariates = 2,
    kUnmeasured = 3,
    kSpatial = 4,
    kNoise = 5,
    kMcar = 6,
};

bool is_zero(const Matrix& m) {
    return m.size() == 0 || m.isZero(0.0);
}

} // namespace

void ScenarioConfig::validate() const {
    if (scenario < 'A' || scenario > 'D')
        throw InvalidInputError("ScenarioConfig: scenario must be one of A, B, C, D");
    if (grid_side < 1) throw InvalidInputError("ScenarioConfig: grid_side must be >= 1");
    if (p < 1 || q < 1) throw InvalidInputError("ScenarioConfig: p and q must be >= 1");
    if (q > p) throw InvalidInputError("ScenarioConfig: latent rank q cannot exceed p");
    if (n_monitor < 1) throw InvalidInputError("ScenarioConfig: n_monitor must be >= 1");
    if (n_new < 0) throw InvalidInputError("ScenarioConfig: n_new must be >= 0");
    if (n_monitor + n_new > grid_side * grid_side)
        throw InvalidInputError("ScenarioConfig: n_monitor + n_new exceeds grid size");
    if (!(mcar_level >= 0.0 && mcar_level <= 0.95))
        throw InvalidInputError("ScenarioConfig: mcar_level must lie in [0, 0.95]");
    if (!(field_range > 0.0)) throw InvalidInputError("ScenarioConfig: field_range must be > 0");
    if (!(field_sill >= 0.0)) throw InvalidInputError("ScenarioConfig: field_sill must be >= 0");
    if (!(covariate_range > 0.0))
        throw InvalidInputError("ScenarioConfig: covariate_range must be > 0");
    if (!(noise_sd >= 0.0)) throw InvalidInputError("ScenarioConfig: noise_sd must be >= 0");
    if (b_o.size() == 0 || b_o.cols() != q)
        throw InvalidInputError("ScenarioConfig: b_o must have q columns");
    if (b_u.size() != 0 && b_u.cols() != q)
        throw InvalidInputError("ScenarioConfig: b_u must have q columns when present");
    if (has_unmeasured() && is_zero(b_u))
        throw InvalidInputError("ScenarioConfig: scenario " + std::string(1, scenario) +
                                " requires nonzero b_u");
    if (!has_unmeasured() && !is_zero(b_u))
        throw InvalidInputError("ScenarioConfig: scenario " + std::string(1, scenario) +
                                " requires zero b_u");
    if (v.rows() != p || v.cols() != q)
        throw InvalidInputError("ScenarioConfig: v must be p x q");
    const double ortho = (v.transpose() * v - Matrix::Identity(q, q)).norm();
    if (ortho > 1e-8)
        throw InvalidInputError("ScenarioConfig: v must have orthonormal columns");
}

DenseMatrix SimulatedDataset::x_true_monitors() const {
    return DenseMatrix(x_true.values().topRows(n_monitor), x_true.col_names());
}

DenseMatrix SimulatedDataset::x_true_new() const {
    return DenseMatrix(x_true.values().bottomRows(n_new), x_true.col_names());
}

DenseMatrix SimulatedDataset::r_o_monitors() const {
    return DenseMatrix(r_o.values().topRows(n_monitor), r_o.col_names());
}

DenseMatrix SimulatedDataset::r_o_new() const {
    return DenseMatrix(r_o.values().bottomRows(n_new), r_o.col_names());
}

GaussianFieldSampler::GaussianFieldSampler(const Coordinates& coords, double range, double sill)
    : n_(coords.size()), sill_(sill) {
    if (!(range > 0.0)) throw InvalidInputError("GaussianFieldSampler: range must be > 0");
    if (!(sill >= 0.0)) throw InvalidInputError("GaussianFieldSampler: sill must be >= 0");
    if (sill == 0.0 || n_ == 0) return;

    Matrix cov(n_, n_);
    for (Index i = 0; i < n_; ++i) {
        cov(i, i) = sill;
        for (Index j = i + 1; j < n_; ++j) {
            const double c = sill * std::exp(-distance(coords.point(i), coords.point(j)) / range);
            cov(i, j) = c;
            cov(j, i) = c;
        }
    }

    // jitter ladder: 1e-8 * sill escalating tenfold up to 1e-4 * sill
    for (double jitter = 1e-8 * sill;; jitter *= 10.0) {
        Eigen::LLT<Matrix> llt(cov + jitter * Matrix::Identity(n_, n_));
        if (llt.info() == Eigen::Success) {
            chol_ = llt.matrixL();
            return;
        }
        if (jitter >= 1e-4 * sill)
            throw SolverFailureError(
                "GaussianFieldSampler: covariance factorization failed after jitter escalation");
    }
}

Vector GaussianFieldSampler::draw(Rng& rng) const {
    if (sill_ == 0.0) return Vector::Zero(n_);
    Vector z(n_);
    for (Index i = 0; i < n_; ++i) z(i) = rng.normal();
    return chol_ * z;
}

Matrix GaussianFieldSampler::draw_many(Rng& rng, Index count) const {
    Matrix out(n_, count);
    for (Index j = 0; j < count; ++j) out.col(j) = draw(rng);
    return out;
}

Vector gen_gaussian_field(const Coordinates& coords, double range, double sill,
                          std::uint64_t seed) {
    const GaussianFieldSampler sampler(coords, range, sill);
    Rng rng(seed);
    return sampler.draw(rng);
}

McarResult apply_mcar(const DenseMatrix& x, double level, Rng& rng) {
    if (!(level >= 0.0 && level <= 0.95))
        throw InvalidInputError("apply_mcar: level must lie in [0, 0.95]");
    BoolGrid observed = BoolGrid::Constant(x.rows(), x.cols(), true);
    Matrix values = x.values();
    for (Index j = 0; j < x.cols(); ++j) {
        for (Index i = 0; i < x.rows(); ++i) {
            if (rng.uniform() < level) {
                observed(i, j) = false;
                values(i, j) = 0.0;
            }
        }
    }
    return McarResult{DenseMatrix(std::move(values), x.col_names()),
                      ObservationMask(std::move(observed))};
}

McarResult apply_mcar(const DenseMatrix& x, double level, std::uint64_t seed) {
    Rng rng(seed);
    return apply_mcar(x, level, rng);
}

SimulatedDataset gen_dataset(const ScenarioConfig& cfg) {
    cfg.validate();
    const Index n_total = cfg.n_monitor + cfg.n_new;

    SimulatedDataset ds;
    ds.n_monitor = cfg.n_monitor;
    ds.n_new = cfg.n_new;

    // sample distinct grid cells; monitors first, then new locations
    {
        Rng rng(derive_seed(cfg.seed, kCoords));
        const std::vector<Index> cells =
            rng.sample_without_replacement(cfg.grid_side * cfg.grid_side, n_total);
        Eigen::MatrixX2d pts(n_total, 2);
        for (Index i = 0; i < n_total; ++i) {
            pts(i, 0) = static_cast<double>(cells[static_cast<std::size_t>(i)] % cfg.grid_side);
            pts(i, 1) = static_cast<double>(cells[static_cast<std::size_t>(i)] / cfg.grid_side);
        }
        ds.coords = Coordinates(std::move(pts));
    }

    // observed covariates: smooth unit-sill fields
    {
        Rng rng(derive_seed(cfg.seed, kCovariates));
        const GaussianFieldSampler sampler(ds.coords, cfg.covariate_range, 1.0);
        Matrix r_o = sampler.draw_many(rng, cfg.b_o.rows());
        std::vector<std::string> names;
        for (Index j = 0; j < r_o.cols(); ++j) names.push_back("r" + std::to_string(j + 1));
        ds.r_o = DenseMatrix(std::move(r_o), std::move(names));
    }
    ds.covariate_component = ds.r_o.values() * cfg.b_o;

    if (cfg.has_unmeasured()) {
        Rng rng(derive_seed(cfg.seed, kUnmeasured));
        const GaussianFieldSampler sampler(ds.coords, cfg.covariate_range, 1.0);
        const Matrix r_u = sampler.draw_many(rng, cfg.b_u.rows());
        ds.unmeasured_component = r_u * cfg.b_u;
    } else {
        ds.unmeasured_component = Matrix::Zero(n_total, cfg.q);
    }

    if (cfg.has_spatial_field()) {
        Rng rng(derive_seed(cfg.seed, kSpatial));
        const GaussianFieldSampler sampler(ds.coords, cfg.field_range, cfg.field_sill);
        ds.spatial_component = sampler.draw_many(rng, cfg.q);
    } else {
        ds.spatial_component = Matrix::Zero(n_total, cfg.q);
    }

    {
        const Matrix latent =
            ds.covariate_component + ds.unmeasured_component + ds.spatial_component;
        Rng rng(derive_seed(cfg.seed, kNoise));
        Matrix x = latent * cfg.v.transpose();
        if (cfg.noise_sd > 0.0) x += cfg.noise_sd * rng.normal_matrix(n_total, cfg.p);
        std::vector<std::string> names;
        for (Index j = 0; j < cfg.p; ++j) names.push_back("x" + std::to_string(j + 1));
        ds.x_true = DenseMatrix(std::move(x), std::move(names));
    }

    {
        Rng rng(derive_seed(cfg.seed, kMcar));
        McarResult mc = apply_mcar(ds.x_true_monitors(), cfg.mcar_level, rng);
        ds.x_masked = std::move(mc.x_masked);
        ds.mask = std::move(mc.mask);
    }
    return ds;
}

const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names = {"toy-A",  "toy-B",  "toy-C",  "toy-D",
                                                   "high-A", "high-B", "high-C", "high-D"};
    return names;
}

namespace {

// Effect matrices and loadings are drawn once from a fixed generator seed and
// shared across the four scenarios of a family, so scenario comparisons see
// the same signal structure.
struct FamilyParams {
    Matrix b_o;
    Matrix b_u;
    Matrix v;
};

FamilyParams family_params(Index p, Index q, std::uint64_t family_seed) {
    Rng rng(family_seed);
    FamilyParams fp;
    fp.b_o = rng.normal_matrix(2, q);
    Matrix b_u_raw = rng.normal_matrix(2, q);
    // unmeasured effect sized at half the observed effect
    fp.b_u = b_u_raw * (0.5 * fp.b_o.norm() / b_u_raw.norm());
    const Matrix gauss = rng.normal_matrix(p, q);
    Eigen::HouseholderQR<Matrix> qr(gauss);
    fp.v = qr.householderQ() * Matrix::Identity(p, q);
    return fp;
}

} // namespace

ScenarioConfig make_preset(const std::string& name) {
    const auto& names = preset_names();
    if (std::find(names.begin(), names.end(), name) == names.end()) {
        std::string known;
        for (const auto& n : names) known += (known.empty() ? "" : ", ") + n;
        throw InvalidInputError("unknown preset '" + name + "' (known presets: " + known + ")");
    }
    const bool toy = name.rfind("toy", 0) == 0;

    ScenarioConfig cfg;
    cfg.name = name;
    cfg.scenario = name.back();
    cfg.p = toy ? 4 : 12;
    cfg.q = toy ? 1 : 3;
    const FamilyParams fp = family_params(cfg.p, cfg.q, toy ? 0x534d436b69740001ULL
                                                            : 0x534d436b69740002ULL);
    cfg.b_o = fp.b_o;
    cfg.b_u = cfg.has_unmeasured() ? fp.b_u : Matrix::Zero(2, cfg.q);
    cfg.v = fp.v;
    return cfg;
}

} // namespace smckit

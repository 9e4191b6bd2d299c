#ifndef SMCKIT_SIMGEN_HPP
#define SMCKIT_SIMGEN_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "smckit/design.hpp"
#include "smckit/mask.hpp"
#include "smckit/matrix.hpp"
#include "smckit/rng.hpp"

namespace smckit {

// One simulation scenario: data are generated on a regular grid as
// X = (R_o B_o + R_u B_u + S) V^T + E, with monitor rows partially observed
// and new-location rows fully unobserved.
//
// Scenario letters control which components are active:
//   A: no unmeasured covariates, no spatial field
//   B: unmeasured covariates only
//   C: spatial field only
//   D: both
struct ScenarioConfig {
    std::string name = "custom";
    char scenario = 'C';
    Index grid_side = 50;
    Index p = 4; // features
    Index q = 1; // latent rank
    Index n_monitor = 400;
    Index n_new = 100;
    double mcar_level = 0.2;
    double field_range = 10.0;     // phi, grid units
    double field_sill = 1.0;       // sigma^2_s
    double covariate_range = 20.0; // smoother fields for R_o / R_u
    double noise_sd = 0.5;
    Matrix b_o; // c_o x q observed-covariate effects
    Matrix b_u; // c_u x q unmeasured effects; zero or empty for A and C
    Matrix v;   // p x q loadings, orthonormal columns
    std::uint64_t seed = 1;

    void validate() const;
    bool has_unmeasured() const { return scenario == 'B' || scenario == 'D'; }
    bool has_spatial_field() const { return scenario == 'C' || scenario == 'D'; }
};

struct SimulatedDataset {
    Coordinates coords; // monitors first, then new locations
    Index n_monitor = 0;
    Index n_new = 0;
    DenseMatrix x_true;   // complete, (n_monitor + n_new) x p
    DenseMatrix x_masked; // monitors only; unobserved entries stored as zero
    ObservationMask mask; // monitors only
    DenseMatrix r_o;      // observed covariates at all locations
    // latent pieces kept for diagnostics
    Matrix covariate_component; // r_o * b_o
    Matrix unmeasured_component;
    Matrix spatial_component;

    Coordinates monitor_coords() const { return coords.head(n_monitor); }
    Coordinates new_coords() const { return coords.tail(n_new); }
    DenseMatrix x_true_monitors() const;
    DenseMatrix x_true_new() const;
    DenseMatrix r_o_monitors() const;
    DenseMatrix r_o_new() const;
};

// One mean-zero draw with Cov(s_i, s_j) = sill * exp(-d_ij / range), via a
// Cholesky factor with escalating diagonal jitter.
Vector gen_gaussian_field(const Coordinates& coords, double range, double sill,
                          std::uint64_t seed);

// Factorization reused across draws at fixed coordinates.
class GaussianFieldSampler {
public:
    GaussianFieldSampler(const Coordinates& coords, double range, double sill);
    Vector draw(Rng& rng) const;
    Matrix draw_many(Rng& rng, Index count) const;

private:
    Matrix chol_; // lower factor; empty when sill == 0
    Index n_ = 0;
    double sill_ = 0.0;
};

struct McarResult {
    DenseMatrix x_masked;
    ObservationMask mask;
};

// Hide each entry independently with probability `level`, per feature column.
McarResult apply_mcar(const DenseMatrix& x, double level, std::uint64_t seed);
McarResult apply_mcar(const DenseMatrix& x, double level, Rng& rng);

SimulatedDataset gen_dataset(const ScenarioConfig& cfg);

// Shipped scenario presets: toy-A..toy-D (p=4, q=1), high-A..high-D (p=12, q=3).
const std::vector<std::string>& preset_names();
ScenarioConfig make_preset(const std::string& name);

} // namespace smckit

#endif

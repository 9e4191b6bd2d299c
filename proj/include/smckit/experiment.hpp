#ifndef SMCKIT_EXPERIMENT_HPP
#define SMCKIT_EXPERIMENT_HPP

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "smckit/simgen.hpp"
#include "smckit/smc.hpp"
#include "smckit/svg_plot.hpp"

namespace smckit {

enum class Method { lrmc, smc };

std::string method_name(Method m);
Method method_from_name(const std::string& name);

// One (scenario, mcar level, method, replicate) cell of a sweep.
struct ReplicateRow {
    std::string scenario;
    double mcar_level = 0.0;
    Method method = Method::lrmc;
    int replicate = 0;
    std::string status = "ok";
    double mse_missing = 0.0;
    std::optional<double> mse_new;          // SMC only
    std::optional<double> mse_new_baseline; // column-mean predictor at the same locations
    Index attained_rank = 0;
    double lambda = 0.0;
    int iters = 0;
    bool converged = false;
    double wall_ms = 0.0;

    bool ok() const { return status == "ok"; }
};

struct AggregateRow {
    std::string scenario;
    double mcar_level = 0.0;
    Method method = Method::lrmc;
    int count = 0; // successful replicates
    double mse_missing_mean = 0.0;
    double mse_missing_sd = 0.0;
    std::optional<double> mse_new_mean;
    std::optional<double> mse_new_sd;
    std::optional<double> mse_new_baseline_mean;
};

struct SweepOptions {
    ScenarioConfig cfg;
    std::vector<double> mcar_levels;
    int replicates = 10;
    std::vector<Method> methods{Method::lrmc, Method::smc};
    std::uint64_t seed = 0;  // 0: use cfg.seed
    Index target_rank = 0;   // 0: use cfg.q
    SolverSettings solver;   // lambda is chosen per cell by grid search
    int threads = 0;         // 0: SMCKIT_THREADS or hardware concurrency
    double max_failure_rate = 0.10;
    std::function<void(const std::string&)> progress;
};

struct SweepResult {
    std::vector<ReplicateRow> rows; // canonical order: level, method, replicate
    int failures = 0;
};

// Runs replicates across a small worker pool. Each replicate generates one
// dataset (seed derived from the sweep seed), reuses it across MCAR levels,
// and fits every method at the target rank.
SweepResult run_sweep(const SweepOptions& options);

std::vector<AggregateRow> aggregate_rows(const std::vector<ReplicateRow>& rows);

void write_replicates_csv(std::ostream& out, const std::vector<ReplicateRow>& rows);

// Writes mean and sd rows; recomputes them from the replicate rows and
// verifies the caller's aggregates match before anything is written.
void write_aggregates_csv(std::ostream& out, const std::vector<ReplicateRow>& rows,
                          const std::vector<AggregateRow>& aggregates);

// LRMC missing-entry / SMC missing-entry / SMC new-location series for the
// scenario panel plot.
std::vector<PlotSeries> mse_series(const std::vector<AggregateRow>& aggregates);

// "start:stop:step" (inclusive) or a single value.
std::vector<double> parse_level_grid(const std::string& spec);

int default_thread_count();

} // namespace smckit

#endif

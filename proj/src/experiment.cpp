#include "smckit/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <ostream>
#include <thread>

#include "smckit/csv.hpp"
#include "smckit/metrics.hpp"

namespace smckit {

std::string method_name(Method m) {
    return m == Method::lrmc ? "lrmc" : "smc";
}

Method method_from_name(const std::string& name) {
    if (name == "lrmc") return Method::lrmc;
    if (name == "smc") return Method::smc;
    throw InvalidInputError("unknown method '" + name + "' (expected lrmc or smc)");
}

int default_thread_count() {
    if (const char* env = std::getenv("SMCKIT_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

std::vector<double> parse_level_grid(const std::string& spec) {
    std::vector<double> parts;
    std::string::size_type start = 0;
    while (true) {
        const auto colon = spec.find(':', start);
        const std::string tok = spec.substr(start, colon == std::string::npos ? colon : colon - start);
        try {
            parts.push_back(std::stod(tok));
        } catch (const std::exception&) {
            throw InvalidInputError("cannot parse mcar grid component '" + tok + "'");
        }
        if (colon == std::string::npos) break;
        start = colon + 1;
    }
    std::vector<double> levels;
    if (parts.size() == 1) {
        levels.push_back(parts[0]);
    } else if (parts.size() == 3) {
        const double lo = parts[0], hi = parts[1], step = parts[2];
        if (!(step > 0.0) || hi < lo)
            throw InvalidInputError("mcar grid must be start:stop:step with step > 0");
        for (double v = lo; v <= hi + 1e-9; v += step) levels.push_back(v);
    } else {
        throw InvalidInputError("mcar grid must be a single level or start:stop:step");
    }
    for (const double v : levels)
        if (!(v >= 0.0 && v <= 0.95))
            throw InvalidInputError("mcar level " + format_double(v) + " outside [0, 0.95]");
    return levels;
}

namespace {

std::string sanitize_status(std::string s) {
    for (char& c : s)
        if (c == ',' || c == '\n' || c == '\r') c = ';';
    return s;
}

struct CellKey {
    double level;
    Method method;
};

} // namespace

SweepResult run_sweep(const SweepOptions& options) {
    options.cfg.validate();
    if (options.mcar_levels.empty()) throw InvalidInputError("run_sweep: no mcar levels");
    if (options.replicates < 1) throw InvalidInputError("run_sweep: replicates must be >= 1");
    if (options.methods.empty()) throw InvalidInputError("run_sweep: no methods");
    for (const double level : options.mcar_levels)
        if (!(level >= 0.0 && level <= 0.95))
            throw InvalidInputError("run_sweep: mcar level outside [0, 0.95]");

    const std::uint64_t seed = options.seed ? options.seed : options.cfg.seed;
    const Index target_rank = options.target_rank ? options.target_rank : options.cfg.q;

    // canonical method order: lrmc before smc
    std::vector<Method> methods = options.methods;
    std::sort(methods.begin(), methods.end(),
              [](Method a, Method b) { return method_name(a) < method_name(b); });
    methods.erase(std::unique(methods.begin(), methods.end()), methods.end());
    const bool wants_smc =
        std::find(methods.begin(), methods.end(), Method::smc) != methods.end();

    SolverSettings solver = options.solver;
    solver.record_trace = true;

    const std::size_t n_levels = options.mcar_levels.size();
    const std::size_t n_methods = methods.size();
    const std::size_t per_replicate = n_levels * n_methods;
    std::vector<ReplicateRow> rows(static_cast<std::size_t>(options.replicates) * per_replicate);

    std::mutex progress_mutex;
    std::atomic<int> next_replicate{0};
    std::atomic<int> done{0};

    const auto worker = [&]() {
        while (true) {
            const int rep = next_replicate.fetch_add(1);
            if (rep >= options.replicates) return;

            ScenarioConfig cfg_rep = options.cfg;
            cfg_rep.mcar_level = 0.0; // masking happens per level below
            cfg_rep.seed = derive_seed(seed, 1000 + static_cast<std::uint64_t>(rep));

            std::string replicate_error;
            SimulatedDataset ds;
            DesignMatrix z, z_new;
            DenseMatrix x_true_mon, x_true_new;
            try {
                ds = gen_dataset(cfg_rep);
                x_true_mon = ds.x_true_monitors();
                x_true_new = ds.x_true_new();
                if (wants_smc) {
                    z = build_design_matrix(ds.monitor_coords(), ds.r_o_monitors());
                    if (ds.n_new > 0)
                        z_new = evaluate_design(*z.recipe, ds.new_coords(), ds.r_o_new());
                }
            } catch (const std::exception& e) {
                replicate_error = e.what();
            }

            for (std::size_t li = 0; li < n_levels; ++li) {
                const double level = options.mcar_levels[li];
                McarResult mc;
                std::string level_error = replicate_error;
                if (level_error.empty()) {
                    try {
                        mc = apply_mcar(x_true_mon, level,
                                        derive_seed(cfg_rep.seed, 2000 + li));
                    } catch (const std::exception& e) {
                        level_error = e.what();
                    }
                }

                for (std::size_t mi = 0; mi < n_methods; ++mi) {
                    ReplicateRow row;
                    row.scenario = options.cfg.name;
                    row.mcar_level = level;
                    row.method = methods[mi];
                    row.replicate = rep;

                    const auto t0 = std::chrono::steady_clock::now();
                    try {
                        if (!level_error.empty()) throw SolverFailureError(level_error);
                        if (row.method == Method::lrmc) {
                            LrmcSelection sel =
                                select_lambda_for_rank(mc.x_masked, mc.mask, target_rank, solver);
                            if (!trace_is_nonincreasing(sel.fit.objective_trace))
                                throw SolverFailureError("objective trace increased");
                            row.mse_missing =
                                mse_missing_entries(x_true_mon, sel.fit.x_hat, mc.mask);
                            row.attained_rank = sel.fit.attained_rank;
                            row.lambda = sel.lambda;
                            row.iters = sel.fit.iters;
                            row.converged = sel.fit.converged;
                        } else {
                            SmcSelection sel = select_lambda_for_rank(mc.x_masked, mc.mask, z,
                                                                      target_rank, solver);
                            if (!trace_is_nonincreasing(sel.fit.objective_trace))
                                throw SolverFailureError("objective trace increased");
                            row.mse_missing =
                                mse_missing_entries(x_true_mon, sel.fit.x_hat, mc.mask);
                            row.attained_rank = sel.fit.attained_rank;
                            row.lambda = sel.lambda;
                            row.iters = sel.fit.iters;
                            row.converged = sel.fit.converged;
                            if (ds.n_new > 0) {
                                const DenseMatrix pred = predict_new_locations(sel.fit, z_new);
                                row.mse_new = mse_new_locations(x_true_new, pred);
                                row.mse_new_baseline = mse_new_locations(
                                    x_true_new,
                                    column_mean_predictor(mc.x_masked, mc.mask, ds.n_new));
                            }
                        }
                    } catch (const std::exception& e) {
                        row.status = sanitize_status(std::string("error: ") + e.what());
                    }
                    row.wall_ms = std::chrono::duration<double, std::milli>(
                                      std::chrono::steady_clock::now() - t0)
                                      .count();

                    rows[static_cast<std::size_t>(rep) * per_replicate + li * n_methods + mi] =
                        std::move(row);
                }
            }

            const int finished = done.fetch_add(1) + 1;
            if (options.progress) {
                std::lock_guard<std::mutex> lock(progress_mutex);
                options.progress("replicate " + std::to_string(finished) + "/" +
                                 std::to_string(options.replicates));
            }
        }
    };

    int threads = options.threads > 0 ? options.threads : default_thread_count();
    threads = std::min<int>(threads, options.replicates);
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(threads));
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    // canonical order: level, then method, then replicate
    SweepResult result;
    result.rows.reserve(rows.size());
    for (std::size_t li = 0; li < n_levels; ++li)
        for (std::size_t mi = 0; mi < n_methods; ++mi)
            for (int rep = 0; rep < options.replicates; ++rep)
                result.rows.push_back(
                    rows[static_cast<std::size_t>(rep) * per_replicate + li * n_methods + mi]);

    for (const auto& row : result.rows)
        if (!row.ok()) ++result.failures;
    const double failure_rate =
        static_cast<double>(result.failures) / static_cast<double>(result.rows.size());
    if (failure_rate > options.max_failure_rate) {
        std::string first;
        for (const auto& row : result.rows)
            if (!row.ok()) {
                first = row.status;
                break;
            }
        throw SolverFailureError("run_sweep: " + std::to_string(result.failures) + " of " +
                                 std::to_string(result.rows.size()) + " cells failed (first: " +
                                 first + ")");
    }
    return result;
}

namespace {

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (const double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double sd_of(const std::vector<double>& v, double mean) {
    if (v.size() < 2) return 0.0;
    double s = 0.0;
    for (const double x : v) s += (x - mean) * (x - mean);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

} // namespace

std::vector<AggregateRow> aggregate_rows(const std::vector<ReplicateRow>& rows) {
    // preserve first-appearance order of (scenario, level, method) groups
    std::vector<AggregateRow> out;
    std::vector<std::vector<const ReplicateRow*>> groups;
    for (const auto& row : rows) {
        std::size_t g = 0;
        for (; g < out.size(); ++g)
            if (out[g].scenario == row.scenario && out[g].mcar_level == row.mcar_level &&
                out[g].method == row.method)
                break;
        if (g == out.size()) {
            AggregateRow agg;
            agg.scenario = row.scenario;
            agg.mcar_level = row.mcar_level;
            agg.method = row.method;
            out.push_back(std::move(agg));
            groups.emplace_back();
        }
        groups[g].push_back(&row);
    }

    for (std::size_t g = 0; g < out.size(); ++g) {
        std::vector<double> missing, news, baselines;
        for (const ReplicateRow* row : groups[g]) {
            if (!row->ok()) continue;
            missing.push_back(row->mse_missing);
            if (row->mse_new) news.push_back(*row->mse_new);
            if (row->mse_new_baseline) baselines.push_back(*row->mse_new_baseline);
        }
        out[g].count = static_cast<int>(missing.size());
        if (!missing.empty()) {
            out[g].mse_missing_mean = mean_of(missing);
            out[g].mse_missing_sd = sd_of(missing, out[g].mse_missing_mean);
        }
        if (!news.empty()) {
            out[g].mse_new_mean = mean_of(news);
            out[g].mse_new_sd = sd_of(news, *out[g].mse_new_mean);
        }
        if (!baselines.empty()) out[g].mse_new_baseline_mean = mean_of(baselines);
    }
    return out;
}

namespace {

std::string opt_str(const std::optional<double>& v) {
    return v ? format_double(*v) : "NA";
}

} // namespace

void write_replicates_csv(std::ostream& out, const std::vector<ReplicateRow>& rows) {
    out << "scenario,mcar_level,method,replicate,status,mse_missing,mse_new,mse_new_baseline,"
           "attained_rank,lambda,iters,converged,wall_ms\n";
    for (const auto& r : rows) {
        out << r.scenario << ',' << format_double(r.mcar_level) << ',' << method_name(r.method)
            << ',' << r.replicate << ',' << r.status << ',';
        if (r.ok())
            out << format_double(r.mse_missing) << ',' << opt_str(r.mse_new) << ','
                << opt_str(r.mse_new_baseline) << ',' << r.attained_rank << ','
                << format_double(r.lambda) << ',' << r.iters << ','
                << (r.converged ? "true" : "false");
        else
            out << "NA,NA,NA,NA,NA,NA,NA";
        out << ',' << format_double(r.wall_ms) << '\n';
    }
}

void write_aggregates_csv(std::ostream& out, const std::vector<ReplicateRow>& rows,
                          const std::vector<AggregateRow>& aggregates) {
    // integrity check: the aggregates must be recomputable from the rows
    const std::vector<AggregateRow> recomputed = aggregate_rows(rows);
    if (recomputed.size() != aggregates.size())
        throw InvalidInputError("write_aggregates_csv: aggregate rows do not match replicates");
    const auto close = [](double a, double b) { return std::abs(a - b) <= 1e-12; };
    const auto opt_close = [&](const std::optional<double>& a, const std::optional<double>& b) {
        if (a.has_value() != b.has_value()) return false;
        return !a || close(*a, *b);
    };
    for (std::size_t i = 0; i < aggregates.size(); ++i) {
        const AggregateRow& a = aggregates[i];
        const AggregateRow& b = recomputed[i];
        if (a.scenario != b.scenario || a.method != b.method || a.count != b.count ||
            !close(a.mcar_level, b.mcar_level) || !close(a.mse_missing_mean, b.mse_missing_mean) ||
            !close(a.mse_missing_sd, b.mse_missing_sd) || !opt_close(a.mse_new_mean, b.mse_new_mean) ||
            !opt_close(a.mse_new_sd, b.mse_new_sd) ||
            !opt_close(a.mse_new_baseline_mean, b.mse_new_baseline_mean))
            throw InvalidInputError("write_aggregates_csv: aggregate row " + std::to_string(i) +
                                    " does not match the replicate rows");
    }

    out << "scenario,mcar_level,method,stat,count,mse_missing,mse_new,mse_new_baseline\n";
    for (const auto& a : aggregates) {
        out << a.scenario << ',' << format_double(a.mcar_level) << ',' << method_name(a.method)
            << ",mean," << a.count << ',' << format_double(a.mse_missing_mean) << ','
            << opt_str(a.mse_new_mean) << ',' << opt_str(a.mse_new_baseline_mean) << '\n';
        out << a.scenario << ',' << format_double(a.mcar_level) << ',' << method_name(a.method)
            << ",sd," << a.count << ',' << format_double(a.mse_missing_sd) << ','
            << opt_str(a.mse_new_sd) << ",NA\n";
    }
}

std::vector<PlotSeries> mse_series(const std::vector<AggregateRow>& aggregates) {
    PlotSeries lrmc{"LRMC missing-entry MSE", "black", {}};
    PlotSeries smc{"SMC missing-entry MSE", "red", {}};
    PlotSeries smc_new{"SMC new-location MSE", "blue", {}};
    for (const auto& a : aggregates) {
        if (a.count == 0) continue;
        if (a.method == Method::lrmc) {
            lrmc.points.push_back({a.mcar_level, a.mse_missing_mean, a.mse_missing_sd});
        } else {
            smc.points.push_back({a.mcar_level, a.mse_missing_mean, a.mse_missing_sd});
            if (a.mse_new_mean)
                smc_new.points.push_back(
                    {a.mcar_level, *a.mse_new_mean, a.mse_new_sd ? *a.mse_new_sd : 0.0});
        }
    }
    std::vector<PlotSeries> series;
    for (auto* s : {&lrmc, &smc, &smc_new})
        if (!s->points.empty()) series.push_back(std::move(*s));
    return series;
}

} // namespace smckit

// Command-line front end: run completions on CSV data and seeded simulation
// sweeps over scenarios and MCAR levels.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "smckit/config_json.hpp"
#include "smckit/csv.hpp"
#include "smckit/experiment.hpp"
#include "smckit/metrics.hpp"
#include "smckit/simgen.hpp"
#include "smckit/smc.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUnexpected = 1;
constexpr int kExitInput = 2;
constexpr int kExitSolver = 3;

struct Logger {
    bool quiet = false;
    bool json = false;

    void info(const std::string& msg) const {
        if (quiet) return;
        if (json)
            std::cerr << nlohmann::json{{"level", "info"}, {"msg", msg}}.dump() << '\n';
        else
            std::cerr << msg << '\n';
    }

    void error(const std::string& msg) const {
        if (json)
            std::cerr << nlohmann::json{{"level", "error"}, {"msg", msg}}.dump() << '\n';
        else
            std::cerr << "error: " << msg << '\n';
    }
};

struct CompleteArgs {
    std::string input;
    std::string method;
    std::string design;
    std::string coords;
    std::string covariates;
    std::string predict_coords;
    std::string predict_covariates;
    std::string predict_design;
    std::string truth;
    std::string output;
    std::optional<double> lambda;
    std::optional<smckit::Index> rank;
    smckit::Index knots = -1;
    bool no_linear_terms = false;
    int max_iters = 500;
    double tol = 1e-5;
};

struct SimulateArgs {
    std::string preset;
    std::string config;
    std::string mcar_grid;
    std::string methods = "lrmc,smc";
    std::string output;
    int replicates = 10;
    std::uint64_t seed = 0;
    smckit::Index rank = 0;
    int threads = 0;
    bool plot = false;
    int max_iters = 500;
    double tol = 1e-5;
};

std::vector<smckit::Method> parse_methods(const std::string& spec) {
    std::vector<smckit::Method> methods;
    std::string::size_type start = 0;
    while (start <= spec.size()) {
        const auto comma = spec.find(',', start);
        const std::string tok =
            spec.substr(start, comma == std::string::npos ? comma : comma - start);
        if (!tok.empty()) methods.push_back(smckit::method_from_name(tok));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    if (methods.empty()) throw smckit::InvalidInputError("no methods given");
    return methods;
}

nlohmann::json fit_metadata(const smckit::CompletionFit& fit, const std::string& method) {
    nlohmann::json j;
    j["method"] = method;
    j["lambda"] = fit.lambda;
    j["attained_rank"] = fit.attained_rank;
    j["iters"] = fit.iters;
    j["converged"] = fit.converged;
    nlohmann::json offsets = nlohmann::json::array();
    for (smckit::Index i = 0; i < fit.offsets.size(); ++i) offsets.push_back(fit.offsets(i));
    j["offsets"] = std::move(offsets);
    return j;
}

smckit::DenseMatrix low_rank_in_data_units(const smckit::CompletionFit& fit) {
    smckit::Matrix w = fit.w_hat.values();
    w.rowwise() += fit.offsets.transpose();
    return smckit::DenseMatrix(std::move(w), fit.w_hat.col_names());
}

int run_complete(const CompleteArgs& args, const Logger& log) {
    using namespace smckit;

    if (args.method != "lrmc" && args.method != "smc")
        throw InvalidInputError("--method must be lrmc or smc");
    if (args.lambda && args.rank)
        throw InvalidInputError("give either --lambda or --rank, not both");
    if (!args.lambda && !args.rank)
        throw InvalidInputError("one of --lambda or --rank is required");
    if (args.lambda && !(*args.lambda >= 0.0))
        throw InvalidInputError("--lambda must be >= 0");

    const bool is_smc = args.method == "smc";
    const bool wants_predict =
        !args.predict_coords.empty() || !args.predict_design.empty();
    if (!is_smc && (wants_predict || !args.predict_covariates.empty()))
        throw InvalidInputError(
            "new-location prediction requires --method smc: lrmc fits carry no design-matrix "
            "model of the rows");
    if (is_smc && args.design.empty() && args.coords.empty())
        throw InvalidInputError("--method smc needs a design source: --design or --coords");
    if (!args.predict_coords.empty() && args.coords.empty())
        throw InvalidInputError("--predict needs a design built from --coords (use "
                                "--predict-design with --design)");
    if (!args.predict_design.empty() && args.design.empty())
        throw InvalidInputError("--predict-design pairs with --design");

    const MaskedMatrixCsv input = read_matrix_csv_file(args.input);
    log.info("read " + std::to_string(input.values.rows()) + " x " +
             std::to_string(input.values.cols()) + " matrix from " + args.input + " (" +
             std::to_string(input.mask.observed_count()) + " observed entries)");

    SolverSettings settings;
    settings.max_iters = args.max_iters;
    settings.rel_tol = args.tol;
    settings.record_trace = true;

    DesignMatrix design;
    if (is_smc) {
        if (!args.design.empty()) {
            const MaskedMatrixCsv raw = read_matrix_csv_file(args.design);
            if (!raw.fully_observed())
                throw InvalidInputError(args.design + ": design matrix cannot contain NA");
            design = DesignMatrix(raw.values);
        } else {
            const Coordinates coords = read_coordinates_csv_file(args.coords);
            DenseMatrix covariates;
            if (!args.covariates.empty()) {
                const MaskedMatrixCsv raw = read_matrix_csv_file(args.covariates);
                if (!raw.fully_observed())
                    throw InvalidInputError(args.covariates + ": covariates cannot contain NA");
                covariates = raw.values;
            }
            DesignOptions options;
            options.knot_count = args.knots;
            options.include_linear_terms = !args.no_linear_terms;
            design = build_design_matrix(coords, covariates, options);
            log.info("built design matrix with " + std::to_string(design.cols()) + " columns");
        }
    }

    nlohmann::json meta;
    DenseMatrix x_hat, low_rank;
    std::optional<SmcFit> smc_fit;
    if (is_smc) {
        SmcFit fit;
        if (args.rank) {
            SmcSelection sel =
                select_lambda_for_rank(input.values, input.mask, design, *args.rank, settings);
            fit = std::move(sel.fit);
            meta = fit_metadata(fit, args.method);
            meta["target_rank"] = *args.rank;
        } else {
            settings.lambda = *args.lambda;
            fit = smc_solve(input.values, input.mask, design, settings);
            meta = fit_metadata(fit, args.method);
        }
        x_hat = fit.x_hat;
        low_rank = low_rank_in_data_units(fit);
        if (design.recipe) meta["recipe"] = recipe_to_json(*design.recipe);
        smc_fit = std::move(fit);
    } else {
        CompletionFit fit;
        if (args.rank) {
            LrmcSelection sel =
                select_lambda_for_rank(input.values, input.mask, *args.rank, settings);
            fit = std::move(sel.fit);
            meta = fit_metadata(fit, args.method);
            meta["target_rank"] = *args.rank;
        } else {
            settings.lambda = *args.lambda;
            fit = lrmc_solve(input.values, input.mask, settings);
            meta = fit_metadata(fit, args.method);
        }
        x_hat = fit.x_hat;
        low_rank = low_rank_in_data_units(fit);
    }

    if (!args.truth.empty()) {
        const MaskedMatrixCsv truth = read_matrix_csv_file(args.truth);
        if (!truth.fully_observed())
            throw InvalidInputError(args.truth + ": truth matrix cannot contain NA");
        if (input.mask.observed_count() == input.mask.grid().size()) {
            log.info("input has no missing entries; skipping mse_missing");
        } else {
            meta["mse_missing"] = mse_missing_entries(truth.values, x_hat, input.mask);
        }
    }

    write_matrix_csv_file(args.output + ".imputed.csv", x_hat);
    write_matrix_csv_file(args.output + ".lowrank.csv", low_rank);

    if (wants_predict) {
        DesignMatrix z_new;
        if (!args.predict_design.empty()) {
            const MaskedMatrixCsv raw = read_matrix_csv_file(args.predict_design);
            if (!raw.fully_observed())
                throw InvalidInputError(args.predict_design + ": design cannot contain NA");
            z_new = DesignMatrix(raw.values);
        } else {
            const Coordinates new_coords = read_coordinates_csv_file(args.predict_coords);
            DenseMatrix new_covariates;
            if (!args.predict_covariates.empty()) {
                const MaskedMatrixCsv raw = read_matrix_csv_file(args.predict_covariates);
                if (!raw.fully_observed())
                    throw InvalidInputError(args.predict_covariates +
                                            ": covariates cannot contain NA");
                new_covariates = raw.values;
            } else if (!design.recipe->covariate_labels.empty()) {
                throw InvalidInputError("--predict-covariates is required: the design was built "
                                        "with covariates");
            }
            z_new = evaluate_design(*design.recipe, new_coords, new_covariates);
        }
        const DenseMatrix predicted = predict_new_locations(*smc_fit, z_new);
        write_matrix_csv_file(args.output + ".predicted.csv", predicted);
        meta["predicted_rows"] = predicted.rows();
    }

    std::ofstream meta_out(args.output + ".fit.json");
    if (!meta_out)
        throw InvalidInputError("cannot open '" + args.output + ".fit.json' for writing");
    meta_out << meta.dump(2) << '\n';

    log.info("wrote " + args.output + ".imputed.csv, .lowrank.csv, .fit.json" +
             std::string(wants_predict ? ", .predicted.csv" : ""));
    return kExitOk;
}

int run_simulate(const SimulateArgs& args, const Logger& log) {
    using namespace smckit;

    if (args.preset.empty() == args.config.empty())
        throw InvalidInputError("give exactly one of --preset or --config");

    SweepOptions options;
    options.cfg = args.preset.empty() ? read_scenario_file(args.config) : make_preset(args.preset);
    options.mcar_levels = args.mcar_grid.empty()
                              ? std::vector<double>{options.cfg.mcar_level}
                              : parse_level_grid(args.mcar_grid);
    options.replicates = args.replicates;
    options.methods = parse_methods(args.methods);
    options.seed = args.seed;
    options.target_rank = args.rank;
    options.threads = args.threads;
    options.solver.max_iters = args.max_iters;
    options.solver.rel_tol = args.tol;
    options.progress = [&log](const std::string& msg) { log.info(msg); };

    log.info("scenario " + options.cfg.name + ": " + std::to_string(options.replicates) +
             " replicates x " + std::to_string(options.mcar_levels.size()) + " mcar levels x " +
             std::to_string(options.methods.size()) + " methods");

    const SweepResult result = run_sweep(options);
    if (result.failures > 0)
        log.info(std::to_string(result.failures) + " cells failed; see status column");

    const std::vector<AggregateRow> aggregates = aggregate_rows(result.rows);

    {
        std::ofstream out(args.output + ".replicates.csv");
        if (!out)
            throw InvalidInputError("cannot open '" + args.output +
                                    ".replicates.csv' for writing");
        write_replicates_csv(out, result.rows);
    }
    {
        std::ofstream out(args.output + ".aggregate.csv");
        if (!out)
            throw InvalidInputError("cannot open '" + args.output +
                                    ".aggregate.csv' for writing");
        write_aggregates_csv(out, result.rows, aggregates);
    }
    if (args.plot) {
        write_series_svg_file(args.output + ".plot.svg",
                              "Scenario " + options.cfg.name + ": MSE vs MCAR level",
                              "MCAR level", "MSE", mse_series(aggregates));
    }

    for (const auto& agg : aggregates) {
        std::string line = options.cfg.name + " mcar=" + format_double(agg.mcar_level) + " " +
                           method_name(agg.method) +
                           ": mse_missing=" + format_double(agg.mse_missing_mean);
        if (agg.mse_new_mean) line += " mse_new=" + format_double(*agg.mse_new_mean);
        log.info(line);
    }
    log.info("wrote " + args.output + ".replicates.csv, .aggregate.csv" +
             std::string(args.plot ? ", .plot.svg" : ""));
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"matrix completion toolkit: plain low-rank and spatially constrained solvers "
                 "with a seeded simulation harness"};
    app.require_subcommand(1);

    Logger log;
    app.add_flag("--quiet", log.quiet, "suppress progress output");
    app.add_flag("--json-logs", log.json, "emit log lines as JSON objects");

    CompleteArgs complete_args;
    CLI::App* complete = app.add_subcommand(
        "complete", "fit a completion model to a matrix CSV with NA entries");
    complete->add_option("--input", complete_args.input, "matrix CSV (NA marks missing)")
        ->required();
    complete->add_option("--method", complete_args.method, "lrmc or smc")->required();
    complete->add_option("--output", complete_args.output, "output file prefix")->required();
    complete->add_option("--design", complete_args.design, "design matrix CSV (smc)");
    complete->add_option("--coords", complete_args.coords, "coordinates CSV with columns s1,s2");
    complete->add_option("--covariates", complete_args.covariates,
                         "covariate CSV aligned with --coords");
    complete->add_option("--knots", complete_args.knots,
                         "TPS knot count (default: rows/16, capped at 50)");
    complete->add_flag("--no-linear-terms", complete_args.no_linear_terms,
                       "omit the constant and coordinate columns");
    double lambda_in = 0.0;
    CLI::Option* lambda_opt =
        complete->add_option("--lambda", lambda_in, "nuclear-norm penalty weight");
    smckit::Index rank_in = 0;
    CLI::Option* rank_opt =
        complete->add_option("--rank", rank_in, "target rank; lambda found by grid search");
    complete->add_option("--predict", complete_args.predict_coords,
                         "coordinates CSV of new locations to predict (smc)");
    complete->add_option("--predict-covariates", complete_args.predict_covariates,
                         "covariates at the new locations");
    complete->add_option("--predict-design", complete_args.predict_design,
                         "raw design CSV at the new locations (with --design)");
    complete->add_option("--truth", complete_args.truth,
                         "complete matrix CSV; adds mse_missing to the fit metadata");
    complete->add_option("--max-iters", complete_args.max_iters, "iteration cap");
    complete->add_option("--tol", complete_args.tol, "relative convergence tolerance");

    SimulateArgs simulate_args;
    CLI::App* simulate = app.add_subcommand(
        "simulate", "run a seeded sweep over MCAR levels and write CSV reports");
    simulate->add_option("--preset", simulate_args.preset,
                         "shipped scenario preset (toy-A..toy-D, high-A..high-D)");
    simulate->add_option("--config", simulate_args.config, "scenario config JSON file");
    simulate->add_option("--mcar-grid", simulate_args.mcar_grid,
                         "MCAR levels as start:stop:step or a single value");
    simulate->add_option("--replicates", simulate_args.replicates, "replicates per cell");
    simulate->add_option("--methods", simulate_args.methods, "comma list: lrmc,smc");
    simulate->add_option("--seed", simulate_args.seed, "sweep seed (default: config seed)");
    simulate->add_option("--rank", simulate_args.rank, "target rank (default: config q)");
    simulate->add_option("--threads", simulate_args.threads,
                         "worker threads (default: SMCKIT_THREADS or hardware)");
    simulate->add_flag("--plot", simulate_args.plot, "write an SVG panel of MSE vs MCAR");
    simulate->add_option("--output", simulate_args.output, "output file prefix")->required();
    simulate->add_option("--max-iters", simulate_args.max_iters, "iteration cap");
    simulate->add_option("--tol", simulate_args.tol, "relative convergence tolerance");

    std::string preset_name, preset_output;
    bool preset_list = false;
    CLI::App* preset =
        app.add_subcommand("preset", "inspect or export shipped scenario presets");
    preset->add_flag("--list", preset_list, "list preset names");
    preset->add_option("--name", preset_name, "preset to export");
    preset->add_option("--output", preset_output, "file to write the preset config to");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInput;
    }

    try {
        if (complete->parsed()) {
            if (lambda_opt->count()) complete_args.lambda = lambda_in;
            if (rank_opt->count()) complete_args.rank = rank_in;
            return run_complete(complete_args, log);
        }
        if (simulate->parsed()) return run_simulate(simulate_args, log);
        if (preset->parsed()) {
            if (preset_list) {
                for (const auto& name : smckit::preset_names()) std::cout << name << '\n';
                return kExitOk;
            }
            if (preset_name.empty() || preset_output.empty())
                throw smckit::InvalidInputError("preset: need --list or --name with --output");
            smckit::write_scenario_file(preset_output, smckit::make_preset(preset_name));
            log.info("wrote " + preset_output);
            return kExitOk;
        }
        throw smckit::InvalidInputError("no subcommand given");
    } catch (const smckit::InvalidInputError& e) {
        log.error(e.what());
        return kExitInput;
    } catch (const smckit::SolverFailureError& e) {
        log.error(e.what());
        return kExitSolver;
    } catch (const std::exception& e) {
        log.error(std::string("unexpected: ") + e.what());
        return kExitUnexpected;
    }
}

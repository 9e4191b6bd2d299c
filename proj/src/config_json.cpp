#include "smckit/config_json.hpp"

#include <fstream>

namespace smckit {

namespace {

nlohmann::json matrix_to_json(const Matrix& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const nlohmann::json& j, const std::string& key) {
    if (!j.is_array()) throw InvalidInputError("config: '" + key + "' must be an array of rows");
    const Index rows = static_cast<Index>(j.size());
    if (rows == 0) return Matrix(0, 0);
    const Index cols = static_cast<Index>(j.at(0).size());
    Matrix m(rows, cols);
    for (Index i = 0; i < rows; ++i) {
        const auto& row = j.at(static_cast<std::size_t>(i));
        if (static_cast<Index>(row.size()) != cols)
            throw InvalidInputError("config: ragged rows in '" + key + "'");
        for (Index c = 0; c < cols; ++c) m(i, c) = row.at(static_cast<std::size_t>(c)).get<double>();
    }
    return m;
}

template <typename T>
T require(const nlohmann::json& j, const std::string& key) {
    if (!j.contains(key)) throw InvalidInputError("config: missing key '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw InvalidInputError("config: key '" + key + "' has the wrong type");
    }
}

} // namespace

nlohmann::json scenario_to_json(const ScenarioConfig& cfg) {
    nlohmann::json j;
    j["name"] = cfg.name;
    j["scenario"] = std::string(1, cfg.scenario);
    j["grid_side"] = cfg.grid_side;
    j["p"] = cfg.p;
    j["q"] = cfg.q;
    j["n_monitor"] = cfg.n_monitor;
    j["n_new"] = cfg.n_new;
    j["mcar_level"] = cfg.mcar_level;
    j["field_range"] = cfg.field_range;
    j["field_sill"] = cfg.field_sill;
    j["covariate_range"] = cfg.covariate_range;
    j["noise_sd"] = cfg.noise_sd;
    j["seed"] = cfg.seed;
    j["b_o"] = matrix_to_json(cfg.b_o);
    j["b_u"] = matrix_to_json(cfg.b_u);
    j["v"] = matrix_to_json(cfg.v);
    return j;
}

ScenarioConfig scenario_from_json(const nlohmann::json& j) {
    ScenarioConfig cfg;
    cfg.name = require<std::string>(j, "name");
    const std::string scenario = require<std::string>(j, "scenario");
    if (scenario.size() != 1)
        throw InvalidInputError("config: 'scenario' must be a single letter A-D");
    cfg.scenario = scenario[0];
    cfg.grid_side = require<Index>(j, "grid_side");
    cfg.p = require<Index>(j, "p");
    cfg.q = require<Index>(j, "q");
    cfg.n_monitor = require<Index>(j, "n_monitor");
    cfg.n_new = require<Index>(j, "n_new");
    cfg.mcar_level = require<double>(j, "mcar_level");
    cfg.field_range = require<double>(j, "field_range");
    cfg.field_sill = require<double>(j, "field_sill");
    cfg.covariate_range = require<double>(j, "covariate_range");
    cfg.noise_sd = require<double>(j, "noise_sd");
    cfg.seed = require<std::uint64_t>(j, "seed");
    cfg.b_o = matrix_from_json(j.at("b_o"), "b_o");
    cfg.b_u = matrix_from_json(j.at("b_u"), "b_u");
    cfg.v = matrix_from_json(j.at("v"), "v");
    cfg.validate();
    return cfg;
}

ScenarioConfig read_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInputError("cannot open '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInputError(path + ": invalid JSON (" + e.what() + ")");
    }
    return scenario_from_json(j);
}

void write_scenario_file(const std::string& path, const ScenarioConfig& cfg) {
    std::ofstream out(path);
    if (!out) throw InvalidInputError("cannot open '" + path + "' for writing");
    out << scenario_to_json(cfg).dump(2) << '\n';
}

nlohmann::json recipe_to_json(const DesignRecipe& recipe) {
    nlohmann::json j;
    j["include_linear_terms"] = recipe.include_linear_terms;
    j["covariate_labels"] = recipe.covariate_labels;
    j["dropped_covariates"] = recipe.dropped_covariates;
    nlohmann::json knots = nlohmann::json::array();
    for (const auto& k : recipe.knots) knots.push_back({k.s1, k.s2});
    j["knots"] = std::move(knots);
    nlohmann::json scaling = nlohmann::json::array();
    for (const auto& s : recipe.scaling) scaling.push_back({s.center, s.spread});
    j["scaling"] = std::move(scaling);
    return j;
}

DesignRecipe recipe_from_json(const nlohmann::json& j) {
    DesignRecipe recipe;
    recipe.include_linear_terms = require<bool>(j, "include_linear_terms");
    recipe.covariate_labels = require<std::vector<std::string>>(j, "covariate_labels");
    recipe.dropped_covariates = require<std::vector<std::string>>(j, "dropped_covariates");
    for (const auto& k : j.at("knots"))
        recipe.knots.push_back(Point2{k.at(0).get<double>(), k.at(1).get<double>()});
    for (const auto& s : j.at("scaling"))
        recipe.scaling.push_back(ColumnScaling{s.at(0).get<double>(), s.at(1).get<double>()});
    return recipe;
}

} // namespace smckit

#pragma once

#include "sppost/simulation.hpp"
#include "sppost/types.hpp"

#include <json.hpp>

#include <Eigen/Dense>

#include <istream>
#include <map>
#include <string>
#include <vector>

namespace sppost {

struct CsvTable {
    std::vector<std::string> header;
    /// Row-major numeric cells.
    std::vector<std::vector<double>> rows;
};

/// Reads a header row followed by numeric rows. Throws ParseError naming the
/// 1-based line for ragged rows or non-numeric cells.
CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::string& path);

/// Splits a table into predictors and the named response column.
/// With `standardize`, every predictor column is centered and scaled to unit
/// (population) variance. Throws InvalidArgument if the column is missing.
Dataset dataset_from_table(const CsvTable& table, const std::string& response,
                           bool standardize, std::vector<std::string>* predictor_names = nullptr);

/// Everything the fit pipeline reports.
struct FitResult {
    int schema = 1;
    std::vector<std::string> names;
    std::size_t n = 0;
    double lambda_n = 0.0;
    double lambda0 = 0.0;
    bool lambda_from_cv = false;
    std::optional<double> target;
    /// Credibility used for a coordinate with unit Gram diagonal (equals the
    /// requested level when no target is given).
    double level = 0.0;
    double sigma_hat = 0.0;
    std::uint64_t seed = 0;
    std::size_t draws = 0;
    std::vector<double> lasso;
    std::vector<double> ridge_mean;
    std::vector<double> component_level;
    std::vector<double> lower;
    std::vector<double> upper;
    std::vector<double> radius;
    std::vector<double> inclusion;
    std::map<std::vector<Eigen::Index>, double> model_probabilities;
    double max_kkt = 0.0;

    bool operator==(const FitResult&) const = default;
};

nlohmann::json to_json(const FitResult& result);
/// Throws ParseError on a missing field or unsupported schema.
FitResult fit_result_from_json(const nlohmann::json& j);

/// Reads a scenario JSON config. Unknown keys are rejected.
Scenario scenario_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Scenario& scenario);

}  // namespace sppost

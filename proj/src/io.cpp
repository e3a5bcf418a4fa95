#include "sppost/io.hpp"

#include "sppost/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace sppost {

using nlohmann::json;

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(trim(std::string_view(line).substr(start, comma - start)));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

[[noreturn]] void parse_fail(std::size_t line, const std::string& what) {
    throw Error(ErrorKind::ParseError, "line " + std::to_string(line) + ": " + what);
}

double parse_cell(const std::string& cell, std::size_t line, std::size_t column) {
    const char* first = cell.data();
    const char* last = first + cell.size();
    if (first != last && *first == '+') ++first;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (cell.empty() || ec != std::errc() || ptr != last || !std::isfinite(v)) {
        parse_fail(line, "column " + std::to_string(column) + " is not a finite number: '" +
                             cell + "'");
    }
    return v;
}

template <class T>
T required(const json& j, const char* key) {
    if (!j.contains(key)) throw Error(ErrorKind::ParseError, std::string("missing field '") + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw Error(ErrorKind::ParseError, std::string("field '") + key + "': " + e.what());
    }
}

}  // namespace

CsvTable read_csv(std::istream& in) {
    CsvTable table;
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
        if (trim(line).empty()) continue;
        auto fields = split_fields(line);
        if (!have_header) {
            std::set<std::string> seen;
            for (const auto& f : fields) {
                if (f.empty()) parse_fail(line_no, "empty column name");
                if (!seen.insert(f).second) parse_fail(line_no, "duplicate column '" + f + "'");
            }
            table.header = std::move(fields);
            have_header = true;
            continue;
        }
        if (fields.size() != table.header.size()) {
            parse_fail(line_no, "expected " + std::to_string(table.header.size()) +
                                    " fields, found " + std::to_string(fields.size()));
        }
        std::vector<double> row(fields.size());
        for (std::size_t c = 0; c < fields.size(); ++c) row[c] = parse_cell(fields[c], line_no, c + 1);
        table.rows.push_back(std::move(row));
    }
    if (!have_header) throw Error(ErrorKind::ParseError, "missing header row");
    return table;
}

CsvTable read_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::ParseError, "cannot open '" + path + "'");
    try {
        return read_csv(in);
    } catch (const Error& e) {
        throw Error(ErrorKind::ParseError, path + ": " + e.what());
    }
}

Dataset dataset_from_table(const CsvTable& table, const std::string& response, bool standardize,
                           std::vector<std::string>* predictor_names) {
    std::size_t resp = table.header.size();
    for (std::size_t c = 0; c < table.header.size(); ++c) {
        if (table.header[c] == response) resp = c;
    }
    if (resp == table.header.size()) {
        throw Error(ErrorKind::InvalidArgument, "response column '" + response + "' not found");
    }
    if (table.header.size() < 2) throw Error(ErrorKind::DimensionMismatch, "no predictor columns");
    const auto n = static_cast<Eigen::Index>(table.rows.size());
    const auto p = static_cast<Eigen::Index>(table.header.size() - 1);
    Eigen::MatrixXd X(n, p);
    Eigen::VectorXd Y(n);
    std::vector<std::string> names;
    for (std::size_t c = 0; c < table.header.size(); ++c) {
        if (c != resp) names.push_back(table.header[c]);
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& row = table.rows[static_cast<std::size_t>(i)];
        Eigen::Index col = 0;
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c == resp) {
                Y[i] = row[c];
            } else {
                X(i, col++) = row[c];
            }
        }
    }
    if (standardize && n > 0) {
        for (Eigen::Index j = 0; j < p; ++j) {
            const double mean = X.col(j).mean();
            X.col(j).array() -= mean;
            const double sd = std::sqrt(X.col(j).squaredNorm() / static_cast<double>(n));
            if (!(sd > 0.0)) {
                throw Error(ErrorKind::InvalidArgument,
                            "column '" + names[static_cast<std::size_t>(j)] + "' is constant");
            }
            X.col(j) /= sd;
        }
    }
    if (predictor_names) *predictor_names = std::move(names);
    return Dataset(std::move(X), std::move(Y));
}

json to_json(const FitResult& r) {
    json coefs = json::array();
    for (std::size_t j = 0; j < r.lasso.size(); ++j) {
        coefs.push_back({{"name", j < r.names.size() ? r.names[j] : std::string()},
                         {"lasso", r.lasso[j]},
                         {"ridge_mean", r.ridge_mean[j]},
                         {"level", r.component_level[j]},
                         {"lower", r.lower[j]},
                         {"upper", r.upper[j]},
                         {"radius", r.radius[j]},
                         {"inclusion", r.inclusion[j]}});
    }
    json models = json::array();
    for (const auto& [support, prob] : r.model_probabilities) {
        models.push_back({{"support", support}, {"probability", prob}});
    }
    json out = {{"schema", r.schema},
                {"n", r.n},
                {"lambda_n", r.lambda_n},
                {"lambda0", r.lambda0},
                {"lambda_from_cv", r.lambda_from_cv},
                {"target", r.target ? json(*r.target) : json(nullptr)},
                {"level", r.level},
                {"sigma_hat", r.sigma_hat},
                {"seed", r.seed},
                {"draws", r.draws},
                {"coefficients", std::move(coefs)},
                {"model_probabilities", std::move(models)},
                {"diagnostics", {{"max_kkt", r.max_kkt}}}};
    return out;
}

FitResult fit_result_from_json(const json& j) {
    if (!j.is_object()) throw Error(ErrorKind::ParseError, "fit result must be a JSON object");
    FitResult r;
    r.schema = required<int>(j, "schema");
    if (r.schema != 1) {
        throw Error(ErrorKind::ParseError, "unsupported schema " + std::to_string(r.schema));
    }
    r.n = required<std::size_t>(j, "n");
    r.lambda_n = required<double>(j, "lambda_n");
    r.lambda0 = required<double>(j, "lambda0");
    r.lambda_from_cv = required<bool>(j, "lambda_from_cv");
    if (!j.contains("target")) throw Error(ErrorKind::ParseError, "missing field 'target'");
    if (!j["target"].is_null()) r.target = required<double>(j, "target");
    r.level = required<double>(j, "level");
    r.sigma_hat = required<double>(j, "sigma_hat");
    r.seed = required<std::uint64_t>(j, "seed");
    r.draws = required<std::size_t>(j, "draws");
    const auto coefs = required<json>(j, "coefficients");
    if (!coefs.is_array()) throw Error(ErrorKind::ParseError, "'coefficients' must be an array");
    for (const auto& c : coefs) {
        r.names.push_back(required<std::string>(c, "name"));
        r.lasso.push_back(required<double>(c, "lasso"));
        r.ridge_mean.push_back(required<double>(c, "ridge_mean"));
        r.component_level.push_back(required<double>(c, "level"));
        r.lower.push_back(required<double>(c, "lower"));
        r.upper.push_back(required<double>(c, "upper"));
        r.radius.push_back(required<double>(c, "radius"));
        r.inclusion.push_back(required<double>(c, "inclusion"));
    }
    const auto models = required<json>(j, "model_probabilities");
    if (!models.is_array()) {
        throw Error(ErrorKind::ParseError, "'model_probabilities' must be an array");
    }
    for (const auto& m : models) {
        r.model_probabilities[required<std::vector<Eigen::Index>>(m, "support")] =
            required<double>(m, "probability");
    }
    r.max_kkt = required<double>(required<json>(j, "diagnostics"), "max_kkt");
    return r;
}

Scenario scenario_from_json(const json& j) {
    if (!j.is_object()) throw Error(ErrorKind::ParseError, "scenario must be a JSON object");
    static const std::set<std::string> known = {
        "n", "p", "design", "rho", "theta0", "signals", "error_sd", "replications",
        "draws_per_rep", "target_coverage", "seed", "lambda_n", "cv_folds", "cv_grid_size",
        "prior"};
    for (const auto& [key, value] : j.items()) {
        if (!known.count(key)) throw Error(ErrorKind::ParseError, "unknown scenario key '" + key + "'");
    }
    Scenario s;
    if (j.contains("n")) s.n = required<Eigen::Index>(j, "n");
    if (j.contains("p")) s.p = required<Eigen::Index>(j, "p");
    const std::string design = j.contains("design") ? required<std::string>(j, "design") : "independent";
    if (design == "independent") {
        s.design = Design::independent();
        if (j.contains("rho")) throw Error(ErrorKind::ParseError, "'rho' requires design 'ar1'");
    } else if (design == "ar1") {
        s.design = Design::ar1(j.contains("rho") ? required<double>(j, "rho") : 0.7);
    } else {
        throw Error(ErrorKind::ParseError, "design must be 'independent' or 'ar1'");
    }
    if (j.contains("theta0") && j.contains("signals")) {
        throw Error(ErrorKind::ParseError, "give either 'theta0' or 'signals', not both");
    }
    if (j.contains("theta0")) {
        const auto t = required<std::vector<double>>(j, "theta0");
        s.theta0 = Eigen::Map<const Eigen::VectorXd>(t.data(), static_cast<Eigen::Index>(t.size()));
    } else {
        std::vector<double> signals = default_signals();
        if (j.contains("signals")) {
            const auto& sig = j["signals"];
            if (sig.is_string()) {
                const auto name = sig.get<std::string>();
                if (name == "alternate") {
                    signals = alternate_signals();
                } else if (name != "default") {
                    throw Error(ErrorKind::ParseError, "signals must be 'default', 'alternate' or an array");
                }
            } else {
                signals = required<std::vector<double>>(j, "signals");
            }
        }
        try {
            s.theta0 = make_scenario(s.n, s.p, signals).theta0;
        } catch (const Error& e) {
            throw Error(ErrorKind::ParseError, e.what());
        }
    }
    if (j.contains("error_sd")) s.error_sd = required<double>(j, "error_sd");
    if (j.contains("replications")) s.replications = required<std::size_t>(j, "replications");
    if (j.contains("draws_per_rep")) s.draws_per_rep = required<std::size_t>(j, "draws_per_rep");
    if (j.contains("target_coverage")) s.target_coverage = required<double>(j, "target_coverage");
    if (j.contains("seed")) s.seed = required<std::uint64_t>(j, "seed");
    if (j.contains("lambda_n") && !j["lambda_n"].is_null()) s.lambda_n = required<double>(j, "lambda_n");
    if (j.contains("cv_folds")) s.cv_folds = required<std::size_t>(j, "cv_folds");
    if (j.contains("cv_grid_size")) s.cv_grid_size = required<std::size_t>(j, "cv_grid_size");
    if (j.contains("prior")) {
        const auto& pr = j["prior"];
        if (!pr.is_object()) throw Error(ErrorKind::ParseError, "'prior' must be an object");
        for (const auto& [key, value] : pr.items()) {
            if (key != "a_n" && key != "b1" && key != "b2") {
                throw Error(ErrorKind::ParseError, "unknown prior key '" + key + "'");
            }
        }
        if (pr.contains("a_n")) s.prior.a_n = required<double>(pr, "a_n");
        if (pr.contains("b1")) s.prior.b1 = required<double>(pr, "b1");
        if (pr.contains("b2")) s.prior.b2 = required<double>(pr, "b2");
    }
    try {
        s.validate();
    } catch (const Error& e) {
        throw Error(ErrorKind::ParseError, e.what());
    }
    return s;
}

json to_json(const Scenario& s) {
    json out = {{"n", s.n},
                {"p", s.p},
                {"design", s.design.kind == DesignKind::AR1 ? "ar1" : "independent"},
                {"theta0", std::vector<double>(s.theta0.data(), s.theta0.data() + s.theta0.size())},
                {"error_sd", s.error_sd},
                {"replications", s.replications},
                {"draws_per_rep", s.draws_per_rep},
                {"target_coverage", s.target_coverage},
                {"seed", s.seed},
                {"lambda_n", s.lambda_n ? json(*s.lambda_n) : json(nullptr)},
                {"cv_folds", s.cv_folds},
                {"cv_grid_size", s.cv_grid_size},
                {"prior", {{"a_n", s.prior.a_n}, {"b1", s.prior.b1}, {"b2", s.prior.b2}}}};
    if (s.design.kind == DesignKind::AR1) out["rho"] = s.design.rho;
    return out;
}

}  // namespace sppost

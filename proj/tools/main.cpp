// sppost: sparse projection-posterior credible intervals from the command line.

#include "sppost/calibration.hpp"
#include "sppost/errors.hpp"
#include "sppost/io.hpp"
#include "sppost/limit_lab.hpp"
#include "sppost/parallel.hpp"
#include "sppost/pipeline.hpp"
#include "sppost/simulation.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

namespace {

constexpr int kUsageError = 2;
constexpr int kRunError = 1;

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw sppost::Error(sppost::ErrorKind::InvalidArgument, "cannot write '" + path + "'");
    out << text;
}

struct FitArgs {
    std::string data;
    std::string response = "y";
    double level = 0.95;
    double target = 0.0;
    std::string lambda = "auto";
    double a_n = 1.0, b1 = 0.0, b2 = 0.0;
    std::size_t draws = 2000;
    std::uint64_t seed = 1;
    std::size_t cv_folds = 10;
    std::string out;
    bool standardize = false;
};

int cmd_fit(const FitArgs& a, bool has_target, unsigned threads) {
    std::vector<std::string> names;
    const auto data = sppost::dataset_from_table(sppost::read_csv_file(a.data), a.response,
                                                 a.standardize, &names);
    sppost::PriorConfig prior{a.a_n, a.b1, a.b2};
    sppost::FitConfig cfg;
    cfg.draws = a.draws;
    cfg.seed = a.seed;
    cfg.level = a.level;
    cfg.cv_folds = a.cv_folds;
    if (has_target) cfg.target_coverage = a.target;
    if (a.lambda != "auto") {
        try {
            std::size_t used = 0;
            cfg.lambda_n = std::stod(a.lambda, &used);
            if (used != a.lambda.size()) throw std::invalid_argument(a.lambda);
        } catch (const std::exception&) {
            throw sppost::Error(sppost::ErrorKind::InvalidArgument,
                                "--lambda must be 'auto' or a number");
        }
    }
    auto result = sppost::fit_model(data, prior, cfg, threads);
    result.names = names;
    std::fprintf(stderr, "seed=%llu lambda_n=%.6g lambda0=%.6g level=%.6f max_kkt=%.3g\n",
                 static_cast<unsigned long long>(result.seed), result.lambda_n, result.lambda0,
                 result.level, result.max_kkt);
    write_text(a.out, sppost::to_json(result).dump(2) + "\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sparse projection-posterior credible intervals for linear regression"};
    app.require_subcommand(1);
    app.fallthrough();
    unsigned threads = sppost::default_thread_count();
    app.add_option("--threads", threads, "Worker threads (default: SPPOST_THREADS or all cores)")
        ->check(CLI::PositiveNumber);

    FitArgs fit;
    auto* fit_cmd = app.add_subcommand("fit", "Fit a dataset and write credible intervals as JSON");
    fit_cmd->add_option("--data", fit.data, "CSV file with a header row")->required();
    fit_cmd->add_option("--response", fit.response, "Response column name")->capture_default_str();
    auto* level_opt = fit_cmd->add_option("--level", fit.level, "Credibility level 1-gamma")
                          ->check(CLI::Range(0.0, 1.0));
    auto* target_opt = fit_cmd->add_option("--target", fit.target,
                                           "Target coverage; calibrates the credibility level")
                           ->check(CLI::Range(0.0, 1.0));
    level_opt->excludes(target_opt);
    fit_cmd->add_option("--lambda", fit.lambda, "Projection penalty: 'auto' (CV) or a value")
        ->capture_default_str();
    fit_cmd->add_option("--an", fit.a_n, "Prior precision a_n")->capture_default_str();
    fit_cmd->add_option("--b1", fit.b1, "Gamma prior shape")->capture_default_str();
    fit_cmd->add_option("--b2", fit.b2, "Gamma prior rate")->capture_default_str();
    fit_cmd->add_option("--draws", fit.draws, "Posterior draws")->capture_default_str();
    fit_cmd->add_option("--seed", fit.seed, "Random seed")->capture_default_str();
    fit_cmd->add_option("--cv-folds", fit.cv_folds, "Cross-validation folds")->capture_default_str();
    fit_cmd->add_flag("--standardize", fit.standardize, "Center and scale predictor columns");
    fit_cmd->add_option("--out", fit.out, "Output JSON path (default stdout)");

    double cal_lambda0 = 0.0, cal_target = 0.95, cal_cj = 1.0, cal_sigma = 1.0;
    int cal_digits = 4;
    auto* cal_cmd = app.add_subcommand("calibrate", "Print the credibility level for a target");
    cal_cmd->add_option("--lambda0", cal_lambda0, "Limiting penalty lambda_0")->required();
    cal_cmd->add_option("--target", cal_target, "Target coverage")->capture_default_str();
    cal_cmd->add_option("--cj", cal_cj, "Limiting Gram diagonal entry")->capture_default_str();
    cal_cmd->add_option("--sigma0", cal_sigma, "Error standard deviation")->capture_default_str();
    cal_cmd->add_option("--digits", cal_digits, "Decimals printed")->capture_default_str()
        ->check(CLI::Range(1, 17));

    std::string table_out;
    auto* table_cmd = app.add_subcommand("table", "Emit the calibration table as CSV");
    table_cmd->add_option("--out", table_out, "Output CSV path (default stdout)");

    std::string sim_config, sim_out, sweep_out;
    std::vector<std::size_t> sweep_s;
    std::vector<double> sweep_targets{0.9, 0.95, 0.99};
    auto* sim_cmd = app.add_subcommand("simulate", "Run a coverage study from a JSON scenario");
    sim_cmd->add_option("--config", sim_config, "Scenario JSON")->required();
    sim_cmd->add_option("--out", sim_out, "Coverage CSV path (default stdout)");
    sim_cmd->add_option("--sweep-s", sweep_s, "Run a sparsity sweep over these s values instead");
    sim_cmd->add_option("--sweep-targets", sweep_targets, "Target coverages for the sweep")
        ->capture_default_str();

    std::vector<double> lc_lambdas{0.5, 1.0, 2.0}, lc_targets{0.95};
    std::vector<int> lc_signs{1, -1, 0};
    std::size_t lc_outer = 2000, lc_inner = 2000;
    std::uint64_t lc_seed = 1;
    std::string lc_out;
    auto* lc_cmd = app.add_subcommand("limitcheck",
                                      "Monte-Carlo limiting coverage for an orthogonal design");
    lc_cmd->add_option("--lambda0", lc_lambdas, "Limiting penalties")->capture_default_str();
    lc_cmd->add_option("--target", lc_targets, "Target coverages")->capture_default_str();
    lc_cmd->add_option("--signs", lc_signs, "Sign of each true coefficient (-1, 0, 1)")
        ->capture_default_str();
    lc_cmd->add_option("--outer", lc_outer, "Outer draws of Delta")->capture_default_str();
    lc_cmd->add_option("--inner", lc_inner, "Inner draws per Delta")->capture_default_str();
    lc_cmd->add_option("--seed", lc_seed, "Random seed")->capture_default_str();
    lc_cmd->add_option("--out", lc_out, "Output CSV path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsageError;
    }

    try {
        if (*fit_cmd) return cmd_fit(fit, target_opt->count() > 0, threads);
        if (*cal_cmd) {
            const auto r = sppost::solve_gamma({cal_lambda0, cal_target, cal_cj, cal_sigma});
            std::fprintf(stderr, "lambda0=%g target=%g level=%.10f psi=%.10f\n", cal_lambda0,
                         cal_target, r.gamma_level, r.psi_at_gamma);
            std::printf("%.*f\n", cal_digits, r.gamma_level);
            return 0;
        }
        if (*table_cmd) {
            const auto& lambdas = sppost::default_table_lambdas();
            const auto& targets = sppost::default_table_targets();
            write_text(table_out, sppost::calibration_table_csv(
                                      lambdas, targets, sppost::calibration_table(lambdas, targets)));
            return 0;
        }
        if (*sim_cmd) {
            std::ifstream in(sim_config);
            if (!in) throw sppost::Error(sppost::ErrorKind::ParseError, "cannot open '" + sim_config + "'");
            nlohmann::json j;
            try {
                in >> j;
            } catch (const nlohmann::json::exception& e) {
                throw sppost::Error(sppost::ErrorKind::ParseError, sim_config + ": " + e.what());
            }
            const auto scenario = sppost::scenario_from_json(j);
            if (!sweep_s.empty()) {
                const auto rows = sppost::sparsity_sweep(scenario, sweep_s, sweep_targets, threads);
                std::fprintf(stderr, "seed=%llu sweep rows=%zu\n",
                             static_cast<unsigned long long>(scenario.seed), rows.size());
                write_text(sim_out, sppost::sweep_csv(rows));
                return 0;
            }
            const auto report = sppost::run_scenario(scenario, threads);
            std::fprintf(stderr,
                         "seed=%llu lambda_n=%s mean_lambda0=%.6g target=%g max_kkt=%.3g "
                         "runtime=%.1fs\n",
                         static_cast<unsigned long long>(scenario.seed),
                         scenario.lambda_n ? std::to_string(*scenario.lambda_n).c_str() : "cv",
                         report.mean_lambda0, scenario.target_coverage, report.max_kkt,
                         report.runtime_seconds);
            write_text(sim_out, sppost::coverage_report_csv(scenario, report));
            return 0;
        }
        if (*lc_cmd) {
            const auto rows = sppost::limit_check(lc_lambdas, lc_targets, lc_signs, lc_outer,
                                                  lc_inner, lc_seed, threads);
            std::fprintf(stderr, "seed=%llu rows=%zu\n", static_cast<unsigned long long>(lc_seed),
                         rows.size());
            write_text(lc_out, sppost::limit_check_csv(rows));
            return 0;
        }
    } catch (const sppost::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kRunError;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kRunError;
    }
    return kUsageError;
}

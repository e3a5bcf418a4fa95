#include "sppost/simulation.hpp"

#include "sppost/calibration.hpp"
#include "sppost/errors.hpp"
#include "sppost/parallel.hpp"
#include "sppost/posterior.hpp"
#include "sppost/projection.hpp"
#include "sppost/regions.hpp"
#include "sppost/rng.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>

namespace sppost {

namespace {

// Stream keys within one replication.
constexpr std::uint64_t kDataStream = 0;
constexpr std::uint64_t kCvStream = 1;
constexpr std::uint64_t kPosteriorStream = 2;

const char* design_name(const Design& d) {
    return d.kind == DesignKind::AR1 ? "ar1" : "independent";
}

}  // namespace

std::vector<double> default_signals() { return {-2.0, -1.5, 0.5, 1.0, 2.0}; }
std::vector<double> alternate_signals() { return {-2.0, -1.5, 0.5, 1.0, 1.5}; }

void Scenario::validate() const {
    if (n < 1 || p < 1) throw Error(ErrorKind::InvalidArgument, "n and p must be positive");
    if (theta0.size() != p) throw Error(ErrorKind::DimensionMismatch, "theta0 must have length p");
    if (!theta0.allFinite()) throw Error(ErrorKind::NonFiniteInput, "theta0 is not finite");
    if (!(error_sd > 0.0) || !std::isfinite(error_sd)) {
        throw Error(ErrorKind::InvalidArgument, "error_sd must be positive");
    }
    if (replications < 1) throw Error(ErrorKind::InvalidArgument, "replications must be >= 1");
    if (draws_per_rep < 1) throw Error(ErrorKind::InvalidArgument, "draws_per_rep must be >= 1");
    if (!(target_coverage > 0.0 && target_coverage < 1.0)) {
        throw Error(ErrorKind::InvalidArgument, "target_coverage must lie in (0, 1)");
    }
    if (design.kind == DesignKind::AR1 && !(std::abs(design.rho) < 1.0)) {
        throw Error(ErrorKind::InvalidArgument, "AR1 requires |rho| < 1");
    }
    if (lambda_n && !(*lambda_n >= 0.0 && std::isfinite(*lambda_n))) {
        throw Error(ErrorKind::InvalidArgument, "lambda_n must be nonnegative");
    }
    if (!lambda_n && (cv_folds < 2 || cv_grid_size < 1)) {
        throw Error(ErrorKind::InvalidArgument, "cross-validation needs >= 2 folds and a grid");
    }
    prior.validate();
}

Scenario make_scenario(Eigen::Index n, Eigen::Index p, const std::vector<double>& signals) {
    if (static_cast<Eigen::Index>(signals.size()) > p) {
        throw Error(ErrorKind::InvalidArgument, "more signals than predictors");
    }
    Scenario s;
    s.n = n;
    s.p = p;
    s.theta0 = Eigen::VectorXd::Zero(p);
    for (std::size_t j = 0; j < signals.size(); ++j) s.theta0[static_cast<Eigen::Index>(j)] = signals[j];
    return s;
}

Dataset generate_data(const Scenario& scenario, std::size_t rep_index) {
    scenario.validate();
    Rng rng(derive_seed(scenario.seed, rep_index), kDataStream);
    std::normal_distribution<double> normal;
    const Eigen::Index n = scenario.n, p = scenario.p;
    Eigen::MatrixXd X(n, p);
    const double rho = scenario.design.rho;
    const double innov = std::sqrt(1.0 - rho * rho);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < p; ++j) {
            const double e = normal(rng);
            if (scenario.design.kind == DesignKind::AR1 && j > 0) {
                X(i, j) = rho * X(i, j - 1) + innov * e;
            } else {
                X(i, j) = e;
            }
        }
    }
    Eigen::VectorXd Y = X * scenario.theta0;
    for (Eigen::Index i = 0; i < n; ++i) Y[i] += scenario.error_sd * normal(rng);
    return Dataset(std::move(X), std::move(Y));
}

ReplicationRecord run_replication(const Scenario& scenario, std::size_t rep_index) {
    try {
        const Dataset data = generate_data(scenario, rep_index);
        const std::uint64_t rep_seed = derive_seed(scenario.seed, rep_index);
        const Eigen::Index p = data.p();
        const double sqrt_n = std::sqrt(static_cast<double>(data.n()));

        ReplicationRecord rec;
        rec.rep_index = rep_index;
        if (scenario.lambda_n) {
            rec.lambda_n = *scenario.lambda_n;
        } else {
            const auto grid = default_lambda_grid(data, scenario.cv_grid_size);
            rec.lambda_n = cross_validate_lambda(data, grid, scenario.cv_folds,
                                                 derive_seed(rep_seed, kCvStream));
        }
        rec.lambda0 = rec.lambda_n * sqrt_n;

        const auto fact = factorize(data, scenario.prior);
        rec.sigma_hat = std::sqrt(ridge_residual_variance(data, fact.ridge_mean));

        ProjectedSample sample;
        sample.n = data.n();
        sample.level = scenario.target_coverage;
        sample.center = fit_lasso(data, rec.lambda_n);
        const auto draws = sample_posterior(fact, scenario.draws_per_rep,
                                            derive_seed(rep_seed, kPosteriorStream));
        sample.draws = project_draws(data, draws, rec.lambda_n);

        for (const auto& d : sample.draws) rec.max_kkt = std::max(rec.max_kkt, d.kkt_residual);
        rec.covered.resize(static_cast<std::size_t>(p));
        rec.length.resize(static_cast<std::size_t>(p));
        rec.level.resize(static_cast<std::size_t>(p));
        rec.inclusion.assign(static_cast<std::size_t>(p), 0.0);
        for (const auto& d : sample.draws) {
            for (Eigen::Index j : d.support) rec.inclusion[static_cast<std::size_t>(j)] += 1.0;
        }
        for (Eigen::Index j = 0; j < p; ++j) {
            const auto k = static_cast<std::size_t>(j);
            const double level = solve_gamma({rec.lambda0, scenario.target_coverage,
                                              data.gram()(j, j), rec.sigma_hat})
                                     .gamma_level;
            const auto [lo, hi] = component_interval(sample, j, level);
            rec.level[k] = level;
            rec.covered[k] = (lo <= scenario.theta0[j] && scenario.theta0[j] <= hi) ? 1 : 0;
            rec.length[k] = hi - lo;
            rec.inclusion[k] /= static_cast<double>(sample.draws.size());
        }
        return rec;
    } catch (const Error& e) {
        throw Error(e.kind(), "replication " + std::to_string(rep_index) + ": " + e.what());
    }
}

CoverageReport aggregate(const std::vector<ReplicationRecord>& records) {
    if (records.empty()) throw Error(ErrorKind::InvalidArgument, "no records to aggregate");
    const std::size_t p = records.front().covered.size();
    CoverageReport r;
    r.replications = records.size();
    r.coverage.assign(p, 0.0);
    r.mean_length.assign(p, 0.0);
    r.selection_frequency.assign(p, 0.0);
    for (const auto& rec : records) {
        if (rec.covered.size() != p) {
            throw Error(ErrorKind::DimensionMismatch, "records disagree on component count");
        }
        for (std::size_t j = 0; j < p; ++j) {
            r.coverage[j] += rec.covered[j];
            r.mean_length[j] += rec.length[j];
            r.selection_frequency[j] += rec.inclusion[j];
        }
        r.mean_lambda0 += rec.lambda0;
        r.max_kkt = std::max(r.max_kkt, rec.max_kkt);
    }
    const double m = static_cast<double>(records.size());
    r.std_error.resize(p);
    for (std::size_t j = 0; j < p; ++j) {
        r.coverage[j] /= m;
        r.mean_length[j] /= m;
        r.selection_frequency[j] /= m;
        r.std_error[j] = std::sqrt(r.coverage[j] * (1.0 - r.coverage[j]) / m);
    }
    r.mean_lambda0 /= m;
    return r;
}

CoverageReport run_scenario(const Scenario& scenario, unsigned threads) {
    scenario.validate();
    const auto start = std::chrono::steady_clock::now();
    std::vector<ReplicationRecord> records(scenario.replications);
    parallel_for(scenario.replications, threads,
                 [&](std::size_t r) { records[r] = run_replication(scenario, r); });
    CoverageReport report = aggregate(records);
    report.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

std::string coverage_report_csv(const Scenario& scenario, const CoverageReport& report) {
    std::string out =
        "design,n,p,component,role,theta0,coverage,std_error,mean_length,selection_frequency\n";
    char buf[256];
    for (std::size_t j = 0; j < report.coverage.size(); ++j) {
        const double t = scenario.theta0[static_cast<Eigen::Index>(j)];
        std::snprintf(buf, sizeof buf, "%s,%ld,%ld,%zu,%s,%g,%.4f,%.4f,%.6f,%.4f\n",
                      design_name(scenario.design), static_cast<long>(scenario.n),
                      static_cast<long>(scenario.p), j + 1, t != 0.0 ? "signal" : "noise", t,
                      report.coverage[j], report.std_error[j], report.mean_length[j],
                      report.selection_frequency[j]);
        out += buf;
    }
    return out;
}

std::vector<SweepRow> sparsity_sweep(const Scenario& base, const std::vector<std::size_t>& s_values,
                                     const std::vector<double>& targets, unsigned threads) {
    std::vector<SweepRow> rows;
    for (std::size_t s : s_values) {
        if (static_cast<Eigen::Index>(s) > base.p) {
            throw Error(ErrorKind::InvalidArgument, "sparsity exceeds p");
        }
        for (double target : targets) {
            Scenario sc = base;
            sc.theta0 = Eigen::VectorXd::Zero(base.p);
            sc.theta0.head(static_cast<Eigen::Index>(s)).setOnes();
            sc.target_coverage = target;
            SweepRow row;
            row.s = s;
            row.target = target;
            row.n = base.n;
            row.report = run_scenario(sc, threads);
            double sig = 0.0, noise = 0.0;
            for (std::size_t j = 0; j < row.report.coverage.size(); ++j) {
                (j < s ? sig : noise) += row.report.coverage[j];
            }
            const std::size_t p = row.report.coverage.size();
            const double nan = std::numeric_limits<double>::quiet_NaN();
            row.signal_coverage = s > 0 ? sig / static_cast<double>(s) : nan;
            row.noise_coverage = s < p ? noise / static_cast<double>(p - s) : nan;
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::string out = "s,target,n,signal_coverage,noise_coverage\n";
    char buf[160];
    auto fmt = [](double v) {
        if (std::isnan(v)) return std::string("NA");
        char b[32];
        std::snprintf(b, sizeof b, "%.4f", v);
        return std::string(b);
    };
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%zu,%g,%ld,%s,%s\n", r.s, r.target,
                      static_cast<long>(r.n), fmt(r.signal_coverage).c_str(),
                      fmt(r.noise_coverage).c_str());
        out += buf;
    }
    return out;
}

}  // namespace sppost

#pragma once

#include "sppost/types.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace sppost {

enum class DesignKind { Independent, AR1 };

struct Design {
    DesignKind kind = DesignKind::Independent;
    /// Lag-1 correlation of each row for AR1.
    double rho = 0.0;

    static Design independent() { return {}; }
    static Design ar1(double rho) { return {DesignKind::AR1, rho}; }
};

/// Signal values used in the default coverage study.
std::vector<double> default_signals();
/// Variant with the last signal 1.5 instead of 2.
std::vector<double> alternate_signals();

struct Scenario {
    Eigen::Index n = 500;
    Eigen::Index p = 20;
    Design design;
    Eigen::VectorXd theta0;
    double error_sd = 1.0;
    std::size_t replications = 200;
    std::size_t draws_per_rep = 2000;
    double target_coverage = 0.95;
    std::uint64_t seed = 1;
    /// Fixed projection penalty; empty means cross-validate per replication.
    std::optional<double> lambda_n;
    std::size_t cv_folds = 10;
    std::size_t cv_grid_size = 100;
    PriorConfig prior;

    void validate() const;
};

/// Scenario with the first signals.size() coefficients set to `signals`
/// and the rest zero.
Scenario make_scenario(Eigen::Index n, Eigen::Index p, const std::vector<double>& signals);

/// Per-replication outcome; vectors are indexed by component.
struct ReplicationRecord {
    std::size_t rep_index = 0;
    double lambda_n = 0.0;
    double lambda0 = 0.0;
    double sigma_hat = 0.0;
    std::vector<int> covered;
    std::vector<double> length;
    std::vector<double> level;
    /// Fraction of projected draws with the component in the support.
    std::vector<double> inclusion;
    double max_kkt = 0.0;
};

struct CoverageReport {
    std::size_t replications = 0;
    std::vector<double> coverage;
    std::vector<double> std_error;
    std::vector<double> mean_length;
    std::vector<double> selection_frequency;
    double mean_lambda0 = 0.0;
    double max_kkt = 0.0;
    double runtime_seconds = 0.0;
};

/// X rows are i.i.d. N(0, I) (Independent) or stationary unit-variance AR(1)
/// paths (AR1); Y = Xθ⁰ + ε. Deterministic in (scenario.seed, rep_index).
Dataset generate_data(const Scenario& scenario, std::size_t rep_index);

/// Data → λ_n (fixed or CV) → LASSO center → calibrated per-component levels
/// → projected posterior draws → componentwise intervals → coverage record.
/// Errors are rethrown with the replication index in the message.
ReplicationRecord run_replication(const Scenario& scenario, std::size_t rep_index);

/// Means of the per-replication indicators and lengths.
CoverageReport aggregate(const std::vector<ReplicationRecord>& records);

/// Runs all replications on `threads` workers and aggregates.
CoverageReport run_scenario(const Scenario& scenario, unsigned threads);

/// Coverage-table CSV, one row per component:
/// "design,n,p,component,role,theta0,coverage,std_error,mean_length,selection_frequency".
std::string coverage_report_csv(const Scenario& scenario, const CoverageReport& report);

struct SweepRow {
    std::size_t s = 0;
    double target = 0.0;
    Eigen::Index n = 0;
    /// Mean over signal components; NaN when s = 0.
    double signal_coverage = 0.0;
    /// Mean over noise components; NaN when s = p.
    double noise_coverage = 0.0;
    CoverageReport report;
};

/// θ⁰_j = 1 for j < s and 0 otherwise, for each s and target.
std::vector<SweepRow> sparsity_sweep(const Scenario& base, const std::vector<std::size_t>& s_values,
                                     const std::vector<double>& targets, unsigned threads);

/// "s,target,n,signal_coverage,noise_coverage".
std::string sweep_csv(const std::vector<SweepRow>& rows);

}  // namespace sppost

#pragma once

#include <string>
#include <vector>

namespace sppost {

// Limiting conditional coverage P(|T*_j − ξ_j| ≤ |ξ_j| | Δ_j = ζ) for an
// orthogonal, standardized coordinate with limiting penalty λ₀.

/// Positive true coefficient: 2Φ(|ζ − λ₀/2|) − 1.
double h_plus(double lambda0, double zeta);
/// Negative true coefficient: h_plus(λ₀, −ζ).
double h_minus(double lambda0, double zeta);
/// Zero true coefficient (piecewise in ζ relative to ±λ₀/2).
double h_zero(double lambda0, double zeta);

/// Limiting coverage of a (1−α) interval for a nonzero coefficient:
/// Φ(λ₀/2 + z_{α/2}) − Φ(λ₀/2 − z_{α/2}).
double psi(double alpha, double lambda0);

/// Limiting coverage for a zero coefficient: standard-normal mass of
/// {ζ : h_zero(λ₀, ζ) ≤ 1 − α}. The set is symmetric and, on ζ ≥ 0, an
/// interval whose end points are located by bisection.
double psi_zero(double alpha, double lambda0);

/// Penalty on the standardized scale for coordinate j: λ₀ / (σ₀ √c_j).
double effective_penalty(double lambda0, double c_j, double sigma0);

struct CalibrationQuery {
    double lambda0 = 0.0;
    /// Intended asymptotic coverage 1 − α.
    double target = 0.95;
    /// Limiting Gram diagonal entry.
    double c_j = 1.0;
    double sigma0 = 1.0;

    void validate() const;
};

struct CalibrationResult {
    /// Credibility 1 − γ to request.
    double gamma_level = 0.0;
    double psi_at_gamma = 0.0;
    double psi0_at_gamma = 0.0;
};

/// Solves ψ(γ, λ') = target for γ by bisection on z_{γ/2}.
CalibrationResult solve_gamma(const CalibrationQuery& query);

/// Penalties λ₀ used by the default calibration table (37 rows).
const std::vector<double>& default_table_lambdas();
/// Target coverages used by the default calibration table.
const std::vector<double>& default_table_targets();

/// gamma_level for every (λ, target) pair; rows follow `lambdas`.
std::vector<std::vector<double>> calibration_table(const std::vector<double>& lambdas,
                                                   const std::vector<double>& targets);

/// CSV with header "lambda,<targets...>" and one row per λ, 4 decimals.
std::string calibration_table_csv(const std::vector<double>& lambdas,
                                  const std::vector<double>& targets,
                                  const std::vector<std::vector<double>>& table);

}  // namespace sppost

#pragma once

#include "sppost/types.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace sppost {

class Rng;

/// Ingredients of the joint weak limit (T*, ξ): limiting Gram C, error s.d.,
/// limiting penalty and the sign pattern of the true coefficients.
class LimitSpec {
public:
    /// Throws InvalidArgument if C is not symmetric positive definite, the
    /// sizes disagree, a sign is outside {−1, 0, 1}, or a scale is invalid.
    LimitSpec(Eigen::MatrixXd C, double sigma0, double lambda0, std::vector<int> theta0_signs);

    Eigen::Index p() const noexcept { return C_.rows(); }
    const Eigen::MatrixXd& C() const noexcept { return C_; }
    double sigma0() const noexcept { return sigma0_; }
    double lambda0() const noexcept { return lambda0_; }
    const std::vector<int>& signs() const noexcept { return signs_; }
    /// Number of nonzero signs.
    std::size_t s0() const noexcept { return s0_; }
    const Eigen::MatrixXd& C_sqrt() const noexcept { return C_sqrt_; }
    const Eigen::MatrixXd& C_inv_sqrt() const noexcept { return C_inv_sqrt_; }

private:
    Eigen::MatrixXd C_;
    double sigma0_;
    double lambda0_;
    std::vector<int> signs_;
    std::size_t s0_ = 0;
    Eigen::MatrixXd C_sqrt_;
    Eigen::MatrixXd C_inv_sqrt_;
};

/// ξ = argmin vᵀCv − 2σ₀vᵀC^{1/2}Δ + λ₀[Σ_signal v_j s_j + Σ_noise |v_j|].
Eigen::VectorXd sample_xi(const LimitSpec& spec, const Eigen::VectorXd& delta);

/// One T* given Δ: W* ~ N(σ₀C^{−1/2}Δ, σ₀²C⁻¹), then
/// T* = argmin tᵀCt − 2tᵀCW* + (same signed/unsigned λ₀ penalty).
Eigen::VectorXd sample_t_star(const LimitSpec& spec, const Eigen::VectorXd& delta,
                              std::uint64_t seed);
Eigen::VectorXd sample_t_star(const LimitSpec& spec, const Eigen::VectorXd& delta, Rng& rng);

struct CoverageEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
};

/// Monte-Carlo estimate of P(q(Δ) ≤ level) (outer, inner ≥ 100) with
/// q(Δ) = P(‖T* − ξ‖_K ≤ ‖ξ‖_K | Δ) estimated from `inner` draws of W*.
/// Outer draw k uses stream (seed, k); counts are summed, so the estimate is
/// identical for any `threads`.
CoverageEstimate limiting_coverage_mc(const LimitSpec& spec, const NormSelector& selector,
                                      double level, std::size_t outer, std::size_t inner,
                                      std::uint64_t seed, unsigned threads = 1);

/// Fraction of `inner` draws of T* (given Δ) whose noise coordinates are all
/// exactly zero. Throws InvalidArgument if there is no noise coordinate.
double zero_mass_probability(const LimitSpec& spec, const Eigen::VectorXd& delta,
                             std::size_t inner, std::uint64_t seed);

/// One row of the limit-check comparison output.
struct LimitCheckRow {
    double lambda0 = 0.0;
    double target = 0.0;
    double level = 0.0;
    Eigen::Index component = 0;
    int sign = 0;
    CoverageEstimate mc;
    double psi = 0.0;
    double psi_zero = 0.0;
};

/// Orthogonal (C = I) check: for every λ₀ and target, calibrates the level
/// with solve_gamma and estimates each component's limiting coverage.
std::vector<LimitCheckRow> limit_check(const std::vector<double>& lambdas,
                                       const std::vector<double>& targets,
                                       const std::vector<int>& signs, std::size_t outer,
                                       std::size_t inner, std::uint64_t seed, unsigned threads);

/// Header "lambda0,target,level,component,sign,coverage,std_error,psi,psi_zero".
std::string limit_check_csv(const std::vector<LimitCheckRow>& rows);

}  // namespace sppost

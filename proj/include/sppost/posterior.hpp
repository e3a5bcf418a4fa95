#pragma once

#include "sppost/types.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace sppost {

/// Sufficient description of the conjugate posterior
///   θ | (Y, σ) ~ N(ridge_mean, σ² (XᵀX + a_n I)⁻¹),
///   σ⁻² | Y   ~ Ga(gamma_shape, gamma_rate).
struct PosteriorFactorization {
    Eigen::VectorXd ridge_mean;
    /// Lower-triangular L with L Lᵀ = XᵀX + a_n I.
    Eigen::MatrixXd precision_chol;
    double gamma_shape = 0.0;
    double gamma_rate = 0.0;
};

/// Throws SingularSystem if XᵀX + a_n I is not positive definite.
PosteriorFactorization factorize(const Dataset& data, const PriorConfig& prior);

/// Draws `count` samples (τ = σ⁻² from the gamma marginal, then
/// θ = ridge_mean + σ L⁻ᵀ z). Draw i uses its own RNG stream keyed by
/// (seed, i), so the sequence is identical for every thread count.
std::vector<PosteriorDraw> sample_posterior(const PosteriorFactorization& fact,
                                            std::size_t count, std::uint64_t seed,
                                            unsigned threads = 1);

/// Ridge-residual variance n⁻¹‖Y − X θ̂ᴿ‖², evaluated from the Gram sums.
double ridge_residual_variance(const Dataset& data, const Eigen::VectorXd& ridge_mean);

}  // namespace sppost

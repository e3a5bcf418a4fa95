#pragma once

#include "sppost/io.hpp"
#include "sppost/types.hpp"

namespace sppost {

/// factorize → sample → project → intervals → model probabilities.
/// With cfg.target_coverage set, each coordinate's credibility is calibrated
/// with λ₀ = λ_n√n, c_j = C_n[j, j] and σ̂ from the ridge residuals.
FitResult fit_model(const Dataset& data, const PriorConfig& prior, const FitConfig& cfg,
                    unsigned threads = 1);

}  // namespace sppost

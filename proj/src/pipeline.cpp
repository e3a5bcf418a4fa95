#include "sppost/pipeline.hpp"

#include "sppost/calibration.hpp"
#include "sppost/posterior.hpp"
#include "sppost/projection.hpp"
#include "sppost/regions.hpp"
#include "sppost/rng.hpp"

#include <cmath>

namespace sppost {

FitResult fit_model(const Dataset& data, const PriorConfig& prior, const FitConfig& cfg,
                    unsigned threads) {
    prior.validate();
    cfg.validate();
    const Eigen::Index p = data.p();
    const double sqrt_n = std::sqrt(static_cast<double>(data.n()));

    FitResult r;
    r.n = static_cast<std::size_t>(data.n());
    r.seed = cfg.seed;
    r.draws = cfg.draws;
    r.target = cfg.target_coverage;
    if (cfg.lambda_n) {
        r.lambda_n = *cfg.lambda_n;
    } else {
        r.lambda_from_cv = true;
        r.lambda_n = cross_validate_lambda(data, default_lambda_grid(data, cfg.cv_grid_size),
                                           cfg.cv_folds, derive_seed(cfg.seed, 1));
    }
    r.lambda0 = r.lambda_n * sqrt_n;

    const auto fact = factorize(data, prior);
    r.sigma_hat = std::sqrt(ridge_residual_variance(data, fact.ridge_mean));
    r.level = cfg.target_coverage ? solve_gamma({r.lambda0, *cfg.target_coverage}).gamma_level
                                  : cfg.level;

    ProjectedSample sample;
    sample.n = data.n();
    sample.level = r.level;
    sample.center = fit_lasso(data, r.lambda_n);
    const auto draws = sample_posterior(fact, cfg.draws, derive_seed(cfg.seed, 2), threads);
    sample.draws = project_draws(data, draws, r.lambda_n, {}, threads);

    for (const auto& d : sample.draws) r.max_kkt = std::max(r.max_kkt, d.kkt_residual);
    r.inclusion.assign(static_cast<std::size_t>(p), 0.0);
    for (const auto& d : sample.draws) {
        for (Eigen::Index j : d.support) r.inclusion[static_cast<std::size_t>(j)] += 1.0;
    }
    for (Eigen::Index j = 0; j < p; ++j) {
        const double level =
            cfg.target_coverage
                ? solve_gamma({r.lambda0, *cfg.target_coverage, data.gram()(j, j), r.sigma_hat})
                      .gamma_level
                : cfg.level;
        const auto [lo, hi] = component_interval(sample, j, level);
        r.lasso.push_back(sample.center[j]);
        r.ridge_mean.push_back(fact.ridge_mean[j]);
        r.component_level.push_back(level);
        r.lower.push_back(lo);
        r.upper.push_back(hi);
        r.radius.push_back(radius_quantile(sample, NormSelector::component(j), level));
        r.inclusion[static_cast<std::size_t>(j)] /= static_cast<double>(sample.draws.size());
    }
    r.model_probabilities = model_probabilities(sample);
    for (Eigen::Index j = 0; j < p; ++j) r.names.push_back("x" + std::to_string(j + 1));
    return r;
}

}  // namespace sppost

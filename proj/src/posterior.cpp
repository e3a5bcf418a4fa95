#include "sppost/posterior.hpp"

#include "sppost/errors.hpp"
#include "sppost/parallel.hpp"
#include "sppost/rng.hpp"

#include <cmath>
#include <random>

namespace sppost {

PosteriorFactorization factorize(const Dataset& data, const PriorConfig& prior) {
    prior.validate();
    const double n = static_cast<double>(data.n());

    Eigen::MatrixXd precision = n * data.gram();
    precision.diagonal().array() += prior.a_n;
    Eigen::LLT<Eigen::MatrixXd> llt(precision);
    if (llt.info() != Eigen::Success) {
        throw Error(ErrorKind::SingularSystem, "XᵀX + a_n I is not positive definite");
    }
    Eigen::MatrixXd L = llt.matrixL();
    const auto diag = L.diagonal();
    if (!(diag.minCoeff() > 1e-7 * diag.maxCoeff())) {
        throw Error(ErrorKind::SingularSystem, "XᵀX + a_n I is numerically singular");
    }

    PosteriorFactorization fact;
    const Eigen::VectorXd xty = n * data.xty();
    fact.ridge_mean = llt.solve(xty);
    fact.precision_chol = std::move(L);
    fact.gamma_shape = prior.b1 + 0.5 * n;
    // Yᵀ(I − X(XᵀX + a_n I)⁻¹Xᵀ)Y = YᵀY − YᵀX·ridge_mean.
    const double quad = data.yty() - xty.dot(fact.ridge_mean);
    fact.gamma_rate = prior.b2 + 0.5 * std::max(quad, 0.0);
    return fact;
}

std::vector<PosteriorDraw> sample_posterior(const PosteriorFactorization& fact,
                                            std::size_t count, std::uint64_t seed,
                                            unsigned threads) {
    if (count < 1) throw Error(ErrorKind::InvalidArgument, "count must be >= 1");
    if (!(fact.gamma_rate > 0.0)) {
        throw Error(ErrorKind::SingularSystem,
                    "gamma rate is zero (Y lies in the column space of X and b2 = 0)");
    }
    const Eigen::Index p = fact.ridge_mean.size();
    const auto upper = fact.precision_chol.transpose().triangularView<Eigen::Upper>();
    std::vector<PosteriorDraw> draws(count);
    parallel_for(count, threads, [&](std::size_t i) {
        Rng rng(seed, i);
        std::gamma_distribution<double> precision(fact.gamma_shape, 1.0 / fact.gamma_rate);
        std::normal_distribution<double> normal;
        const double tau = precision(rng);
        Eigen::VectorXd z(p);
        for (Eigen::Index j = 0; j < p; ++j) z[j] = normal(rng);
        auto& d = draws[i];
        d.sigma = 1.0 / std::sqrt(tau);
        d.theta = fact.ridge_mean + d.sigma * upper.solve(z);
    });
    return draws;
}

double ridge_residual_variance(const Dataset& data, const Eigen::VectorXd& ridge_mean) {
    return (data.Y() - data.X() * ridge_mean).squaredNorm() / static_cast<double>(data.n());
}

}  // namespace sppost

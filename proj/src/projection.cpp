#include "sppost/projection.hpp"

#include "sppost/errors.hpp"
#include "sppost/parallel.hpp"
#include "sppost/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace sppost {

namespace {

constexpr std::size_t kProjectionBlock = 64;

int sign_at(const std::vector<int>& signs, Eigen::Index j) {
    return signs.empty() ? 0 : signs[static_cast<std::size_t>(j)];
}

double kkt_from_gradient(const Eigen::VectorXd& Qu, const Eigen::VectorXd& b,
                         const Eigen::VectorXd& u, double lambda, const std::vector<int>& signs) {
    double worst = 0.0;
    for (Eigen::Index j = 0; j < u.size(); ++j) {
        const double g = 2.0 * (Qu[j] - b[j]);
        const int s = sign_at(signs, j);
        double violation;
        if (s != 0) {
            violation = std::abs(g + lambda * s);
        } else if (u[j] != 0.0) {
            violation = std::abs(g + lambda * (u[j] > 0.0 ? 1.0 : -1.0));
        } else {
            violation = std::max(0.0, std::abs(g) - lambda);
        }
        worst = std::max(worst, violation);
    }
    return worst;
}

void check_shapes(const Eigen::MatrixXd& Q, const Eigen::VectorXd& b, double lambda,
                  const std::vector<int>& signs) {
    if (Q.rows() != Q.cols() || Q.rows() != b.size()) {
        throw Error(ErrorKind::DimensionMismatch, "Q must be p x p and b length p");
    }
    if (!signs.empty() && static_cast<Eigen::Index>(signs.size()) != b.size()) {
        throw Error(ErrorKind::DimensionMismatch, "signs must be empty or length p");
    }
    for (int s : signs) {
        if (s < -1 || s > 1) throw Error(ErrorKind::InvalidArgument, "signs must be -1, 0 or 1");
    }
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw Error(ErrorKind::InvalidArgument, "penalty scale must be positive");
    }
    if (!Q.allFinite() || !b.allFinite()) {
        throw Error(ErrorKind::NonFiniteInput, "Q and b must be finite");
    }
    for (Eigen::Index j = 0; j < Q.rows(); ++j) {
        if (!(Q(j, j) > 0.0)) {
            throw Error(ErrorKind::DegenerateDiagonal,
                        "Q(" + std::to_string(j) + "," + std::to_string(j) + ") <= 0");
        }
    }
}

// Cyclic coordinate descent on uᵀQu − 2uᵀb + λ pen(u), keeping Qu current.
SolveResult coordinate_descent(const Eigen::MatrixXd& Q, const Eigen::VectorXd& b, double lambda,
                               const std::vector<int>& signs, const SolverSettings& settings) {
    check_shapes(Q, b, lambda, signs);
    if (!(settings.tol > 0.0) || settings.max_sweeps < 1) {
        throw Error(ErrorKind::InvalidArgument, "solver needs tol > 0 and max_sweeps >= 1");
    }
    const Eigen::Index p = b.size();
    const double half = 0.5 * lambda;

    SolveResult out;
    if (settings.warm_start) {
        if (settings.warm_start->size() != p) {
            throw Error(ErrorKind::DimensionMismatch, "warm start has wrong length");
        }
        out.solution = *settings.warm_start;
    } else {
        out.solution = Eigen::VectorXd::Zero(p);
    }
    Eigen::VectorXd& u = out.solution;
    Eigen::VectorXd Qu = Q * u;

    out.kkt_residual = kkt_from_gradient(Qu, b, u, lambda, signs);
    while (out.kkt_residual > settings.tol) {
        if (out.sweeps == settings.max_sweeps) {
            throw Error(ErrorKind::NoConvergence,
                        "KKT residual " + std::to_string(out.kkt_residual) + " after " +
                            std::to_string(out.sweeps) + " sweeps");
        }
        for (Eigen::Index j = 0; j < p; ++j) {
            const double qjj = Q(j, j);
            const double c = b[j] - Qu[j] + qjj * u[j];
            const int s = sign_at(signs, j);
            double next;
            if (s != 0) {
                next = (c - half * s) / qjj;
            } else if (c > half) {
                next = (c - half) / qjj;
            } else if (c < -half) {
                next = (c + half) / qjj;
            } else {
                next = 0.0;
            }
            const double delta = next - u[j];
            if (delta != 0.0) {
                Qu.noalias() += delta * Q.col(j);
                u[j] = next;
            }
        }
        ++out.sweeps;
        out.kkt_residual = kkt_from_gradient(Qu, b, u, lambda, signs);
        if (out.kkt_residual <= settings.tol) {
            // Incremental updates drift; certify against a fresh product.
            Qu.noalias() = Q * u;
            out.kkt_residual = kkt_from_gradient(Qu, b, u, lambda, signs);
        }
    }
    return out;
}

}  // namespace

void QuadL1Problem::validate() const {
    check_shapes(Q, b, penalty_scale, signs);
    const double scale = std::max(1.0, Q.cwiseAbs().maxCoeff());
    if ((Q - Q.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
        throw Error(ErrorKind::InvalidArgument, "Q must be symmetric");
    }
}

double quad_l1_objective(const QuadL1Problem& problem, const Eigen::VectorXd& u) {
    double penalty = 0.0;
    for (Eigen::Index j = 0; j < u.size(); ++j) {
        const int s = problem.sign(j);
        penalty += s != 0 ? s * u[j] : std::abs(u[j]);
    }
    return u.dot(problem.Q * u) - 2.0 * u.dot(problem.b) + problem.penalty_scale * penalty;
}

double kkt_check(const QuadL1Problem& problem, const Eigen::VectorXd& u) {
    if (u.size() != problem.b.size()) {
        throw Error(ErrorKind::DimensionMismatch, "u has wrong length");
    }
    const Eigen::VectorXd Qu = problem.Q * u;
    return kkt_from_gradient(Qu, problem.b, u, problem.penalty_scale, problem.signs);
}

SolveResult solve_quad_l1(const QuadL1Problem& problem, const SolverSettings& settings) {
    problem.validate();
    return coordinate_descent(problem.Q, problem.b, problem.penalty_scale, problem.signs,
                              settings);
}

std::vector<Eigen::Index> support_of(const Eigen::VectorXd& u) {
    std::vector<Eigen::Index> support;
    for (Eigen::Index j = 0; j < u.size(); ++j) {
        if (u[j] != 0.0) support.push_back(j);
    }
    return support;
}

SparseDraw project(const Dataset& data, const Eigen::VectorXd& theta, double lambda_n,
                   const SolverSettings& settings) {
    if (theta.size() != data.p()) {
        throw Error(ErrorKind::DimensionMismatch, "theta has wrong length");
    }
    const Eigen::VectorXd b = data.gram() * theta;
    auto solved = coordinate_descent(data.gram(), b, lambda_n, {}, settings);
    SparseDraw draw;
    draw.support = support_of(solved.solution);
    draw.theta_star = std::move(solved.solution);
    draw.kkt_residual = solved.kkt_residual;
    return draw;
}

std::vector<SparseDraw> project_draws(const Dataset& data,
                                      const std::vector<PosteriorDraw>& draws,
                                      double lambda_n, const SolverSettings& settings,
                                      unsigned threads) {
    std::vector<SparseDraw> out(draws.size());
    const std::size_t blocks = (draws.size() + kProjectionBlock - 1) / kProjectionBlock;
    parallel_for(blocks, threads, [&](std::size_t blk) {
        SolverSettings local = settings;
        const std::size_t begin = blk * kProjectionBlock;
        const std::size_t end = std::min(draws.size(), begin + kProjectionBlock);
        for (std::size_t i = begin; i < end; ++i) {
            out[i] = project(data, draws[i].theta, lambda_n, local);
            local.warm_start = out[i].theta_star;
        }
    });
    return out;
}

Eigen::VectorXd fit_lasso(const Dataset& data, double lambda_n, const SolverSettings& settings) {
    return coordinate_descent(data.gram(), data.xty(), lambda_n, {}, settings).solution;
}

Eigen::VectorXd least_squares(const Dataset& data) {
    Eigen::LLT<Eigen::MatrixXd> llt(data.gram());
    if (llt.info() != Eigen::Success) {
        throw Error(ErrorKind::SingularSystem, "Gram matrix is not positive definite");
    }
    return llt.solve(data.xty());
}

double lambda_max(const Dataset& data) { return 2.0 * data.xty().cwiseAbs().maxCoeff(); }

std::vector<double> default_lambda_grid(const Dataset& data, std::size_t size, double ratio) {
    if (size < 1) throw Error(ErrorKind::InvalidArgument, "grid size must be >= 1");
    if (!(ratio > 0.0 && ratio < 1.0)) {
        throw Error(ErrorKind::InvalidArgument, "grid ratio must lie in (0, 1)");
    }
    const double top = std::max(lambda_max(data), 1e-12);
    std::vector<double> grid(size);
    for (std::size_t k = 0; k < size; ++k) {
        const double t = size == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(size - 1);
        grid[k] = top * std::pow(ratio, t);
    }
    return grid;
}

double cross_validate_lambda(const Dataset& data, const std::vector<double>& grid,
                             std::size_t folds, std::uint64_t seed) {
    if (grid.empty()) throw Error(ErrorKind::InvalidArgument, "lambda grid is empty");
    for (double g : grid) {
        if (!(g > 0.0) || !std::isfinite(g)) {
            throw Error(ErrorKind::InvalidArgument, "grid values must be positive");
        }
    }
    if (folds < 2) throw Error(ErrorKind::InvalidArgument, "folds must be >= 2");
    const Eigen::Index n = data.n();
    if (static_cast<std::size_t>(n) < folds) {
        throw Error(ErrorKind::InsufficientData,
                    "n = " + std::to_string(n) + " is smaller than folds = " +
                        std::to_string(folds));
    }
    if (grid.size() == 1) return grid.front();

    std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), Eigen::Index{0});
    Rng rng(seed);
    std::shuffle(perm.begin(), perm.end(), rng);

    // Path order: largest λ first so each fit warm-starts the next.
    std::vector<std::size_t> order(grid.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return grid[a] > grid[b]; });

    const Eigen::MatrixXd full_xtx = data.gram() * static_cast<double>(n);
    const Eigen::VectorXd full_xty = data.xty() * static_cast<double>(n);
    std::vector<double> sse(grid.size(), 0.0);
    for (std::size_t k = 0; k < folds; ++k) {
        std::vector<Eigen::Index> test;
        for (std::size_t i = k; i < perm.size(); i += folds) test.push_back(perm[i]);
        const Eigen::MatrixXd X_test = data.X()(test, Eigen::all);
        const Eigen::VectorXd Y_test = data.Y()(test);
        const double n_train = static_cast<double>(n) - static_cast<double>(test.size());
        const Eigen::MatrixXd Q = (full_xtx - X_test.transpose() * X_test) / n_train;
        const Eigen::VectorXd b = (full_xty - X_test.transpose() * Y_test) / n_train;

        SolverSettings settings;
        for (std::size_t idx : order) {
            auto fit = coordinate_descent(Q, b, grid[idx], {}, settings);
            sse[idx] += (Y_test - X_test * fit.solution).squaredNorm();
            settings.warm_start = std::move(fit.solution);
        }
    }

    std::size_t best = order.front();
    for (std::size_t idx : order) {
        if (sse[idx] < sse[best]) best = idx;
    }
    return grid[best];
}

}  // namespace sppost

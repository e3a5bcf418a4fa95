#pragma once

#include "sppost/types.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace sppost {

/// Minimize  uᵀQu − 2uᵀb + λ Σ_j pen_j(u_j)  where pen_j(u) = |u| for
/// ordinary coordinates and s_j·u for signed coordinates (s_j ∈ {−1, +1}).
///
/// Penalty convention: this is the n⁻¹‖·‖² + λ‖·‖₁ form, so with Q = I the
/// solution is soft(b, λ/2), not soft(b, λ) as in the (2n)⁻¹ convention used
/// by many LASSO packages.
struct QuadL1Problem {
    Eigen::MatrixXd Q;
    Eigen::VectorXd b;
    double penalty_scale = 1.0;
    /// Per-coordinate sign: 0 = ordinary |u_j|, ±1 = linear s_j·u_j.
    /// Empty means all coordinates are ordinary.
    std::vector<int> signs;

    int sign(Eigen::Index j) const noexcept {
        return signs.empty() ? 0 : signs[static_cast<std::size_t>(j)];
    }
    void validate() const;
};

struct SolverSettings {
    double tol = 1e-10;
    std::size_t max_sweeps = 10000;
    std::optional<Eigen::VectorXd> warm_start;
};

struct SolveResult {
    Eigen::VectorXd solution;
    double kkt_residual = 0.0;
    std::size_t sweeps = 0;
};

/// Objective value of `u` for `problem`.
double quad_l1_objective(const QuadL1Problem& problem, const Eigen::VectorXd& u);

/// Maximal violation of the optimality conditions for g = 2Qu − 2b:
/// g_j = −λ sign(u_j) on the support (−λ s_j for signed coordinates) and
/// |g_j| ≤ λ where u_j = 0.
double kkt_check(const QuadL1Problem& problem, const Eigen::VectorXd& u);

/// Cyclic coordinate descent until kkt_check ≤ tol.
/// Throws DegenerateDiagonal if some Q_jj ≤ 0 and NoConvergence after
/// max_sweeps.
SolveResult solve_quad_l1(const QuadL1Problem& problem, const SolverSettings& settings = {});

/// Sparse projection ι(θ) = argmin_u n⁻¹‖Xθ − Xu‖² + λ_n‖u‖₁, i.e. Q = C_n,
/// b = C_n θ.
SparseDraw project(const Dataset& data, const Eigen::VectorXd& theta, double lambda_n,
                   const SolverSettings& settings = {});

/// Projects every draw. Draws are processed in fixed blocks, each block
/// warm-starting draw k from draw k−1, so results do not depend on `threads`.
std::vector<SparseDraw> project_draws(const Dataset& data,
                                      const std::vector<PosteriorDraw>& draws,
                                      double lambda_n, const SolverSettings& settings = {},
                                      unsigned threads = 1);

/// LASSO estimate argmin_u n⁻¹‖Y − Xu‖² + λ_n‖u‖₁.
Eigen::VectorXd fit_lasso(const Dataset& data, double lambda_n,
                          const SolverSettings& settings = {});

/// Ordinary least-squares solution of C_n u = XᵀY/n.
Eigen::VectorXd least_squares(const Dataset& data);

/// Smallest λ that zeroes the LASSO: 2 max_j |XᵀY/n|_j.
double lambda_max(const Dataset& data);

/// `size` log-spaced values from lambda_max down to ratio·lambda_max,
/// descending.
std::vector<double> default_lambda_grid(const Dataset& data, std::size_t size = 100,
                                        double ratio = 1e-3);

/// K-fold cross-validation of the LASSO squared prediction error. Returns the
/// grid value with the smallest mean error; ties go to the larger λ.
/// Throws InsufficientData if n < folds.
double cross_validate_lambda(const Dataset& data, const std::vector<double>& grid,
                             std::size_t folds, std::uint64_t seed);

/// Indices of the nonzero entries of u, ascending.
std::vector<Eigen::Index> support_of(const Eigen::VectorXd& u);

}  // namespace sppost

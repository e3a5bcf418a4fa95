#include "oracles.hpp"

#include "sppost/errors.hpp"
#include "sppost/posterior.hpp"
#include "sppost/projection.hpp"
#include "sppost/rng.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

using namespace sppost;
using Catch::Approx;

namespace {

Eigen::MatrixXd random_spd(Eigen::Index p, Rng& rng) {
    std::normal_distribution<double> z;
    Eigen::MatrixXd A(p, p);
    for (Eigen::Index i = 0; i < p; ++i)
        for (Eigen::Index j = 0; j < p; ++j) A(i, j) = z(rng);
    return A.transpose() * A / static_cast<double>(p) + 0.1 * Eigen::MatrixXd::Identity(p, p);
}

Dataset synthetic(Eigen::Index n, Eigen::Index p, std::uint64_t seed, double noise = 1.0,
                  bool zero_signal = false) {
    Rng rng(seed);
    std::normal_distribution<double> z;
    Eigen::MatrixXd X(n, p);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < p; ++j) X(i, j) = z(rng);
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(p);
    if (!zero_signal) {
        theta[0] = 1.5;
        if (p > 2) theta[2] = -0.7;
    }
    Eigen::VectorXd Y = X * theta;
    for (Eigen::Index i = 0; i < n; ++i) Y[i] += noise * z(rng);
    return Dataset(X, Y);
}

double soft(double x, double t) { return std::copysign(std::max(std::abs(x) - t, 0.0), x); }

}  // namespace

TEST_CASE("identity gram projects by soft thresholding at lambda/2") {
    const Dataset d(Eigen::MatrixXd::Identity(2, 2) * std::sqrt(2.0), Eigen::VectorXd::Zero(2));
    REQUIRE((d.gram() - Eigen::MatrixXd::Identity(2, 2)).norm() < 1e-15);
    Eigen::VectorXd theta(2);
    theta << 1.0, -0.1;
    const auto s = project(d, theta, 0.4);
    CHECK(s.theta_star[0] == Approx(0.8).margin(1e-12));
    CHECK(s.theta_star[1] == 0.0);
    CHECK(s.support == std::vector<Eigen::Index>{0});
    CHECK(s.kkt_residual <= 1e-10);

    const auto z = project(d, Eigen::VectorXd::Zero(2), 0.4);
    CHECK(z.theta_star.isZero(0.0));
    CHECK(z.support.empty());
}

TEST_CASE("correlated two-dimensional projection matches a grid search") {
    // C_n = [[1, .5], [.5, 1]] from a 2-row design.
    Eigen::MatrixXd L(2, 2);
    L << 1.0, 0.0, 0.5, std::sqrt(0.75);
    const Dataset d(std::sqrt(2.0) * L.transpose(), Eigen::VectorXd::Zero(2));
    Eigen::MatrixXd C(2, 2);
    C << 1.0, 0.5, 0.5, 1.0;
    REQUIRE((d.gram() - C).norm() < 1e-14);
    Eigen::VectorXd theta(2);
    theta << 1.0, 0.2;
    const double lambda = 0.6;
    const auto s = project(d, theta, lambda);

    oracle::L1Quad pr{C, C * theta, lambda, {}};
    auto grid_best = [&](double cx, double cy, double half, double step) {
        double best = 1e300, bx = 0, by = 0;
        const int m = static_cast<int>(std::round(2 * half / step));
        for (int i = 0; i <= m; ++i) {
            for (int k = 0; k <= m; ++k) {
                Eigen::VectorXd u(2);
                u << cx - half + i * step, cy - half + k * step;
                const double o = pr.objective(u);
                if (o < best) {
                    best = o;
                    bx = u[0];
                    by = u[1];
                }
            }
        }
        return std::array<double, 3>{best, bx, by};
    };
    const auto coarse = grid_best(0.0, 0.0, 2.0, 1e-3);
    const auto fine = grid_best(coarse[1], coarse[2], 2e-3, 1e-6);
    QuadL1Problem qp{C, C * theta, lambda, {}};
    CHECK(std::abs(quad_l1_objective(qp, s.theta_star) - fine[0]) < 1e-6);
    CHECK(quad_l1_objective(qp, s.theta_star) <= fine[0] + 1e-12);
}

TEST_CASE("scalar unsigned and signed closed forms") {
    QuadL1Problem unsigned_pr{Eigen::MatrixXd::Identity(1, 1), Eigen::VectorXd::Constant(1, 0.05),
                              0.2, {}};
    CHECK(solve_quad_l1(unsigned_pr).solution[0] == 0.0);
    QuadL1Problem signed_pr = unsigned_pr;
    signed_pr.signs = {1};
    CHECK(solve_quad_l1(signed_pr).solution[0] == Approx(-0.05).margin(1e-14));
    signed_pr.signs = {-1};
    CHECK(solve_quad_l1(signed_pr).solution[0] == Approx(0.15).margin(1e-14));
}

TEST_CASE("kkt residual examples") {
    const Eigen::MatrixXd Q = Eigen::MatrixXd::Identity(2, 2);
    Eigen::VectorXd b(2);
    b << 1.0, -0.1;
    QuadL1Problem pr{Q, b, 0.4, {}};
    Eigen::VectorXd u(2);
    u << 0.8, 0.0;
    CHECK(kkt_check(pr, u) <= 1e-14);
    u[0] += 0.01;
    CHECK(kkt_check(pr, u) == Approx(0.02).epsilon(1e-10));
    QuadL1Problem zero{Q, Eigen::VectorXd::Zero(2), 0.4, {}};
    CHECK(kkt_check(zero, Eigen::VectorXd::Zero(2)) == 0.0);
    CHECK_THROWS_AS(kkt_check(pr, Eigen::VectorXd::Zero(3)), Error);
}

TEST_CASE("coordinate descent matches the enumeration oracle on random problems") {
    Rng rng(2024);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::normal_distribution<double> z;
    for (int trial = 0; trial < 200; ++trial) {
        const Eigen::Index p = 1 + static_cast<Eigen::Index>(unif(rng) * 6);
        QuadL1Problem pr;
        pr.Q = random_spd(p, rng);
        pr.b = Eigen::VectorXd(p);
        for (Eigen::Index j = 0; j < p; ++j) pr.b[j] = z(rng);
        pr.penalty_scale = 0.05 + 1.95 * unif(rng);
        if (trial % 2) {
            for (Eigen::Index j = 0; j < p; ++j) pr.signs.push_back(static_cast<int>(unif(rng) * 3) - 1);
        }
        const auto res = solve_quad_l1(pr);
        CHECK(res.kkt_residual <= 1e-10);
        CHECK(kkt_check(pr, res.solution) <= 1e-10);
        oracle::L1Quad o{pr.Q, pr.b, pr.penalty_scale, pr.signs};
        const auto ref = oracle::enumerate_minimizer(o);
        CHECK(quad_l1_objective(pr, res.solution) <= o.objective(ref) + 1e-8);
        CHECK((res.solution - ref).cwiseAbs().maxCoeff() < 1e-6);
        CHECK(quad_l1_objective(pr, res.solution) <= quad_l1_objective(pr, Eigen::VectorXd::Zero(p)));
    }
}

TEST_CASE("warm start never worsens the objective") {
    Rng rng(7);
    QuadL1Problem pr;
    pr.Q = random_spd(5, rng);
    pr.b = Eigen::VectorXd::LinSpaced(5, -1.0, 1.0);
    pr.penalty_scale = 0.3;
    SolverSettings s;
    s.warm_start = Eigen::VectorXd::Constant(5, 3.0);
    const auto r = solve_quad_l1(pr, s);
    CHECK(quad_l1_objective(pr, r.solution) <= quad_l1_objective(pr, *s.warm_start));
    CHECK((r.solution - solve_quad_l1(pr).solution).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("diagonal Q: soft threshold exactly, l1 norm shrinks with lambda") {
    Eigen::VectorXd diag(4);
    diag << 1.0, 2.0, 0.5, 3.0;
    Eigen::VectorXd b(4);
    b << 0.9, -0.3, 0.05, 2.0;
    double prev = 1e300;
    for (double lambda : {0.01, 0.1, 0.3, 0.7, 1.5, 5.0}) {
        QuadL1Problem pr{diag.asDiagonal().toDenseMatrix(), b, lambda, {}};
        const auto u = solve_quad_l1(pr).solution;
        for (int j = 0; j < 4; ++j) CHECK(u[j] == Approx(soft(b[j], lambda / 2) / diag[j]).margin(1e-15));
        CHECK(u.lpNorm<1>() <= prev);
        prev = u.lpNorm<1>();
    }
}

TEST_CASE("solver errors") {
    QuadL1Problem bad{Eigen::MatrixXd::Zero(2, 2), Eigen::VectorXd::Ones(2), 0.1, {}};
    try {
        solve_quad_l1(bad);
        FAIL("expected DegenerateDiagonal");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::DegenerateDiagonal);
    }
    Eigen::MatrixXd Q(2, 2);
    Q << 1.0, 0.999, 0.999, 1.0;
    QuadL1Problem slow{Q, Eigen::VectorXd::Ones(2), 0.01, {}};
    SolverSettings s;
    s.max_sweeps = 1;
    try {
        solve_quad_l1(slow, s);
        FAIL("expected NoConvergence");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NoConvergence);
    }
    Eigen::MatrixXd asym(2, 2);
    asym << 1.0, 0.2, 0.1, 1.0;
    CHECK_THROWS_AS(solve_quad_l1({asym, Eigen::VectorXd::Ones(2), 0.1, {}}), Error);
    CHECK_THROWS_AS(solve_quad_l1({Q, Eigen::VectorXd::Ones(2), 0.1, {2, 0}}), Error);
}

TEST_CASE("orthonormal design lasso and full shrinkage") {
    const Eigen::Index n = 8;
    Eigen::MatrixXd X = Eigen::MatrixXd::Zero(n, 2);
    // Columns with XᵀX = nI.
    for (Eigen::Index i = 0; i < n; ++i) {
        X(i, 0) = 1.0;
        X(i, 1) = (i % 2) ? 1.0 : -1.0;
    }
    Eigen::VectorXd Y = Eigen::VectorXd::LinSpaced(n, -1.0, 2.5);
    const Dataset d(X, Y);
    const double lambda = 0.3;
    const auto u = fit_lasso(d, lambda);
    for (int j = 0; j < 2; ++j) CHECK(u[j] == Approx(soft(d.xty()[j], lambda / 2)).margin(1e-14));
    CHECK(fit_lasso(d, lambda_max(d)).isZero(0.0));
    CHECK(fit_lasso(d, 2.0 * lambda_max(d)).isZero(0.0));
}

TEST_CASE("projecting least squares reproduces the lasso") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto d = synthetic(200, 5, seed);
        const double lambda = 0.05 + 0.02 * static_cast<double>(seed);
        const auto ls = least_squares(d);
        const auto proj = project(d, ls, lambda).theta_star;
        const auto lasso = fit_lasso(d, lambda);
        CHECK((proj - lasso).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("project_draws is thread-count invariant and certifies every draw") {
    const auto d = synthetic(100, 6, 3);
    const auto f = factorize(d, {});
    const auto draws = sample_posterior(f, 300, 5);
    const auto a = project_draws(d, draws, 0.1, {}, 1);
    const auto b = project_draws(d, draws, 0.1, {}, 8);
    REQUIRE(a.size() == draws.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].theta_star == b[i].theta_star);
        CHECK(a[i].kkt_residual <= 1e-10);
        CHECK(a[i].support == support_of(a[i].theta_star));
        const auto cold = project(d, draws[i].theta, 0.1).theta_star;
        CHECK((cold - a[i].theta_star).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("lambda grid is descending and log spaced") {
    const auto d = synthetic(50, 4, 8);
    const auto g = default_lambda_grid(d, 100);
    REQUIRE(g.size() == 100);
    CHECK(g.front() == Approx(lambda_max(d)));
    CHECK(g.back() == Approx(1e-3 * lambda_max(d)));
    for (std::size_t i = 1; i < g.size(); ++i) {
        CHECK(g[i] < g[i - 1]);
        CHECK(std::log(g[i - 1] / g[i]) == Approx(std::log(1000.0) / 99.0));
    }
}

TEST_CASE("cross validation edge cases") {
    const auto d = synthetic(30, 3, 4);
    CHECK(cross_validate_lambda(d, {0.123}, 5, 1) == 0.123);
    try {
        cross_validate_lambda(synthetic(5, 2, 1), {0.1, 0.2}, 10, 1);
        FAIL("expected InsufficientData");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::InsufficientData);
    }
    CHECK_THROWS_AS(cross_validate_lambda(d, {}, 5, 1), Error);
    const auto g = default_lambda_grid(d, 20);
    CHECK(cross_validate_lambda(d, g, 5, 9) == cross_validate_lambda(d, g, 5, 9));

    // Duplicated rows: every fold split sees the same data, so the choice
    // does not depend on the shuffle.
    Eigen::MatrixXd X(40, 2);
    Eigen::VectorXd Y(40);
    for (Eigen::Index i = 0; i < 40; ++i) {
        X(i, 0) = 1.0;
        X(i, 1) = -0.5;
        Y[i] = 0.8;
    }
    const Dataset dup(X, Y);
    const auto gd = default_lambda_grid(dup, 15);
    const double first = cross_validate_lambda(dup, gd, 10, 1);
    for (std::uint64_t s = 2; s < 12; ++s) CHECK(cross_validate_lambda(dup, gd, 10, s) == first);
}

TEST_CASE("pure noise selects the largest grid value most of the time") {
    int hits = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto d = synthetic(100, 5, 1000 + seed, 1.0, true);
        // Strong penalties only: every value exceeds the typical noise
        // lambda_max (about 0.43 at n = 100, p = 5).
        const std::vector<double> grid{1.0, 0.75, 0.5};
        if (cross_validate_lambda(d, grid, 10, seed) == 1.0) ++hits;
    }
    CHECK(hits >= 90);
}

#include "sppost/calibration.hpp"
#include "sppost/errors.hpp"
#include "sppost/limit_lab.hpp"
#include "sppost/normal.hpp"
#include "sppost/rng.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

using namespace sppost;
using Catch::Approx;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> xs) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) v[i++] = x;
    return v;
}

Eigen::MatrixXd correlated3() {
    Eigen::MatrixXd C(3, 3);
    C << 1.0, 0.4, 0.1, 0.4, 2.0, -0.3, 0.1, -0.3, 0.7;
    return C;
}

double soft(double x, double t) { return std::copysign(std::max(std::abs(x) - t, 0.0), x); }

bool within(const CoverageEstimate& e, double target, double k = 3.0) {
    return std::abs(e.estimate - target) <= k * std::max(e.std_error, 1e-3);
}

}  // namespace

TEST_CASE("limit spec validation and matrix roots") {
    CHECK_THROWS_AS(LimitSpec(Eigen::MatrixXd::Identity(2, 2), 1.0, 1.0, {1}), Error);
    CHECK_THROWS_AS(LimitSpec(Eigen::MatrixXd::Identity(2, 2), 1.0, 1.0, {1, 2}), Error);
    CHECK_THROWS_AS(LimitSpec(Eigen::MatrixXd::Identity(2, 2), 0.0, 1.0, {1, 0}), Error);
    CHECK_THROWS_AS(LimitSpec(Eigen::MatrixXd::Identity(2, 2), 1.0, -1.0, {1, 0}), Error);
    Eigen::MatrixXd indefinite(2, 2);
    indefinite << 1.0, 2.0, 2.0, 1.0;
    CHECK_THROWS_AS(LimitSpec(indefinite, 1.0, 1.0, {1, 0}), Error);

    const LimitSpec spec(correlated3(), 1.5, 0.8, {1, -1, 0});
    CHECK(spec.s0() == 2);
    CHECK((spec.C_sqrt() * spec.C_sqrt() - spec.C()).norm() < 1e-12);
    CHECK((spec.C_inv_sqrt() * spec.C_sqrt() - Eigen::MatrixXd::Identity(3, 3)).norm() < 1e-12);
}

TEST_CASE("xi closed forms for an orthogonal design") {
    const LimitSpec spec(Eigen::MatrixXd::Identity(3, 3), 1.0, 1.0, {1, -1, 0});
    const auto xi = sample_xi(spec, vec({0.3, 0.3, 0.4}));
    CHECK(xi[0] == Approx(-0.2).margin(1e-12));
    CHECK(xi[1] == Approx(0.8).margin(1e-12));
    CHECK(xi[2] == 0.0);
    const auto xi2 = sample_xi(spec, vec({0.0, 0.0, -1.25}));
    CHECK(xi2[2] == Approx(-0.75).margin(1e-12));

    const LimitSpec free(correlated3(), 1.7, 0.0, {1, 0, 0});
    const auto d = vec({0.5, -1.0, 2.0});
    CHECK((sample_xi(free, d) - 1.7 * free.C_inv_sqrt() * d).norm() < 1e-10);
}

TEST_CASE("t_star closed forms for an orthogonal design") {
    const double lambda0 = 1.2;
    const LimitSpec spec(Eigen::MatrixXd::Identity(3, 3), 1.0, lambda0, {1, -1, 0});
    const auto delta = vec({0.2, -0.5, 0.1});
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        // Same stream the sampler uses: U ~ N(0, I), W* = Δ + U.
        Rng rng(seed);
        std::normal_distribution<double> z;
        Eigen::VectorXd w(3);
        for (int j = 0; j < 3; ++j) w[j] = delta[j] + z(rng);
        const auto t = sample_t_star(spec, delta, seed);
        CHECK(t[0] == Approx(w[0] - lambda0 / 2).margin(1e-10));
        CHECK(t[1] == Approx(w[1] + lambda0 / 2).margin(1e-10));
        CHECK(t[2] == Approx(soft(w[2], lambda0 / 2)).margin(1e-10));
        if (std::abs(w[2]) <= lambda0 / 2) CHECK(t[2] == 0.0);
    }
    const LimitSpec free(correlated3(), 1.3, 0.0, {0, 0, 0});
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng(seed);
        std::normal_distribution<double> z;
        Eigen::VectorXd u(3);
        for (int j = 0; j < 3; ++j) u[j] = z(rng);
        const Eigen::VectorXd w = 1.3 * free.C_inv_sqrt() * (delta + u);
        CHECK((sample_t_star(free, delta, seed) - w).norm() < 1e-10);
    }
    CHECK_THROWS_AS(sample_t_star(spec, vec({1.0}), 1), Error);
}

TEST_CASE("conditional coverage matches h functions for an orthogonal design") {
    const double lambda0 = 1.0;
    const LimitSpec spec(Eigen::MatrixXd::Identity(3, 3), 1.0, lambda0, {1, -1, 0});
    const int inner = 20000;
    for (const auto& delta : {vec({0.1, -0.8, 0.3}), vec({1.4, 0.6, -1.2})}) {
        const auto xi = sample_xi(spec, delta);
        Rng rng(99);
        std::array<int, 3> hits{0, 0, 0};
        for (int i = 0; i < inner; ++i) {
            const auto t = sample_t_star(spec, delta, rng);
            for (int j = 0; j < 3; ++j) hits[j] += std::abs(t[j] - xi[j]) <= std::abs(xi[j]);
        }
        const std::array<double, 3> ref{h_plus(lambda0, delta[0]), h_minus(lambda0, delta[1]),
                                        h_zero(lambda0, delta[2])};
        for (int j = 0; j < 3; ++j) {
            const double q = hits[j] / double(inner);
            const double se = std::sqrt(ref[j] * (1 - ref[j]) / inner);
            CHECK(std::abs(q - ref[j]) <= 3 * std::max(se, 1e-4));
        }
    }
}

TEST_CASE("limiting coverage for one coordinate") {
    const double level = solve_gamma({1.0, 0.95}).gamma_level;
    const LimitSpec pos(Eigen::MatrixXd::Identity(1, 1), 1.0, 1.0, {1});
    CHECK(within(limiting_coverage_mc(pos, NormSelector::component(0), level, 1000, 1000, 3), 0.95));
    const LimitSpec noise(Eigen::MatrixXd::Identity(1, 1), 1.0, 1.0, {0});
    const auto e = limiting_coverage_mc(noise, NormSelector::component(0), level, 1000, 1000, 4);
    CHECK(e.estimate >= 0.95 - 3 * e.std_error);
    CHECK(within(e, psi_zero(1.0 - level, 1.0)));
}

TEST_CASE("no penalty gives the nominal level for any norm") {
    const LimitSpec spec(correlated3(), 1.0, 0.0, {1, 0, -1});
    for (const auto& sel : {NormSelector::euclidean(), NormSelector::max_norm()}) {
        CHECK(within(limiting_coverage_mc(spec, sel, 0.9, 600, 600, 5), 0.9));
    }
}

TEST_CASE("calibration scales the penalty by sigma0 sqrt(c_j)") {
    // One coordinate with C = 4: the standardized penalty is λ₀/(σ₀√c) = 1,
    // so the level calibrated for c_j = 4 should give 0.95.
    const double lambda0 = 2.0;
    const LimitSpec spec(Eigen::MatrixXd::Constant(1, 1, 4.0), 1.0, lambda0, {1});
    const double level = solve_gamma({lambda0, 0.95, 4.0, 1.0}).gamma_level;
    const auto e = limiting_coverage_mc(spec, NormSelector::component(0), level, 1500, 1000, 6);
    CHECK(within(e, 0.95));
    // The alternative scaling λ₀√c/σ₀ = 4 asks for a much higher level and
    // overshoots.
    const double other = solve_gamma({4.0, 0.95}).gamma_level;
    const auto o = limiting_coverage_mc(spec, NormSelector::component(0), other, 1500, 1000, 6);
    CHECK(o.estimate > 0.95 + 3 * e.std_error);

    const LimitSpec scaled(Eigen::MatrixXd::Identity(1, 1), 2.0, lambda0, {-1});
    const double lvl2 = solve_gamma({lambda0, 0.95, 1.0, 2.0}).gamma_level;
    CHECK(within(limiting_coverage_mc(scaled, NormSelector::component(0), lvl2, 1500, 1000, 7), 0.95));
}

TEST_CASE("coverage estimate does not depend on thread count") {
    const LimitSpec spec(correlated3(), 1.0, 0.7, {1, -1, 0});
    const auto a = limiting_coverage_mc(spec, NormSelector::max_norm(), 0.95, 200, 200, 11, 1);
    const auto b = limiting_coverage_mc(spec, NormSelector::max_norm(), 0.95, 200, 200, 11, 8);
    CHECK(a.estimate == b.estimate);
    CHECK(a.std_error == b.std_error);
    CHECK_THROWS_AS(limiting_coverage_mc(spec, NormSelector::max_norm(), 0.95, 99, 200, 1), Error);
    CHECK_THROWS_AS(limiting_coverage_mc(spec, NormSelector::component(3), 0.95, 200, 200, 1), Error);
}

TEST_CASE("zero mass at the noise coordinates") {
    const auto zero = vec({0.0, 0.0});
    const LimitSpec big(Eigen::MatrixXd::Identity(2, 2), 1.0, 10.0, {1, 0});
    CHECK(zero_mass_probability(big, zero, 10000, 1) > 0.999);
    const LimitSpec none(Eigen::MatrixXd::Identity(2, 2), 1.0, 0.0, {1, 0});
    CHECK(zero_mass_probability(none, zero, 10000, 1) == 0.0);
    const LimitSpec one(Eigen::MatrixXd::Identity(2, 2), 1.0, 1.0, {1, 0});
    const double ref = normal_cdf(0.5) - normal_cdf(-0.5);
    CHECK(ref == Approx(0.38292).margin(5e-6));
    const double est = zero_mass_probability(one, zero, 10000, 2);
    CHECK(std::abs(est - ref) <= 3 * std::sqrt(ref * (1 - ref) / 10000));

    const LimitSpec corr(correlated3(), 1.0, 0.5, {1, 0, 0});
    CHECK(zero_mass_probability(corr, vec({0.3, -0.2, 1.0}), 10000, 3) > 0.0);
    const LimitSpec all_signal(Eigen::MatrixXd::Identity(2, 2), 1.0, 1.0, {1, -1});
    CHECK_THROWS_AS(zero_mass_probability(all_signal, zero, 100, 1), Error);
}

TEST_CASE("limit check rows and csv") {
    const auto rows = limit_check({0.5, 1.0}, {0.95}, {1, -1, 0}, 100, 100, 1, 2);
    REQUIRE(rows.size() == 6);
    CHECK(rows[0].component == 0);
    CHECK(rows[2].sign == 0);
    CHECK(rows[3].lambda0 == 1.0);
    CHECK(rows[3].level == Approx(solve_gamma({1.0, 0.95}).gamma_level));
    CHECK(rows[3].psi == Approx(0.95).margin(1e-10));
    const auto csv = limit_check_csv(rows);
    CHECK(csv.rfind("lambda0,target,level,component,sign,coverage,std_error,psi,psi_zero\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);
    CHECK(csv == limit_check_csv(limit_check({0.5, 1.0}, {0.95}, {1, -1, 0}, 100, 100, 1, 1)));
}

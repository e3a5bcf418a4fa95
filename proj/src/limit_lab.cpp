#include "sppost/limit_lab.hpp"

#include "sppost/calibration.hpp"
#include "sppost/errors.hpp"
#include "sppost/parallel.hpp"
#include "sppost/projection.hpp"
#include "sppost/regions.hpp"
#include "sppost/rng.hpp"

#include <cmath>
#include <cstdio>
#include <random>

namespace sppost {

namespace {

constexpr double kEigenFloor = 1e-12;
constexpr double kZeroSnap = 1e-12;

void snap_zeros(Eigen::VectorXd& v) {
    for (Eigen::Index j = 0; j < v.size(); ++j) {
        if (std::abs(v[j]) < kZeroSnap) v[j] = 0.0;
    }
}

Eigen::VectorXd standard_normal(Eigen::Index p, Rng& rng) {
    std::normal_distribution<double> normal;
    Eigen::VectorXd z(p);
    for (Eigen::Index j = 0; j < p; ++j) z[j] = normal(rng);
    return z;
}

// argmin uᵀCu − 2uᵀb + λ₀ pen(u) for the configured sign pattern.
class LimitSolver {
public:
    explicit LimitSolver(const LimitSpec& spec) : spec_(spec) {
        if (spec.lambda0() > 0.0) {
            problem_.Q = spec.C();
            problem_.penalty_scale = spec.lambda0();
            problem_.signs = spec.signs();
        } else {
            llt_.compute(spec.C());
        }
    }

    Eigen::VectorXd solve(Eigen::VectorXd b) {
        Eigen::VectorXd u;
        if (spec_.lambda0() > 0.0) {
            problem_.b = std::move(b);
            u = solve_quad_l1(problem_).solution;
        } else {
            u = llt_.solve(b);
        }
        snap_zeros(u);
        return u;
    }

    Eigen::VectorXd xi(const Eigen::VectorXd& delta) {
        return solve(spec_.sigma0() * (spec_.C_sqrt() * delta));
    }

    Eigen::VectorXd t_star(const Eigen::VectorXd& delta, Rng& rng) {
        const Eigen::VectorXd u = standard_normal(spec_.p(), rng);
        const Eigen::VectorXd w = spec_.sigma0() * (spec_.C_inv_sqrt() * (delta + u));
        return solve(spec_.C() * w);
    }

private:
    const LimitSpec& spec_;
    QuadL1Problem problem_;
    Eigen::LLT<Eigen::MatrixXd> llt_;
};

void check_delta(const LimitSpec& spec, const Eigen::VectorXd& delta) {
    if (delta.size() != spec.p()) throw Error(ErrorKind::DimensionMismatch, "delta has wrong length");
}

// Coverage estimates for several selectors from one set of (Δ, W*) draws.
std::vector<CoverageEstimate> coverage_mc(const LimitSpec& spec,
                                          const std::vector<NormSelector>& selectors,
                                          double level, std::size_t outer, std::size_t inner,
                                          std::uint64_t seed, unsigned threads) {
    if (outer < 100 || inner < 100) {
        throw Error(ErrorKind::InvalidArgument, "outer and inner must be >= 100");
    }
    if (!(level > 0.0 && level < 1.0)) {
        throw Error(ErrorKind::InvalidArgument, "level must lie in (0, 1)");
    }
    for (const auto& s : selectors) s.check_dimension(spec.p());
    const std::size_t m = selectors.size();
    // covered[k * m + s] = 1 if q(Δ_k) ≤ level for selector s.
    std::vector<unsigned char> covered(outer * m, 0);
    parallel_for(outer, threads, [&](std::size_t k) {
        LimitSolver solver(spec);
        Rng rng(seed, k);
        const Eigen::VectorXd delta = standard_normal(spec.p(), rng);
        const Eigen::VectorXd xi = solver.xi(delta);
        std::vector<double> xi_norm(m);
        for (std::size_t s = 0; s < m; ++s) xi_norm[s] = minkowski_norm(xi, selectors[s]);
        std::vector<std::size_t> hits(m, 0);
        for (std::size_t i = 0; i < inner; ++i) {
            const Eigen::VectorXd diff = solver.t_star(delta, rng) - xi;
            for (std::size_t s = 0; s < m; ++s) {
                if (minkowski_norm(diff, selectors[s]) <= xi_norm[s]) ++hits[s];
            }
        }
        for (std::size_t s = 0; s < m; ++s) {
            const double q = static_cast<double>(hits[s]) / static_cast<double>(inner);
            covered[k * m + s] = q <= level ? 1 : 0;
        }
    });
    std::vector<CoverageEstimate> out(m);
    for (std::size_t s = 0; s < m; ++s) {
        std::size_t total = 0;
        for (std::size_t k = 0; k < outer; ++k) total += covered[k * m + s];
        const double est = static_cast<double>(total) / static_cast<double>(outer);
        out[s].estimate = est;
        out[s].std_error = std::sqrt(est * (1.0 - est) / static_cast<double>(outer));
    }
    return out;
}

}  // namespace

LimitSpec::LimitSpec(Eigen::MatrixXd C, double sigma0, double lambda0,
                     std::vector<int> theta0_signs)
    : C_(std::move(C)), sigma0_(sigma0), lambda0_(lambda0), signs_(std::move(theta0_signs)) {
    if (C_.rows() != C_.cols() || C_.rows() < 1) {
        throw Error(ErrorKind::InvalidArgument, "C must be a nonempty square matrix");
    }
    if (static_cast<Eigen::Index>(signs_.size()) != C_.rows()) {
        throw Error(ErrorKind::DimensionMismatch, "one sign per coordinate is required");
    }
    if (!C_.allFinite() || (C_ - C_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, C_.cwiseAbs().maxCoeff())) {
        throw Error(ErrorKind::InvalidArgument, "C must be finite and symmetric");
    }
    if (!(sigma0_ > 0.0) || !(lambda0_ >= 0.0) || !std::isfinite(lambda0_)) {
        throw Error(ErrorKind::InvalidArgument, "need sigma0 > 0 and lambda0 >= 0");
    }
    for (int s : signs_) {
        if (s < -1 || s > 1) throw Error(ErrorKind::InvalidArgument, "signs must be -1, 0 or 1");
        if (s != 0) ++s0_;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(C_);
    if (eig.info() != Eigen::Success || !(eig.eigenvalues().minCoeff() > 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "C must be positive definite");
    }
    const Eigen::VectorXd ev = eig.eigenvalues().cwiseMax(kEigenFloor);
    const Eigen::MatrixXd& V = eig.eigenvectors();
    C_sqrt_ = V * ev.cwiseSqrt().asDiagonal() * V.transpose();
    C_inv_sqrt_ = V * ev.cwiseSqrt().cwiseInverse().asDiagonal() * V.transpose();
}

Eigen::VectorXd sample_xi(const LimitSpec& spec, const Eigen::VectorXd& delta) {
    check_delta(spec, delta);
    LimitSolver solver(spec);
    return solver.xi(delta);
}

Eigen::VectorXd sample_t_star(const LimitSpec& spec, const Eigen::VectorXd& delta, Rng& rng) {
    check_delta(spec, delta);
    LimitSolver solver(spec);
    return solver.t_star(delta, rng);
}

Eigen::VectorXd sample_t_star(const LimitSpec& spec, const Eigen::VectorXd& delta,
                              std::uint64_t seed) {
    Rng rng(seed);
    return sample_t_star(spec, delta, rng);
}

CoverageEstimate limiting_coverage_mc(const LimitSpec& spec, const NormSelector& selector,
                                      double level, std::size_t outer, std::size_t inner,
                                      std::uint64_t seed, unsigned threads) {
    return coverage_mc(spec, {selector}, level, outer, inner, seed, threads).front();
}

double zero_mass_probability(const LimitSpec& spec, const Eigen::VectorXd& delta,
                             std::size_t inner, std::uint64_t seed) {
    check_delta(spec, delta);
    if (spec.s0() == static_cast<std::size_t>(spec.p())) {
        throw Error(ErrorKind::InvalidArgument, "spec has no noise coordinate");
    }
    if (inner < 1) throw Error(ErrorKind::InvalidArgument, "inner must be >= 1");
    LimitSolver solver(spec);
    Rng rng(seed);
    std::size_t zeros = 0;
    for (std::size_t i = 0; i < inner; ++i) {
        const Eigen::VectorXd t = solver.t_star(delta, rng);
        bool all_zero = true;
        for (Eigen::Index j = 0; j < spec.p(); ++j) {
            if (spec.signs()[static_cast<std::size_t>(j)] == 0 && t[j] != 0.0) {
                all_zero = false;
                break;
            }
        }
        if (all_zero) ++zeros;
    }
    return static_cast<double>(zeros) / static_cast<double>(inner);
}

std::vector<LimitCheckRow> limit_check(const std::vector<double>& lambdas,
                                       const std::vector<double>& targets,
                                       const std::vector<int>& signs, std::size_t outer,
                                       std::size_t inner, std::uint64_t seed, unsigned threads) {
    const auto p = static_cast<Eigen::Index>(signs.size());
    std::vector<NormSelector> selectors;
    for (Eigen::Index j = 0; j < p; ++j) selectors.push_back(NormSelector::component(j));

    std::vector<LimitCheckRow> rows;
    std::uint64_t cell = 0;
    for (double lambda0 : lambdas) {
        for (double target : targets) {
            const auto cal = solve_gamma({lambda0, target, 1.0, 1.0});
            const LimitSpec spec(Eigen::MatrixXd::Identity(p, p), 1.0, lambda0, signs);
            const auto est = coverage_mc(spec, selectors, cal.gamma_level, outer, inner,
                                         derive_seed(seed, cell++), threads);
            for (Eigen::Index j = 0; j < p; ++j) {
                LimitCheckRow row;
                row.lambda0 = lambda0;
                row.target = target;
                row.level = cal.gamma_level;
                row.component = j;
                row.sign = signs[static_cast<std::size_t>(j)];
                row.mc = est[static_cast<std::size_t>(j)];
                row.psi = cal.psi_at_gamma;
                row.psi_zero = cal.psi0_at_gamma;
                rows.push_back(row);
            }
        }
    }
    return rows;
}

std::string limit_check_csv(const std::vector<LimitCheckRow>& rows) {
    std::string out = "lambda0,target,level,component,sign,coverage,std_error,psi,psi_zero\n";
    char buf[256];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%g,%g,%.10f,%ld,%d,%.6f,%.6f,%.6f,%.6f\n", r.lambda0,
                      r.target, r.level, static_cast<long>(r.component + 1), r.sign,
                      r.mc.estimate, r.mc.std_error, r.psi, r.psi_zero);
        out += buf;
    }
    return out;
}

}  // namespace sppost

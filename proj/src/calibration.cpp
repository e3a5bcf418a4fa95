#include "sppost/calibration.hpp"

#include "sppost/errors.hpp"
#include "sppost/normal.hpp"

#include <cmath>
#include <cstdio>

namespace sppost {

namespace {

// Bisection for an increasing f on [lo, hi] with f(lo) <= 0 <= f(hi), run
// until the bracket cannot shrink further in double precision.
template <class F>
double bisect_increasing(F&& f, double lo, double hi) {
    for (int it = 0; it < 400; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (f(mid) <= 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

void check_lambda(double lambda0) {
    if (!(lambda0 >= 0.0) || !std::isfinite(lambda0)) {
        throw Error(ErrorKind::InvalidArgument, "lambda0 must be finite and >= 0");
    }
}

void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw Error(ErrorKind::InvalidArgument, "alpha must lie in (0, 1)");
    }
}

// Coverage of the nonzero-coefficient interval as a function of the
// half-width z: Φ(b + z) − Φ(b − z), strictly increasing in z ≥ 0.
double coverage_at(double half_lambda, double z) {
    return normal_cdf(half_lambda + z) - normal_cdf(half_lambda - z);
}

}  // namespace

double h_plus(double lambda0, double zeta) {
    check_lambda(lambda0);
    return 2.0 * normal_cdf(std::abs(zeta - 0.5 * lambda0)) - 1.0;
}

double h_minus(double lambda0, double zeta) { return h_plus(lambda0, -zeta); }

double h_zero(double lambda0, double zeta) {
    check_lambda(lambda0);
    const double b = 0.5 * lambda0;
    if (zeta > b) return normal_cdf(zeta - b) - normal_cdf(-zeta - b);
    if (zeta < -b) return normal_cdf(-zeta + b) - normal_cdf(zeta + b);
    return normal_cdf(zeta + b) - normal_cdf(zeta - b);
}

double psi(double alpha, double lambda0) {
    check_alpha(alpha);
    check_lambda(lambda0);
    return coverage_at(0.5 * lambda0, normal_upper_quantile(0.5 * alpha));
}

double psi_zero(double alpha, double lambda0) {
    check_alpha(alpha);
    check_lambda(lambda0);
    const double level = 1.0 - alpha;
    const double b = 0.5 * lambda0;
    // On ζ ≥ 0, h_zero falls on [0, b] and rises to 1 on [b, ∞), so
    // {h_zero ≤ level} ∩ [0, ∞) is an interval [lo, hi] (possibly empty).
    auto g = [&](double z) { return h_zero(lambda0, z) - level; };
    if (g(b) > 0.0) return 0.0;

    double top = b + 1.0;
    while (g(top) <= 0.0) top = b + 2.0 * (top - b);
    const double hi = bisect_increasing(g, b, top);

    double lo = 0.0;
    if (g(0.0) > 0.0) {
        lo = bisect_increasing([&](double z) { return -g(z); }, 0.0, b);
    }
    return 2.0 * (normal_cdf(hi) - normal_cdf(lo));
}

double effective_penalty(double lambda0, double c_j, double sigma0) {
    check_lambda(lambda0);
    if (!(c_j > 0.0) || !(sigma0 > 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "c_j and sigma0 must be positive");
    }
    return lambda0 / (sigma0 * std::sqrt(c_j));
}

void CalibrationQuery::validate() const {
    check_lambda(lambda0);
    if (!(target > 0.0 && target < 1.0)) {
        throw Error(ErrorKind::InvalidArgument, "target must lie in (0, 1)");
    }
    if (!(c_j > 0.0) || !(sigma0 > 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "c_j and sigma0 must be positive");
    }
}

CalibrationResult solve_gamma(const CalibrationQuery& query) {
    query.validate();
    const double lam = effective_penalty(query.lambda0, query.c_j, query.sigma0);
    const double half = 0.5 * lam;
    auto f = [&](double z) { return coverage_at(half, z) - query.target; };
    double hi = 1.0;
    while (f(hi) <= 0.0) hi *= 2.0;
    const double z = bisect_increasing(f, 0.0, hi);

    CalibrationResult out;
    const double gamma = 2.0 * normal_sf(z);
    out.gamma_level = std::erf(z / std::sqrt(2.0));
    out.psi_at_gamma = coverage_at(half, z);
    // For very large penalties γ underflows and every ζ is covered.
    out.psi0_at_gamma = gamma > 0.0 ? psi_zero(gamma, lam) : 1.0;
    return out;
}

const std::vector<double>& default_table_lambdas() {
    static const std::vector<double> lambdas = {
        0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5, 0.55, 0.6, 0.65,
        0.7,  0.75, 0.8, 0.85, 0.9, 0.95, 1.0, 1.1, 1.2, 1.3, 1.4, 1.5, 1.6,
        1.7,  1.8, 1.9, 2.0, 2.2, 2.4, 2.6, 2.8, 3.0, 3.5, 4.0};
    return lambdas;
}

const std::vector<double>& default_table_targets() {
    static const std::vector<double> targets = {0.9, 0.925, 0.95, 0.975, 0.99};
    return targets;
}

std::vector<std::vector<double>> calibration_table(const std::vector<double>& lambdas,
                                                   const std::vector<double>& targets) {
    if (lambdas.empty() || targets.empty()) {
        throw Error(ErrorKind::InvalidArgument, "calibration grid must be nonempty");
    }
    std::vector<std::vector<double>> table(lambdas.size(), std::vector<double>(targets.size()));
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        for (std::size_t k = 0; k < targets.size(); ++k) {
            table[i][k] = solve_gamma({lambdas[i], targets[k], 1.0, 1.0}).gamma_level;
        }
    }
    return table;
}

std::string calibration_table_csv(const std::vector<double>& lambdas,
                                  const std::vector<double>& targets,
                                  const std::vector<std::vector<double>>& table) {
    std::string out = "lambda";
    char buf[64];
    for (double t : targets) {
        std::snprintf(buf, sizeof buf, ",%g", t);
        out += buf;
    }
    out += '\n';
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%g", lambdas[i]);
        out += buf;
        for (double v : table[i]) {
            std::snprintf(buf, sizeof buf, ",%.4f", v);
            out += buf;
        }
        out += '\n';
    }
    return out;
}

}  // namespace sppost

#pragma once

// Test-only reimplementation of the limiting coverage functions on top of
// Boost.Math, with Newton (not bisection) for the calibration root.

#include <boost/math/distributions/normal.hpp>

#include <cmath>
#include <functional>

namespace oracle {

inline const boost::math::normal_distribution<double>& std_normal() {
    static const boost::math::normal_distribution<double> nd;
    return nd;
}
inline double Phi(double x) { return boost::math::cdf(std_normal(), x); }
inline double phi(double x) { return boost::math::pdf(std_normal(), x); }

inline double psi(double alpha, double lambda0) {
    const double z = boost::math::quantile(boost::math::complement(std_normal(), alpha / 2));
    return Phi(lambda0 / 2 + z) - Phi(lambda0 / 2 - z);
}

inline double h_zero(double lambda0, double zeta) {
    const double b = lambda0 / 2;
    if (zeta > b) return Phi(zeta - b) - Phi(-zeta - b);
    if (zeta < -b) return Phi(-zeta + b) - Phi(zeta + b);
    return Phi(zeta + b) - Phi(zeta - b);
}

// Standard-normal mass of {ζ : h0 ≤ level} by scanning a fine grid on
// [−10, 10] and bisecting every cell where the indicator flips.
inline double psi_zero_scan(double alpha, double lambda0) {
    const double level = 1.0 - alpha;
    auto inside = [&](double z) { return h_zero(lambda0, z) <= level; };
    const int cells = 200000;
    const double lo = -10.0, hi = 10.0, h = (hi - lo) / cells;
    double mass = 0.0;
    double a = lo;
    bool in_a = inside(a);
    double seg_start = in_a ? lo : NAN;
    for (int i = 1; i <= cells; ++i) {
        const double b = lo + i * h;
        const bool in_b = inside(b);
        if (in_b != in_a) {
            double l = a, r = b;
            for (int it = 0; it < 200 && r - l > 1e-15; ++it) {
                const double m = 0.5 * (l + r);
                (inside(m) == in_a ? l : r) = m;
            }
            const double cut = 0.5 * (l + r);
            if (in_a) {
                mass += Phi(cut) - Phi(seg_start);
            } else {
                seg_start = cut;
            }
        }
        a = b;
        in_a = in_b;
    }
    if (in_a) mass += Phi(hi) - Phi(seg_start);
    return mass;
}

struct NewtonResult {
    double level;
    int iterations;
};

// Solves Φ(b + z) − Φ(b − z) = target for z > 0 by Newton's method; returns
// 1 − γ = 2Φ(z) − 1.
inline NewtonResult newton_gamma_level(double lambda_eff, double target) {
    const double b = lambda_eff / 2;
    double z = b + boost::math::quantile(std_normal(), 0.5 + target / 2);
    int it = 0;
    for (; it < 100; ++it) {
        const double f = Phi(b + z) - Phi(b - z) - target;
        const double df = phi(b + z) + phi(b - z);
        const double step = f / df;
        z -= step;
        if (std::abs(step) < 1e-15 * std::max(1.0, z)) break;
    }
    return {1.0 - 2.0 * boost::math::cdf(std_normal(), -z), it};
}

}  // namespace oracle

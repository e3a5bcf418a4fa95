#include "sppost/normal.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace sppost {

double normal_pdf(double x) noexcept {
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

double normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_sf(double x) noexcept { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

namespace {

// Acklam's coefficients; relative error 1.15e-9 before refinement.
constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                        1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                        6.680131188771972e+01,  -1.328068155288572e+01};
constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                        -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                        3.754408661907416e+00};
constexpr double p_low = 0.02425;

// Lower-tail rational approximation for q in (0, 0.5].
double acklam_lower(double q) {
    if (q < p_low) {
        const double t = std::sqrt(-2.0 * std::log(q));
        return (((((c[0] * t + c[1]) * t + c[2]) * t + c[3]) * t + c[4]) * t + c[5]) /
               ((((d[0] * t + d[1]) * t + d[2]) * t + d[3]) * t + 1.0);
    }
    const double t = q - 0.5;
    const double r = t * t;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * t /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

// x ≈ Φ⁻¹(q) for q ≤ 0.5, refined by one Halley step on Φ(x) − q.
double lower_quantile(double q) {
    double x = acklam_lower(q);
    const double e = normal_cdf(x) - q;
    const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
    x = x - u / (1.0 + 0.5 * x * u);
    return x;
}

}  // namespace

double normal_quantile(double p) noexcept {
    if (std::isnan(p) || p < 0.0 || p > 1.0) return std::numeric_limits<double>::quiet_NaN();
    if (p == 0.0) return -std::numeric_limits<double>::infinity();
    if (p == 1.0) return std::numeric_limits<double>::infinity();
    if (p <= 0.5) return lower_quantile(p);
    return -lower_quantile(1.0 - p);
}

double normal_upper_quantile(double a) noexcept {
    if (std::isnan(a) || a < 0.0 || a > 1.0) return std::numeric_limits<double>::quiet_NaN();
    if (a == 0.0) return std::numeric_limits<double>::infinity();
    if (a == 1.0) return -std::numeric_limits<double>::infinity();
    if (a <= 0.5) return -lower_quantile(a);
    return lower_quantile(1.0 - a);
}

}  // namespace sppost

#pragma once

namespace sppost {

/// Standard normal density.
double normal_pdf(double x) noexcept;

/// Standard normal CDF Φ(x), computed through erfc so the lower tail keeps
/// full relative precision.
double normal_cdf(double x) noexcept;

/// Upper tail 1 − Φ(x) without cancellation.
double normal_sf(double x) noexcept;

/// Φ⁻¹(p) for p in (0, 1): Acklam's rational approximation followed by one
/// Halley correction step (relative error near machine epsilon).
/// Returns ±infinity at p = 0 / 1 and NaN outside [0, 1].
double normal_quantile(double p) noexcept;

/// Upper quantile z_a = Φ⁻¹(1 − a), evaluated without forming 1 − a.
double normal_upper_quantile(double a) noexcept;

}  // namespace sppost

#pragma once

namespace segstat {

/// Upper tail P(X >= x) of the chi-square distribution with `df` degrees of
/// freedom. Throws ValidationError for df < 1 or negative/NaN x.
double chisq_sf(double x, int df);

/// Upper tail 1 - Phi(z) of the standard normal distribution.
double normal_sf(double z);

/// Lower tail Phi(z).
double normal_cdf(double z);

}  // namespace segstat

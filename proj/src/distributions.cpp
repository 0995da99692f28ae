#include "segstat/distributions.hpp"

#include <cmath>
#include <numbers>

#include <boost/math/special_functions/gamma.hpp>

#include "segstat/error.hpp"

namespace segstat {

double chisq_sf(double x, int df) {
    if (df < 1) throw ValidationError("chi-square degrees of freedom must be >= 1");
    if (std::isnan(x) || x < 0.0) throw ValidationError("chi-square argument must be >= 0");
    if (x == 0.0) return 1.0;
    if (std::isinf(x)) return 0.0;
    return boost::math::gamma_q(0.5 * df, 0.5 * x);
}

double normal_sf(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

}  // namespace segstat

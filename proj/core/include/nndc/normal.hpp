#pragma once

namespace nndc {

/// Standard normal CDF, computed from erfc so the lower tail keeps full
/// relative precision.
double normal_cdf(double z);

/// Standard normal quantile (Wichura's AS241, PPND16; about 1e-16 relative
/// accuracy on (0, 1)). Returns -inf at u = 0 and +inf at u = 1; throws
/// InvalidArgument outside [0, 1] or for NaN.
double normal_quantile(double u);

}  // namespace nndc

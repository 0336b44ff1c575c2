#pragma once

namespace trust_atlas::group {

/// Standard normal CDF.
double norm_cdf(double x);

/// Standard normal quantile for p in (0, 1); OutOfDomain otherwise.
/// Acklam's rational approximation followed by one Halley step against
/// the erfc-based CDF.
double inv_norm_cdf(double p);

/// Half-width of the binomial confidence band, Z * sqrt(1 / (4 n_s)).
double confidence_delta(int n_samples, double z_score);

}  // namespace trust_atlas::group

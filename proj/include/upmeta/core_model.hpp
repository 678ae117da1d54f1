#pragma once

// Truncated fractional path-loss-inversion power control and the distance
// distributions of the uplink model. All functions are pure and safe to call
// concurrently.

#include "upmeta/system_params.hpp"

namespace upmeta {

/// Uplink transmit power at serving distance r: rho * r^(alpha*eps), capped
/// at p_max. Continuous and nondecreasing in r.
double transmit_power(double r_m, const SystemParams& params);

/// Mean received signal strength p_t(r) * r^(-alpha); strictly decreasing in
/// r for epsilon < 1. Singular at r = 0.
double received_strength(double r_m, const SystemParams& params);

/// Serving-link (nearest-BS) distance law: Rayleigh with scale set by the
/// BS density.
double serving_distance_pdf(double r_m, const SystemParams& params);
double serving_distance_cdf(double r_m, const SystemParams& params);

/// Density of an interferer's own link length given its distance d_i to the
/// victim BS: the serving law truncated and renormalized to [0, d_i].
double interferer_link_pdf(double r_m, double d_i_m, const SystemParams& params);
double interferer_link_cdf(double r_m, double d_i_m, const SystemParams& params);

/// Inverse of interferer_link_cdf in its first argument; used for sampling.
double interferer_link_quantile(double u, double d_i_m, const SystemParams& params);

/// Distance to the nearest interfering user.
double nearest_interferer_pdf(double r_m, const SystemParams& params);
double nearest_interferer_cdf(double r_m, const SystemParams& params);

/// Radial intensity of the interfering-user point process at distance d.
double interferer_intensity(double d_m, const SystemParams& params);

namespace detail {
/// Closed-form J(r) = int_0^r (1 - e^{-pi lambda z^2}) z dz.
double nearest_interferer_exponent_integral(double r_m, double bs_density);
}  // namespace detail

}  // namespace upmeta

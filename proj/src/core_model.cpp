#include "upmeta/core_model.hpp"

#include <cmath>
#include <stdexcept>

#include "upmeta/numerics/quadrature.hpp"

namespace upmeta {

using num::kPi;

double transmit_power(double r_m, const SystemParams& params) {
    if (r_m < 0.0) throw std::domain_error("transmit_power: negative distance");
    if (r_m == 0.0) return 0.0;
    const double p = params.rho_w * std::pow(r_m, params.alpha * params.epsilon);
    return p < params.p_max_w ? p : params.p_max_w;
}

double received_strength(double r_m, const SystemParams& params) {
    if (!(r_m > 0.0)) throw std::domain_error("received_strength: distance must be > 0");
    // Fold the exponents before pow() so the pre-saturation branch stays
    // accurate for r far below or above 1 m.
    const double r_c = params.crossover_radius();
    if (r_m < r_c) {
        return params.rho_w * std::pow(r_m, params.alpha * (params.epsilon - 1.0));
    }
    return params.p_max_w * std::pow(r_m, -params.alpha);
}

double serving_distance_pdf(double r_m, const SystemParams& params) {
    if (r_m < 0.0) return 0.0;
    const double lam = params.bs_density;
    return 2.0 * kPi * lam * r_m * std::exp(-lam * kPi * r_m * r_m);
}

double serving_distance_cdf(double r_m, const SystemParams& params) {
    if (r_m <= 0.0) return 0.0;
    return -std::expm1(-params.bs_density * kPi * r_m * r_m);
}

double interferer_link_pdf(double r_m, double d_i_m, const SystemParams& params) {
    if (!(d_i_m > 0.0)) throw std::domain_error("interferer_link_pdf: d_i must be > 0");
    if (r_m < 0.0 || r_m > d_i_m)
        throw std::domain_error("interferer_link_pdf: r outside [0, d_i]");
    return serving_distance_pdf(r_m, params) / serving_distance_cdf(d_i_m, params);
}

double interferer_link_cdf(double r_m, double d_i_m, const SystemParams& params) {
    if (!(d_i_m > 0.0)) throw std::domain_error("interferer_link_cdf: d_i must be > 0");
    if (r_m <= 0.0) return 0.0;
    if (r_m >= d_i_m) return 1.0;
    return serving_distance_cdf(r_m, params) / serving_distance_cdf(d_i_m, params);
}

double interferer_link_quantile(double u, double d_i_m, const SystemParams& params) {
    if (!(u >= 0.0 && u <= 1.0))
        throw std::domain_error("interferer_link_quantile: u outside [0,1]");
    const double mass = serving_distance_cdf(d_i_m, params);
    const double arg = -std::log1p(-u * mass);
    return std::sqrt(arg / (kPi * params.bs_density));
}

namespace detail {

double nearest_interferer_exponent_integral(double r_m, double bs_density) {
    const double a = kPi * bs_density;
    return 0.5 * r_m * r_m + std::expm1(-a * r_m * r_m) / (2.0 * a);
}

}  // namespace detail

double nearest_interferer_pdf(double r_m, const SystemParams& params) {
    if (r_m <= 0.0) return 0.0;
    const double lam = params.bs_density;
    const double thin = -std::expm1(-kPi * lam * r_m * r_m);
    const double j = detail::nearest_interferer_exponent_integral(r_m, lam);
    return 2.0 * kPi * lam * thin * r_m * std::exp(-2.0 * kPi * lam * j);
}

double nearest_interferer_cdf(double r_m, const SystemParams& params) {
    if (r_m <= 0.0) return 0.0;
    const double j = detail::nearest_interferer_exponent_integral(r_m, params.bs_density);
    return -std::expm1(-2.0 * kPi * params.bs_density * j);
}

double interferer_intensity(double d_m, const SystemParams& params) {
    if (d_m < 0.0) return 0.0;
    const double lam = params.bs_density;
    return lam * -std::expm1(-kPi * lam * d_m * d_m);
}

}  // namespace upmeta

#include "upmeta/dominant.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "upmeta/core_model.hpp"
#include "upmeta/numerics/lambert_w.hpp"
#include "upmeta/numerics/parallel.hpp"
#include "upmeta/numerics/quadrature.hpp"
#include "upmeta/numerics/roots.hpp"
#include "upmeta/numerics/special.hpp"

namespace upmeta {

using num::kPi;

namespace detail {

double saturating_power_mass(double z_m, const SystemParams& p) {
    if (z_m <= 0.0) return 0.0;
    const double lam_pi = kPi * p.bs_density;
    const double r_c = p.crossover_radius();
    const double z_ramp = std::min(z_m, r_c);
    const double a = 1.0 + 0.5 * p.alpha * p.epsilon;
    // ramp branch: int_0^zc rho r^(alpha eps) 2 pi lam r e^{-pi lam r^2} dr
    double mass = p.rho_w * std::pow(lam_pi, -0.5 * p.alpha * p.epsilon) *
                  std::tgamma(a) * num::lower_gamma_regularized(a, lam_pi * z_ramp * z_ramp);
    if (z_m > r_c) {
        mass += p.p_max_w *
                (std::exp(-lam_pi * r_c * r_c) - std::exp(-lam_pi * z_m * z_m));
    }
    return mass;
}

double residual_interference_fast(double d1_m, const SystemParams& p, double rel_tol) {
    num::IntegrateOptions opt;
    opt.rel_tol = rel_tol;
    opt.abs_tol = 0.0;
    const double outer = num::integrate_or_throw(
        [&](double z) {
            return std::pow(z, 1.0 - p.alpha) * saturating_power_mass(z, p);
        },
        d1_m, num::kInf, opt, "residual interference (closed inner)");
    return 2.0 * kPi * p.bs_density * outer;
}

double success_from_parts(double u, const ThresholdTerms& terms) {
    if (u <= 0.0) return 1.0;
    if (std::isinf(u)) return 0.0;
    return std::exp(-terms.noise_plus_residual * u) / (1.0 + terms.nearest_term * u);
}

double threshold_from_parts(const ThresholdTerms& terms, double gamma) {
    if (gamma >= 1.0) return 0.0;
    if (gamma <= 0.0) return std::numeric_limits<double>::infinity();
    const double kappa = terms.nearest_term;
    const double noise_term = terms.noise_plus_residual;
    if (!(kappa > 0.0)) throw std::domain_error("reliability threshold: kappa must be > 0");

    double u;
    if (noise_term <= 0.0) {
        u = (1.0 / gamma - 1.0) / kappa;
    } else {
        // K = -1/kappa + W0(S exp(S/kappa) / (gamma kappa)) / S, argument kept
        // in the log domain because it overflows for small gamma.
        const double log_arg =
            std::log(noise_term) - std::log(kappa) - std::log(gamma) + noise_term / kappa;
        u = num::lambert_w0_exp(log_arg) / noise_term - 1.0 / kappa;
        if (u < 0.0) u = 0.0;
        // One Newton step on log(success) - log(gamma) repairs the
        // cancellation between W/S and 1/kappa when gamma is close to 1.
        for (int it = 0; it < 2; ++it) {
            const double h = -noise_term * u - std::log1p(kappa * u) - std::log(gamma);
            const double hp = -noise_term - kappa / (1.0 + kappa * u);
            const double step = h / hp;
            u -= step;
            if (u < 0.0) u = 0.0;
            if (std::abs(step) <= 1e-15 * (1.0 + u)) break;
        }
    }
    return u;
}

}  // namespace detail

double residual_interference(double d1_m, const SystemParams& params, double rel_tol) {
    if (!(d1_m > 0.0)) throw std::domain_error("residual_interference: d1 must be > 0");
    if (!(params.alpha > 2.0))
        throw std::domain_error("residual_interference: alpha must exceed 2 for convergence");
    const double lam = params.bs_density;
    num::IntegrateOptions inner_opt;
    inner_opt.rel_tol = 1e-11;
    inner_opt.abs_tol = 0.0;
    num::IntegrateOptions outer_opt;
    outer_opt.rel_tol = rel_tol;
    outer_opt.abs_tol = 0.0;

    const double outer = num::integrate_or_throw(
        [&](double z) {
            const double inner = num::integrate_or_throw(
                [&](double r) {
                    return transmit_power(r, params) * 2.0 * kPi * lam * r *
                           std::exp(-kPi * lam * r * r);
                },
                0.0, z, inner_opt, "residual interference inner");
            return std::pow(z, 1.0 - params.alpha) * inner;
        },
        d1_m, num::kInf, outer_opt, "residual interference outer");
    return 2.0 * kPi * lam * outer;
}

double mean_nearest_power(double r_m, const SystemParams& params) {
    if (!(r_m > 0.0)) throw std::domain_error("mean_nearest_power: r must be > 0");
    const double denom = serving_distance_cdf(r_m, params);
    if (denom < 1e-300) {
        // r so small that the truncated law is effectively the small-ball
        // limit f(x|r) = 2x/r^2.
        const double ae = params.alpha * params.epsilon;
        return 2.0 * params.rho_w * std::pow(r_m, ae) / (ae + 2.0);
    }
    return detail::saturating_power_mass(r_m, params) / denom;
}

double conditional_success_approx(double u, double d1_m, double theta,
                                  const SystemParams& params) {
    if (!(u > 0.0)) throw std::domain_error("conditional_success_approx: u must be > 0");
    if (!(d1_m > 0.0)) throw std::domain_error("conditional_success_approx: d1 must be > 0");
    if (theta < 0.0) throw std::domain_error("conditional_success_approx: theta must be >= 0");
    if (theta == 0.0) return 1.0;
    const ThresholdTerms terms{
        theta * mean_nearest_power(d1_m, params) * std::pow(d1_m, -params.alpha),
        theta * (params.noise_w + residual_interference(d1_m, params))};
    return detail::success_from_parts(u, terms);
}

double reliability_threshold(double r_m, double theta, double gamma,
                             const SystemParams& params) {
    if (!(r_m > 0.0)) throw std::domain_error("reliability_threshold: r must be > 0");
    if (!(theta > 0.0)) throw std::domain_error("reliability_threshold: theta must be > 0");
    const ThresholdTerms terms{
        theta * mean_nearest_power(r_m, params) * std::pow(r_m, -params.alpha),
        theta * (params.noise_w + residual_interference(r_m, params))};
    return detail::threshold_from_parts(terms, gamma);
}

double inverse_strength_crossover(const SystemParams& params) {
    return std::pow(params.p_max_w / params.rho_w, 1.0 / params.epsilon) / params.p_max_w;
}

double inverse_strength_cdf(double x, const SystemParams& params) {
    if (!(x >= 0.0)) throw std::domain_error("inverse_strength_cdf: x must be >= 0");
    if (x == 0.0) return 0.0;
    if (std::isinf(x)) return 1.0;
    const double u_c = inverse_strength_crossover(params);
    if (x >= u_c) {
        return serving_distance_cdf(std::pow(x * params.p_max_w, 1.0 / params.alpha), params);
    }
    if (params.epsilon >= 1.0) return 0.0;  // atom at u_c = 1/rho
    const double expo = 1.0 / (params.alpha * (1.0 - params.epsilon));
    return serving_distance_cdf(std::pow(x * params.rho_w, expo), params);
}

// ---------------------------------------------------------------------------
// DominantEvaluator
// ---------------------------------------------------------------------------

DominantEvaluator::DominantEvaluator(const SystemParams& params, Options options)
    : params_(params), options_(options) {
    params_.validate();
    const double lam_pi = kPi * params_.bs_density;

    // Truncate the outer integral where the nearest-interferer tail mass
    // drops below 1e-10: solve pi lam R^2 - (1 - e^{-pi lam R^2}) = ln 1e10.
    double x = std::log(1e10) + 1.0;
    for (int it = 0; it < 8; ++it) x = std::log(1e10) + 1.0 - std::exp(-x);
    r_cut_ = std::sqrt(x / lam_pi);
    r_lo_ = 1e-3 / std::sqrt(lam_pi);

    const std::size_t n = std::max<std::size_t>(options_.table_points, 16);
    std::vector<double> ln_r(n), ln_g(n);
    const double step = std::log(r_cut_ * 1.02 / r_lo_) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) ln_r[i] = std::log(r_lo_) + step * static_cast<double>(i);
    num::parallel_for(
        n,
        [&](std::size_t i) {
            ln_g[i] = std::log(detail::residual_interference_fast(std::exp(ln_r[i]), params_));
        },
        options_.build_threads);
    log_g_ = num::MonotoneCubic(std::move(ln_r), std::move(ln_g));
    g_tail_exponent_ = 2.0 - params_.alpha;
}

double DominantEvaluator::residual_interference(double r_m) const {
    if (!(r_m > 0.0)) throw std::domain_error("residual_interference: r must be > 0");
    const double lr = std::log(r_m);
    if (lr <= log_g_.min_x()) return std::exp(log_g_(log_g_.min_x()));
    if (lr >= log_g_.max_x()) {
        return std::exp(log_g_(log_g_.max_x()) + g_tail_exponent_ * (lr - log_g_.max_x()));
    }
    return std::exp(log_g_(lr));
}

double DominantEvaluator::mean_nearest_power(double r_m) const {
    return upmeta::mean_nearest_power(r_m, params_);
}

ThresholdTerms DominantEvaluator::threshold_terms(double r_m, double theta) const {
    return {theta * mean_nearest_power(r_m) * std::pow(r_m, -params_.alpha),
            theta * (params_.noise_w + residual_interference(r_m))};
}

double DominantEvaluator::reliability_threshold(double r_m, double theta,
                                                double gamma) const {
    return detail::threshold_from_parts(threshold_terms(r_m, theta), gamma);
}

double DominantEvaluator::meta_integral(double theta, double gamma,
                                        bool use_lambert) const {
    if (!(theta > 0.0)) throw std::domain_error("meta distribution: theta must be > 0");
    if (!(gamma > 0.0 && gamma < 1.0))
        throw std::domain_error("meta distribution: gamma must be in (0, 1)");

    auto integrand = [&](double r) {
        if (r <= 0.0) return 0.0;
        const ThresholdTerms terms = threshold_terms(r, theta);
        double u_star;
        if (use_lambert) {
            u_star = detail::threshold_from_parts(terms, gamma);
        } else {
            // independent route: bracket then Brent on the monotone map
            double hi = 1.0 / terms.nearest_term;
            while (detail::success_from_parts(hi, terms) > gamma) {
                hi *= 2.0;
                if (hi > 1e300) break;
            }
            u_star = num::find_root_monotone(
                [&](double u) { return detail::success_from_parts(u, terms) - gamma; },
                0.0, hi, 1e-14 * hi);
        }
        return inverse_strength_cdf(u_star, params_) * nearest_interferer_pdf(r, params_);
    };

    num::IntegrateOptions opt;
    opt.abs_tol = options_.quad_abs_tol;
    opt.rel_tol = options_.quad_rel_tol;
    const auto res = num::integrate(integrand, 0.0, r_cut_, opt);
    if (!res.converged) {
        throw num::convergence_error("meta distribution outer integral did not converge",
                                     res.value, res.abs_error_estimate);
    }
    return std::min(1.0, std::max(0.0, res.value));
}

double DominantEvaluator::meta_proposed(double theta, double gamma) const {
    return meta_integral(theta, gamma, true);
}

double DominantEvaluator::meta_direct(double theta, double gamma) const {
    return meta_integral(theta, gamma, false);
}

double meta_proposed(double theta, double gamma, const SystemParams& params) {
    return DominantEvaluator(params).meta_proposed(theta, gamma);
}

double meta_direct(double theta, double gamma, const SystemParams& params) {
    return DominantEvaluator(params).meta_direct(theta, gamma);
}

}  // namespace upmeta

#pragma once

// Dominant-interferer approximation of the uplink SINR meta distribution:
// the nearest interfering user is kept exactly, the remaining interference
// enters through its conditional mean G, and the reliability threshold in
// the received-strength domain comes out of the principal Lambert W branch.
//
// meta_direct() computes the same outer integral but recovers the threshold
// by root finding on the monotone conditional success probability, so the
// two paths differ only in the Lambert-W algebra.

#include <cstddef>

#include "upmeta/numerics/interp.hpp"
#include "upmeta/system_params.hpp"

namespace upmeta {

/// Conditional mean of the interference from everything beyond the nearest
/// interferer at distance d1. Nested adaptive quadrature; see
/// detail::residual_interference_fast for the closed-inner-integral route.
double residual_interference(double d1_m, const SystemParams& params,
                             double rel_tol = 1e-9);

/// Expected transmit power of the nearest interferer given its distance r
/// to the victim BS (its own link length is truncated-Rayleigh on [0, r]).
double mean_nearest_power(double r_m, const SystemParams& params);

/// Approximate P(SINR > theta) given reciprocal received strength u = 1/R_u'
/// and nearest-interferer distance d1.
double conditional_success_approx(double u, double d1_m, double theta,
                                  const SystemParams& params);

/// The unique u* with conditional_success_approx(u*, r, theta) = gamma.
/// gamma -> 0 and gamma -> 1 follow the limit conventions (+inf and 0).
double reliability_threshold(double r_m, double theta, double gamma,
                             const SystemParams& params);

/// CDF of U = R_u^alpha / p_t(R_u), the reciprocal received strength of the
/// typical link. For epsilon = 1 the pre-saturation branch degenerates to an
/// atom at 1/rho.
double inverse_strength_cdf(double x, const SystemParams& params);

/// Branch crossover of inverse_strength_cdf: u_c = (p_max/rho)^(1/eps)/p_max.
double inverse_strength_crossover(const SystemParams& params);

/// The two coefficients of the conditional success probability at nearest-
/// interferer distance r: exp(-S u) / (1 + kappa u) with u the reciprocal
/// received strength.
struct ThresholdTerms {
    double nearest_term = 0.0;         // kappa(r) = theta pbar_t(r) r^-alpha
    double noise_plus_residual = 0.0;  // S(r) = theta (sigma^2 + G(r))
};

namespace detail {

/// int_0^z p_t(r) 2 pi lambda r e^{-pi lambda r^2} dr in closed form via the
/// regularized lower incomplete gamma.
double saturating_power_mass(double z_m, const SystemParams& params);

/// residual_interference with the closed-form inner integral; same value,
/// one quadrature level less.
double residual_interference_fast(double d1_m, const SystemParams& params,
                                  double rel_tol = 1e-10);

double success_from_parts(double u, const ThresholdTerms& terms);
double threshold_from_parts(const ThresholdTerms& terms, double gamma);

}  // namespace detail

/// Precomputes the residual-interference table for one parameter set and
/// evaluates the meta distribution on it. Immutable once built; safe for
/// concurrent meta calls.
class DominantEvaluator {
  public:
    struct Options {
        std::size_t table_points = 400;
        double quad_abs_tol = 1e-8;
        double quad_rel_tol = 1e-8;
        unsigned build_threads = 0;  // 0 = hardware concurrency
    };

    explicit DominantEvaluator(const SystemParams& params)
        : DominantEvaluator(params, Options{}) {}
    DominantEvaluator(const SystemParams& params, Options options);

    const SystemParams& params() const { return params_; }

    /// Table-backed G(r); falls back to power-law extrapolation outside the
    /// tabulated range (where the nearest-interferer density is negligible).
    double residual_interference(double r_m) const;

    double mean_nearest_power(double r_m) const;

    /// kappa(r) and S(r) from the cached tables.
    ThresholdTerms threshold_terms(double r_m, double theta) const;

    /// Reliability threshold K(r, theta, gamma) using the cached G.
    double reliability_threshold(double r_m, double theta, double gamma) const;

    /// Meta distribution via the closed-form Lambert-W threshold.
    double meta_proposed(double theta, double gamma) const;

    /// Meta distribution via bisection on the conditional success probability.
    double meta_direct(double theta, double gamma) const;

    /// Outer-integral truncation radius (nearest-interferer tail < 1e-10).
    double integration_cutoff() const { return r_cut_; }

  private:
    double meta_integral(double theta, double gamma, bool use_lambert) const;

    SystemParams params_;
    Options options_;
    double r_lo_ = 0.0;
    double r_cut_ = 0.0;
    double g_tail_exponent_ = 0.0;
    num::MonotoneCubic log_g_;  // ln G against ln r
};

/// Convenience wrappers that build a throwaway evaluator; prefer the class
/// when sweeping grids.
double meta_proposed(double theta, double gamma, const SystemParams& params);
double meta_direct(double theta, double gamma, const SystemParams& params);

}  // namespace upmeta

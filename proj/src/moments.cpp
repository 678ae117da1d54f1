#include "upmeta/moments.hpp"

#include <cmath>
#include <stdexcept>
#include <type_traits>

#include "upmeta/core_model.hpp"
#include "upmeta/numerics/quadrature.hpp"
#include "upmeta/numerics/special.hpp"

namespace upmeta {

using num::kPi;
using std::complex;

namespace {

// reciprocal received strength U(z) = z^alpha / p_t(z)
double reciprocal_strength(double z, const SystemParams& p) {
    return 1.0 / received_strength(z, p);
}

double rayleigh_tail_radius(const SystemParams& p, double log_mass) {
    // serving-distance mass beyond the returned radius is exp(log_mass)
    return std::sqrt(-log_mass / (kPi * p.bs_density));
}

}  // namespace

namespace detail {

double psi_real(double y_upper, double b, double delta) {
    if (y_upper <= 0.0 || b == 0.0) return 0.0;
    if (!(delta > 0.0 && delta < 1.0))
        throw std::domain_error("psi_real: delta must be in (0,1)");
    if (!(b > 0.0)) throw std::domain_error("psi_real: order must be positive");
    if (b * y_upper < 1e-9) {
        // two-term series around 0
        return b * std::pow(y_upper, 1.0 - delta) / (1.0 - delta) -
               0.5 * b * (b + 1.0) * std::pow(y_upper, 2.0 - delta) / (2.0 - delta);
    }
    const double w = y_upper / (1.0 + y_upper);
    const double ln_beta =
        std::lgamma(1.0 - delta) + std::lgamma(delta + b) - std::lgamma(1.0 + b);
    const double reg = num::regularized_incomplete_beta(w, 1.0 - delta, delta + b);
    const double head =
        -std::pow(y_upper, -delta) * -std::expm1(-b * std::log1p(y_upper)) / delta;
    return head + (b / delta) * std::exp(ln_beta) * reg;
}

complex<double> psi_complex(double y_upper, complex<double> b, double delta,
                            double rel_tol) {
    if (y_upper <= 0.0 || b == complex<double>(0.0, 0.0)) return {0.0, 0.0};
    const double mag_b = std::abs(b);
    const double s_upper = std::log(y_upper);

    // below s0 the integrand is b e^{(1-delta)s} to relative 1e-8; use the
    // two-term series there
    double s0 = std::log(1e-8 / mag_b);
    if (s0 > s_upper) s0 = s_upper;
    const double y0 = std::exp(s0);
    complex<double> psi = b * std::pow(y0, 1.0 - delta) / (1.0 - delta) -
                          0.5 * b * (b + 1.0) * std::pow(y0, 2.0 - delta) / (2.0 - delta);
    if (s0 >= s_upper) return psi;

    num::IntegrateOptions opt;
    opt.rel_tol = rel_tol;
    opt.abs_tol = 1e-14;
    auto integrand = [&](double s) -> complex<double> {
        const double tau = std::log1p(std::exp(s));
        return std::exp(-delta * s) * (1.0 - std::exp(-b * tau));
    };
    const auto r = num::integrate_complex(integrand, s0, s_upper, opt);
    if (!r.converged)
        throw num::convergence_error("psi_complex quadrature did not converge",
                                     std::abs(r.value), r.abs_error_estimate);
    return psi + r.value;
}

namespace {

template <typename Value, typename PsiFn>
Value pgfl_exponent_impl(double c, const SystemParams& p, double rel_tol,
                         const PsiFn& psi_at) {
    const double delta = 2.0 / p.alpha;
    const double x_hi = rayleigh_tail_radius(p, std::log(1e-16));
    num::IntegrateOptions opt;
    opt.rel_tol = rel_tol;
    opt.abs_tol = 1e-14;

    auto integrand = [&](double x) -> Value {
        if (x <= 0.0) return Value{};
        const double pw = transmit_power(x, p);
        if (pw <= 0.0) return Value{};
        const double strength = pw * std::pow(x, -p.alpha);
        const double weight =
            2.0 * kPi * p.bs_density * x * std::exp(-kPi * p.bs_density * x * x);
        return weight * std::pow(c * pw, delta) * psi_at(c * strength);
    };

    if constexpr (std::is_same_v<Value, double>) {
        const double v = num::integrate_or_throw(integrand, 0.0, x_hi, opt,
                                                 "pgfl exponent (real order)");
        return 2.0 * kPi * p.bs_density / p.alpha * v;
    } else {
        const auto r = num::integrate_complex(integrand, 0.0, x_hi, opt);
        if (!r.converged)
            throw num::convergence_error("pgfl exponent (complex order) did not converge",
                                         std::abs(r.value), r.abs_error_estimate);
        return 2.0 * kPi * p.bs_density / p.alpha * r.value;
    }
}

}  // namespace

double pgfl_exponent_real(double c, double b, const SystemParams& params,
                          double rel_tol) {
    if (c <= 0.0 || b == 0.0) return 0.0;
    const double delta = 2.0 / params.alpha;
    return pgfl_exponent_impl<double>(
        c, params, rel_tol, [&](double y) { return psi_real(y, b, delta); });
}

complex<double> pgfl_exponent(double c, complex<double> b, const SystemParams& params,
                              double rel_tol) {
    if (c <= 0.0 || b == complex<double>(0.0, 0.0)) return {0.0, 0.0};
    if (b.imag() == 0.0 && b.real() > 0.0)
        return {pgfl_exponent_real(c, b.real(), params, rel_tol), 0.0};
    const double delta = 2.0 / params.alpha;
    return pgfl_exponent_impl<complex<double>>(
        c, params, rel_tol,
        [&](double y) { return psi_complex(y, b, delta, rel_tol * 0.1); });
}

}  // namespace detail

complex<double> laplace_interference(complex<double> s, const SystemParams& params,
                                     double rel_tol) {
    params.validate();
    if (s.real() < 0.0)
        throw std::domain_error("laplace_interference: Re(s) must be >= 0");
    if (s == complex<double>(0.0, 0.0)) return {1.0, 0.0};

    const double lam = params.bs_density;
    const double x_hi = rayleigh_tail_radius(params, std::log(1e-16));
    num::IntegrateOptions inner_opt;
    inner_opt.rel_tol = rel_tol * 0.1;
    inner_opt.abs_tol = 1e-15;
    num::IntegrateOptions outer_opt;
    outer_opt.rel_tol = rel_tol;
    outer_opt.abs_tol = 1e-14;

    auto inner = [&](double r) -> complex<double> {
        const double r_alpha = std::pow(r, params.alpha);
        auto f = [&](double x) -> complex<double> {
            const double pw = transmit_power(x, params);
            if (pw <= 0.0) return {0.0, 0.0};
            const complex<double> v = s * pw / r_alpha;
            const double weight = 2.0 * kPi * lam * x * std::exp(-kPi * lam * x * x);
            return weight * (v / (1.0 + v));
        };
        const auto q = num::integrate_complex(f, 0.0, std::min(r, x_hi), inner_opt);
        if (!q.converged)
            throw num::convergence_error("interference Laplace inner integral",
                                         std::abs(q.value), q.abs_error_estimate);
        return q.value;
    };

    const auto outer = num::integrate_complex(
        [&](double r) { return r * inner(r); }, 0.0, num::kInf, outer_opt);
    if (!outer.converged)
        throw num::convergence_error("interference Laplace outer integral",
                                     std::abs(outer.value), outer.abs_error_estimate);
    return std::exp(-2.0 * kPi * lam * outer.value);
}

MomentValue moment_b(double theta, complex<double> b, const SystemParams& params,
                     MomentKernel kernel, double rel_tol) {
    params.validate();
    if (!(theta > 0.0)) throw std::domain_error("moment_b: theta must be > 0");
    MomentValue out;
    out.order = b;
    out.theta = theta;
    if (b == complex<double>(0.0, 0.0)) {
        out.value = 1.0;
        return out;
    }

    const double z_hi = rayleigh_tail_radius(params, std::log(1e-15));
    const double sigma2 = params.noise_w;
    num::IntegrateOptions opt;
    opt.rel_tol = rel_tol;
    opt.abs_tol = 1e-12;

    const bool real_order = b.imag() == 0.0 && b.real() > 0.0;

    auto interference_factor = [&](double kappa1) -> complex<double> {
        if (kernel == MomentKernel::laplace_rescaled) {
            return laplace_interference(b * kappa1, params, rel_tol * 0.1);
        }
        return std::exp(-detail::pgfl_exponent(kappa1, b, params, rel_tol * 0.1));
    };

    auto integrand = [&](double z) -> complex<double> {
        if (z <= 0.0) return {0.0, 0.0};
        const double kappa1 = theta * reciprocal_strength(z, params);
        return serving_distance_pdf(z, params) * std::exp(-b * kappa1 * sigma2) *
               interference_factor(kappa1);
    };

    if (real_order && kernel == MomentKernel::pgfl_exact) {
        const double v = num::integrate_or_throw(
            [&](double z) {
                if (z <= 0.0) return 0.0;
                const double kappa1 = theta * reciprocal_strength(z, params);
                const double expo =
                    detail::pgfl_exponent_real(kappa1, b.real(), params, rel_tol * 0.1) +
                    b.real() * kappa1 * sigma2;
                return serving_distance_pdf(z, params) * std::exp(-expo);
            },
            0.0, z_hi, opt, "moment outer integral");
        out.value = v;
        return out;
    }

    const auto r = num::integrate_complex(integrand, 0.0, z_hi, opt);
    if (!r.converged)
        throw num::convergence_error("moment outer integral did not converge",
                                     std::abs(r.value), r.abs_error_estimate);
    out.value = r.value;
    return out;
}

double moment_real(double theta, double b, const SystemParams& params,
                   MomentKernel kernel, double rel_tol) {
    if (b < 0.0) throw std::domain_error("moment_real: order must be >= 0");
    const auto m = moment_b(theta, {b, 0.0}, params, kernel, rel_tol);
    if (std::abs(m.value.imag()) > 1e-8 * std::max(1.0, std::abs(m.value.real())))
        throw std::runtime_error("moment_real: non-negligible imaginary part");
    return m.value.real();
}

BetaShape beta_shape_from_moments(double m1, double m2) {
    if (!(m1 > 0.0 && m1 < 1.0))
        throw std::domain_error("beta_shape_from_moments: M1 must lie in (0,1)");
    if (!(m2 > 0.0) || m2 > m1)
        throw std::domain_error("beta_shape_from_moments: moment inconsistency, need 0 < M2 <= M1");
    const double var = m2 - m1 * m1;
    if (!(var > 0.0))
        throw std::domain_error(
            "beta_shape_from_moments: non-positive variance estimate (M2 <= M1^2)");
    BetaShape shape;
    shape.a = m1 * (m1 - m2) / var;
    shape.b = (m1 - m2) * (1.0 - m1) / var;
    if (!(shape.a > 0.0) || !(shape.b > 0.0))
        throw std::domain_error("beta_shape_from_moments: degenerate shape parameters");
    return shape;
}

double beta_meta_from_moments(double m1, double m2, double gamma) {
    if (!(gamma > 0.0 && gamma < 1.0))
        throw std::domain_error("beta_meta: gamma must be in (0,1)");
    const BetaShape s = beta_shape_from_moments(m1, m2);
    return 1.0 - num::regularized_incomplete_beta(gamma, s.a, s.b);
}

double beta_meta(double theta, double gamma, const SystemParams& params,
                 MomentKernel kernel) {
    const double m1 = moment_real(theta, 1.0, params, kernel);
    const double m2 = moment_real(theta, 2.0, params, kernel);
    return beta_meta_from_moments(m1, m2, gamma);
}

}  // namespace upmeta

#pragma once

// Regularized incomplete beta I_x(a,b) via the standard continued fraction
// (modified Lentz), with the symmetry switch at x > (a+1)/(a+b+2), and the
// regularized lower incomplete gamma P(a,x) (series / continued fraction).

#include <cmath>
#include <stdexcept>

namespace upmeta::num {

namespace detail {

inline double beta_cf(double x, double a, double b) {
    constexpr int max_iter = 400;
    constexpr double eps = 1e-16;
    constexpr double fpmin = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < fpmin) d = fpmin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::abs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::abs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < eps) return h;
    }
    throw std::runtime_error("regularized_incomplete_beta: continued fraction failed");
}

}  // namespace detail

inline double regularized_incomplete_beta(double x, double a, double b) {
    if (!(a > 0.0) || !(b > 0.0))
        throw std::domain_error("regularized_incomplete_beta: a,b must be > 0");
    if (!(x >= 0.0 && x <= 1.0))
        throw std::domain_error("regularized_incomplete_beta: x outside [0,1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;

    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * detail::beta_cf(x, a, b) / a;
    }
    return 1.0 - front * detail::beta_cf(1.0 - x, b, a) / b;
}

/// Regularized lower incomplete gamma P(a,x) = gamma(a,x) / Gamma(a).
inline double lower_gamma_regularized(double a, double x) {
    if (!(a > 0.0)) throw std::domain_error("lower_gamma_regularized: a must be > 0");
    if (x < 0.0) throw std::domain_error("lower_gamma_regularized: x must be >= 0");
    if (x == 0.0) return 0.0;

    const double lga = std::lgamma(a);
    if (x < a + 1.0) {
        // series: P(a,x) = x^a e^{-x} / Gamma(a+1) * sum x^n / ((a+1)...(a+n))
        double ap = a;
        double sum = 1.0 / a;
        double term = sum;
        for (int n = 0; n < 500; ++n) {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if (std::abs(term) < std::abs(sum) * 1e-16)
                return sum * std::exp(-x + a * std::log(x) - lga);
        }
        throw std::runtime_error("lower_gamma_regularized: series failed");
    }
    // continued fraction for Q(a,x), Lentz
    constexpr double fpmin = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / fpmin;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < fpmin) d = fpmin;
        c = b + an / c;
        if (std::abs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) {
            const double q = std::exp(-x + a * std::log(x) - lga) * h;
            return 1.0 - q;
        }
    }
    throw std::runtime_error("lower_gamma_regularized: continued fraction failed");
}

}  // namespace upmeta::num

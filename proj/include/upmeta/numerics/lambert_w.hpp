#pragma once

// Principal branch of the Lambert W function, W0(x) e^{W0(x)} = x, for
// x >= -1/e, plus a log-domain form W0(e^y) for arguments too large to
// represent. Halley refinement after a branch-appropriate initial guess;
// the defining residual is driven below 1e-14 * max(1, |x|).

#include <cmath>
#include <stdexcept>

namespace upmeta::num {

namespace detail {

inline double halley_w(double w, double x) {
    for (int it = 0; it < 64; ++it) {
        const double ew = std::exp(w);
        const double f = w * ew - x;
        if (std::abs(f) <= 1e-14 * std::max(1.0, std::abs(x))) break;
        const double wp1 = w + 1.0;
        const double denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        const double dw = f / denom;
        w -= dw;
        if (std::abs(dw) <= 1e-16 * std::max(1.0, std::abs(w))) break;
    }
    return w;
}

// Solve w + log(w) = y by Newton; this is W0(e^y) without forming e^y.
inline double w_of_log(double y) {
    double w = y > 1.0 ? y - std::log(y) + std::log(y) / y : std::exp(y);
    if (w <= 0.0) w = 1e-300;
    for (int it = 0; it < 64; ++it) {
        const double f = w + std::log(w) - y;
        const double dw = f * w / (w + 1.0);
        w -= dw;
        if (w <= 0.0) w = 1e-300;
        if (std::abs(dw) <= 1e-16 * std::max(1.0, w)) break;
    }
    return w;
}

}  // namespace detail

inline double lambert_w0(double x) {
    constexpr double inv_e = 0.36787944117144232159552377016146;
    if (std::isnan(x) || x < -inv_e - 1e-15) {
        throw std::domain_error("lambert_w0: argument below -1/e");
    }
    if (x == 0.0) return 0.0;
    if (x <= -inv_e + 1e-16) return -1.0;

    double w;
    if (x < -0.25) {
        // series about the branch point in p = sqrt(2(1 + e x))
        const double p = std::sqrt(2.0 * (1.0 + 2.718281828459045235 * x));
        w = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p;
    } else if (x < 3.0) {
        w = x / (1.0 + x);  // crude, Halley does the rest
    } else {
        const double l1 = std::log(x);
        const double l2 = std::log(l1);
        w = l1 - l2 + l2 / l1;
    }
    if (w < -1.0) w = -1.0 + 1e-12;
    return detail::halley_w(w, x);
}

/// W0(e^y) for any real y; safe when e^y would overflow.
inline double lambert_w0_exp(double y) {
    if (std::isnan(y)) throw std::domain_error("lambert_w0_exp: NaN argument");
    if (y < 500.0) return lambert_w0(std::exp(y));
    return detail::w_of_log(y);
}

}  // namespace upmeta::num

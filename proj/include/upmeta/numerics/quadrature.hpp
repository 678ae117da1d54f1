#pragma once

// Adaptive Gauss-Kronrod quadrature (15-point Kronrod, embedded 7-point
// Gauss), real and complex valued, on finite or semi-infinite intervals.
// Semi-infinite ranges [a, inf) are mapped to [0,1) with x = a + u/(1-u).
//
// The worst-error interval is split first (QUADPACK-style global strategy),
// so integrable endpoint singularities converge without special casing.

#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

namespace upmeta::num {

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct convergence_error : std::runtime_error {
    double best_estimate;
    double error_estimate;
    convergence_error(const std::string& what, double best, double err)
        : std::runtime_error(what + " (best=" + std::to_string(best) +
                             ", err_estimate=" + std::to_string(err) + ")"),
          best_estimate(best),
          error_estimate(err) {}
};

template <typename Value>
struct BasicQuadratureResult {
    Value value{};
    double abs_error_estimate = 0.0;
    std::size_t evaluations = 0;
    bool converged = false;
};

using QuadratureResult = BasicQuadratureResult<double>;
using ComplexQuadratureResult = BasicQuadratureResult<std::complex<double>>;

namespace detail {

// Kronrod-15 abscissae/weights on [-1,1]; even nodes carry the embedded G7.
inline constexpr double kGK15Nodes[15] = {
    -0.991455371120812639206854697526329,
    -0.949107912342758524526189684047851,
    -0.864864423359769072789712788640926,
    -0.741531185599394439863864773280788,
    -0.586087235467691130294144838258730,
    -0.405845151377397166906606412076961,
    -0.207784955007898467600689403773245,
    0.0,
    0.207784955007898467600689403773245,
    0.405845151377397166906606412076961,
    0.586087235467691130294144838258730,
    0.741531185599394439863864773280788,
    0.864864423359769072789712788640926,
    0.949107912342758524526189684047851,
    0.991455371120812639206854697526329};

inline constexpr double kGK15Weights[15] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
    0.204432940075298892414161999234649,
    0.190350578064785409913256402421014,
    0.169004726639267902826583426598550,
    0.140653259715525918745189590510238,
    0.104790010322250183839876322541518,
    0.063092092629978553290700663189204,
    0.022935322010529224963732008058970};

inline constexpr double kG7Weights[7] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
    0.381830050505118944950369775488975,
    0.279705391489276667901467771423780,
    0.129484966168869693270611432679082};

inline double value_norm(double v) { return std::abs(v); }
inline double value_norm(const std::complex<double>& v) { return std::abs(v); }

template <typename Value, typename F>
void gk15(const F& f, double a, double b, Value& kronrod, double& err) {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    Value k{};
    Value g{};
    for (int i = 0; i < 15; ++i) {
        const Value fx = f(mid + half * kGK15Nodes[i]);
        k += kGK15Weights[i] * fx;
        if (i % 2 == 1) g += kG7Weights[i / 2] * fx;
    }
    kronrod = k * half;
    // |K15 - G7| estimates the embedded rule's error, which dominates the
    // Kronrod error; keeping it unscaled keeps the estimate conservative.
    err = value_norm((k - g) * half);
}

template <typename Value, typename F>
BasicQuadratureResult<Value> integrate_finite(F&& f, double a, double b, double abs_tol,
                                              double rel_tol, std::size_t max_evals) {
    struct Segment {
        double a, b, err;
        Value val;
        bool operator<(const Segment& o) const { return err < o.err; }
    };

    BasicQuadratureResult<Value> out;
    if (a == b) {
        out.converged = true;
        return out;
    }

    std::priority_queue<Segment> heap;
    Value total{};
    double total_err = 0.0;

    auto push = [&](double lo, double hi) {
        Segment s{lo, hi, 0.0, Value{}};
        gk15(f, lo, hi, s.val, s.err);
        out.evaluations += 15;
        total += s.val;
        total_err += s.err;
        heap.push(s);
    };

    push(a, b);
    const auto tol = [&]() { return std::max(abs_tol, rel_tol * value_norm(total)); };

    while (total_err > tol() && out.evaluations < max_evals) {
        Segment s = heap.top();
        heap.pop();
        total -= s.val;
        total_err -= s.err;
        const double mid = 0.5 * (s.a + s.b);
        if (mid <= s.a || mid >= s.b) {  // interval exhausted at double precision
            total += s.val;
            total_err += s.err;
            break;
        }
        push(s.a, mid);
        push(mid, s.b);
    }

    out.value = total;
    out.abs_error_estimate = total_err;
    out.converged = total_err <= tol();
    return out;
}

}  // namespace detail

struct IntegrateOptions {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    std::size_t max_evals = 200000;
};

/// Integrate a real-valued function over [a,b]; b may be +infinity.
template <typename F>
QuadratureResult integrate(F&& f, double a, double b,
                           const IntegrateOptions& opt = {}) {
    if (std::isinf(b)) {
        auto g = [&f, a](double u) {
            const double om = 1.0 - u;
            const double x = a + u / om;
            return f(x) / (om * om);
        };
        return detail::integrate_finite<double>(g, 0.0, 1.0, opt.abs_tol, opt.rel_tol,
                                                opt.max_evals);
    }
    return detail::integrate_finite<double>(f, a, b, opt.abs_tol, opt.rel_tol,
                                            opt.max_evals);
}

/// Complex-valued counterpart of integrate().
template <typename F>
ComplexQuadratureResult integrate_complex(F&& f, double a, double b,
                                          const IntegrateOptions& opt = {}) {
    using C = std::complex<double>;
    if (std::isinf(b)) {
        auto g = [&f, a](double u) {
            const double om = 1.0 - u;
            const double x = a + u / om;
            return f(x) / (om * om);
        };
        return detail::integrate_finite<C>(g, 0.0, 1.0, opt.abs_tol, opt.rel_tol,
                                           opt.max_evals);
    }
    return detail::integrate_finite<C>(f, a, b, opt.abs_tol, opt.rel_tol, opt.max_evals);
}

/// integrate() that throws convergence_error instead of returning a flag.
template <typename F>
double integrate_or_throw(F&& f, double a, double b, const IntegrateOptions& opt = {},
                          const char* context = "integral") {
    const auto r = integrate(std::forward<F>(f), a, b, opt);
    if (!r.converged) {
        throw convergence_error(std::string(context) + " did not converge", r.value,
                                r.abs_error_estimate);
    }
    return r.value;
}

// ---------------------------------------------------------------------------
// Fixed-order Gauss-Legendre rules (nodes computed once by Newton iteration on
// the Legendre polynomial; used for panel-based oscillatory sweeps where the
// panel count, not the rule order, controls accuracy).
// ---------------------------------------------------------------------------

struct GaussRule {
    std::vector<double> nodes;    // on [-1, 1]
    std::vector<double> weights;
};

inline const GaussRule& gauss_legendre(int n) {
    static thread_local std::vector<GaussRule> cache(64);
    if (n < 1 || n >= static_cast<int>(cache.size()))
        throw std::invalid_argument("gauss_legendre: order out of range");
    GaussRule& rule = cache[static_cast<std::size_t>(n)];
    if (!rule.nodes.empty()) return rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            const double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
        rule.weights[n - 1 - i] = rule.weights[i];
    }
    return rule;
}

}  // namespace upmeta::num

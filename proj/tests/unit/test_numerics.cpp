#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "upmeta/numerics/interp.hpp"
#include "upmeta/numerics/lambert_w.hpp"
#include "upmeta/numerics/quadrature.hpp"
#include "upmeta/numerics/rng.hpp"
#include "upmeta/numerics/roots.hpp"
#include "upmeta/numerics/special.hpp"

using namespace upmeta;

TEST_SUITE("numerics") {

TEST_CASE("quadrature: golden integrals") {
    num::IntegrateOptions opt;
    opt.abs_tol = 1e-12;
    opt.rel_tol = 1e-12;

    auto exp_decay = num::integrate([](double x) { return std::exp(-x); }, 0.0, num::kInf, opt);
    CHECK(exp_decay.converged);
    CHECK(exp_decay.value == doctest::Approx(1.0).epsilon(1e-10));

    num::IntegrateOptions loose;
    loose.abs_tol = 1e-9;
    loose.rel_tol = 1e-9;
    auto endpoint = num::integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, loose);
    CHECK(endpoint.converged);
    CHECK(endpoint.value == doctest::Approx(2.0).epsilon(1e-8));

    auto gauss = num::integrate([](double x) { return std::exp(-x * x); }, 0.0, num::kInf, opt);
    CHECK(gauss.value == doctest::Approx(std::sqrt(num::kPi) / 2.0).epsilon(1e-10));

    auto osc = num::integrate([](double x) { return std::sin(x); }, 0.0, num::kPi, opt);
    CHECK(osc.value == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("quadrature: complex integrand") {
    num::IntegrateOptions opt;
    opt.abs_tol = 1e-12;
    opt.rel_tol = 1e-12;
    // int_0^inf e^{-(1+2i)x} dx = 1/(1+2i)
    auto r = num::integrate_complex(
        [](double x) { return std::exp(-std::complex<double>(1.0, 2.0) * x); }, 0.0,
        num::kInf, opt);
    CHECK(r.converged);
    const std::complex<double> expect = 1.0 / std::complex<double>(1.0, 2.0);
    CHECK(std::abs(r.value - expect) < 1e-10);
}

TEST_CASE("quadrature: error estimates are conservative") {
    // randomized polynomials-times-exponential with closed-form integrals
    num::RandomStream rng(2024);
    int conservative = 0;
    const int trials = 200;
    for (int i = 0; i < trials; ++i) {
        const double a = rng.uniform(0.3, 3.0);
        const double c0 = rng.uniform(-2.0, 2.0);
        const double c1 = rng.uniform(-2.0, 2.0);
        const double c2 = rng.uniform(-2.0, 2.0);
        // int_0^inf (c0 + c1 x + c2 x^2) e^{-a x} dx
        const double exact = c0 / a + c1 / (a * a) + 2.0 * c2 / (a * a * a);
        num::IntegrateOptions opt;
        opt.abs_tol = 1e-9;
        opt.rel_tol = 1e-9;
        const auto r = num::integrate(
            [&](double x) { return (c0 + c1 * x + c2 * x * x) * std::exp(-a * x); }, 0.0,
            num::kInf, opt);
        if (std::abs(r.value - exact) <= std::max(r.abs_error_estimate, 1e-14))
            ++conservative;
    }
    CHECK(conservative >= trials * 99 / 100);
}

TEST_CASE("quadrature: non-convergence is reported, not hidden") {
    num::IntegrateOptions opt;
    opt.abs_tol = 1e-14;
    opt.rel_tol = 1e-14;
    opt.max_evals = 200;  // starve the subdivision
    const auto r = num::integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, opt);
    CHECK_FALSE(r.converged);
    CHECK(r.abs_error_estimate > 0.0);
    CHECK_THROWS_AS(num::integrate_or_throw([](double x) { return 1.0 / std::sqrt(x); },
                                            0.0, 1.0, opt),
                    num::convergence_error);
}

TEST_CASE("lambert_w0: anchors and identity") {
    CHECK(num::lambert_w0(0.0) == 0.0);
    CHECK(num::lambert_w0(std::exp(1.0)) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(num::lambert_w0(-std::exp(-1.0)) == doctest::Approx(-1.0).epsilon(1e-8));
    CHECK_THROWS_AS(num::lambert_w0(-1.0), std::domain_error);

    num::RandomStream rng(7);
    for (int i = 0; i < 2000; ++i) {
        const double x = std::exp(rng.uniform(std::log(1e-6), std::log(1e30)));
        const double w = num::lambert_w0(x);
        CHECK(std::abs(w * std::exp(w) - x) <= 1e-12 * std::max(1.0, x));
    }
    // near the branch point
    for (double eps : {1e-10, 1e-6, 1e-3}) {
        const double x = -std::exp(-1.0) + eps;
        const double w = num::lambert_w0(x);
        CHECK(std::abs(w * std::exp(w) - x) <= 1e-12);
    }
}

TEST_CASE("lambert_w0_exp: log-domain arguments beyond double range") {
    // W0(e^y) solves w + ln w = y
    for (double y : {-5.0, 1.0, 100.0, 700.0, 5000.0, 1e8}) {
        const double w = num::lambert_w0_exp(y);
        CHECK(std::abs(w + std::log(w) - y) <= 1e-12 * std::max(1.0, std::abs(y)));
    }
    // consistency with the linear-domain branch
    CHECK(num::lambert_w0_exp(2.0) ==
          doctest::Approx(num::lambert_w0(std::exp(2.0))).epsilon(1e-14));
}

TEST_CASE("regularized incomplete beta") {
    for (double x : {0.0, 0.1, 0.5, 0.9, 1.0})
        CHECK(num::regularized_incomplete_beta(x, 1.0, 1.0) == doctest::Approx(x).epsilon(1e-14));

    // symmetry I_x(a,b) = 1 - I_{1-x}(b,a)
    num::RandomStream rng(11);
    for (int i = 0; i < 500; ++i) {
        const double a = rng.uniform(0.1, 20.0);
        const double b = rng.uniform(0.1, 20.0);
        const double x = rng.uniform();
        const double lhs = num::regularized_incomplete_beta(x, a, b);
        const double rhs = 1.0 - num::regularized_incomplete_beta(1.0 - x, b, a);
        CHECK(std::abs(lhs - rhs) <= 1e-12);
    }

    // against direct quadrature of the defining integrand
    const double a = 2.5, b = 4.0, x = 0.3;
    num::IntegrateOptions opt;
    opt.abs_tol = 1e-13;
    opt.rel_tol = 1e-13;
    const double numer = num::integrate_or_throw(
        [&](double t) { return std::pow(t, a - 1.0) * std::pow(1.0 - t, b - 1.0); }, 0.0, x,
        opt);
    const double denom = std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
    CHECK(num::regularized_incomplete_beta(x, a, b) ==
          doctest::Approx(numer / denom).epsilon(1e-9));

    CHECK_THROWS_AS(num::regularized_incomplete_beta(0.5, -1.0, 2.0), std::domain_error);
    CHECK_THROWS_AS(num::regularized_incomplete_beta(1.5, 1.0, 2.0), std::domain_error);
}

TEST_CASE("lower incomplete gamma") {
    // P(1, x) = 1 - e^{-x}
    for (double x : {0.1, 1.0, 5.0, 30.0})
        CHECK(num::lower_gamma_regularized(1.0, x) ==
              doctest::Approx(-std::expm1(-x)).epsilon(1e-13));
    // against quadrature
    const double a = 1.8, x = 2.2;
    num::IntegrateOptions opt;
    opt.abs_tol = 1e-13;
    opt.rel_tol = 1e-13;
    const double numer = num::integrate_or_throw(
        [&](double t) { return std::pow(t, a - 1.0) * std::exp(-t); }, 0.0, x, opt);
    CHECK(num::lower_gamma_regularized(a, x) ==
          doctest::Approx(numer / std::tgamma(a)).epsilon(1e-11));
}

TEST_CASE("find_root_monotone") {
    CHECK(num::find_root_monotone([](double x) { return x - 1.0; }, 0.0, 2.0, 1e-12) ==
          doctest::Approx(1.0).epsilon(1e-10));
    CHECK(num::find_root_monotone([](double x) { return std::exp(-x) - 0.5; }, 0.0, 5.0,
                                  1e-14) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK_THROWS_AS(
        num::find_root_monotone([](double x) { return x + 10.0; }, 0.0, 1.0, 1e-12),
        num::bracket_error);
}

TEST_CASE("random streams: determinism and splitting") {
    num::RandomStream a(42), b(42);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

    num::RandomStream root(9);
    num::RandomStream c1 = root.split(1);
    num::RandomStream c2 = root.split(2);
    num::RandomStream c1_again = root.split(1);
    CHECK(c1.next_u64() == c1_again.next_u64());
    CHECK(c1.next_u64() != c2.next_u64());

    // uniform moments sanity
    num::RandomStream u(123);
    double sum = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) sum += u.uniform();
    CHECK(std::abs(sum / n - 0.5) < 0.005);

    // Poisson mean
    num::RandomStream p(5);
    double count = 0.0;
    for (int i = 0; i < 20000; ++i) count += p.poisson(7.5);
    CHECK(std::abs(count / 20000 - 7.5) < 3.0 * std::sqrt(7.5 / 20000));
}

TEST_CASE("monotone cubic interpolation stays monotone") {
    std::vector<double> x = {0.0, 1.0, 2.0, 3.0, 4.0, 5.0};
    std::vector<double> y = {0.0, 0.1, 0.15, 2.0, 2.05, 2.1};
    num::MonotoneCubic mc(x, y);
    double prev = mc(0.0);
    for (double t = 0.01; t <= 5.0; t += 0.01) {
        const double v = mc(t);
        CHECK(v >= prev - 1e-12);
        prev = v;
    }
    for (std::size_t i = 0; i < x.size(); ++i)
        CHECK(mc(x[i]) == doctest::Approx(y[i]).epsilon(1e-14));
}

}  // TEST_SUITE

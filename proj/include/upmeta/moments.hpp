#pragma once

// Interference Laplace transform, b-th moments of the conditional success
// probability (complex order allowed), the two-moment beta approximation,
// and Gil-Pelaez inversion over imaginary moments.
//
// Two moment kernels are exposed. laplace_rescaled applies the first-moment
// Laplace transform at the order-scaled argument kappa_b = b kappa_1;
// pgfl_exact carries the full (1+v)^{-b} point-process averaging and is the
// default everywhere a moment order other than 1 matters. The two coincide
// at b = 1.

#include <complex>
#include <map>
#include <memory>
#include <vector>

#include "upmeta/system_params.hpp"

namespace upmeta {

/// Laplace transform of the aggregate uplink interference at the victim BS,
/// valid for Re(s) >= 0. Real and decreasing on the real axis, L(0) = 1.
std::complex<double> laplace_interference(std::complex<double> s,
                                          const SystemParams& params,
                                          double rel_tol = 1e-8);

enum class MomentKernel { laplace_rescaled, pgfl_exact };

struct MomentValue {
    std::complex<double> order;
    double theta = 0.0;
    std::complex<double> value;
};

MomentValue moment_b(double theta, std::complex<double> b, const SystemParams& params,
                     MomentKernel kernel = MomentKernel::pgfl_exact,
                     double rel_tol = 1e-8);

/// Real-order convenience wrapper; checks the imaginary part is numerical
/// noise and returns the real part.
double moment_real(double theta, double b, const SystemParams& params,
                   MomentKernel kernel = MomentKernel::pgfl_exact,
                   double rel_tol = 1e-8);

struct BetaShape {
    double a = 0.0;
    double b = 0.0;
};

/// Matches a beta distribution to the first two moments. Throws
/// std::domain_error on a non-positive variance estimate or M2 > M1.
BetaShape beta_shape_from_moments(double m1, double m2);

double beta_meta_from_moments(double m1, double m2, double gamma);

double beta_meta(double theta, double gamma, const SystemParams& params,
                 MomentKernel kernel = MomentKernel::pgfl_exact);

struct GilPelaezOptions {
    double envelope_tol = 1e-4;  // stop when max |M_jt|/t over the last decade drops below
    double t_max = 4000.0;       // hard truncation; exceeding it is an error
    double panel_tol = 2e-5;     // per-panel absolute tolerance of the t quadrature
    int z_nodes = 320;           // moment-table resolution along the serving distance
    int x_nodes_per_decade = 24; // inner (interferer link) resolution
    double dead_exponent = 13.0; // skip regions with Re(exponent) above this
    unsigned threads = 0;        // worker threads for uncached moment nodes
};

struct GilPelaezResult {
    double value = 0.0;       // clamped into [0, 1]
    double raw_value = 0.0;   // before clamping
    double tail_bound = 0.0;  // envelope estimate of the truncated tail
    double t_used = 0.0;
    bool converged = false;
};

namespace detail {
class ImaginaryMomentTable;
}

/// Caches imaginary moments M_jt for one (theta, params) pair and evaluates
/// the Gil-Pelaez integral for any gamma. Moment nodes are shared across
/// gamma values.
class GilPelaezEvaluator {
  public:
    GilPelaezEvaluator(double theta, const SystemParams& params,
                       GilPelaezOptions options = {});
    ~GilPelaezEvaluator();

    GilPelaezEvaluator(const GilPelaezEvaluator&) = delete;
    GilPelaezEvaluator& operator=(const GilPelaezEvaluator&) = delete;

    double theta() const { return theta_; }

    /// Imaginary moment M_jt at this evaluator's theta (cached).
    std::complex<double> imaginary_moment(double t);

    GilPelaezResult meta_result(double gamma);

    /// meta_result() that throws num::convergence_error when the envelope
    /// criterion is not met by t_max.
    double meta(double gamma);

  private:
    double theta_;
    SystemParams params_;
    GilPelaezOptions options_;
    std::unique_ptr<detail::ImaginaryMomentTable> table_;
    std::map<double, std::complex<double>> cache_;
    double phase_rate_ = 0.0;  // small-t phase speed of M_jt, for panel sizing
};

double gil_pelaez_meta(double theta, double gamma, const SystemParams& params,
                       GilPelaezOptions options = {});

namespace detail {

/// Kernel primitive Psi_b(Y) = int_0^Y y^{-delta-1} (1 - (1+y)^{-b}) dy with
/// delta = 2/alpha; closed form via the incomplete beta for real b >= 0,
/// quadrature in log space for complex b.
double psi_real(double y_upper, double b, double delta);
std::complex<double> psi_complex(double y_upper, std::complex<double> b, double delta,
                                 double rel_tol = 1e-10);

/// PGFL exponent E(c, b): minus the log of the interference factor of the
/// b-th moment at kappa_1 = c.
std::complex<double> pgfl_exponent(double c, std::complex<double> b,
                                   const SystemParams& params, double rel_tol = 1e-9);
double pgfl_exponent_real(double c, double b, const SystemParams& params,
                          double rel_tol = 1e-10);

}  // namespace detail

}  // namespace upmeta

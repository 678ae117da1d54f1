#pragma once

// Ground-truth Monte-Carlo simulator: PPP base stations with one BS pinned
// at the origin (Palm conditioning), one uplink user drawn uniformly in each
// Voronoi cell, truncated fractional power control, Rayleigh fading.
//
// The default conditional-success estimator is the closed product over
// interferers (exact under unit-mean exponential fading given the point
// pattern); the literal repeated-fading protocol is available as a mode.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "upmeta/numerics/rng.hpp"
#include "upmeta/system_params.hpp"

namespace upmeta {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

struct Realization {
    std::vector<Point> bs;  // bs[0] is the typical BS at the origin
    std::vector<Point> ue;  // index-aligned with bs; ue[0] is the tagged user
    int typical_bs_index = 0;
    double window_radius_m = 0.0;
    Point window_center;  // sampling-window center relative to the typical BS
    bool typical_interior = true;
    int sample_attempts = 1;  // network-level resamples consumed

    /// Checks the construction invariants: typical BS at the origin and every
    /// UE nearest to its own BS. Throws std::logic_error on violation.
    void validate() const;
};

struct SimConfig {
    int n_realizations = 100;
    double window_radius_m = 0.0;  // 0 = auto
    std::uint64_t seed = 1;
    enum class Estimator { analytic_conditional, fading_draws };
    Estimator estimator = Estimator::analytic_conditional;
    int fading_draws = 10000;
    double guard_margin_m = 0.0;  // 0 = auto
    unsigned threads = 0;

    double resolved_guard(const SystemParams& params) const;
    double resolved_window(const SystemParams& params) const;
    void validate(const SystemParams& params) const;
};

/// One Palm-conditioned network draw. Cells that rejection sampling fails to
/// populate within the attempt budget trigger a full resample (counted in
/// sample_attempts).
Realization sample_network(const SystemParams& params, const SimConfig& cfg,
                           num::RandomStream& stream);

/// P(SINR > theta | realization): exact product over interferers under
/// Rayleigh fading.
double conditional_success(const Realization& real, double theta,
                           const SystemParams& params);

/// Empirical fraction over n independent fading vectors (one SINR draw is
/// compared against every theta in the grid).
std::vector<double> conditional_success_fading(const Realization& real,
                                               std::span<const double> thetas,
                                               const SystemParams& params, int n_draws,
                                               num::RandomStream& stream);

struct EmpiricalMeta {
    std::vector<double> theta_grid;  // linear
    std::vector<double> gamma_grid;
    std::vector<std::vector<double>> value;  // [theta][gamma]
    std::vector<std::vector<double>> ci_halfwidth;  // Wilson, z = 1.96
    int n_realizations = 0;
    int total_sample_attempts = 0;

    double at(std::size_t ti, std::size_t gi) const { return value[ti][gi]; }
};

/// Fraction of realizations whose conditional success probability exceeds
/// gamma, per (theta, gamma) cell. Deterministic for a fixed (seed, config).
EmpiricalMeta empirical_meta(const SystemParams& params, const SimConfig& cfg,
                             std::span<const double> theta_grid,
                             std::span<const double> gamma_grid);

struct InterferenceDraw {
    double total_w = 0.0;
    double residual_w = 0.0;  // excluding the nearest interferer
    double nearest_w = 0.0;
    int n_interferers = 0;
};

/// One draw of the aggregate interference under the analysis model: radii
/// from the thinned (non-homogeneous) PPP, link lengths truncated-Rayleigh,
/// powers through the truncated control law, unit-mean exponential fading.
/// When d1 is given the nearest interferer is pinned at that distance and the
/// rest are drawn beyond it. out_radii, when non-null, receives the accepted
/// interferer radii (instrumentation for distribution tests).
InterferenceDraw sample_nonhomogeneous_interference(const SystemParams& params,
                                                    num::RandomStream& stream,
                                                    double r_max_m,
                                                    std::optional<double> d1_m = {},
                                                    std::vector<double>* out_radii = nullptr);

struct MomentEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    int n = 0;
};

/// Sample mean of P_s(theta)^b across realizations.
MomentEstimate empirical_moment(const SystemParams& params, const SimConfig& cfg,
                                double theta, double b);

/// Restriction of a realization to a smaller window around the typical BS:
/// keeps every BS inside the new radius and redraws only the users whose
/// cells changed. Couples large- and small-window runs for edge-effect
/// studies.
Realization restrict_window(const Realization& real, double new_radius_m,
                            num::RandomStream& stream);

/// CSV dump, columns: kind(bs|ue), x_m, y_m.
void write_realization_csv(const Realization& real, std::ostream& os);

}  // namespace upmeta

#include "upmeta/mc_sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "upmeta/core_model.hpp"
#include "upmeta/numerics/parallel.hpp"
#include "upmeta/numerics/quadrature.hpp"

namespace upmeta {

using num::kPi;

namespace {

double dist2(const Point& a, const Point& b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return dx * dx + dy * dy;
}

double norm(const Point& a) { return std::sqrt(a.x * a.x + a.y * a.y); }

int nearest_bs(const std::vector<Point>& bs, const Point& p) {
    int best = 0;
    double best_d = dist2(bs[0], p);
    for (std::size_t k = 1; k < bs.size(); ++k) {
        const double d = dist2(bs[k], p);
        if (d < best_d) {
            best_d = d;
            best = static_cast<int>(k);
        }
    }
    return best;
}

// Circumradius of the origin BS's Voronoi cell by half-plane clipping against
// neighbours in distance order; neighbours whose bisector cannot reach the
// current circumradius are skipped.
double origin_cell_circumradius(const std::vector<Point>& bs, double window_radius) {
    struct Vec {
        double x, y;
    };
    std::vector<Vec> poly = {{window_radius * 1.05, window_radius * 1.05},
                             {-window_radius * 1.05, window_radius * 1.05},
                             {-window_radius * 1.05, -window_radius * 1.05},
                             {window_radius * 1.05, -window_radius * 1.05}};

    std::vector<std::pair<double, std::size_t>> order;
    order.reserve(bs.size());
    for (std::size_t k = 1; k < bs.size(); ++k)
        order.emplace_back(bs[k].x * bs[k].x + bs[k].y * bs[k].y, k);
    std::sort(order.begin(), order.end());

    auto circumradius = [&]() {
        double r2 = 0.0;
        for (const auto& v : poly) r2 = std::max(r2, v.x * v.x + v.y * v.y);
        return std::sqrt(r2);
    };

    double circ = circumradius();
    for (const auto& [d2, k] : order) {
        if (0.5 * std::sqrt(d2) > circ) break;
        // keep the side with p . b <= |b|^2 / 2
        const double bx = bs[k].x, by = bs[k].y;
        const double rhs = 0.5 * d2;
        std::vector<Vec> next;
        next.reserve(poly.size() + 1);
        const std::size_t n = poly.size();
        for (std::size_t i = 0; i < n; ++i) {
            const Vec& cur = poly[i];
            const Vec& nxt = poly[(i + 1) % n];
            const double f_cur = cur.x * bx + cur.y * by - rhs;
            const double f_nxt = nxt.x * bx + nxt.y * by - rhs;
            if (f_cur <= 0.0) next.push_back(cur);
            if ((f_cur < 0.0 && f_nxt > 0.0) || (f_cur > 0.0 && f_nxt < 0.0)) {
                const double s = f_cur / (f_cur - f_nxt);
                next.push_back({cur.x + s * (nxt.x - cur.x), cur.y + s * (nxt.y - cur.y)});
            }
        }
        poly.swap(next);
        if (poly.empty()) return 0.0;
        circ = circumradius();
    }
    return circ;
}

// The typical link is generated from the user side: a tagged user sits at
// the window center, its serving BS is the nearest point of a plain PPP, and
// the whole pattern is then translated so that this BS becomes the origin.
// This reproduces the Rayleigh serving-distance law exactly; pinning a BS at
// the origin and drawing its user uniformly in the cell would sample the
// (smaller) typical cell instead and biases the meta distribution upward.
bool try_sample_network(const SystemParams& params, const SimConfig& cfg,
                        num::RandomStream& stream, Realization& out) {
    const double window = cfg.resolved_window(params);
    const double guard = cfg.resolved_guard(params);

    out.bs.clear();
    out.ue.clear();
    out.window_radius_m = window;
    out.typical_bs_index = 0;

    const int count = stream.poisson(params.bs_density * kPi * window * window);
    if (count == 0) return false;
    out.bs.resize(static_cast<std::size_t>(count));
    for (auto& b : out.bs) stream.uniform_in_disk(window, b.x, b.y);

    // serving BS of the tagged user at the window center
    const int serving = nearest_bs(out.bs, Point{0.0, 0.0});
    std::swap(out.bs[0], out.bs[static_cast<std::size_t>(serving)]);

    const std::size_t n = out.bs.size();
    out.ue.assign(n, Point{});
    std::vector<char> has_ue(n, 0);
    has_ue[0] = 1;  // the tagged user itself, at the pre-shift origin
    std::size_t missing = n - 1;
    const long attempt_budget = 4000L * static_cast<long>(n) + 100000L;
    for (long attempt = 0; attempt < attempt_budget && missing > 0; ++attempt) {
        Point p;
        stream.uniform_in_disk(window, p.x, p.y);
        const int k = nearest_bs(out.bs, p);
        if (!has_ue[static_cast<std::size_t>(k)]) {
            has_ue[static_cast<std::size_t>(k)] = 1;
            out.ue[static_cast<std::size_t>(k)] = p;
            --missing;
        }
    }
    if (missing > 0) return false;  // pathological rejection, caller resamples

    // translate so the serving BS is the origin
    const Point shift = out.bs[0];
    for (auto& b : out.bs) {
        b.x -= shift.x;
        b.y -= shift.y;
    }
    for (auto& u : out.ue) {
        u.x -= shift.x;
        u.y -= shift.y;
    }
    out.bs[0] = {0.0, 0.0};
    out.window_center = {-shift.x, -shift.y};

    // the disk of this radius around the typical BS is fully covered by the
    // sampling window
    const double covered = window - std::hypot(shift.x, shift.y);
    const double circ = origin_cell_circumradius(out.bs, window);
    out.typical_interior = 2.0 * circ <= covered - guard;
    return out.typical_interior;
}

}  // namespace

void Realization::validate() const {
    if (bs.empty() || bs.size() != ue.size())
        throw std::logic_error("Realization: BS/UE lists empty or misaligned");
    if (typical_bs_index != 0 || bs[0].x != 0.0 || bs[0].y != 0.0)
        throw std::logic_error("Realization: typical BS must be at the origin");
    for (std::size_t k = 0; k < bs.size(); ++k) {
        if (nearest_bs(bs, ue[k]) != static_cast<int>(k))
            throw std::logic_error("Realization: UE not in its BS's Voronoi cell");
    }
}

double SimConfig::resolved_guard(const SystemParams& params) const {
    if (guard_margin_m > 0.0) return guard_margin_m;
    return 1.0 / std::sqrt(kPi * params.bs_density);
}

double SimConfig::resolved_window(const SystemParams& params) const {
    if (window_radius_m > 0.0) return window_radius_m;
    return 15.0 / std::sqrt(kPi * params.bs_density);
}

void SimConfig::validate(const SystemParams& params) const {
    params.validate();
    if (n_realizations <= 0) throw std::invalid_argument("SimConfig: n_realizations must be > 0");
    if (estimator == Estimator::fading_draws && fading_draws <= 0)
        throw std::invalid_argument("SimConfig: fading_draws must be > 0");
    const double mean_cell_radius = 0.5 / std::sqrt(params.bs_density);
    if (resolved_window(params) < 10.0 * mean_cell_radius + resolved_guard(params))
        throw std::invalid_argument(
            "SimConfig: window must cover >= 10 mean cell radii plus the guard margin");
}

Realization sample_network(const SystemParams& params, const SimConfig& cfg,
                           num::RandomStream& stream) {
    cfg.validate(params);
    Realization real;
    const num::RandomStream base(stream.next_u64());  // advance the caller's stream
    for (int attempt = 0; attempt < 64; ++attempt) {
        num::RandomStream sub = base.split(static_cast<std::uint64_t>(attempt));
        if (try_sample_network(params, cfg, sub, real)) {
            real.sample_attempts = attempt + 1;
            return real;
        }
    }
    throw std::runtime_error("sample_network: could not draw an interior realization");
}

double conditional_success(const Realization& real, double theta,
                           const SystemParams& params) {
    if (theta < 0.0) throw std::domain_error("conditional_success: theta must be >= 0");
    if (theta == 0.0) return 1.0;
    const double r_u = norm(real.ue[0]);
    const double x = received_strength(r_u, params);
    double log_p = -theta * params.noise_w / x;
    for (std::size_t k = 1; k < real.ue.size(); ++k) {
        const double r_i = std::sqrt(dist2(real.ue[k], real.bs[k]));
        const double d_i = norm(real.ue[k]);
        const double q = transmit_power(r_i, params) * std::pow(d_i, -params.alpha);
        log_p -= std::log1p(theta * q / x);
    }
    return std::exp(log_p);
}

std::vector<double> conditional_success_fading(const Realization& real,
                                               std::span<const double> thetas,
                                               const SystemParams& params, int n_draws,
                                               num::RandomStream& stream) {
    if (n_draws <= 0) throw std::invalid_argument("conditional_success_fading: n_draws must be > 0");
    const double r_u = norm(real.ue[0]);
    const double x = received_strength(r_u, params);

    std::vector<double> q;
    q.reserve(real.ue.size() - 1);
    for (std::size_t k = 1; k < real.ue.size(); ++k) {
        const double r_i = std::sqrt(dist2(real.ue[k], real.bs[k]));
        const double d_i = norm(real.ue[k]);
        q.push_back(transmit_power(r_i, params) * std::pow(d_i, -params.alpha));
    }

    std::vector<long> hits(thetas.size(), 0);
    for (int d = 0; d < n_draws; ++d) {
        const double h0 = stream.exponential();
        double interference = 0.0;
        for (const double qi : q) interference += stream.exponential() * qi;
        const double sinr = h0 * x / (params.noise_w + interference);
        for (std::size_t t = 0; t < thetas.size(); ++t)
            if (sinr > thetas[t]) ++hits[t];
    }
    std::vector<double> out(thetas.size());
    for (std::size_t t = 0; t < thetas.size(); ++t)
        out[t] = static_cast<double>(hits[t]) / n_draws;
    return out;
}

EmpiricalMeta empirical_meta(const SystemParams& params, const SimConfig& cfg,
                             std::span<const double> theta_grid,
                             std::span<const double> gamma_grid) {
    cfg.validate(params);
    if (theta_grid.empty() || gamma_grid.empty())
        throw std::invalid_argument("empirical_meta: grids must be nonempty");

    const num::RandomStream root(cfg.seed);
    const std::size_t n = static_cast<std::size_t>(cfg.n_realizations);
    std::vector<std::vector<double>> ps(n);
    std::vector<int> attempts(n, 0);

    num::parallel_for(
        n,
        [&](std::size_t i) {
            num::RandomStream stream = root.split(i);
            Realization real = sample_network(params, cfg, stream);
            attempts[i] = real.sample_attempts;
            if (cfg.estimator == SimConfig::Estimator::fading_draws) {
                num::RandomStream fading = stream.split(0xFAD1'0000ull);
                ps[i] = conditional_success_fading(real, theta_grid, params,
                                                   cfg.fading_draws, fading);
            } else {
                ps[i].resize(theta_grid.size());
                for (std::size_t t = 0; t < theta_grid.size(); ++t)
                    ps[i][t] = conditional_success(real, theta_grid[t], params);
            }
        },
        cfg.threads);

    EmpiricalMeta out;
    out.theta_grid.assign(theta_grid.begin(), theta_grid.end());
    out.gamma_grid.assign(gamma_grid.begin(), gamma_grid.end());
    out.n_realizations = cfg.n_realizations;
    for (int a : attempts) out.total_sample_attempts += a;

    const double z = 1.959963984540054;  // 95% Wilson
    out.value.assign(theta_grid.size(), std::vector<double>(gamma_grid.size(), 0.0));
    out.ci_halfwidth = out.value;
    for (std::size_t t = 0; t < theta_grid.size(); ++t) {
        for (std::size_t g = 0; g < gamma_grid.size(); ++g) {
            long count = 0;
            for (std::size_t i = 0; i < n; ++i)
                if (ps[i][t] > gamma_grid[g]) ++count;
            const double nn = static_cast<double>(n);
            const double p = static_cast<double>(count) / nn;
            out.value[t][g] = p;
            const double denom = 1.0 + z * z / nn;
            out.ci_halfwidth[t][g] =
                z * std::sqrt(p * (1.0 - p) / nn + z * z / (4.0 * nn * nn)) / denom;
        }
    }
    return out;
}

InterferenceDraw sample_nonhomogeneous_interference(const SystemParams& params,
                                                    num::RandomStream& stream,
                                                    double r_max_m,
                                                    std::optional<double> d1_m,
                                                    std::vector<double>* out_radii) {
    params.validate();
    if (!(r_max_m > 0.0))
        throw std::invalid_argument("sample_nonhomogeneous_interference: r_max must be > 0");
    const double lower = d1_m.value_or(0.0);
    if (lower >= r_max_m)
        throw std::invalid_argument("sample_nonhomogeneous_interference: d1 >= r_max");

    InterferenceDraw out;

    auto link_term = [&](double d) {
        const double u = stream.uniform();
        const double r_link = interferer_link_quantile(u, d, params);
        return stream.exponential() * transmit_power(r_link, params) *
               std::pow(d, -params.alpha);
    };

    if (d1_m) {
        out.nearest_w = link_term(*d1_m);
        out.n_interferers = 1;
    }

    // thinning a homogeneous PPP in the annulus down to the radial intensity
    const double area = kPi * (r_max_m * r_max_m - lower * lower);
    const int candidates = stream.poisson(params.bs_density * area);
    double nearest_d = std::numeric_limits<double>::infinity();
    double nearest_term = 0.0;
    for (int k = 0; k < candidates; ++k) {
        const double d =
            std::sqrt(lower * lower + stream.uniform() * (r_max_m * r_max_m - lower * lower));
        const double keep = -std::expm1(-kPi * params.bs_density * d * d);
        if (stream.uniform() >= keep) continue;
        if (out_radii) out_radii->push_back(d);
        const double term = link_term(d);
        out.residual_w += term;
        ++out.n_interferers;
        if (!d1_m && d < nearest_d) {
            nearest_d = d;
            nearest_term = term;
        }
    }

    if (d1_m) {
        out.total_w = out.nearest_w + out.residual_w;
    } else {
        out.nearest_w = nearest_term;
        out.total_w = out.residual_w;
        out.residual_w = out.total_w - nearest_term;
    }
    return out;
}

MomentEstimate empirical_moment(const SystemParams& params, const SimConfig& cfg,
                                double theta, double b) {
    if (b < 0.0) throw std::domain_error("empirical_moment: order must be >= 0");
    cfg.validate(params);
    const num::RandomStream root(cfg.seed);
    const std::size_t n = static_cast<std::size_t>(cfg.n_realizations);
    std::vector<double> vals(n, 0.0);
    num::parallel_for(
        n,
        [&](std::size_t i) {
            num::RandomStream stream = root.split(i);
            const Realization real = sample_network(params, cfg, stream);
            vals[i] = std::pow(conditional_success(real, theta, params), b);
        },
        cfg.threads);

    MomentEstimate est;
    est.n = cfg.n_realizations;
    double sum = 0.0;
    for (double v : vals) sum += v;
    est.mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (double v : vals) ss += (v - est.mean) * (v - est.mean);
    est.std_error = n > 1 ? std::sqrt(ss / (static_cast<double>(n) * (n - 1.0))) : 0.0;
    return est;
}

Realization restrict_window(const Realization& real, double new_radius_m,
                            num::RandomStream& stream) {
    const double covered =
        real.window_radius_m - std::hypot(real.window_center.x, real.window_center.y);
    if (!(new_radius_m > 0.0) || new_radius_m > covered)
        throw std::invalid_argument(
            "restrict_window: radius must lie inside the covered disk");

    Realization out;
    out.window_radius_m = new_radius_m;
    out.window_center = {0.0, 0.0};
    out.typical_bs_index = 0;
    for (std::size_t k = 0; k < real.bs.size(); ++k) {
        if (k == 0 || norm(real.bs[k]) <= new_radius_m) {
            out.bs.push_back(real.bs[k]);
            out.ue.push_back(real.ue[k]);
        }
    }
    // redraw users whose cell changed or whose position fell outside
    for (std::size_t k = 0; k < out.bs.size(); ++k) {
        const bool stale = norm(out.ue[k]) > new_radius_m ||
                           nearest_bs(out.bs, out.ue[k]) != static_cast<int>(k);
        if (!stale) continue;
        for (long attempt = 0;; ++attempt) {
            if (attempt > 4000L * static_cast<long>(out.bs.size()))
                throw std::runtime_error("restrict_window: rejection budget exhausted");
            Point p;
            stream.uniform_in_disk(new_radius_m, p.x, p.y);
            if (nearest_bs(out.bs, p) == static_cast<int>(k)) {
                out.ue[k] = p;
                break;
            }
        }
    }
    const double circ = origin_cell_circumradius(out.bs, new_radius_m);
    out.typical_interior = 2.0 * circ <= new_radius_m;
    return out;
}

void write_realization_csv(const Realization& real, std::ostream& os) {
    os << "kind,x_m,y_m\n";
    char buf[96];
    for (const auto& p : real.bs) {
        std::snprintf(buf, sizeof(buf), "bs,%.10g,%.10g\n", p.x, p.y);
        os << buf;
    }
    for (const auto& p : real.ue) {
        std::snprintf(buf, sizeof(buf), "ue,%.10g,%.10g\n", p.x, p.y);
        os << buf;
    }
}

}  // namespace upmeta

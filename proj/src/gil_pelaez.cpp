#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "upmeta/core_model.hpp"
#include "upmeta/moments.hpp"
#include "upmeta/numerics/interp.hpp"
#include "upmeta/numerics/parallel.hpp"
#include "upmeta/numerics/quadrature.hpp"

namespace upmeta {

using num::kPi;
using std::complex;

namespace detail {

namespace {

double safe_log1p_exp(double s) { return s > 33.0 ? s : std::log1p(std::exp(s)); }

}  // namespace

// Shared-node evaluator for the imaginary moments M_jt of one (theta, params)
// pair. The kernel primitive Psi_jt is accumulated once per t along the
// sorted set of arguments {kappa_1(z_i) * strength(x_j)}, so the cost per t
// is one sweep plus one oscillation-aware radial integral, independent of
// how many (z, x) pairs the moment needs.
class ImaginaryMomentTable {
  public:
    ImaginaryMomentTable(double theta, const SystemParams& p, const GilPelaezOptions& opt)
        : theta_(theta), params_(p), opt_(opt) {
        params_.validate();
        if (!(theta > 0.0)) throw std::domain_error("GilPelaezEvaluator: theta must be > 0");
        delta_ = 2.0 / params_.alpha;
        build_radial_grid();
        build_link_rule();
        build_sorted_args();
    }

    double noise_phase_scale() const { return noise_phase_scale_; }

    complex<double> moment(double t) const {
        if (t == 0.0) return {1.0, 0.0};
        if (t < 0.0) return std::conj(moment(-t));

        std::vector<complex<double>> exponent = exponents_at(t);

        // splines of the PGFL exponent along ln z; the noise phase is exact
        std::vector<double> re(n_z_), im(n_z_);
        for (int i = 0; i < n_z_; ++i) {
            re[i] = exponent[i].real();
            im[i] = exponent[i].imag();
        }
        num::CubicSpline re_spline(ln_z_, re);
        num::CubicSpline im_spline(ln_z_, im);

        const double noise_rate = t * theta_ * params_.noise_w;
        const auto& rule = num::gauss_legendre(8);

        complex<double> acc{0.0, 0.0};
        for (int i = 0; i + 1 < n_z_; ++i) {
            if (re[i] > opt_.dead_exponent) break;  // Re E grows with z
            const double phi_a = noise_rate * recip_strength_[i];
            const double phi_b = noise_rate * recip_strength_[i + 1];
            const double activity =
                std::abs(phi_b - phi_a) + std::abs(exponent[i + 1] - exponent[i]) + 0.12;
            const int m = std::min(4096, static_cast<int>(std::ceil(activity / 6.0)));
            const double lo = ln_z_[i];
            const double width = (ln_z_[i + 1] - lo) / m;
            for (int sub = 0; sub < m; ++sub) {
                const double mid = lo + width * (sub + 0.5);
                const double half = 0.5 * width;
                for (int q = 0; q < 8; ++q) {
                    const double lz = mid + half * rule.nodes[q];
                    const double z = std::exp(lz);
                    const double phase =
                        noise_rate / received_strength(z, params_);
                    const complex<double> expo(re_spline(lz), im_spline(lz) + phase);
                    acc += rule.weights[q] * half * serving_distance_pdf(z, params_) * z *
                           std::exp(-expo);
                }
            }
        }
        return acc;
    }

  private:
    void build_radial_grid() {
        const double lam_pi = kPi * params_.bs_density;
        const double z_lo = std::sqrt(1e-14 / lam_pi);
        const double z_hi = std::sqrt(34.5 / lam_pi);
        n_z_ = std::max(48, opt_.z_nodes);
        ln_z_.resize(n_z_);
        recip_strength_.resize(n_z_);
        c_pow_delta_.resize(n_z_);
        ln_c_.resize(n_z_);
        const double step = std::log(z_hi / z_lo) / (n_z_ - 1);
        for (int i = 0; i < n_z_; ++i) {
            ln_z_[i] = std::log(z_lo) + step * i;
            const double z = std::exp(ln_z_[i]);
            recip_strength_[i] = 1.0 / received_strength(z, params_);
            const double c = theta_ * recip_strength_[i];
            ln_c_[i] = std::log(c);
            c_pow_delta_[i] = std::pow(c, delta_);
        }
        // small-t phase speed of the noise factor, used for panel sizing
        num::IntegrateOptions opt;
        opt.rel_tol = 1e-9;
        opt.abs_tol = 0.0;
        noise_phase_scale_ =
            theta_ * params_.noise_w *
            num::integrate(
                [&](double z) {
                    return z <= 0.0 ? 0.0
                                    : serving_distance_pdf(z, params_) /
                                          received_strength(z, params_);
                },
                z_lo, z_hi, opt)
                .value;
    }

    void build_link_rule() {
        const double lam = params_.bs_density;
        const double x_hi = std::sqrt(37.0 / (kPi * lam));
        const double x_lo = x_hi * 1e-6;
        const int panels_per_decade = std::max(1, opt_.x_nodes_per_decade / 8);
        std::vector<double> edges;
        const double decades = std::log10(x_hi / x_lo);
        const int n_panels = std::max(6, static_cast<int>(std::ceil(decades * panels_per_decade)));
        for (int k = 0; k <= n_panels; ++k)
            edges.push_back(x_lo * std::pow(x_hi / x_lo, static_cast<double>(k) / n_panels));
        const double r_c = params_.crossover_radius();
        if (r_c > edges.front() && r_c < edges.back()) {
            edges.push_back(r_c);  // transmit-power kink
            std::sort(edges.begin(), edges.end());
        }

        const auto& rule = num::gauss_legendre(8);
        const double front = 2.0 * kPi * lam / params_.alpha;
        for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
            const double lo = std::log(edges[k]);
            const double hi = std::log(edges[k + 1]);
            const double mid = 0.5 * (lo + hi);
            const double half = 0.5 * (hi - lo);
            for (int q = 0; q < 8; ++q) {
                const double x = std::exp(mid + half * rule.nodes[q]);
                const double pw = transmit_power(x, params_);
                if (pw <= 0.0) continue;
                const double f_im = 2.0 * kPi * lam * x * std::exp(-kPi * lam * x * x);
                link_weight_.push_back(front * rule.weights[q] * half * x * f_im *
                                       std::pow(pw, delta_));
                ln_strength_.push_back(std::log(pw) - params_.alpha * std::log(x));
            }
        }
        n_x_ = static_cast<int>(link_weight_.size());
    }

    void build_sorted_args() {
        args_.reserve(static_cast<std::size_t>(n_z_) * n_x_);
        for (int i = 0; i < n_z_; ++i) {
            for (int j = 0; j < n_x_; ++j) {
                Arg a;
                a.ln_y = ln_c_[i] + ln_strength_[j];
                a.row = static_cast<std::uint32_t>(i);
                a.col = static_cast<std::uint32_t>(j);
                args_.push_back(a);
            }
        }
        std::sort(args_.begin(), args_.end(),
                  [](const Arg& a, const Arg& b) { return a.ln_y < b.ln_y; });

        // fixed 4-point Gauss nodes per gap; oscillation-heavy gaps are
        // re-subdivided at sweep time when t * dtau exceeds the phase budget
        const auto& g4 = num::gauss_legendre(4);
        const std::size_t n_gaps = args_.size() - 1;
        gap_node_tau_.resize(4 * n_gaps);
        gap_node_wexp_.resize(4 * n_gaps);
        gap_dtau_.resize(n_gaps);
        for (std::size_t k = 0; k < n_gaps; ++k) {
            const double sa = args_[k].ln_y;
            const double sb = args_[k + 1].ln_y;
            const double mid = 0.5 * (sa + sb);
            const double half = 0.5 * (sb - sa);
            for (int q = 0; q < 4; ++q) {
                const double s = mid + half * g4.nodes[q];
                gap_node_tau_[4 * k + q] = safe_log1p_exp(s);
                gap_node_wexp_[4 * k + q] = g4.weights[q] * half * std::exp(-delta_ * s);
            }
            gap_dtau_[k] = safe_log1p_exp(sb) - safe_log1p_exp(sa);
        }
    }

    // Psi_jt at every sorted argument, accumulated into the per-radius PGFL
    // exponents E_i = c_i^delta * sum_j B_j Psi(c_i s_j).
    std::vector<complex<double>> exponents_at(double t) const {
        const auto& g4 = num::gauss_legendre(4);
        std::vector<complex<double>> e_acc(n_z_, complex<double>{0.0, 0.0});

        // series start below the first argument
        const double s_first = args_.front().ln_y;
        double s0 = std::min(std::log(1e-8 / t), s_first);
        double psi_re, psi_im;
        {
            // two-term series of int_0^{y0} y^{-d-1}(1 - (1+y)^{-it}) dy
            const complex<double> b{0.0, t};
            const double y0 = std::exp(s0);
            const complex<double> lead = b * std::pow(y0, 1.0 - delta_) / (1.0 - delta_) -
                                         0.5 * b * (b + 1.0) *
                                             std::pow(y0, 2.0 - delta_) / (2.0 - delta_);
            psi_re = lead.real();
            psi_im = lead.imag();
        }

        auto integrate_segment = [&](double sa, double sb, double& out_re, double& out_im) {
            // fresh 4-point panels sized so each carries < ~3 rad of phase
            const double dtau = safe_log1p_exp(sb) - safe_log1p_exp(sa);
            const int m = std::max(1, static_cast<int>(std::ceil(dtau * t / 3.0)));
            const double width = (sb - sa) / m;
            double re = 0.0, im = 0.0;
            for (int sub = 0; sub < m; ++sub) {
                const double mid = sa + width * (sub + 0.5);
                const double half = 0.5 * width;
                for (int q = 0; q < 4; ++q) {
                    const double s = mid + half * g4.nodes[q];
                    const double tau = safe_log1p_exp(s);
                    const double w = g4.weights[q] * half * std::exp(-delta_ * s);
                    re += w * (1.0 - std::cos(t * tau));
                    im += w * std::sin(t * tau);
                }
            }
            out_re = re;
            out_im = im;
        };

        if (s0 < s_first) {
            double re, im;
            integrate_segment(s0, s_first, re, im);
            psi_re += re;
            psi_im += im;
        }
        e_acc[args_[0].row] += link_weight_[args_[0].col] * complex<double>(psi_re, psi_im);

        const std::size_t n_gaps = args_.size() - 1;
        for (std::size_t k = 0; k < n_gaps; ++k) {
            if (gap_dtau_[k] * t <= 3.0) {
                double re = 0.0, im = 0.0;
                for (int q = 0; q < 4; ++q) {
                    const double tau = gap_node_tau_[4 * k + q];
                    const double w = gap_node_wexp_[4 * k + q];
                    re += w * (1.0 - std::cos(t * tau));
                    im += w * std::sin(t * tau);
                }
                psi_re += re;
                psi_im += im;
            } else {
                double re, im;
                integrate_segment(args_[k].ln_y, args_[k + 1].ln_y, re, im);
                psi_re += re;
                psi_im += im;
            }
            const Arg& a = args_[k + 1];
            e_acc[a.row] += link_weight_[a.col] * complex<double>(psi_re, psi_im);
        }

        for (int i = 0; i < n_z_; ++i) e_acc[i] *= c_pow_delta_[i];
        return e_acc;
    }

    struct Arg {
        double ln_y;
        std::uint32_t row, col;
    };

    double theta_;
    SystemParams params_;
    GilPelaezOptions opt_;
    double delta_ = 0.5;
    double noise_phase_scale_ = 0.0;

    int n_z_ = 0;
    std::vector<double> ln_z_, recip_strength_, ln_c_, c_pow_delta_;

    int n_x_ = 0;
    std::vector<double> link_weight_, ln_strength_;

    std::vector<Arg> args_;
    std::vector<double> gap_node_tau_, gap_node_wexp_, gap_dtau_;
};

}  // namespace detail

// ---------------------------------------------------------------------------
// GilPelaezEvaluator
// ---------------------------------------------------------------------------

GilPelaezEvaluator::GilPelaezEvaluator(double theta, const SystemParams& params,
                                       GilPelaezOptions options)
    : theta_(theta), params_(params), options_(options) {
    table_ = std::make_unique<detail::ImaginaryMomentTable>(theta, params, options);

    // estimate the small-t phase speed |arg M_jt| / t for panel sizing
    double t0 = 1e-3;
    phase_rate_ = table_->noise_phase_scale();
    for (int attempt = 0; attempt < 6; ++attempt) {
        const complex<double> m = imaginary_moment(t0);
        const double a = std::abs(std::arg(m));
        if (a < 2.0) {
            phase_rate_ = std::max(phase_rate_, a / t0);
            break;
        }
        t0 *= 0.125;
    }
}

GilPelaezEvaluator::~GilPelaezEvaluator() = default;

std::complex<double> GilPelaezEvaluator::imaginary_moment(double t) {
    auto it = cache_.find(t);
    if (it != cache_.end()) return it->second;
    const auto m = table_->moment(t);
    cache_.emplace(t, m);
    return m;
}

namespace {

struct PanelResult {
    double value = 0.0;
    double err = 0.0;
};

}  // namespace

GilPelaezResult GilPelaezEvaluator::meta_result(double gamma) {
    if (!(gamma > 0.0 && gamma < 1.0))
        throw std::domain_error("gil_pelaez_meta: gamma must be in (0,1)");
    const double log_gamma = std::log(gamma);
    const double l_mag = -log_gamma;

    auto prefetch = [&](const std::vector<double>& ts) {
        std::vector<double> missing;
        for (double t : ts)
            if (cache_.find(t) == cache_.end()) missing.push_back(t);
        if (missing.size() > 1 && options_.threads != 1) {
            std::vector<complex<double>> vals(missing.size());
            num::parallel_for(
                missing.size(), [&](std::size_t i) { vals[i] = table_->moment(missing[i]); },
                options_.threads);
            for (std::size_t i = 0; i < missing.size(); ++i)
                cache_.emplace(missing[i], vals[i]);
        }
    };

    auto integrand = [&](double t) {
        const complex<double> m = imaginary_moment(t);
        const complex<double> rot{std::cos(t * l_mag), std::sin(t * l_mag)};
        return (rot * m).imag() / t;
    };

    // GK15 panel with recursive refinement; moment nodes are prefetched in
    // parallel and land in the shared cache, so other gamma values reuse them
    std::function<PanelResult(double, double, int)> eval_panel =
        [&](double a, double b, int depth) -> PanelResult {
        std::vector<double> ts(15);
        const double half = 0.5 * (b - a);
        const double mid = 0.5 * (a + b);
        for (int i = 0; i < 15; ++i) ts[i] = mid + half * num::detail::kGK15Nodes[i];
        prefetch(ts);
        double k = 0.0, g = 0.0;
        for (int i = 0; i < 15; ++i) {
            const double f = integrand(ts[i]);
            k += num::detail::kGK15Weights[i] * f;
            if (i % 2 == 1) g += num::detail::kG7Weights[i / 2] * f;
        }
        PanelResult pr;
        pr.value = k * half;
        pr.err = std::abs((k - g) * half);
        if (pr.err > options_.panel_tol && depth < 14) {
            const PanelResult left = eval_panel(a, mid, depth + 1);
            const PanelResult right = eval_panel(mid, b, depth + 1);
            pr.value = left.value + right.value;
            pr.err = left.err + right.err;
        }
        return pr;
    };

    GilPelaezResult out;
    double acc = 0.0;
    double t_lo = 0.0;
    double h = 0.8 / std::max(phase_rate_, 2.5);
    std::vector<std::pair<double, double>> envelope;  // (t, |M|)

    while (t_lo < options_.t_max) {
        const double t_hi = std::min(t_lo + h, options_.t_max);
        acc += eval_panel(t_lo, t_hi, 0).value;

        const complex<double> m_hi = imaginary_moment(t_hi);
        envelope.emplace_back(t_hi, std::abs(m_hi));
        t_lo = t_hi;

        // stop once the last-decade envelope of |M|/t is below tolerance
        if (t_lo >= 2.0) {
            double tail = 0.0;
            for (const auto& [t, am] : envelope)
                if (t >= 0.1 * t_lo) tail = std::max(tail, am / t);
            out.tail_bound = tail;
            if (tail < options_.envelope_tol) {
                out.converged = true;
                break;
            }
        }

        // grow geometrically, but respect the local phase speed of M and the
        // oscillation of the Gil-Pelaez kernel
        double local_rate = 0.0;
        if (envelope.size() >= 2) {
            const double t_prev = envelope[envelope.size() - 2].first;
            const complex<double> m_prev = imaginary_moment(t_prev);
            if (std::abs(m_prev) > 1e-300 && std::abs(m_hi) > 1e-300) {
                local_rate = std::abs(std::arg(m_hi * std::conj(m_prev))) / (t_lo - t_prev);
            }
        }
        h = std::min({1.6 * h, 3.2, 8.0 / std::max(l_mag, 2.5),
                      8.0 / std::max(local_rate, 1e-3)});
    }

    out.t_used = t_lo;
    out.raw_value = 0.5 + acc / kPi;
    out.value = std::min(1.0, std::max(0.0, out.raw_value));
    return out;
}

double GilPelaezEvaluator::meta(double gamma) {
    const GilPelaezResult r = meta_result(gamma);
    if (!r.converged) {
        throw num::convergence_error(
            "gil_pelaez_meta: envelope tolerance not reached by t_max", r.raw_value,
            r.tail_bound);
    }
    return r.value;
}

double gil_pelaez_meta(double theta, double gamma, const SystemParams& params,
                       GilPelaezOptions options) {
    GilPelaezEvaluator ev(theta, params, options);
    return ev.meta(gamma);
}

}  // namespace upmeta

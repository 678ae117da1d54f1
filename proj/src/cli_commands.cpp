#include "upmeta/cli_commands.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <memory>
#include <ostream>

#include <json.hpp>

#include "upmeta/dominant.hpp"
#include "upmeta/mc_sim.hpp"
#include "upmeta/moments.hpp"
#include "upmeta/numerics/parallel.hpp"
#include "upmeta/svg_plot.hpp"

namespace upmeta {

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string eps_tag(double eps) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", eps);
    std::string s(buf);
    for (auto& c : s)
        if (c == '.') c = 'p';
    return s;
}

void append_proposed_rows(const RunConfig& cfg, double eps, ResultTable& table,
                          std::ostream& log) {
    SystemParams p = cfg.params;
    p.epsilon = eps;
    const DominantEvaluator eval(p, {.build_threads = cfg.threads});
    const std::size_t n_cells = cfg.theta_db.size() * cfg.gamma.size();
    std::vector<ResultRow> rows(n_cells);
    num::parallel_for(
        n_cells,
        [&](std::size_t idx) {
            const std::size_t ti = idx / cfg.gamma.size();
            const std::size_t gi = idx % cfg.gamma.size();
            ResultRow& row = rows[idx];
            row.method = "proposed";
            row.epsilon = eps;
            row.theta_db = cfg.theta_db[ti];
            row.gamma = cfg.gamma[gi];
            const auto t0 = Clock::now();
            try {
                row.value = eval.meta_proposed(db_to_linear(row.theta_db), row.gamma);
            } catch (const std::exception&) {
                row.value = kNaN;  // flagged cell, run continues
            }
            row.runtime_ms = ms_since(t0);
        },
        cfg.threads);
    for (auto& row : rows) {
        if (std::isnan(row.value))
            log << "warn: proposed failed at eps=" << row.epsilon
                << " theta_db=" << row.theta_db << " gamma=" << row.gamma << "\n";
        table.rows.push_back(std::move(row));
    }
}

void append_beta_rows(const RunConfig& cfg, double eps, ResultTable& table,
                      std::ostream& log) {
    SystemParams p = cfg.params;
    p.epsilon = eps;
    for (double theta_db : cfg.theta_db) {
        const auto t0 = Clock::now();
        double m1 = kNaN, m2 = kNaN;
        try {
            const double theta = db_to_linear(theta_db);
            m1 = moment_real(theta, 1.0, p, cfg.moments_kernel);
            m2 = moment_real(theta, 2.0, p, cfg.moments_kernel);
        } catch (const std::exception& e) {
            log << "warn: beta moments failed at eps=" << eps << " theta_db=" << theta_db
                << ": " << e.what() << "\n";
        }
        const double moment_ms = ms_since(t0);
        for (double gamma : cfg.gamma) {
            ResultRow row;
            row.method = "beta";
            row.epsilon = eps;
            row.theta_db = theta_db;
            row.gamma = gamma;
            const auto t1 = Clock::now();
            row.value = kNaN;
            if (!std::isnan(m1)) {
                try {
                    row.value = beta_meta_from_moments(m1, m2, gamma);
                } catch (const std::exception& e) {
                    log << "warn: beta failed at eps=" << eps << " theta_db=" << theta_db
                        << " gamma=" << gamma << ": " << e.what() << "\n";
                }
            }
            row.runtime_ms = ms_since(t1) + moment_ms / static_cast<double>(cfg.gamma.size());
            table.rows.push_back(row);
        }
    }
}

void append_gilpelaez_rows(const RunConfig& cfg, double eps, ResultTable& table,
                           std::ostream& log) {
    SystemParams p = cfg.params;
    p.epsilon = eps;
    for (double theta_db : cfg.theta_db) {
        GilPelaezOptions opts = cfg.gil_pelaez;
        opts.threads = cfg.threads;
        std::unique_ptr<GilPelaezEvaluator> eval;
        try {
            eval = std::make_unique<GilPelaezEvaluator>(db_to_linear(theta_db), p, opts);
        } catch (const std::exception& e) {
            log << "warn: gilpelaez setup failed at eps=" << eps
                << " theta_db=" << theta_db << ": " << e.what() << "\n";
        }
        for (double gamma : cfg.gamma) {
            ResultRow row;
            row.method = "gilpelaez";
            row.epsilon = eps;
            row.theta_db = theta_db;
            row.gamma = gamma;
            row.value = kNaN;
            const auto t0 = Clock::now();
            if (eval) {
                try {
                    row.value = eval->meta(gamma);
                } catch (const std::exception& e) {
                    log << "warn: gilpelaez failed at eps=" << eps
                        << " theta_db=" << theta_db << " gamma=" << gamma << ": " << e.what()
                        << "\n";
                }
            }
            row.runtime_ms = ms_since(t0);
            table.rows.push_back(row);
        }
    }
}

void append_mc_rows(const RunConfig& cfg, double eps, ResultTable& table,
                    std::ostream& log) {
    SystemParams p = cfg.params;
    p.epsilon = eps;
    std::vector<double> theta_lin;
    theta_lin.reserve(cfg.theta_db.size());
    for (double db : cfg.theta_db) theta_lin.push_back(db_to_linear(db));

    const auto t0 = Clock::now();
    EmpiricalMeta em;
    try {
        em = empirical_meta(p, cfg.sim, theta_lin, cfg.gamma);
    } catch (const std::exception& e) {
        log << "warn: mc failed at eps=" << eps << ": " << e.what() << "\n";
        for (double theta_db : cfg.theta_db)
            for (double gamma : cfg.gamma)
                table.rows.push_back(
                    {"mc", eps, theta_db, gamma, kNaN, std::nullopt, 0.0});
        return;
    }
    const double per_cell_ms =
        ms_since(t0) / static_cast<double>(cfg.theta_db.size() * cfg.gamma.size());
    for (std::size_t ti = 0; ti < cfg.theta_db.size(); ++ti) {
        for (std::size_t gi = 0; gi < cfg.gamma.size(); ++gi) {
            ResultRow row;
            row.method = "mc";
            row.epsilon = eps;
            row.theta_db = cfg.theta_db[ti];
            row.gamma = cfg.gamma[gi];
            row.value = em.value[ti][gi];
            row.ci_halfwidth = em.ci_halfwidth[ti][gi];
            row.runtime_ms = per_cell_ms;
            table.rows.push_back(row);
        }
    }
}

void write_svg_figures(const RunConfig& cfg, const ResultTable& table, std::ostream& log) {
    if (cfg.svg_dir.empty()) return;
    fs::create_directories(cfg.svg_dir);

    auto value_of = [&](const std::string& method, double eps, double theta_db,
                        double gamma) {
        for (const auto& r : table.rows)
            if (r.method == method && r.epsilon == eps && r.theta_db == theta_db &&
                r.gamma == gamma)
                return r.value;
        return kNaN;
    };

    for (double eps : cfg.epsilons()) {
        if (cfg.gamma.size() > 1) {
            const double theta_db = cfg.theta_db[cfg.theta_db.size() / 2];
            PlotSpec spec;
            spec.title = "Uplink SINR meta distribution, eps=" + std::to_string(eps).substr(0, 4) +
                         ", theta=" + std::to_string(theta_db).substr(0, 5) + " dB";
            spec.x_label = "reliability gamma";
            spec.y_label = "F(theta, gamma)";
            for (Method m : cfg.methods) {
                PlotCurve c;
                c.label = method_name(m);
                for (double g : cfg.gamma) {
                    c.x.push_back(g);
                    c.y.push_back(value_of(method_name(m), eps, theta_db, g));
                }
                spec.curves.push_back(std::move(c));
            }
            const std::string path =
                (fs::path(cfg.svg_dir) / ("meta_eps" + eps_tag(eps) + "_vs_gamma.svg")).string();
            std::ofstream os(path);
            write_svg(spec, os);
            log << "wrote " << path << "\n";
        }
        if (cfg.theta_db.size() > 1) {
            const double gamma = cfg.gamma[cfg.gamma.size() / 2];
            PlotSpec spec;
            spec.title = "Uplink SINR meta distribution, eps=" + std::to_string(eps).substr(0, 4) +
                         ", gamma=" + std::to_string(gamma).substr(0, 4);
            spec.x_label = "theta [dB]";
            spec.y_label = "F(theta, gamma)";
            for (Method m : cfg.methods) {
                PlotCurve c;
                c.label = method_name(m);
                for (double t : cfg.theta_db) {
                    c.x.push_back(t);
                    c.y.push_back(value_of(method_name(m), eps, t, gamma));
                }
                spec.curves.push_back(std::move(c));
            }
            const std::string path =
                (fs::path(cfg.svg_dir) / ("meta_eps" + eps_tag(eps) + "_vs_theta.svg")).string();
            std::ofstream os(path);
            write_svg(spec, os);
            log << "wrote " << path << "\n";
        }
    }
}

void dump_realizations(const RunConfig& cfg, std::ostream& log) {
    if (cfg.realization_dump_dir.empty() || !cfg.methods.count(Method::mc)) return;
    fs::create_directories(cfg.realization_dump_dir);
    SystemParams p = cfg.params;
    p.epsilon = cfg.epsilons().front();
    const num::RandomStream root(cfg.sim.seed);
    for (int i = 0; i < cfg.sim.n_realizations; ++i) {
        num::RandomStream stream = root.split(static_cast<std::uint64_t>(i));
        const Realization real = sample_network(p, cfg.sim, stream);
        char name[64];
        std::snprintf(name, sizeof(name), "realization_%05d.csv", i);
        std::ofstream os(fs::path(cfg.realization_dump_dir) / name);
        write_realization_csv(real, os);
    }
    log << "dumped " << cfg.sim.n_realizations << " realizations to "
        << cfg.realization_dump_dir << "\n";
}

}  // namespace

ResultTable evaluate_grid(const RunConfig& cfg, std::ostream& log) {
    cfg.validate();
    ResultTable table;
    table.seed = cfg.sim.seed;
    table.bs_density = cfg.params.bs_density;
    table.tolerances = "quad=1e-8;gil_envelope=" + std::to_string(cfg.gil_pelaez.envelope_tol);

    for (Method m : cfg.methods) {
        for (double eps : cfg.epsilons()) {
            switch (m) {
                case Method::proposed: append_proposed_rows(cfg, eps, table, log); break;
                case Method::beta: append_beta_rows(cfg, eps, table, log); break;
                case Method::gilpelaez: append_gilpelaez_rows(cfg, eps, table, log); break;
                case Method::mc: append_mc_rows(cfg, eps, table, log); break;
            }
        }
    }
    return table;
}

std::string validation_report(const RunConfig& cfg, const ResultTable& table, bool& pass) {
    using nlohmann::json;

    auto grid_of = [&](const std::string& method) {
        std::map<std::tuple<double, double, double>, double> out;
        for (const auto& r : table.rows)
            if (r.method == method) out[{r.epsilon, r.theta_db, r.gamma}] = r.value;
        return out;
    };

    struct Pair {
        std::string a, b;
        double tol;
    };
    std::vector<Pair> pairs;
    if (cfg.methods.count(Method::proposed) && cfg.methods.count(Method::mc))
        pairs.push_back({"proposed", "mc", cfg.tolerances.proposed_vs_mc});
    if (cfg.methods.count(Method::beta) && cfg.methods.count(Method::mc))
        pairs.push_back({"beta", "mc", cfg.tolerances.beta_vs_mc});
    if (cfg.methods.count(Method::gilpelaez) && cfg.methods.count(Method::beta))
        pairs.push_back({"gilpelaez", "beta", cfg.tolerances.gilpelaez_vs_beta});
    if (cfg.methods.count(Method::proposed) && cfg.methods.count(Method::beta))
        pairs.push_back({"proposed", "beta", cfg.tolerances.proposed_vs_beta});

    pass = true;
    json out;
    out["seed"] = cfg.sim.seed;
    out["bs_density_per_m2"] = cfg.params.bs_density;
    out["n_realizations"] = cfg.sim.n_realizations;
    out["version"] = kVersion;
    out["pairs"] = json::array();
    for (const auto& pr : pairs) {
        const auto ga = grid_of(pr.a);
        const auto gb = grid_of(pr.b);
        double max_dev = 0.0, sum_dev = 0.0;
        std::size_t n = 0;
        bool has_nan = false;
        for (const auto& [key, va] : ga) {
            auto it = gb.find(key);
            if (it == gb.end()) continue;
            if (std::isnan(va) || std::isnan(it->second)) {
                has_nan = true;
                continue;
            }
            const double dev = std::abs(va - it->second);
            max_dev = std::max(max_dev, dev);
            sum_dev += dev;
            ++n;
        }
        const bool ok = !has_nan && n > 0 && max_dev <= pr.tol;
        pass = pass && ok;
        json entry;
        entry["method"] = pr.a;
        entry["reference"] = pr.b;
        entry["cells"] = n;
        entry["max_abs_dev"] = max_dev;
        entry["mean_abs_dev"] = n > 0 ? sum_dev / static_cast<double>(n) : 0.0;
        entry["tolerance"] = pr.tol;
        entry["pass"] = ok;
        out["pairs"].push_back(entry);
    }
    out["pass"] = pass;
    return out.dump(2) + "\n";
}

int cmd_meta(const RunConfig& cfg, std::ostream& log) {
    try {
        cfg.validate();
    } catch (const config_error& e) {
        log << "config error: " << e.what() << "\n";
        return kExitConfigError;
    }
    try {
        const ResultTable table = evaluate_grid(cfg, log);
        std::ofstream os(cfg.csv_path);
        if (!os) {
            log << "config error: cannot write " << cfg.csv_path << "\n";
            return kExitConfigError;
        }
        write_csv(table, os);
        log << "wrote " << cfg.csv_path << " (" << table.rows.size() << " rows)\n";
        write_svg_figures(cfg, table, log);
        dump_realizations(cfg, log);
    } catch (const config_error& e) {
        log << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        log << "numerical error: " << e.what() << "\n";
        return kExitNumericalError;
    }
    return kExitOk;
}

int cmd_validate(const RunConfig& cfg, std::ostream& log) {
    try {
        cfg.validate();
        if (!cfg.methods.count(Method::mc))
            throw config_error("methods: validation requires the simulation reference (mc)");
    } catch (const config_error& e) {
        log << "config error: " << e.what() << "\n";
        return kExitConfigError;
    }
    try {
        const ResultTable table = evaluate_grid(cfg, log);
        std::ofstream os(cfg.csv_path);
        write_csv(table, os);
        bool pass = false;
        const std::string report = validation_report(cfg, table, pass);
        std::ofstream rs(cfg.report_path);
        if (!rs) {
            log << "config error: cannot write " << cfg.report_path << "\n";
            return kExitConfigError;
        }
        rs << report;
        log << report;
        return pass ? kExitOk : kExitToleranceFailure;
    } catch (const config_error& e) {
        log << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        log << "numerical error: " << e.what() << "\n";
        return kExitNumericalError;
    }
}

int cmd_moments(const RunConfig& cfg, const std::vector<double>& b_list,
                std::ostream& log) {
    try {
        cfg.validate();
        if (b_list.empty()) throw config_error("moments: at least one order is required");
        for (double b : b_list)
            if (b < 0.0) throw config_error("moments: orders must be >= 0");
    } catch (const config_error& e) {
        log << "config error: " << e.what() << "\n";
        return kExitConfigError;
    }

    try {
        std::ofstream os(cfg.csv_path);
        if (!os) {
            log << "config error: cannot write " << cfg.csv_path << "\n";
            return kExitConfigError;
        }
        os << "# upmeta-moments v" << kVersion << "\n";
        os << "kernel,epsilon,theta_db,b,value,se,runtime_ms\n";
        char buf[192];
        for (double eps : cfg.epsilons()) {
            SystemParams p = cfg.params;
            p.epsilon = eps;
            for (double theta_db : cfg.theta_db) {
                const double theta = db_to_linear(theta_db);
                for (double b : b_list) {
                    for (MomentKernel kernel :
                         {MomentKernel::laplace_rescaled, MomentKernel::pgfl_exact}) {
                        const auto t0 = Clock::now();
                        const double v = moment_real(theta, b, p, kernel);
                        std::snprintf(buf, sizeof(buf), "%s,%.10g,%.10g,%.10g,%.10g,,%.3f\n",
                                      kernel == MomentKernel::laplace_rescaled ? "laplace-rescaled"
                                                                            : "pgfl-exact",
                                      eps, theta_db, b, v, ms_since(t0));
                        os << buf;
                    }
                    if (cfg.methods.count(Method::mc)) {
                        const auto t0 = Clock::now();
                        const MomentEstimate est = empirical_moment(p, cfg.sim, theta, b);
                        std::snprintf(buf, sizeof(buf),
                                      "empirical,%.10g,%.10g,%.10g,%.10g,%.10g,%.3f\n", eps,
                                      theta_db, b, est.mean, est.std_error, ms_since(t0));
                        os << buf;
                    }
                }
            }
        }
        log << "wrote " << cfg.csv_path << "\n";
    } catch (const config_error& e) {
        log << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        log << "numerical error: " << e.what() << "\n";
        return kExitNumericalError;
    }
    return kExitOk;
}

}  // namespace upmeta

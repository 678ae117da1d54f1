#include "upmeta/run_config.hpp"

#include <fstream>

#include <json.hpp>

namespace upmeta {

using nlohmann::json;

std::string method_name(Method m) {
    switch (m) {
        case Method::proposed: return "proposed";
        case Method::beta: return "beta";
        case Method::gilpelaez: return "gilpelaez";
        case Method::mc: return "mc";
    }
    return "?";
}

Method method_from_name(const std::string& name) {
    if (name == "proposed") return Method::proposed;
    if (name == "beta") return Method::beta;
    if (name == "gilpelaez") return Method::gilpelaez;
    if (name == "mc") return Method::mc;
    throw config_error("methods: unknown method '" + name + "'");
}

namespace {

double get_power_watts(const json& j, const std::string& stem, double fallback_w,
                       const std::string& path) {
    const std::string mw_key = stem + "_mw";
    const std::string w_key = stem + "_w";
    const bool has_mw = j.contains(mw_key);
    const bool has_w = j.contains(w_key);
    if (has_mw && has_w)
        throw config_error(path + ": give either " + mw_key + " or " + w_key + ", not both");
    if (has_mw) return j.at(mw_key).get<double>() * 1e-3;
    if (has_w) return j.at(w_key).get<double>();
    return fallback_w;
}

template <typename T>
void maybe(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

RunConfig RunConfig::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw config_error(std::string("config: JSON parse failure: ") + e.what());
    }

    RunConfig cfg;
    try {
        if (j.contains("params")) {
            const json& p = j.at("params");
            maybe(p, "bs_density_per_m2", cfg.params.bs_density);
            maybe(p, "alpha", cfg.params.alpha);
            maybe(p, "epsilon", cfg.params.epsilon);
            cfg.params.rho_w = get_power_watts(p, "rho", cfg.params.rho_w, "params");
            cfg.params.p_max_w = get_power_watts(p, "p_max", cfg.params.p_max_w, "params");
            maybe(p, "noise_w", cfg.params.noise_w);
        }
        maybe(j, "theta_db", cfg.theta_db);
        maybe(j, "gamma", cfg.gamma);
        maybe(j, "epsilon_list", cfg.epsilon_list);
        if (j.contains("methods")) {
            cfg.methods.clear();
            for (const auto& m : j.at("methods"))
                cfg.methods.insert(method_from_name(m.get<std::string>()));
        }
        if (j.contains("sim")) {
            const json& s = j.at("sim");
            maybe(s, "n_realizations", cfg.sim.n_realizations);
            maybe(s, "window_radius_m", cfg.sim.window_radius_m);
            std::uint64_t seed = cfg.sim.seed;
            maybe(s, "seed", seed);
            cfg.sim.seed = seed;
            maybe(s, "guard_margin_m", cfg.sim.guard_margin_m);
            if (s.contains("estimator")) {
                const std::string est = s.at("estimator").get<std::string>();
                if (est == "analytic")
                    cfg.sim.estimator = SimConfig::Estimator::analytic_conditional;
                else if (est == "fading-draws")
                    cfg.sim.estimator = SimConfig::Estimator::fading_draws;
                else
                    throw config_error("sim.estimator: expected 'analytic' or 'fading-draws'");
            }
            maybe(s, "fading_draws", cfg.sim.fading_draws);
        }
        if (j.contains("moments_kernel")) {
            const std::string k = j.at("moments_kernel").get<std::string>();
            if (k == "pgfl-exact")
                cfg.moments_kernel = MomentKernel::pgfl_exact;
            else if (k == "laplace-rescaled")
                cfg.moments_kernel = MomentKernel::laplace_rescaled;
            else
                throw config_error("moments_kernel: expected 'pgfl-exact' or 'laplace-rescaled'");
        }
        if (j.contains("gil_pelaez")) {
            const json& g = j.at("gil_pelaez");
            maybe(g, "envelope_tol", cfg.gil_pelaez.envelope_tol);
            maybe(g, "t_max", cfg.gil_pelaez.t_max);
            maybe(g, "panel_tol", cfg.gil_pelaez.panel_tol);
            maybe(g, "z_nodes", cfg.gil_pelaez.z_nodes);
        }
        if (j.contains("tolerances")) {
            const json& t = j.at("tolerances");
            maybe(t, "proposed_vs_mc", cfg.tolerances.proposed_vs_mc);
            maybe(t, "beta_vs_mc", cfg.tolerances.beta_vs_mc);
            maybe(t, "gilpelaez_vs_beta", cfg.tolerances.gilpelaez_vs_beta);
            maybe(t, "proposed_vs_beta", cfg.tolerances.proposed_vs_beta);
        }
        if (j.contains("output")) {
            const json& o = j.at("output");
            maybe(o, "csv", cfg.csv_path);
            maybe(o, "report", cfg.report_path);
            maybe(o, "svg_dir", cfg.svg_dir);
            maybe(o, "dump_realizations", cfg.realization_dump_dir);
        }
        maybe(j, "threads", cfg.threads);
    } catch (const json::exception& e) {
        throw config_error(std::string("config: type error: ") + e.what());
    }
    cfg.sim.threads = cfg.threads;
    cfg.gil_pelaez.threads = cfg.threads;
    cfg.validate();
    return cfg;
}

RunConfig RunConfig::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("config: cannot open '" + path + "'");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return from_json_text(text);
}

void RunConfig::validate() const {
    try {
        params.validate();
    } catch (const std::exception& e) {
        throw config_error(std::string("params: ") + e.what());
    }
    if (theta_db.empty()) throw config_error("theta_db: grid must be nonempty");
    if (gamma.empty()) throw config_error("gamma: grid must be nonempty");
    for (double g : gamma)
        if (!(g > 0.0 && g < 1.0))
            throw config_error("gamma: values must lie in the open interval (0, 1)");
    for (double e : epsilon_list)
        if (!(e > 0.0 && e <= 1.0))
            throw config_error("epsilon_list: values must lie in (0, 1]");
    if (methods.empty()) throw config_error("methods: at least one method is required");
    if (methods.count(Method::mc)) {
        SystemParams p = params;
        for (double e : epsilons()) {
            p.epsilon = e;
            try {
                sim.validate(p);
            } catch (const std::exception& ex) {
                throw config_error(std::string("sim: ") + ex.what());
            }
        }
    }
}

}  // namespace upmeta

#pragma once

// JSON run configuration for the CLI. Every field is optional and falls back
// to a documented default; power fields must be unit-tagged (*_mw or *_w).

#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "upmeta/mc_sim.hpp"
#include "upmeta/moments.hpp"
#include "upmeta/system_params.hpp"

namespace upmeta {

struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Method { proposed, beta, gilpelaez, mc };

std::string method_name(Method m);
Method method_from_name(const std::string& name);

struct ValidationTolerances {
    double proposed_vs_mc = 0.05;
    double beta_vs_mc = 0.05;
    double gilpelaez_vs_beta = 0.03;
    double proposed_vs_beta = 0.07;
};

struct RunConfig {
    SystemParams params;
    std::vector<double> theta_db = {-10.0, -5.0, 0.0, 5.0, 10.0};
    std::vector<double> gamma = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    std::vector<double> epsilon_list;  // empty = params.epsilon only
    std::set<Method> methods = {Method::proposed, Method::beta, Method::mc};
    SimConfig sim;
    MomentKernel moments_kernel = MomentKernel::pgfl_exact;
    GilPelaezOptions gil_pelaez;
    ValidationTolerances tolerances;

    std::string csv_path = "results.csv";
    std::string report_path = "report.json";
    std::string svg_dir;              // empty = no plots
    std::string realization_dump_dir; // empty = no dumps
    unsigned threads = 0;

    std::vector<double> epsilons() const {
        return epsilon_list.empty() ? std::vector<double>{params.epsilon} : epsilon_list;
    }

    static RunConfig from_json_text(const std::string& text);
    static RunConfig from_json_file(const std::string& path);

    /// Throws config_error (message names the offending field) on invalid
    /// grids, unit tags, or method sets.
    void validate() const;
};

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

}  // namespace upmeta

#pragma once

#include <cmath>
#include <stdexcept>

namespace upmeta {

/// Physical-layer constants of the uplink model. All powers are in watts;
/// unit conversion from mW happens at the configuration boundary, never here.
struct SystemParams {
    double bs_density = 1e-5;  // base stations per m^2
    double alpha = 4.0;        // path-loss exponent, must exceed 2
    double epsilon = 0.4;      // path-loss compensation factor in (0, 1]
    double rho_w = 8e-6;       // power-control parameter [W]
    double p_max_w = 0.2;      // maximum transmit power [W]
    double noise_w = 1e-9;     // thermal noise power [W]

    void validate() const {
        if (!(bs_density > 0.0)) throw std::invalid_argument("SystemParams: bs_density must be > 0");
        if (!(alpha > 2.0)) throw std::invalid_argument("SystemParams: alpha must be > 2");
        if (!(epsilon > 0.0 && epsilon <= 1.0))
            throw std::invalid_argument("SystemParams: epsilon must be in (0, 1]");
        if (!(rho_w > 0.0)) throw std::invalid_argument("SystemParams: rho_w must be > 0");
        if (!(p_max_w > 0.0)) throw std::invalid_argument("SystemParams: p_max_w must be > 0");
        if (!(noise_w >= 0.0)) throw std::invalid_argument("SystemParams: noise_w must be >= 0");
    }

    /// Distance beyond which transmit power saturates at p_max.
    double crossover_radius() const {
        return std::pow(p_max_w / rho_w, 1.0 / (alpha * epsilon));
    }
};

/// Distances tied to one interfering link. The association constraint keeps
/// an interferer closer to its own serving BS than to the victim BS.
struct LinkDistances {
    double serving_m = 0.0;             // R_u
    double interferer_link_m = 0.0;     // R_i
    double interferer_to_bs_m = 0.0;    // D_i
    double nearest_interferer_m = 0.0;  // D_1

    void validate() const {
        if (serving_m < 0.0 || interferer_link_m < 0.0 || interferer_to_bs_m < 0.0 ||
            nearest_interferer_m < 0.0)
            throw std::invalid_argument("LinkDistances: distances must be >= 0");
        if (interferer_link_m > interferer_to_bs_m)
            throw std::invalid_argument("LinkDistances: interferer link exceeds its BS distance");
    }
};

}  // namespace upmeta

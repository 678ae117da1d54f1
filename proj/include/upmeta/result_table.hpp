#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace upmeta {

inline constexpr const char* kVersion = "0.1.0";

struct ResultRow {
    std::string method;  // proposed | beta | gilpelaez | mc
    double epsilon = 0.0;
    double theta_db = 0.0;
    double gamma = 0.0;
    double value = 0.0;  // NaN marks a flagged (failed) cell
    std::optional<double> ci_halfwidth;
    double runtime_ms = 0.0;
};

struct ResultTable {
    std::vector<ResultRow> rows;
    // metadata recorded with every output
    std::uint64_t seed = 0;
    double bs_density = 0.0;
    std::string tolerances;  // short free-form summary
    std::string version = kVersion;
};

/// CSV with '#'-prefixed metadata lines followed by the fixed header
/// method,epsilon,theta_db,gamma,value,ci,runtime_ms.
void write_csv(const ResultTable& table, std::ostream& os);

/// The same CSV as a string; with include_runtime = false the runtime_ms
/// column is masked, which is the form used for reproducibility comparisons.
std::string to_csv(const ResultTable& table, bool include_runtime = true);

}  // namespace upmeta

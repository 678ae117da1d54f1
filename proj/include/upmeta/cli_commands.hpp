#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "upmeta/result_table.hpp"
#include "upmeta/run_config.hpp"

namespace upmeta {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 1;
inline constexpr int kExitNumericalError = 2;
inline constexpr int kExitToleranceFailure = 3;

/// Evaluates every configured method on the (epsilon, theta, gamma) grid.
/// Cells where a method fails numerically carry NaN and are logged; the run
/// continues.
ResultTable evaluate_grid(const RunConfig& cfg, std::ostream& log);

/// Cross-method validation report (JSON text). Requires the table to contain
/// mc rows.
std::string validation_report(const RunConfig& cfg, const ResultTable& table,
                              bool& pass);

/// meta subcommand: grid evaluation, CSV, optional SVG figures and
/// realization dumps.
int cmd_meta(const RunConfig& cfg, std::ostream& log);

/// validate subcommand: grid evaluation plus deviation report with pass/fail
/// against the configured tolerances.
int cmd_validate(const RunConfig& cfg, std::ostream& log);

/// moments subcommand: tabulates moment_b under both kernels (plus the
/// empirical moment when mc is enabled) for the given real orders.
int cmd_moments(const RunConfig& cfg, const std::vector<double>& b_list,
                std::ostream& log);

}  // namespace upmeta

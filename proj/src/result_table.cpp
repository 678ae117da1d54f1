#include "upmeta/result_table.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace upmeta {

namespace {

std::string fmt(double v, const char* spec = "%.10g") {
    char buf[48];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

}  // namespace

std::string to_csv(const ResultTable& table, bool include_runtime) {
    std::ostringstream os;
    os << "# upmeta-results v" << table.version << "\n";
    os << "# seed=" << table.seed << "\n";
    os << "# bs_density_per_m2=" << fmt(table.bs_density) << "\n";
    if (!table.tolerances.empty()) os << "# tolerances=" << table.tolerances << "\n";
    os << "method,epsilon,theta_db,gamma,value,ci,runtime_ms\n";
    for (const auto& r : table.rows) {
        os << r.method << ',' << fmt(r.epsilon) << ',' << fmt(r.theta_db) << ','
           << fmt(r.gamma) << ',' << fmt(r.value) << ',';
        if (r.ci_halfwidth) os << fmt(*r.ci_halfwidth);
        os << ',';
        if (include_runtime) os << fmt(r.runtime_ms, "%.3f");
        os << '\n';
    }
    return os.str();
}

void write_csv(const ResultTable& table, std::ostream& os) { os << to_csv(table); }

}  // namespace upmeta

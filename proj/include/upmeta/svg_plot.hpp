#pragma once

// Minimal self-contained SVG line plots: axes, ticks, one polyline per
// curve, inline legend. No external assets.

#include <iosfwd>
#include <string>
#include <vector>

namespace upmeta {

struct PlotCurve {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

struct PlotSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    double y_min = 0.0;
    double y_max = 1.0;
    std::vector<PlotCurve> curves;
};

void write_svg(const PlotSpec& spec, std::ostream& os);

}  // namespace upmeta

#include "upmeta/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace upmeta {

namespace {

constexpr int kWidth = 720;
constexpr int kHeight = 480;
constexpr int kMarginL = 64, kMarginR = 16, kMarginT = 40, kMarginB = 48;

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                         "#ff7f0e", "#8c564b", "#17becf"};

std::string num_text(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

}  // namespace

void write_svg(const PlotSpec& spec, std::ostream& os) {
    double x_min = std::numeric_limits<double>::infinity();
    double x_max = -x_min;
    for (const auto& c : spec.curves) {
        for (double x : c.x) {
            x_min = std::min(x_min, x);
            x_max = std::max(x_max, x);
        }
    }
    if (!(x_min < x_max)) {
        x_min = 0.0;
        x_max = 1.0;
    }
    const double y_min = spec.y_min, y_max = spec.y_max;

    const double plot_w = kWidth - kMarginL - kMarginR;
    const double plot_h = kHeight - kMarginT - kMarginB;
    auto px = [&](double x) { return kMarginL + (x - x_min) / (x_max - x_min) * plot_w; };
    auto py = [&](double y) { return kMarginT + (y_max - y) / (y_max - y_min) * plot_h; };

    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
       << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight
       << "\">\n"
       << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    os << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" "
       << "font-family=\"sans-serif\" font-size=\"15\">" << spec.title << "</text>\n";

    // frame and ticks
    os << "<rect x=\"" << kMarginL << "\" y=\"" << kMarginT << "\" width=\"" << plot_w
       << "\" height=\"" << plot_h << "\" fill=\"none\" stroke=\"#333\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        const double fx = x_min + (x_max - x_min) * i / 5.0;
        const double fy = y_min + (y_max - y_min) * i / 5.0;
        os << "<line x1=\"" << px(fx) << "\" y1=\"" << kMarginT + plot_h << "\" x2=\""
           << px(fx) << "\" y2=\"" << kMarginT + plot_h + 5 << "\" stroke=\"#333\"/>\n"
           << "<text x=\"" << px(fx) << "\" y=\"" << kMarginT + plot_h + 20
           << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
           << num_text(fx) << "</text>\n";
        os << "<line x1=\"" << kMarginL - 5 << "\" y1=\"" << py(fy) << "\" x2=\""
           << kMarginL << "\" y2=\"" << py(fy) << "\" stroke=\"#333\"/>\n"
           << "<text x=\"" << kMarginL - 8 << "\" y=\"" << py(fy) + 4
           << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
           << num_text(fy) << "</text>\n";
        os << "<line x1=\"" << kMarginL << "\" y1=\"" << py(fy) << "\" x2=\""
           << kMarginL + plot_w << "\" y2=\"" << py(fy)
           << "\" stroke=\"#ddd\" stroke-width=\"0.5\"/>\n";
    }
    os << "<text x=\"" << kMarginL + plot_w / 2 << "\" y=\"" << kHeight - 8
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
       << spec.x_label << "</text>\n";
    os << "<text x=\"16\" y=\"" << kMarginT + plot_h / 2
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
       << "transform=\"rotate(-90 16 " << kMarginT + plot_h / 2 << ")\">" << spec.y_label
       << "</text>\n";

    for (std::size_t c = 0; c < spec.curves.size(); ++c) {
        const auto& curve = spec.curves[c];
        const char* color = kColors[c % (sizeof(kColors) / sizeof(kColors[0]))];
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.8\" points=\"";
        for (std::size_t i = 0; i < curve.x.size(); ++i) {
            if (std::isnan(curve.y[i])) continue;
            os << px(curve.x[i]) << ',' << py(curve.y[i]) << ' ';
        }
        os << "\"/>\n";
        const double ly = kMarginT + 14 + 16 * static_cast<double>(c);
        os << "<line x1=\"" << kMarginL + 10 << "\" y1=\"" << ly << "\" x2=\""
           << kMarginL + 34 << "\" y2=\"" << ly << "\" stroke=\"" << color
           << "\" stroke-width=\"2\"/>\n"
           << "<text x=\"" << kMarginL + 40 << "\" y=\"" << ly + 4
           << "\" font-family=\"sans-serif\" font-size=\"12\">" << curve.label
           << "</text>\n";
    }
    os << "</svg>\n";
}

}  // namespace upmeta

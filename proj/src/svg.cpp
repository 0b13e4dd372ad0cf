#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "afem/bench.hpp"

namespace afem {

namespace {

struct Axis {
    double lo = 0.0, hi = 1.0; // log10 range
    double px0 = 0.0, px1 = 1.0;
    double map(double v) const { return px0 + (std::log10(v) - lo) / (hi - lo) * (px1 - px0); }
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

} // namespace

void write_loglog_svg(const std::string& path, const std::string& x_label,
                      const std::string& y_label, std::span<const PlotSeries> series) {
    double x_lo = 0, x_hi = 0, y_lo = 0, y_hi = 0;
    bool first = true;
    for (const auto& s : series)
        for (const auto& [x, y] : s.points) {
            if (!(x > 0.0) || !(y > 0.0)) continue;
            const double lx = std::log10(x), ly = std::log10(y);
            if (first) {
                x_lo = x_hi = lx;
                y_lo = y_hi = ly;
                first = false;
            } else {
                x_lo = std::min(x_lo, lx);
                x_hi = std::max(x_hi, lx);
                y_lo = std::min(y_lo, ly);
                y_hi = std::max(y_hi, ly);
            }
        }
    if (first) throw std::invalid_argument("write_loglog_svg: no positive data");
    x_lo = std::floor(x_lo - 0.05);
    x_hi = std::ceil(x_hi + 0.05);
    y_lo = std::floor(y_lo - 0.05);
    y_hi = std::ceil(y_hi + 0.05);

    const double width = 760, height = 560;
    Axis ax{x_lo, x_hi, 70, width - 20};
    Axis ay{y_lo, y_hi, height - 50, 20}; // y flipped

    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
       << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    // decade grid + tick labels
    for (int d = static_cast<int>(x_lo); d <= static_cast<int>(x_hi); ++d) {
        const double px = ax.map(std::pow(10.0, d));
        os << "<line x1=\"" << fmt(px) << "\" y1=\"" << fmt(ay.px1) << "\" x2=\"" << fmt(px)
           << "\" y2=\"" << fmt(ay.px0) << "\" stroke=\"#dddddd\"/>\n";
        os << "<text x=\"" << fmt(px) << "\" y=\"" << fmt(ay.px0 + 18)
           << "\" font-size=\"12\" text-anchor=\"middle\">1e" << d << "</text>\n";
    }
    for (int d = static_cast<int>(y_lo); d <= static_cast<int>(y_hi); ++d) {
        const double py = ay.map(std::pow(10.0, d));
        os << "<line x1=\"" << fmt(ax.px0) << "\" y1=\"" << fmt(py) << "\" x2=\"" << fmt(ax.px1)
           << "\" y2=\"" << fmt(py) << "\" stroke=\"#dddddd\"/>\n";
        os << "<text x=\"" << fmt(ax.px0 - 6) << "\" y=\"" << fmt(py + 4)
           << "\" font-size=\"12\" text-anchor=\"end\">1e" << d << "</text>\n";
    }
    os << "<rect x=\"" << fmt(ax.px0) << "\" y=\"" << fmt(ay.px1) << "\" width=\""
       << fmt(ax.px1 - ax.px0) << "\" height=\"" << fmt(ay.px0 - ay.px1)
       << "\" fill=\"none\" stroke=\"#333333\"/>\n";
    os << "<text x=\"" << fmt(0.5 * (ax.px0 + ax.px1)) << "\" y=\"" << fmt(height - 12)
       << "\" font-size=\"14\" text-anchor=\"middle\">" << x_label << "</text>\n";
    os << "<text x=\"16\" y=\"" << fmt(0.5 * (ay.px0 + ay.px1))
       << "\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
       << fmt(0.5 * (ay.px0 + ay.px1)) << ")\">" << y_label << "</text>\n";

    double legend_y = 34;
    for (const auto& s : series) {
        if (s.points.empty()) continue;
        os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\"";
        if (s.dashed) os << " stroke-dasharray=\"6 4\"";
        os << " points=\"";
        for (const auto& [x, y] : s.points) os << fmt(ax.map(x)) << "," << fmt(ay.map(y)) << " ";
        os << "\"/>\n";
        if (!s.dashed)
            for (const auto& [x, y] : s.points)
                os << "<circle cx=\"" << fmt(ax.map(x)) << "\" cy=\"" << fmt(ay.map(y))
                   << "\" r=\"2.2\" fill=\"" << s.color << "\"/>\n";
        os << "<line x1=\"" << fmt(ax.px0 + 12) << "\" y1=\"" << fmt(legend_y) << "\" x2=\""
           << fmt(ax.px0 + 44) << "\" y2=\"" << fmt(legend_y) << "\" stroke=\"" << s.color
           << "\" stroke-width=\"1.5\"" << (s.dashed ? " stroke-dasharray=\"6 4\"" : "") << "/>\n";
        os << "<text x=\"" << fmt(ax.px0 + 50) << "\" y=\"" << fmt(legend_y + 4)
           << "\" font-size=\"12\">" << s.name << "</text>\n";
        legend_y += 18;
    }
    os << "</svg>\n";
}

} // namespace afem

#include "smckit/svg_plot.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace smckit {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 480.0;
constexpr double kMarginLeft = 70.0;
constexpr double kMarginRight = 20.0;
constexpr double kMarginTop = 40.0;
constexpr double kMarginBottom = 55.0;

std::string fixed(double v, int precision = 2) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, precision);
    return std::string(buf, res.ptr);
}

std::string tick_label(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 4);
    return std::string(buf, res.ptr);
}

struct Scale {
    double lo = 0.0, hi = 1.0, out_lo = 0.0, out_hi = 1.0;
    double operator()(double v) const {
        return out_lo + (v - lo) / (hi - lo) * (out_hi - out_lo);
    }
};

} // namespace

void write_series_svg(std::ostream& out, const std::string& title, const std::string& x_label,
                      const std::string& y_label, const std::vector<PlotSeries>& series) {
    double x_min = 0.0, x_max = 1.0, y_max = 1.0;
    bool any = false;
    for (const auto& s : series)
        for (const auto& pt : s.points) {
            if (!any) {
                x_min = x_max = pt.x;
                y_max = pt.y + pt.sd;
                any = true;
            } else {
                x_min = std::min(x_min, pt.x);
                x_max = std::max(x_max, pt.x);
                y_max = std::max(y_max, pt.y + pt.sd);
            }
        }
    if (!any) throw std::invalid_argument("write_series_svg: no points");
    if (x_max == x_min) {
        x_min -= 0.5;
        x_max += 0.5;
    }
    if (y_max <= 0.0) y_max = 1.0;
    y_max *= 1.05;

    const Scale sx{x_min, x_max, kMarginLeft, kWidth - kMarginRight};
    const Scale sy{0.0, y_max, kHeight - kMarginBottom, kMarginTop}; // y grows downward

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fixed(kWidth, 0)
        << "\" height=\"" << fixed(kHeight, 0) << "\" viewBox=\"0 0 " << fixed(kWidth, 0) << " "
        << fixed(kHeight, 0) << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << fixed(kWidth / 2) << "\" y=\"22\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"15\">" << title << "</text>\n";

    // axes
    const std::string axis_color = "#333333";
    out << "<line x1=\"" << fixed(kMarginLeft) << "\" y1=\"" << fixed(kHeight - kMarginBottom)
        << "\" x2=\"" << fixed(kWidth - kMarginRight) << "\" y2=\""
        << fixed(kHeight - kMarginBottom) << "\" stroke=\"" << axis_color << "\"/>\n";
    out << "<line x1=\"" << fixed(kMarginLeft) << "\" y1=\"" << fixed(kMarginTop) << "\" x2=\""
        << fixed(kMarginLeft) << "\" y2=\"" << fixed(kHeight - kMarginBottom) << "\" stroke=\""
        << axis_color << "\"/>\n";

    // ticks
    constexpr int kTicks = 5;
    for (int t = 0; t <= kTicks; ++t) {
        const double fx = x_min + (x_max - x_min) * t / kTicks;
        const double px = sx(fx);
        out << "<line x1=\"" << fixed(px) << "\" y1=\"" << fixed(kHeight - kMarginBottom)
            << "\" x2=\"" << fixed(px) << "\" y2=\"" << fixed(kHeight - kMarginBottom + 5)
            << "\" stroke=\"" << axis_color << "\"/>\n";
        out << "<text x=\"" << fixed(px) << "\" y=\"" << fixed(kHeight - kMarginBottom + 20)
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
            << tick_label(fx) << "</text>\n";

        const double fy = y_max * t / kTicks;
        const double py = sy(fy);
        out << "<line x1=\"" << fixed(kMarginLeft - 5) << "\" y1=\"" << fixed(py) << "\" x2=\""
            << fixed(kMarginLeft) << "\" y2=\"" << fixed(py) << "\" stroke=\"" << axis_color
            << "\"/>\n";
        out << "<text x=\"" << fixed(kMarginLeft - 8) << "\" y=\"" << fixed(py + 4)
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
            << tick_label(fy) << "</text>\n";
    }
    out << "<text x=\"" << fixed((kMarginLeft + kWidth - kMarginRight) / 2) << "\" y=\""
        << fixed(kHeight - 12)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << x_label
        << "</text>\n";
    out << "<text x=\"18\" y=\"" << fixed((kMarginTop + kHeight - kMarginBottom) / 2)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
        << "transform=\"rotate(-90 18 " << fixed((kMarginTop + kHeight - kMarginBottom) / 2)
        << ")\">" << y_label << "</text>\n";

    for (const auto& s : series) {
        // error bars
        for (const auto& pt : s.points) {
            if (pt.sd <= 0.0) continue;
            const double px = sx(pt.x);
            const double y_lo = sy(std::max(0.0, pt.y - pt.sd));
            const double y_hi = sy(pt.y + pt.sd);
            out << "<line x1=\"" << fixed(px) << "\" y1=\"" << fixed(y_lo) << "\" x2=\""
                << fixed(px) << "\" y2=\"" << fixed(y_hi) << "\" stroke=\"" << s.color
                << "\" stroke-width=\"1\"/>\n";
            for (const double py : {y_lo, y_hi})
                out << "<line x1=\"" << fixed(px - 3) << "\" y1=\"" << fixed(py) << "\" x2=\""
                    << fixed(px + 3) << "\" y2=\"" << fixed(py) << "\" stroke=\"" << s.color
                    << "\" stroke-width=\"1\"/>\n";
        }
        out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.points.size(); ++i)
            out << (i ? " " : "") << fixed(sx(s.points[i].x)) << ',' << fixed(sy(s.points[i].y));
        out << "\"/>\n";
        for (const auto& pt : s.points)
            out << "<circle cx=\"" << fixed(sx(pt.x)) << "\" cy=\"" << fixed(sy(pt.y))
                << "\" r=\"2.5\" fill=\"" << s.color << "\"/>\n";
    }

    // legend, top right
    const double lx = kWidth - kMarginRight - 170.0;
    double ly = kMarginTop + 8.0;
    for (const auto& s : series) {
        out << "<line x1=\"" << fixed(lx) << "\" y1=\"" << fixed(ly) << "\" x2=\""
            << fixed(lx + 24) << "\" y2=\"" << fixed(ly) << "\" stroke=\"" << s.color
            << "\" stroke-width=\"1.5\"/>\n";
        out << "<text x=\"" << fixed(lx + 30) << "\" y=\"" << fixed(ly + 4)
            << "\" font-family=\"sans-serif\" font-size=\"12\">" << s.label << "</text>\n";
        ly += 18.0;
    }
    out << "</svg>\n";
}

void write_series_svg_file(const std::string& path, const std::string& title,
                           const std::string& x_label, const std::string& y_label,
                           const std::vector<PlotSeries>& series) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    write_series_svg(out, title, x_label, y_label, series);
}

} // namespace smckit

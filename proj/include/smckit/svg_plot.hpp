#ifndef SMCKIT_SVG_PLOT_HPP
#define SMCKIT_SVG_PLOT_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace smckit {

struct SeriesPoint {
    double x = 0.0;
    double y = 0.0;
    double sd = 0.0; // half-height of the error bar; 0 draws none
};

struct PlotSeries {
    std::string label;
    std::string color;
    std::vector<SeriesPoint> points;
};

// Static line plot with error bars, axes, ticks and a legend. Output bytes
// are deterministic for identical input.
void write_series_svg(std::ostream& out, const std::string& title, const std::string& x_label,
                      const std::string& y_label, const std::vector<PlotSeries>& series);

void write_series_svg_file(const std::string& path, const std::string& title,
                           const std::string& x_label, const std::string& y_label,
                           const std::vector<PlotSeries>& series);

} // namespace smckit

#endif

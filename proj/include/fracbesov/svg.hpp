#pragma once

#include <string>
#include <utility>
#include <vector>

namespace fracbesov {

struct PlotSeries {
    std::string label;
    std::vector<std::pair<double, double>> points;
};

// Polyline plot; non-positive y values are dropped when log_y is set.
std::string line_plot_svg(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                          const std::vector<PlotSeries>& series, bool log_y);

// Histogram of the finite entries of `values`.
std::string histogram_svg(const std::string& title, const std::string& xlabel, const std::vector<double>& values,
                          int bins = 20);

}  // namespace fracbesov

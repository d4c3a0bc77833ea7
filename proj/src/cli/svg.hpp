#pragma once

#include <string>
#include <utility>
#include <vector>

namespace openmax::cli {

struct Series {
    std::string name;
    std::vector<std::pair<double, double>> points;
};

struct Chart {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<Series> series;
    // Draw the y = x reference line (ROC charts).
    bool diagonal = false;
    // Axis ranges; computed from the data when lo == hi.
    double x_lo = 0.0, x_hi = 0.0, y_lo = 0.0, y_hi = 0.0;
};

// Self-contained SVG line chart.
std::string render_svg(const Chart& chart);

}  // namespace openmax::cli

#include "cli/svg.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace openmax::cli {

namespace {

constexpr double kWidth = 640;
constexpr double kHeight = 440;
constexpr double kLeft = 64, kRight = 170, kTop = 40, kBottom = 56;

const char* const kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
                                "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#000000"};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

std::string render_svg(const Chart& chart) {
    double x_lo = chart.x_lo, x_hi = chart.x_hi, y_lo = chart.y_lo, y_hi = chart.y_hi;
    if (x_lo == x_hi || y_lo == y_hi) {
        bool first = true;
        for (const auto& s : chart.series) {
            for (auto [x, y] : s.points) {
                if (first) {
                    x_lo = x_hi = x;
                    y_lo = y_hi = y;
                    first = false;
                }
                x_lo = std::min(x_lo, x);
                x_hi = std::max(x_hi, x);
                y_lo = std::min(y_lo, y);
                y_hi = std::max(y_hi, y);
            }
        }
        if (x_hi == x_lo) x_hi = x_lo + 1.0;
        if (y_hi == y_lo) y_hi = y_lo + 1.0;
    }
    const double pw = kWidth - kLeft - kRight;
    const double ph = kHeight - kTop - kBottom;
    auto sx = [&](double x) { return kLeft + (x - x_lo) / (x_hi - x_lo) * pw; };
    auto sy = [&](double y) { return kTop + ph - (y - y_lo) / (y_hi - y_lo) * ph; };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
        << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
        << escape(chart.title) << "</text>\n";
    svg << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << num(pw) << "\" height=\"" << num(ph)
        << "\" fill=\"none\" stroke=\"#333\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        const double fx = x_lo + (x_hi - x_lo) * i / 5.0;
        const double fy = y_lo + (y_hi - y_lo) * i / 5.0;
        svg << "<text x=\"" << num(sx(fx)) << "\" y=\"" << num(kTop + ph + 18) << "\" text-anchor=\"middle\">"
            << num(fx) << "</text>\n";
        svg << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(sy(fy) + 4) << "\" text-anchor=\"end\">" << num(fy)
            << "</text>\n";
        svg << "<line x1=\"" << num(kLeft) << "\" x2=\"" << num(kLeft + pw) << "\" y1=\"" << num(sy(fy)) << "\" y2=\""
            << num(sy(fy)) << "\" stroke=\"#eee\"/>\n";
    }
    svg << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << num(kHeight - 14) << "\" text-anchor=\"middle\">"
        << escape(chart.x_label) << "</text>\n";
    svg << "<text transform=\"translate(16," << num(kTop + ph / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
        << escape(chart.y_label) << "</text>\n";
    if (chart.diagonal) {
        svg << "<line x1=\"" << num(sx(0)) << "\" y1=\"" << num(sy(0)) << "\" x2=\"" << num(sx(1)) << "\" y2=\""
            << num(sy(1)) << "\" stroke=\"#999\" stroke-dasharray=\"4 4\"/>\n";
    }
    for (std::size_t i = 0; i < chart.series.size(); ++i) {
        const auto& s = chart.series[i];
        const char* color = kPalette[i % std::size(kPalette)];
        svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (auto [x, y] : s.points) svg << num(sx(x)) << ',' << num(sy(y)) << ' ';
        svg << "\"/>\n";
        const double ly = kTop + 14 + 16 * static_cast<double>(i);
        svg << "<line x1=\"" << num(kLeft + pw + 12) << "\" x2=\"" << num(kLeft + pw + 32) << "\" y1=\"" << num(ly - 4)
            << "\" y2=\"" << num(ly - 4) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        svg << "<text x=\"" << num(kLeft + pw + 36) << "\" y=\"" << num(ly) << "\">" << escape(s.name) << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace openmax::cli

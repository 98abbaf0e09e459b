#include "fracbesov/svg.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

namespace fracbesov {

namespace {

constexpr double kWidth = 640, kHeight = 400;
constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 50;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

struct Frame {
    double x0, x1, y0, y1;

    double px(double x) const { return kLeft + (x - x0) / (x1 - x0) * (kWidth - kLeft - kRight); }
    double py(double y) const { return kHeight - kBottom - (y - y0) / (y1 - y0) * (kHeight - kTop - kBottom); }
};

void widen(double& lo, double& hi) {
    if (!(hi > lo)) {
        const double pad = lo == 0.0 ? 1.0 : 0.5 * std::abs(lo);
        lo -= pad;
        hi += pad;
    }
}

void header(std::ostringstream& os, const std::string& title) {
    os << std::setprecision(6);
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
       << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(title)
       << "</text>\n";
}

void axes(std::ostringstream& os, const Frame& f, const std::string& xlabel, const std::string& ylabel) {
    os << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << kWidth - kLeft - kRight << "\" height=\""
       << kHeight - kTop - kBottom << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double x = f.x0 + (f.x1 - f.x0) * i / 4.0;
        const double y = f.y0 + (f.y1 - f.y0) * i / 4.0;
        os << "<text x=\"" << f.px(x) << "\" y=\"" << kHeight - kBottom + 16 << "\" text-anchor=\"middle\">" << x
           << "</text>\n";
        os << "<text x=\"" << kLeft - 6 << "\" y=\"" << f.py(y) + 4 << "\" text-anchor=\"end\">" << y << "</text>\n";
    }
    os << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 12 << "\" text-anchor=\"middle\">" << escape(xlabel)
       << "</text>\n";
    os << "<text x=\"16\" y=\"" << kHeight / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
       << kHeight / 2 << ")\">" << escape(ylabel) << "</text>\n";
}

}  // namespace

std::string line_plot_svg(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                          const std::vector<PlotSeries>& series, bool log_y) {
    std::vector<PlotSeries> shown;
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& s : series) {
        PlotSeries t{s.label, {}};
        for (auto [x, y] : s.points) {
            if (log_y) {
                if (!(y > 0.0)) continue;
                y = std::log10(y);
            }
            if (!std::isfinite(x) || !std::isfinite(y)) continue;
            t.points.emplace_back(x, y);
            x0 = std::min(x0, x), x1 = std::max(x1, x);
            y0 = std::min(y0, y), y1 = std::max(y1, y);
        }
        if (!t.points.empty()) shown.push_back(std::move(t));
    }
    if (shown.empty()) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    widen(x0, x1);
    widen(y0, y1);
    const Frame f{x0, x1, y0, y1};

    std::ostringstream os;
    header(os, title);
    axes(os, f, xlabel, log_y ? "log10 " + ylabel : ylabel);
    for (std::size_t i = 0; i < shown.size(); ++i) {
        const char* colour = kPalette[i % std::size(kPalette)];
        os << "<polyline fill=\"none\" stroke=\"" << colour << "\" points=\"";
        for (const auto& [x, y] : shown[i].points) os << f.px(x) << ',' << f.py(y) << ' ';
        os << "\"><title>" << escape(shown[i].label) << "</title></polyline>\n";
        if (i < 10) {
            os << "<text x=\"" << kWidth - kRight - 4 << "\" y=\"" << kTop + 14 * (i + 1) << "\" text-anchor=\"end\" fill=\""
               << colour << "\">" << escape(shown[i].label) << "</text>\n";
        }
    }
    os << "</svg>\n";
    return os.str();
}

std::string histogram_svg(const std::string& title, const std::string& xlabel, const std::vector<double>& values,
                          int bins) {
    std::vector<double> v;
    for (double x : values) {
        if (std::isfinite(x)) v.push_back(x);
    }
    bins = std::max(bins, 1);
    double lo = v.empty() ? 0.0 : *std::min_element(v.begin(), v.end());
    double hi = v.empty() ? 1.0 : *std::max_element(v.begin(), v.end());
    widen(lo, hi);
    std::vector<int> counts(static_cast<std::size_t>(bins), 0);
    for (double x : v) {
        const int b = std::min(bins - 1, static_cast<int>((x - lo) / (hi - lo) * bins));
        ++counts[static_cast<std::size_t>(b)];
    }
    const int top = std::max(1, *std::max_element(counts.begin(), counts.end()));
    const Frame f{lo, hi, 0.0, static_cast<double>(top)};

    std::ostringstream os;
    header(os, title);
    axes(os, f, xlabel, "count");
    const double w = (hi - lo) / bins;
    for (int b = 0; b < bins; ++b) {
        const int c = counts[static_cast<std::size_t>(b)];
        if (c == 0) continue;
        const double xa = f.px(lo + b * w), xb = f.px(lo + (b + 1) * w);
        os << "<rect x=\"" << xa << "\" y=\"" << f.py(c) << "\" width=\"" << std::max(xb - xa - 1.0, 1.0)
           << "\" height=\"" << f.py(0) - f.py(c) << "\" fill=\"" << kPalette[0] << "\"/>\n";
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace fracbesov

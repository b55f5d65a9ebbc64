#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "toxcls/error.hpp"

namespace toxcls {

inline std::string xml_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (const char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out += c;
        }
    }
    return out;
}

inline std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

/// Minimal SVG assembly: fixed-size canvas, shapes appended in draw order.
class SvgBuilder {
  public:
    SvgBuilder(double width, double height) : width_(width), height_(height) {
        if (width <= 0 || height <= 0) throw ArgumentError("svg: canvas must be positive");
        body_ << "<rect x=\"0\" y=\"0\" width=\"" << format_number(width) << "\" height=\""
              << format_number(height) << "\" fill=\"white\"/>\n";
    }

    void circle(double cx, double cy, double r, const std::string& fill) {
        body_ << "<circle cx=\"" << format_number(cx) << "\" cy=\"" << format_number(cy)
              << "\" r=\"" << format_number(r) << "\" fill=\"" << fill << "\"/>\n";
    }

    void rect(double x, double y, double w, double h, const std::string& fill,
              const std::string& stroke = "none") {
        body_ << "<rect x=\"" << format_number(x) << "\" y=\"" << format_number(y)
              << "\" width=\"" << format_number(w) << "\" height=\"" << format_number(h)
              << "\" fill=\"" << fill << "\" stroke=\"" << stroke << "\"/>\n";
    }

    void line(double x1, double y1, double x2, double y2, const std::string& stroke,
              double stroke_width = 1.0) {
        body_ << "<line x1=\"" << format_number(x1) << "\" y1=\"" << format_number(y1)
              << "\" x2=\"" << format_number(x2) << "\" y2=\"" << format_number(y2)
              << "\" stroke=\"" << stroke << "\" stroke-width=\"" << format_number(stroke_width)
              << "\"/>\n";
    }

    void text(double x, double y, const std::string& content, int font_size = 12,
              const std::string& anchor = "start") {
        body_ << "<text x=\"" << format_number(x) << "\" y=\"" << format_number(y)
              << "\" font-family=\"sans-serif\" font-size=\"" << font_size
              << "\" text-anchor=\"" << anchor << "\">" << xml_escape(content) << "</text>\n";
    }

    std::string str() const {
        std::ostringstream out;
        out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
            << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << format_number(width_)
            << "\" height=\"" << format_number(height_) << "\" viewBox=\"0 0 "
            << format_number(width_) << " " << format_number(height_) << "\">\n"
            << body_.str() << "</svg>\n";
        return out.str();
    }

  private:
    double width_, height_;
    std::ostringstream body_;
};

inline const std::vector<std::string>& svg_palette() {
    static const std::vector<std::string> colors = {"#1f77b4", "#d62728", "#2ca02c",
                                                    "#9467bd", "#ff7f0e", "#8c564b"};
    return colors;
}

/// Box-and-whisker chart for one metric: one box per named series. Boxes run
/// from the first to the third quartile (linear-interpolation quantiles),
/// whiskers to the extremes.
inline std::string render_box_plot(const std::string& title,
                                   const std::vector<std::string>& names,
                                   const std::vector<std::vector<double>>& series) {
    if (names.size() != series.size()) throw ArgumentError("box plot: names and series differ");
    if (names.empty()) throw ArgumentError("box plot: nothing to draw");

    double lo = 0.0, hi = 1.0;
    bool any = false;
    for (const auto& values : series)
        for (const double v : values) {
            if (!any) {
                lo = hi = v;
                any = true;
            }
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    if (!any) {
        lo = 0.0;
        hi = 1.0;
    }
    if (hi - lo < 1e-9) {
        lo -= 0.5;
        hi += 0.5;
    }
    const double margin = 0.08 * (hi - lo);
    lo -= margin;
    hi += margin;

    const double width = 120.0 + 90.0 * static_cast<double>(names.size());
    const double height = 360.0;
    const double plot_left = 70.0, plot_top = 50.0, plot_bottom = height - 50.0;
    const auto y_of = [&](double v) {
        return plot_bottom - (v - lo) / (hi - lo) * (plot_bottom - plot_top);
    };
    const auto quantile = [](std::vector<double> sorted, double q) {
        const double pos = q * static_cast<double>(sorted.size() - 1);
        const std::size_t base = static_cast<std::size_t>(pos);
        const double frac = pos - static_cast<double>(base);
        if (base + 1 < sorted.size())
            return sorted[base] * (1.0 - frac) + sorted[base + 1] * frac;
        return sorted[base];
    };

    SvgBuilder svg(width, height);
    svg.text(width / 2.0, 28.0, title, 15, "middle");
    svg.line(plot_left, plot_top, plot_left, plot_bottom, "#333333");
    svg.line(plot_left, plot_bottom, width - 30.0, plot_bottom, "#333333");
    for (int tick = 0; tick <= 4; ++tick) {
        const double v = lo + (hi - lo) * tick / 4.0;
        svg.line(plot_left - 4.0, y_of(v), plot_left, y_of(v), "#333333");
        svg.text(plot_left - 8.0, y_of(v) + 4.0, format_number(v), 11, "end");
    }

    for (std::size_t s = 0; s < series.size(); ++s) {
        const double cx = plot_left + 60.0 + 90.0 * static_cast<double>(s);
        svg.text(cx, plot_bottom + 20.0, names[s], 12, "middle");
        std::vector<double> sorted = series[s];
        if (sorted.empty()) {
            svg.text(cx, (plot_top + plot_bottom) / 2.0, "no data", 11, "middle");
            continue;
        }
        std::sort(sorted.begin(), sorted.end());
        const std::string& color = svg_palette()[s % svg_palette().size()];
        const double q1 = quantile(sorted, 0.25), q2 = quantile(sorted, 0.5),
                     q3 = quantile(sorted, 0.75);
        const double box_w = 44.0;
        svg.line(cx, y_of(sorted.front()), cx, y_of(q1), "#555555");
        svg.line(cx, y_of(q3), cx, y_of(sorted.back()), "#555555");
        svg.line(cx - box_w / 4.0, y_of(sorted.front()), cx + box_w / 4.0, y_of(sorted.front()),
                 "#555555");
        svg.line(cx - box_w / 4.0, y_of(sorted.back()), cx + box_w / 4.0, y_of(sorted.back()),
                 "#555555");
        svg.rect(cx - box_w / 2.0, y_of(q3), box_w, y_of(q1) - y_of(q3), color, "#333333");
        svg.line(cx - box_w / 2.0, y_of(q2), cx + box_w / 2.0, y_of(q2), "#111111", 2.0);
    }
    return svg.str();
}

} // namespace toxcls

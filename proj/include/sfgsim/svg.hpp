#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

namespace sfgsim::svg {

struct Series {
    std::string label;
    std::vector<std::pair<double, double>> points;  // (x, y), all > 0
    bool draw_line = true;
};

namespace detail {

inline std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

inline std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", x);
    return buf;
}

}  // namespace detail

// Minimal log-log scatter/line plot. Output is well-formed SVG by
// construction: fixed element vocabulary, all text content escaped.
inline std::string render_loglog(const std::vector<Series>& series,
                                 const std::string& title,
                                 const std::string& x_label,
                                 const std::string& y_label, int width = 640,
                                 int height = 480) {
    if (series.empty())
        throw std::invalid_argument("render_loglog: no series");
    double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
    bool first = true;
    for (const auto& s : series)
        for (auto [x, y] : s.points) {
            if (!(x > 0.0 && y > 0.0))
                throw std::invalid_argument(
                    "render_loglog: log axes need positive coordinates");
            if (first) {
                xmin = xmax = x;
                ymin = ymax = y;
                first = false;
            }
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
        }
    if (first) throw std::invalid_argument("render_loglog: no points");
    // degenerate ranges get a decade of padding so division below is safe
    if (xmin == xmax) { xmin /= 2; xmax *= 2; }
    if (ymin == ymax) { ymin /= 2; ymax *= 2; }

    const double ml = 70, mr = 20, mt = 40, mb = 50;
    const double pw = width - ml - mr, ph = height - mt - mb;
    auto px = [&](double x) {
        return ml + pw * (std::log10(x) - std::log10(xmin)) /
                         (std::log10(xmax) - std::log10(xmin));
    };
    auto py = [&](double y) {
        return mt + ph * (1.0 - (std::log10(y) - std::log10(ymin)) /
                                    (std::log10(ymax) - std::log10(ymin)));
    };

    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b"};
    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
           std::to_string(width) + "\" height=\"" + std::to_string(height) +
           "\" viewBox=\"0 0 " + std::to_string(width) + " " +
           std::to_string(height) + "\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out += "<text x=\"" + detail::num(width / 2.0) +
           "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"16\">" + detail::escape(title) + "</text>\n";

    // decade grid lines and tick labels
    for (int d = int(std::ceil(std::log10(xmin))); d <= int(std::floor(std::log10(xmax))); ++d) {
        double x = std::pow(10.0, d);
        out += "<line x1=\"" + detail::num(px(x)) + "\" y1=\"" + detail::num(mt) +
               "\" x2=\"" + detail::num(px(x)) + "\" y2=\"" + detail::num(mt + ph) +
               "\" stroke=\"#dddddd\"/>\n";
        out += "<text x=\"" + detail::num(px(x)) + "\" y=\"" +
               detail::num(mt + ph + 18) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
               "font-size=\"11\">1e" + std::to_string(d) + "</text>\n";
    }
    for (int d = int(std::ceil(std::log10(ymin))); d <= int(std::floor(std::log10(ymax))); ++d) {
        double y = std::pow(10.0, d);
        out += "<line x1=\"" + detail::num(ml) + "\" y1=\"" + detail::num(py(y)) +
               "\" x2=\"" + detail::num(ml + pw) + "\" y2=\"" + detail::num(py(y)) +
               "\" stroke=\"#dddddd\"/>\n";
        out += "<text x=\"" + detail::num(ml - 6) + "\" y=\"" +
               detail::num(py(y) + 4) +
               "\" text-anchor=\"end\" font-family=\"sans-serif\" "
               "font-size=\"11\">1e" + std::to_string(d) + "</text>\n";
    }
    out += "<rect x=\"" + detail::num(ml) + "\" y=\"" + detail::num(mt) +
           "\" width=\"" + detail::num(pw) + "\" height=\"" + detail::num(ph) +
           "\" fill=\"none\" stroke=\"black\"/>\n";
    out += "<text x=\"" + detail::num(ml + pw / 2) + "\" y=\"" +
           detail::num(double(height) - 10) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" +
           detail::escape(x_label) + "</text>\n";
    out += "<text x=\"18\" y=\"" + detail::num(mt + ph / 2) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
           "transform=\"rotate(-90 18 " + detail::num(mt + ph / 2) + ")\">" +
           detail::escape(y_label) + "</text>\n";

    for (std::size_t si = 0; si < series.size(); ++si) {
        const auto& s = series[si];
        const char* color = palette[si % (sizeof palette / sizeof *palette)];
        if (s.draw_line && s.points.size() > 1) {
            std::string path = "M";
            for (auto [x, y] : s.points)
                path += " " + detail::num(px(x)) + " " + detail::num(py(y));
            out += "<path d=\"" + path + "\" fill=\"none\" stroke=\"" + color +
                   "\" stroke-width=\"1.5\"/>\n";
        }
        for (auto [x, y] : s.points)
            out += "<circle cx=\"" + detail::num(px(x)) + "\" cy=\"" +
                   detail::num(py(y)) + "\" r=\"3\" fill=\"" + color + "\"/>\n";
        out += "<text x=\"" + detail::num(ml + pw - 8) + "\" y=\"" +
               detail::num(mt + 16 + 16.0 * double(si)) +
               "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\" "
               "fill=\"" + std::string(color) + "\">" + detail::escape(s.label) +
               "</text>\n";
    }
    out += "</svg>\n";
    return out;
}

}  // namespace sfgsim::svg

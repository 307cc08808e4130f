#pragma once

// Self-contained SVG charts. Every mark carries its number in a data-value
// attribute so tests (and scripts) can read values back without rendering.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <span>
#include <string>
#include <vector>

#include "langsim/grid.hpp"
#include "langsim/text.hpp"

namespace langsim {

inline std::string xml_escape(std::string_view s) {
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

namespace detail {

inline std::string px(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

}  // namespace detail

/// Horizontal bars in the given order (rank 1 at the top).
inline std::string bar_chart_svg(std::string_view title, const std::vector<std::string>& labels,
                                 std::span<const double> values) {
    const double label_w = 120, bar_w = 420, row_h = 20, top = 36;
    const double width = label_w + bar_w + 110;
    const double height = top + row_h * static_cast<double>(labels.size()) + 12;
    double hi = 0.0;
    for (double v : values) hi = std::max(hi, v);

    std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + detail::px(width) + "\" height=\"" +
                      detail::px(height) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out += "<title>" + xml_escape(title) + "</title>\n";
    out += "<text x=\"8\" y=\"20\" font-size=\"14\">" + xml_escape(title) + "</text>\n";
    for (std::size_t k = 0; k < labels.size(); ++k) {
        const double y = top + row_h * static_cast<double>(k);
        const double w = hi > 0 ? bar_w * values[k] / hi : 0.0;
        out += "<g class=\"bar\" data-rank=\"" + std::to_string(k + 1) + "\" data-label=\"" + xml_escape(labels[k]) +
               "\" data-value=\"" + format_exact(values[k]) + "\">";
        out += "<text x=\"" + detail::px(label_w - 6) + "\" y=\"" + detail::px(y + 14) + "\" text-anchor=\"end\">" +
               xml_escape(labels[k]) + "</text>";
        out += "<rect x=\"" + detail::px(label_w) + "\" y=\"" + detail::px(y + 3) + "\" width=\"" + detail::px(w) +
               "\" height=\"" + detail::px(row_h - 6) + "\" fill=\"#4a78a8\"/>";
        out += "<text x=\"" + detail::px(label_w + w + 4) + "\" y=\"" + detail::px(y + 14) + "\">" +
               format_number(values[k], 4) + "</text></g>\n";
    }
    out += "</svg>\n";
    return out;
}

/// Cell (i, j) shaded by value in [0, 1]; rows of `empty_rows` drawn grey.
inline std::string heatmap_svg(std::string_view title, const std::vector<std::string>& row_labels,
                               const std::vector<std::string>& col_labels, const Matrix& m,
                               const std::vector<bool>& empty_rows = {}) {
    const double cell = 22, left = 110, top = 110;
    const double width = left + cell * static_cast<double>(col_labels.size()) + 10;
    const double height = top + cell * static_cast<double>(row_labels.size()) + 10;
    std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + detail::px(width) + "\" height=\"" +
                      detail::px(height) + "\" font-family=\"sans-serif\" font-size=\"10\">\n";
    out += "<title>" + xml_escape(title) + "</title>\n";
    out += "<text x=\"8\" y=\"16\" font-size=\"14\">" + xml_escape(title) + "</text>\n";
    for (std::size_t j = 0; j < col_labels.size(); ++j) {
        const double x = left + cell * static_cast<double>(j) + cell / 2;
        out += "<text transform=\"translate(" + detail::px(x) + "," + detail::px(top - 4) + ") rotate(-60)\">" +
               xml_escape(col_labels[j]) + "</text>\n";
    }
    for (std::size_t i = 0; i < row_labels.size(); ++i) {
        const double y = top + cell * static_cast<double>(i);
        out += "<text x=\"" + detail::px(left - 4) + "\" y=\"" + detail::px(y + 15) + "\" text-anchor=\"end\">" +
               xml_escape(row_labels[i]) + "</text>\n";
        const bool empty = i < empty_rows.size() && empty_rows[i];
        for (std::size_t j = 0; j < col_labels.size(); ++j) {
            const double v = m(i, j);
            const int shade = static_cast<int>(std::lround(255.0 * (1.0 - std::clamp(v, 0.0, 1.0))));
            char fill[8];
            std::snprintf(fill, sizeof fill, "#%02x%02xff", shade, shade);
            out += "<rect class=\"cell\" x=\"" + detail::px(left + cell * static_cast<double>(j)) + "\" y=\"" +
                   detail::px(y) + "\" width=\"" + detail::px(cell - 1) + "\" height=\"" + detail::px(cell - 1) +
                   "\" fill=\"" + (empty ? std::string("#cccccc") : std::string(fill)) + "\" data-row=\"" +
                   std::to_string(i) + "\" data-col=\"" + std::to_string(j) + "\" data-value=\"" + format_exact(v) +
                   "\"" + (empty ? " data-empty=\"1\"" : "") + "/>\n";
        }
    }
    out += "</svg>\n";
    return out;
}

}  // namespace langsim

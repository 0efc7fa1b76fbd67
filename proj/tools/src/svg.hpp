#pragma once

#include <string>
#include <vector>

namespace fbmm::cli {

struct Series {
    std::string name;
    std::string color;
    std::vector<double> x;
    std::vector<double> y;
};

struct LineChart {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<Series> series;
    int width = 800;
    int height = 500;
};

/// Static SVG document with axes, five ticks per axis and a legend.
std::string render_svg(const LineChart& chart);

/// Escapes &, <, >, " and ' for use in XML text and attributes.
std::string xml_escape(const std::string& text);

}  // namespace fbmm::cli

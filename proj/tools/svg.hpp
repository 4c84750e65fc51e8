#pragma once

#include <string>
#include <utility>
#include <vector>

namespace hfol::svg {

struct Series {
    std::vector<std::pair<double, double>> points;
    std::string label;
    std::string stroke = "#1f4e79";
    double width = 1.0;
};

/// Minimal line chart; output depends only on the inputs.
struct Plot {
    std::string title;
    std::string xlabel, ylabel;
    double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
    std::vector<Series> series;
    std::vector<std::pair<double, std::string>> hlines;   // reference levels

    std::string render(int width = 640, int height = 480) const;
};

} // namespace hfol::svg

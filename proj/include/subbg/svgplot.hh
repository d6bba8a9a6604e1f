// Minimal SVG line plots for spectrum reports; log or linear axes.
#pragma once

#include <string>
#include <vector>

namespace subbg {

struct SvgSeries {
    std::vector<double> x, y;
    std::string color = "#1f77b4";
    std::string label;
    bool steps = false;  // histogram-style
};

struct SvgPlot {
    int width = 800, height = 520;
    bool logx = false, logy = false;
    std::string title, xlabel, ylabel;
    std::vector<SvgSeries> series;

    void add(SvgSeries s) { series.push_back(std::move(s)); }
    void write(const std::string& path) const;
};

}  // namespace subbg

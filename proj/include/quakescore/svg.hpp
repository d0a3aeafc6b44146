#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace quakescore {
namespace svg {

// Just enough static SVG to render the shipped diagrams: polylines on
// a linear axis frame with optional tick relabeling and filled bands.
// Plot-ready values always live in the CSV next to the picture; this
// layer never computes anything.

struct Series {
    std::string label;
    std::string color;
    std::vector<double> x, y;
    bool dotted = false;
};

struct Tick {
    double value;
    std::string label;
};

struct Band {
    std::string color; // fill, drawn behind series
    std::vector<double> x, lower, upper;
};

struct TopBar {
    // Colored strip above the frame: segment i spans x[i]..x[i+1] and
    // uses colors[i] (empty string = gap).
    std::vector<double> x;
    std::vector<std::string> colors;
};

struct Chart {
    std::string title;
    std::string x_label, y_label;
    std::vector<Tick> x_ticks, y_ticks;
    std::vector<Tick> top_ticks;
    std::vector<Series> series;
    std::vector<Band> bands;
    std::vector<TopBar> bars;
    bool diagonal = false; // reference diagonal y = x
    int width = 640, height = 480;
};

void write_chart(const std::filesystem::path& path, const Chart& chart);

// Fixed palette used across the shipped diagrams.
const std::string& palette_color(std::size_t index);

struct ScatterPoint {
    double x, y;
    std::string label;
    std::string color;
};

struct ScatterChart {
    std::string title;
    std::string x_label, y_label;
    std::vector<ScatterPoint> points;
    // Dotted connectors between point indices (equal-performance pairs).
    std::vector<std::pair<std::size_t, std::size_t>> links;
    int width = 520, height = 480;
};

void write_scatter(const std::filesystem::path& path, const ScatterChart& chart);

} // namespace svg
} // namespace quakescore

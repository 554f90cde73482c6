#pragma once

#include <string>
#include <vector>

namespace voiplan {

// Minimal deterministic SVG line charts: fixed canvas, computed axes, one
// polyline per series. No external renderer; output bytes depend only on
// the inputs.
struct Series {
    std::string label;
    std::vector<double> xs;
    std::vector<double> ys;
};

struct LineChart {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<Series> series;
    int width = 640;
    int height = 400;
};

std::string render_svg(const LineChart& chart);
void write_svg(const LineChart& chart, const std::string& path);

// Builds a chart from one of the result CSVs: the sweep table (one series
// per policy over the swept values) or the case-study per-slot series (one
// series per policy column). Throws on an unrecognized header or a table
// with no data rows.
LineChart chart_from_csv(const std::string& csv);

} // namespace voiplan

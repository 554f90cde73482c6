#include "voiplan/plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "voiplan/errors.hpp"
#include "voiplan/text.hpp"

namespace voiplan {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
constexpr std::size_t kPaletteSize = sizeof(kPalette) / sizeof(kPalette[0]);

std::string escape_xml(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
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

struct Range {
    double lo = 0.0;
    double hi = 1.0;
};

Range padded(double lo, double hi) {
    if (lo == hi) {
        // Degenerate axis: widen around the single value.
        const double pad = std::abs(lo) > 0.0 ? std::abs(lo) * 0.1 : 1.0;
        return {lo - pad, hi + pad};
    }
    const double pad = (hi - lo) * 0.05;
    return {lo - pad, hi + pad};
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) fields.push_back(field);
    return fields;
}

double parse_number(const std::string& text) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw error("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw error("not a number in CSV: " + text);
    }
}

} // namespace

std::string render_svg(const LineChart& chart) {
    if (chart.series.empty()) {
        throw contract_error("render_svg: no series to plot");
    }
    for (const auto& s : chart.series) {
        if (s.xs.size() != s.ys.size()) {
            throw contract_error("render_svg: series " + s.label + " has mismatched lengths");
        }
        if (s.xs.empty()) {
            throw contract_error("render_svg: series " + s.label + " is empty");
        }
    }

    double x_lo = chart.series[0].xs[0];
    double x_hi = x_lo;
    double y_lo = chart.series[0].ys[0];
    double y_hi = y_lo;
    for (const auto& s : chart.series) {
        for (double x : s.xs) {
            x_lo = std::min(x_lo, x);
            x_hi = std::max(x_hi, x);
        }
        for (double y : s.ys) {
            y_lo = std::min(y_lo, y);
            y_hi = std::max(y_hi, y);
        }
    }
    const Range xr = padded(x_lo, x_hi);
    const Range yr = padded(y_lo, y_hi);

    const double left = 78.0;
    const double right = static_cast<double>(chart.width) - 20.0;
    const double top = 34.0;
    const double bottom = static_cast<double>(chart.height) - 48.0;
    const auto px = [&](double x) {
        return left + (x - xr.lo) / (xr.hi - xr.lo) * (right - left);
    };
    const auto py = [&](double y) {
        return bottom - (y - yr.lo) / (yr.hi - yr.lo) * (bottom - top);
    };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << chart.width << "\" height=\""
        << chart.height << "\" viewBox=\"0 0 " << chart.width << ' ' << chart.height << "\">\n";
    out << "<rect width=\"" << chart.width << "\" height=\"" << chart.height
        << "\" fill=\"white\"/>\n";
    out << "<text x=\"" << format_double((left + right) / 2.0)
        << "\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">"
        << escape_xml(chart.title) << "</text>\n";

    // Axes with four intervals of ticks on each.
    out << "<line x1=\"" << format_double(left) << "\" y1=\"" << format_double(bottom)
        << "\" x2=\"" << format_double(right) << "\" y2=\"" << format_double(bottom)
        << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << format_double(left) << "\" y1=\"" << format_double(top) << "\" x2=\""
        << format_double(left) << "\" y2=\"" << format_double(bottom)
        << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double fx = xr.lo + (xr.hi - xr.lo) * static_cast<double>(i) / 4.0;
        const double fy = yr.lo + (yr.hi - yr.lo) * static_cast<double>(i) / 4.0;
        out << "<line x1=\"" << format_double(px(fx)) << "\" y1=\"" << format_double(bottom)
            << "\" x2=\"" << format_double(px(fx)) << "\" y2=\"" << format_double(bottom + 5.0)
            << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << format_double(px(fx)) << "\" y=\"" << format_double(bottom + 18.0)
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">"
            << escape_xml(format_double(fx)) << "</text>\n";
        out << "<line x1=\"" << format_double(left - 5.0) << "\" y1=\"" << format_double(py(fy))
            << "\" x2=\"" << format_double(left) << "\" y2=\"" << format_double(py(fy))
            << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << format_double(left - 8.0) << "\" y=\"" << format_double(py(fy) + 3.0)
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">"
            << escape_xml(format_double(fy)) << "</text>\n";
    }
    out << "<text x=\"" << format_double((left + right) / 2.0) << "\" y=\""
        << format_double(static_cast<double>(chart.height) - 10.0)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
        << escape_xml(chart.x_label) << "</text>\n";
    out << "<text x=\"16\" y=\"" << format_double((top + bottom) / 2.0)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 16 "
        << format_double((top + bottom) / 2.0) << ")\">" << escape_xml(chart.y_label)
        << "</text>\n";

    for (std::size_t k = 0; k < chart.series.size(); ++k) {
        const auto& s = chart.series[k];
        const char* color = kPalette[k % kPaletteSize];
        if (s.xs.size() > 1) {
            out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
            for (std::size_t i = 0; i < s.xs.size(); ++i) {
                if (i) out << ' ';
                out << format_double(px(s.xs[i])) << ',' << format_double(py(s.ys[i]));
            }
            out << "\"/>\n";
        }
        for (std::size_t i = 0; i < s.xs.size(); ++i) {
            out << "<circle cx=\"" << format_double(px(s.xs[i])) << "\" cy=\""
                << format_double(py(s.ys[i])) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
        }
        // Legend entry.
        const double ly = top + 6.0 + 16.0 * static_cast<double>(k);
        out << "<rect x=\"" << format_double(right - 130.0) << "\" y=\"" << format_double(ly - 8.0)
            << "\" width=\"10\" height=\"10\" fill=\"" << color << "\"/>\n";
        out << "<text x=\"" << format_double(right - 116.0) << "\" y=\"" << format_double(ly + 1.0)
            << "\" font-family=\"sans-serif\" font-size=\"11\">" << escape_xml(s.label)
            << "</text>\n";
    }
    out << "</svg>\n";
    return out.str();
}

void write_svg(const LineChart& chart, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw error("cannot open for writing: " + path);
    }
    out << render_svg(chart);
    if (!out) {
        throw error("write failed: " + path);
    }
}

LineChart chart_from_csv(const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    if (!std::getline(in, line)) {
        throw contract_error("chart: empty table");
    }
    const std::string header_line = line;
    const auto header = split(line);
    if (header.empty()) {
        throw contract_error("chart: empty table");
    }

    LineChart chart;
    if (header[0] == "t") {
        // Case-study series table: t plus one VoI column per policy.
        chart.title = "Average VoI over time";
        chart.x_label = "slot";
        chart.y_label = "mean VoI (bits/s)";
        chart.series.resize(header.size() - 1);
        for (std::size_t k = 1; k < header.size(); ++k) {
            chart.series[k - 1].label = header[k];
        }
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const auto fields = split(line);
            if (fields.size() != header.size()) {
                throw error("chart: ragged CSV row: " + line);
            }
            const double t = parse_number(fields[0]);
            for (std::size_t k = 1; k < fields.size(); ++k) {
                chart.series[k - 1].xs.push_back(t);
                chart.series[k - 1].ys.push_back(parse_number(fields[k]));
            }
        }
        if (chart.series.empty() || chart.series[0].xs.empty()) {
            throw contract_error("chart: empty table");
        }
        return chart;
    }

    if (header.size() >= 5 && header[0] == "parameter" && header[1] == "value" &&
        header[2] == "policy" && header[4] == "mean_min_voi") {
        chart.y_label = "time-average min VoI (bits/s)";
        std::string parameter;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const auto fields = split(line);
            if (fields.size() != header.size()) {
                throw error("chart: ragged CSV row: " + line);
            }
            parameter = fields[0];
            const double value = parse_number(fields[1]);
            const double y = parse_number(fields[4]);
            auto it = std::find_if(chart.series.begin(), chart.series.end(),
                                   [&](const Series& s) { return s.label == fields[2]; });
            if (it == chart.series.end()) {
                chart.series.push_back({fields[2], {}, {}});
                it = std::prev(chart.series.end());
            }
            it->xs.push_back(value);
            it->ys.push_back(y);
        }
        if (chart.series.empty()) {
            throw contract_error("chart: empty table");
        }
        chart.title = "Time-average min VoI vs " + parameter;
        chart.x_label = parameter;
        return chart;
    }

    throw error("chart: unrecognized CSV header: " + header_line);
}

} // namespace voiplan

#include "quakescore/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "quakescore/errors.hpp"

namespace quakescore {
namespace svg {

namespace {

const std::vector<std::string> kPalette = {
    "#1b6ca8", "#d1495b", "#66a182", "#edae49", "#8d5a97", "#2e4057", "#00798c", "#c17c74",
};

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    void include(double v) {
        if (!std::isfinite(v)) return;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void pad() {
        if (!(lo < hi)) {
            lo -= 1.0;
            hi += 1.0;
        }
        double margin = 0.04 * (hi - lo);
        lo -= margin;
        hi += margin;
    }
};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            default: out += c;
        }
    }
    return out;
}

} // namespace

const std::string& palette_color(std::size_t index) { return kPalette[index % kPalette.size()]; }

void write_chart(const std::filesystem::path& path, const Chart& chart) {
    const double ml = 64, mr = 20, mt = chart.bars.empty() ? 40 : 56, mb = 48;
    const double pw = chart.width - ml - mr, ph = chart.height - mt - mb;

    Range rx, ry;
    for (const auto& s : chart.series) {
        for (double v : s.x) rx.include(v);
        for (double v : s.y) ry.include(v);
    }
    for (const auto& b : chart.bands) {
        for (double v : b.x) rx.include(v);
        for (double v : b.lower) ry.include(v);
        for (double v : b.upper) ry.include(v);
    }
    if (chart.diagonal) {
        ry.include(rx.lo);
        ry.include(rx.hi);
    }
    rx.pad();
    ry.pad();

    auto X = [&](double v) { return ml + (v - rx.lo) / (rx.hi - rx.lo) * pw; };
    auto Y = [&](double v) { return mt + ph - (v - ry.lo) / (ry.hi - ry.lo) * ph; };

    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write '" + path.string() + "'");
    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << chart.width << "' height='"
        << chart.height << "' font-family='sans-serif' font-size='11'>\n";
    out << "<rect width='100%' height='100%' fill='white'/>\n";
    out << "<text x='" << ml << "' y='18' font-size='14'>" << escape(chart.title) << "</text>\n";

    for (const auto& band : chart.bands) {
        out << "<polygon fill='" << band.color << "' fill-opacity='0.35' stroke='none' points='";
        for (std::size_t i = 0; i < band.x.size(); ++i)
            out << num(X(band.x[i])) << ',' << num(Y(band.upper[i])) << ' ';
        for (std::size_t i = band.x.size(); i-- > 0;)
            out << num(X(band.x[i])) << ',' << num(Y(band.lower[i])) << ' ';
        out << "'/>\n";
    }

    out << "<rect x='" << ml << "' y='" << mt << "' width='" << pw << "' height='" << ph
        << "' fill='none' stroke='#444'/>\n";

    for (const auto& t : chart.x_ticks) {
        double x = X(t.value);
        out << "<line x1='" << num(x) << "' y1='" << num(mt + ph) << "' x2='" << num(x) << "' y2='"
            << num(mt + ph + 5) << "' stroke='#444'/>\n";
        out << "<text x='" << num(x) << "' y='" << num(mt + ph + 18)
            << "' text-anchor='middle'>" << escape(t.label) << "</text>\n";
    }
    for (const auto& t : chart.y_ticks) {
        double y = Y(t.value);
        out << "<line x1='" << num(ml - 5) << "' y1='" << num(y) << "' x2='" << num(ml) << "' y2='"
            << num(y) << "' stroke='#444'/>\n";
        out << "<text x='" << num(ml - 8) << "' y='" << num(y + 4)
            << "' text-anchor='end'>" << escape(t.label) << "</text>\n";
    }
    for (const auto& t : chart.top_ticks) {
        double x = X(t.value);
        out << "<line x1='" << num(x) << "' y1='" << num(mt - 5) << "' x2='" << num(x) << "' y2='"
            << num(mt) << "' stroke='#444'/>\n";
        out << "<text x='" << num(x) << "' y='" << num(mt - 8)
            << "' text-anchor='middle'>" << escape(t.label) << "</text>\n";
    }

    for (const auto& bar : chart.bars) {
        for (std::size_t i = 0; i + 1 < bar.x.size(); ++i) {
            if (bar.colors[i].empty()) continue;
            double x0 = X(bar.x[i]), x1 = X(bar.x[i + 1]);
            out << "<rect x='" << num(x0) << "' y='" << num(mt - 26) << "' width='"
                << num(x1 - x0) << "' height='8' fill='" << bar.colors[i] << "'/>\n";
        }
    }

    if (chart.diagonal) {
        double lo = std::max(rx.lo, ry.lo), hi = std::min(rx.hi, ry.hi);
        out << "<line x1='" << num(X(lo)) << "' y1='" << num(Y(lo)) << "' x2='" << num(X(hi))
            << "' y2='" << num(Y(hi)) << "' stroke='#999' stroke-dasharray='4 3'/>\n";
    }

    for (const auto& s : chart.series) {
        out << "<polyline fill='none' stroke='" << s.color << "' stroke-width='1.5'";
        if (s.dotted) out << " stroke-dasharray='3 3'";
        out << " points='";
        for (std::size_t i = 0; i < s.x.size(); ++i)
            out << num(X(s.x[i])) << ',' << num(Y(s.y[i])) << ' ';
        out << "'/>\n";
    }

    double legend_y = mt + 14;
    for (const auto& s : chart.series) {
        out << "<line x1='" << num(ml + pw - 110) << "' y1='" << num(legend_y - 4) << "' x2='"
            << num(ml + pw - 92) << "' y2='" << num(legend_y - 4) << "' stroke='" << s.color
            << "' stroke-width='2'/>\n";
        out << "<text x='" << num(ml + pw - 86) << "' y='" << num(legend_y) << "'>"
            << escape(s.label) << "</text>\n";
        legend_y += 15;
    }

    out << "<text x='" << num(ml + pw / 2) << "' y='" << num(chart.height - 8.0)
        << "' text-anchor='middle'>" << escape(chart.x_label) << "</text>\n";
    out << "<text x='14' y='" << num(mt + ph / 2) << "' text-anchor='middle' transform='rotate(-90 14 "
        << num(mt + ph / 2) << ")'>" << escape(chart.y_label) << "</text>\n";
    out << "</svg>\n";
}

void write_scatter(const std::filesystem::path& path, const ScatterChart& chart) {
    const double ml = 64, mr = 20, mt = 40, mb = 48;
    const double pw = chart.width - ml - mr, ph = chart.height - mt - mb;
    Range rx, ry;
    for (const auto& p : chart.points) {
        rx.include(p.x);
        ry.include(p.y);
    }
    rx.include(0.0);
    ry.include(0.0);
    rx.pad();
    ry.pad();
    auto X = [&](double v) { return ml + (v - rx.lo) / (rx.hi - rx.lo) * pw; };
    auto Y = [&](double v) { return mt + ph - (v - ry.lo) / (ry.hi - ry.lo) * ph; };

    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write '" + path.string() + "'");
    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << chart.width << "' height='"
        << chart.height << "' font-family='sans-serif' font-size='11'>\n";
    out << "<rect width='100%' height='100%' fill='white'/>\n";
    out << "<text x='" << ml << "' y='18' font-size='14'>" << escape(chart.title) << "</text>\n";
    out << "<rect x='" << ml << "' y='" << mt << "' width='" << pw << "' height='" << ph
        << "' fill='none' stroke='#444'/>\n";
    for (const auto& [a, b] : chart.links) {
        out << "<line x1='" << num(X(chart.points[a].x)) << "' y1='" << num(Y(chart.points[a].y))
            << "' x2='" << num(X(chart.points[b].x)) << "' y2='" << num(Y(chart.points[b].y))
            << "' stroke='#888' stroke-dasharray='2 3'/>\n";
    }
    for (const auto& p : chart.points) {
        out << "<circle cx='" << num(X(p.x)) << "' cy='" << num(Y(p.y)) << "' r='4' fill='"
            << p.color << "'/>\n";
        out << "<text x='" << num(X(p.x) + 6) << "' y='" << num(Y(p.y) - 6) << "'>"
            << escape(p.label) << "</text>\n";
    }
    out << "<text x='" << num(ml + pw / 2) << "' y='" << num(chart.height - 8.0)
        << "' text-anchor='middle'>" << escape(chart.x_label) << "</text>\n";
    out << "<text x='14' y='" << num(mt + ph / 2) << "' text-anchor='middle' transform='rotate(-90 14 "
        << num(mt + ph / 2) << ")'>" << escape(chart.y_label) << "</text>\n";
    out << "</svg>\n";
}

} // namespace svg
} // namespace quakescore

#pragma once

/// Standalone SVG renderer for the sweep datasets: heatmaps over rectangular
/// grids (with optional contour polylines via marching squares) and line
/// charts with log-axis support. No external plotting dependency; output is
/// deterministic for fixed input.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "csv.hpp"

namespace qtm {

struct PlotSpec {
    std::string kind = "heatmap"; // heatmap | line
    std::string x;                // x column
    std::string y;                // heatmap: y column
    std::string z;                // heatmap: value column
    std::vector<std::string> series; // line: y columns
    std::vector<double> contours;
    bool logx = false;
    bool logy = false;
    std::string title;
};

namespace svgdetail {

inline std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

inline std::string label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

// viridis anchors, interpolated linearly
inline std::string viridis(double t) {
    static const int anchors[][3] = {{68, 1, 84},    {71, 44, 122},  {59, 81, 139},
                                     {44, 113, 142}, {33, 144, 141}, {39, 173, 129},
                                     {92, 200, 99},  {170, 220, 50}, {253, 231, 37}};
    constexpr int n = 9;
    t = std::clamp(t, 0.0, 1.0) * (n - 1);
    const int i = std::min(static_cast<int>(t), n - 2);
    const double f = t - i;
    char buf[16];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x",
                  static_cast<int>(std::lround(anchors[i][0] + f * (anchors[i + 1][0] - anchors[i][0]))),
                  static_cast<int>(std::lround(anchors[i][1] + f * (anchors[i + 1][1] - anchors[i][1]))),
                  static_cast<int>(std::lround(anchors[i][2] + f * (anchors[i + 1][2] - anchors[i][2]))));
    return buf;
}

inline std::vector<double> numeric_or_nan(const CsvTable& t, const std::string& name) {
    const std::size_t idx = t.column_index(name);
    std::vector<double> out;
    out.reserve(t.rows.size());
    for (const auto& r : t.rows) {
        const std::string& cell = r.at(idx);
        if (cell.empty()) {
            out.push_back(std::numeric_limits<double>::quiet_NaN());
            continue;
        }
        try {
            out.push_back(std::stod(cell));
        } catch (...) {
            out.push_back(std::numeric_limits<double>::quiet_NaN());
        }
    }
    return out;
}

struct Frame {
    double x0 = 70, y0 = 40, w = 620, h = 460; // plot area; total canvas 800x560
    double px(double t) const { return x0 + t * w; }       // t in [0,1]
    double py(double t) const { return y0 + (1.0 - t) * h; } // y axis up
};

inline void open_svg(std::ostream& os, const std::string& title) {
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"560\" "
          "viewBox=\"0 0 800 560\">\n"
       << "<rect width=\"800\" height=\"560\" fill=\"white\"/>\n";
    if (!title.empty())
        os << "<text x=\"400\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
              "font-size=\"16\">" << title << "</text>\n";
}

inline void axis_text(std::ostream& os, double x, double y, const std::string& text,
                      const std::string& anchor, int size = 12, double rotate = 0.0) {
    os << "<text x=\"" << num(x) << "\" y=\"" << num(y) << "\" text-anchor=\"" << anchor
       << "\" font-family=\"sans-serif\" font-size=\"" << size << "\"";
    if (rotate != 0.0)
        os << " transform=\"rotate(" << num(rotate) << " " << num(x) << " " << num(y) << ")\"";
    os << ">" << text << "</text>\n";
}

/// Marching squares over grid nodes; emits one line segment per crossed cell
/// edge pair. grid[iy][ix], NaN nodes skip their squares.
inline void contour_segments(std::ostream& os, const std::vector<std::vector<double>>& grid,
                             double level, const Frame& fr, std::size_t nx, std::size_t ny,
                             const std::string& color) {
    auto node_x = [&](double ix) { return fr.px(nx == 1 ? 0.5 : ix / double(nx - 1)); };
    auto node_y = [&](double iy) { return fr.py(ny == 1 ? 0.5 : iy / double(ny - 1)); };
    for (std::size_t iy = 0; iy + 1 < ny; ++iy)
        for (std::size_t ix = 0; ix + 1 < nx; ++ix) {
            const double v[4] = {grid[iy][ix], grid[iy][ix + 1], grid[iy + 1][ix + 1],
                                 grid[iy + 1][ix]};
            if (std::isnan(v[0]) || std::isnan(v[1]) || std::isnan(v[2]) || std::isnan(v[3]))
                continue;
            // corner coordinates in node index space, clockwise from (ix, iy)
            const double cx[4] = {double(ix), double(ix + 1), double(ix + 1), double(ix)};
            const double cy[4] = {double(iy), double(iy), double(iy + 1), double(iy + 1)};
            std::vector<std::pair<double, double>> pts;
            for (int e = 0; e < 4; ++e) {
                const int a = e, b = (e + 1) % 4;
                const bool above_a = v[a] >= level, above_b = v[b] >= level;
                if (above_a == above_b) continue;
                const double t = (level - v[a]) / (v[b] - v[a]);
                pts.emplace_back(cx[a] + t * (cx[b] - cx[a]), cy[a] + t * (cy[b] - cy[a]));
            }
            if (pts.size() < 2) continue;
            for (std::size_t k = 0; k + 1 < pts.size(); k += 2)
                os << "<line x1=\"" << num(node_x(pts[k].first)) << "\" y1=\""
                   << num(node_y(pts[k].second)) << "\" x2=\"" << num(node_x(pts[k + 1].first))
                   << "\" y2=\"" << num(node_y(pts[k + 1].second)) << "\" stroke=\"" << color
                   << "\" stroke-width=\"1.5\" fill=\"none\"/>\n";
        }
}

} // namespace svgdetail

inline void emit_heatmap(const CsvTable& table, const PlotSpec& spec, std::ostream& os) {
    using namespace svgdetail;
    const std::vector<double> xs = table.numeric_column(spec.x);
    const std::vector<double> ys = table.numeric_column(spec.y);
    const std::vector<double> zs = numeric_or_nan(table, spec.z);

    std::vector<double> ux = xs, uy = ys;
    std::sort(ux.begin(), ux.end());
    ux.erase(std::unique(ux.begin(), ux.end()), ux.end());
    std::sort(uy.begin(), uy.end());
    uy.erase(std::unique(uy.begin(), uy.end()), uy.end());
    std::map<double, std::size_t> xi, yi;
    for (std::size_t i = 0; i < ux.size(); ++i) xi[ux[i]] = i;
    for (std::size_t i = 0; i < uy.size(); ++i) yi[uy[i]] = i;
    const std::size_t nx = ux.size(), ny = uy.size();

    std::vector<std::vector<double>> grid(ny, std::vector<double>(nx, std::numeric_limits<double>::quiet_NaN()));
    for (std::size_t r = 0; r < zs.size(); ++r) grid[yi[ys[r]]][xi[xs[r]]] = zs[r];

    double zmin = std::numeric_limits<double>::infinity(), zmax = -zmin;
    for (const auto& row : grid)
        for (double v : row)
            if (!std::isnan(v)) {
                zmin = std::min(zmin, v);
                zmax = std::max(zmax, v);
            }
    if (!(zmax > zmin)) zmax = zmin + 1.0;

    Frame fr;
    fr.w = 560; // leave room for the colorbar
    open_svg(os, spec.title);
    const double cw = fr.w / double(nx), ch = fr.h / double(ny);
    for (std::size_t iy = 0; iy < ny; ++iy)
        for (std::size_t ix = 0; ix < nx; ++ix) {
            const double v = grid[iy][ix];
            const std::string fill =
                std::isnan(v) ? std::string("#c0c0c0") : viridis((v - zmin) / (zmax - zmin));
            os << "<rect x=\"" << num(fr.x0 + ix * cw) << "\" y=\""
               << num(fr.y0 + fr.h - (iy + 1) * ch) << "\" width=\"" << num(cw + 0.5)
               << "\" height=\"" << num(ch + 0.5) << "\" fill=\"" << fill << "\"/>\n";
        }

    static const char* contour_colors[] = {"#e03030", "#ffffff", "#000000"};
    for (std::size_t c = 0; c < spec.contours.size(); ++c)
        contour_segments(os, grid, spec.contours[c], fr, nx, ny, contour_colors[c % 3]);

    // frame + ticks
    os << "<rect x=\"" << num(fr.x0) << "\" y=\"" << num(fr.y0) << "\" width=\"" << num(fr.w)
       << "\" height=\"" << num(fr.h) << "\" fill=\"none\" stroke=\"black\"/>\n";
    const int nticks = 5;
    for (int t = 0; t < nticks; ++t) {
        const double frac = t / double(nticks - 1);
        const std::size_t ti = static_cast<std::size_t>(std::lround(frac * (nx - 1)));
        axis_text(os, fr.x0 + (ti + 0.5) * cw, fr.y0 + fr.h + 16, label(ux[ti]), "middle");
        const std::size_t tj = static_cast<std::size_t>(std::lround(frac * (ny - 1)));
        axis_text(os, fr.x0 - 6, fr.y0 + fr.h - (tj + 0.5) * ch + 4, label(uy[tj]), "end");
    }
    axis_text(os, fr.x0 + fr.w / 2, fr.y0 + fr.h + 38, spec.x, "middle", 14);
    axis_text(os, 18, fr.y0 + fr.h / 2, spec.y, "middle", 14, -90);

    // colorbar
    const double bx = fr.x0 + fr.w + 30, bw = 18, bh = fr.h;
    const int steps = 32;
    for (int s = 0; s < steps; ++s) {
        const double t0 = s / double(steps);
        os << "<rect x=\"" << num(bx) << "\" y=\"" << num(fr.y0 + bh - (s + 1) * bh / steps)
           << "\" width=\"" << num(bw) << "\" height=\"" << num(bh / steps + 0.5) << "\" fill=\""
           << viridis(t0) << "\"/>\n";
    }
    os << "<rect x=\"" << num(bx) << "\" y=\"" << num(fr.y0) << "\" width=\"" << num(bw)
       << "\" height=\"" << num(bh) << "\" fill=\"none\" stroke=\"black\"/>\n";
    axis_text(os, bx + bw + 6, fr.y0 + bh + 4, label(zmin), "start");
    axis_text(os, bx + bw + 6, fr.y0 + 10, label(zmax), "start");
    axis_text(os, bx + bw / 2, fr.y0 - 8, spec.z, "middle");
    os << "</svg>\n";
}

inline void emit_line(const CsvTable& table, const PlotSpec& spec, std::ostream& os) {
    using namespace svgdetail;
    std::vector<double> xs = table.numeric_column(spec.x);
    std::vector<std::vector<double>> series;
    for (const auto& name : spec.series) series.push_back(numeric_or_nan(table, name));
    if (series.empty()) throw ColumnError("line plot needs at least one series column");

    auto tx = [&](double v) { return spec.logx ? std::log10(v) : v; };
    auto ty = [&](double v) { return spec.logy ? std::log10(v) : v; };
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (double v : xs) {
        if (spec.logx && !(v > 0.0)) throw Error("log x-axis needs positive values");
        xmin = std::min(xmin, tx(v));
        xmax = std::max(xmax, tx(v));
    }
    for (const auto& s : series)
        for (double v : s) {
            if (std::isnan(v) || (spec.logy && !(v > 0.0))) continue;
            ymin = std::min(ymin, ty(v));
            ymax = std::max(ymax, ty(v));
        }
    if (!(xmax > xmin)) xmax = xmin + 1.0;
    if (!(ymax > ymin)) ymax = ymin + 1.0;
    const double ypad = 0.05 * (ymax - ymin);
    ymin -= ypad;
    ymax += ypad;

    Frame fr;
    open_svg(os, spec.title);
    os << "<rect x=\"" << num(fr.x0) << "\" y=\"" << num(fr.y0) << "\" width=\"" << num(fr.w)
       << "\" height=\"" << num(fr.h) << "\" fill=\"none\" stroke=\"black\"/>\n";

    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
    for (std::size_t s = 0; s < series.size(); ++s) {
        std::ostringstream pts;
        bool open = false;
        std::string path;
        for (std::size_t r = 0; r < xs.size(); ++r) {
            const double v = series[s][r];
            if (std::isnan(v) || (spec.logy && !(v > 0.0))) {
                open = false;
                continue;
            }
            const double px = fr.px((tx(xs[r]) - xmin) / (xmax - xmin));
            const double py = fr.py((ty(v) - ymin) / (ymax - ymin));
            path += (open ? " L " : (path.empty() ? "M " : " M ")) + num(px) + " " + num(py);
            open = true;
        }
        if (path.empty()) continue;
        os << "<path d=\"" << path << "\" fill=\"none\" stroke=\"" << palette[s % 5]
           << "\" stroke-width=\"1.8\"/>\n";
        // legend
        const double ly = fr.y0 + 16 + 18 * double(s);
        os << "<line x1=\"" << num(fr.x0 + fr.w - 150) << "\" y1=\"" << num(ly - 4) << "\" x2=\""
           << num(fr.x0 + fr.w - 120) << "\" y2=\"" << num(ly - 4) << "\" stroke=\""
           << palette[s % 5] << "\" stroke-width=\"1.8\"/>\n";
        axis_text(os, fr.x0 + fr.w - 114, ly, spec.series[s], "start");
    }

    const int nticks = 5;
    for (int t = 0; t < nticks; ++t) {
        const double frac = t / double(nticks - 1);
        const double xv = xmin + frac * (xmax - xmin);
        const double yv = ymin + frac * (ymax - ymin);
        axis_text(os, fr.px(frac), fr.y0 + fr.h + 16,
                  label(spec.logx ? std::pow(10.0, xv) : xv), "middle");
        axis_text(os, fr.x0 - 6, fr.py(frac) + 4, label(spec.logy ? std::pow(10.0, yv) : yv),
                  "end");
    }
    axis_text(os, fr.x0 + fr.w / 2, fr.y0 + fr.h + 38,
              spec.x + (spec.logx ? "  (log scale)" : ""), "middle", 14);
    os << "</svg>\n";
}

/// Render `table` to a standalone SVG file.
inline void emit_plot(const CsvTable& table, const PlotSpec& spec, const std::string& out_path) {
    std::ofstream os(out_path, std::ios::binary);
    if (!os) throw Error("cannot open output file: " + out_path);
    if (spec.kind == "heatmap") emit_heatmap(table, spec, os);
    else if (spec.kind == "line") emit_line(table, spec, os);
    else throw ConfigError("plot kind must be heatmap or line");
}

} // namespace qtm

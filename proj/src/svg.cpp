#include "kakeya/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "kakeya/csv.hpp"
#include "kakeya/regression.hpp"

namespace kakeya {

namespace {

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

std::string fmt2(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

} // namespace

void write_scatter_svg(const std::string& path, const std::vector<std::array<double, 2>>& points,
                       const std::string& x_label, const std::string& y_label,
                       const std::string& title) {
    const int width = 640, height = 480;
    const double ml = 70, mr = 20, mt = 40, mb = 50;

    double xlo = 1e100, xhi = -1e100, ylo = 1e100, yhi = -1e100;
    for (const auto& p : points) {
        xlo = std::min(xlo, p[0]);
        xhi = std::max(xhi, p[0]);
        ylo = std::min(ylo, p[1]);
        yhi = std::max(yhi, p[1]);
    }
    if (points.empty()) {
        xlo = ylo = 0;
        xhi = yhi = 1;
    }
    if (xhi - xlo < 1e-12) {
        xlo -= 0.5;
        xhi += 0.5;
    }
    if (yhi - ylo < 1e-12) {
        ylo -= 0.5;
        yhi += 0.5;
    }
    const auto px = [&](double x) { return ml + (x - xlo) / (xhi - xlo) * (width - ml - mr); };
    const auto py = [&](double y) {
        return height - mb - (y - ylo) / (yhi - ylo) * (height - mt - mb);
    };

    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("write_scatter_svg: cannot open " + path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    out << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
    out << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"14\">"
        << title << "</text>\n";
    // Axes.
    out << "<line x1=\"" << fmt(ml) << "\" y1=\"" << fmt(height - mb) << "\" x2=\""
        << fmt(width - mr) << "\" y2=\"" << fmt(height - mb) << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << fmt(ml) << "\" y1=\"" << fmt(height - mb) << "\" x2=\"" << fmt(ml)
        << "\" y2=\"" << fmt(mt) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << width / 2 << "\" y=\"" << height - 14
        << "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"12\">" << x_label
        << "</text>\n";
    out << "<text x=\"18\" y=\"" << height / 2
        << "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"12\" transform=\"rotate(-90 18 "
        << height / 2 << ")\">" << y_label << "</text>\n";
    out << "<text x=\"" << fmt(ml) << "\" y=\"" << fmt(height - mb + 16)
        << "\" font-family=\"monospace\" font-size=\"10\">" << fmt(xlo) << "</text>\n";
    out << "<text x=\"" << fmt(width - mr - 40) << "\" y=\"" << fmt(height - mb + 16)
        << "\" font-family=\"monospace\" font-size=\"10\">" << fmt(xhi) << "</text>\n";
    out << "<text x=\"" << fmt(ml - 46) << "\" y=\"" << fmt(height - mb)
        << "\" font-family=\"monospace\" font-size=\"10\">" << fmt(ylo) << "</text>\n";
    out << "<text x=\"" << fmt(ml - 46) << "\" y=\"" << fmt(mt + 8)
        << "\" font-family=\"monospace\" font-size=\"10\">" << fmt(yhi) << "</text>\n";

    // Fitted line and slope annotation; degenerate fits become a warning.
    bool degenerate = points.size() < 2;
    if (!degenerate) {
        bool distinct = false;
        for (size_t i = 1; i < points.size(); ++i)
            if (points[i][0] != points[0][0]) distinct = true;
        degenerate = !distinct;
    }
    if (!degenerate) {
        std::vector<double> xs, ys;
        for (const auto& p : points) {
            xs.push_back(p[0]);
            ys.push_back(p[1]);
        }
        const auto fit = fit_linear(xs, ys);
        const double y0 = fit.intercept + fit.exponent * xlo;
        const double y1 = fit.intercept + fit.exponent * xhi;
        out << "<line x1=\"" << fmt(px(xlo)) << "\" y1=\"" << fmt(py(y0)) << "\" x2=\""
            << fmt(px(xhi)) << "\" y2=\"" << fmt(py(y1))
            << "\" stroke=\"steelblue\" stroke-width=\"1.5\"/>\n";
        out << "<text x=\"" << width - mr - 10 << "\" y=\"" << mt + 16
            << "\" text-anchor=\"end\" font-family=\"monospace\" font-size=\"12\">slope="
            << fmt2(fit.exponent) << " r2=" << fmt2(fit.r_squared) << "</text>\n";
    } else {
        out << "<text x=\"" << width / 2 << "\" y=\"" << height / 2
            << "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"12\" fill=\"darkred\">"
            << "degenerate fit: need two distinct x values</text>\n";
    }
    for (const auto& p : points)
        out << "<circle cx=\"" << fmt(px(p[0])) << "\" cy=\"" << fmt(py(p[1]))
            << "\" r=\"3\" fill=\"crimson\"/>\n";
    out << "</svg>\n";
    if (!out) throw io_error("write_scatter_svg: write failed for " + path);
}

std::string emit_plot(const std::string& csv_path, const std::string& x_col,
                      const std::string& y_col, bool log_log) {
    const auto table = read_csv(csv_path);
    const int xi = table.column(x_col);
    const int yi = table.column(y_col);
    if (xi < 0) throw input_error("emit_plot: missing column " + x_col);
    if (yi < 0) throw input_error("emit_plot: missing column " + y_col);
    std::vector<std::array<double, 2>> points;
    for (const auto& row : table.rows) {
        double x = row[xi], y = row[yi];
        if (log_log) {
            if (!(x > 0) || !(y > 0)) continue;
            x = std::log(x);
            y = std::log(y);
        }
        points.push_back({x, y});
    }
    std::string svg_path = csv_path;
    const auto dot = svg_path.rfind('.');
    if (dot != std::string::npos) svg_path.resize(dot);
    svg_path += "_" + x_col + "_" + y_col + ".svg";
    const std::string xl = log_log ? "log " + x_col : x_col;
    const std::string yl = log_log ? "log " + y_col : y_col;
    write_scatter_svg(svg_path, points, xl, yl, y_col + " vs " + x_col);
    return svg_path;
}

} // namespace kakeya

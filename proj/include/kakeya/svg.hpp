#pragma once

#include <array>
#include <string>
#include <vector>

#include "kakeya/errors.hpp"

namespace kakeya {

// Static scatter plot with a least-squares line and slope annotation.
// Byte-deterministic for identical input.
void write_scatter_svg(const std::string& path, const std::vector<std::array<double, 2>>& points,
                       const std::string& x_label, const std::string& y_label,
                       const std::string& title);

// Plot y_col against x_col of a CSV file (optionally in log-log coordinates)
// into an SVG next to it; returns the SVG path.
std::string emit_plot(const std::string& csv_path, const std::string& x_col,
                      const std::string& y_col, bool log_log);

} // namespace kakeya

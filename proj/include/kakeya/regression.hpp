#pragma once

#include <array>
#include <vector>

#include "kakeya/errors.hpp"

namespace kakeya {

// Least-squares power-law fit in log-log coordinates.
struct RegressionResult {
    double exponent = 0;  // slope
    double intercept = 0;
    double r_squared = 0;
    std::vector<std::array<double, 2>> points; // (log x, log y)
};

// Fit log y = intercept + exponent * log x. Requires >= 3 points.
RegressionResult fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

// Plain linear least squares on already-transformed data (>= 2 points).
RegressionResult fit_linear(const std::vector<double>& x, const std::vector<double>& y);

// Multilinear least squares y = c0 + sum_k c_k x_k via normal equations.
std::vector<double> fit_multilinear(const std::vector<std::vector<double>>& rows,
                                    const std::vector<double>& y);

} // namespace kakeya

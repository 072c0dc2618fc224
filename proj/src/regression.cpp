#include "kakeya/regression.hpp"

#include <cmath>

namespace kakeya {

RegressionResult fit_linear(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw input_error("fit_linear: size mismatch");
    const size_t n = x.size();
    if (n < 2) throw input_error("fit_linear: need at least 2 points");
    double sx = 0, sy = 0;
    for (size_t i = 0; i < n; ++i) { sx += x[i]; sy += y[i]; }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx <= 1e-300) throw numeric_error("fit_linear: degenerate regression, all x equal");
    RegressionResult res;
    res.exponent = sxy / sxx;
    res.intercept = my - res.exponent * mx;
    if (syy <= 1e-300) {
        res.r_squared = 1.0; // constant y fits exactly
    } else {
        double ss_res = 0;
        for (size_t i = 0; i < n; ++i) {
            const double e = y[i] - (res.intercept + res.exponent * x[i]);
            ss_res += e * e;
        }
        res.r_squared = 1.0 - ss_res / syy;
    }
    res.points.reserve(n);
    for (size_t i = 0; i < n; ++i) res.points.push_back({x[i], y[i]});
    return res;
}

RegressionResult fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw input_error("fit_loglog: size mismatch");
    if (x.size() < 3) throw input_error("fit_loglog: need at least 3 points");
    std::vector<double> lx(x.size()), ly(y.size());
    for (size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0) || !(y[i] > 0))
            throw numeric_error("fit_loglog: nonpositive data");
        lx[i] = std::log(x[i]);
        ly[i] = std::log(y[i]);
    }
    return fit_linear(lx, ly);
}

std::vector<double> fit_multilinear(const std::vector<std::vector<double>>& rows,
                                    const std::vector<double>& y) {
    if (rows.size() != y.size() || rows.empty())
        throw input_error("fit_multilinear: size mismatch");
    const size_t k = rows[0].size() + 1; // + intercept
    if (rows.size() < k) throw input_error("fit_multilinear: underdetermined system");
    // Normal equations A^T A c = A^T y with A = [1 | rows].
    std::vector<std::vector<double>> ata(k, std::vector<double>(k, 0.0));
    std::vector<double> aty(k, 0.0);
    for (size_t r = 0; r < rows.size(); ++r) {
        std::vector<double> row(k);
        row[0] = 1.0;
        for (size_t j = 1; j < k; ++j) row[j] = rows[r][j - 1];
        for (size_t i = 0; i < k; ++i) {
            aty[i] += row[i] * y[r];
            for (size_t j = 0; j < k; ++j) ata[i][j] += row[i] * row[j];
        }
    }
    // Gaussian elimination with partial pivoting.
    for (size_t col = 0; col < k; ++col) {
        size_t pivot = col;
        for (size_t r = col + 1; r < k; ++r)
            if (std::fabs(ata[r][col]) > std::fabs(ata[pivot][col])) pivot = r;
        if (std::fabs(ata[pivot][col]) < 1e-12)
            throw numeric_error("fit_multilinear: singular normal equations");
        std::swap(ata[col], ata[pivot]);
        std::swap(aty[col], aty[pivot]);
        for (size_t r = 0; r < k; ++r) {
            if (r == col) continue;
            const double f = ata[r][col] / ata[col][col];
            for (size_t c = col; c < k; ++c) ata[r][c] -= f * ata[col][c];
            aty[r] -= f * aty[col];
        }
    }
    std::vector<double> coeff(k);
    for (size_t i = 0; i < k; ++i) coeff[i] = aty[i] / ata[i][i];
    return coeff;
}

} // namespace kakeya

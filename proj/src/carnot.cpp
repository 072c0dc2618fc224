#include "kakeya/carnot.hpp"

#include <algorithm>
#include <cmath>

namespace kakeya {

GroupSpec::GroupSpec(int m1_, int m2_, double eps) : m1(m1_), m2(m2_), epsilon(eps) {
    if (m1 < 1 || m2 < 1) throw input_error("GroupSpec: m1 and m2 must be >= 1");
    if (!(epsilon > 0 && epsilon < 1)) throw input_error("GroupSpec: epsilon must be in (0,1)");
    table_.assign(size_t(m2) * m1 * m1, 0.0);
}

double GroupSpec::coeff(int j, int l, int i) const {
    if (j <= m1 || j > n()) throw input_error("GroupSpec::coeff: j out of range");
    if (l < 1 || l > m1 || i < 1 || i > m1) throw input_error("GroupSpec::coeff: index out of range");
    if (l == i) return 0.0;
    const bool flip = l > i;
    if (flip) std::swap(l, i);
    const double v = table_[size_t(j - m1 - 1) * m1 * m1 + size_t(l - 1) * m1 + (i - 1)];
    return flip ? -v : v;
}

void GroupSpec::set_coeff(int j, int l, int i, double value) {
    if (j <= m1 || j > n()) throw input_error("GroupSpec::set_coeff: j out of range");
    if (l < 1 || l >= i || i > m1) throw input_error("GroupSpec::set_coeff: need 1 <= l < i <= m1");
    table_[size_t(j - m1 - 1) * m1 * m1 + size_t(l - 1) * m1 + (i - 1)] = value;
}

double GroupSpec::max_abs_coeff() const {
    double mx = 0;
    for (double v : table_) mx = std::max(mx, std::fabs(v));
    return mx;
}

GroupSpec GroupSpec::free_step2(int m1, double eps) {
    if (m1 < 2) throw input_error("free_step2: m1 must be >= 2");
    GroupSpec spec(m1, m1 * (m1 - 1) / 2, eps);
    int j = m1 + 1;
    for (int l = 1; l <= m1; ++l)
        for (int i = l + 1; i <= m1; ++i) spec.set_coeff(j++, l, i, 0.5);
    return spec;
}

std::vector<double> group_p(const GroupSpec& spec, const Point& p, const Point& q) {
    std::vector<double> out(spec.m2, 0.0);
    for (int j = spec.m1 + 1; j <= spec.n(); ++j) {
        double acc = 0;
        for (int l = 1; l <= spec.m1; ++l)
            for (int i = l + 1; i <= spec.m1; ++i) {
                const double b = spec.coeff(j, l, i);
                if (b != 0.0) acc += b * (p[l - 1] * q[i - 1] - p[i - 1] * q[l - 1]);
            }
        out[j - spec.m1 - 1] = acc;
    }
    return out;
}

Point group_mul(const Point& p, const Point& q, const GroupSpec& spec) {
    if (int(p.size()) != spec.n() || int(q.size()) != spec.n())
        throw input_error("group_mul: point dimension does not match group");
    Point out(spec.n());
    const auto pq = group_p(spec, p, q);
    for (int i = 0; i < spec.m1; ++i) out[i] = p[i] + q[i];
    for (int i = 0; i < spec.m2; ++i)
        out[spec.m1 + i] = p[spec.m1 + i] + q[spec.m1 + i] + pq[i];
    return out;
}

Point group_inv(const Point& p, const GroupSpec& spec) {
    if (int(p.size()) != spec.n())
        throw input_error("group_inv: point dimension does not match group");
    Point out(p.size());
    for (size_t i = 0; i < p.size(); ++i) out[i] = -p[i];
    return out;
}

double d_infty_origin(const Point& p, const GroupSpec& spec) {
    double first = 0, second = 0;
    for (int i = 0; i < spec.m1; ++i) first += p[i] * p[i];
    for (int i = spec.m1; i < spec.n(); ++i) second += p[i] * p[i];
    return std::max(std::sqrt(first), spec.epsilon * std::pow(second, 0.25));
}

double d_infty(const Point& p, const Point& q, const GroupSpec& spec) {
    if (int(p.size()) != spec.n() || int(q.size()) != spec.n())
        throw input_error("d_infty: point dimension does not match group");
    return d_infty_origin(group_mul(group_inv(q, spec), p, spec), spec);
}

std::optional<std::array<int, 3>> check_condition(const GroupSpec& spec) {
    if (spec.m2 < 2) throw input_error("check_condition: requires m2 >= 2");
    const int n = spec.n();
    for (int k = 1; k <= spec.m1; ++k)
        for (int h = k + 1; h <= spec.m1; ++h) {
            if (spec.coeff(n, k, h) != 0.0) continue;
            for (int J = spec.m1 + 1; J <= n - 1; ++J)
                if (spec.coeff(J, k, h) != 0.0) return std::array<int, 3>{k, h, J};
        }
    return std::nullopt;
}

std::vector<double> horizontal_b_map(const Point& q, const GroupSpec& spec) {
    if (spec.m2 != 1) throw input_error("horizontal_b_map: requires m2 == 1");
    const int n = spec.n();
    std::vector<double> out(spec.m1, 0.0);
    for (int i = 1; i <= spec.m1; ++i) {
        double acc = 0;
        for (int l = 1; l <= spec.m1; ++l)
            if (l != i) acc += spec.coeff(n, l, i) * q[l - 1];
        out[i - 1] = acc;
    }
    return out;
}

double horizontal_angle(const Point& q, const GroupSpec& spec) {
    if (spec.m2 != 1) throw input_error("horizontal_angle: requires m2 == 1");
    const auto bq = horizontal_b_map(q, spec);
    double norm2 = 0;
    for (double v : bq) norm2 += v * v;
    return std::acos(1.0 / std::sqrt(1.0 + norm2));
}

namespace {

double structure_constant(const GroupSpec& spec, double R) {
    // R * sqrt(m2 * m1 * (m1-1) * max b^2); for m2 = 1 this is the
    // (n-1)(n-2) form since m1 = n-1.
    const double mx = spec.max_abs_coeff();
    return R * std::sqrt(double(spec.m2) * spec.m1 * (spec.m1 - 1)) * mx;
}

} // namespace

CarnotConstants compute_constants(const GroupSpec& spec, double R, CarnotCase kind) {
    if (!(R > 0)) throw input_error("compute_constants: R must be positive");
    CarnotConstants k;
    k.kind = kind;
    k.R = R;
    k.C_Rn = structure_constant(spec, R);

    // Tube points reach at most distance R+2 from the origin; the bound
    // constants are evaluated there so the angle estimates cover whole tubes.
    const double C_eff = structure_constant(spec, R + 2.0);

    double bound;
    if (kind == CarnotCase::LT) {
        bound = 1.0;
        if (C_eff > 0) bound = std::min(bound, 1.0 / (2.0 * C_eff));
        if (spec.m2 == 1)
            bound = std::min(bound, std::sqrt(1.0 + C_eff * C_eff) - C_eff);
    } else {
        bound = 1.0 / std::sqrt(1.0 + C_eff * C_eff);
    }
    k.r_R = 0.9 * bound;

    k.theta_Rn = std::acos(1.0 / std::sqrt(1.0 + C_eff * C_eff));
    if (kind == CarnotCase::LT) {
        const double denom = 1.0 - C_eff * k.r_R;
        k.theta_bar_Rn = std::acos(std::min(1.0, k.r_R / denom));
    } else {
        k.theta_bar_Rn = std::acos(k.r_R);
    }

    k.c_sandwich = std::sin(k.theta_bar_Rn - k.theta_Rn);
    const double inv_eps2 = 1.0 / (spec.epsilon * spec.epsilon);
    k.C_sandwich = std::sqrt(1.0 + (inv_eps2 + C_eff) * (inv_eps2 + C_eff));
    return k;
}

} // namespace kakeya

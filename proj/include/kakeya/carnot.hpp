#pragma once

#include <array>
#include <optional>
#include <vector>

#include "kakeya/geometry.hpp"

namespace kakeya {

// Step-2 Carnot group in exponential coordinates: R^n = R^{m1} x R^{m2} with
// product [p1+q1, p2+q2+P(p1,q1)], P_j bilinear antisymmetric with
// coefficients b^j_{l,i} (1 <= l < i <= m1, m1+1 <= j <= n). Stored dense.
struct GroupSpec {
    int m1 = 0;
    int m2 = 0;
    double epsilon = 0.5; // constant in the d_infty second-layer term, in (0,1)

    GroupSpec() = default;
    GroupSpec(int m1_, int m2_, double eps = 0.5);

    int n() const { return m1 + m2; }
    int Q() const { return m1 + 2 * m2; }

    // b^j_{l,i} with j in [m1+1, n], l,i in [1, m1] (1-based, antisymmetric in l,i).
    double coeff(int j, int l, int i) const;
    void set_coeff(int j, int l, int i, double value);
    double max_abs_coeff() const;

    // Free step-2 group on m1 generators: m2 = m1(m1-1)/2, second-layer
    // coordinate (l,i) in lexicographic order carries b = 1/2.
    static GroupSpec free_step2(int m1, double eps = 0.5);

  private:
    std::vector<double> table_; // [(j-m1-1)*m1*m1 + (l-1)*m1 + (i-1)], l<i stored
    friend struct GroupSpecAccess;
};

// P(p1,q1): the m2-vector of P_j values; takes full points, uses first m1 coords.
std::vector<double> group_p(const GroupSpec& spec, const Point& p, const Point& q);

Point group_mul(const Point& p, const Point& q, const GroupSpec& spec);
Point group_inv(const Point& p, const GroupSpec& spec);

// d_infty(p,0) = max{|p1|, eps*|p2|^{1/2}}, extended by left invariance.
double d_infty_origin(const Point& p, const GroupSpec& spec);
double d_infty(const Point& p, const Point& q, const GroupSpec& spec);

// First (k,h,J) in lexicographic order with b^n_{k,h} = 0 and b^J_{k,h} != 0,
// 1 <= k < h <= m1, m1+1 <= J <= n-1. Requires m2 >= 2.
std::optional<std::array<int, 3>> check_condition(const GroupSpec& spec);

// Angle between the horizontal hyperplane through q and the
// x_1..x_{n-1}-hyperplane: arccos(1/sqrt(1+|Bq1|^2)). Requires m2 == 1.
double horizontal_angle(const Point& q, const GroupSpec& spec);

// (B q1)_i = sum_{l != i} b_{l,i} q_l, with b antisymmetric. m2 == 1 only.
std::vector<double> horizontal_b_map(const Point& q, const GroupSpec& spec);

enum class CarnotCase { LT, Classical };

// Structure constants for the tube geometry at parameter radius R.
//   C_Rn       max-coefficient constant of the group at radius R
//   r_R        direction-ball radius, 0.9x the strict bound of the case
//   theta_Rn   max tilt of horizontal hyperplanes over the R-ball
//   theta_bar  min tilt of the segments I_u(a) against the horizontal plane
//   c/C        inner (orthogonal) and outer (Euclidean) sandwich radii factors
// Internally the bound constants are evaluated at R+2 so they also cover
// points of tubes that stick out of the parameter ball.
struct CarnotConstants {
    CarnotCase kind = CarnotCase::LT;
    double R = 1;
    double C_Rn = 0;
    double r_R = 0;
    double theta_Rn = 0;
    double theta_bar_Rn = 0;
    double c_sandwich = 0;
    double C_sandwich = 1;
};

CarnotConstants compute_constants(const GroupSpec& spec, double R, CarnotCase kind);

} // namespace kakeya

#pragma once

#include <vector>

#include "kakeya/errors.hpp"

namespace kakeya {

using Point = std::vector<double>;

// Layered decomposition of R^n = R^{m_1} x ... x R^{m_s}. Coordinates are
// stored flat; `expo[i]` gives the layer index (1-based) of coordinate i so
// distance loops need no layer lookup. m_j = 0 layers are legal and simply
// contribute no coordinates.
struct LayerSpec {
    std::vector<int> m;
    std::vector<int> expo;   // per-coordinate layer exponent, size n
    std::vector<int> offset; // offset[j] = first coordinate of layer j (0-based)
    int n = 0;               // total dimension
    int Q = 0;               // homogeneous dimension, sum j*m_j
    int s = 0;               // number of layers

    static LayerSpec create(std::vector<int> layers);
};

// Homogeneous metric: max over coordinates of |x_i - y_i|^{1/j}, j the layer
// exponent. One-homogeneous under the non-isotropic dilations.
double dist_homogeneous(const Point& p, const Point& q, const LayerSpec& layers);

// Non-isotropic dilation: layer j scales by lambda^j.
Point dilate(const Point& p, double lambda, const LayerSpec& layers);

double dist_euclidean(const Point& p, const Point& q);

double norm_euclidean(const Point& p);

enum class MetricKind { Euclidean, Homogeneous };

// Ball membership. For the homogeneous metric this is the box
// [-r^j, r^j] per layer around the center.
bool ball_contains(const Point& center, double r, const Point& p,
                   MetricKind metric, const LayerSpec* layers = nullptr);

// Exact Lebesgue volume of B_d(., r): prod_j (2 r^j)^{m_j} = (2r)^Q.
double ball_volume_homogeneous(double r, const LayerSpec& layers);

// Volume of the Euclidean unit ball in R^n.
double unit_ball_volume(int n);

// Axis-aligned box, the sampling domain for Monte Carlo and grid covers.
struct Box {
    std::vector<double> lo, hi;

    int dim() const { return int(lo.size()); }
    double volume() const;
    bool contains(const Point& p) const;
    static Box cube(int n, double lo, double hi);
};

// Distance from p to the segment [a, b] in the Euclidean metric.
double dist_point_segment(const Point& p, const Point& a, const Point& b);

// Euclidean distance between two segments [a0,a1] and [b0,b1].
double dist_segment_segment(const Point& a0, const Point& a1,
                            const Point& b0, const Point& b1);

inline void check_same_dim(const Point& p, const Point& q) {
    if (p.size() != q.size())
        throw input_error("point dimension mismatch: " + std::to_string(p.size()) +
                          " vs " + std::to_string(q.size()));
}

} // namespace kakeya

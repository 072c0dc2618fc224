#include "kakeya/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace kakeya {

LayerSpec LayerSpec::create(std::vector<int> layers) {
    if (layers.empty()) throw input_error("LayerSpec: empty layer list");
    for (int mj : layers)
        if (mj < 0) throw input_error("LayerSpec: negative layer dimension");
    if (layers.back() < 1) throw input_error("LayerSpec: m_s must be >= 1");

    LayerSpec spec;
    spec.m = std::move(layers);
    spec.s = int(spec.m.size());
    spec.offset.resize(spec.s);
    for (int j = 0; j < spec.s; ++j) {
        spec.offset[j] = spec.n;
        spec.n += spec.m[j];
        spec.Q += (j + 1) * spec.m[j];
        for (int k = 0; k < spec.m[j]; ++k) spec.expo.push_back(j + 1);
    }
    if (spec.n < 2) throw input_error("LayerSpec: total dimension must be >= 2");
    return spec;
}

double dist_homogeneous(const Point& p, const Point& q, const LayerSpec& layers) {
    check_same_dim(p, q);
    if (int(p.size()) != layers.n)
        throw input_error("dist_homogeneous: point dimension does not match layer spec");
    double d = 0;
    for (int i = 0; i < layers.n; ++i) {
        const double diff = std::fabs(p[i] - q[i]);
        const int j = layers.expo[i];
        const double dj = (j == 1) ? diff : std::pow(diff, 1.0 / j);
        if (dj > d) d = dj;
    }
    return d;
}

Point dilate(const Point& p, double lambda, const LayerSpec& layers) {
    if (!(lambda > 0)) throw input_error("dilate: lambda must be positive");
    if (int(p.size()) != layers.n)
        throw input_error("dilate: point dimension does not match layer spec");
    Point out(p.size());
    for (int i = 0; i < layers.n; ++i)
        out[i] = p[i] * std::pow(lambda, layers.expo[i]);
    return out;
}

double dist_euclidean(const Point& p, const Point& q) {
    check_same_dim(p, q);
    double acc = 0;
    for (size_t i = 0; i < p.size(); ++i) {
        const double d = p[i] - q[i];
        acc += d * d;
    }
    return std::sqrt(acc);
}

double norm_euclidean(const Point& p) {
    double acc = 0;
    for (double x : p) acc += x * x;
    return std::sqrt(acc);
}

bool ball_contains(const Point& center, double r, const Point& p,
                   MetricKind metric, const LayerSpec* layers) {
    if (!(r > 0)) throw input_error("ball_contains: radius must be positive");
    check_same_dim(center, p);
    if (metric == MetricKind::Euclidean) return dist_euclidean(center, p) <= r;
    if (!layers) throw input_error("ball_contains: homogeneous metric needs a layer spec");
    // Coordinate-wise box membership, |p_i - c_i| <= r^j per layer.
    for (int i = 0; i < layers->n; ++i) {
        const double rj = std::pow(r, layers->expo[i]);
        if (std::fabs(p[i] - center[i]) > rj) return false;
    }
    return true;
}

double ball_volume_homogeneous(double r, const LayerSpec& layers) {
    if (!(r > 0)) throw input_error("ball_volume_homogeneous: radius must be positive");
    double vol = 1;
    for (int j = 0; j < layers.s; ++j)
        vol *= std::pow(2.0 * std::pow(r, j + 1), layers.m[j]);
    return vol;
}

double unit_ball_volume(int n) {
    if (n < 1) throw input_error("unit_ball_volume: dimension must be >= 1");
    // V_n = pi^{n/2} / Gamma(n/2 + 1)
    return std::pow(M_PI, n / 2.0) / std::tgamma(n / 2.0 + 1.0);
}

double Box::volume() const {
    double v = 1;
    for (size_t i = 0; i < lo.size(); ++i) v *= (hi[i] - lo[i]);
    return v;
}

bool Box::contains(const Point& p) const {
    for (size_t i = 0; i < lo.size(); ++i)
        if (p[i] < lo[i] || p[i] > hi[i]) return false;
    return true;
}

Box Box::cube(int n, double lo, double hi) {
    Box b;
    b.lo.assign(n, lo);
    b.hi.assign(n, hi);
    return b;
}

double dist_point_segment(const Point& p, const Point& a, const Point& b) {
    const size_t n = p.size();
    double ab2 = 0, ap_ab = 0;
    for (size_t i = 0; i < n; ++i) {
        const double d = b[i] - a[i];
        ab2 += d * d;
        ap_ab += (p[i] - a[i]) * d;
    }
    double t = (ab2 > 0) ? ap_ab / ab2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    double acc = 0;
    for (size_t i = 0; i < n; ++i) {
        const double d = p[i] - (a[i] + t * (b[i] - a[i]));
        acc += d * d;
    }
    return std::sqrt(acc);
}

double dist_segment_segment(const Point& a0, const Point& a1,
                            const Point& b0, const Point& b1) {
    // Standard closest-approach parameters, clamped to the parameter square.
    const size_t n = a0.size();
    std::vector<double> u(n), v(n), w(n);
    for (size_t i = 0; i < n; ++i) {
        u[i] = a1[i] - a0[i];
        v[i] = b1[i] - b0[i];
        w[i] = a0[i] - b0[i];
    }
    double a = 0, b = 0, c = 0, d = 0, e = 0;
    for (size_t i = 0; i < n; ++i) {
        a += u[i] * u[i];
        b += u[i] * v[i];
        c += v[i] * v[i];
        d += u[i] * w[i];
        e += v[i] * w[i];
    }
    const double denom = a * c - b * b;
    double s = 0, t = 0;
    if (denom > 1e-16 * a * c + 1e-300) {
        s = std::clamp((b * e - c * d) / denom, 0.0, 1.0);
    }
    t = (c > 0) ? std::clamp((b * s + e) / c, 0.0, 1.0) : 0.0;
    // Re-project s for the clamped t.
    s = (a > 0) ? std::clamp((b * t - d) / a, 0.0, 1.0) : 0.0;
    double acc = 0;
    for (size_t i = 0; i < n; ++i) {
        const double diff = (a0[i] + s * u[i]) - (b0[i] + t * v[i]);
        acc += diff * diff;
    }
    return std::sqrt(acc);
}

} // namespace kakeya

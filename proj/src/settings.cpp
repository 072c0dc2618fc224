#include "kakeya/settings.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "kakeya/errors.hpp"

namespace kakeya {

// ---------------------------------------------------------------------------
// Cantor sets
// ---------------------------------------------------------------------------

double CantorSet::dimension() const {
    if (ratio >= 0.5) return 1.0;
    return std::log(2.0) / std::log(1.0 / ratio);
}

CantorSet cantor_build(double ratio, int depth) {
    if (!(ratio > 0 && ratio <= 0.5)) throw input_error("cantor_build: ratio must be in (0, 1/2]");
    if (depth < 1) throw input_error("cantor_build: depth must be >= 1");
    if (depth > 30) throw input_error("cantor_build: depth too large");
    return CantorSet{ratio, depth};
}

std::vector<std::pair<double, double>> cantor_intervals(const CantorSet& set) {
    std::vector<std::pair<double, double>> intervals{{0.0, 1.0}};
    for (int level = 0; level < set.depth; ++level) {
        std::vector<std::pair<double, double>> next;
        next.reserve(intervals.size() * 2);
        for (auto [lo, hi] : intervals) {
            const double len = (hi - lo) * set.ratio;
            next.emplace_back(lo, lo + len);
            next.emplace_back(hi - len, hi);
        }
        intervals = std::move(next);
    }
    return intervals;
}

double cantor_distance(const CantorSet& set, double x) {
    // Recursive descent: at each level the set lives in the two outer
    // subintervals of relative length `ratio`.
    double lo = 0.0, hi = 1.0, dist = 0.0;
    if (x < lo) { dist = lo - x; x = lo; }
    if (x > hi) { dist = x - hi; x = hi; }
    double offset = dist;
    for (int level = 0; level < set.depth; ++level) {
        const double len = (hi - lo) * set.ratio;
        const double left_hi = lo + len;
        const double right_lo = hi - len;
        if (x <= left_hi) {
            hi = left_hi;
        } else if (x >= right_lo) {
            lo = right_lo;
        } else {
            // In the gap: distance to whichever edge is closer, that edge
            // belongs to the set at every deeper level.
            return std::hypot(offset, 0.0) + std::min(x - left_hi, right_lo - x);
        }
    }
    (void)offset;
    return dist;
}

double cantor_measure_interval(const CantorSet& set, double a, double b) {
    if (b <= a) return 0.0;
    struct Frame {
        double lo, hi, mass;
        int level;
    };
    double total = 0.0;
    std::vector<Frame> stack{{0.0, 1.0, 1.0, 0}};
    while (!stack.empty()) {
        Frame f = stack.back();
        stack.pop_back();
        if (b <= f.lo || a >= f.hi) continue;
        if (a <= f.lo && f.hi <= b) {
            total += f.mass;
            continue;
        }
        if (f.level == set.depth) {
            // Uniform within the leaf interval.
            const double overlap = std::min(b, f.hi) - std::max(a, f.lo);
            total += f.mass * overlap / (f.hi - f.lo);
            continue;
        }
        const double len = (f.hi - f.lo) * set.ratio;
        stack.push_back({f.lo, f.lo + len, f.mass / 2, f.level + 1});
        stack.push_back({f.hi - len, f.hi, f.mass / 2, f.level + 1});
    }
    return total;
}

double cantor_point(const CantorSet& set, double t) {
    t = std::clamp(t, 0.0, 1.0);
    double lo = 0.0, hi = 1.0;
    for (int level = 0; level < set.depth; ++level) {
        const double len = (hi - lo) * set.ratio;
        t *= 2;
        if (t < 1.0) {
            hi = lo + len;
        } else {
            t -= 1.0;
            lo = hi - len;
        }
    }
    return lo + t * (hi - lo);
}

std::vector<double> cantor_midpoints(const CantorSet& set) {
    auto intervals = cantor_intervals(set);
    std::vector<double> mids;
    mids.reserve(intervals.size());
    for (auto [lo, hi] : intervals) mids.push_back(0.5 * (lo + hi));
    return mids;
}

// ---------------------------------------------------------------------------
// Internal helpers
// ---------------------------------------------------------------------------

namespace {

// Golden-section minimum of a quasiconvex function on [lo, hi].
template <typename F>
std::pair<double, double> golden_min(F&& f, double lo, double hi, int iters = 90) {
    constexpr double inv_phi = 0.6180339887498949;
    double a = lo, b = hi;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int i = 0; i < iters && (b - a) > 1e-14; ++i) {
        if (f1 <= f2) {
            b = x2; x2 = x1; f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1; x1 = x2; f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
    }
    const double xm = 0.5 * (a + b);
    double fm = f(xm);
    if (f1 < fm) { fm = f1; }
    if (f2 < fm) { fm = f2; }
    return {xm, fm};
}

// Minimize d(p, gamma(t)) over [t0, t1]: coarse 64-cell grid plus
// golden-section refinement; rescans at 4x resolution if the refined value
// disagrees with the coarse minimum by more than `tolerance`.
template <typename F>
double min_over_segment(F&& f, double t0, double t1, double tolerance) {
    const auto scan = [&](int cells) {
        int best = 0;
        double best_val = f(t0);
        for (int k = 1; k <= cells; ++k) {
            const double t = t0 + (t1 - t0) * k / cells;
            const double v = f(t);
            if (v < best_val) { best_val = v; best = k; }
        }
        const double cell = (t1 - t0) / cells;
        const double lo = std::max(t0, t0 + best * cell - cell);
        const double hi = std::min(t1, t0 + best * cell + cell);
        auto [tm, vm] = golden_min(f, lo, hi);
        (void)tm;
        return std::pair<double, double>{best_val, std::min(best_val, vm)};
    };
    auto [coarse, refined] = scan(64);
    // Quasiconvexity makes the full-range golden search reliable as well;
    // take the best of both.
    auto [tg, vg] = golden_min(f, t0, t1);
    (void)tg;
    double result = std::min(refined, vg);
    if (coarse - result > tolerance) {
        auto [c2, r2] = scan(256);
        (void)c2;
        result = std::min(result, r2);
    }
    return result;
}

std::vector<Point> orthonormal_frame(const std::vector<double>& first) {
    const int n = int(first.size());
    std::vector<Point> frame;
    frame.push_back(first);
    double norm = norm_euclidean(frame[0]);
    for (double& x : frame[0]) x /= norm;
    // Gram-Schmidt against coordinate vectors, skipping near-parallel ones.
    for (int i = 0; i < n && int(frame.size()) < n; ++i) {
        Point v(n, 0.0);
        v[i] = 1.0;
        for (const auto& e : frame) {
            double dot = 0;
            for (int k = 0; k < n; ++k) dot += v[k] * e[k];
            for (int k = 0; k < n; ++k) v[k] -= dot * e[k];
        }
        const double vn = norm_euclidean(v);
        if (vn > 1e-8) {
            for (double& x : v) x /= vn;
            frame.push_back(std::move(v));
        }
    }
    if (int(frame.size()) != n) throw numeric_error("orthonormal_frame: degenerate direction");
    return frame;
}

} // namespace

// ---------------------------------------------------------------------------
// Setting construction
// ---------------------------------------------------------------------------

std::string setting_kind_name(SettingKind kind) {
    switch (kind) {
        case SettingKind::EuclideanKakeya: return "euclidean_kakeya";
        case SettingKind::RestrictedKakeya: return "restricted_kakeya";
        case SettingKind::NikodymHyperplane: return "nikodym_hyperplane";
        case SettingKind::FurstenbergK: return "furstenberg_k";
        case SettingKind::HomogeneousKakeya: return "homogeneous_kakeya";
        case SettingKind::CarnotLT: return "carnot_lt";
        case SettingKind::CarnotKakeya: return "carnot_kakeya";
    }
    return "unknown";
}

Setting Setting::euclidean_kakeya(int n) {
    if (n < 2) throw input_error("euclidean_kakeya: n must be >= 2");
    Setting s;
    s.kind_ = SettingKind::EuclideanKakeya;
    s.n_ = n;
    return s;
}

Setting Setting::restricted_kakeya(int n, CantorSet directions) {
    if (n < 2 || n > 3)
        throw input_error("restricted_kakeya: supported ambient dimensions are 2 and 3");
    Setting s;
    s.kind_ = SettingKind::RestrictedKakeya;
    s.n_ = n;
    s.cantor_ = directions;
    return s;
}

Setting Setting::nikodym_hyperplane(int n, double sigma, double c_sigma) {
    if (n < 2) throw input_error("nikodym_hyperplane: n must be >= 2");
    if (!(sigma > 0 && sigma < M_PI / 2))
        throw input_error("nikodym_hyperplane: sigma must be in (0, pi/2)");
    if (!(c_sigma > 0.25)) throw input_error("nikodym_hyperplane: C_sigma must exceed 1/4");
    Setting s;
    s.kind_ = SettingKind::NikodymHyperplane;
    s.n_ = n;
    s.sigma_ = sigma;
    s.c_sigma_ = c_sigma;
    // H^{n-1}(Y) <= 1
    s.direction_radius_ = std::min(1.0, std::pow(1.0 / unit_ball_volume(n - 1), 1.0 / (n - 1)));
    return s;
}

Setting Setting::furstenberg_k(int n, CantorSet fiber) {
    if (n < 2) throw input_error("furstenberg_k: n must be >= 2");
    Setting s;
    s.kind_ = SettingKind::FurstenbergK;
    s.n_ = n;
    s.cantor_ = fiber;
    return s;
}

Setting Setting::homogeneous_kakeya(LayerSpec layers) {
    if (layers.s < 2)
        throw input_error("homogeneous_kakeya: needs at least two layers");
    Setting s;
    s.kind_ = SettingKind::HomogeneousKakeya;
    s.n_ = layers.n;
    s.layers_ = std::move(layers);
    s.direction_radius_ =
        std::min(1.0, std::pow(1.0 / unit_ball_volume(s.n_ - 1), 1.0 / (s.n_ - 1)));
    return s;
}

Setting Setting::carnot_lt(GroupSpec group, double R) {
    Setting s;
    s.kind_ = SettingKind::CarnotLT;
    s.n_ = group.n();
    s.constants_ = compute_constants(group, R, CarnotCase::LT);
    s.group_ = std::move(group);
    s.direction_radius_ = s.constants_.r_R;
    s.param_radius_ = R;
    return s;
}

Setting Setting::carnot_kakeya(GroupSpec group, double R) {
    Setting s;
    s.kind_ = SettingKind::CarnotKakeya;
    s.n_ = group.n();
    s.constants_ = compute_constants(group, R, CarnotCase::Classical);
    s.group_ = std::move(group);
    s.direction_radius_ = s.constants_.r_R;
    s.param_radius_ = R;
    return s;
}

int Setting::direction_dim() const {
    switch (kind_) {
        case SettingKind::EuclideanKakeya:
        case SettingKind::RestrictedKakeya:
        case SettingKind::FurstenbergK:
            return n_; // unit vectors on S^{n-1}
        case SettingKind::NikodymHyperplane:
        case SettingKind::HomogeneousKakeya:
        case SettingKind::CarnotLT:
        case SettingKind::CarnotKakeya:
            return n_ - 1;
    }
    return 0;
}

int Setting::param_dim() const {
    if (kind_ == SettingKind::NikodymHyperplane) return n_ + 1; // (e, t)
    return n_;
}

std::string Setting::summary() const {
    std::string out = setting_kind_name(kind_) + " n=" + std::to_string(n_);
    switch (kind_) {
        case SettingKind::RestrictedKakeya:
        case SettingKind::FurstenbergK:
            out += " cantor(ratio=" + std::to_string(cantor_.ratio) +
                   ", depth=" + std::to_string(cantor_.depth) + ")";
            break;
        case SettingKind::NikodymHyperplane:
            out += " sigma=" + std::to_string(sigma_) + " C_sigma=" + std::to_string(c_sigma_);
            break;
        case SettingKind::HomogeneousKakeya: {
            out += " layers=(";
            for (int j = 0; j < layers_.s; ++j)
                out += std::to_string(layers_.m[j]) + (j + 1 < layers_.s ? "," : "");
            out += ")";
            break;
        }
        case SettingKind::CarnotLT:
        case SettingKind::CarnotKakeya:
            out += " m1=" + std::to_string(group_.m1) + " m2=" + std::to_string(group_.m2) +
                   " eps=" + std::to_string(group_.epsilon) + " R=" + std::to_string(constants_.R);
            break;
        default:
            break;
    }
    return out;
}

double Setting::widening() const {
    switch (kind_) {
        case SettingKind::CarnotLT:
        case SettingKind::CarnotKakeya:
            if (group_.m2 == 1 && constants_.c_sandwich > 1e-9)
                return (constants_.C_sandwich + 1.0) / constants_.c_sandwich;
            return 2.0;
        default:
            return 2.0;
    }
}

double Setting::delta_max() const {
    if (kind_ == SettingKind::NikodymHyperplane)
        return 1.0 / (16.0 * (1.0 + std::tan(sigma_)));
    return 1.0;
}

NominalExponents Setting::nominal_exponents() const {
    NominalExponents e;
    switch (kind_) {
        case SettingKind::EuclideanKakeya:
            e = {double(n_), double(n_ - 1), double(n_ - 1), 0.0};
            break;
        case SettingKind::RestrictedKakeya: {
            const double s = cantor_.dimension();
            const double S = (n_ == 2) ? s : double(n_ - 2) + s;
            e = {double(n_), S, double(n_ - 1), 0.0};
            break;
        }
        case SettingKind::NikodymHyperplane:
            e = {double(n_), double(n_ - 1), double(n_ - 1), 0.0};
            break;
        case SettingKind::FurstenbergK: {
            const double s = cantor_.dimension();
            e = {double(n_), double(n_ - 1), double(n_) - s, 0.0};
            break;
        }
        case SettingKind::HomogeneousKakeya:
            e = {double(layers_.Q), double(layers_.Q - layers_.s), double(layers_.Q - layers_.s), 0.0};
            break;
        case SettingKind::CarnotLT:
        case SettingKind::CarnotKakeya: {
            const double Q = group_.Q();
            const double T = (group_.m2 == 1) ? double(n_ - 1) : Q - 2.0;
            e = {Q, double(n_ - 1), T, 0.0};
            break;
        }
    }
    return e;
}

std::optional<std::pair<double, double>> Setting::nominal_lambda_alpha() const {
    switch (kind_) {
        case SettingKind::EuclideanKakeya:
        case SettingKind::FurstenbergK:
            return std::pair<double, double>{1.0, double(n_ - 2)};
        case SettingKind::RestrictedKakeya:
            return std::pair<double, double>{1.0, nominal_exponents().S - 1.0};
        case SettingKind::NikodymHyperplane:
            return std::pair<double, double>{1.0, double(n_ - 2)};
        case SettingKind::HomogeneousKakeya: {
            // Verified only in the essentially-Euclidean case m = (n-1, 0, ..., 0, 1).
            bool case_a = layers_.m[0] == n_ - 1 && layers_.m[layers_.s - 1] == 1;
            for (int j = 1; j + 1 < layers_.s && case_a; ++j) case_a = layers_.m[j] == 0;
            if (case_a) return std::pair<double, double>{1.0, double(n_ - 2)};
            return std::nullopt;
        }
        case SettingKind::CarnotKakeya:
            if (group_.m2 == 1) return std::pair<double, double>{1.0, double(n_ - 2)};
            return std::nullopt;
        case SettingKind::CarnotLT:
            return std::nullopt;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

double Setting::dist_d(const Point& p, const Point& q) const {
    switch (kind_) {
        case SettingKind::HomogeneousKakeya:
            return dist_homogeneous(p, q, layers_);
        case SettingKind::CarnotLT:
        case SettingKind::CarnotKakeya:
            return d_infty(p, q, group_);
        default:
            return dist_euclidean(p, q);
    }
}

double Setting::dist_dprime(const Point& p, const Point& q) const {
    return dist_euclidean(p, q);
}

double Setting::dist_Z(const std::vector<double>& u, const std::vector<double>& v) const {
    if (kind_ == SettingKind::HomogeneousKakeya) {
        // d_{n-1}: homogeneous metric restricted to the first n-1 coordinates.
        double d = 0;
        for (int i = 0; i + 1 < n_; ++i) {
            const double diff = std::fabs(u[i] - v[i]);
            const int j = layers_.expo[i];
            const double dj = (j == 1) ? diff : std::pow(diff, 1.0 / j);
            if (dj > d) d = dj;
        }
        return d;
    }
    return dist_euclidean(u, v);
}

double Setting::diam_Y() const {
    switch (kind_) {
        case SettingKind::EuclideanKakeya:
        case SettingKind::FurstenbergK:
            return 2.0;
        case SettingKind::RestrictedKakeya:
            return 2.0 * std::sin(arc_width_ / 2) + 1e-9;
        case SettingKind::NikodymHyperplane:
        case SettingKind::CarnotLT:
        case SettingKind::CarnotKakeya:
            return 2.0 * direction_radius_;
        case SettingKind::HomogeneousKakeya: {
            double d = 0;
            for (int i = 0; i + 1 < n_; ++i) {
                const double span = 2.0 * direction_radius_;
                const int j = layers_.expo[i];
                d = std::max(d, (j == 1) ? span : std::pow(span, 1.0 / j));
            }
            return d;
        }
    }
    return 2.0;
}

// ---------------------------------------------------------------------------
// Segments
// ---------------------------------------------------------------------------

std::pair<double, double> Setting::t_range(const std::vector<double>& u, bool widened) const {
    switch (kind_) {
        case SettingKind::EuclideanKakeya:
        case SettingKind::RestrictedKakeya:
            return widened ? std::pair{-0.5, 1.5} : std::pair{0.0, 1.0};
        case SettingKind::FurstenbergK:
            return {0.0, 1.0}; // widening enlarges only the radius
        case SettingKind::NikodymHyperplane:
            return widened ? std::pair{0.0, 2.0} : std::pair{0.0, 1.0};
        case SettingKind::HomogeneousKakeya:
        case SettingKind::CarnotKakeya:
        case SettingKind::CarnotLT: {
            double norm2 = 0;
            for (double x : u) norm2 += x * x;
            const double tmax = 1.0 / std::sqrt(1.0 + norm2);
            if (!widened) return {0.0, tmax};
            if (kind_ == SettingKind::HomogeneousKakeya) return {0.0, 2.0 * tmax};
            return {-tmax, 2.0 * tmax};
        }
    }
    return {0.0, 1.0};
}

Point Setting::segment_point(const std::vector<double>& u, const std::vector<double>& a,
                             double t) const {
    switch (kind_) {
        case SettingKind::EuclideanKakeya:
        case SettingKind::RestrictedKakeya: {
            Point p(n_);
            for (int i = 0; i < n_; ++i) p[i] = a[i] + (t - 0.5) * u[i];
            return p;
        }
        case SettingKind::FurstenbergK: {
            const double xi = cantor_point(cantor_, t);
            Point p(n_);
            for (int i = 0; i < n_; ++i) p[i] = a[i] + (xi - 0.5) * u[i];
            return p;
        }
        case SettingKind::NikodymHyperplane: {
            // u is the base point p in V; a = (e, t0).
            const double t0 = a[n_];
            Point p(n_);
            for (int i = 0; i < n_; ++i) {
                const double base = (i + 1 < n_) ? u[i] : 0.0;
                p[i] = base + (t0 + t) * a[i];
            }
            return p;
        }
        case SettingKind::HomogeneousKakeya: {
            Point p(n_);
            for (int i = 0; i + 1 < n_; ++i) p[i] = a[i] + t * u[i];
            p[n_ - 1] = a[n_ - 1] + t;
            return p;
        }
        case SettingKind::CarnotKakeya: {
            Point p(n_);
            for (int i = 0; i + 1 < n_; ++i) p[i] = a[i] + t * u[i];
            p[n_ - 1] = a[n_ - 1] + t;
            return p;
        }
        case SettingKind::CarnotLT: {
            // [a1 + t u1, a2 + t (u2, 1) + t P(a1, u1)]
            Point udir(n_);
            for (int i = 0; i + 1 < n_; ++i) udir[i] = u[i];
            udir[n_ - 1] = 1.0;
            const auto pa = group_p(group_, a, udir);
            Point p(n_);
            for (int i = 0; i < group_.m1; ++i) p[i] = a[i] + t * u[i];
            for (int i = 0; i < group_.m2; ++i) {
                const double dir2 = (i + 1 < group_.m2) ? u[group_.m1 + i] : 1.0;
                p[group_.m1 + i] = a[group_.m1 + i] + t * dir2 + t * pa[i];
            }
            return p;
        }
    }
    throw input_error("segment_point: unsupported setting");
}

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

std::vector<double> Setting::sample_direction(Rng& rng) const {
    switch (kind_) {
        case SettingKind::EuclideanKakeya:
        case SettingKind::FurstenbergK:
            return rng.unit_vector(n_);
        case SettingKind::RestrictedKakeya: {
            const auto mids = cantor_midpoints(cantor_);
            const double c = mids[rng.uniform_index(mids.size())];
            const double phi = arc_width_ * c;
            if (n_ == 2) return {std::cos(phi), std::sin(phi)};
            const double theta = rng.uniform(0.0, 1.0);
            return {std::cos(theta) * std::cos(phi), std::sin(theta) * std::cos(phi),
                    std::sin(phi)};
        }
        case SettingKind::NikodymHyperplane:
            return rng.in_ball(n_ - 1, direction_radius_);
        case SettingKind::HomogeneousKakeya:
        case SettingKind::CarnotLT:
        case SettingKind::CarnotKakeya:
            return rng.in_ball(n_ - 1, direction_radius_);
    }
    throw input_error("sample_direction: unsupported setting");
}

std::vector<std::vector<double>> Setting::sample_directions(std::uint64_t seed, int count) const {
    if (count < 1) throw input_error("sample_directions: count must be >= 1");
    Rng rng(seed);
    std::vector<std::vector<double>> out;
    out.reserve(count);
    for (int i = 0; i < count; ++i) out.push_back(sample_direction(rng));
    return out;
}

std::vector<double> Setting::sample_param(Rng& rng) const {
    switch (kind_) {
        case SettingKind::EuclideanKakeya:
        case SettingKind::RestrictedKakeya:
        case SettingKind::FurstenbergK:
            return rng.in_ball(n_, param_radius_);
        case SettingKind::NikodymHyperplane: {
            // e within angle sigma of the x_n-axis, t in (1/4, C_sigma).
            std::vector<double> a(n_ + 1);
            const double phi = rng.uniform(0.0, sigma_ * 0.999);
            const auto omega = rng.unit_vector(n_ - 1);
            for (int i = 0; i + 1 < n_; ++i) a[i] = std::sin(phi) * omega[i];
            a[n_ - 1] = std::cos(phi);
            a[n_] = rng.uniform(0.2501, c_sigma_);
            return a;
        }
        case SettingKind::HomogeneousKakeya: {
            std::vector<double> a(n_);
            for (int i = 0; i < n_; ++i) a[i] = rng.uniform(-0.5, 0.5);
            return a;
        }
        case SettingKind::CarnotLT:
        case SettingKind::CarnotKakeya:
            return rng.in_ball(n_, param_radius_);
    }
    throw input_error("sample_param: unsupported setting");
}

std::vector<std::vector<double>> Setting::direction_grid(const std::vector<double>& center,
                                                         double dz_radius, double delta,
                                                         std::size_t max_count) const {
    std::vector<std::vector<double>> out;
    switch (kind_) {
        case SettingKind::EuclideanKakeya:
        case SettingKind::FurstenbergK: {
            // Tangent-plane grid, then projected back to the sphere. Spacing
            // 1.6*delta in the plane keeps the projected points delta-separated
            // for caps of radius <= 1/2.
            const auto frame = orthonormal_frame(center);
            const double h = 1.6 * delta;
            const int K = int(std::floor(dz_radius / h));
            std::vector<int> idx(n_ - 1, -K);
            if (K < 0) return out;
            while (true) {
                Point cand(center);
                double r2 = 0;
                for (int k = 0; k + 1 < n_; ++k) {
                    const double c = idx[k] * h;
                    r2 += c * c;
                    for (int i = 0; i < n_; ++i) cand[i] += c * frame[k + 1][i];
                }
                if (r2 <= dz_radius * dz_radius) {
                    const double nn = norm_euclidean(cand);
                    for (double& x : cand) x /= nn;
                    if (dist_euclidean(cand, center) <= dz_radius) out.push_back(cand);
                    if (out.size() >= max_count) return out;
                }
                int k = 0;
                while (k + 1 < n_ && ++idx[k] > K) idx[k++] = -K;
                if (k + 1 >= n_) break;
            }
            return out;
        }
        case SettingKind::RestrictedKakeya: {
            const auto mids = cantor_midpoints(cantor_);
            std::vector<double> kept;
            for (double m : mids) {
                if (!kept.empty() && arc_width_ * (m - kept.back()) <= delta) continue;
                kept.push_back(m);
            }
            for (double c : kept) {
                const double phi = arc_width_ * c;
                if (n_ == 2) {
                    std::vector<double> u{std::cos(phi), std::sin(phi)};
                    if (dist_euclidean(u, center) <= dz_radius) out.push_back(u);
                } else {
                    for (double theta = 0.0; theta <= 1.0; theta += 1.6 * delta) {
                        std::vector<double> u{std::cos(theta) * std::cos(phi),
                                              std::sin(theta) * std::cos(phi), std::sin(phi)};
                        if (dist_euclidean(u, center) <= dz_radius) out.push_back(u);
                        if (out.size() >= max_count) return out;
                    }
                }
                if (out.size() >= max_count) return out;
            }
            return out;
        }
        case SettingKind::NikodymHyperplane:
        case SettingKind::HomogeneousKakeya:
        case SettingKind::CarnotLT:
        case SettingKind::CarnotKakeya: {
            // Coordinate grid with per-coordinate spacing 1.05*delta^{e_i},
            // e_i the d_Z exponent of coordinate i. Distinct grid points are
            // automatically delta-separated in d_Z.
            const int dim = n_ - 1;
            std::vector<double> h(dim);
            for (int i = 0; i < dim; ++i) {
                int e = 1;
                if (kind_ == SettingKind::HomogeneousKakeya) e = layers_.expo[i];
                h[i] = 1.05 * std::pow(delta, e);
            }
            std::vector<double> radius(dim);
            for (int i = 0; i < dim; ++i) {
                int e = 1;
                if (kind_ == SettingKind::HomogeneousKakeya) e = layers_.expo[i];
                radius[i] = std::pow(dz_radius, e);
            }
            std::vector<int> K(dim);
            for (int i = 0; i < dim; ++i) K[i] = int(std::floor(radius[i] / h[i]));
            std::vector<int> idx(dim);
            for (int i = 0; i < dim; ++i) idx[i] = -K[i];
            while (true) {
                std::vector<double> cand(dim);
                for (int i = 0; i < dim; ++i) cand[i] = center[i] + idx[i] * h[i];
                double norm2 = 0;
                for (double x : cand) norm2 += x * x;
                if (std::sqrt(norm2) <= direction_radius_ && dist_Z(cand, center) <= dz_radius)
                    out.push_back(cand);
                if (out.size() >= max_count) return out;
                int k = 0;
                while (k < dim && ++idx[k] > K[k]) idx[k++] = -K[k];
                if (k >= dim) break;
            }
            return out;
        }
    }
    return out;
}

std::vector<std::vector<double>> Setting::direction_slab_grid(
    const std::vector<double>& center, const std::vector<double>& toward, double beta,
    double width, double delta, std::size_t max_count, std::size_t* out_stride) const {
    std::vector<std::vector<double>> out;
    if (out_stride) *out_stride = 1;
    switch (kind_) {
        case SettingKind::EuclideanKakeya:
        case SettingKind::FurstenbergK: {
            // Tangent frame with the first axis toward `toward`, the rest
            // transverse; spacing 1.6*delta keeps projections delta-separated.
            std::vector<double> t1(center.size());
            double dot = 0;
            for (size_t i = 0; i < center.size(); ++i) dot += toward[i] * center[i];
            for (size_t i = 0; i < center.size(); ++i) t1[i] = toward[i] - dot * center[i];
            const double t1n = norm_euclidean(t1);
            if (t1n < 1e-9) return direction_grid(center, beta, delta, max_count);
            for (auto& x : t1) x /= t1n;
            // Tangent basis: t1 first, the rest orthogonal to {center, t1}.
            std::vector<Point> axes{center, t1};
            for (int i = 0; i < int(center.size()) && int(axes.size()) < int(center.size()); ++i) {
                Point v(center.size(), 0.0);
                v[i] = 1.0;
                for (const auto& e : axes) {
                    double d = 0;
                    for (size_t k = 0; k < v.size(); ++k) d += v[k] * e[k];
                    for (size_t k = 0; k < v.size(); ++k) v[k] -= d * e[k];
                }
                const double vn = norm_euclidean(v);
                if (vn > 1e-8) {
                    for (auto& x : v) x /= vn;
                    axes.push_back(std::move(v));
                }
            }
            const double h = 1.6 * delta;
            const int dim = int(center.size()) - 1;
            std::vector<int> K(dim);
            K[0] = int(std::floor(beta / h));
            for (int k = 1; k < dim; ++k) K[k] = int(std::floor(std::min(beta, width) / h));
            std::size_t total = 1;
            for (int k = 0; k < dim; ++k) total *= std::size_t(2 * K[k] + 1);
            const std::size_t stride = std::max<std::size_t>(1, (total + max_count - 1) / max_count);
            if (out_stride) *out_stride = stride;
            std::vector<int> idx(dim);
            for (int k = 0; k < dim; ++k) idx[k] = -K[k];
            std::size_t counter = 0;
            while (true) {
                if (counter++ % stride == 0) {
                    Point cand(center);
                    for (int k = 0; k < dim; ++k)
                        for (size_t i = 0; i < cand.size(); ++i)
                            cand[i] += idx[k] * h * axes[k + 1][i];
                    const double nn = norm_euclidean(cand);
                    for (auto& x : cand) x /= nn;
                    if (dist_euclidean(cand, center) <= beta) out.push_back(cand);
                }
                int k = 0;
                while (k < dim && ++idx[k] > K[k]) idx[k++] = -K[k];
                if (k >= dim) break;
            }
            return out;
        }
        case SettingKind::RestrictedKakeya:
            return direction_grid(center, beta, delta, max_count);
        case SettingKind::NikodymHyperplane:
        case SettingKind::CarnotLT:
        case SettingKind::CarnotKakeya:
        case SettingKind::HomogeneousKakeya: {
            const int dim = n_ - 1;
            int along = 0;
            double best = -1;
            for (int i = 0; i < dim; ++i) {
                const double move = std::fabs(toward[i] - center[i]);
                if (move > best) {
                    best = move;
                    along = i;
                }
            }
            std::vector<double> h(dim), half(dim);
            for (int i = 0; i < dim; ++i) {
                int e = 1;
                if (kind_ == SettingKind::HomogeneousKakeya) e = layers_.expo[i];
                h[i] = 1.05 * std::pow(delta, e);
                const double reach = (i == along) ? beta : std::min(beta, width);
                half[i] = std::pow(reach, e);
            }
            std::vector<int> K(dim), idx(dim);
            std::size_t total = 1;
            for (int i = 0; i < dim; ++i) {
                K[i] = int(std::floor(half[i] / h[i]));
                idx[i] = -K[i];
                total *= std::size_t(2 * K[i] + 1);
            }
            const std::size_t stride = std::max<std::size_t>(1, (total + max_count - 1) / max_count);
            if (out_stride) *out_stride = stride;
            std::size_t counter = 0;
            while (true) {
                if (counter++ % stride == 0) {
                    std::vector<double> cand(dim);
                    for (int i = 0; i < dim; ++i) cand[i] = center[i] + idx[i] * h[i];
                    double norm2 = 0;
                    for (double x : cand) norm2 += x * x;
                    if (std::sqrt(norm2) <= direction_radius_ && dist_Z(cand, center) <= beta)
                        out.push_back(cand);
                }
                int k = 0;
                while (k < dim && ++idx[k] > K[k]) idx[k++] = -K[k];
                if (k >= dim) break;
            }
            return out;
        }
    }
    return out;
}

std::optional<std::vector<double>> Setting::param_through(const std::vector<double>& u,
                                                          const Point& z, double t_at) const {
    switch (kind_) {
        case SettingKind::EuclideanKakeya:
        case SettingKind::RestrictedKakeya: {
            std::vector<double> a(n_);
            for (int i = 0; i < n_; ++i) a[i] = z[i] - (t_at - 0.5) * u[i];
            return a;
        }
        case SettingKind::FurstenbergK: {
            const double xi = cantor_point(cantor_, t_at);
            std::vector<double> a(n_);
            for (int i = 0; i < n_; ++i) a[i] = z[i] - (xi - 0.5) * u[i];
            return a;
        }
        case SettingKind::NikodymHyperplane: {
            // u is the base point p; choose e toward z and t0 so that the
            // segment parameter t_at lands on z.
            Point base(n_, 0.0);
            for (int i = 0; i + 1 < n_; ++i) base[i] = u[i];
            std::vector<double> dir(n_);
            for (int i = 0; i < n_; ++i) dir[i] = z[i] - base[i];
            const double len = norm_euclidean(dir);
            if (len < 1e-12) return std::nullopt;
            for (double& x : dir) x /= len;
            if (dir[n_ - 1] < std::cos(sigma_)) return std::nullopt;
            const double t0 = len - t_at;
            if (!(t0 > 0.25 && t0 < c_sigma_)) return std::nullopt;
            std::vector<double> a(n_ + 1);
            for (int i = 0; i < n_; ++i) a[i] = dir[i];
            a[n_] = t0;
            return a;
        }
        case SettingKind::HomogeneousKakeya:
        case SettingKind::CarnotKakeya: {
            std::vector<double> a(n_);
            for (int i = 0; i + 1 < n_; ++i) a[i] = z[i] - t_at * u[i];
            a[n_ - 1] = z[n_ - 1] - t_at;
            return a;
        }
        case SettingKind::CarnotLT: {
            // a = z * gamma_u(t_at; 0)^{-1} so that tau_a places the segment
            // point t_at on z.
            std::vector<double> zero(n_, 0.0);
            const Point seg = segment_point(u, zero, t_at);
            return group_mul(z, group_inv(seg, group_), group_);
        }
    }
    return std::nullopt;
}

double Setting::segment_measure_in_ball(const std::vector<double>& u,
                                        const std::vector<double>& a, const Point& x,
                                        double r) const {
    const auto [t0, t1] = t_range(u, false);
    if (kind_ == SettingKind::FurstenbergK) {
        // Cantor measure of the line interval cut by the Euclidean ball: the
        // ball meets the carrier line in an interval of radius <= r around
        // the projection of x.
        double dot = 0, unorm2 = 0;
        for (int i = 0; i < n_; ++i) {
            dot += (x[i] - a[i]) * u[i];
            unorm2 += u[i] * u[i];
        }
        const double xi = dot / unorm2 + 0.5;
        Point foot(n_);
        for (int i = 0; i < n_; ++i) foot[i] = a[i] + (xi - 0.5) * u[i];
        const double perp = dist_euclidean(foot, x);
        if (perp >= r) return 0.0;
        const double reach = std::sqrt(r * r - perp * perp);
        return cantor_measure_interval(cantor_, xi - reach, xi + reach);
    }
    const auto f = [&](double t) { return dist_d(x, segment_point(u, a, t)); };
    auto [tm, fm] = golden_min(f, t0, t1);
    if (fm > r) return 0.0;
    // f is quasiconvex along the segment, so {t : f(t) <= r} is an interval;
    // bisect for its two ends around the minimizer.
    double left = t0, right = t1;
    if (f(t0) > r) {
        double lo = t0, hi = tm;
        for (int i = 0; i < 80; ++i) {
            const double mid = 0.5 * (lo + hi);
            if (f(mid) <= r) hi = mid; else lo = mid;
        }
        left = 0.5 * (lo + hi);
    }
    if (f(t1) > r) {
        double lo = tm, hi = t1;
        for (int i = 0; i < 80; ++i) {
            const double mid = 0.5 * (lo + hi);
            if (f(mid) <= r) lo = mid; else hi = mid;
        }
        right = 0.5 * (lo + hi);
    }
    return std::max(0.0, right - left) / (t1 - t0);
}

// ---------------------------------------------------------------------------
// Tubes
// ---------------------------------------------------------------------------

Tube make_tube(const Setting& s, std::vector<double> u, std::vector<double> a, double delta,
               bool widened) {
    if (!(delta > 0 && delta < 1)) throw input_error("make_tube: delta must be in (0,1)");
    if (delta > s.delta_max())
        throw input_error("make_tube: delta exceeds the admissible range of the setting");
    if (int(u.size()) != s.direction_dim()) throw input_error("make_tube: direction dimension");
    if (int(a.size()) != s.param_dim()) throw input_error("make_tube: parameter dimension");
    return Tube{&s, std::move(u), std::move(a), delta, widened};
}

double tube_core_distance(const Tube& tube, const Point& p) {
    const Setting& s = *tube.setting;
    const auto [t0, t1] = s.t_range(tube.u, tube.widened);
    switch (s.kind()) {
        case SettingKind::EuclideanKakeya:
        case SettingKind::RestrictedKakeya:
        case SettingKind::NikodymHyperplane: {
            const Point e0 = s.segment_point(tube.u, tube.a, t0);
            const Point e1 = s.segment_point(tube.u, tube.a, t1);
            return dist_point_segment(p, e0, e1);
        }
        case SettingKind::FurstenbergK: {
            double dot = 0;
            for (int i = 0; i < s.ambient_dim(); ++i) dot += (p[i] - tube.a[i]) * tube.u[i];
            const double xi = dot + 0.5; // |u| = 1
            Point foot(s.ambient_dim());
            for (int i = 0; i < s.ambient_dim(); ++i)
                foot[i] = tube.a[i] + (xi - 0.5) * tube.u[i];
            const double perp = dist_euclidean(foot, p);
            return std::hypot(cantor_distance(s.cantor(), xi), perp);
        }
        case SettingKind::HomogeneousKakeya: {
            // Explicit slab form: hard x_n window, d_{n-1} distance to the trace.
            const int n = s.ambient_dim();
            const double height = p[n - 1] - tube.a[n - 1];
            if (height < t0 - 1e-12 || height > t1 + 1e-12) return 1e100;
            std::vector<double> trace(n - 1), coords(n - 1);
            for (int i = 0; i + 1 < n; ++i) {
                trace[i] = tube.a[i] + height * tube.u[i];
                coords[i] = p[i];
            }
            return s.dist_Z(coords, trace);
        }
        case SettingKind::CarnotLT:
        case SettingKind::CarnotKakeya: {
            const auto f = [&](double t) {
                return d_infty(p, s.segment_point(tube.u, tube.a, t), s.group());
            };
            return min_over_segment(f, t0, t1, tube.delta / 10.0);
        }
    }
    return 1e100;
}

bool tube_contains(const Tube& tube, const Point& p) {
    const double radius = tube.widened ? tube.setting->widening() * tube.delta : tube.delta;
    return tube_core_distance(tube, p) <= radius;
}

Point SampleRegion::draw(Rng& rng) const {
    const double x = rng.next_double() * total_volume;
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), x);
    const size_t k = std::min(size_t(it - cumulative.begin()), cells.size() - 1);
    const auto& cell = cells[k];
    Point p = cell.origin;
    for (size_t a = 0; a < cell.axes.size(); ++a) {
        const double c = rng.next_double() * cell.extent[a];
        for (size_t i = 0; i < p.size(); ++i) p[i] += c * cell.axes[a][i];
    }
    return p;
}

namespace {

// |det| of the matrix whose columns are the cell axes scaled by the extents.
double cell_volume(const SampleRegion::Cell& cell) {
    const int n = int(cell.origin.size());
    if (int(cell.axes.size()) != n) throw numeric_error("cell_volume: need n axes");
    std::vector<std::vector<double>> m(n, std::vector<double>(n));
    for (int c = 0; c < n; ++c)
        for (int r = 0; r < n; ++r) m[r][c] = cell.axes[c][r] * cell.extent[c];
    double det = 1;
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int r = col + 1; r < n; ++r)
            if (std::fabs(m[r][col]) > std::fabs(m[pivot][col])) pivot = r;
        if (std::fabs(m[pivot][col]) < 1e-300) return 0.0;
        if (pivot != col) {
            std::swap(m[pivot], m[col]);
            det = -det;
        }
        det *= m[col][col];
        for (int r = col + 1; r < n; ++r) {
            const double f = m[r][col] / m[col][col];
            for (int c = col; c < n; ++c) m[r][c] -= f * m[col][c];
        }
    }
    return std::fabs(det);
}

void finalize_region(SampleRegion& region) {
    region.total_volume = 0;
    region.cumulative.clear();
    for (auto& cell : region.cells) {
        cell.volume = cell_volume(cell);
        region.total_volume += cell.volume;
        region.cumulative.push_back(region.total_volume);
    }
    if (region.cells.empty() || region.total_volume <= 0)
        throw numeric_error("tube_sample_region: empty region");
}

SampleRegion::Cell rotated_cell(const Point& start, const Point& end, double radius) {
    const int n = int(start.size());
    std::vector<double> dir(n);
    for (int i = 0; i < n; ++i) dir[i] = end[i] - start[i];
    const double len = norm_euclidean(dir);
    SampleRegion::Cell cell;
    if (len < 1e-12) {
        cell.origin = start;
        for (int i = 0; i < n; ++i) cell.origin[i] -= radius;
        for (int i = 0; i < n; ++i) {
            Point axis(n, 0.0);
            axis[i] = 1.0;
            cell.axes.push_back(axis);
            cell.extent.push_back(2 * radius);
        }
        return cell;
    }
    const auto frame = orthonormal_frame(dir);
    cell.origin = start;
    for (int i = 0; i < n; ++i) {
        cell.origin[i] -= radius * frame[0][i];
        for (int k = 1; k < n; ++k) cell.origin[i] -= radius * frame[k][i];
    }
    cell.axes = frame;
    cell.extent.assign(n, 2 * radius);
    cell.extent[0] = len + 2 * radius;
    return cell;
}

} // namespace

SampleRegion tube_sample_region(const Tube& tube) {
    const Setting& s = *tube.setting;
    const double radius = tube.widened ? s.widening() * tube.delta : tube.delta;
    const auto [t0, t1] = s.t_range(tube.u, tube.widened);
    SampleRegion region;
    const int n = s.ambient_dim();

    switch (s.kind()) {
        case SettingKind::EuclideanKakeya:
        case SettingKind::RestrictedKakeya:
        case SettingKind::NikodymHyperplane: {
            region.cells.push_back(rotated_cell(s.segment_point(tube.u, tube.a, t0),
                                                s.segment_point(tube.u, tube.a, t1), radius));
            break;
        }
        case SettingKind::FurstenbergK: {
            // One rotated slab per Cantor interval, merged across small gaps
            // so the slabs stay disjoint in the segment coordinate.
            auto intervals = cantor_intervals(s.cantor());
            std::vector<std::pair<double, double>> merged;
            for (auto [lo, hi] : intervals) {
                if (!merged.empty() && lo - merged.back().second < 2 * radius)
                    merged.back().second = hi;
                else
                    merged.emplace_back(lo, hi);
            }
            for (auto [lo, hi] : merged) {
                Point start(n), end(n);
                for (int i = 0; i < n; ++i) {
                    start[i] = tube.a[i] + (lo - 0.5) * tube.u[i];
                    end[i] = tube.a[i] + (hi - 0.5) * tube.u[i];
                }
                region.cells.push_back(rotated_cell(start, end, radius));
            }
            break;
        }
        case SettingKind::HomogeneousKakeya: {
            // x_n-slabs; within each slab an axis-aligned box around the trace.
            double spread = 0;
            for (int i = 0; i + 1 < n; ++i)
                spread = std::max(spread, std::fabs(tube.u[i]) * (t1 - t0));
            const double rj_min = std::pow(radius, s.layers().expo[0]);
            int slabs = int(std::ceil(spread / std::max(rj_min, 1e-9)));
            slabs = std::clamp(slabs, 1, 4096);
            for (int k = 0; k < slabs; ++k) {
                const double ta = t0 + (t1 - t0) * k / slabs;
                const double tb = t0 + (t1 - t0) * (k + 1) / slabs;
                SampleRegion::Cell cell;
                cell.origin.assign(n, 0.0);
                for (int i = 0; i < n; ++i) {
                    Point axis(n, 0.0);
                    axis[i] = 1.0;
                    cell.axes.push_back(axis);
                }
                cell.extent.assign(n, 0.0);
                for (int i = 0; i + 1 < n; ++i) {
                    const double va = tube.a[i] + ta * tube.u[i];
                    const double vb = tube.a[i] + tb * tube.u[i];
                    const double rj = std::pow(radius, s.layers().expo[i]);
                    cell.origin[i] = std::min(va, vb) - rj;
                    cell.extent[i] = std::fabs(vb - va) + 2 * rj;
                }
                cell.origin[n - 1] = tube.a[n - 1] + ta;
                cell.extent[n - 1] = tb - ta;
                region.cells.push_back(cell);
            }
            break;
        }
        case SettingKind::CarnotLT:
        case SettingKind::CarnotKakeya: {
            // Sheared parallelepiped slabs. One axis follows the spine drift;
            // first-layer axes carry the linear twist w -> P(gamma1, w) so the
            // second-layer residual stays at ball-thickness scale.
            const GroupSpec& g = s.group();
            double sum_b2 = 0;
            for (int j = g.m1 + 1; j <= g.n(); ++j)
                for (int l = 1; l <= g.m1; ++l)
                    for (int i = l + 1; i <= g.m1; ++i) {
                        const double b = g.coeff(j, l, i);
                        sum_b2 += b * b;
                    }
            const double cmat = std::sqrt(2.0 * sum_b2);
            const double ball2 = std::pow(radius / g.epsilon, 2.0);
            double u1norm = 0;
            for (int i = 0; i < g.m1; ++i) u1norm += tube.u[i] * tube.u[i];
            u1norm = std::sqrt(u1norm);

            const double wnorm = radius * std::sqrt(double(g.m1));
            double slab_len = (t1 - t0);
            if (cmat * u1norm > 1e-12)
                slab_len = std::min(slab_len, 2.0 * ball2 / (cmat * u1norm * wnorm));
            const int slabs = std::clamp(int(std::ceil((t1 - t0) / slab_len)), 1, 1024);

            for (int k = 0; k < slabs; ++k) {
                const double ta = t0 + (t1 - t0) * k / slabs;
                const double tb = t0 + (t1 - t0) * (k + 1) / slabs;
                const Point ga = s.segment_point(tube.u, tube.a, ta);
                const Point gb = s.segment_point(tube.u, tube.a, tb);
                const Point gm = s.segment_point(tube.u, tube.a, 0.5 * (ta + tb));
                // Shear B_{j,i} = sum_{l != i} b^j_{l,i} gamma1_l at the slab midpoint.
                std::vector<std::vector<double>> shear(g.m2, std::vector<double>(g.m1, 0.0));
                for (int j = g.m1 + 1; j <= g.n(); ++j)
                    for (int i = 1; i <= g.m1; ++i) {
                        double acc = 0;
                        for (int l = 1; l <= g.m1; ++l)
                            if (l != i) acc += g.coeff(j, l, i) * gm[l - 1];
                        shear[j - g.m1 - 1][i - 1] = acc;
                    }
                const double pad2 =
                    ball2 + 0.5 * cmat * u1norm * (tb - ta) * wnorm + 1e-14;
                const double padm = pad2 * std::sqrt(double(g.m2));

                // Spine drift with the sheared first-layer part removed: a
                // pure second-layer vector v2r = v2 - B v1.
                std::vector<double> v1(g.m1), v2r(g.m2);
                for (int i = 0; i < g.m1; ++i) v1[i] = gb[i] - ga[i];
                for (int j = 0; j < g.m2; ++j) {
                    double acc = gb[g.m1 + j] - ga[g.m1 + j];
                    for (int i = 0; i < g.m1; ++i) acc -= shear[j][i] * v1[i];
                    v2r[j] = acc;
                }
                double v2r_norm = 0;
                for (double x : v2r) v2r_norm += x * x;
                v2r_norm = std::sqrt(v2r_norm);
                // Orthonormal frame of the second layer, first vector along v2r.
                std::vector<std::vector<double>> f2;
                if (v2r_norm > 1e-14) {
                    f2 = orthonormal_frame(v2r);
                } else {
                    for (int j = 0; j < g.m2; ++j) {
                        std::vector<double> e(g.m2, 0.0);
                        e[j] = 1.0;
                        f2.push_back(std::move(e));
                    }
                }

                SampleRegion::Cell cell;
                cell.origin = ga;
                // Sheared first-layer axes absorb w1 plus the first-layer drift.
                for (int i = 0; i < g.m1; ++i) {
                    Point axis(n, 0.0);
                    axis[i] = 1.0;
                    for (int j = 0; j < g.m2; ++j) axis[g.m1 + j] = shear[j][i];
                    cell.axes.push_back(std::move(axis));
                    const double lo = -radius + std::min(0.0, v1[i]);
                    const double hi = radius + std::max(0.0, v1[i]);
                    cell.extent.push_back(hi - lo);
                    for (int j = 0; j < g.m2; ++j)
                        cell.origin[g.m1 + j] += lo * shear[j][i];
                    cell.origin[i] += lo;
                }
                // Second-layer rotated box: drift along f2[0] plus residual pad.
                for (int j = 0; j < g.m2; ++j) {
                    Point axis(n, 0.0);
                    for (int c = 0; c < g.m2; ++c) axis[g.m1 + c] = f2[j][c];
                    cell.axes.push_back(std::move(axis));
                    const double span = (j == 0 ? v2r_norm : 0.0) + 2 * padm;
                    cell.extent.push_back(span);
                    for (int c = 0; c < g.m2; ++c)
                        cell.origin[g.m1 + c] -= padm * f2[j][c];
                }
                region.cells.push_back(std::move(cell));
            }
            break;
        }
    }
    finalize_region(region);
    return region;
}

Box tube_bounding_box(const Tube& tube) {
    const auto region = tube_sample_region(tube);
    const int n = tube.setting->ambient_dim();
    Box box;
    box.lo.assign(n, 1e100);
    box.hi.assign(n, -1e100);
    for (const auto& cell : region.cells) {
        // Corner sweep over the cell frame.
        for (int i = 0; i < n; ++i) {
            double lo = cell.origin[i], hi = cell.origin[i];
            for (size_t a = 0; a < cell.axes.size(); ++a) {
                const double step = cell.extent[a] * cell.axes[a][i];
                if (step >= 0) hi += step;
                else lo += step;
            }
            box.lo[i] = std::min(box.lo[i], lo);
            box.hi[i] = std::max(box.hi[i], hi);
        }
    }
    return box;
}

std::vector<Point> tube_cover_centers(const Tube& tube) {
    const Setting& s = *tube.setting;
    int s_exp = 0;
    if (s.kind() == SettingKind::CarnotLT || s.kind() == SettingKind::CarnotKakeya) s_exp = 2;
    else if (s.kind() == SettingKind::HomogeneousKakeya) s_exp = s.layers().s;
    else throw input_error("tube_cover_centers: Carnot or homogeneous variant required");

    const auto [t0, t1] = s.t_range(tube.u, false);
    const double step = std::pow(tube.delta, s_exp);
    const long long count = (long long)std::ceil((t1 - t0) / step);
    if (count > 50'000'000) throw resource_error("tube_cover_centers: too many centers");
    std::vector<Point> centers;
    centers.reserve(count);
    for (long long j = 0; j < count; ++j)
        centers.push_back(s.segment_point(tube.u, tube.a, t0 + j * step));
    return centers;
}

Point sample_point_on_segment(const Tube& tube, Rng& rng) {
    const auto [t0, t1] = tube.setting->t_range(tube.u, tube.widened);
    return tube.setting->segment_point(tube.u, tube.a, rng.uniform(t0, t1));
}

Point sample_point_in_tube(const Tube& tube, Rng& rng) {
    const auto region = tube_sample_region(tube);
    for (int attempt = 0; attempt < 100000; ++attempt) {
        Point p = region.draw(rng);
        if (tube_contains(tube, p)) return p;
    }
    throw sampling_error("sample_point_in_tube: rejection sampling failed");
}

double tube_radius(const Tube& tube) {
    return tube.widened ? tube.setting->widening() * tube.delta : tube.delta;
}

SpineApproach spine_closest_approach(const Tube& A, const Tube& B) {
    const Setting& s = *A.setting;
    const auto [a0, a1] = s.t_range(A.u, A.widened);
    const auto [b0, b1] = B.setting->t_range(B.u, B.widened);
    const auto dist = [&](double t, double u) {
        return s.dist_d(s.segment_point(A.u, A.a, t), B.setting->segment_point(B.u, B.a, u));
    };
    // The inner slice u -> dist(t, u) is quasiconvex (max of powers of affine
    // coordinate gaps), so the inner search is exact; the outer variable is
    // scanned plus golden-refined.
    double inner_arg = 0.5 * (b0 + b1);
    const auto inner = [&](double t) {
        auto [u, v] = golden_min([&](double x) { return dist(t, x); }, b0, b1, 48);
        inner_arg = u;
        return v;
    };
    SpineApproach best;
    best.dist = 1e100;
    const int cells = 48;
    int best_cell = 0;
    for (int i = 0; i <= cells; ++i) {
        const double t = a0 + (a1 - a0) * i / cells;
        const double v = inner(t);
        if (v < best.dist) {
            best = {t, inner_arg, v};
            best_cell = i;
        }
    }
    const double cell = (a1 - a0) / cells;
    const double lo = std::max(a0, a0 + (best_cell - 1) * cell);
    const double hi = std::min(a1, a0 + (best_cell + 1) * cell);
    auto [tr, vr] = golden_min(inner, lo, hi, 48);
    if (vr < best.dist) best = {tr, inner_arg, vr};
    auto [tg, vg] = golden_min(inner, a0, a1, 48);
    if (vg < best.dist) best = {tg, inner_arg, vg};
    return best;
}

bool tubes_intersect(const Tube& A, const Tube& B) {
    const Setting& s = *A.setting;
    // Segment cores under the Euclidean metric admit the closed form.
    const auto k = s.kind();
    if (k == SettingKind::EuclideanKakeya || k == SettingKind::RestrictedKakeya ||
        k == SettingKind::NikodymHyperplane) {
        const auto [a0, a1] = s.t_range(A.u, A.widened);
        const auto [b0, b1] = B.setting->t_range(B.u, B.widened);
        const double d = dist_segment_segment(
            s.segment_point(A.u, A.a, a0), s.segment_point(A.u, A.a, a1),
            B.setting->segment_point(B.u, B.a, b0), B.setting->segment_point(B.u, B.a, b1));
        return d <= tube_radius(A) + tube_radius(B) + 1e-12;
    }
    return spine_closest_approach(A, B).dist <= tube_radius(A) + tube_radius(B) + 1e-12;
}

std::vector<Point> intersection_cloud(const Tube& A, const Tube& B, int max_points) {
    const Setting& s = *A.setting;
    const double threshold = tube_radius(A) + tube_radius(B);
    const auto approach = spine_closest_approach(A, B);
    if (approach.dist > threshold) return {};
    const auto [a0, a1] = s.t_range(A.u, A.widened);
    const auto [b0, b1] = B.setting->t_range(B.u, B.widened);
    const auto dist = [&](double t, double u) {
        return s.dist_d(s.segment_point(A.u, A.a, t), B.setting->segment_point(B.u, B.a, u));
    };
    // The near set lives in a window around the closest approach; widen the
    // window until its boundary is clear of the threshold (or spans the range).
    const int grid = 32;
    double window = 4 * threshold;
    std::vector<Point> cloud;
    for (int attempt = 0; attempt < 12; ++attempt) {
        cloud.clear();
        const double ta = std::max(a0, approach.tA - window);
        const double tb = std::min(a1, approach.tA + window);
        const double ua = std::max(b0, approach.tB - window);
        const double ub = std::min(b1, approach.tB + window);
        bool boundary_hit = false;
        for (int i = 0; i <= grid; ++i)
            for (int j = 0; j <= grid; ++j) {
                const double t = ta + (tb - ta) * i / grid;
                const double u = ua + (ub - ua) * j / grid;
                if (dist(t, u) <= threshold) {
                    if ((i == 0 && ta > a0) || (i == grid && tb < a1) ||
                        (j == 0 && ua > b0) || (j == grid && ub < b1))
                        boundary_hit = true;
                    const Point p = s.segment_point(A.u, A.a, t);
                    const Point q = B.setting->segment_point(B.u, B.a, u);
                    Point mid(p.size());
                    for (size_t k = 0; k < p.size(); ++k) mid[k] = 0.5 * (p[k] + q[k]);
                    cloud.push_back(std::move(mid));
                }
            }
        const bool spans = ta <= a0 && tb >= a1 && ua <= b0 && ub >= b1;
        if (!boundary_hit || spans) break;
        window *= 2;
    }
    if (int(cloud.size()) > max_points) {
        std::vector<Point> thinned;
        const double stride = double(cloud.size()) / max_points;
        for (int k = 0; k < max_points; ++k) thinned.push_back(cloud[size_t(k * stride)]);
        cloud = std::move(thinned);
    }
    return cloud;
}

} // namespace kakeya

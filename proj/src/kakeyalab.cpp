#include "kakeya/kakeyalab.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace kakeya {

// ---------------------------------------------------------------------------
// GridField
// ---------------------------------------------------------------------------

double GridField::at(const Point& p) const {
    const int n = bounds.dim();
    long long idx = 0, stride = 1;
    for (int i = 0; i < n; ++i) {
        if (p[i] < bounds.lo[i] || p[i] > bounds.hi[i]) return 0.0;
        const double rel = (p[i] - bounds.lo[i]) / (bounds.hi[i] - bounds.lo[i]);
        long long cell = (long long)std::floor(rel * resolution[i]);
        cell = std::clamp<long long>(cell, 0, resolution[i] - 1);
        idx += cell * stride;
        stride *= resolution[i];
    }
    return values[size_t(idx)];
}

double GridField::max_value() const {
    double mx = 0;
    for (double v : values) mx = std::max(mx, v);
    return mx;
}

GridField GridField::from_indicator(const Indicator& f, Box bounds, std::vector<int> resolution) {
    GridField field;
    field.bounds = std::move(bounds);
    field.resolution = std::move(resolution);
    const int n = field.bounds.dim();
    for (int r : field.resolution)
        if (r < 4) throw input_error("GridField: resolution must be >= 4 cells per axis");
    long long total = 1;
    for (int r : field.resolution) total *= r;
    if (total > 200'000'000) throw resource_error("GridField: too many cells");
    field.values.resize(size_t(total));
    std::vector<long long> idx(n, 0);
    Point p(n);
    for (long long flat = 0; flat < total; ++flat) {
        long long rem = flat;
        for (int i = 0; i < n; ++i) {
            const long long c = rem % field.resolution[i];
            rem /= field.resolution[i];
            p[i] = field.bounds.lo[i] +
                   (c + 0.5) * (field.bounds.hi[i] - field.bounds.lo[i]) / field.resolution[i];
        }
        field.values[size_t(flat)] = f(p) ? 1.0 : 0.0;
    }
    return field;
}

// ---------------------------------------------------------------------------
// Maximal function
// ---------------------------------------------------------------------------

namespace {

// Tube average of f via the tube's own sample region.
double tube_average(const Setting& setting, const GridField& f, const Tube& tube,
                    long long mc_samples, std::uint64_t seed) {
    Rng rng(seed);
    const auto region = tube_sample_region(tube);
    double acc = 0;
    long long hits = 0;
    for (long long i = 0; i < mc_samples; ++i) {
        const Point p = region.draw(rng);
        if (tube_contains(tube, p)) {
            acc += f.at(p);
            ++hits;
        }
    }
    if (hits == 0) throw numeric_error("maximal_function: zero tube volume estimate");
    return acc / double(hits);
}

} // namespace

double maximal_function(const Setting& setting, const GridField& f, double delta,
                        const std::vector<double>& u, int param_samples, std::uint64_t seed,
                        long long mc_samples) {
    if (param_samples < 32) throw input_error("maximal_function: need >= 32 parameter samples");
    Rng rng(seed);
    double best = 0;
    std::vector<double> best_a;
    for (int k = 0; k < param_samples; ++k) {
        const auto a = setting.sample_param(rng);
        const auto tube = make_tube(setting, u, a, delta);
        const double avg = tube_average(setting, f, tube, mc_samples, derive_seed(seed, k));
        if (avg > best || best_a.empty()) {
            best = avg;
            best_a = a;
        }
    }
    // One local refinement pass: coordinate-wise +-delta jitter, 16 steps.
    for (int step = 0; step < 16; ++step) {
        auto a = best_a;
        for (auto& x : a) x += rng.uniform(-delta, delta);
        double avg = 0;
        try {
            const auto tube = make_tube(setting, u, a, delta);
            avg = tube_average(setting, f, tube, mc_samples, derive_seed(seed, 1000 + step));
        } catch (const std::exception&) {
            continue;
        }
        if (avg > best) {
            best = avg;
            best_a = a;
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// Weak type inequality
// ---------------------------------------------------------------------------

WeakTypeReport weak_type_check(const Setting& setting, const Indicator& E, const Box& e_bounds,
                               double delta, const std::vector<double>& lambda_grid,
                               std::uint64_t seed, int net_candidates, int param_samples,
                               long long mc_samples) {
    for (double l : lambda_grid)
        if (!(l > 0 && l <= 1)) throw input_error("weak_type_check: lambda values must be in (0,1]");

    WeakTypeReport report;
    report.mu_E = mc_volume(E, e_bounds, std::max<long long>(mc_samples * 10, 100000),
                            derive_seed(seed, 0))
                      .estimate;

    const auto candidates = setting.sample_directions(derive_seed(seed, 1), net_candidates);
    const auto net = greedy_net(candidates, delta,
                                [&](const std::vector<double>& a, const std::vector<double>& b) {
                                    return setting.dist_Z(a, b);
                                });
    report.net_size = net.points.size();

    const GridField field = GridField::from_indicator(E, e_bounds, [&] {
        std::vector<int> res(e_bounds.dim(), 0);
        for (int i = 0; i < e_bounds.dim(); ++i) {
            const double span = e_bounds.hi[i] - e_bounds.lo[i];
            res[i] = std::clamp(int(std::ceil(span / (delta / 2))), 8, 256);
        }
        return res;
    }());

    std::vector<double> maximal(net.points.size());
    for (size_t j = 0; j < net.points.size(); ++j)
        maximal[j] = maximal_function(setting, field, delta, net.points[j], param_samples,
                                      derive_seed(seed, 100 + j), mc_samples);

    const auto nominal = setting.nominal_exponents();
    for (double lambda : lambda_grid) {
        WeakTypeRow row;
        row.delta = delta;
        row.lambda = lambda;
        // nu measure realized by net-cell weights delta^S per net point.
        for (double v : maximal)
            if (v > lambda) row.lhs += std::pow(delta, nominal.S);
        row.rhs = std::pow(lambda, -(nominal.S + 2) / 2.0) *
                  std::pow(delta, nominal.S / 2.0 - nominal.T) * report.mu_E;
        row.C = (row.rhs > 0) ? row.lhs / row.rhs : 0.0;
        report.C_max = std::max(report.C_max, row.C);
        report.rows.push_back(row);
    }
    return report;
}

double lp_norm_net(const std::vector<double>& values, double p, double delta, double S) {
    if (!(p >= 1)) throw input_error("lp_norm_net: p must be >= 1");
    double acc = 0;
    for (double v : values) acc += std::pow(delta, S) * std::pow(v, p);
    return std::pow(acc, 1.0 / p);
}

// ---------------------------------------------------------------------------
// Bush extraction
// ---------------------------------------------------------------------------

BushCertificate extract_bush(const Setting& setting, const std::vector<Tube>& tubes,
                             const Indicator& E, double lambda, std::uint64_t seed,
                             long long mc_samples, int points_per_tube) {
    if (tubes.empty()) throw input_error("extract_bush: no tubes");
    const auto nominal = setting.nominal_exponents();
    const double delta = tubes[0].delta;

    BushCertificate cert;
    cert.lambda = lambda;

    // Density precondition mu(E cap T) > lambda mu(T); violators are dropped.
    std::vector<std::size_t> live;
    std::vector<double> volumes;
    double c1 = 1e100, c2 = 0;
    for (std::size_t j = 0; j < tubes.size(); ++j) {
        const auto region = tube_sample_region(tubes[j]);
        Rng rng(derive_seed(seed, j));
        long long in_tube = 0, in_e = 0;
        for (long long i = 0; i < mc_samples; ++i) {
            const Point p = region.draw(rng);
            if (!tube_contains(tubes[j], p)) continue;
            ++in_tube;
            if (E(p)) ++in_e;
        }
        const double vol = region.total_volume * double(in_tube) / double(mc_samples);
        if (in_tube == 0 || double(in_e) / double(in_tube) <= lambda) {
            ++cert.dropped;
            continue;
        }
        live.push_back(j);
        volumes.push_back(vol);
        const double scaled = vol / std::pow(delta, nominal.T);
        c1 = std::min(c1, scaled);
        c2 = std::max(c2, scaled);
    }
    if (live.empty()) throw input_error("extract_bush: no tube satisfies the density precondition");

    // Pooled hit cloud of E-points inside the tubes; multiplicity per point.
    struct CloudPoint {
        Point p;
        std::vector<std::size_t> owners;
    };
    std::vector<CloudPoint> cloud;
    for (std::size_t k = 0; k < live.size(); ++k) {
        const auto& tube = tubes[live[k]];
        Rng rng(derive_seed(seed, 5000 + live[k]));
        const auto region = tube_sample_region(tube);
        int kept = 0;
        for (int i = 0; i < points_per_tube * 20 && kept < points_per_tube; ++i) {
            Point p = region.draw(rng);
            if (tube_contains(tube, p) && E(p)) {
                cloud.push_back({std::move(p), {}});
                ++kept;
            }
        }
    }
    for (auto& cp : cloud)
        for (std::size_t k = 0; k < live.size(); ++k)
            if (tube_contains(tubes[live[k]], cp.p)) cp.owners.push_back(k);

    // Max multiplicity point; ties broken by lowest sample index.
    std::size_t best_idx = 0;
    for (std::size_t i = 1; i < cloud.size(); ++i)
        if (cloud[i].owners.size() > cloud[best_idx].owners.size()) best_idx = i;
    cert.x0 = cloud[best_idx].p;
    cert.multiplicity = int(cloud[best_idx].owners.size());
    const auto& through = cloud[best_idx].owners;

    // b estimate from intersecting pairs of the family.
    double b_hat = 0;
    {
        int pairs = 0;
        for (std::size_t i = 0; i < live.size() && pairs < 200; ++i)
            for (std::size_t j = i + 1; j < live.size() && pairs < 200; ++j) {
                const double dz = setting.dist_Z(tubes[live[i]].u, tubes[live[j]].u);
                if (!(dz > 0)) continue;
                const auto cloud_ij = intersection_cloud(tubes[live[i]], tubes[live[j]], 64);
                if (cloud_ij.empty()) continue;
                double diam = 0;
                for (size_t a = 0; a < cloud_ij.size(); ++a)
                    for (size_t b = a + 1; b < cloud_ij.size(); ++b)
                        diam = std::max(diam, dist_euclidean(cloud_ij[a], cloud_ij[b]));
                b_hat = std::max(b_hat, diam * dz / delta);
                ++pairs;
            }
        if (b_hat <= 0) b_hat = 2.0;
    }
    cert.c_constant = std::min(c1 / (4 * c2), b_hat);
    cert.separation_radius = std::max(delta, b_hat * delta / (cert.c_constant * lambda));

    // 5r-selection in direction space among the tubes through x0.
    BallFamily family;
    for (std::size_t k : through)
        family.balls.push_back({tubes[live[k]].u, cert.separation_radius});
    const auto sel = five_r_cover(family, [&](const std::vector<double>& a,
                                              const std::vector<double>& b) {
        return setting.dist_Z(a, b);
    });
    for (std::size_t s : sel) cert.selected.push_back(live[through[s]]);

    // Disjointness of the selected E-portions outside B_{d'}(x0, c lambda).
    const double core = cert.c_constant * lambda;
    for (const auto& cp : cloud) {
        if (setting.dist_dprime(cp.p, cert.x0) <= core) continue;
        int owners_selected = 0;
        for (std::size_t k : cp.owners)
            if (std::find(cert.selected.begin(), cert.selected.end(), live[k]) !=
                cert.selected.end())
                ++owners_selected;
        if (owners_selected > 1) cert.shared_hits += owners_selected - 1;
    }

    // mu(E) over the hull of the tube boxes.
    Box hull = tube_bounding_box(tubes[live[0]]);
    for (std::size_t k = 1; k < live.size(); ++k) {
        const Box b = tube_bounding_box(tubes[live[k]]);
        for (int i = 0; i < hull.dim(); ++i) {
            hull.lo[i] = std::min(hull.lo[i], b.lo[i]);
            hull.hi[i] = std::max(hull.hi[i], b.hi[i]);
        }
    }
    cert.mu_E = mc_volume(E, hull, std::max<long long>(mc_samples * 10, 200000),
                          derive_seed(seed, 999))
                    .estimate;

    cert.bound_bush =
        double(live.size()) / double(cert.multiplicity) * lambda * std::pow(delta, nominal.T);
    cert.bound_separated =
        double(cert.multiplicity) * std::pow(lambda, nominal.S + 1) * std::pow(delta, nominal.T);
    cert.constant_bush = cert.bound_bush / cert.mu_E;
    cert.constant_separated = cert.bound_separated / cert.mu_E;
    return cert;
}

// ---------------------------------------------------------------------------
// Hairbrush extraction
// ---------------------------------------------------------------------------

Hairbrush extract_hairbrush(const Setting& setting, const std::vector<Tube>& tubes,
                            std::uint64_t seed) {
    if (tubes.size() < 2) throw input_error("extract_hairbrush: need >= 2 tubes");
    (void)seed;
    const double delta = tubes[0].delta;

    // Pairwise intersection matrix.
    const std::size_t n = tubes.size();
    std::vector<std::vector<char>> meets(n, std::vector<char>(n, 0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            meets[i][j] = meets[j][i] = tubes_intersect(tubes[i], tubes[j]) ? 1 : 0;

    Hairbrush best;
    best.setting = &setting;
    best.delta = delta;
    std::size_t best_count = 0;
    bool found = false;
    for (std::size_t anchor = 0; anchor < n; ++anchor) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < n; ++i) {
            if (i == anchor || !meets[anchor][i]) continue;
            bool separated = true;
            for (std::size_t m : members)
                if (setting.dist_Z(tubes[i].u, tubes[m].u) <= delta) {
                    separated = false;
                    break;
                }
            if (separated) members.push_back(i);
        }
        if (!found || members.size() > best_count) {
            best_count = members.size();
            best.anchor = anchor;
            best.members = members;
            found = true;
        }
    }

    best.tubes = tubes;
    for (std::size_t m : best.members) {
        const double dz = setting.dist_Z(tubes[m].u, tubes[best.anchor].u);
        int k = 0;
        while (std::pow(2.0, -k - 1) >= dz && k < 60) ++k;
        best.k_label.push_back(k);
    }
    return best;
}

std::vector<std::array<int, 2>> Hairbrush::lm_labels(std::size_t j) const {
    std::vector<std::array<int, 2>> labels;
    const Tube& tj = tubes[members[j]];
    const auto lens_anchor = intersection_cloud(tj, tubes[anchor]);
    for (std::size_t idx = 0; idx < members.size(); ++idx) {
        if (idx == j) {
            labels.push_back({-1, -1});
            continue;
        }
        const Tube& ti = tubes[members[idx]];
        const double dz = setting->dist_Z(ti.u, tj.u);
        int l = 0;
        while (std::pow(2.0, -l - 1) >= dz && l < 60) ++l;
        const auto lens = intersection_cloud(ti, tj);
        if (lens.empty() || lens_anchor.empty()) {
            labels.push_back({-1, -1});
            continue;
        }
        double dist = 1e100;
        for (const auto& p : lens)
            for (const auto& q : lens_anchor) dist = std::min(dist, dist_euclidean(p, q));
        int m = 0;
        if (dist > delta * std::pow(2.0, l)) {
            m = 1;
            while (dist > delta * std::pow(2.0, m + l) && m < 60) ++m;
        }
        labels.push_back({l, m});
    }
    return labels;
}

// ---------------------------------------------------------------------------
// Box dimension
// ---------------------------------------------------------------------------

RegressionResult box_dimension(const Indicator& indicator, const Box& bounds, MetricKind metric,
                               const LayerSpec* layers, const std::vector<double>& deltas,
                               long long cell_cap) {
    if (deltas.size() < 3) throw input_error("box_dimension: need >= 3 deltas");
    const double octaves =
        std::log2(*std::max_element(deltas.begin(), deltas.end()) /
                  *std::min_element(deltas.begin(), deltas.end()));
    if (octaves < 2.0 - 1e-9) throw input_error("box_dimension: deltas must span >= 2 octaves");
    std::vector<double> inv_d, counts;
    for (double d : deltas) {
        const long long count = grid_cover_count(indicator, bounds, d, metric, layers, cell_cap);
        if (count <= 0) throw numeric_error("box_dimension: zero cover count");
        inv_d.push_back(1.0 / d);
        counts.push_back(double(count));
    }
    return fit_loglog(inv_d, counts);
}

// ---------------------------------------------------------------------------
// Perron construction
// ---------------------------------------------------------------------------

bool Triangle::contains(double x, double y) const {
    const auto side = [](const std::array<double, 2>& a, const std::array<double, 2>& b,
                         double px, double py) {
        return (b[0] - a[0]) * (py - a[1]) - (b[1] - a[1]) * (px - a[0]);
    };
    const double d1 = side(v[0], v[1], x, y);
    const double d2 = side(v[1], v[2], x, y);
    const double d3 = side(v[2], v[0], x, y);
    const bool has_neg = (d1 < 0) || (d2 < 0) || (d3 < 0);
    const bool has_pos = (d1 > 0) || (d2 > 0) || (d3 > 0);
    return !(has_neg && has_pos);
}

namespace {

// Recursive bisection: solve each half over half-width bases, then slide the
// right group left so the two groups overlap. The slide fraction grows with
// the level (classical sprouting schedule), shrinking the union while every
// elementary triangle keeps its direction sector.
void perron_recurse(double base_lo, double base_hi, const std::array<double, 2>& apex,
                    int depth, int level, std::vector<Triangle>& out,
                    std::vector<double>& offsets) {
    if (depth == 0) {
        Triangle t;
        t.v = {{{base_lo, 0.0}, {base_hi, 0.0}, {apex[0], apex[1]}}};
        out.push_back(t);
        offsets.push_back(0.0);
        return;
    }
    const double mid = 0.5 * (base_lo + base_hi);
    std::vector<Triangle> left, right;
    std::vector<double> off_left, off_right;
    perron_recurse(base_lo, mid, apex, depth - 1, level + 1, left, off_left);
    perron_recurse(mid, base_hi, apex, depth - 1, level + 1, right, off_right);
    const double slide = (mid - base_lo) * (double(level + 1) / double(level + 2));
    for (std::size_t i = 0; i < right.size(); ++i) {
        for (auto& vert : right[i].v) vert[0] -= slide;
        off_right[i] -= slide;
    }
    out.insert(out.end(), left.begin(), left.end());
    out.insert(out.end(), right.begin(), right.end());
    offsets.insert(offsets.end(), off_left.begin(), off_left.end());
    offsets.insert(offsets.end(), off_right.begin(), off_right.end());
}

} // namespace

std::vector<Triangle> perron_construction(int depth) {
    if (depth < 1 || depth > 12) throw input_error("perron_construction: depth must be in [1, 12]");
    std::vector<Triangle> out;
    std::vector<double> offsets;
    perron_recurse(0.0, 1.0, {0.5, 1.0}, depth, 0, out, offsets);
    return out;
}

double triangle_union_area(const std::vector<Triangle>& triangles, int grid) {
    // Column slicing: each triangle cuts a y-interval on a vertical line;
    // exact interval union per column, midpoint rule in x.
    double lo = 1e100, hi = -1e100;
    for (const auto& t : triangles)
        for (const auto& v : t.v) {
            lo = std::min(lo, v[0]);
            hi = std::max(hi, v[0]);
        }
    if (!(hi > lo)) return 0.0;
    const double dx = (hi - lo) / grid;
    double area = 0;
    std::vector<std::pair<double, double>> intervals;
    for (int c = 0; c < grid; ++c) {
        const double x = lo + (c + 0.5) * dx;
        intervals.clear();
        for (const auto& t : triangles) {
            double ymin = 1e100, ymax = -1e100;
            for (int e = 0; e < 3; ++e) {
                const auto& a = t.v[e];
                const auto& b = t.v[(e + 1) % 3];
                if ((a[0] - x) * (b[0] - x) > 0) continue;
                if (std::fabs(b[0] - a[0]) < 1e-15) {
                    ymin = std::min({ymin, a[1], b[1]});
                    ymax = std::max({ymax, a[1], b[1]});
                } else {
                    const double s = (x - a[0]) / (b[0] - a[0]);
                    if (s < -1e-12 || s > 1 + 1e-12) continue;
                    const double y = a[1] + s * (b[1] - a[1]);
                    ymin = std::min(ymin, y);
                    ymax = std::max(ymax, y);
                }
            }
            if (ymax >= ymin) intervals.emplace_back(ymin, ymax);
        }
        if (intervals.empty()) continue;
        std::sort(intervals.begin(), intervals.end());
        double len = 0, cur_lo = intervals[0].first, cur_hi = intervals[0].second;
        for (size_t i = 1; i < intervals.size(); ++i) {
            if (intervals[i].first > cur_hi) {
                len += cur_hi - cur_lo;
                cur_lo = intervals[i].first;
                cur_hi = intervals[i].second;
            } else {
                cur_hi = std::max(cur_hi, intervals[i].second);
            }
        }
        len += cur_hi - cur_lo;
        area += len * dx;
    }
    return area;
}

double perron_direction_coverage(const std::vector<Triangle>& triangles, int directions,
                                 int samples_per_segment) {
    int covered = 0;
    for (int d = 0; d < directions; ++d) {
        // Directions spanning the base sector of the unit construction:
        // apex (0.5, 1) over base [0, 1] gives angles in [45, 135] degrees.
        const double frac = (d + 0.5) / directions;
        bool ok = false;
        for (const auto& t : triangles) {
            const auto& apex = t.v[2];
            // Segment from the apex to the base point at fraction `frac` of
            // this triangle's own base piece; translations preserve sectors.
            const double bx = t.v[0][0] + frac * (t.v[1][0] - t.v[0][0]);
            bool inside = true;
            for (int sidx = 0; sidx <= samples_per_segment; ++sidx) {
                const double s = double(sidx) / samples_per_segment;
                const double px = apex[0] + s * (bx - apex[0]);
                const double py = apex[1] + s * (0.0 - apex[1]);
                if (!t.contains(px, py)) {
                    inside = false;
                    break;
                }
            }
            if (inside) {
                ok = true;
                break;
            }
        }
        if (ok) ++covered;
    }
    return double(covered) / directions;
}

// ---------------------------------------------------------------------------
// LT-Kakeya product sets
// ---------------------------------------------------------------------------

Indicator product_lt_kakeya(const Indicator& planar, const GroupSpec& spec, double window) {
    const int m1 = spec.m1;
    const int n = spec.n();
    return [planar, m1, n, window](const Point& p) {
        Point first(p.begin(), p.begin() + m1);
        if (!planar(first)) return false;
        for (int i = m1; i < n; ++i)
            if (std::fabs(p[i]) > window) return false;
        return true;
    };
}

double product_segment_coverage(const Indicator& set_indicator, const Setting& lt_setting,
                                const std::vector<Triangle>& planar_triangles, int directions,
                                double delta_grid) {
    // For each direction in the covered sector, take the constructive
    // base-to-apex segment of its triangle and check the left-translated
    // segment of the product set along it.
    int covered = 0;
    const double r = 0.5 * lt_setting.direction_radius();
    for (int d = 0; d < directions; ++d) {
        const double frac = (d + 0.5) / directions;
        bool ok = false;
        for (const auto& tri : planar_triangles) {
            const auto& apex = tri.v[2];
            const double bx = tri.v[0][0] + frac * (tri.v[1][0] - tri.v[0][0]);
            // Planar segment apex -> base point; direction e.
            double ex = bx - apex[0], ey = 0.0 - apex[1];
            const double len = std::hypot(ex, ey);
            ex /= len;
            ey /= len;
            // u1 = r e; start the LT segment at [apex, 0].
            std::vector<double> u(lt_setting.direction_dim(), 0.0);
            u[0] = r * ex;
            u[1] = r * ey;
            std::vector<double> a(lt_setting.ambient_dim(), 0.0);
            a[0] = apex[0];
            a[1] = apex[1];
            const auto [t0, t1] = lt_setting.t_range(u, false);
            bool inside = true;
            const int steps = std::max(8, int(std::ceil((t1 - t0) / delta_grid)));
            for (int sdx = 0; sdx <= steps; ++sdx) {
                const double t = t0 + (t1 - t0) * sdx / steps;
                const Point p = lt_setting.segment_point(u, a, t);
                if (!set_indicator(p)) {
                    inside = false;
                    break;
                }
            }
            if (inside) {
                ok = true;
                break;
            }
        }
        if (ok) ++covered;
    }
    return double(covered) / directions;
}

} // namespace kakeya

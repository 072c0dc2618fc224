#include "kakeya/axiomlab.hpp"

#include <algorithm>
#include <cmath>

namespace kakeya {

namespace {

double min_cloud_distance(const std::vector<Point>& a, const std::vector<Point>& b) {
    double best = 1e100;
    for (const auto& p : a)
        for (const auto& q : b) best = std::min(best, dist_euclidean(p, q));
    return best;
}

double max_cloud_diameter(const std::vector<Point>& pts) {
    double best = 0;
    for (size_t i = 0; i < pts.size(); ++i)
        for (size_t j = i + 1; j < pts.size(); ++j)
            best = std::max(best, dist_euclidean(pts[i], pts[j]));
    return best;
}

} // namespace

Box metric_ball_box(const Setting& setting, const Point& center, double radius) {
    const int n = setting.ambient_dim();
    Box box;
    box.lo.resize(n);
    box.hi.resize(n);
    switch (setting.kind()) {
        case SettingKind::HomogeneousKakeya: {
            for (int i = 0; i < n; ++i) {
                const double rj = std::pow(radius, setting.layers().expo[i]);
                box.lo[i] = center[i] - rj;
                box.hi[i] = center[i] + rj;
            }
            return box;
        }
        case SettingKind::CarnotLT:
        case SettingKind::CarnotKakeya: {
            const GroupSpec& g = setting.group();
            double sum_b2 = 0;
            for (int j = g.m1 + 1; j <= g.n(); ++j)
                for (int l = 1; l <= g.m1; ++l)
                    for (int i = l + 1; i <= g.m1; ++i) sum_b2 += g.coeff(j, l, i) * g.coeff(j, l, i);
            const double cmat = std::sqrt(2.0 * sum_b2);
            double c1 = 0;
            for (int i = 0; i < g.m1; ++i) c1 += center[i] * center[i];
            const double pad2 =
                std::pow(radius / g.epsilon, 2.0) + cmat * (std::sqrt(c1) + radius) * radius;
            for (int i = 0; i < g.m1; ++i) {
                box.lo[i] = center[i] - radius;
                box.hi[i] = center[i] + radius;
            }
            for (int i = g.m1; i < n; ++i) {
                box.lo[i] = center[i] - pad2;
                box.hi[i] = center[i] + pad2;
            }
            return box;
        }
        default: {
            for (int i = 0; i < n; ++i) {
                box.lo[i] = center[i] - radius;
                box.hi[i] = center[i] + radius;
            }
            return box;
        }
    }
}

std::vector<double> jitter_direction(const Setting& setting, const std::vector<double>& u,
                                     double step, Rng& rng) {
    switch (setting.kind()) {
        case SettingKind::EuclideanKakeya:
        case SettingKind::FurstenbergK: {
            for (int attempt = 0; attempt < 64; ++attempt) {
                auto w = rng.unit_vector(setting.ambient_dim());
                std::vector<double> v(u.size());
                for (size_t i = 0; i < u.size(); ++i) v[i] = u[i] + 0.9 * step * w[i];
                const double norm = norm_euclidean(v);
                for (auto& x : v) x /= norm;
                if (setting.dist_Z(u, v) <= step && setting.dist_Z(u, v) > 0) return v;
            }
            return u;
        }
        case SettingKind::RestrictedKakeya: {
            // Direction space is the Cantor arc; move to a nearby midpoint.
            const auto dirs = setting.sample_directions(rng.next_u64(), 64);
            for (const auto& v : dirs)
                if (setting.dist_Z(u, v) <= step && setting.dist_Z(u, v) > 0) return v;
            return u;
        }
        case SettingKind::NikodymHyperplane:
        case SettingKind::CarnotLT:
        case SettingKind::CarnotKakeya: {
            for (int attempt = 0; attempt < 64; ++attempt) {
                auto w = rng.unit_vector(int(u.size()));
                std::vector<double> v(u.size());
                for (size_t i = 0; i < u.size(); ++i) v[i] = u[i] + 0.9 * step * w[i];
                if (norm_euclidean(v) > setting.direction_radius())
                    for (size_t i = 0; i < u.size(); ++i) v[i] = u[i] - 0.9 * step * w[i];
                if (norm_euclidean(v) <= setting.direction_radius() &&
                    setting.dist_Z(u, v) <= step)
                    return v;
            }
            return u;
        }
        case SettingKind::HomogeneousKakeya: {
            for (int attempt = 0; attempt < 64; ++attempt) {
                std::vector<double> v(u);
                for (size_t i = 0; i < u.size(); ++i) {
                    const int e = setting.layers().expo[i];
                    const double amp = std::pow(0.9 * step, e);
                    v[i] += rng.uniform(-amp, amp);
                }
                if (norm_euclidean(v) > setting.direction_radius()) continue;
                if (setting.dist_Z(u, v) <= step) return v;
            }
            return u;
        }
    }
    return u;
}

double axiom2_ball_factor(const Setting& setting) {
    switch (setting.kind()) {
        case SettingKind::FurstenbergK:
            return 1.0; // Ahlfors-regular fiber measure, K = 1
        case SettingKind::HomogeneousKakeya:
            return 2.0;
        case SettingKind::CarnotLT:
        case SettingKind::CarnotKakeya:
            if (setting.group().m2 == 1) return setting.widening();
            return 2.0;
        default:
            return 1.0;
    }
}

// ---------------------------------------------------------------------------
// Axiom 1
// ---------------------------------------------------------------------------

RegressionResult estimate_volume_exponent(const Setting& setting,
                                          const std::vector<double>& deltas, int trials,
                                          std::uint64_t seed, long long mc_samples) {
    if (deltas.size() < 3) throw input_error("estimate_volume_exponent: need >= 3 deltas");
    const double octaves =
        std::log2(*std::max_element(deltas.begin(), deltas.end()) /
                  *std::min_element(deltas.begin(), deltas.end()));
    if (octaves < 2.0 - 1e-9)
        throw input_error("estimate_volume_exponent: deltas must span >= 2 octaves");
    if (trials < 10) throw input_error("estimate_volume_exponent: need >= 10 trials");

    std::vector<double> means;
    for (size_t di = 0; di < deltas.size(); ++di) {
        Rng rng(derive_seed(seed, di));
        double acc = 0;
        for (int t = 0; t < trials; ++t) {
            const auto u = setting.sample_direction(rng);
            const auto a = setting.sample_param(rng);
            const auto tube = make_tube(setting, u, a, deltas[di]);
            acc += tube_volume(tube, mc_samples, derive_seed(seed, di * 1000 + t)).estimate;
        }
        const double mean = acc / trials;
        if (!(mean > 0)) throw numeric_error("estimate_volume_exponent: zero volume estimate");
        means.push_back(mean);
    }
    return fit_loglog(deltas, means);
}

AxiomReport check_axiom1(const Setting& setting, const std::vector<double>& deltas, int trials,
                         std::uint64_t seed, double tolerance, long long mc_samples) {
    AxiomReport report;
    report.axiom = 1;
    report.setting_summary = setting.summary();
    report.nominal = setting.nominal_exponents();

    const auto fit = estimate_volume_exponent(setting, deltas, trials, seed, mc_samples);
    report.estimates["T_hat"] = fit.exponent;
    report.estimates["r_squared"] = fit.r_squared;
    report.diagnostics["intercept"] = fit.intercept;
    for (size_t i = 0; i < fit.points.size(); ++i)
        report.rows.push_back({std::exp(fit.points[i][0]), 0, 0, (long long)i,
                               std::exp(fit.points[i][1])});

    // Second clause: mu(A) <= c2 * diam_{d'}(A)^e * delta^T for sub-caps A of
    // tubes; e = s for the Furstenberg fiber, 1 otherwise.
    const double clause_expo =
        setting.kind() == SettingKind::FurstenbergK ? setting.cantor().dimension() : 1.0;
    Rng rng(derive_seed(seed, 0xA1));
    double c2_vol = 0, cap_ratio = 0;
    for (size_t di = 0; di < deltas.size(); ++di) {
        const double delta = deltas[di];
        for (int t = 0; t < 4; ++t) {
            const auto u = setting.sample_direction(rng);
            const auto a = setting.sample_param(rng);
            const auto tube = make_tube(setting, u, a, delta);
            const double vol = tube_volume(tube, mc_samples, rng.next_u64()).estimate;
            c2_vol = std::max(c2_vol, vol / std::pow(delta, fit.exponent));
            // Random sub-cap: tube cut by a d'-ball around a segment point.
            const auto [t0, t1] = setting.t_range(u, false);
            const Point x = setting.segment_point(u, a, rng.uniform(t0, t1));
            const double rho = rng.uniform(4 * delta, 0.25);
            const auto region = tube_sample_region(tube);
            const auto ind = [&](const Point& p) {
                return tube_contains(tube, p) && dist_euclidean(p, x) <= rho;
            };
            const auto cap = mc_volume_region(ind, region, mc_samples, rng.next_u64());
            if (cap.estimate > 0) {
                const double ratio =
                    cap.estimate / (std::pow(2 * rho, clause_expo) * std::pow(delta, fit.exponent));
                cap_ratio = std::max(cap_ratio, ratio);
            }
        }
    }
    report.diagnostics["c2_hat"] = c2_vol;
    report.diagnostics["subcap_c2_hat"] = cap_ratio;
    const bool subcap_ok = cap_ratio <= 8.0 * c2_vol + 1e-12;

    report.checked = "|T_hat - T| <= tolerance and sub-cap clause";
    report.pass = std::fabs(fit.exponent - report.nominal.T) <= tolerance && subcap_ok;
    return report;
}

// ---------------------------------------------------------------------------
// Axiom 2
// ---------------------------------------------------------------------------

namespace {

double axiom2_min_ratio(const Setting& setting, double delta, int trials, Rng& rng,
                        long long mc_samples, int* discarded) {
    const double K = axiom2_ball_factor(setting);
    double min_ratio = 1e100;
    int kept = 0;
    for (int t = 0; t < trials; ++t) {
        const auto u = setting.sample_direction(rng);
        const auto a = setting.sample_param(rng);
        const auto [t0, t1] = setting.t_range(u, false);
        const Point x = setting.segment_point(u, a, rng.uniform(t0, t1));
        const double r = rng.uniform(delta, 2 * delta);
        const double M = setting.segment_measure_in_ball(u, a, x, r);
        if (!(M > 0)) {
            ++*discarded;
            continue;
        }
        const auto tube = make_tube(setting, u, a, delta);
        const auto region = tube_sample_region(tube);
        const std::uint64_t s1 = rng.next_u64();
        const auto vol = mc_volume_region(
            [&](const Point& p) { return tube_contains(tube, p); }, region, mc_samples, s1);
        // Numerator sampled from the tube itself so thin tubes stay cheap.
        const auto num = mc_volume_region(
            [&](const Point& p) {
                return tube_contains(tube, p) && setting.dist_d(x, p) <= K * r;
            },
            region, mc_samples, s1);
        if (!(vol.estimate > 0)) {
            ++*discarded;
            continue;
        }
        const double ratio = num.estimate / (M * vol.estimate);
        min_ratio = std::min(min_ratio, ratio);
        ++kept;
    }
    if (kept == 0) throw sampling_error("check_axiom2: all draws discarded (M = 0)");
    return min_ratio;
}

} // namespace

AxiomReport check_axiom2(const Setting& setting, double delta, int trials, std::uint64_t seed,
                         double tolerance, long long mc_samples) {
    if (!(delta > 0 && delta <= setting.delta_max()))
        throw input_error("check_axiom2: delta outside the admissible range");
    AxiomReport report;
    report.axiom = 2;
    report.setting_summary = setting.summary();
    report.nominal = setting.nominal_exponents();

    int discarded = 0;
    Rng rng1(derive_seed(seed, 1));
    Rng rng2(derive_seed(seed, 2));
    const double r1 = axiom2_min_ratio(setting, delta, trials, rng1, mc_samples, &discarded);
    const double r2 = axiom2_min_ratio(setting, delta / 2, trials, rng2, mc_samples, &discarded);

    const double theta_hat = std::log(r1 / r2) / std::log(delta / (delta / 2));
    report.estimates["theta_hat"] = theta_hat;
    report.estimates["min_ratio"] = std::min(r1, r2);
    report.diagnostics["min_ratio_delta"] = r1;
    report.diagnostics["min_ratio_half"] = r2;
    report.diagnostics["K"] = axiom2_ball_factor(setting);
    report.diagnostics["K_prime_hat"] = r1 / std::pow(delta, theta_hat);
    report.diagnostics["discarded"] = discarded;
    report.rows.push_back({delta, 0, 0, 0, r1});
    report.rows.push_back({delta / 2, 0, 0, 1, r2});

    report.checked = "|theta_hat - theta| <= tolerance";
    report.pass = std::fabs(theta_hat - report.nominal.theta) <= tolerance;
    return report;
}

// ---------------------------------------------------------------------------
// Axiom 3
// ---------------------------------------------------------------------------

AxiomReport check_axiom3(const Setting& setting, double delta, int pairs, std::uint64_t seed,
                         long long samples_per_pair) {
    if (pairs < 50) throw input_error("check_axiom3: need >= 50 pairs");
    if (!(delta > 0 && delta <= setting.delta_max()))
        throw input_error("check_axiom3: delta outside the admissible range");
    AxiomReport report;
    report.axiom = 3;
    report.setting_summary = setting.summary();
    report.nominal = setting.nominal_exponents();

    Rng rng(derive_seed(seed, 3));
    double b_hat = 0;
    int skipped = 0, made = 0;
    for (int pair = 0; pair < pairs; ++pair) {
        const auto u = setting.sample_direction(rng);
        const auto v = setting.sample_direction(rng);
        const double dz = setting.dist_Z(u, v);
        if (!(dz > 0)) {
            ++skipped;
            continue;
        }
        const auto a = setting.sample_param(rng);
        const auto tube_u = make_tube(setting, u, a, delta, true);
        // Second tube forced through a random point of the first segment.
        const auto [t0, t1] = setting.t_range(u, false);
        const Point z = setting.segment_point(u, a, rng.uniform(t0, t1));
        const auto [s0, s1] = setting.t_range(v, false);
        const auto a2 = setting.param_through(v, z, rng.uniform(s0 + 0.2 * (s1 - s0),
                                                                s1 - 0.2 * (s1 - s0)));
        if (!a2) {
            ++skipped;
            continue;
        }
        const auto tube_v = make_tube(setting, v, *a2, delta, true);

        // Hit points of the intersection from the first tube's sample region.
        const auto region = tube_sample_region(tube_u);
        Rng draw(rng.next_u64());
        std::vector<Point> hits;
        for (long long i = 0; i < samples_per_pair && int(hits.size()) < 400; ++i) {
            Point p = region.draw(draw);
            if (tube_contains(tube_u, p) && tube_contains(tube_v, p)) hits.push_back(std::move(p));
        }
        const double diam = max_cloud_diameter(hits);
        report.rows.push_back({delta, 0, 0, pair, diam});
        b_hat = std::max(b_hat, diam * dz / delta);
        ++made;
    }
    if (made == 0) throw sampling_error("check_axiom3: no valid pairs");
    report.estimates["b_hat"] = b_hat;
    report.diagnostics["skipped"] = skipped;
    report.checked = "finite diameter constant b_hat recorded";
    report.pass = b_hat > 0 && std::isfinite(b_hat);
    return report;
}

// ---------------------------------------------------------------------------
// Axiom 4
// ---------------------------------------------------------------------------

namespace {

struct CoverOutcome {
    int count = 0;
    double residual = 0; // fraction of sample points left uncovered at the cap
};

CoverOutcome greedy_cover(const Setting& setting, const std::vector<double>& u,
                          const std::vector<double>& v, const std::vector<double>& a,
                          double delta, int cover_cap, int candidates, int points, Rng& rng) {
    const auto tube = make_tube(setting, u, a, delta);
    const auto [t0, t1] = setting.t_range(u, false);

    std::vector<Point> sample;
    for (int k = 0; k < points; ++k)
        sample.push_back(setting.segment_point(u, a, t0 + (t1 - t0) * k / (points - 1.0)));
    for (int k = 0; k < points / 2; ++k) sample.push_back(sample_point_in_tube(tube, rng));

    // Candidate covering tubes: the widened tube in direction v translated
    // along the covered segment. 2W+1 coarse offsets plus a fine grid.
    const auto [w0, w1] = setting.t_range(v, true);
    std::vector<double> t_candidates;
    const int coarse = 2 * int(std::ceil(setting.widening())) + 1;
    for (int k = 0; k < coarse; ++k)
        t_candidates.push_back(t0 + (t1 - t0) * k / (coarse - 1.0));
    for (int k = 0; k < candidates; ++k)
        t_candidates.push_back(t0 - 0.1 * (t1 - t0) +
                               1.2 * (t1 - t0) * k / (candidates - 1.0));

    std::vector<Tube> cover;
    for (double tc : t_candidates) {
        const Point anchor = setting.segment_point(u, a, std::clamp(tc, t0, t1));
        const double at = std::clamp(tc, w0 + 0.05 * (w1 - w0), w1 - 0.05 * (w1 - w0));
        const auto b = setting.param_through(v, anchor, at);
        if (b) cover.push_back(make_tube(setting, v, *b, delta, true));
    }
    if (cover.empty()) return {cover_cap, 1.0};

    // Membership matrix, then greedy set cover.
    std::vector<std::vector<char>> member(cover.size(), std::vector<char>(sample.size(), 0));
    for (size_t c = 0; c < cover.size(); ++c)
        for (size_t p = 0; p < sample.size(); ++p)
            member[c][p] = tube_contains(cover[c], sample[p]) ? 1 : 0;

    std::vector<char> covered(sample.size(), 0);
    size_t remaining = sample.size();
    CoverOutcome outcome;
    while (remaining > 0 && outcome.count < cover_cap) {
        size_t best = 0, best_gain = 0;
        for (size_t c = 0; c < cover.size(); ++c) {
            size_t gain = 0;
            for (size_t p = 0; p < sample.size(); ++p)
                if (!covered[p] && member[c][p]) ++gain;
            if (gain > best_gain) {
                best_gain = gain;
                best = c;
            }
        }
        if (best_gain == 0) break;
        for (size_t p = 0; p < sample.size(); ++p)
            if (member[best][p]) covered[p] = 1;
        remaining -= best_gain;
        ++outcome.count;
    }
    outcome.residual = double(remaining) / double(sample.size());
    if (remaining > 0) outcome.count = std::max(outcome.count, cover_cap);
    return outcome;
}

} // namespace

AxiomReport check_axiom4(const Setting& setting, double delta, int trials, std::uint64_t seed,
                         double n_bar, int cover_cap, int candidates, int points) {
    if (trials < 1) throw input_error("check_axiom4: need >= 1 trial");
    if (!(delta > 0 && delta <= setting.delta_max()))
        throw input_error("check_axiom4: delta outside the admissible range");
    AxiomReport report;
    report.axiom = 4;
    report.setting_summary = setting.summary();
    report.nominal = setting.nominal_exponents();

    Rng rng(derive_seed(seed, 4));
    int max_count = 0;
    double max_residual = 0;
    for (int t = 0; t < trials; ++t) {
        const auto u = setting.sample_direction(rng);
        const auto v = jitter_direction(setting, u, delta, rng);
        const auto a = setting.sample_param(rng);
        const auto outcome =
            greedy_cover(setting, u, v, a, delta, cover_cap, candidates, points, rng);
        report.rows.push_back({delta, 0, 0, t, double(outcome.count)});
        max_count = std::max(max_count, outcome.count);
        max_residual = std::max(max_residual, outcome.residual);
    }
    report.estimates["N_hat"] = max_count;
    report.diagnostics["residual"] = max_residual;
    report.diagnostics["N_bar"] = n_bar;

    const bool carnot = setting.kind() == SettingKind::CarnotLT ||
                        setting.kind() == SettingKind::CarnotKakeya;
    if (carnot && setting.group().m2 > 1) {
        report.has_nominal_target = false;
        report.checked = "cover count >= 0.5 * delta^{-1/2} (axiom-4 failure regime)";
        report.pass = max_count >= 0.5 / std::sqrt(delta);
    } else {
        report.checked = "cover count <= N_bar";
        report.pass = max_count <= n_bar && max_residual == 0;
    }
    return report;
}

// ---------------------------------------------------------------------------
// Axiom 5
// ---------------------------------------------------------------------------

namespace {

// Direction at prescribed d_Z distance from u along a fixed coordinate move.
std::vector<double> displaced_direction(const Setting& setting, const std::vector<double>& u,
                                        double dz) {
    switch (setting.kind()) {
        case SettingKind::EuclideanKakeya:
        case SettingKind::FurstenbergK:
        case SettingKind::RestrictedKakeya: {
            // Bisection on the tangent step so the chord equals dz.
            std::vector<double> t(u.size(), 0.0);
            t[0] = (std::fabs(u[0]) < 0.9) ? 1.0 : 0.0;
            if (t[0] == 0.0) t[1] = 1.0;
            // Make tangent orthogonal to u.
            double dot = 0;
            for (size_t i = 0; i < u.size(); ++i) dot += t[i] * u[i];
            for (size_t i = 0; i < u.size(); ++i) t[i] -= dot * u[i];
            const double tn = norm_euclidean(t);
            for (auto& x : t) x /= tn;
            double lo = 0, hi = 2.0;
            for (int it = 0; it < 80; ++it) {
                const double mid = 0.5 * (lo + hi);
                std::vector<double> v(u.size());
                for (size_t i = 0; i < u.size(); ++i) v[i] = u[i] + mid * t[i];
                const double nn = norm_euclidean(v);
                for (auto& x : v) x /= nn;
                if (dist_euclidean(v, u) < dz) lo = mid;
                else hi = mid;
            }
            std::vector<double> v(u.size());
            for (size_t i = 0; i < u.size(); ++i) v[i] = u[i] + 0.5 * (lo + hi) * t[i];
            const double nn = norm_euclidean(v);
            for (auto& x : v) x /= nn;
            return v;
        }
        case SettingKind::HomogeneousKakeya: {
            // Move the last direction coordinate: its d_Z exponent is the top
            // layer's, matching the adversarial family of the homogeneous case.
            std::vector<double> v(u);
            const int i = int(u.size()) - 1;
            const int e = setting.layers().expo[i];
            v[i] += std::pow(dz, e);
            return v;
        }
        default: {
            std::vector<double> v(u);
            v[0] += dz;
            return v;
        }
    }
}

std::vector<double> canonical_direction(const Setting& setting) {
    switch (setting.kind()) {
        case SettingKind::EuclideanKakeya:
        case SettingKind::FurstenbergK: {
            std::vector<double> u(setting.ambient_dim(), 0.0);
            u.back() = 1.0;
            return u;
        }
        case SettingKind::RestrictedKakeya: {
            Rng rng(1);
            return setting.sample_direction(rng);
        }
        default:
            return std::vector<double>(setting.direction_dim(), 0.0);
    }
}

struct Axiom5Member {
    double dz_to_uj = 0;
    double separation = 0; // d'(T_i cap T_j, T_j cap T)
    double weight = 1;     // > 1 when the family was stride-sampled
};

struct Axiom5Detail {
    std::vector<Axiom5Member> members;
    std::size_t family_size = 0;
    std::size_t through_z = 0;

    double count(double beta, double gamma) const {
        double c = 0;
        for (const auto& m : members)
            if (m.dz_to_uj <= beta && m.separation >= gamma) c += m.weight;
        return c;
    }
};

bool euclid_segment_kind(const Setting& s) {
    switch (s.kind()) {
        case SettingKind::EuclideanKakeya:
        case SettingKind::RestrictedKakeya:
        case SettingKind::NikodymHyperplane:
            return true;
        default:
            return false;
    }
}

struct SegSpine {
    Point a, b;
    std::vector<double> dir; // unit
    double len = 0;
    double rad = 0;
};

SegSpine spine_of(const Tube& tube) {
    const auto [t0, t1] = tube.setting->t_range(tube.u, tube.widened);
    SegSpine s;
    s.a = tube.setting->segment_point(tube.u, tube.a, t0);
    s.b = tube.setting->segment_point(tube.u, tube.a, t1);
    s.len = dist_euclidean(s.a, s.b);
    s.dir.resize(s.a.size());
    for (size_t i = 0; i < s.a.size(); ++i) s.dir[i] = (s.b[i] - s.a[i]) / s.len;
    s.rad = tube_radius(tube);
    return s;
}

// Crossing point of two segment spines plus a radius bounding the lens of the
// two tubes around it.
struct LensBall {
    Point center;
    double radius = 0;
    bool valid = false;
};

LensBall lens_ball(const SegSpine& A, const SegSpine& B) {
    LensBall ball;
    const double d = dist_segment_segment(A.a, A.b, B.a, B.b);
    if (d > A.rad + B.rad) return ball;
    // Closest-approach parameters recovered by projecting the midpoint trick:
    // reuse the quadratic solution inside dist_segment_segment via a local
    // recomputation.
    const size_t n = A.a.size();
    double aa = 0, bb = 0, cc = 0, dd = 0, ee = 0;
    std::vector<double> u(n), v(n), w(n);
    for (size_t i = 0; i < n; ++i) {
        u[i] = A.b[i] - A.a[i];
        v[i] = B.b[i] - B.a[i];
        w[i] = A.a[i] - B.a[i];
        aa += u[i] * u[i];
        bb += u[i] * v[i];
        cc += v[i] * v[i];
        dd += u[i] * w[i];
        ee += v[i] * w[i];
    }
    const double denom = aa * cc - bb * bb;
    double s = 0;
    if (denom > 1e-16 * aa * cc + 1e-300) s = std::clamp((bb * ee - cc * dd) / denom, 0.0, 1.0);
    double t = (cc > 0) ? std::clamp((bb * s + ee) / cc, 0.0, 1.0) : 0.0;
    s = (aa > 0) ? std::clamp((bb * t - dd) / aa, 0.0, 1.0) : 0.0;
    ball.center.resize(n);
    for (size_t i = 0; i < n; ++i)
        ball.center[i] = 0.5 * (A.a[i] + s * u[i] + B.a[i] + t * v[i]);
    double dot = 0;
    for (size_t i = 0; i < n; ++i) dot += (u[i] / std::sqrt(aa)) * (v[i] / std::sqrt(cc));
    const double sin_angle = std::sqrt(std::max(1e-12, 1.0 - dot * dot));
    ball.radius = std::min(std::max(A.len, B.len), (A.rad + B.rad) / sin_angle);
    ball.valid = true;
    return ball;
}

Axiom5Detail axiom5_detail(const Setting& setting, double delta, double beta_max, double gamma,
                           std::size_t max_family) {
    Axiom5Detail detail;
    const auto u = canonical_direction(setting);
    const auto [n0, n1] = setting.t_range(u, false);
    const double W = setting.widening();

    // Anchor tube through the origin.
    const Point origin(setting.ambient_dim(), 0.0);
    const auto aT = setting.param_through(u, origin, n0 + 0.5 * (n1 - n0));
    if (!aT) throw sampling_error("axiom5: cannot anchor the reference tube");
    const auto T = make_tube(setting, u, *aT, delta, true);

    // Designated member u_j through the origin. The homogeneous adversarial
    // family follows the paper's construction at distance beta/8 in the top
    // layer; the Euclidean-type settings put u_j mid-cap so the anchor lens
    // stays small against gamma.
    const double uj_dist =
        setting.kind() == SettingKind::HomogeneousKakeya ? beta_max / 8.0 : beta_max / 2.0;
    const auto uj = displaced_direction(setting, u, uj_dist);
    const auto [j0, j1] = setting.t_range(uj, false);
    const double t_orig = j0 + 0.25 * (j1 - j0);
    const auto aj = setting.param_through(uj, origin, t_orig);
    if (!aj) throw sampling_error("axiom5: cannot place the designated member");
    const auto Tj = make_tube(setting, uj, *aj, delta, true);

    const bool analytic = euclid_segment_kind(setting);
    const SegSpine spine_T = spine_of(T);
    const SegSpine spine_j = spine_of(Tj);

    // The T_j cap T lens: analytic ball for Euclidean settings, point cloud
    // otherwise. far_T measures how far it reaches from the origin.
    LensBall ballT;
    std::vector<Point> lensT;
    double far_T = 0;
    if (analytic) {
        ballT = lens_ball(spine_j, spine_T);
        if (!ballT.valid) throw sampling_error("axiom5: designated member misses the anchor");
        far_T = norm_euclidean(ballT.center) + ballT.radius;
    } else {
        lensT = intersection_cloud(Tj, T);
        if (lensT.empty()) throw sampling_error("axiom5: designated member misses the anchor");
        for (const auto& p : lensT) far_T = std::max(far_T, norm_euclidean(p));
    }

    // Common point z: beyond the anchor lens by a bit more than gamma.
    const Point pj0 = setting.segment_point(uj, *aj, t_orig);
    const Point pj1 = setting.segment_point(uj, *aj, t_orig + 0.125 * (j1 - j0));
    const double speed = dist_euclidean(pj0, pj1) / (0.125 * (j1 - j0));
    const double rho = 1.2 * gamma + far_T + 4 * delta;
    const auto [w0, w1] = setting.t_range(uj, true);
    double tz = t_orig + rho / speed;
    if (tz > w1 - 0.05 * (w1 - w0)) tz = w1 - 0.05 * (w1 - w0);
    const Point z = setting.segment_point(uj, *aj, tz);

    // Family: delta-separated slab of the beta-cap around u_j, transverse
    // width just above what the T-intersection condition can accept. Very
    // large families are decimated evenly; counts are scaled by the stride.
    const double width = 6.0 * W * delta / gamma + 6.0 * delta;
    std::size_t stride = 1;
    const std::size_t cap = analytic ? max_family : std::min<std::size_t>(max_family, 6000);
    auto family = setting.direction_slab_grid(uj, u, beta_max, width, delta, cap, &stride);
    detail.family_size = family.size() * stride;
    const double weight = double(stride);

    const auto [m0, m1] = setting.t_range(uj, true);
    const double t_at = m0 + 0.7 * (m1 - m0);

    for (const auto& ui : family) {
        if (setting.dist_Z(ui, u) < beta_max / 8.0) continue;
        const double dz = setting.dist_Z(ui, uj);
        if (!(dz > 0)) continue;
        const auto ai = setting.param_through(ui, z, t_at);
        if (!ai) continue;
        const auto Ti = make_tube(setting, ui, *ai, delta, true);
        if (analytic) {
            const SegSpine spine_i = spine_of(Ti);
            if (dist_segment_segment(spine_i.a, spine_i.b, spine_T.a, spine_T.b) >
                spine_i.rad + spine_T.rad)
                continue;
            ++detail.through_z;
            const auto ball_ij = lens_ball(spine_i, spine_j);
            if (!ball_ij.valid) continue;
            const double sep = std::max(
                0.0, dist_euclidean(ball_ij.center, ballT.center) - ball_ij.radius - ballT.radius);
            detail.members.push_back({dz, sep, weight});
        } else {
            if (!tubes_intersect(Ti, T)) continue;
            ++detail.through_z;
            const auto lens = intersection_cloud(Ti, Tj, 96);
            if (lens.empty()) continue;
            const double sep = min_cloud_distance(lens, lensT);
            detail.members.push_back({dz, sep, weight});
        }
    }
    return detail;
}

} // namespace

double Axiom5Profile::count(double beta, double gamma) const {
    double c = 0;
    for (const auto& m : members)
        if (m[0] <= beta && m[1] >= gamma) c += m[2];
    return c;
}

Axiom5Profile axiom5_profile(const Setting& setting, double delta, double beta_max, double gamma,
                             std::size_t max_family) {
    const auto detail = axiom5_detail(setting, delta, beta_max, gamma, max_family);
    Axiom5Profile profile;
    profile.family_size = detail.family_size;
    profile.through_z = detail.through_z;
    for (const auto& m : detail.members)
        profile.members.push_back({m.dz_to_uj, m.separation, m.weight});
    return profile;
}

AxiomReport axiom5_experiment(const Setting& setting, const std::vector<double>& deltas,
                              const std::vector<double>& betas,
                              const std::vector<double>& gammas, std::uint64_t seed,
                              std::size_t max_family) {
    if (deltas.size() < 2) throw input_error("axiom5_experiment: need >= 2 deltas");
    if (betas.size() < 3 || gammas.size() < 3)
        throw input_error("axiom5_experiment: beta and gamma grids need >= 3 values");
    const double gmin = *std::min_element(gammas.begin(), gammas.end());
    for (double d : deltas)
        if (d > gmin / 8.0 + 1e-12)
            throw input_error("axiom5_experiment: requires delta <= min(gamma)/8");
    (void)seed; // the construction is deterministic; seed kept for interface parity

    AxiomReport report;
    report.axiom = 5;
    report.setting_summary = setting.summary();
    report.nominal = setting.nominal_exponents();
    const double beta_max = *std::max_element(betas.begin(), betas.end());

    std::vector<std::vector<double>> xs;
    std::vector<double> ys;
    long long trial = 0;
    std::size_t through_z = 0, family_total = 0;
    for (double delta : deltas) {
        for (double gamma : gammas) {
            const auto detail = axiom5_detail(setting, delta, beta_max, gamma, max_family);
            through_z += detail.through_z;
            family_total += detail.family_size;
            for (double beta : betas) {
                const double count = detail.count(beta, gamma);
                report.rows.push_back({delta, beta, gamma, trial++, count});
                if (count >= 1) {
                    xs.push_back({std::log(delta), std::log(beta), std::log(gamma)});
                    ys.push_back(std::log(count));
                }
            }
        }
    }
    if (xs.size() < 6) throw sampling_error("axiom5_experiment: empty hairbrush counts");
    const auto coeff = fit_multilinear(xs, ys);
    report.estimates["lambda_hat"] = -coeff[1];
    report.estimates["alpha_hat"] = -coeff[3];
    report.diagnostics["beta_slope"] = coeff[2];
    report.diagnostics["through_z_fraction"] =
        family_total ? double(through_z) / double(family_total) : 0.0;

    const auto nominal = setting.nominal_lambda_alpha();
    if (nominal) {
        report.checked = "|lambda_hat - lambda| <= 0.3 and |alpha_hat - alpha| <= 0.3";
        report.pass = std::fabs(-coeff[1] - nominal->first) <= 0.3 &&
                      std::fabs(-coeff[3] - nominal->second) <= 0.3;
        report.diagnostics["lambda_nominal"] = nominal->first;
        report.diagnostics["alpha_nominal"] = nominal->second;
    } else {
        report.has_nominal_target = false;
        report.checked = "measured exponents recorded (no nominal target)";
        report.pass = true;
    }
    return report;
}

// ---------------------------------------------------------------------------
// Closed-form bounds
// ---------------------------------------------------------------------------

std::pair<Rat, Rat> predicted_bounds(Rat Q, Rat S, Rat T, Rat theta, Rat lambda, Rat alpha,
                                     std::vector<std::string>* violations) {
    const auto note = [&](const std::string& msg) {
        if (violations) violations->push_back(msg);
    };
    if (!(S * Rat(1, 2) < T) || !(T < Q)) note("requires S/2 < T < Q");
    const Rat theta_cap = (Q * 2 - T * 2 + S) / (S + 2);
    if (!(Rat(0) <= theta) || !(theta < theta_cap)) note("requires 0 <= theta < (2Q-2T+S)/(S+2)");
    if (!(Rat(0) <= alpha) || !(alpha <= S - 1)) note("requires 0 <= alpha <= S-1");
    if (Rat(0) < theta && !(alpha * theta <= Q - theta * 2))
        note("requires alpha <= Q/theta - 2");
    const Rat lambda_lo = std::max(S - alpha, S - T * 2 + 2);
    const Rat lambda_hi = Q * 2 - T * 2 + S + 2 - theta * (alpha + 2) * 2;
    if (!(lambda_lo <= lambda) || !(lambda < lambda_hi))
        note("requires max{S-alpha, S-2T+2} <= lambda < 2Q-2T+S+2-2*theta*(alpha+2)");

    const Rat bourgain = (Q * 2 - T * 2 + S) / 2 - theta * (S + 2) / 2;
    const Rat wolff = (Q * 2 - T * 2 + S - lambda + 2) / 2 - theta * (alpha + 2);
    return {bourgain, wolff};
}

namespace {

// s = 1/k for ratio = 2^{-k}; nullopt otherwise.
std::optional<Rat> dyadic_dimension(const CantorSet& set) {
    for (int k = 1; k <= 30; ++k)
        if (std::fabs(set.ratio - std::pow(2.0, -k)) < 1e-12) return Rat(1, k);
    return std::nullopt;
}

} // namespace

std::vector<LabeledBound> furstenberg_bounds(int n, Rat s) {
    std::vector<LabeledBound> out;
    out.push_back({"furstenberg_bourgain", s * Rat(n + 1, 2)});
    out.push_back({"furstenberg_wolff", (s * 2 - 1) * n / 2 + 1});
    out.push_back({"furstenberg_katz_tao", s * Rat(4 * n + 3, 7)});
    out.push_back({"k_furstenberg_wolff", s * 2 + Rat(n - 2, 2)});
    return out;
}

std::vector<LabeledBound> paper_bounds(const Setting& setting) {
    std::vector<LabeledBound> out;
    const int n = setting.ambient_dim();
    switch (setting.kind()) {
        case SettingKind::EuclideanKakeya:
            out.push_back({"bourgain", Rat(n + 1, 2)});
            out.push_back({"wolff", Rat(n + 2, 2)});
            break;
        case SettingKind::NikodymHyperplane:
            out.push_back({"bourgain", Rat(n + 1, 2)});
            out.push_back({"wolff", Rat(n + 2, 2)});
            break;
        case SettingKind::RestrictedKakeya: {
            const auto s = dyadic_dimension(setting.cantor());
            if (!s) break;
            const Rat S = (n == 2) ? *s : Rat(n - 2) + *s;
            out.push_back({"bourgain", (S + 2) / 2});
            out.push_back({"wolff", (S + 3) / 2});
            break;
        }
        case SettingKind::FurstenbergK: {
            const auto s = dyadic_dimension(setting.cantor());
            if (!s) break;
            out.push_back({"k_furstenberg_wolff", *s * 2 + Rat(n - 2, 2)});
            out.push_back({"katz_tao", *s * Rat(4 * n + 3, 7)});
            break;
        }
        case SettingKind::HomogeneousKakeya: {
            const Rat Q(setting.layers().Q);
            const Rat s(setting.layers().s);
            out.push_back({"bourgain", (Q + s) / 2});
            bool case_a = setting.layers().m[0] == n - 1 &&
                          setting.layers().m[setting.layers().s - 1] == 1;
            for (int j = 1; j + 1 < setting.layers().s && case_a; ++j)
                case_a = setting.layers().m[j] == 0;
            if (case_a) out.push_back({"wolff", (Rat(n) + s * 2) / 2});
            out.push_back({"minkowski_arithmetic", (Q * 6 + s * 5) / 11});
            break;
        }
        case SettingKind::CarnotLT:
            if (setting.group().m2 == 1) out.push_back({"bourgain", Rat(n + 3, 2)});
            break;
        case SettingKind::CarnotKakeya:
            if (setting.group().m2 == 1) {
                out.push_back({"bourgain", Rat(n + 3, 2)});
                out.push_back({"wolff", Rat(n + 4, 2)});
            }
            break;
    }
    return out;
}

} // namespace kakeya

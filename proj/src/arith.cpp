#include "kakeya/arith.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <tuple>

#include "kakeya/rng.hpp"

namespace kakeya {

namespace {

// p in K(delta)_d tested through box samples of B_d(p, delta): the center
// plus the 2^n corners, matching the grid-cover sampling style.
bool in_neighborhood(const Indicator& set_indicator, const Point& p, double delta,
                     const LayerSpec& layers) {
    if (set_indicator(p)) return true;
    const int n = layers.n;
    for (int corner = 0; corner < (1 << n); ++corner) {
        Point q(n);
        for (int i = 0; i < n; ++i) {
            const double rj = std::pow(delta, layers.expo[i]);
            q[i] = p[i] + (((corner >> i) & 1) ? rj : -rj);
        }
        if (set_indicator(q)) return true;
    }
    return false;
}

} // namespace

LatticeSet slice(const Indicator& set_indicator, double t, double delta,
                 const LayerSpec& layers, const Box& bounds) {
    if (!(t >= 0.0 && t <= 1.0)) throw input_error("slice: t must be in [0,1]");
    if (!(delta > 0)) throw input_error("slice: delta must be positive");
    const int n = layers.n;
    LatticeSet out;
    out.scale.resize(n - 1);
    std::vector<long long> lo(n - 1), hi(n - 1);
    long long cells = 1;
    for (int i = 0; i + 1 < n; ++i) {
        out.scale[i] = std::pow(delta, layers.expo[i]);
        lo[i] = (long long)std::floor(bounds.lo[i] / out.scale[i]);
        hi[i] = (long long)std::ceil(bounds.hi[i] / out.scale[i]);
        cells *= (hi[i] - lo[i] + 1);
        if (cells > 100'000'000) throw resource_error("slice: lattice too large");
    }
    std::vector<long long> idx(lo);
    while (true) {
        Point p(n);
        for (int i = 0; i + 1 < n; ++i) p[i] = idx[i] * out.scale[i];
        p[n - 1] = t;
        if (in_neighborhood(set_indicator, p, delta, layers))
            out.points.insert(std::vector<long long>(idx.begin(), idx.end()));
        int k = 0;
        while (k + 1 < n && ++idx[k] > hi[k]) idx[k++] = lo[k];
        if (k + 1 >= n) break;
    }
    return out;
}

std::pair<long long, long long> sum_diff_stats(
    const LatticeSet& A, const LatticeSet& B,
    const std::vector<std::pair<std::vector<long long>, std::vector<long long>>>& G) {
    for (const auto& [x, y] : G) {
        if (!A.points.count(x) || !B.points.count(y))
            throw input_error("sum_diff_stats: G is not a subset of A x B");
    }
    std::set<std::vector<long long>> sums, diffs;
    for (const auto& [x, y] : G) {
        std::vector<long long> s(x.size()), d(x.size());
        for (size_t i = 0; i < x.size(); ++i) {
            s[i] = x[i] + y[i];
            d[i] = x[i] - y[i];
        }
        sums.insert(std::move(s));
        diffs.insert(std::move(d));
    }
    return {(long long)sums.size(), (long long)diffs.size()};
}

PropositionReport proposition_exhaustive(int N_max, int universe_size, std::uint64_t seed) {
    if (universe_size < 1 || universe_size > 8)
        throw input_error("proposition_exhaustive: universe_size must be in [1, 8]");
    if (N_max < 1 || N_max > 4)
        throw input_error("proposition_exhaustive: N_max must be in [1, 4]");

    PropositionReport report;
    report.sample_seed = seed;

    // Subsets with 1..N_max elements as bitmasks.
    std::vector<unsigned> subsets;
    for (unsigned mask = 1; mask < (1u << universe_size); ++mask)
        if (std::popcount(mask) <= N_max) subsets.push_back(mask);

    const auto elements = [&](unsigned mask) {
        std::vector<long long> v;
        for (int b = 0; b < universe_size; ++b)
            if (mask & (1u << b)) v.push_back(b);
        return v;
    };

    Rng rng(seed);
    for (unsigned amask : subsets) {
        const auto A = elements(amask);
        for (unsigned bmask : subsets) {
            const auto B = elements(bmask);
            // All (x, y) pairs of A x B, indexed by bit.
            std::vector<std::pair<long long, long long>> pairs;
            for (long long x : A)
                for (long long y : B) pairs.emplace_back(x, y);
            const int bits = int(pairs.size());

            const auto check_g = [&](std::uint64_t g) {
                unsigned sums_mask = 0, diffs_mask = 0;
                for (int b = 0; b < bits; ++b)
                    if (g & (1ull << b)) {
                        sums_mask |= 1u << (pairs[b].first + pairs[b].second);
                        diffs_mask |= 1u << (pairs[b].first - pairs[b].second + 8);
                    }
                const long long sums = std::popcount(sums_mask);
                const long long diffs = std::popcount(diffs_mask);
                const long long N = std::max<long long>({(long long)A.size(),
                                                         (long long)B.size(), sums});
                ++report.checked;
                // diffs <= N^{11/6}  <=>  diffs^6 <= N^11 (integers).
                long long lhs = 1, rhs = 1;
                for (int k = 0; k < 6; ++k) lhs *= diffs;
                for (int k = 0; k < 11; ++k) rhs *= N;
                if (lhs > rhs) {
                    PropositionReport::Counterexample ce;
                    ce.A = A;
                    ce.B = B;
                    ce.sums = sums;
                    ce.diffs = diffs;
                    ce.N = N;
                    report.counterexamples.push_back(std::move(ce));
                }
            };

            if (bits <= 20) {
                for (std::uint64_t g = 0; g < (1ull << bits); ++g) check_g(g);
            } else {
                report.exhaustive = false;
                for (int k = 0; k < (1 << 20); ++k) {
                    std::uint64_t g = rng.next_u64();
                    if (bits < 64) g &= (1ull << bits) - 1;
                    check_g(g);
                }
            }
        }
    }
    std::sort(report.counterexamples.begin(), report.counterexamples.end(),
              [](const auto& a, const auto& b) {
                  return std::tie(a.A, a.B, a.sums, a.diffs) <
                         std::tie(b.A, b.B, b.sums, b.diffs);
              });
    return report;
}

MinkowskiReport minkowski_pipeline(const Indicator& set_indicator, double delta,
                                   const LayerSpec& layers, double c, const Box& bounds) {
    if (!(c < 6.0 / 11.0)) throw input_error("minkowski_pipeline: requires c < 6/11");
    if (!(delta > 0 && delta < 0.5)) throw input_error("minkowski_pipeline: delta out of range");
    const int n = layers.n;

    MinkowskiReport report;
    report.slice_bound = 100.0 * std::pow(delta, (1.0 - c) * (layers.Q - layers.s));

    // Slice measures over a t-grid; Chebyshev guarantees three aligned small
    // slices for genuinely small sets.
    const int levels = 33;
    std::vector<double> measure(levels);
    std::vector<LatticeSet> slices(levels);
    double cell_volume = 1;
    for (int i = 0; i + 1 < n; ++i) cell_volume *= std::pow(2 * delta, layers.expo[i]);
    for (int k = 0; k < levels; ++k) {
        const double t = double(k) / (levels - 1);
        slices[k] = slice(set_indicator, t, 2 * delta, layers, bounds);
        measure[k] = double(slices[k].size()) * cell_volume;
    }

    int best_i = -1, best_step = 0;
    for (int step = (levels - 1) / 2; step >= 1 && best_i < 0; --step)
        for (int i = 0; i + 2 * step < levels; ++i)
            if (measure[i] <= report.slice_bound && measure[i + step] <= report.slice_bound &&
                measure[i + 2 * step] <= report.slice_bound) {
                best_i = i;
                best_step = step;
                break;
            }
    if (best_i < 0) {
        report.hypothesis_met = false;
        report.note = "hypothesis not met: no three aligned slices below the Chebyshev bound";
        return report;
    }
    report.hypothesis_met = true;
    for (int j = 0; j < 3; ++j) report.t_levels[j] = double(best_i + j * best_step) / (levels - 1);

    const auto k0 = slice(set_indicator, report.t_levels[0], delta, layers, bounds);
    const auto kmid = slice(set_indicator, report.t_levels[1], delta, layers, bounds);
    const auto k1 = slice(set_indicator, report.t_levels[2], delta, layers, bounds);
    report.slice_sizes[0] = (long long)k0.size();
    report.slice_sizes[1] = (long long)kmid.size();
    report.slice_sizes[2] = (long long)k1.size();

    // G: endpoint pairs whose connecting segment stays in the neighborhood;
    // the midpoint level carries the sum bound. Doubled coordinates keep the
    // half-grid midpoints integral.
    if (k0.size() * k1.size() > 4'000'000)
        throw resource_error("minkowski_pipeline: too many endpoint pairs");
    std::vector<std::pair<std::vector<long long>, std::vector<long long>>> G;
    LatticeSet A2, B2;
    A2.scale = k0.scale;
    B2.scale = k1.scale;
    for (const auto& p : k0.points) {
        std::vector<long long> p2(p);
        for (auto& x : p2) x *= 2;
        A2.points.insert(p2);
    }
    for (const auto& q : k1.points) {
        std::vector<long long> q2(q);
        for (auto& x : q2) x *= 2;
        B2.points.insert(q2);
    }
    for (const auto& p : k0.points)
        for (const auto& q : k1.points) {
            Point mid(n);
            for (int i = 0; i + 1 < n; ++i)
                mid[i] = 0.5 * (p[i] + q[i]) * k0.scale[i];
            mid[n - 1] = report.t_levels[1];
            if (!in_neighborhood(set_indicator, mid, delta, layers)) continue;
            std::vector<long long> p2(p), q2(q);
            for (auto& x : p2) x *= 2;
            for (auto& x : q2) x *= 2;
            G.emplace_back(std::move(p2), std::move(q2));
        }
    report.pair_count = (long long)G.size();
    if (!G.empty()) {
        const auto [sums, diffs] = sum_diff_stats(A2, B2, G);
        report.sums = sums;
        report.diffs = diffs;
        const long long N =
            std::max<long long>({report.slice_sizes[0], report.slice_sizes[2], sums});
        report.contradiction = double(diffs) > std::pow(double(N), 11.0 / 6.0) + 1e-9;
    }
    report.note = "slice triple found; sums bounded by the mid-level slice";
    return report;
}

} // namespace kakeya

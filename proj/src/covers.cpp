#include "kakeya/covers.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <thread>

#include "kakeya/rng.hpp"

namespace kakeya {

Net greedy_net(const std::vector<std::vector<double>>& candidates, double delta,
               const DistanceFn& dist) {
    if (candidates.empty()) throw input_error("greedy_net: empty candidate set");
    if (!(delta > 0)) throw input_error("greedy_net: delta must be positive");
    Net net;
    net.delta = delta;
    for (const auto& cand : candidates) {
        bool separated = true;
        for (const auto& kept : net.points) {
            if (dist(cand, kept) <= delta) {
                separated = false;
                break;
            }
        }
        if (separated) net.points.push_back(cand);
    }
    return net;
}

std::vector<std::size_t> five_r_cover(const BallFamily& family, const DistanceFn& dist) {
    std::vector<std::size_t> order(family.balls.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return family.balls[a].second > family.balls[b].second;
    });
    std::vector<std::size_t> selected;
    for (std::size_t idx : order) {
        const auto& [center, radius] = family.balls[idx];
        bool disjoint = true;
        for (std::size_t kept : selected) {
            const auto& [kc, kr] = family.balls[kept];
            if (dist(center, kc) <= radius + kr) {
                disjoint = false;
                break;
            }
        }
        if (disjoint) selected.push_back(idx);
    }
    std::sort(selected.begin(), selected.end());
    return selected;
}

long long grid_cover_count(const Indicator& indicator, const Box& bounds, double delta,
                           MetricKind metric, const LayerSpec* layers, long long cell_cap) {
    if (!(delta > 0)) throw input_error("grid_cover_count: delta must be positive");
    const int n = bounds.dim();
    if (metric == MetricKind::Homogeneous && (!layers || layers->n != n))
        throw input_error("grid_cover_count: homogeneous metric needs a matching layer spec");

    std::vector<double> side(n, delta);
    if (metric == MetricKind::Homogeneous)
        for (int i = 0; i < n; ++i) side[i] = std::pow(delta, layers->expo[i]);

    std::vector<long long> cells(n);
    long long total = 1;
    for (int i = 0; i < n; ++i) {
        const double span = bounds.hi[i] - bounds.lo[i];
        if (!(span > 0) || !std::isfinite(span))
            throw input_error("grid_cover_count: bounds must be finite with positive extent");
        cells[i] = std::max<long long>(1, (long long)std::ceil(span / side[i] - 1e-12));
        if (total > cell_cap / cells[i] + 1) throw resource_error("grid_cover_count: cell cap exceeded");
        total *= cells[i];
    }
    if (total > cell_cap) throw resource_error("grid_cover_count: cell cap exceeded");

    // Center sample plus the 2^n corner samples of every cell.
    const int corners = 1 << n;
    std::vector<long long> idx(n, 0);
    long long count = 0;
    Point p(n);
    while (true) {
        bool hit = false;
        for (int i = 0; i < n; ++i)
            p[i] = bounds.lo[i] + (idx[i] + 0.5) * side[i];
        if (indicator(p)) hit = true;
        for (int c = 0; c < corners && !hit; ++c) {
            for (int i = 0; i < n; ++i)
                p[i] = bounds.lo[i] + (idx[i] + ((c >> i) & 1)) * side[i];
            if (indicator(p)) hit = true;
        }
        if (hit) ++count;
        int k = 0;
        while (k < n && ++idx[k] >= cells[k]) idx[k++] = 0;
        if (k >= n) break;
    }
    return count;
}

namespace {

constexpr long long kChunk = 65536;

// Hits are counted per fixed-size chunk with chunk-derived substreams; the
// integer total is identical for any worker count.
template <typename DrawFn>
McResult mc_generic(const Indicator& indicator, const DrawFn& draw, double volume,
                    long long samples, std::uint64_t seed, int workers) {
    if (samples < 100) throw input_error("mc_volume: need at least 100 samples");
    if (!(volume > 0)) throw input_error("mc_volume: zero-volume sampling domain");
    const long long chunks = (samples + kChunk - 1) / kChunk;
    std::vector<long long> chunk_hits(chunks, 0);

    const auto run_chunk = [&](long long c) {
        Rng rng(derive_seed(seed, std::uint64_t(c)));
        const long long begin = c * kChunk;
        const long long end = std::min(samples, begin + kChunk);
        long long hits = 0;
        for (long long i = begin; i < end; ++i)
            if (indicator(draw(rng))) ++hits;
        chunk_hits[c] = hits;
    };

    workers = std::max(1, workers);
    if (workers == 1 || chunks == 1) {
        for (long long c = 0; c < chunks; ++c) run_chunk(c);
    } else {
        std::atomic<long long> next{0};
        std::vector<std::thread> pool;
        const int use = std::min<long long>(workers, chunks);
        for (int w = 0; w < use; ++w)
            pool.emplace_back([&] {
                long long c;
                while ((c = next.fetch_add(1)) < chunks) run_chunk(c);
            });
        for (auto& t : pool) t.join();
    }

    long long hits = 0;
    for (long long h : chunk_hits) hits += h;
    McResult res;
    res.hits = hits;
    res.samples = samples;
    const double frac = double(hits) / double(samples);
    res.estimate = volume * frac;
    res.std_error = volume * std::sqrt(std::max(0.0, frac * (1.0 - frac) / double(samples)));
    return res;
}

} // namespace

McResult mc_volume(const Indicator& indicator, const Box& bounds, long long samples,
                   std::uint64_t seed, int workers) {
    const int n = bounds.dim();
    for (int i = 0; i < n; ++i)
        if (!(bounds.hi[i] > bounds.lo[i]))
            throw input_error("mc_volume: zero-volume bounds");
    const auto draw = [&bounds, n](Rng& rng) {
        Point p(n);
        for (int i = 0; i < n; ++i) p[i] = rng.uniform(bounds.lo[i], bounds.hi[i]);
        return p;
    };
    return mc_generic(indicator, draw, bounds.volume(), samples, seed, workers);
}

McResult mc_volume_region(const Indicator& indicator, const SampleRegion& region,
                          long long samples, std::uint64_t seed, int workers) {
    const auto draw = [&region](Rng& rng) { return region.draw(rng); };
    return mc_generic(indicator, draw, region.total_volume, samples, seed, workers);
}

McResult tube_volume(const Tube& tube, long long samples, std::uint64_t seed, int workers) {
    const auto region = tube_sample_region(tube);
    const auto indicator = [&tube](const Point& p) { return tube_contains(tube, p); };
    return mc_volume_region(indicator, region, samples, seed, workers);
}

} // namespace kakeya

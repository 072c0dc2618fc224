#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "kakeya/geometry.hpp"
#include "kakeya/settings.hpp"

namespace kakeya {

using DistanceFn = std::function<double(const std::vector<double>&, const std::vector<double>&)>;
using Indicator = std::function<bool(const Point&)>;

// Maximal delta-separated subset of a candidate cloud, first-fit in candidate
// order: pairwise distances > delta, every candidate within delta of a net point.
struct Net {
    std::vector<std::vector<double>> points;
    double delta = 0;
};

Net greedy_net(const std::vector<std::vector<double>>& candidates, double delta,
               const DistanceFn& dist);

struct BallFamily {
    std::vector<std::pair<std::vector<double>, double>> balls; // (center, radius)
};

// Vitali 5r selection: greedy by decreasing radius. Selected balls are
// pairwise disjoint and every input ball is contained in the 5x dilate of a
// selected one.
std::vector<std::size_t> five_r_cover(const BallFamily& family, const DistanceFn& dist);

// Number of grid cells (side delta^j per layer j for the homogeneous metric,
// delta otherwise) whose center or any corner satisfies the indicator.
long long grid_cover_count(const Indicator& indicator, const Box& bounds, double delta,
                           MetricKind metric, const LayerSpec* layers = nullptr,
                           long long cell_cap = 200'000'000);

struct McResult {
    double estimate = 0;
    double std_error = 0;
    long long hits = 0;
    long long samples = 0;
};

// Monte Carlo volume over an axis-aligned box. Deterministic for a fixed
// seed and independent of the worker count: samples are processed in fixed
// 65536-sample chunks whose substreams derive from the seed by index.
McResult mc_volume(const Indicator& indicator, const Box& bounds, long long samples,
                   std::uint64_t seed, int workers = 1);

// Same estimator over a SampleRegion (disjoint cells).
McResult mc_volume_region(const Indicator& indicator, const SampleRegion& region,
                          long long samples, std::uint64_t seed, int workers = 1);

// Volume of a tube by sampling its own region; hit fractions stay Theta(1).
McResult tube_volume(const Tube& tube, long long samples, std::uint64_t seed, int workers = 1);

} // namespace kakeya

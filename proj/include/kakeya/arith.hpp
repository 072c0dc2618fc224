#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "kakeya/covers.hpp"
#include "kakeya/geometry.hpp"

namespace kakeya {

// Finite set of lattice points on the anisotropic grid
// delta Z^{m_1} x ... x delta^s Z^{m_s} (integer coordinates, scale kept
// alongside).
struct LatticeSet {
    std::set<std::vector<long long>> points;
    std::vector<double> scale; // per-coordinate lattice step

    std::size_t size() const { return points.size(); }
};

// Lattice slice K[t]: grid points i of the first n-1 coordinates with (i, t)
// in the delta-neighborhood (metric d) of the set.
LatticeSet slice(const Indicator& set_indicator, double t, double delta,
                 const LayerSpec& layers, const Box& bounds);

// Exact cardinalities of {x+y} and {x-y} over the pairs of G.
std::pair<long long, long long> sum_diff_stats(
    const LatticeSet& A, const LatticeSet& B,
    const std::vector<std::pair<std::vector<long long>, std::vector<long long>>>& G);

struct PropositionReport {
    long long checked = 0;
    bool exhaustive = true;
    std::uint64_t sample_seed = 0;
    struct Counterexample {
        std::vector<long long> A, B;
        long long sums = 0, diffs = 0, N = 0;
    };
    std::vector<Counterexample> counterexamples;
};

// Brute-force verification of the sums-differences bound
// diffs <= N^{11/6} with N = max(|A|, |B|, sums), over all A, B in
// {0..universe_size-1} with |A|,|B| <= N_max and all G subset of A x B
// (a seeded random sample of 2^20 G's per (A,B) above the exhaustive cap).
PropositionReport proposition_exhaustive(int N_max, int universe_size,
                                         std::uint64_t seed = 7);

struct MinkowskiReport {
    bool hypothesis_met = false;   // found the three small slices
    double slice_bound = 0;        // 100 delta^{(1-c)(Q-s)}
    double t_levels[3] = {0, 0, 0};
    long long slice_sizes[3] = {0, 0, 0};
    long long pair_count = 0;      // |G|
    long long sums = 0;
    long long diffs = 0;
    bool contradiction = false;    // diffs exceed the proposition bound for
                                   // the observed sums
    std::string note;
};

// The slice-and-count pipeline behind the arithmetic lower bound: finds three
// levels with small slices, builds G from segment endpoints in
// K[t0] x K[t2], and compares sum/difference counts against the
// sums-differences bound.
MinkowskiReport minkowski_pipeline(const Indicator& set_indicator, double delta,
                                   const LayerSpec& layers, double c, const Box& bounds);

} // namespace kakeya

#include <doctest.h>

#include <cmath>

#include "kakeya/arith.hpp"
#include "kakeya/rng.hpp"

using namespace kakeya;

TEST_CASE("slice basics") {
    const auto layers = LayerSpec::create({1, 1});
    Box bounds;
    bounds.lo = {-0.5, 0.0};
    bounds.hi = {0.5, 1.0};

    // x_n-axis segment: one lattice column near the origin.
    const Indicator axis = [](const Point& p) {
        return std::fabs(p[0]) <= 1e-12 && p[1] >= 0 && p[1] <= 1;
    };
    const auto s = slice(axis, 0.5, 1.0 / 16, layers, bounds);
    CHECK(s.size() >= 1);
    CHECK(s.size() <= 3);

    // Empty set: empty slice.
    const Indicator empty = [](const Point&) { return false; };
    CHECK(slice(empty, 0.5, 1.0 / 16, layers, bounds).size() == 0);

    // Slab of width w: cardinality scales with w/delta.
    for (double w : {0.125, 0.25}) {
        const Indicator slab = [w](const Point& p) {
            return std::fabs(p[0]) <= w / 2 && p[1] >= 0 && p[1] <= 1;
        };
        const auto sl = slice(slab, 0.5, 1.0 / 32, layers, bounds);
        CHECK(double(sl.size()) >= w / (1.0 / 32) * 0.8);
        CHECK(double(sl.size()) <= w / (1.0 / 32) * 3.0);
    }

    // Monotone: enlarging the set never shrinks a slice.
    const Indicator small_set = [](const Point& p) { return std::fabs(p[0]) <= 0.05; };
    const Indicator big_set = [](const Point& p) { return std::fabs(p[0]) <= 0.2; };
    CHECK(slice(small_set, 0.3, 1.0 / 32, layers, bounds).size() <=
          slice(big_set, 0.3, 1.0 / 32, layers, bounds).size());
}

TEST_CASE("sum and difference statistics") {
    LatticeSet A, B;
    A.scale = {1.0};
    B.scale = {1.0};
    A.points = {{0}, {1}};
    B.points = {{0}, {1}};

    // Empty G.
    CHECK(sum_diff_stats(A, B, {}) == std::pair<long long, long long>{0, 0});

    // Full G: sums {0,1,2}, diffs {-1,0,1}.
    std::vector<std::pair<std::vector<long long>, std::vector<long long>>> G;
    for (long long x : {0, 1})
        for (long long y : {0, 1}) G.push_back({{x}, {y}});
    CHECK(sum_diff_stats(A, B, G) == std::pair<long long, long long>{3, 3});

    // Diagonal G on a progression: sums k+1, diffs 1.
    LatticeSet P;
    P.scale = {1.0};
    for (long long k = 0; k <= 5; ++k) P.points.insert({k});
    std::vector<std::pair<std::vector<long long>, std::vector<long long>>> diag;
    for (long long k = 0; k <= 5; ++k) diag.push_back({{k}, {k}});
    CHECK(sum_diff_stats(P, P, diag) == std::pair<long long, long long>{6, 1});

    // Translation invariance: shifting A and B by a common vector preserves
    // both cardinalities (differences literally, sums as a set shift).
    LatticeSet A2, B2;
    A2.scale = B2.scale = {1.0};
    std::vector<std::pair<std::vector<long long>, std::vector<long long>>> G2;
    Rng rng(5);
    for (int i = 0; i < 12; ++i) {
        const long long x = (long long)rng.uniform_index(10);
        const long long y = (long long)rng.uniform_index(10);
        A2.points.insert({x});
        B2.points.insert({y});
        G2.push_back({{x}, {y}});
    }
    const auto base = sum_diff_stats(A2, B2, G2);
    LatticeSet A3, B3;
    A3.scale = B3.scale = {1.0};
    auto G3 = G2;
    for (auto& [x, y] : G3) {
        x[0] += 17;
        y[0] += 17;
        A3.points.insert(x);
        B3.points.insert(y);
    }
    CHECK(sum_diff_stats(A3, B3, G3) == base);

    // G must be a subset of A x B.
    CHECK_THROWS_AS(sum_diff_stats(A, B, {{{5}, {0}}}), input_error);
}

TEST_CASE("sums-differences proposition holds by brute force") {
    const auto small = proposition_exhaustive(2, 4);
    CHECK(small.exhaustive);
    CHECK(small.counterexamples.empty());
    CHECK(small.checked > 0);

    const auto larger = proposition_exhaustive(3, 6);
    CHECK(larger.exhaustive);
    CHECK(larger.counterexamples.empty());

    CHECK_THROWS_AS(proposition_exhaustive(5, 6), input_error);
    CHECK_THROWS_AS(proposition_exhaustive(3, 9), input_error);
}

TEST_CASE("sum diff counts match a nested-loop oracle on random instances") {
    Rng rng(99);
    for (int trial = 0; trial < 100; ++trial) {
        const int dim = 1 + int(rng.uniform_index(2));
        LatticeSet A, B;
        A.scale.assign(dim, 1.0);
        B.scale.assign(dim, 1.0);
        std::vector<std::pair<std::vector<long long>, std::vector<long long>>> G;
        const int pairs = 3 + int(rng.uniform_index(12));
        for (int k = 0; k < pairs; ++k) {
            std::vector<long long> x(dim), y(dim);
            for (int i = 0; i < dim; ++i) {
                x[i] = (long long)rng.uniform_index(6) - 3;
                y[i] = (long long)rng.uniform_index(6) - 3;
            }
            A.points.insert(x);
            B.points.insert(y);
            G.push_back({x, y});
        }
        const auto [sums, diffs] = sum_diff_stats(A, B, G);

        // Independent oracle: nested loops with linear scans over plain vectors.
        std::vector<std::vector<long long>> sum_list, diff_list;
        for (const auto& [x, y] : G) {
            std::vector<long long> s(dim), d(dim);
            for (int i = 0; i < dim; ++i) {
                s[i] = x[i] + y[i];
                d[i] = x[i] - y[i];
            }
            bool snew = true, dnew = true;
            for (const auto& v : sum_list)
                if (v == s) snew = false;
            for (const auto& v : diff_list)
                if (v == d) dnew = false;
            if (snew) sum_list.push_back(s);
            if (dnew) diff_list.push_back(d);
        }
        CHECK(sums == (long long)sum_list.size());
        CHECK(diffs == (long long)diff_list.size());
    }
}

TEST_CASE("minkowski pipeline") {
    const auto layers = LayerSpec::create({1, 1});
    Box bounds;
    bounds.lo = {-1.0, 0.0};
    bounds.hi = {1.0, 1.0};
    const double delta = 1.0 / 16;

    // Full box: slices are large, hypothesis fails. The Chebyshev bound
    // 100 delta^{(1-c)(Q-s)} only dips below the full slice measure (~2) for
    // small delta, so this case runs at delta = 2^{-12}.
    const Indicator full = [](const Point& p) {
        return p[0] >= -1 && p[0] <= 1 && p[1] >= 0 && p[1] <= 1;
    };
    const auto rep_full = minkowski_pipeline(full, 1.0 / 4096, layers, 0.5, bounds);
    CHECK(!rep_full.hypothesis_met);

    // Union of delta^{s-Q} = 1/delta separated tubes: difference count at
    // least half the direction count.
    const int tube_count = 16; // delta^{-1}
    std::vector<double> dirs;
    for (int k = 0; k < tube_count; ++k) dirs.push_back(-0.45 + 0.9 * k / (tube_count - 1.0));
    const Indicator tubes = [&](const Point& p) {
        if (p[1] < 0 || p[1] > 1) return false;
        for (double u : dirs)
            if (std::fabs(p[0] - u * p[1]) <= delta) return true;
        return false;
    };
    const auto rep = minkowski_pipeline(tubes, delta, layers, 0.5, bounds);
    CHECK(rep.hypothesis_met);
    CHECK(rep.diffs >= 0.5 * tube_count);
    CHECK(!rep.contradiction); // the proposition holds for honest sets

    // Single tube: everything collapses to about one column.
    const Indicator one = [&](const Point& p) {
        return p[1] >= 0 && p[1] <= 1 && std::fabs(p[0] - 0.2 * p[1]) <= delta;
    };
    const auto rep_one = minkowski_pipeline(one, delta, layers, 0.5, bounds);
    CHECK(rep_one.hypothesis_met);
    CHECK(rep_one.sums <= 10);
    CHECK(rep_one.diffs <= 10);

    CHECK_THROWS_AS(minkowski_pipeline(full, delta, layers, 0.6, bounds), input_error);
}

#include <doctest.h>

#include <cmath>
#include <set>

#include "kakeya/covers.hpp"
#include "kakeya/settings.hpp"

using namespace kakeya;

namespace {

GroupSpec heisenberg(double eps = 0.5) {
    GroupSpec g(2, 1, eps);
    g.set_coeff(3, 1, 2, 0.5);
    return g;
}

} // namespace

TEST_CASE("cantor set dimensions") {
    CHECK(cantor_build(0.5, 4).dimension() == doctest::Approx(1.0));
    CHECK(cantor_build(0.25, 6).dimension() == doctest::Approx(0.5));
    CHECK(cantor_build(1.0 / 3.0, 6).dimension() == doctest::Approx(std::log(2) / std::log(3)));
    CHECK_THROWS_AS(cantor_build(0.6, 3), input_error);
    CHECK_THROWS_AS(cantor_build(0.25, 0), input_error);
}

TEST_CASE("cantor distance against brute force") {
    const auto set = cantor_build(0.25, 5);
    const auto intervals = cantor_intervals(set);
    CHECK(intervals.size() == 32);
    Rng rng(4);
    for (int t = 0; t < 2000; ++t) {
        const double x = rng.uniform(-0.2, 1.2);
        double brute = 1e100;
        for (auto [lo, hi] : intervals) {
            if (x < lo) brute = std::min(brute, lo - x);
            else if (x > hi) brute = std::min(brute, x - hi);
            else brute = 0;
        }
        CHECK(cantor_distance(set, x) == doctest::Approx(brute).epsilon(1e-12));
    }
}

TEST_CASE("cantor measure and parametrization") {
    const auto set = cantor_build(0.25, 6);
    CHECK(cantor_measure_interval(set, -1, 2) == doctest::Approx(1.0));
    CHECK(cantor_measure_interval(set, 0, 0.25) == doctest::Approx(0.5));
    CHECK(cantor_measure_interval(set, 0, 0.0625) == doctest::Approx(0.25));
    // Points from the parametrization land in the set.
    Rng rng(9);
    for (int t = 0; t < 500; ++t) {
        const double x = cantor_point(set, rng.next_double());
        CHECK(cantor_distance(set, x) <= 1e-12);
    }
}

TEST_CASE("cantor s-regularity of the natural measure") {
    // measure(B(x,r)) / r^s bounded within [1/C, C], C <= 8, across three
    // dyadic scales, for points of the set.
    const auto set = cantor_build(0.25, 8);
    const double s = set.dimension();
    Rng rng(21);
    for (int t = 0; t < 200; ++t) {
        const double x = cantor_point(set, rng.next_double());
        for (double r : {0.25, 0.0625, 0.015625}) {
            const double mass = cantor_measure_interval(set, x - r, x + r);
            const double ratio = mass / std::pow(r, s);
            CHECK(ratio >= 1.0 / 8.0);
            CHECK(ratio <= 8.0);
        }
    }
}

TEST_CASE("nominal exponents per setting") {
    const auto eu3 = Setting::euclidean_kakeya(3);
    auto e = eu3.nominal_exponents();
    CHECK(e.Q == 3); CHECK(e.S == 2); CHECK(e.T == 2); CHECK(e.theta == 0);

    const auto hom = Setting::homogeneous_kakeya(LayerSpec::create({2, 1}));
    e = hom.nominal_exponents();
    CHECK(e.Q == 4); CHECK(e.S == 2); CHECK(e.T == 2); CHECK(e.theta == 0);

    const auto ck = Setting::carnot_kakeya(heisenberg(), 1.0);
    e = ck.nominal_exponents();
    CHECK(e.Q == 4); CHECK(e.S == 2); CHECK(e.T == 2); CHECK(e.theta == 0);

    const auto fk = Setting::furstenberg_k(2, cantor_build(0.25, 6));
    e = fk.nominal_exponents();
    CHECK(e.Q == 2); CHECK(e.T == doctest::Approx(1.5));

    const auto free3 = Setting::carnot_lt(GroupSpec::free_step2(3), 1.0);
    e = free3.nominal_exponents();
    CHECK(e.Q == 9); CHECK(e.T == 7); // Q - 2 when m2 > 1
}

TEST_CASE("segment points") {
    // Euclidean: t = 1/2 is the midpoint a.
    const auto eu2 = Setting::euclidean_kakeya(2);
    const auto mid = eu2.segment_point({1, 0}, {0, 0}, 0.5);
    CHECK(mid == Point{0, 0});
    const auto end = eu2.segment_point({1, 0}, {0, 0}, 1.0);
    CHECK(end[0] == doctest::Approx(0.5));

    // Carnot LT: t = 0 lands exactly on a.
    const auto lt = Setting::carnot_lt(heisenberg(), 1.0);
    const std::vector<double> u{0.1, 0.0};
    const std::vector<double> a{1.0, 0.0, 0.0};
    const auto start = lt.segment_point(u, a, 0.0);
    for (int i = 0; i < 3; ++i) CHECK(start[i] == doctest::Approx(a[i]).epsilon(1e-15));
    // gamma(1): last coordinate a_n + t(1 + P(a1,u1)), P((1,0),(0.1,0)) = 0
    const auto g1 = lt.segment_point(u, a, 1.0);
    CHECK(g1[2] == doctest::Approx(1.0));
    // with u = (0.1, 0.3): P((1,0),(0.1,0.3)) = 0.5*(1*0.3 - 0*0.1) = 0.15
    const auto g2 = lt.segment_point({0.1, 0.3}, a, 1.0);
    CHECK(g2[2] == doctest::Approx(1.15));
}

TEST_CASE("central segment points are inside their tube") {
    std::vector<Setting> settings;
    settings.push_back(Setting::euclidean_kakeya(2));
    settings.push_back(Setting::euclidean_kakeya(3));
    settings.push_back(Setting::restricted_kakeya(2, cantor_build(0.25, 5)));
    settings.push_back(Setting::nikodym_hyperplane(3, 0.3, 2.0));
    settings.push_back(Setting::furstenberg_k(2, cantor_build(0.25, 6)));
    settings.push_back(Setting::homogeneous_kakeya(LayerSpec::create({2, 1})));
    settings.push_back(Setting::carnot_lt(heisenberg(), 1.0));
    settings.push_back(Setting::carnot_kakeya(heisenberg(), 1.0));

    Rng rng(2024);
    for (const auto& s : settings) {
        for (int trial = 0; trial < 40; ++trial) {
            const auto u = s.sample_direction(rng);
            const auto a = s.sample_param(rng);
            const double delta = std::min(0.9 * s.delta_max(), 0.05 * (1 + trial % 3));
            const auto tube = make_tube(s, u, a, delta);
            const auto widened = make_tube(s, u, a, delta, true);
            const auto [t0, t1] = s.t_range(u, false);
            for (int k = 0; k <= 8; ++k) {
                const auto p = s.segment_point(u, a, t0 + (t1 - t0) * k / 8.0);
                CAPTURE(s.summary());
                CHECK(tube_contains(tube, p));
                CHECK(tube_contains(widened, p));
            }
        }
    }
}

TEST_CASE("widened tube contains the narrow tube") {
    std::vector<Setting> settings;
    settings.push_back(Setting::euclidean_kakeya(2));
    settings.push_back(Setting::homogeneous_kakeya(LayerSpec::create({1, 1})));
    settings.push_back(Setting::carnot_lt(heisenberg(), 1.0));
    settings.push_back(Setting::furstenberg_k(2, cantor_build(0.25, 5)));
    Rng rng(55);
    for (const auto& s : settings) {
        for (int trial = 0; trial < 10; ++trial) {
            const auto u = s.sample_direction(rng);
            const auto a = s.sample_param(rng);
            const double delta = 0.04;
            const auto narrow = make_tube(s, u, a, delta);
            const auto wide = make_tube(s, u, a, delta, true);
            for (int k = 0; k < 200; ++k) {
                const auto p = sample_point_in_tube(narrow, rng);
                CAPTURE(s.summary());
                CHECK(tube_contains(wide, p));
            }
        }
    }
}

TEST_CASE("homogeneous tube membership matches euclidean tube with slab") {
    // Layers (1,1): d_{n-1} on the first coordinate is the absolute value, so
    // membership is the euclidean 2d tube constraint plus the x_n window.
    const auto s = Setting::homogeneous_kakeya(LayerSpec::create({1, 1}));
    Rng rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        const auto u = s.sample_direction(rng);
        const auto a = s.sample_param(rng);
        const double delta = 0.05;
        const auto tube = make_tube(s, u, a, delta);
        const auto [t0, t1] = s.t_range(u, false);
        for (int k = 0; k < 300; ++k) {
            Point p{a[0] + rng.uniform(-0.3, 0.3), a[1] + rng.uniform(-0.3, 1.3)};
            const double h = p[1] - a[1];
            const bool expect =
                h >= t0 && h <= t1 && std::fabs(p[0] - (a[0] + h * u[0])) <= delta;
            CHECK(tube_contains(tube, p) == expect);
        }
    }
}

TEST_CASE("nikodym segments start away from the base point") {
    const auto s = Setting::nikodym_hyperplane(3, 0.4, 2.0);
    Rng rng(8);
    for (int t = 0; t < 200; ++t) {
        const auto u = s.sample_direction(rng);
        const auto a = s.sample_param(rng);
        Point base(3, 0.0);
        base[0] = u[0];
        base[1] = u[1];
        const auto start = s.segment_point(u, a, 0.0);
        CHECK(dist_euclidean(start, base) > 0.25);
    }
    CHECK(s.delta_max() == doctest::Approx(1.0 / (16 * (1 + std::tan(0.4)))));
}

TEST_CASE("direction sampling is reproducible and lands in Y") {
    const auto eu = Setting::euclidean_kakeya(3);
    const auto one = eu.sample_directions(123, 1);
    const auto again = eu.sample_directions(123, 1);
    CHECK(one == again);
    const auto many = eu.sample_directions(7, 200);
    for (const auto& u : many)
        CHECK(norm_euclidean(u) == doctest::Approx(1.0).epsilon(1e-12));

    // Restricted directions live in the surviving arcs.
    const auto rk = Setting::restricted_kakeya(2, cantor_build(0.25, 6));
    const auto dirs = rk.sample_directions(11, 300);
    const auto set = cantor_build(0.25, 6);
    for (const auto& u : dirs) {
        const double phi = std::atan2(u[1], u[0]);
        CHECK(cantor_distance(set, phi / 1.0) <= 1e-9);
    }
}

TEST_CASE("tube cover centers bracket") {
    const auto s = Setting::carnot_lt(heisenberg(), 1.0);
    Rng rng(3);
    const auto u = s.sample_direction(rng);
    const auto a = s.sample_param(rng);
    const double delta = 1.0 / 16;
    const auto tube = make_tube(s, u, a, delta);
    const auto centers = tube_cover_centers(tube);
    const double n = double(centers.size());
    CHECK(n >= std::pow(delta, -2.0) / std::sqrt(2.0));
    CHECK(n <= 2 * std::pow(delta, -2.0));
    for (const auto& c : centers) CHECK(tube_contains(tube, c));

    const auto tube2 = make_tube(s, u, a, delta / 2);
    const double n2 = double(tube_cover_centers(tube2).size());
    CHECK(n2 >= 2 * n);       // quadruples within a factor 2
    CHECK(n2 <= 8 * n);

    const auto eu = Setting::euclidean_kakeya(2);
    const auto bad = make_tube(eu, {1, 0}, {0, 0}, 0.1);
    CHECK_THROWS_AS(tube_cover_centers(bad), input_error);
}

TEST_CASE("segment measure in balls") {
    const auto eu = Setting::euclidean_kakeya(2);
    const std::vector<double> u{1, 0};
    const std::vector<double> a{0, 0};
    // Ball of radius r centred at the midpoint cuts fraction 2r of the unit segment.
    const auto mid = eu.segment_point(u, a, 0.5);
    CHECK(eu.segment_measure_in_ball(u, a, mid, 0.1) == doctest::Approx(0.2).epsilon(1e-6));
    // Centred at an endpoint: fraction r.
    const auto end = eu.segment_point(u, a, 1.0);
    CHECK(eu.segment_measure_in_ball(u, a, end, 0.1) == doctest::Approx(0.1).epsilon(1e-6));

    // Furstenberg: Cantor mass of the cut interval.
    const auto fk = Setting::furstenberg_k(2, cantor_build(0.25, 7));
    const auto z = fk.segment_point(u, a, 0.0); // xi = 0, left end of the copy
    const double m = fk.segment_measure_in_ball(u, a, z, 0.25);
    CHECK(m == doctest::Approx(0.5).epsilon(1e-3)); // [0, 1/4] holds half the mass
}

TEST_CASE("param through places the segment on a point") {
    std::vector<Setting> settings;
    settings.push_back(Setting::euclidean_kakeya(3));
    settings.push_back(Setting::homogeneous_kakeya(LayerSpec::create({2, 1})));
    settings.push_back(Setting::carnot_lt(heisenberg(), 2.0));
    settings.push_back(Setting::carnot_kakeya(heisenberg(), 2.0));
    Rng rng(99);
    for (const auto& s : settings) {
        for (int t = 0; t < 30; ++t) {
            const auto u = s.sample_direction(rng);
            Point z(s.ambient_dim());
            for (auto& x : z) x = rng.uniform(-0.3, 0.3);
            const auto [t0, t1] = s.t_range(u, false);
            const double at = rng.uniform(t0 + 0.1 * (t1 - t0), t1 - 0.1 * (t1 - t0));
            const auto a = s.param_through(u, z, at);
            REQUIRE(a.has_value());
            const auto p = s.segment_point(u, *a, at);
            CAPTURE(s.summary());
            CHECK(dist_euclidean(p, z) < 1e-9);
        }
    }
}

TEST_CASE("direction grids are separated and inside the cap") {
    std::vector<Setting> settings;
    settings.push_back(Setting::euclidean_kakeya(3));
    settings.push_back(Setting::homogeneous_kakeya(LayerSpec::create({1, 2})));
    settings.push_back(Setting::carnot_kakeya(heisenberg(), 1.0));
    Rng rng(5);
    for (const auto& s : settings) {
        const auto center = s.sample_direction(rng);
        const double delta = 1.0 / 64;
        const double radius = 0.2;
        const auto grid = s.direction_grid(center, radius, delta, 4000);
        REQUIRE(grid.size() > 10);
        for (size_t i = 0; i < std::min<size_t>(grid.size(), 60); ++i) {
            CHECK(s.dist_Z(grid[i], center) <= radius + 1e-12);
            for (size_t j = i + 1; j < std::min<size_t>(grid.size(), 60); ++j)
                CHECK(s.dist_Z(grid[i], grid[j]) > delta);
        }
    }
}

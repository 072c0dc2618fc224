#include <doctest.h>

#include <cmath>

#include "kakeya/covers.hpp"
#include "kakeya/rng.hpp"

using namespace kakeya;

namespace {

const DistanceFn euclid = [](const std::vector<double>& a, const std::vector<double>& b) {
    return dist_euclidean(a, b);
};

} // namespace

TEST_CASE("greedy net basics") {
    CHECK_THROWS_AS(greedy_net({}, 0.1, euclid), input_error);
    const auto single = greedy_net({{0.3, 0.4}}, 0.1, euclid);
    CHECK(single.points.size() == 1);

    // Dense circle in angular order, geodesic metric, delta slightly under
    // pi/2: the greedy net picks four quarter points.
    std::vector<std::vector<double>> circle;
    for (int k = 0; k < 20000; ++k) circle.push_back({2 * M_PI * k / 20000.0});
    const DistanceFn geodesic = [](const std::vector<double>& a, const std::vector<double>& b) {
        double d = std::fabs(a[0] - b[0]);
        return std::min(d, 2 * M_PI - d);
    };
    const auto net = greedy_net(circle, M_PI / 2 - 1e-3, geodesic);
    CHECK(net.points.size() == 4);
}

TEST_CASE("greedy net separation and maximality on random clouds") {
    Rng rng(12);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<std::vector<double>> cloud;
        const int count = 200 + int(rng.uniform_index(200));
        for (int i = 0; i < count; ++i) cloud.push_back({rng.uniform(-1, 1), rng.uniform(-1, 1)});
        const double delta = rng.uniform(0.05, 0.5);
        const auto net = greedy_net(cloud, delta, euclid);
        for (size_t i = 0; i < net.points.size(); ++i)
            for (size_t j = i + 1; j < net.points.size(); ++j)
                CHECK(euclid(net.points[i], net.points[j]) > delta);
        for (const auto& cand : cloud) {
            double best = 1e100;
            for (const auto& kept : net.points) best = std::min(best, euclid(cand, kept));
            CHECK(best <= delta);
        }
    }
}

TEST_CASE("five r cover hand examples") {
    const DistanceFn line = [](const std::vector<double>& a, const std::vector<double>& b) {
        return std::fabs(a[0] - b[0]);
    };
    BallFamily one;
    one.balls = {{{0.0}, 1.0}};
    CHECK(five_r_cover(one, line) == std::vector<std::size_t>{0});

    BallFamily three;
    three.balls = {{{0.0}, 1.0}, {{1.5}, 1.0}, {{10.0}, 1.0}};
    CHECK(five_r_cover(three, line) == std::vector<std::size_t>{0, 2});

    BallFamily nested;
    nested.balls = {{{0.0}, 1.0}, {{0.1}, 0.5}};
    CHECK(five_r_cover(nested, line) == std::vector<std::size_t>{0});
}

TEST_CASE("five r cover disjointness and coverage on random families") {
    Rng rng(77);
    for (int trial = 0; trial < 1000; ++trial) {
        BallFamily family;
        const int count = 2 + int(rng.uniform_index(40));
        for (int i = 0; i < count; ++i)
            family.balls.push_back({{rng.uniform(-1, 1), rng.uniform(-1, 1)},
                                    rng.uniform(0.01, 0.4)});
        const auto sel = five_r_cover(family, euclid);
        // Pairwise disjoint: center distance exceeds the radius sum.
        for (size_t i = 0; i < sel.size(); ++i)
            for (size_t j = i + 1; j < sel.size(); ++j) {
                const auto& a = family.balls[sel[i]];
                const auto& b = family.balls[sel[j]];
                CHECK(euclid(a.first, b.first) > a.second + b.second);
            }
        // Every input ball sits inside the 5x dilate of some selected ball.
        for (const auto& [c, r] : family.balls) {
            bool covered = false;
            for (size_t k : sel) {
                const auto& [kc, kr] = family.balls[k];
                if (euclid(c, kc) + r <= 5 * kr) {
                    covered = true;
                    break;
                }
            }
            CHECK(covered);
        }
    }
}

TEST_CASE("grid cover counts") {
    const Indicator empty = [](const Point&) { return false; };
    const Box unit = Box::cube(2, 0.0, 1.0);
    CHECK(grid_cover_count(empty, unit, 0.125, MetricKind::Euclidean) == 0);

    const Indicator inside = [](const Point& p) {
        return p[0] >= 0 && p[0] <= 1 && p[1] >= 0 && p[1] <= 1;
    };
    CHECK(grid_cover_count(inside, unit, 0.125, MetricKind::Euclidean) == 64);

    // Unit x_n-segment under layers (1,1): cells delta x delta^2, so the
    // count scales like delta^{-2} along the fiber.
    const auto spec = LayerSpec::create({1, 1});
    const Indicator segment = [](const Point& p) {
        return std::fabs(p[0]) <= 1e-12 && p[1] >= 0 && p[1] <= 1;
    };
    Box seg_box;
    seg_box.lo = {-1.0 / 64, 0.0};
    seg_box.hi = {1.0 / 64, 1.0};
    const double delta = 1.0 / 32;
    const auto count = grid_cover_count(segment, seg_box, delta, MetricKind::Homogeneous, &spec);
    CHECK(double(count) >= 0.5 * std::pow(delta, -2.0));
    CHECK(double(count) <= 2.0 * std::pow(delta, -2.0));

    CHECK_THROWS_AS(grid_cover_count(empty, Box::cube(3, 0, 1), 1e-6, MetricKind::Euclidean, nullptr, 1000),
                    resource_error);
}

TEST_CASE("mc volume basics") {
    const Box unit = Box::cube(3, 0.0, 1.0);
    const Indicator always = [](const Point&) { return true; };
    const auto full = mc_volume(always, unit, 5000, 7);
    CHECK(full.estimate == doctest::Approx(1.0));
    CHECK(full.std_error == 0.0);

    const Indicator half = [](const Point& p) { return p[0] < 0.5; };
    const auto h = mc_volume(half, unit, 200000, 11);
    CHECK(std::fabs(h.estimate - 0.5) <= 3 * h.std_error + 1e-9);

    CHECK_THROWS_AS(mc_volume(always, unit, 10, 1), input_error);
    Box degenerate;
    degenerate.lo = {0, 0};
    degenerate.hi = {1, 0};
    CHECK_THROWS_AS(mc_volume(always, degenerate, 1000, 1), input_error);
}

TEST_CASE("mc volume of homogeneous balls matches the exact box volume") {
    for (const auto& layers : {std::vector<int>{1, 2}, std::vector<int>{2, 1}}) {
        const auto spec = LayerSpec::create(layers);
        for (double r : {0.25, 0.5}) {
            Box bounds;
            bounds.lo.assign(spec.n, 0.0);
            bounds.hi.assign(spec.n, 0.0);
            for (int i = 0; i < spec.n; ++i) {
                const double rj = std::pow(r, spec.expo[i]);
                bounds.lo[i] = -1.1 * rj;
                bounds.hi[i] = 1.1 * rj;
            }
            const Point center(spec.n, 0.0);
            const Indicator ball = [&](const Point& p) {
                return ball_contains(center, r, p, MetricKind::Homogeneous, &spec);
            };
            const auto est = mc_volume(ball, bounds, 200000, 99);
            const double exact = ball_volume_homogeneous(r, spec);
            CHECK(std::fabs(est.estimate - exact) <= 3 * est.std_error);
        }
    }
}

TEST_CASE("mc volume is deterministic and worker-count independent") {
    const Box unit = Box::cube(2, 0.0, 1.0);
    const Indicator disc = [](const Point& p) {
        return (p[0] - 0.5) * (p[0] - 0.5) + (p[1] - 0.5) * (p[1] - 0.5) < 0.2;
    };
    const auto a = mc_volume(disc, unit, 300000, 42, 1);
    const auto b = mc_volume(disc, unit, 300000, 42, 4);
    const auto c = mc_volume(disc, unit, 300000, 42, 1);
    CHECK(a.hits == b.hits);
    CHECK(a.hits == c.hits);
    CHECK(a.estimate == b.estimate);
}

TEST_CASE("mc volume monotone under indicator implication") {
    const Box unit = Box::cube(2, -1.0, 1.0);
    const Indicator small = [](const Point& p) { return norm_euclidean(p) < 0.5; };
    const Indicator big = [](const Point& p) { return norm_euclidean(p) < 0.8; };
    const auto s = mc_volume(small, unit, 100000, 5);
    const auto b = mc_volume(big, unit, 100000, 5);
    const double pooled = std::sqrt(s.std_error * s.std_error + b.std_error * b.std_error);
    CHECK(s.estimate <= b.estimate + 3 * pooled);
}

TEST_CASE("tube volume scales like delta^T") {
    const auto s = Setting::euclidean_kakeya(2);
    Rng rng(3);
    const auto u = s.sample_direction(rng);
    const auto a = s.sample_param(rng);
    const auto v1 = tube_volume(make_tube(s, u, a, 0.04), 100000, 17);
    const auto v2 = tube_volume(make_tube(s, u, a, 0.02), 100000, 18);
    // area ~ 2*delta for a unit segment, plus end caps
    CHECK(v1.estimate == doctest::Approx(0.08).epsilon(0.15));
    CHECK(v1.estimate / v2.estimate == doctest::Approx(2.0).epsilon(0.1));
}

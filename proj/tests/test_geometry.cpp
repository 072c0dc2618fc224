#include <doctest.h>

#include <cmath>

#include "kakeya/geometry.hpp"
#include "kakeya/rng.hpp"

using namespace kakeya;

TEST_CASE("layer spec derived quantities") {
    const auto spec = LayerSpec::create({1, 2});
    CHECK(spec.n == 3);
    CHECK(spec.Q == 5);
    CHECK(spec.s == 2);
    CHECK(spec.expo == std::vector<int>{1, 2, 2});

    // m_j = 0 layers are kept but contribute nothing.
    const auto gap = LayerSpec::create({2, 0, 1});
    CHECK(gap.n == 3);
    CHECK(gap.Q == 2 + 3);
    CHECK(gap.expo == std::vector<int>{1, 1, 3});

    CHECK_THROWS_AS(LayerSpec::create({}), input_error);
    CHECK_THROWS_AS(LayerSpec::create({2, 0}), input_error);
    CHECK_THROWS_AS(LayerSpec::create({-1, 2}), input_error);
    CHECK_THROWS_AS(LayerSpec::create({1, 0, 0, 0}), input_error); // n = 1
}

TEST_CASE("homogeneous distance hand values") {
    const auto spec = LayerSpec::create({1, 2});
    const Point zero{0, 0, 0};
    CHECK(dist_homogeneous(zero, zero, spec) == 0.0);
    // max{0.04, sqrt(0.09), sqrt(0.25)} = 0.5
    CHECK(dist_homogeneous(zero, {0.04, 0.09, 0.25}, spec) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK_THROWS_AS(dist_homogeneous({0, 0}, {0, 0, 0}, spec), input_error);
}

TEST_CASE("homogeneous metric axioms and dilation covariance") {
    const auto spec = LayerSpec::create({2, 1});
    Rng rng(42);
    for (int trial = 0; trial < 100; ++trial) {
        Point p(3), q(3), w(3);
        for (int i = 0; i < 3; ++i) {
            p[i] = rng.uniform(-1, 1);
            q[i] = rng.uniform(-1, 1);
            w[i] = rng.uniform(-1, 1);
        }
        const double dpq = dist_homogeneous(p, q, spec);
        CHECK(dist_homogeneous(q, p, spec) == doctest::Approx(dpq).epsilon(1e-12));
        CHECK(dist_homogeneous(p, q, spec) + dist_homogeneous(q, w, spec) >=
              dist_homogeneous(p, w, spec) - 1e-9);
        CHECK(dist_homogeneous(p, p, spec) == 0.0);

        const double lambda = rng.uniform(0.1, 3.0);
        const double scaled =
            dist_homogeneous(dilate(p, lambda, spec), dilate(q, lambda, spec), spec);
        CHECK(scaled == doctest::Approx(lambda * dpq).epsilon(1e-9));
    }
}

TEST_CASE("dilation hand value and round trip") {
    const auto spec = LayerSpec::create({1, 2});
    const Point p{1, 1, 1};
    const auto doubled = dilate(p, 2.0, spec);
    CHECK(doubled == Point{2, 4, 4});
    CHECK(dilate(p, 1.0, spec) == p);

    Rng rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        Point q{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
        const double lambda = rng.uniform(0.2, 4.0);
        const auto back = dilate(dilate(q, lambda, spec), 1.0 / lambda, spec);
        for (int i = 0; i < 3; ++i) CHECK(back[i] == doctest::Approx(q[i]).epsilon(1e-12));
    }
    CHECK_THROWS_AS(dilate(p, 0.0, spec), input_error);
    CHECK_THROWS_AS(dilate(p, -1.0, spec), input_error);
}

TEST_CASE("single layer reduces to sup norm") {
    const auto spec = LayerSpec::create({3});
    Rng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        Point p{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
        Point q{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
        double sup = 0;
        for (int i = 0; i < 3; ++i) sup = std::max(sup, std::fabs(p[i] - q[i]));
        CHECK(dist_homogeneous(p, q, spec) == doctest::Approx(sup).epsilon(1e-12));
    }
}

TEST_CASE("euclidean distance basics") {
    CHECK(dist_euclidean({0, 0}, {3, 4}) == doctest::Approx(5.0));
    CHECK(dist_euclidean({1, 2}, {1, 2}) == 0.0);
    CHECK_THROWS_AS(dist_euclidean({1}, {1, 2}), input_error);

    Rng rng(11);
    for (int trial = 0; trial < 10000; ++trial) {
        Point p{rng.uniform(-1, 1), rng.uniform(-1, 1)};
        Point q{rng.uniform(-1, 1), rng.uniform(-1, 1)};
        Point w{rng.uniform(-1, 1), rng.uniform(-1, 1)};
        CHECK(dist_euclidean(p, q) + dist_euclidean(q, w) >= dist_euclidean(p, w) - 1e-9);
    }
}

TEST_CASE("homogeneous ball membership and exact volume") {
    const auto spec = LayerSpec::create({1, 2});
    const Point zero{0, 0, 0};
    CHECK(ball_contains(zero, 0.5, zero, MetricKind::Homogeneous, &spec));
    // 0.4 <= 0.5, 0.2 <= 0.25
    CHECK(ball_contains(zero, 0.5, {0.4, 0.2, 0.2}, MetricKind::Homogeneous, &spec));
    CHECK(!ball_contains(zero, 0.5, {0.6, 0.0, 0.0}, MetricKind::Homogeneous, &spec));
    CHECK(!ball_contains(zero, 0.5, {0.0, 0.3, 0.0}, MetricKind::Homogeneous, &spec));

    // Exact product formula: prod_j (2 r^j)^{m_j} = 2^n r^Q. The volume of a
    // d-ball scales exactly like r^Q.
    for (double r : {0.25, 0.5, 1.0, 1.7}) {
        double expected = 1.0;
        for (int j = 0; j < spec.s; ++j)
            expected *= std::pow(2.0 * std::pow(r, j + 1), spec.m[j]);
        CHECK(ball_volume_homogeneous(r, spec) == doctest::Approx(expected).epsilon(1e-12));
    }
    CHECK(ball_volume_homogeneous(2.0, spec) / ball_volume_homogeneous(1.0, spec) ==
          doctest::Approx(std::pow(2.0, spec.Q)).epsilon(1e-12));
}

TEST_CASE("segment distances") {
    CHECK(dist_point_segment({0, 1}, {-1, 0}, {1, 0}) == doctest::Approx(1.0));
    CHECK(dist_point_segment({2, 0}, {-1, 0}, {1, 0}) == doctest::Approx(1.0));
    CHECK(dist_segment_segment({0, 0}, {1, 0}, {0, 1}, {1, 1}) == doctest::Approx(1.0));
    // Crossing segments touch.
    CHECK(dist_segment_segment({-1, -1}, {1, 1}, {-1, 1}, {1, -1}) ==
          doctest::Approx(0.0).epsilon(1e-12));
}

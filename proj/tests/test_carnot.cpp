#include <doctest.h>

#include <cmath>

#include "kakeya/carnot.hpp"
#include "kakeya/rng.hpp"

using namespace kakeya;

namespace {

GroupSpec heisenberg(double eps = 0.5) {
    GroupSpec g(2, 1, eps);
    g.set_coeff(3, 1, 2, 0.5);
    return g;
}

Point random_point(Rng& rng, int n, double scale = 1.0) {
    Point p(n);
    for (int i = 0; i < n; ++i) p[i] = rng.uniform(-scale, scale);
    return p;
}

} // namespace

TEST_CASE("heisenberg product hand value") {
    const auto g = heisenberg();
    const auto prod = group_mul({1, 0, 0}, {0, 1, 0}, g);
    CHECK(prod[0] == doctest::Approx(1.0));
    CHECK(prod[1] == doctest::Approx(1.0));
    CHECK(prod[2] == doctest::Approx(0.5));

    // Identity on both sides.
    Rng rng(1);
    for (int t = 0; t < 100; ++t) {
        const auto p = random_point(rng, 3);
        const Point zero{0, 0, 0};
        CHECK(group_mul(p, zero, g) == p);
        CHECK(group_mul(zero, p, g) == p);
    }
}

TEST_CASE("group inverse") {
    const auto g = heisenberg();
    const Point p{1, 1, 0.5};
    const auto inv = group_inv(p, g);
    CHECK(inv == Point{-1, -1, -0.5});
    const auto prod = group_mul(p, inv, g);
    for (double c : prod) CHECK(c == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(group_inv(group_inv(p, g), g) == p);
    CHECK(group_inv(Point{0, 0, 0}, g) == Point{0, 0, 0});
}

TEST_CASE("group laws on random triples") {
    for (const auto& g : {heisenberg(), GroupSpec::free_step2(3)}) {
        Rng rng(99);
        const int n = g.n();
        for (int t = 0; t < 10000; ++t) {
            const auto p = random_point(rng, n);
            const auto q = random_point(rng, n);
            const auto w = random_point(rng, n);
            const auto left = group_mul(group_mul(p, q, g), w, g);
            const auto right = group_mul(p, group_mul(q, w, g), g);
            for (int i = 0; i < n; ++i) CHECK(left[i] == doctest::Approx(right[i]).epsilon(1e-9));
            const auto e = group_mul(p, group_inv(p, g), g);
            for (int i = 0; i < n; ++i) CHECK(std::fabs(e[i]) < 1e-9);
        }
    }
}

TEST_CASE("P antisymmetry") {
    const auto g = GroupSpec::free_step2(3);
    Rng rng(5);
    for (int t = 0; t < 1000; ++t) {
        const auto p = random_point(rng, g.n());
        const auto q = random_point(rng, g.n());
        const auto pq = group_p(g, p, q);
        const auto qp = group_p(g, q, p);
        const auto pp = group_p(g, p, p);
        for (int i = 0; i < g.m2; ++i) {
            CHECK(pq[i] == doctest::Approx(-qp[i]).epsilon(1e-12));
            CHECK(pp[i] == 0.0);
        }
    }
}

TEST_CASE("d_infty values and invariances") {
    const auto g = heisenberg();
    CHECK(d_infty({3, 4, 0}, {0, 0, 0}, g) == doctest::Approx(5.0));
    CHECK(d_infty({1, 2, 0.3}, {1, 2, 0.3}, g) == 0.0);

    Rng rng(17);
    for (int t = 0; t < 10000; ++t) {
        const auto a = random_point(rng, 3);
        const auto p = random_point(rng, 3);
        const auto q = random_point(rng, 3);
        const double base = d_infty(p, q, g);
        const double translated = d_infty(group_mul(a, p, g), group_mul(a, q, g), g);
        CHECK(translated == doctest::Approx(base).epsilon(1e-9));
    }
}

TEST_CASE("d_infty homogeneity under dilations") {
    const auto g = heisenberg();
    const auto spec = LayerSpec::create({2, 1});
    Rng rng(23);
    for (int t = 0; t < 1000; ++t) {
        const auto p = random_point(rng, 3);
        const auto q = random_point(rng, 3);
        const double lambda = rng.uniform(0.1, 3.0);
        const double scaled = d_infty(dilate(p, lambda, spec), dilate(q, lambda, spec), g);
        CHECK(scaled == doctest::Approx(lambda * d_infty(p, q, g)).epsilon(1e-9));
    }
}

TEST_CASE("coefficient condition scan") {
    // Free step-2 group on 3 generators: first qualifying triple is (1,2,4).
    const auto free3 = GroupSpec::free_step2(3);
    const auto found = check_condition(free3);
    REQUIRE(found.has_value());
    CHECK((*found)[0] == 1);
    CHECK((*found)[1] == 2);
    CHECK((*found)[2] == 4);

    GroupSpec zero(3, 2);
    CHECK(!check_condition(zero).has_value());

    GroupSpec lastonly(3, 2);
    lastonly.set_coeff(zero.n(), 1, 2, 1.0); // only b^n_{1,2} nonzero
    CHECK(!check_condition(lastonly).has_value());

    CHECK_THROWS_AS(check_condition(heisenberg()), input_error);
}

TEST_CASE("horizontal angle") {
    const auto g = heisenberg();
    CHECK(horizontal_angle({0, 0, 0}, g) == doctest::Approx(0.0));
    // q1 = (2,0): |Bq1| = 1, angle = pi/4.
    CHECK(horizontal_angle({2, 0, 0}, g) == doctest::Approx(M_PI / 4).epsilon(1e-12));

    const double R = 1.5;
    const auto constants = compute_constants(g, R, CarnotCase::LT);
    // Lemma bound with the structure constant at R itself.
    const double theta_at_R = std::acos(1.0 / std::sqrt(1.0 + constants.C_Rn * constants.C_Rn));
    Rng rng(31);
    for (int t = 0; t < 1000; ++t) {
        const auto q = rng.in_ball(3, R);
        CHECK(horizontal_angle(q, g) <= theta_at_R + 1e-12);
    }
}

TEST_CASE("structure constants") {
    const auto g = heisenberg();
    const auto k = compute_constants(g, 1.0, CarnotCase::LT);
    // R * sqrt(m2 * m1 * (m1-1) * max b^2) = sqrt(1 * 2 * 1 * 1/4) = sqrt(1/2)
    CHECK(k.C_Rn == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
    CHECK(k.theta_bar_Rn > k.theta_Rn);
    CHECK(k.c_sandwich > 0);

    // r_R satisfies the strict bound of its case for random coefficient tables.
    Rng rng(77);
    for (int trial = 0; trial < 100; ++trial) {
        const int m1 = 2 + int(rng.uniform_index(3));
        const bool lt = trial % 2 == 0;
        GroupSpec spec(m1, 1);
        for (int l = 1; l <= m1; ++l)
            for (int i = l + 1; i <= m1; ++i) spec.set_coeff(m1 + 1, l, i, rng.uniform(-1, 1));
        const double R = rng.uniform(0.5, 2.0);
        const auto c = compute_constants(spec, R, lt ? CarnotCase::LT : CarnotCase::Classical);
        const double C = c.C_Rn;
        if (lt) {
            CHECK(c.r_R < std::min(1.0, C > 0 ? 1.0 / (2 * C) : 1.0));
            CHECK(c.r_R < std::sqrt(1 + C * C) - C);
        } else {
            CHECK(c.r_R < 1.0 / std::sqrt(1 + C * C));
        }
        CHECK(c.theta_bar_Rn > c.theta_Rn);
    }
}

TEST_CASE("euclidean sandwich of d_infty on a bounded ball") {
    const auto g = heisenberg();
    const double R = 1.0;
    Rng rng(13);
    double max_lower = 0, max_upper = 0;
    for (int t = 0; t < 10000; ++t) {
        const auto p = rng.in_ball(3, R);
        const auto q = rng.in_ball(3, R);
        const double de = dist_euclidean(p, q);
        const double di = d_infty(p, q, g);
        if (di > 0) max_lower = std::max(max_lower, de / di);
        if (de > 0) max_upper = std::max(max_upper, di / std::sqrt(de));
    }
    // Lemma guarantees a finite C_R with d_E/C <= d_infty <= C sqrt(d_E);
    // record the measured constant and sanity-check it is finite and modest.
    const double measured_C = std::max(max_lower, max_upper);
    CHECK(measured_C < 50.0);
    CHECK(measured_C > 0.0);
}

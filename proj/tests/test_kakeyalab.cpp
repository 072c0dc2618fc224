#include <doctest.h>

#include <cmath>
#include <set>

#include "kakeya/kakeyalab.hpp"

using namespace kakeya;

namespace {

GroupSpec heisenberg(double eps = 0.5) {
    GroupSpec g(2, 1, eps);
    g.set_coeff(3, 1, 2, 0.5);
    return g;
}

} // namespace

TEST_CASE("maximal function basics") {
    const auto s = Setting::euclidean_kakeya(2);
    const Box box = Box::cube(2, -1.5, 1.5);
    const double delta = 1.0 / 16;

    // f = 0 everywhere.
    const auto zeros = GridField::from_indicator([](const Point&) { return false; }, box, {64, 64});
    const auto u = std::vector<double>{1.0, 0.0};
    CHECK(maximal_function(s, zeros, delta, u, 32, 5) == 0.0);

    // f = indicator of one tube: value close to 1 at that direction (the
    // sup includes the generating parameter region).
    const auto tube = make_tube(s, u, {0.0, 0.0}, delta);
    const auto field = GridField::from_indicator(
        [&](const Point& p) { return tube_contains(tube, p); }, box, {96, 96});
    const double v = maximal_function(s, field, delta, u, 64, 5);
    CHECK(v >= 0.9);
    CHECK(v <= field.max_value() + 1e-12);

    // Ball indicator: never exceeds max f, and matches a direct mc check of
    // the density on the best sampled tube within tolerance.
    const auto ball = GridField::from_indicator(
        [](const Point& p) { return norm_euclidean(p) <= 0.4; }, box, {96, 96});
    const double vb = maximal_function(s, ball, delta, u, 48, 7);
    CHECK(vb <= 1.0 + 1e-12);
    CHECK(vb >= 0.3); // a tube through the ball center carries density ~min(1, measure ratio)
}

TEST_CASE("weak type check rows") {
    const auto s = Setting::euclidean_kakeya(2);
    const Box box = Box::cube(2, -1.2, 1.2);
    const double delta = 1.0 / 32;

    // Empty E: lhs = 0 for every lambda.
    const auto empty_rep = weak_type_check(
        s, [](const Point&) { return false; }, box, delta, {0.1, 0.5, 1.0}, 3, 500, 32, 2000);
    for (const auto& row : empty_rep.rows) CHECK(row.lhs == 0.0);

    // One tube: finite C recorded.
    const auto tube = make_tube(s, {1.0, 0.0}, {0.0, 0.0}, delta);
    const auto rep = weak_type_check(
        s, [&](const Point& p) { return tube_contains(tube, p); }, box, delta,
        {0.25, 0.5, 0.75}, 3, 800, 32, 2000);
    CHECK(rep.C_max > 0);
    CHECK(std::isfinite(rep.C_max));
}

TEST_CASE("lp norm over nets") {
    CHECK(lp_norm_net({0, 0, 0}, 2.0, 0.1, 1.0) == 0.0);
    // Single value v over one net point: delta^{S/p} v.
    const double v = 3.0;
    CHECK(lp_norm_net({v}, 2.0, 0.25, 1.0) == doctest::Approx(std::sqrt(0.25) * v));
    // Constant field over m ~ delta^{-S} points: norm ~ v.
    const double delta = 1.0 / 64;
    const int m = 64; // delta^{-S} with S = 1
    std::vector<double> values(m, v);
    const double norm = lp_norm_net(values, 2.0, delta, 1.0);
    CHECK(norm >= 0.5 * v);
    CHECK(norm <= 2.0 * v);
}

TEST_CASE("bush extraction: tubes through the origin") {
    const auto s = Setting::euclidean_kakeya(2);
    const double delta = 1.0 / 64;
    std::vector<Tube> tubes;
    for (int k = 0; k < 5; ++k) {
        const double phi = 0.2 + 0.5 * k;
        tubes.push_back(make_tube(s, {std::cos(phi), std::sin(phi)}, {0.0, 0.0}, delta));
    }
    const auto any_tube = [&](const Point& p) {
        for (const auto& t : tubes)
            if (tube_contains(t, p)) return true;
        return false;
    };
    const auto cert = extract_bush(s, tubes, any_tube, 0.5, 11, 8000, 128);
    CHECK(cert.multiplicity == 5);
    CHECK(norm_euclidean(cert.x0) <= 3 * delta);
    CHECK(cert.dropped == 0);
    CHECK(!cert.selected.empty());
}

TEST_CASE("bush extraction: disjoint tubes have multiplicity 1") {
    const auto s = Setting::euclidean_kakeya(2);
    const double delta = 1.0 / 64;
    std::vector<Tube> tubes;
    tubes.push_back(make_tube(s, {1.0, 0.0}, {0.0, 0.0}, delta));
    tubes.push_back(make_tube(s, {1.0, 0.0}, {0.0, 0.5}, delta));
    const auto any_tube = [&](const Point& p) {
        for (const auto& t : tubes)
            if (tube_contains(t, p)) return true;
        return false;
    };
    const auto cert = extract_bush(s, tubes, any_tube, 0.5, 13, 4000, 64);
    CHECK(cert.multiplicity == 1);
    CHECK(cert.selected.size() == 1);
    CHECK(cert.shared_hits == 0);
}

TEST_CASE("hairbrush extraction and dyadic labels") {
    const auto s = Setting::euclidean_kakeya(2);
    const double delta = 1.0 / 64;
    // A bush at the origin plus two parallel outliers far away.
    std::vector<Tube> tubes;
    for (int k = 0; k < 6; ++k) {
        const double phi = 0.15 + 0.4 * k;
        tubes.push_back(make_tube(s, {std::cos(phi), std::sin(phi)}, {0.0, 0.0}, delta, true));
    }
    tubes.push_back(make_tube(s, {0.0, 1.0}, {30.0, 0.0}, delta, true));
    tubes.push_back(make_tube(s, {0.0, 1.0}, {40.0, 0.0}, delta, true));

    const auto brush = extract_hairbrush(s, tubes, 3);
    CHECK(brush.anchor < 6);
    CHECK(brush.members.size() == 5); // the other bush tubes

    // Brute-force pairwise intersection oracle: member tubes all meet the anchor.
    for (std::size_t m : brush.members) {
        CHECK(m < 6);
        CHECK(tubes_intersect(tubes[brush.anchor], tubes[m]));
    }

    // Every member has exactly one k-label, and given j exactly one (l, m).
    CHECK(brush.k_label.size() == brush.members.size());
    const auto labels = brush.lm_labels(0);
    CHECK(labels.size() == brush.members.size());
    int assigned = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (i == 0) continue;
        if (labels[i][0] >= 0) ++assigned;
    }
    CHECK(assigned == int(labels.size()) - 1);

    // Two parallel disjoint tubes: empty brush.
    std::vector<Tube> parallel;
    parallel.push_back(make_tube(s, {1.0, 0.0}, {0.0, 0.0}, delta, true));
    parallel.push_back(make_tube(s, {1.0, 0.0}, {0.0, 1.0}, delta, true));
    const auto none = extract_hairbrush(s, parallel, 3);
    CHECK(none.members.empty());
}

TEST_CASE("box dimension estimates") {
    // Unit square, euclidean.
    const Indicator square = [](const Point& p) {
        return p[0] >= 0 && p[0] <= 1 && p[1] >= 0 && p[1] <= 1;
    };
    const auto sq = box_dimension(square, Box::cube(2, 0, 1), MetricKind::Euclidean, nullptr,
                                  {1.0 / 8, 1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128});
    CHECK(sq.exponent == doctest::Approx(2.0).epsilon(0.05));

    // Unit x_n-segment under layers (1,1): dimension s = 2.
    const auto spec = LayerSpec::create({1, 1});
    const Indicator segment = [](const Point& p) {
        return std::fabs(p[0]) <= 1e-12 && p[1] >= 0 && p[1] <= 1;
    };
    Box seg_box;
    seg_box.lo = {-1.0 / 8, 0.0};
    seg_box.hi = {1.0 / 8, 1.0};
    const auto sg = box_dimension(segment, seg_box, MetricKind::Homogeneous, &spec,
                                  {1.0 / 4, 1.0 / 8, 1.0 / 16, 1.0 / 32});
    CHECK(sg.exponent == doctest::Approx(2.0).epsilon(0.1));

    // Cantor set ratio 1/4: dimension 1/2.
    const auto cantor = cantor_build(0.25, 8);
    const Indicator cset = [&](const Point& p) {
        return p[0] >= 0 && p[0] <= 1 && cantor_distance(cantor, p[0]) <= 1e-12;
    };
    Box cbox;
    cbox.lo = {0.0};
    cbox.hi = {1.0};
    const auto cd = box_dimension(cset, cbox, MetricKind::Euclidean, nullptr,
                                  {std::pow(0.25, 2), std::pow(0.25, 3), std::pow(0.25, 4),
                                   std::pow(0.25, 5)});
    CHECK(cd.exponent == doctest::Approx(0.5).epsilon(0.2));

    // Homogeneous unit ball: dimension Q.
    const auto lspec = LayerSpec::create({1, 2});
    const Point zero{0, 0, 0};
    const Indicator ball = [&](const Point& p) {
        return ball_contains(zero, 1.0, p, MetricKind::Homogeneous, &lspec);
    };
    Box bbox;
    bbox.lo = {-1.0, -1.0, -1.0};
    bbox.hi = {1.0, 1.0, 1.0};
    const auto bd = box_dimension(ball, bbox, MetricKind::Homogeneous, &lspec,
                                  {1.0 / 4, std::pow(2.0, -2.5), 1.0 / 8, std::pow(2.0, -3.5),
                                   1.0 / 16});
    CHECK(bd.exponent == doctest::Approx(double(lspec.Q)).epsilon(0.15 / lspec.Q));
}

TEST_CASE("perron construction") {
    const auto two = perron_construction(1);
    CHECK(two.size() == 2);

    // Union area strictly decreases for depths 2..8.
    double prev = triangle_union_area(perron_construction(2), 2048);
    for (int depth = 3; depth <= 8; ++depth) {
        const double area = triangle_union_area(perron_construction(depth), 2048);
        CAPTURE(depth);
        CHECK(area < prev);
        prev = area;
    }

    // Direction coverage at the sampled resolution.
    for (int depth : {2, 5, 8}) {
        const double coverage = perron_direction_coverage(perron_construction(depth));
        CHECK(coverage >= 0.95);
    }
}

TEST_CASE("product LT-Kakeya sets") {
    const auto g = heisenberg();
    const auto lt = Setting::carnot_lt(g, 1.0);

    // Full planar ball: the product is the full box, trivially covered.
    const Indicator full = [](const Point& p) { return norm_euclidean(p) <= 2.0; };
    const auto full_product = product_lt_kakeya(full, g, 1.0);
    CHECK(full_product({0.1, 0.2, 0.3}));
    CHECK(!full_product({0.1, 0.2, 1.5})); // outside the window

    // Window height scales the measure linearly (Fubini).
    Box pbox;
    pbox.lo = {-2.2, -2.2, -2.0};
    pbox.hi = {2.2, 2.2, 2.0};
    const auto v1 = mc_volume(product_lt_kakeya(full, g, 0.5), pbox, 200000, 3);
    const auto v2 = mc_volume(product_lt_kakeya(full, g, 1.0), pbox, 200000, 3);
    CHECK(v2.estimate / v1.estimate == doctest::Approx(2.0).epsilon(0.05));

    // Perron-union product contains left-translated segments in most
    // directions of the covered sector.
    const auto triangles = perron_construction(8);
    const Indicator planar = [&](const Point& p) {
        for (const auto& t : triangles)
            if (t.contains(p[0], p[1])) return true;
        return false;
    };
    const auto product = product_lt_kakeya(planar, g, 1.5);
    const double coverage = product_segment_coverage(product, lt, triangles, 40, 1.0 / 64);
    CHECK(coverage >= 0.9);
}

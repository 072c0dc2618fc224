#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "kakeya/axiomlab.hpp"
#include "kakeya/covers.hpp"
#include "kakeya/regression.hpp"
#include "kakeya/settings.hpp"

namespace kakeya {

// Dense scalar field on a box grid; carries the f of the maximal function.
struct GridField {
    Box bounds;
    std::vector<int> resolution; // cells per axis
    std::vector<double> values;  // row-major, axis 0 fastest

    double at(const Point& p) const; // nearest-cell value, 0 outside
    double max_value() const;

    static GridField from_indicator(const Indicator& f, Box bounds,
                                    std::vector<int> resolution);
};

// Kakeya maximal function with width delta at direction u: sup over sampled
// parameters of the tube average of f, with one +-delta jitter refinement
// pass around the best parameter.
double maximal_function(const Setting& setting, const GridField& f, double delta,
                        const std::vector<double>& u, int param_samples, std::uint64_t seed,
                        long long mc_samples = 4000);

struct WeakTypeRow {
    double delta = 0;
    double lambda = 0;
    double lhs = 0; // net-weighted nu{u : maximal > lambda}
    double rhs = 0; // lambda^{-(S+2)/2} delta^{S/2-T} mu(E)
    double C = 0;
};

struct WeakTypeReport {
    std::vector<WeakTypeRow> rows;
    double C_max = 0;
    double mu_E = 0;
    std::size_t net_size = 0;
};

WeakTypeReport weak_type_check(const Setting& setting, const Indicator& E, const Box& e_bounds,
                               double delta, const std::vector<double>& lambda_grid,
                               std::uint64_t seed, int net_candidates = 4000,
                               int param_samples = 48, long long mc_samples = 4000);

// Discretized L^p(nu) norm over a net: (sum_j delta^S v_j^p)^{1/p}.
double lp_norm_net(const std::vector<double>& values, double p, double delta, double S);

struct BushCertificate {
    Point x0;
    int multiplicity = 0;              // M
    std::vector<std::size_t> selected; // the L separated tubes
    double lambda = 0;
    double mu_E = 0;
    double separation_radius = 0; // b*delta/(c*lambda) in direction space
    double c_constant = 0;        // min{c1/(4 c2), b}
    double bound_bush = 0;        // N M^{-1} lambda delta^T
    double bound_separated = 0;   // M lambda^{S+1} delta^T
    double constant_bush = 0;     // bound_bush / mu_E
    double constant_separated = 0;
    long long shared_hits = 0; // shared sample hits outside B(x0, c lambda)
    int dropped = 0;           // tubes failing the density precondition
};

BushCertificate extract_bush(const Setting& setting, const std::vector<Tube>& tubes,
                             const Indicator& E, double lambda, std::uint64_t seed,
                             long long mc_samples = 20000, int points_per_tube = 256);

struct Hairbrush {
    std::size_t anchor = 0;
    std::vector<std::size_t> members; // delta-separated, all meeting the anchor
    std::vector<int> k_label;         // dyadic label: 2^{-k-1} < d_Z(u_i, u) <= 2^{-k}

    // (l, m) labels of the members relative to member j (paper partition
    // I(k, j, l, m)); members not meeting T_j get (-1, -1).
    std::vector<std::array<int, 2>> lm_labels(std::size_t j) const;

    const Setting* setting = nullptr;
    std::vector<Tube> tubes;
    double delta = 0;
};

Hairbrush extract_hairbrush(const Setting& setting, const std::vector<Tube>& tubes,
                            std::uint64_t seed);

// Minkowski dimension estimate: slope of log cover count against log(1/delta).
RegressionResult box_dimension(const Indicator& indicator, const Box& bounds,
                               MetricKind metric, const LayerSpec* layers,
                               const std::vector<double>& deltas,
                               long long cell_cap = 200'000'000);

// Perron tree: 2^depth translated triangles over a common base whose union
// area shrinks with depth while keeping the full direction sector.
struct Triangle {
    std::array<std::array<double, 2>, 3> v;
    bool contains(double x, double y) const;
};

std::vector<Triangle> perron_construction(int depth);

// Union area of a triangle family on a fixed grid (deterministic).
double triangle_union_area(const std::vector<Triangle>& triangles, int grid = 1024);

// Fraction of directions in the base sector with a full contained segment.
double perron_direction_coverage(const std::vector<Triangle>& triangles, int directions = 64,
                                 int samples_per_segment = 48);

// Indicator of K x (window of R^{m2}): the LT-Kakeya product construction.
Indicator product_lt_kakeya(const Indicator& planar, const GroupSpec& spec, double window);

// Share of directions u with a contained left-translated segment in the set.
double product_segment_coverage(const Indicator& set_indicator, const Setting& lt_setting,
                                const std::vector<Triangle>& planar_triangles,
                                int directions, double delta_grid);

} // namespace kakeya

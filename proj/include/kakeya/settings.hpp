#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kakeya/carnot.hpp"
#include "kakeya/geometry.hpp"
#include "kakeya/rng.hpp"

namespace kakeya {

// Two-branch self-similar Cantor set in [0,1]: at depth k the set is 2^k
// intervals of length ratio^k. dimension = log 2 / log(1/ratio).
struct CantorSet {
    double ratio = 0.5;
    int depth = 1;
    double dimension() const;
};

CantorSet cantor_build(double ratio, int depth);
std::vector<std::pair<double, double>> cantor_intervals(const CantorSet& set);
// Distance from x to the depth-level interval union.
double cantor_distance(const CantorSet& set, double x);
// Natural (uniform branching) measure of [a,b]; total mass 1.
double cantor_measure_interval(const CantorSet& set, double a, double b);
// Measure parametrization: binary digits of t pick branches.
double cantor_point(const CantorSet& set, double t);
std::vector<double> cantor_midpoints(const CantorSet& set);

enum class SettingKind {
    EuclideanKakeya,
    RestrictedKakeya,
    NikodymHyperplane,
    FurstenbergK,
    HomogeneousKakeya,
    CarnotLT,
    CarnotKakeya,
};

std::string setting_kind_name(SettingKind kind);

struct NominalExponents {
    double Q = 0, S = 0, T = 0, theta = 0;
};

// One of the seven geometric configurations: ambient metric d, auxiliary
// metric d' (always Euclidean), direction space Y with metric d_Z, parameter
// space A, and the segment family F_u(a) those induce.
class Setting {
  public:
    static Setting euclidean_kakeya(int n);
    static Setting restricted_kakeya(int n, CantorSet directions);
    static Setting nikodym_hyperplane(int n, double sigma, double c_sigma);
    static Setting furstenberg_k(int n, CantorSet fiber);
    static Setting homogeneous_kakeya(LayerSpec layers);
    static Setting carnot_lt(GroupSpec group, double R);
    static Setting carnot_kakeya(GroupSpec group, double R);

    SettingKind kind() const { return kind_; }
    int ambient_dim() const { return n_; }
    int direction_dim() const;
    int param_dim() const;
    std::string summary() const;

    const LayerSpec& layers() const { return layers_; }
    const GroupSpec& group() const { return group_; }
    const CarnotConstants& constants() const { return constants_; }
    const CantorSet& cantor() const { return cantor_; }
    double sigma() const { return sigma_; }
    double c_sigma() const { return c_sigma_; }
    double parameter_radius() const { return param_radius_; }
    double direction_radius() const { return direction_radius_; }

    // Widening constant W of the fat tubes.
    double widening() const;
    // Supremum of admissible tube radii.
    double delta_max() const;

    NominalExponents nominal_exponents() const;
    // (lambda, alpha) where the paper verifies them; nullopt where unknown.
    std::optional<std::pair<double, double>> nominal_lambda_alpha() const;

    // Ambient metric d.
    double dist_d(const Point& p, const Point& q) const;
    // Auxiliary metric d' (Euclidean in every configuration here).
    double dist_dprime(const Point& p, const Point& q) const;
    // Direction-space metric d_Z.
    double dist_Z(const std::vector<double>& u, const std::vector<double>& v) const;
    double diam_Y() const;

    // Parameter range of the central segment; widened segments extend it.
    std::pair<double, double> t_range(const std::vector<double>& u, bool widened) const;
    Point segment_point(const std::vector<double>& u, const std::vector<double>& a,
                        double t) const;

    std::vector<double> sample_direction(Rng& rng) const;
    std::vector<std::vector<double>> sample_directions(std::uint64_t seed, int count) const;
    std::vector<double> sample_param(Rng& rng) const;

    // delta-separated direction family in the d_Z-ball around `center`.
    // Metric-aware coordinate grid; every returned u lies in Y.
    std::vector<std::vector<double>> direction_grid(const std::vector<double>& center,
                                                    double dz_radius, double delta,
                                                    std::size_t max_count) const;

    // delta-separated family restricted to a slab: full extent `beta` along
    // the direction of `toward`, transverse extent `width`. Slices the cap to
    // the members an axiom-5 count can actually use. Families larger than
    // max_count are decimated evenly; *out_stride reports the decimation
    // factor (1 when the full family is returned).
    std::vector<std::vector<double>> direction_slab_grid(const std::vector<double>& center,
                                                         const std::vector<double>& toward,
                                                         double beta, double width, double delta,
                                                         std::size_t max_count,
                                                         std::size_t* out_stride = nullptr) const;

    // Parameter a such that the segment of direction u passes through z at
    // internal parameter t_at; nullopt if the variant cannot place it.
    std::optional<std::vector<double>> param_through(const std::vector<double>& u,
                                                     const Point& z, double t_at) const;

    // mu_{u,a}(F_u(a) ∩ B_d(x, r)) with mu_{u,a} the unit-mass measure on F.
    double segment_measure_in_ball(const std::vector<double>& u,
                                   const std::vector<double>& a, const Point& x,
                                   double r) const;

  private:
    Setting() = default;

    SettingKind kind_ = SettingKind::EuclideanKakeya;
    int n_ = 0;
    CantorSet cantor_{};
    double sigma_ = 0, c_sigma_ = 0;
    LayerSpec layers_{};
    GroupSpec group_{};
    CarnotConstants constants_{};
    double direction_radius_ = 0; // Y ball radius (ball-type direction spaces)
    double param_radius_ = 1;     // parameter sampling radius
    double arc_width_ = 1.0;      // RestrictedKakeya angular window
};

// A tube T^delta_u(a) (or its widened variant): setting pointer must outlive
// the tube.
struct Tube {
    const Setting* setting = nullptr;
    std::vector<double> u;
    std::vector<double> a;
    double delta = 0;
    bool widened = false;
};

Tube make_tube(const Setting& s, std::vector<double> u, std::vector<double> a,
               double delta, bool widened = false);

bool tube_contains(const Tube& tube, const Point& p);

// d(p, F) for the tube's core set (segment or Cantor copy) in the metric that
// defines the tube.
double tube_core_distance(const Tube& tube, const Point& p);

// Axis-aligned bounding box of the tube.
Box tube_bounding_box(const Tube& tube);

// Disjoint sampling cells covering the tube; hit fractions stay Theta(1)
// even for thin tubes.
struct SampleRegion {
    struct Cell {
        Point origin;
        std::vector<Point> axes;   // orthonormal or axis-aligned directions
        std::vector<double> extent;
        double volume = 0;
    };
    std::vector<Cell> cells;
    double total_volume = 0;
    std::vector<double> cumulative; // prefix sums over cell volumes

    Point draw(Rng& rng) const;
};

SampleRegion tube_sample_region(const Tube& tube);

// Ball-cover centers p_j = gamma(t_j), t_j = (j-1) delta^s, realizing the
// inner/outer cover bracket; Carnot and homogeneous variants only.
std::vector<Point> tube_cover_centers(const Tube& tube);

// Random point on the central segment (uniform in parameter).
Point sample_point_on_segment(const Tube& tube, Rng& rng);
// Random point inside the tube (rejection from the sample region).
Point sample_point_in_tube(const Tube& tube, Rng& rng);

// Closest approach of the two central segments in the ambient metric d
// (alternating golden-section; the per-variable slices are quasiconvex).
struct SpineApproach {
    double tA = 0, tB = 0;
    double dist = 0;
};
SpineApproach spine_closest_approach(const Tube& A, const Tube& B);

// Tubes (as closed metric neighbourhoods) intersect iff the spine distance is
// at most the radius sum; the ambient metrics here are geodesic.
bool tubes_intersect(const Tube& A, const Tube& B);

// Representative points of T_A cap T_B: Euclidean midpoints of spine pairs
// within the radius sum, scanned on a window around the closest approach.
std::vector<Point> intersection_cloud(const Tube& A, const Tube& B, int max_points = 128);

double tube_radius(const Tube& tube);

} // namespace kakeya

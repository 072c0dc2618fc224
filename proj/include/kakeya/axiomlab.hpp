#pragma once

#include <map>
#include <string>
#include <vector>

#include "kakeya/covers.hpp"
#include "kakeya/rational.hpp"
#include "kakeya/regression.hpp"
#include "kakeya/settings.hpp"

namespace kakeya {

// One experiment observation; every axiom experiment emits rows with this
// fixed column set (unused columns are zero).
struct CsvRow {
    double delta = 0;
    double beta = 0;
    double gamma = 0;
    long long trial = 0;
    double value = 0;
};

struct AxiomReport {
    int axiom = 0;
    std::string setting_summary;
    std::map<std::string, double> estimates;
    std::map<std::string, double> diagnostics;
    NominalExponents nominal;
    bool has_nominal_target = true;
    bool pass = false;
    std::string checked; // which invariant the pass flag cites
    std::vector<CsvRow> rows;
};

// Axiom 1: least-squares slope of log mu(T^delta) against log delta, averaged
// over random (u, a) per delta.
RegressionResult estimate_volume_exponent(const Setting& setting,
                                          const std::vector<double>& deltas, int trials,
                                          std::uint64_t seed, long long mc_samples = 20000);

// Full axiom-1 report: exponent fit plus the diam-scaled sub-cap clause.
AxiomReport check_axiom1(const Setting& setting, const std::vector<double>& deltas, int trials,
                         std::uint64_t seed, double tolerance = 0.15,
                         long long mc_samples = 20000);

// Axiom 2: density ratio mu(T cap B_d(x,Kr)) / (M mu(T)) over random draws at
// two scales; theta from the scale ratio.
AxiomReport check_axiom2(const Setting& setting, double delta, int trials, std::uint64_t seed,
                         double tolerance = 0.15, long long mc_samples = 40000);

// Axiom 3: intersection diameters of widened tube pairs; b from the largest
// diam * d_Z / delta.
AxiomReport check_axiom3(const Setting& setting, double delta, int pairs, std::uint64_t seed,
                         long long samples_per_pair = 10000);

// Axiom 4: greedy cover of a tube by widened tubes of a delta-close direction.
AxiomReport check_axiom4(const Setting& setting, double delta, int trials, std::uint64_t seed,
                         double n_bar = 4, int cover_cap = 64, int candidates = 256,
                         int points = 384);

// Axiom 5: hairbrush counting experiment over (delta, beta, gamma) grids with
// a two-factor log fit for lambda (delta slope) and alpha (gamma slope).
AxiomReport axiom5_experiment(const Setting& setting, const std::vector<double>& deltas,
                              const std::vector<double>& betas,
                              const std::vector<double>& gammas, std::uint64_t seed,
                              std::size_t max_family = 2000000);

// Per-member profile of one hairbrush construction: (d_Z to the designated
// member, intersection separation, count weight). Thresholding it gives the
// axiom-5 counts for any (beta <= beta_max, gamma' >= gamma).
struct Axiom5Profile {
    std::vector<std::array<double, 3>> members;
    std::size_t family_size = 0;
    std::size_t through_z = 0;

    double count(double beta, double gamma) const;
};

Axiom5Profile axiom5_profile(const Setting& setting, double delta, double beta_max, double gamma,
                             std::size_t max_family = 2000000);

// Closed-form dimension lower bounds; admissibility violations are appended
// to `violations` when provided.
std::pair<Rat, Rat> predicted_bounds(Rat Q, Rat S, Rat T, Rat theta, Rat lambda, Rat alpha,
                                     std::vector<std::string>* violations = nullptr);

struct LabeledBound {
    std::string label;
    Rat value;
};

// The paper's per-setting dimension bounds in exact arithmetic. Settings with
// irrational exponents (non-dyadic Cantor ratios) return an empty list.
std::vector<LabeledBound> paper_bounds(const Setting& setting);

// s-Furstenberg bounds (general variant, not tied to a constructible setting).
std::vector<LabeledBound> furstenberg_bounds(int n, Rat s);

// K constant used in the axiom-2 check for this setting.
double axiom2_ball_factor(const Setting& setting);

// Direction at d_Z distance about `step` (never more than `step`) from u.
std::vector<double> jitter_direction(const Setting& setting, const std::vector<double>& u,
                                     double step, Rng& rng);

// Bounding box of the d-metric ball around `center`.
Box metric_ball_box(const Setting& setting, const Point& center, double radius);

} // namespace kakeya

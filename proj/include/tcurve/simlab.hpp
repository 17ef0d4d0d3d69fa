#ifndef TCURVE_SIMLAB_HPP
#define TCURVE_SIMLAB_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "tcurve/inference.hpp"
#include "tcurve/preprocess.hpp"

namespace tcurve {

struct MixtureComponent {
    double weight = 1.0;
    double mean = 0.0;
    double variance = 0.0;
};

struct EffectDist {
    enum class Kind { point_mass, normal_mixture };
    Kind kind = Kind::point_mass;
    double h0 = 0.0;                          // point_mass
    std::vector<MixtureComponent> components;  // normal_mixture

    static EffectDist point(double h);
    static EffectDist mixture(std::vector<MixtureComponent> components);
};

struct NoiseDist {
    enum class Kind { normal, student_t };
    Kind kind = Kind::normal;
    int nu = 0;

    static NoiseDist normal();
    static NoiseDist student(int nu);
};

struct SelectionRule {
    enum class Kind { none, publication_bias, threshold_phack, maximization_phack };
    Kind kind = Kind::none;
    double q = 0.0;     // publication bias: omission probability when |t| < 1.96
    double prob = 0.0;  // threshold: probability the researcher p-hacks
    double rho = 0.0;   // correlation of the (T1, T2) pair

    static SelectionRule none();
    static SelectionRule publication_bias(double q);
    static SelectionRule threshold_phack(double prob, double rho);
    static SelectionRule maximization_phack(double rho);
};

struct DgpSpec {
    EffectDist effect;
    NoiseDist noise;
    SelectionRule selection;
    std::size_t n_target = 0;
    int scores_per_article = 1;
};

// Draw reported t-scores until n_target exist. h is drawn once per article;
// noise per score; publication-bias omissions redraw the noise. Pairs for
// the p-hacking rules share h and have correlation rho (Gaussian copula
// when the noise is Student t). Deterministic per seed.
MetaSample simulate_sample(const DgpSpec& dgp, std::uint64_t seed);

// severity -> q for publication bias, -> prob for threshold p-hacking
DgpSpec with_severity(DgpSpec family, double severity);

struct PowerPoint {
    double severity = 0.0;
    double rejection_rate = 0.0;
    int sims = 0;
    std::size_t n = 0;
    std::vector<double> statistics;       // one per simulation, in sim order
    std::vector<double> critical_values;  // per simulation (constant when cv reused)
};

struct PowerCurveConfig {
    std::vector<double> severities;
    int sims = 100;
    bool reuse_cv = false;  // bootstrap once per severity, reuse for the rest
    PreprocessSpec pre;
    BootstrapConfig boot;
};

// For each severity, run `sims` simulated tests and record the rejection
// fraction. Simulations run in parallel over derived RNG streams; the
// output is identical under any schedule.
std::vector<PowerPoint> power_curve(const DgpSpec& family, const HermiteContext& ctx,
                                    const BasisSet& basis, const PowerCurveConfig& cfg);

// CSV with header severity,rejection_rate,sims,n
std::string power_curve_csv(const std::vector<PowerPoint>& points);

}  // namespace tcurve

#endif

#ifndef TCURVE_INFERENCE_HPP
#define TCURVE_INFERENCE_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tcurve/preprocess.hpp"
#include "tcurve/projection.hpp"
#include "tcurve/rng.hpp"
#include "tcurve/spectral.hpp"

namespace tcurve {

struct BootstrapConfig {
    int reps = 1000;
    std::uint64_t seed = 0;
    double alpha = 0.05;
    double delta_misspec = 0.0;  // critical-value add-on for non-normal noise
};

struct TestReport {
    double statistic = 0.0;
    double epsilon = 0.0;
    double critical_value = 0.0;  // bootstrap quantile + epsilon + delta
    double p_value = 1.0;
    std::optional<double> breakdown;  // statistic - (quantile + epsilon); iff reject
    std::optional<double> bsd;        // 1.7506 * breakdown (fraction; render as %)
    bool reject = false;

    // echoed configuration
    std::size_t n = 0;
    std::size_t m = 0;
    int J = 0;
    double sigma_y2 = 1.0;
    double L = 0.0;
    int M = 0;
    int reps = 0;
    std::uint64_t seed = 0;
    double alpha = 0.05;
    double delta = 0.0;
    bool symmetrize = true;
    double shift = 1.96;
    int threads = 1;
};

// Order-statistic quantile: element ceil(q*B) of the sorted draws (1-based).
double quantile(std::vector<double> draws, double q);

// Full-sample pipeline shared by the test and simulation harnesses:
// transform, theta, projection at theta.
struct PointEstimate {
    ThetaVector theta;
    ProjectionResult projection;  // at theta; .distance is the test statistic
};
PointEstimate point_estimate(const MetaSample& raw, const PreprocessSpec& pre,
                             const HermiteContext& ctx, const BasisSet& basis);

// m article draws with replacement; the replication-level resampler.
std::vector<std::size_t> resample_article_indices(std::size_t m, Rng& rng);

// Article bootstrap of the recentered statistic: for each replication b,
// resample articles from the raw sample, transform, form
// e* = theta*_b - theta, and record d_b = distance(p + e*) where p is the
// full-sample projected point. Replication b uses the derived stream
// (seed, b), so the sequence is identical under any parallel schedule.
std::vector<double> bootstrap_distribution(const MetaSample& raw, const PreprocessSpec& pre,
                                           const HermiteContext& ctx, const BasisSet& basis,
                                           const BootstrapConfig& cfg);

// Same, reusing an already computed point estimate.
std::vector<double> bootstrap_distribution(const MetaSample& raw, const PreprocessSpec& pre,
                                           const HermiteContext& ctx, const BasisSet& basis,
                                           const BootstrapConfig& cfg,
                                           const PointEstimate& point);

// Reject when statistic > F^-1(1-alpha) + epsilon + delta. The breakdown
// statistic is measured against the critical value WITHOUT the delta
// add-on: it is itself the smallest delta that overturns the rejection.
TestReport run_test(const MetaSample& raw, const PreprocessSpec& pre,
                    const HermiteContext& ctx, const BasisSet& basis,
                    const BootstrapConfig& cfg);

// Fixed-name JSON serialization of the report.
nlohmann::json report_to_json(const TestReport& report);

// Human-readable summary; p-values smaller than the Monte Carlo floor are
// rendered as "< 1/(reps+1)".
std::string render_summary(const TestReport& report);

}  // namespace tcurve

#endif

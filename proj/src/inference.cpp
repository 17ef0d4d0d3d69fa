#include "tcurve/inference.hpp"

#include <omp.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <sstream>
#include <stdexcept>

#include "tcurve/edgeworth.hpp"

namespace tcurve {

double quantile(std::vector<double> draws, double q) {
    if (draws.empty()) throw std::invalid_argument("quantile: empty draws");
    if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("quantile: q must be in [0,1]");
    std::sort(draws.begin(), draws.end());
    const double b = static_cast<double>(draws.size());
    // guard against 0.95*1000 = 950.0000000000000222-style roundoff
    const double x = q * b;
    auto index = static_cast<std::size_t>(std::ceil(x - 1e-9 * std::max(1.0, x)));
    index = std::clamp<std::size_t>(index, 1, draws.size());
    return draws[index - 1];
}

PointEstimate point_estimate(const MetaSample& raw, const PreprocessSpec& pre,
                             const HermiteContext& ctx, const BasisSet& basis) {
    if (ctx.J != basis.J || ctx.sigma_y2 != basis.sigma_y2)
        throw std::invalid_argument("point_estimate: context and basis disagree on (J, sigma_y2)");
    const MetaSample transformed = transform(raw, pre);
    PointEstimate pe;
    pe.theta = compute_theta(transformed, ctx);
    pe.projection = project(pe.theta.coeffs, basis);
    return pe;
}

std::vector<std::size_t> resample_article_indices(std::size_t m, Rng& rng) {
    std::vector<std::size_t> indices(m);
    for (auto& idx : indices) idx = rng.uniform_index(m);
    return indices;
}

std::vector<double> bootstrap_distribution(const MetaSample& raw, const PreprocessSpec& pre,
                                           const HermiteContext& ctx, const BasisSet& basis,
                                           const BootstrapConfig& cfg,
                                           const PointEstimate& point) {
    if (raw.transformed)
        throw std::logic_error("bootstrap_distribution: resampling requires the raw sample");
    if (raw.n == 0) throw std::invalid_argument("bootstrap_distribution: empty sample");
    if (ctx.J != basis.J || ctx.sigma_y2 != basis.sigma_y2)
        throw std::invalid_argument("bootstrap_distribution: inconsistent dimensions");
    if (cfg.reps < 1) throw std::invalid_argument("bootstrap_distribution: reps must be >= 1");

    const int J = ctx.J;
    const std::size_t m = raw.m();
    const MetaSample transformed = transform(raw, pre);
    const ArticleSums sums = article_theta_sums(transformed, ctx);
    const std::vector<double>& theta = point.theta.coeffs;
    const std::vector<double>& p = point.projection.projected_point;

    std::vector<double> draws(cfg.reps, 0.0);
    std::exception_ptr failure = nullptr;
    std::atomic<bool> failed{false};

#pragma omp parallel for schedule(static)
    for (int b = 0; b < cfg.reps; ++b) {
        if (failed.load(std::memory_order_relaxed)) continue;
        try {
            Rng rng(derive_stream(cfg.seed, static_cast<std::uint64_t>(b)));
            std::vector<double> theta_star(J, 0.0);
            std::size_t n_star = 0;
            for (std::size_t draw = 0; draw < m; ++draw) {
                const std::size_t a = rng.uniform_index(m);
                const double* row = sums.sums.data() + a * J;
                for (int j = 0; j < J; ++j) theta_star[j] += row[j];
                n_star += sums.counts[a];
            }
            std::vector<double> recentered(J);
            for (int j = 0; j < J; ++j)
                recentered[j] = p[j] + (theta_star[j] / static_cast<double>(n_star) - theta[j]);
            ProjectionOptions options;
            options.warm_start = &point.projection.weights;
            draws[b] = distance_only(recentered, basis, options);
        } catch (...) {
#pragma omp critical
            {
                if (!failure) failure = std::current_exception();
            }
            failed.store(true, std::memory_order_relaxed);
        }
    }
    if (failure) std::rethrow_exception(failure);
    return draws;
}

std::vector<double> bootstrap_distribution(const MetaSample& raw, const PreprocessSpec& pre,
                                           const HermiteContext& ctx, const BasisSet& basis,
                                           const BootstrapConfig& cfg) {
    const PointEstimate point = point_estimate(raw, pre, ctx, basis);
    return bootstrap_distribution(raw, pre, ctx, basis, cfg, point);
}

TestReport run_test(const MetaSample& raw, const PreprocessSpec& pre,
                    const HermiteContext& ctx, const BasisSet& basis,
                    const BootstrapConfig& cfg) {
    const PointEstimate point = point_estimate(raw, pre, ctx, basis);
    const std::vector<double> draws =
        bootstrap_distribution(raw, pre, ctx, basis, cfg, point);

    TestReport report;
    report.statistic = point.projection.distance;
    report.epsilon = basis.epsilon;
    const double base_cv = quantile(draws, 1.0 - cfg.alpha) + basis.epsilon;
    report.critical_value = base_cv + cfg.delta_misspec;
    report.reject = report.statistic > report.critical_value;

    int at_least = 0;
    for (double d : draws)
        if (d + basis.epsilon + cfg.delta_misspec >= report.statistic) ++at_least;
    report.p_value = (1.0 + at_least) / (cfg.reps + 1.0);

    if (report.reject) {
        report.breakdown = report.statistic - base_cv;
        report.bsd = bsd_constant() * *report.breakdown;
    }

    report.n = raw.n;
    report.m = raw.m();
    report.J = ctx.J;
    report.sigma_y2 = ctx.sigma_y2;
    report.L = basis.L;
    report.M = static_cast<int>(basis.grid.size());
    report.reps = cfg.reps;
    report.seed = cfg.seed;
    report.alpha = cfg.alpha;
    report.delta = cfg.delta_misspec;
    report.symmetrize = pre.symmetrize;
    report.shift = pre.shift;
    report.threads = omp_get_max_threads();
    return report;
}

nlohmann::json report_to_json(const TestReport& r) {
    nlohmann::json j;
    j["statistic"] = r.statistic;
    j["epsilon"] = r.epsilon;
    j["critical_value"] = r.critical_value;
    j["p_value"] = r.p_value;
    j["breakdown"] = r.breakdown ? nlohmann::json(*r.breakdown) : nlohmann::json(nullptr);
    j["bsd"] = r.bsd ? nlohmann::json(*r.bsd) : nlohmann::json(nullptr);
    j["reject"] = r.reject;
    j["n"] = r.n;
    j["m"] = r.m;
    j["J"] = r.J;
    j["sigma_y2"] = r.sigma_y2;
    j["L"] = r.L;
    j["M"] = r.M;
    j["reps"] = r.reps;
    j["seed"] = r.seed;
    j["alpha"] = r.alpha;
    j["delta"] = r.delta;
    j["symmetrize"] = r.symmetrize;
    j["shift"] = r.shift;
    j["threads"] = r.threads;
    return j;
}

std::string render_summary(const TestReport& r) {
    std::ostringstream out;
    out.precision(6);
    out << "statistic       " << r.statistic << "\n";
    out << "critical value  " << r.critical_value << "  (bootstrap q" << 100.0 * (1.0 - r.alpha)
        << " + epsilon " << r.epsilon;
    if (r.delta > 0.0) out << " + delta " << r.delta;
    out << ")\n";
    const double floor = 1.0 / (r.reps + 1.0);
    if (r.p_value <= floor)
        out << "p-value         < " << floor << "\n";
    else
        out << "p-value         " << r.p_value << "\n";
    out << "reject          " << (r.reject ? "yes" : "no") << "\n";
    if (r.breakdown) {
        out << "breakdown       " << *r.breakdown << "\n";
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.2f%%", 100.0 * *r.bsd);
        out << "bsd             " << buf << "\n";
    }
    return out.str();
}

}  // namespace tcurve

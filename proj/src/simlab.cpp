#include "tcurve/simlab.hpp"

#include <omp.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <sstream>
#include <stdexcept>

#include "tcurve/stats.hpp"

namespace tcurve {

namespace {

constexpr double kSignificance = 1.96;

void validate(const DgpSpec& dgp) {
    if (dgp.n_target < 1) throw std::invalid_argument("DgpSpec: n_target must be >= 1");
    if (dgp.scores_per_article < 1)
        throw std::invalid_argument("DgpSpec: scores_per_article must be >= 1");
    if (dgp.noise.kind == NoiseDist::Kind::student_t && dgp.noise.nu < 3)
        throw std::invalid_argument("DgpSpec: student_t noise needs nu >= 3");
    const auto& sel = dgp.selection;
    if (sel.q < 0.0 || sel.q > 1.0 || sel.prob < 0.0 || sel.prob > 1.0)
        throw std::invalid_argument("DgpSpec: q and prob must lie in [0,1]");
    if (sel.rho <= -1.0 || sel.rho >= 1.0)
        throw std::invalid_argument("DgpSpec: rho must lie in (-1,1)");
    if (dgp.effect.kind == EffectDist::Kind::normal_mixture) {
        if (dgp.effect.components.empty())
            throw std::invalid_argument("DgpSpec: empty mixture");
        double total = 0.0;
        for (const auto& c : dgp.effect.components) {
            if (c.weight < 0.0 || c.variance < 0.0)
                throw std::invalid_argument("DgpSpec: mixture weights/variances must be >= 0");
            total += c.weight;
        }
        if (std::abs(total - 1.0) > 1e-9)
            throw std::invalid_argument("DgpSpec: mixture weights must sum to 1");
    }
}

double draw_effect(const EffectDist& effect, Rng& rng) {
    if (effect.kind == EffectDist::Kind::point_mass) return effect.h0;
    double u = rng.uniform();
    for (const auto& c : effect.components) {
        if (u < c.weight || &c == &effect.components.back())
            return c.mean + std::sqrt(c.variance) * rng.normal();
        u -= c.weight;
    }
    return effect.components.back().mean;  // unreachable
}

double draw_noise(const NoiseDist& noise, Rng& rng) {
    if (noise.kind == NoiseDist::Kind::normal) return rng.normal();
    return rng.student_t(noise.nu);
}

// correlated noise pair; Gaussian copula keeps the Student-t marginals
void draw_noise_pair(const NoiseDist& noise, double rho, Rng& rng, double& x1, double& x2) {
    const double a = rng.normal();
    const double b = rng.normal();
    const double z1 = a;
    const double z2 = rho * a + std::sqrt(1.0 - rho * rho) * b;
    if (noise.kind == NoiseDist::Kind::normal) {
        x1 = z1;
        x2 = z2;
        return;
    }
    x1 = student_t_quantile(noise.nu, normal_cdf(z1));
    x2 = student_t_quantile(noise.nu, normal_cdf(z2));
}

// one reported t-score for an article with latent effect h
double report_one(const DgpSpec& dgp, double h, Rng& rng) {
    const auto& sel = dgp.selection;
    switch (sel.kind) {
        case SelectionRule::Kind::none:
            return h + draw_noise(dgp.noise, rng);
        case SelectionRule::Kind::publication_bias:
            for (;;) {
                const double t = h + draw_noise(dgp.noise, rng);
                if (std::abs(t) < kSignificance && rng.uniform() < sel.q) continue;  // omitted
                return t;
            }
        case SelectionRule::Kind::threshold_phack: {
            if (rng.uniform() >= sel.prob) return h + draw_noise(dgp.noise, rng);
            double x1 = 0.0, x2 = 0.0;
            draw_noise_pair(dgp.noise, sel.rho, rng, x1, x2);
            const double t1 = h + x1;
            const double t2 = h + x2;
            return std::abs(t1) > kSignificance ? t1 : std::max(t1, t2);
        }
        case SelectionRule::Kind::maximization_phack: {
            double x1 = 0.0, x2 = 0.0;
            draw_noise_pair(dgp.noise, sel.rho, rng, x1, x2);
            return h + std::max(x1, x2);
        }
    }
    throw std::logic_error("report_one: unknown selection rule");
}

}  // namespace

EffectDist EffectDist::point(double h) {
    EffectDist e;
    e.kind = Kind::point_mass;
    e.h0 = h;
    return e;
}

EffectDist EffectDist::mixture(std::vector<MixtureComponent> components) {
    EffectDist e;
    e.kind = Kind::normal_mixture;
    e.components = std::move(components);
    return e;
}

NoiseDist NoiseDist::normal() { return NoiseDist{}; }

NoiseDist NoiseDist::student(int nu) {
    NoiseDist n;
    n.kind = Kind::student_t;
    n.nu = nu;
    return n;
}

SelectionRule SelectionRule::none() { return SelectionRule{}; }

SelectionRule SelectionRule::publication_bias(double q) {
    SelectionRule s;
    s.kind = Kind::publication_bias;
    s.q = q;
    return s;
}

SelectionRule SelectionRule::threshold_phack(double prob, double rho) {
    SelectionRule s;
    s.kind = Kind::threshold_phack;
    s.prob = prob;
    s.rho = rho;
    return s;
}

SelectionRule SelectionRule::maximization_phack(double rho) {
    SelectionRule s;
    s.kind = Kind::maximization_phack;
    s.rho = rho;
    return s;
}

MetaSample simulate_sample(const DgpSpec& dgp, std::uint64_t seed) {
    validate(dgp);
    Rng rng(derive_stream(seed, 0x51u));
    MetaSample sample;
    const std::size_t per_article = static_cast<std::size_t>(dgp.scores_per_article);
    // Publication bias truncates study-level draws: with one score per
    // article, an omitted score discards its latent effect too, so the
    // reported sample is tilted toward effects that survive the filter.
    // Multi-score articles keep h fixed and redraw the noise only.
    const bool omission_redraws_effect =
        dgp.selection.kind == SelectionRule::Kind::publication_bias && per_article == 1;
    std::size_t produced = 0;
    std::size_t article_index = 0;
    char id[24];
    while (produced < dgp.n_target) {
        const double h = draw_effect(dgp.effect, rng);
        if (omission_redraws_effect) {
            const double t = h + draw_noise(dgp.noise, rng);
            if (std::abs(t) < kSignificance && rng.uniform() < dgp.selection.q)
                continue;  // omitted; the next attempt is a fresh study
            std::snprintf(id, sizeof id, "a%06zu", article_index++);
            sample.articles.push_back(Article{id, {t}});
            ++produced;
            continue;
        }
        const std::size_t want = std::min(per_article, dgp.n_target - produced);
        std::snprintf(id, sizeof id, "a%06zu", article_index++);
        Article article;
        article.id = id;
        article.scores.reserve(want);
        for (std::size_t k = 0; k < want; ++k)
            article.scores.push_back(report_one(dgp, h, rng));
        produced += want;
        sample.articles.push_back(std::move(article));
    }
    sample.recount();
    return sample;
}

DgpSpec with_severity(DgpSpec family, double severity) {
    switch (family.selection.kind) {
        case SelectionRule::Kind::publication_bias:
            family.selection.q = severity;
            return family;
        case SelectionRule::Kind::threshold_phack:
            family.selection.prob = severity;
            return family;
        default:
            throw std::invalid_argument(
                "with_severity: severity sweeps need a publication_bias or threshold_phack family");
    }
}

std::vector<PowerPoint> power_curve(const DgpSpec& family, const HermiteContext& ctx,
                                    const BasisSet& basis, const PowerCurveConfig& cfg) {
    if (cfg.sims < 1) throw std::invalid_argument("power_curve: sims must be >= 1");
    if (cfg.severities.empty()) throw std::invalid_argument("power_curve: no severities");

    std::vector<PowerPoint> points;
    points.reserve(cfg.severities.size());

    for (std::size_t si = 0; si < cfg.severities.size(); ++si) {
        const DgpSpec dgp = with_severity(family, cfg.severities[si]);
        validate(dgp);
        PowerPoint point;
        point.severity = cfg.severities[si];
        point.sims = cfg.sims;
        point.n = dgp.n_target;
        point.statistics.assign(cfg.sims, 0.0);
        point.critical_values.assign(cfg.sims, 0.0);

        const std::uint64_t severity_seed = derive_stream(cfg.boot.seed, 0xA100u + si);
        double reused_cv = 0.0;

        // simulation 0 runs alone: it supplies the reusable critical value
        {
            const MetaSample sample = simulate_sample(dgp, derive_stream(severity_seed, 0));
            const PointEstimate point_est = point_estimate(sample, cfg.pre, ctx, basis);
            BootstrapConfig boot = cfg.boot;
            boot.seed = derive_stream(severity_seed, 0xB000u);
            const auto draws = bootstrap_distribution(sample, cfg.pre, ctx, basis, boot, point_est);
            const double cv = quantile(draws, 1.0 - boot.alpha) + basis.epsilon +
                              boot.delta_misspec;
            point.statistics[0] = point_est.projection.distance;
            point.critical_values[0] = cv;
            reused_cv = cv;
        }

        std::exception_ptr failure = nullptr;
        std::atomic<bool> failed{false};
#pragma omp parallel for schedule(dynamic)
        for (int s = 1; s < cfg.sims; ++s) {
            if (failed.load(std::memory_order_relaxed)) continue;
            try {
                const MetaSample sample =
                    simulate_sample(dgp, derive_stream(severity_seed, static_cast<std::uint64_t>(s)));
                const PointEstimate point_est = point_estimate(sample, cfg.pre, ctx, basis);
                double cv = reused_cv;
                if (!cfg.reuse_cv) {
                    BootstrapConfig boot = cfg.boot;
                    boot.seed = derive_stream(severity_seed, 0xB000u + static_cast<std::uint64_t>(s));
                    const auto draws =
                        bootstrap_distribution(sample, cfg.pre, ctx, basis, boot, point_est);
                    cv = quantile(draws, 1.0 - boot.alpha) + basis.epsilon + boot.delta_misspec;
                }
                point.statistics[s] = point_est.projection.distance;
                point.critical_values[s] = cv;
            } catch (...) {
#pragma omp critical
                {
                    if (!failure) failure = std::current_exception();
                }
                failed.store(true, std::memory_order_relaxed);
            }
        }
        if (failure) std::rethrow_exception(failure);

        int rejections = 0;
        for (int s = 0; s < cfg.sims; ++s)
            if (point.statistics[s] > point.critical_values[s]) ++rejections;
        point.rejection_rate = static_cast<double>(rejections) / cfg.sims;
        points.push_back(std::move(point));
    }
    return points;
}

std::string power_curve_csv(const std::vector<PowerPoint>& points) {
    std::ostringstream out;
    out.precision(17);
    out << "severity,rejection_rate,sims,n\n";
    for (const auto& p : points)
        out << p.severity << ',' << p.rejection_rate << ',' << p.sims << ',' << p.n << '\n';
    return out.str();
}

}  // namespace tcurve

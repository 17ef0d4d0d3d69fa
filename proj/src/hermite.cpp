#include "tcurve/hermite.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace tcurve {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Recurrence on g_j(x) = He_j(x)/sqrt(j!) * exp(-x^2/4):
//   g_{j+1} = (x g_j - sqrt(j) g_{j-1}) / sqrt(j+1)
// The half-weight keeps every g_j in [-1, 1] (Cramer's bound), so neither
// the polynomial growth nor the weight under/overflows on its own.
void half_weighted_all(double x, std::span<const double> sqrt_index,
                       std::span<double> out) {
    const int J = static_cast<int>(out.size()) - 1;
    double g = std::exp(-0.25 * x * x);
    double gm1 = 0.0;
    out[0] = g;
    for (int j = 0; j < J; ++j) {
        double next = (x * g - sqrt_index[j] * gm1) / sqrt_index[j + 1];
        gm1 = g;
        g = next;
        out[j + 1] = g;
    }
}

double half_weighted_single(double x, std::span<const double> sqrt_index, int j) {
    double g = std::exp(-0.25 * x * x);
    double gm1 = 0.0;
    for (int k = 0; k < j; ++k) {
        double next = (x * g - sqrt_index[k] * gm1) / sqrt_index[k + 1];
        gm1 = g;
        g = next;
    }
    return g;
}

// integral phi_s(t) phi_1(t-a) phi_1(t-b) dt, by two Gaussian-product folds
double triple_gaussian_integral(double s, double a, double b) {
    return gaussian_pdf(a - b, 2.0) * gaussian_pdf(0.5 * (a + b), s + 0.5);
}

}  // namespace

double gaussian_pdf(double x, double variance) {
    return std::exp(-x * x / (2.0 * variance)) / std::sqrt(kTwoPi * variance);
}

HermiteContext::HermiteContext(double sigma_y2_, int J_)
    : sigma_y2(sigma_y2_), J(J_) {
    if (!(sigma_y2 > 0.0)) throw std::invalid_argument("HermiteContext: sigma_y2 must be > 0");
    if (J < 1) throw std::invalid_argument("HermiteContext: J must be >= 1");
    sqrt_index.resize(J + 2);
    for (int j = 0; j <= J + 1; ++j) sqrt_index[j] = std::sqrt(static_cast<double>(j));
    eta_table.resize(J + 1);
    const double ratio = std::sqrt(sigma_y2 / (1.0 + sigma_y2));
    eta_table[0] = 1.0;
    for (int j = 1; j <= J; ++j) eta_table[j] = eta_table[j - 1] * ratio;
}

double eval_psi_weighted(const HermiteContext& ctx, int j, double t) {
    if (j < 0 || j > ctx.J) throw std::invalid_argument("eval_psi_weighted: j out of range");
    const double x = t / std::sqrt(ctx.sigma_y2);
    const double g = half_weighted_single(x, ctx.sqrt_index, j);
    return g * std::exp(-0.25 * x * x) / std::sqrt(kTwoPi * ctx.sigma_y2);
}

double eval_chi_weighted(const HermiteContext& ctx, int j, double h) {
    if (j < 0 || j > ctx.J) throw std::invalid_argument("eval_chi_weighted: j out of range");
    const double x = h / std::sqrt(1.0 + ctx.sigma_y2);
    const double g = half_weighted_single(x, ctx.sqrt_index, j);
    return g * std::exp(-0.25 * x * x) / std::sqrt(kTwoPi * (1.0 + ctx.sigma_y2));
}

void psi_weighted_all(const HermiteContext& ctx, double t, std::span<double> out) {
    if (out.empty() || static_cast<int>(out.size()) > ctx.J + 1)
        throw std::invalid_argument("psi_weighted_all: out size must be in [1, J+1]");
    const double x = t / std::sqrt(ctx.sigma_y2);
    half_weighted_all(x, ctx.sqrt_index, out);
    const double rest = std::exp(-0.25 * x * x) / std::sqrt(kTwoPi * ctx.sigma_y2);
    for (auto& v : out) v *= rest;
}

void chi_weighted_all(const HermiteContext& ctx, double h, std::span<double> out) {
    if (out.empty() || static_cast<int>(out.size()) > ctx.J + 1)
        throw std::invalid_argument("chi_weighted_all: out size must be in [1, J+1]");
    const double x = h / std::sqrt(1.0 + ctx.sigma_y2);
    half_weighted_all(x, ctx.sqrt_index, out);
    const double rest = std::exp(-0.25 * x * x) / std::sqrt(kTwoPi * (1.0 + ctx.sigma_y2));
    for (auto& v : out) v *= rest;
}

double eta(const HermiteContext& ctx, int j) {
    if (j < 0) throw std::invalid_argument("eta: j must be >= 0");
    if (j <= ctx.J) return ctx.eta_table[j];
    return std::pow(ctx.sigma_y2 / (1.0 + ctx.sigma_y2), 0.5 * j);
}

double y_norm_gaussian_diff(double mu1, double mu2, double sigma_y2) {
    if (!(sigma_y2 > 0.0)) throw std::invalid_argument("y_norm_gaussian_diff: sigma_y2 must be > 0");
    const bool has1 = std::isfinite(mu1);
    const bool has2 = std::isfinite(mu2);
    double value = 0.0;
    if (has1) value += triple_gaussian_integral(sigma_y2, mu1, mu1);
    if (has2) value += triple_gaussian_integral(sigma_y2, mu2, mu2);
    if (has1 && has2) value -= 2.0 * triple_gaussian_integral(sigma_y2, mu1, mu2);
    // the quadratic form is nonnegative; clamp roundoff from the cancellation
    return std::sqrt(std::max(0.0, value));
}

}  // namespace tcurve

#ifndef TCURVE_HERMITE_HPP
#define TCURVE_HERMITE_HPP

#include <span>
#include <vector>

namespace tcurve {

// Density of N(0, variance) at x.
double gaussian_pdf(double x, double variance);

// Scaled probabilist's Hermite singular functions and the Gaussian-weighted
// geometry they induce. The two singular bases are
//
//   psi_j(t) = He_j(t / sigma_Y) / sqrt(j!)        (orthonormal under phi_{sigma_Y^2})
//   chi_j(h) = He_j(h / sqrt(1+sigma_Y^2)) / sqrt(j!)  (orthonormal under phi_{sigma_Y^2+1})
//
// with singular values eta_j = (sigma_Y^2 / (1+sigma_Y^2))^(j/2).
//
// All evaluations return the *weighted* values psi_j(t)*phi_{sigma_Y^2}(t)
// and chi_j(h)*phi_{sigma_Y^2+1}(h), which are uniformly bounded by
// 1/sqrt(2*pi). The recurrence runs on He_j(x)/sqrt(j!) * exp(-x^2/4), so
// every intermediate stays in [-1, 1] and evaluation is stable for j up to
// at least 60 and |t| up to 40.
struct HermiteContext {
    double sigma_y2;
    int J;
    // sqrt(0), sqrt(1), ..., sqrt(J) for the normalized recurrence
    std::vector<double> sqrt_index;
    // eta_0 .. eta_J
    std::vector<double> eta_table;

    explicit HermiteContext(double sigma_y2 = 1.0, int J = 30);
};

// psi_j(t) * phi_{sigma_Y^2}(t); requires 0 <= j <= ctx.J.
double eval_psi_weighted(const HermiteContext& ctx, int j, double t);

// chi_j(h) * phi_{sigma_Y^2+1}(h); requires 0 <= j <= ctx.J.
double eval_chi_weighted(const HermiteContext& ctx, int j, double h);

// Weighted psi_j(t) for j = 0..out.size()-1 in one recurrence pass;
// out.size() must be at most ctx.J + 1.
void psi_weighted_all(const HermiteContext& ctx, double t, std::span<double> out);

// Weighted chi_j(h), same contract.
void chi_weighted_all(const HermiteContext& ctx, double h, std::span<double> out);

// Singular value eta_j; valid for any j >= 0.
double eta(const HermiteContext& ctx, int j);

// sqrt( integral phi_{sigma_Y^2}(t) * (phi(t-mu1) - phi(t-mu2))^2 dt ),
// evaluated by closed-form Gaussian product identities:
//   phi_a(t-m1) phi_b(t-m2) = phi_{a+b}(m1-m2) * phi_{ab/(a+b)}(t - weighted mean)
// A non-finite mean drops that Gaussian (phi(t - inf) == 0 pointwise).
double y_norm_gaussian_diff(double mu1, double mu2, double sigma_y2);

}  // namespace tcurve

#endif

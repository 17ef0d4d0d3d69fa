#include "tcurve/edgeworth.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "tcurve/hermite.hpp"
#include "tcurve/quadrature.hpp"
#include "tcurve/stats.hpp"

namespace tcurve {

namespace {

void require_valid(const EdgeworthSpec& spec) {
    if (spec.nu < 2) throw std::invalid_argument("EdgeworthSpec: nu must be >= 2");
    if (!std::isfinite(spec.skew)) throw std::invalid_argument("EdgeworthSpec: skew must be finite");
}

double first_order_factor(const EdgeworthSpec& spec) {
    return spec.skew / (6.0 * std::sqrt(static_cast<double>(spec.nu)));
}

// || (z^3 - 3z) phi(z) ||_Y by quadrature under the phi_{sigma_y2} weight
double hermite3_y_norm(double sigma_y2) {
    auto integrand = [sigma_y2](double z) {
        const double g = (z * z * z - 3.0 * z) * gaussian_pdf(z, 1.0);
        return g * g * gaussian_pdf(z, sigma_y2);
    };
    return std::sqrt(integrate(integrand, -kIntegrationBound, kIntegrationBound));
}

}  // namespace

double edgeworth_correction(const EdgeworthSpec& spec, double z) {
    require_valid(spec);
    if (!std::isfinite(z)) throw std::invalid_argument("edgeworth_correction: z must be finite");
    return gaussian_pdf(z, 1.0) * spec.skew * (z * z * z - 3.0 * z) /
           (6.0 * std::sqrt(static_cast<double>(spec.nu)));
}

double delta_upper_bound(const EdgeworthSpec& spec, double sigma_y2) {
    require_valid(spec);
    return std::abs(first_order_factor(spec)) * hermite3_y_norm(sigma_y2);
}

double size_distortion(const EdgeworthSpec& spec, double cutoff) {
    require_valid(spec);
    // integral_cutoff^inf phi(z)(z^3-3z) dz = phi(cutoff)(cutoff^2 - 1)
    return first_order_factor(spec) * gaussian_pdf(cutoff, 1.0) * (cutoff * cutoff - 1.0);
}

double bsd_constant() { return 1.7506; }

double bsd_constant_audit() {
    // both factors scale with skew/(6 sqrt(nu)); the ratio is a pure number
    const double tail = gaussian_pdf(1.96, 1.0) * (1.96 * 1.96 - 1.0);
    return tail / hermite3_y_norm(1.0);
}

double delta_student_t(int nu, double sigma_y2, std::span<const double> h_grid) {
    if (nu < 3) throw std::invalid_argument("delta_student_t: nu must be >= 3");
    if (!(sigma_y2 > 0.0)) throw std::invalid_argument("delta_student_t: sigma_y2 must be > 0");
    std::vector<double> default_grid;
    if (h_grid.empty()) {
        for (double h = 0.0; h <= 8.0 + 1e-12; h += 0.05) default_grid.push_back(h);
        h_grid = default_grid;
    }
    double worst = 0.0;
    for (double h : h_grid) {
        auto integrand = [nu, h, sigma_y2](double t) {
            const double d = student_t_pdf(nu, t - h) - gaussian_pdf(t - h, 1.0);
            return gaussian_pdf(t, sigma_y2) * d * d;
        };
        const double value =
            std::sqrt(integrate(integrand, -kIntegrationBound, kIntegrationBound));
        worst = std::max(worst, value);
    }
    return worst;
}

}  // namespace tcurve

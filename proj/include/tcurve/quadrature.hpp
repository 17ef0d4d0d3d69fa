#ifndef TCURVE_QUADRATURE_HPP
#define TCURVE_QUADRATURE_HPP

#include <vector>

namespace tcurve {

// Gauss-Legendre rule on [-1,1]. Nodes via Newton iteration on P_n.
struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;
    explicit GaussLegendre(int n);
};

// Shared rule for the default order, built once.
const GaussLegendre& gauss_legendre_rule(int n);

// Integrate f over [a,b] with an n-node Gauss-Legendre rule.
// All integrands in this project decay at least like exp(-t^2/4),
// so a fixed 256-node rule on [-45,45] resolves them to ~1e-14.
template <class F>
double integrate(F&& f, double a, double b, int n = 256) {
    const GaussLegendre& rule = gauss_legendre_rule(n);
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double sum = 0.0;
    for (int i = 0; i < n; ++i)
        sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
    return sum * half;
}

inline constexpr double kIntegrationBound = 45.0;

}  // namespace tcurve

#endif

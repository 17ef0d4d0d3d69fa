// Test-only oracles, independent of the library's computational paths.
#ifndef TCURVE_TESTS_ORACLES_HPP
#define TCURVE_TESTS_ORACLES_HPP

#include <cstddef>
#include <functional>
#include <vector>

namespace oracles {

// Adaptive Simpson quadrature; independent of the Gauss-Legendre machinery.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol = 1e-12);

// He_j(x) by the explicit coefficient sum over descending powers.
double hermite_he_direct(int j, double x);

// Distance from v to the convex hull of columns (column-major J x ncols),
// by exhaustive enumeration of vertex subsets up to size J+1: the optimal
// face appears among them (Caratheodory), and on each subset the affine
// optimum is accepted only when its barycentric weights are feasible.
double hull_distance_enumerated(const std::vector<double>& v,
                                const std::vector<double>& columns, int J);

// Literal simplex-mesh search with `steps` subdivisions per weight; only
// sensible for very few columns.
double hull_distance_mesh(const std::vector<double>& v, const std::vector<double>& columns,
                          int J, int steps);

}  // namespace oracles

#endif

#ifndef TCURVE_SPECTRAL_HPP
#define TCURVE_SPECTRAL_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "tcurve/hermite.hpp"
#include "tcurve/preprocess.hpp"

namespace tcurve {

// The J weighted Hermite coefficients of a sample:
//   theta_j = (1/n) sum_i psi_j(t_i) phi_{sigma_Y^2}(t_i)
struct ThetaVector {
    std::vector<double> coeffs;
    std::size_t n_effective = 0;
};

// Candidate coefficient vectors u_x on a grid over [-L, L], plus the
// all-zeros column (the h = infinity limit), and the certified
// discretization error of the grid.
struct BasisSet {
    int J = 0;
    double sigma_y2 = 1.0;
    double L = 0.0;
    double delta = 0.0;    // grid spacing 2L/(M-1)
    double epsilon = 0.0;  // certified hull-discretization error
    std::vector<double> grid;     // M points, endpoints included
    std::vector<double> columns;  // column-major J x (M+1); zero column last

    std::size_t num_columns() const { return grid.size() + 1; }
    const double* column(std::size_t c) const { return columns.data() + c * J; }

    // largest eigenvalue of B B^T; solver step size (filled by build_basis)
    double gram_spectral_norm = 0.0;
};

// Empirical coefficient vector. The sample must be transformed unless the
// caller explicitly passes allow_raw. Parallel over fixed-size chunks of
// the flattened score array; the chunk partial sums are reduced in index
// order, so the result does not depend on the thread count.
ThetaVector compute_theta(const MetaSample& sample, const HermiteContext& ctx,
                          bool allow_raw = false);

// Single-threaded reference implementation (kept for tests/benchmarks).
ThetaVector compute_theta_serial(const MetaSample& sample, const HermiteContext& ctx,
                                 bool allow_raw = false);

// u_{x,j} = eta_j * chi_j(x) * phi_{sigma_Y^2+1}(x) for j = 0..ctx.J-1.
std::vector<double> basis_vector(double x, const HermiteContext& ctx);

// Grid of M evenly spaced points spanning [-L, L] inclusive; one u_x column
// per point plus the zero column; epsilon = grid_epsilon(L, 2L/(M-1), sigma_Y^2).
// Columns are built in parallel over grid points.
BasisSet build_basis(const HermiteContext& ctx, double L, int M);
BasisSet build_basis_serial(const HermiteContext& ctx, double L, int M);

// Certified hull-discretization error: max of the out-of-range term at L
// and the spacing term at delta, both closed-form Gaussian integrals.
double grid_epsilon(double L, double delta, double sigma_y2);

// First J2 coordinates of every column (epsilon is unchanged: the grid
// certificate holds uniformly in J).
BasisSet truncate_rows(const BasisSet& basis, int J2);

// Per-article partial sums of weighted psi values over a transformed
// sample; row-major m x J plus per-article score counts. One pass of the
// article bootstrap is then m index draws and m vector adds.
struct ArticleSums {
    std::vector<double> sums;  // m x J
    std::vector<std::size_t> counts;
    int J = 0;
    std::size_t m() const { return counts.size(); }
};
ArticleSums article_theta_sums(const MetaSample& transformed, const HermiteContext& ctx);

// JSON cache of a BasisSet keyed by (J, sigma_Y^2, L, M).
void save_basis(const BasisSet& basis, const std::string& path);
BasisSet load_basis(const std::string& path);
std::string basis_cache_name(int J, double sigma_y2, double L, int M);

}  // namespace tcurve

#endif

#include "tcurve/spectral.hpp"

#include <omp.h>

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace tcurve {

namespace {

// Even chunk size: symmetrized (|t|, -|t|) pairs are adjacent in the
// flattened array, so no chunk splits a pair and odd-j cancellation
// stays exact under any thread count.
constexpr std::size_t kThetaChunk = 1024;

std::vector<double> flatten_scores(const MetaSample& sample) {
    std::vector<double> flat;
    flat.reserve(sample.n);
    for (const auto& a : sample.articles)
        for (double t : a.scores) flat.push_back(t);
    return flat;
}

void require_usable(const MetaSample& sample, bool allow_raw, const char* who) {
    if (sample.n == 0) throw std::invalid_argument(std::string(who) + ": empty sample");
    if (!sample.transformed && !allow_raw)
        throw std::logic_error(std::string(who) +
                               ": sample is raw; transform it first or pass allow_raw");
}

double spectral_norm_bbt(const std::vector<double>& columns, int J) {
    const std::size_t ncols = columns.size() / J;
    std::vector<double> gram(static_cast<std::size_t>(J) * J, 0.0);
    for (std::size_t c = 0; c < ncols; ++c) {
        const double* col = columns.data() + c * J;
        for (int j = 0; j < J; ++j)
            for (int k = j; k < J; ++k) gram[j * J + k] += col[j] * col[k];
    }
    for (int j = 0; j < J; ++j)
        for (int k = 0; k < j; ++k) gram[j * J + k] = gram[k * J + j];

    std::vector<double> v(J, 1.0), w(J);
    double lambda = 0.0;
    for (int iter = 0; iter < 300; ++iter) {
        for (int j = 0; j < J; ++j) {
            double s = 0.0;
            for (int k = 0; k < J; ++k) s += gram[j * J + k] * v[k];
            w[j] = s;
        }
        const double norm = std::sqrt(std::inner_product(w.begin(), w.end(), w.begin(), 0.0));
        if (norm == 0.0) return 0.0;
        for (int j = 0; j < J; ++j) v[j] = w[j] / norm;
        if (std::abs(norm - lambda) < 1e-13 * norm && iter > 10) { lambda = norm; break; }
        lambda = norm;
    }
    return lambda;
}

}  // namespace

ThetaVector compute_theta_serial(const MetaSample& sample, const HermiteContext& ctx,
                                 bool allow_raw) {
    require_usable(sample, allow_raw, "compute_theta");
    const int J = ctx.J;
    ThetaVector theta;
    theta.coeffs.assign(J, 0.0);
    theta.n_effective = sample.n;
    std::vector<double> psi(J);
    const auto flat = flatten_scores(sample);
    for (std::size_t start = 0; start < flat.size(); start += kThetaChunk) {
        const std::size_t stop = std::min(flat.size(), start + kThetaChunk);
        std::vector<double> partial(J, 0.0);
        for (std::size_t i = start; i < stop; ++i) {
            psi_weighted_all(ctx, flat[i], psi);
            for (int j = 0; j < J; ++j) partial[j] += psi[j];
        }
        for (int j = 0; j < J; ++j) theta.coeffs[j] += partial[j];
    }
    const double inv_n = 1.0 / static_cast<double>(sample.n);
    for (auto& c : theta.coeffs) c *= inv_n;
    return theta;
}

ThetaVector compute_theta(const MetaSample& sample, const HermiteContext& ctx,
                          bool allow_raw) {
    require_usable(sample, allow_raw, "compute_theta");
    const int J = ctx.J;
    const auto flat = flatten_scores(sample);
    const std::size_t nchunks = (flat.size() + kThetaChunk - 1) / kThetaChunk;
    std::vector<double> partials(nchunks * J, 0.0);

#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(nchunks); ++c) {
        std::vector<double> psi(J);
        double* partial = partials.data() + static_cast<std::size_t>(c) * J;
        const std::size_t start = static_cast<std::size_t>(c) * kThetaChunk;
        const std::size_t stop = std::min(flat.size(), start + kThetaChunk);
        for (std::size_t i = start; i < stop; ++i) {
            psi_weighted_all(ctx, flat[i], psi);
            for (int j = 0; j < J; ++j) partial[j] += psi[j];
        }
    }

    ThetaVector theta;
    theta.coeffs.assign(J, 0.0);
    theta.n_effective = sample.n;
    for (std::size_t c = 0; c < nchunks; ++c)
        for (int j = 0; j < J; ++j) theta.coeffs[j] += partials[c * J + j];
    const double inv_n = 1.0 / static_cast<double>(sample.n);
    for (auto& x : theta.coeffs) x *= inv_n;
    return theta;
}

std::vector<double> basis_vector(double x, const HermiteContext& ctx) {
    if (!std::isfinite(x)) {
        // h = infinity limit: the zero vector
        return std::vector<double>(ctx.J, 0.0);
    }
    std::vector<double> u(ctx.J);
    chi_weighted_all(ctx, x, u);
    for (int j = 0; j < ctx.J; ++j) u[j] *= ctx.eta_table[j];
    return u;
}

double grid_epsilon(double L, double delta, double sigma_y2) {
    if (!(L > 0.0) || !(delta > 0.0))
        throw std::invalid_argument("grid_epsilon: L and delta must be > 0");
    const double range_term = y_norm_gaussian_diff(L, std::numeric_limits<double>::infinity(),
                                                   sigma_y2);
    const double spacing_term = y_norm_gaussian_diff(1.0, 1.0 - 0.5 * delta, sigma_y2);
    return std::max(range_term, spacing_term);
}

namespace {

BasisSet build_basis_impl(const HermiteContext& ctx, double L, int M, bool parallel) {
    if (!(L > 0.0)) throw std::invalid_argument("build_basis: L must be > 0");
    if (M < 2) throw std::invalid_argument("build_basis: M must be >= 2");
    const int J = ctx.J;
    BasisSet basis;
    basis.J = J;
    basis.sigma_y2 = ctx.sigma_y2;
    basis.L = L;
    basis.delta = 2.0 * L / (M - 1);
    basis.grid.resize(M);
    for (int i = 0; i < M; ++i) basis.grid[i] = -L + i * basis.delta;
    basis.grid.back() = L;  // exact endpoint
    basis.columns.assign(static_cast<std::size_t>(J) * (M + 1), 0.0);

#pragma omp parallel for schedule(static) if (parallel)
    for (int i = 0; i < M; ++i) {
        const auto u = basis_vector(basis.grid[i], ctx);
        double* col = basis.columns.data() + static_cast<std::size_t>(i) * J;
        for (int j = 0; j < J; ++j) col[j] = u[j];
    }
    // column M stays all-zero (h = infinity)

    basis.epsilon = grid_epsilon(L, basis.delta, ctx.sigma_y2);
    basis.gram_spectral_norm = spectral_norm_bbt(basis.columns, J);
    return basis;
}

}  // namespace

BasisSet build_basis(const HermiteContext& ctx, double L, int M) {
    return build_basis_impl(ctx, L, M, true);
}

BasisSet build_basis_serial(const HermiteContext& ctx, double L, int M) {
    return build_basis_impl(ctx, L, M, false);
}

BasisSet truncate_rows(const BasisSet& basis, int J2) {
    if (J2 < 1 || J2 > basis.J) throw std::invalid_argument("truncate_rows: bad J2");
    BasisSet out;
    out.J = J2;
    out.sigma_y2 = basis.sigma_y2;
    out.L = basis.L;
    out.delta = basis.delta;
    out.epsilon = basis.epsilon;
    out.grid = basis.grid;
    const std::size_t ncols = basis.num_columns();
    out.columns.resize(static_cast<std::size_t>(J2) * ncols);
    for (std::size_t c = 0; c < ncols; ++c)
        for (int j = 0; j < J2; ++j) out.columns[c * J2 + j] = basis.columns[c * basis.J + j];
    out.gram_spectral_norm = spectral_norm_bbt(out.columns, J2);
    return out;
}

ArticleSums article_theta_sums(const MetaSample& transformed, const HermiteContext& ctx) {
    if (!transformed.transformed)
        throw std::logic_error("article_theta_sums: sample must be transformed");
    const int J = ctx.J;
    const std::size_t m = transformed.articles.size();
    ArticleSums sums;
    sums.J = J;
    sums.sums.assign(m * J, 0.0);
    sums.counts.resize(m);

#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t a = 0; a < static_cast<std::ptrdiff_t>(m); ++a) {
        std::vector<double> psi(J);
        const auto& article = transformed.articles[a];
        double* row = sums.sums.data() + static_cast<std::size_t>(a) * J;
        for (double t : article.scores) {
            psi_weighted_all(ctx, t, psi);
            for (int j = 0; j < J; ++j) row[j] += psi[j];
        }
        sums.counts[a] = article.scores.size();
    }
    return sums;
}

std::string basis_cache_name(int J, double sigma_y2, double L, int M) {
    std::ostringstream name;
    name.precision(17);
    name << "basis_J" << J << "_s" << sigma_y2 << "_L" << L << "_M" << M << ".json";
    return name.str();
}

void save_basis(const BasisSet& basis, const std::string& path) {
    nlohmann::json j;
    j["J"] = basis.J;
    j["sigma_y2"] = basis.sigma_y2;
    j["L"] = basis.L;
    j["M"] = basis.grid.size();
    j["delta"] = basis.delta;
    j["epsilon"] = basis.epsilon;
    j["gram_spectral_norm"] = basis.gram_spectral_norm;
    j["grid"] = basis.grid;
    j["columns"] = basis.columns;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_basis: cannot write '" + path + "'");
    out << j.dump();
}

BasisSet load_basis(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_basis: cannot open '" + path + "'");
    nlohmann::json j;
    in >> j;
    BasisSet basis;
    basis.J = j.at("J").get<int>();
    basis.sigma_y2 = j.at("sigma_y2").get<double>();
    basis.L = j.at("L").get<double>();
    basis.delta = j.at("delta").get<double>();
    basis.epsilon = j.at("epsilon").get<double>();
    basis.gram_spectral_norm = j.at("gram_spectral_norm").get<double>();
    basis.grid = j.at("grid").get<std::vector<double>>();
    basis.columns = j.at("columns").get<std::vector<double>>();
    if (basis.columns.size() != static_cast<std::size_t>(basis.J) * (basis.grid.size() + 1))
        throw std::runtime_error("load_basis: inconsistent dimensions in '" + path + "'");
    return basis;
}

}  // namespace tcurve

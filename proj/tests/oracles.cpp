#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace oracles {

namespace {

double simpson(const std::function<double(double)>& f, double a, double fa, double b,
               double fb, double m, double fm) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive(const std::function<double(double)>& f, double a, double fa, double b,
                double fb, double m, double fm, double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson(f, a, fa, m, fm, lm, flm);
    const double right = simpson(f, m, fm, b, fb, rm, frm);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
           adaptive(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
    // fixed pre-split so integrands concentrated away from the panel
    // endpoints cannot fool the refinement criterion
    constexpr int kPanels = 32;
    double total = 0.0;
    for (int panel = 0; panel < kPanels; ++panel) {
        const double pa = a + (b - a) * panel / kPanels;
        const double pb = a + (b - a) * (panel + 1) / kPanels;
        const double m = 0.5 * (pa + pb);
        const double fa = f(pa), fb = f(pb), fm = f(m);
        const double whole = simpson(f, pa, fa, pb, fb, m, fm);
        total += adaptive(f, pa, fa, pb, fb, m, fm, whole, tol / kPanels, 44);
    }
    return total;
}

double hermite_he_direct(int j, double x) {
    // He_j(x) = sum_l (-1)^l (2l)!/(2^l l!) C(j, 2l) x^(j-2l)
    double total = 0.0;
    for (int l = 0; 2 * l <= j; ++l) {
        double coeff = 1.0;
        for (int i = 1; i <= 2 * l; ++i) coeff *= i;           // (2l)!
        for (int i = 1; i <= l; ++i) coeff /= 2.0 * i;         // / (2^l l!)
        double binom = 1.0;
        for (int i = 0; i < 2 * l; ++i) binom = binom * (j - i) / (i + 1);
        total += ((l % 2) ? -1.0 : 1.0) * coeff * binom * std::pow(x, j - 2 * l);
    }
    return total;
}

namespace {

// equality-constrained LS on a subset of columns; returns false when the
// KKT system is singular (affinely dependent subset: skip it)
bool affine_candidate(const std::vector<double>& v, const std::vector<double>& columns,
                      int J, const std::vector<int>& subset, double& distance_out) {
    const int m = static_cast<int>(subset.size());
    const int n = m + 1;
    std::vector<double> A(static_cast<std::size_t>(n) * n, 0.0), x(n, 0.0);
    for (int a = 0; a < m; ++a) {
        const double* ca = columns.data() + static_cast<std::size_t>(subset[a]) * J;
        for (int b = a; b < m; ++b) {
            const double* cb = columns.data() + static_cast<std::size_t>(subset[b]) * J;
            double s = 0.0;
            for (int j = 0; j < J; ++j) s += ca[j] * cb[j];
            A[a * n + b] = A[b * n + a] = s;
        }
        double s = 0.0;
        for (int j = 0; j < J; ++j) s += ca[j] * v[j];
        x[a] = s;
        A[a * n + m] = A[m * n + a] = 1.0;
    }
    x[m] = 1.0;
    for (int c = 0; c < n; ++c) {
        int pr = c;
        double pv = std::abs(A[c * n + c]);
        for (int r = c + 1; r < n; ++r)
            if (std::abs(A[r * n + c]) > pv) pv = std::abs(A[r * n + c]), pr = r;
        if (pv < 1e-12) return false;
        if (pr != c) {
            for (int cc = 0; cc < n; ++cc) std::swap(A[pr * n + cc], A[c * n + cc]);
            std::swap(x[pr], x[c]);
        }
        for (int r = c + 1; r < n; ++r) {
            const double f = A[r * n + c] / A[c * n + c];
            if (f == 0.0) continue;
            for (int cc = c; cc < n; ++cc) A[r * n + cc] -= f * A[c * n + cc];
            x[r] -= f * x[c];
        }
    }
    for (int r = n - 1; r >= 0; --r) {
        double s = x[r];
        for (int cc = r + 1; cc < n; ++cc) s -= A[r * n + cc] * x[cc];
        x[r] = s / A[r * n + r];
    }
    for (int a = 0; a < m; ++a)
        if (x[a] < -1e-10) return false;  // infeasible face
    double d2 = 0.0;
    for (int j = 0; j < J; ++j) {
        double pj = 0.0;
        for (int a = 0; a < m; ++a)
            pj += x[a] * columns[static_cast<std::size_t>(subset[a]) * J + j];
        const double d = v[j] - pj;
        d2 += d * d;
    }
    distance_out = std::sqrt(d2);
    return true;
}

void enumerate_subsets(int ncols, int max_size, std::vector<int>& subset,
                       const std::function<void(const std::vector<int>&)>& visit, int from) {
    if (!subset.empty()) visit(subset);
    if (static_cast<int>(subset.size()) == max_size) return;
    for (int c = from; c < ncols; ++c) {
        subset.push_back(c);
        enumerate_subsets(ncols, max_size, subset, visit, c + 1);
        subset.pop_back();
    }
}

}  // namespace

double hull_distance_enumerated(const std::vector<double>& v,
                                const std::vector<double>& columns, int J) {
    const int ncols = static_cast<int>(columns.size()) / J;
    double best = std::numeric_limits<double>::infinity();
    std::vector<int> subset;
    enumerate_subsets(
        ncols, J + 1, subset,
        [&](const std::vector<int>& s) {
            double d = 0.0;
            if (affine_candidate(v, columns, J, s, d)) best = std::min(best, d);
        },
        0);
    return best;
}

double hull_distance_mesh(const std::vector<double>& v, const std::vector<double>& columns,
                          int J, int steps) {
    const int ncols = static_cast<int>(columns.size()) / J;
    if (ncols > 4) throw std::invalid_argument("hull_distance_mesh: too many columns");
    double best = std::numeric_limits<double>::infinity();
    std::vector<int> k(ncols, 0);
    std::function<void(int, int)> rec = [&](int idx, int remaining) {
        if (idx == ncols - 1) {
            k[idx] = remaining;
            double d2 = 0.0;
            for (int j = 0; j < J; ++j) {
                double pj = 0.0;
                for (int c = 0; c < ncols; ++c)
                    pj += (static_cast<double>(k[c]) / steps) *
                          columns[static_cast<std::size_t>(c) * J + j];
                const double d = v[j] - pj;
                d2 += d * d;
            }
            best = std::min(best, std::sqrt(d2));
            return;
        }
        for (int take = 0; take <= remaining; ++take) {
            k[idx] = take;
            rec(idx + 1, remaining - take);
        }
    };
    rec(0, steps);
    return best;
}

}  // namespace oracles

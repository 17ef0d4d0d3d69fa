#include "tcurve/projection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tcurve {

namespace {

struct Workspace {
    const BasisSet& basis;
    std::span<const double> v;
    int J;
    std::size_t ncols;

    const double* column(std::size_t c) const { return basis.column(c); }
    bool is_zero_column(std::size_t c) const { return c + 1 == ncols; }

    // p = B w  (skips zero weights; the zero column contributes nothing)
    void apply(const std::vector<double>& w, std::vector<double>& p) const {
        std::fill(p.begin(), p.end(), 0.0);
        for (std::size_t c = 0; c + 1 < ncols; ++c) {
            const double wc = w[c];
            if (wc == 0.0) continue;
            const double* col = column(c);
            for (int j = 0; j < J; ++j) p[j] += wc * col[j];
        }
    }

    void apply_transpose(const std::vector<double>& z, std::vector<double>& g) const {
        for (std::size_t c = 0; c + 1 < ncols; ++c) {
            const double* col = column(c);
            double s = 0.0;
            for (int j = 0; j < J; ++j) s += col[j] * z[j];
            g[c] = s;
        }
        g[ncols - 1] = 0.0;
    }

    double objective(const std::vector<double>& p) const {
        double f = 0.0;
        for (int j = 0; j < J; ++j) {
            const double d = p[j] - v[j];
            f += d * d;
        }
        return 0.5 * f;
    }

    // The raw residual satisfies kkt >= distance^2 whenever v lies in the
    // hull, so a flat threshold would accept hull members while the distance
    // is still ~sqrt(tol). Scaling by the current distance keeps the
    // certified distance error O(tol); the floor stays above the ~2e-17
    // roundoff of the residual computation itself.
    double stop_threshold(double tol, const std::vector<double>& p) const {
        const double d = std::sqrt(2.0 * objective(p));
        return tol * std::clamp(d, 1e-7, 1.0);
    }

    // Variational-inequality residual max_c (v-p).(c-p) and its argmax.
    std::pair<double, std::size_t> kkt(const std::vector<double>& p) const {
        double rp = 0.0;
        for (int j = 0; j < J; ++j) rp += (v[j] - p[j]) * p[j];
        double best = -rp;  // zero column
        std::size_t arg = ncols - 1;
        for (std::size_t c = 0; c + 1 < ncols; ++c) {
            const double* col = column(c);
            double s = 0.0;
            for (int j = 0; j < J; ++j) s += (v[j] - p[j]) * col[j];
            if (s - rp > best) {
                best = s - rp;
                arg = c;
            }
        }
        return {best, arg};
    }
};

// Active-set state: an affinely independent support plus a feasible weight
// vector on it. Sub-solves project v onto the affine hull via modified
// Gram-Schmidt against the directions (c_i - c_0); normal equations are
// useless here because neighboring grid columns are nearly collinear.
class ActiveSet {
public:
    ActiveSet(const Workspace& ws, long max_exchanges)
        : ws_(ws), max_exchanges_(max_exchanges) {}

    // Seed from a (possibly affinely dependent) support with weights; keeps
    // an independent subset. Returns false if nothing usable survives.
    bool seed(const std::vector<double>& w) {
        support_.clear();
        weights_.clear();
        for (std::size_t c = 0; c < ws_.ncols; ++c)
            if (w[c] > 1e-12) {
                support_.push_back(c);
                weights_.push_back(w[c]);
            }
        if (support_.empty()) {
            support_.push_back(ws_.ncols - 1);
            weights_.push_back(1.0);
        }
        thin_to_independent();
        double sum = std::accumulate(weights_.begin(), weights_.end(), 0.0);
        if (!(sum > 0.0)) {
            weights_.assign(support_.size(), 1.0 / support_.size());
        } else {
            for (auto& x : weights_) x /= sum;
        }
        return true;
    }

    // Lawson-Hanson outer loop: solve on the current face, drop coordinates
    // by feasibility line search, insert the most violating column. Stops
    // when the KKT residual passes the distance-scaled threshold or the
    // exchange budget runs out. iterations counts exchanges performed.
    bool run(double tol, long& iterations, long budget) {
        for (long exchange = 0; exchange < max_exchanges_; ++exchange) {
            if (iterations >= budget) return false;
            if (!inner_feasible_solve()) return false;
            ++iterations;
            std::vector<double> p(ws_.J);
            apply_support(p);
            auto [kkt, violator] = ws_.kkt(p);
            if (kkt <= ws_.stop_threshold(tol, p)) return true;
            if (std::find(support_.begin(), support_.end(), violator) != support_.end())
                return false;  // numerical stall; caller resumes gradient phase
            support_.push_back(violator);
            weights_.push_back(0.0);
        }
        return false;
    }

    void export_weights(std::vector<double>& w) const {
        std::fill(w.begin(), w.end(), 0.0);
        for (std::size_t i = 0; i < support_.size(); ++i) w[support_[i]] = weights_[i];
    }

private:
    void apply_support(std::vector<double>& p) const {
        std::fill(p.begin(), p.end(), 0.0);
        for (std::size_t i = 0; i < support_.size(); ++i) {
            if (ws_.is_zero_column(support_[i])) continue;
            const double* col = ws_.column(support_[i]);
            for (int j = 0; j < ws_.J; ++j) p[j] += weights_[i] * col[j];
        }
    }

    // Modified Gram-Schmidt over directions (c_i - c_0); drops columns whose
    // direction is numerically inside the span already built.
    void thin_to_independent() {
        const int J = ws_.J;
        if (support_.size() <= 1) return;
        std::vector<std::size_t> kept = {support_[0]};
        std::vector<double> kept_w = {weights_[0]};
        std::vector<std::vector<double>> q;  // orthonormal directions
        std::vector<double> dir(J);
        for (std::size_t i = 1; i < support_.size(); ++i) {
            load_direction(support_[i], support_[0], dir);
            double norm0 = std::sqrt(std::inner_product(dir.begin(), dir.end(), dir.begin(), 0.0));
            for (const auto& qk : q) {
                const double proj = std::inner_product(dir.begin(), dir.end(), qk.begin(), 0.0);
                for (int j = 0; j < J; ++j) dir[j] -= proj * qk[j];
            }
            const double norm = std::sqrt(std::inner_product(dir.begin(), dir.end(), dir.begin(), 0.0));
            if (norm > std::max(1e-10 * std::max(norm0, 1e-30), 1e-14) &&
                static_cast<int>(q.size()) < J) {
                for (auto& x : dir) x /= norm;
                q.push_back(dir);
                kept.push_back(support_[i]);
                kept_w.push_back(weights_[i]);
            }
        }
        support_ = std::move(kept);
        weights_ = std::move(kept_w);
    }

    void load_direction(std::size_t c, std::size_t base, std::vector<double>& dir) const {
        const int J = ws_.J;
        const double* cc = ws_.is_zero_column(c) ? nullptr : ws_.column(c);
        const double* cb = ws_.is_zero_column(base) ? nullptr : ws_.column(base);
        for (int j = 0; j < J; ++j)
            dir[j] = (cc ? cc[j] : 0.0) - (cb ? cb[j] : 0.0);
    }

    // Projection of v onto the affine hull of the support, expressed in
    // barycentric weights. MGS with stored R gives the triangular solve.
    // On numerical dependence, bad_index names the offending support slot
    // so the caller can drop it.
    bool affine_solve(std::vector<double>& bary, std::size_t& bad_index) const {
        const int J = ws_.J;
        const std::size_t m = support_.size();
        bary.assign(m, 0.0);
        bad_index = m;
        if (m == 1) {
            bary[0] = 1.0;
            return true;
        }
        const std::size_t d = m - 1;
        std::vector<std::vector<double>> q(d, std::vector<double>(J));
        std::vector<double> r(d * d, 0.0);  // upper triangular, row-major
        std::vector<double> dir(J);
        for (std::size_t i = 0; i < d; ++i) {
            load_direction(support_[i + 1], support_[0], dir);
            const double norm0 =
                std::sqrt(std::inner_product(dir.begin(), dir.end(), dir.begin(), 0.0));
            for (std::size_t k = 0; k < i; ++k) {
                const double proj =
                    std::inner_product(dir.begin(), dir.end(), q[k].begin(), 0.0);
                r[k * d + i] = proj;
                for (int j = 0; j < J; ++j) dir[j] -= proj * q[k][j];
            }
            const double norm = std::sqrt(std::inner_product(dir.begin(), dir.end(), dir.begin(), 0.0));
            if (!(norm > std::max(1e-12 * norm0, 1e-250))) {
                bad_index = i + 1;  // numerically inside the span already built
                return false;
            }
            r[i * d + i] = norm;
            for (int j = 0; j < J; ++j) q[i][j] = dir[j] / norm;
        }
        // coordinates of (v - c_0) in the q basis, then back-substitute
        std::vector<double> rhs(d);
        const double* c0 = ws_.is_zero_column(support_[0]) ? nullptr : ws_.column(support_[0]);
        std::vector<double> vc(J);
        for (int j = 0; j < J; ++j) vc[j] = ws_.v[j] - (c0 ? c0[j] : 0.0);
        for (std::size_t k = 0; k < d; ++k)
            rhs[k] = std::inner_product(vc.begin(), vc.end(), q[k].begin(), 0.0);
        std::vector<double> mu(d);
        for (std::size_t i = d; i-- > 0;) {
            double s = rhs[i];
            for (std::size_t k = i + 1; k < d; ++k) s -= r[i * d + k] * mu[k];
            mu[i] = s / r[i * d + i];
        }
        double sum = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            bary[i + 1] = mu[i];
            sum += mu[i];
        }
        bary[0] = 1.0 - sum;
        return true;
    }

    void drop_support(std::size_t position) {
        support_.erase(support_.begin() + position);
        weights_.erase(weights_.begin() + position);
        double sum = std::accumulate(weights_.begin(), weights_.end(), 0.0);
        if (sum > 0.0)
            for (auto& x : weights_) x /= sum;
        else if (!weights_.empty())
            weights_.assign(weights_.size(), 1.0 / weights_.size());
    }

    // Inner loop: move the feasible weights to the affine optimum, clipping
    // at the simplex boundary and dropping the coordinate that hits zero.
    bool inner_feasible_solve() {
        for (int pass = 0; pass < 4 * ws_.J + 8; ++pass) {
            std::vector<double> target;
            std::size_t bad_index = support_.size();
            if (!affine_solve(target, bad_index)) {
                if (bad_index >= support_.size()) return false;
                drop_support(bad_index);  // numerically redundant column
                if (support_.empty()) return false;
                continue;
            }
            double most_negative = -1e-12;
            for (double x : target) most_negative = std::min(most_negative, x);
            if (most_negative >= -1e-11) {
                for (auto& x : target) x = std::max(x, 0.0);
                double sum = std::accumulate(target.begin(), target.end(), 0.0);
                for (auto& x : target) x /= sum;
                weights_ = std::move(target);
                return true;
            }
            // line search from the current feasible point toward the target
            double alpha = 1.0;
            std::size_t hit = support_.size();
            for (std::size_t i = 0; i < support_.size(); ++i) {
                if (target[i] < 0.0 && weights_[i] > target[i]) {
                    const double a = weights_[i] / (weights_[i] - target[i]);
                    if (a < alpha) {
                        alpha = a;
                        hit = i;
                    }
                }
            }
            if (hit == support_.size()) return false;
            for (std::size_t i = 0; i < support_.size(); ++i)
                weights_[i] += alpha * (target[i] - weights_[i]);
            weights_[hit] = 0.0;
            support_.erase(support_.begin() + hit);
            weights_.erase(weights_.begin() + hit);
            if (support_.empty()) return false;
        }
        return false;
    }

    const Workspace& ws_;
    long max_exchanges_;
    std::vector<std::size_t> support_;
    std::vector<double> weights_;
};

}  // namespace

void project_onto_simplex(std::span<double> w) {
    const std::size_t n = w.size();
    std::vector<double> sorted(w.begin(), w.end());
    std::sort(sorted.begin(), sorted.end(), std::greater<double>());
    double running = 0.0;
    double threshold = sorted[0] - 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        running += sorted[i];
        const double t = (running - 1.0) / static_cast<double>(i + 1);
        if (sorted[i] - t > 0.0) threshold = t;
    }
    for (auto& x : w) x = std::max(0.0, x - threshold);
}

ProjectionResult project(std::span<const double> v, const BasisSet& basis,
                         const ProjectionOptions& options) {
    const int J = basis.J;
    if (static_cast<int>(v.size()) != J)
        throw std::invalid_argument("project: v must have basis.J entries");
    for (double x : v)
        if (!std::isfinite(x)) throw std::invalid_argument("project: v must be finite");
    if (!(options.tol > 0.0)) throw std::invalid_argument("project: tol must be > 0");

    Workspace ws{basis, v, J, basis.num_columns()};
    const std::size_t N = ws.ncols;
    const double step = 1.0 / std::max(basis.gram_spectral_norm * 1.01, 1e-30);

    std::vector<double> w(N, 0.0);
    if (options.warm_start && options.warm_start->size() == N) {
        w = *options.warm_start;
        project_onto_simplex(w);  // tolerate slightly off-simplex starts
    } else {
        w[N - 1] = 1.0;  // start at the zero column
    }

    std::vector<double> p(J), z(J), grad(N), w_next(N);
    std::vector<double> y(w), w_prev(w);
    double t_prev = 1.0;

    ws.apply(w, p);
    double f_prev = ws.objective(p);
    double kkt = ws.kkt(p).first;
    double best_kkt = kkt;
    std::vector<double> best_w = w;

    long iteration = 0;
    bool certified = kkt <= ws.stop_threshold(options.tol, p);
    constexpr int kBurst = 30;

    while (!certified && iteration < options.max_iterations) {
        // active-face exchange (Lawson-Hanson style); certifies most inputs
        // in a few dozen exchanges, warm starts in one or two
        ActiveSet active(ws, 4L * J + 64);
        active.seed(w);
        if (active.run(options.tol, iteration, options.max_iterations)) {
            active.export_weights(w);
            certified = true;
            break;
        }
        active.export_weights(w_next);
        ws.apply(w_next, p);
        if (ws.objective(p) < f_prev) {
            w = w_next;
            f_prev = ws.objective(p);
        }
        kkt = ws.kkt(p).first;
        if (kkt <= ws.stop_threshold(options.tol, p)) {
            w = w_next;
            certified = true;
            break;
        }
        if (kkt < best_kkt) {
            best_kkt = kkt;
            best_w = w_next;
        }

        // accelerated projected-gradient burst to reshape the support
        y = w;
        w_prev = w;
        t_prev = 1.0;
        ws.apply(w, p);
        f_prev = ws.objective(p);
        for (int s = 0; s < kBurst && iteration < options.max_iterations; ++s, ++iteration) {
            ws.apply(y, z);
            for (int j = 0; j < J; ++j) z[j] -= v[j];
            ws.apply_transpose(z, grad);
            for (std::size_t c = 0; c < N; ++c) w_next[c] = y[c] - step * grad[c];
            project_onto_simplex(w_next);
            ws.apply(w_next, p);
            const double f = ws.objective(p);
            double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_prev * t_prev));
            if (f > f_prev) {  // function-value restart
                t_prev = 1.0;
                t_next = 1.0;
                y = w_next;
            } else {
                const double momentum = (t_prev - 1.0) / t_next;
                for (std::size_t c = 0; c < N; ++c)
                    y[c] = w_next[c] + momentum * (w_next[c] - w_prev[c]);
            }
            w_prev = w_next;
            w.swap(w_next);
            f_prev = f;
            t_prev = t_next;
        }
        ws.apply(w, p);
        kkt = ws.kkt(p).first;
        if (kkt < best_kkt) {
            best_kkt = kkt;
            best_w = w;
        }
        certified = kkt <= ws.stop_threshold(options.tol, p);
    }

    if (!certified) {
        ws.apply(best_w, p);
        throw ProjectionError("project: no convergence within iteration budget",
                              std::sqrt(2.0 * ws.objective(p)), best_kkt);
    }

    ProjectionResult result;
    result.weights = std::move(w);
    result.projected_point.resize(J);
    ws.apply(result.weights, result.projected_point);
    result.distance = std::sqrt(2.0 * ws.objective(result.projected_point));
    result.kkt_residual = std::max(0.0, ws.kkt(result.projected_point).first);
    result.iterations = iteration;
    return result;
}

double distance_only(std::span<const double> v, const BasisSet& basis,
                     const ProjectionOptions& options) {
    return project(v, basis, options).distance;
}

}  // namespace tcurve

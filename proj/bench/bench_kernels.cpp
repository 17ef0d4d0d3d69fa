// Benchmark of the OpenMP kernels against their serial references.
// Run with: bench_kernels [n_scores] (default 200000)

#include <omp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>

#include "tcurve/hermite.hpp"
#include "tcurve/inference.hpp"
#include "tcurve/simlab.hpp"
#include "tcurve/spectral.hpp"

using namespace tcurve;

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

template <class F>
double timed(F&& f) {
    const auto start = std::chrono::steady_clock::now();
    f();
    return seconds_since(start);
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    return worst;
}

}  // namespace

int main(int argc, char** argv) {
    const std::size_t n = argc > 1 ? std::stoull(argv[1]) : 200000;
    const int threads = omp_get_max_threads();
    printf("threads: %d, sample size: %zu\n\n", threads, n);

    HermiteContext ctx(1.0, 30);

    DgpSpec dgp;
    dgp.effect = EffectDist::point(2.0);
    dgp.noise = NoiseDist::normal();
    dgp.selection = SelectionRule::none();
    dgp.n_target = n;
    const MetaSample raw = simulate_sample(dgp, 7);
    const MetaSample sample = transform(raw, PreprocessSpec{});

    printf("%-22s %10s %10s %8s %12s\n", "kernel", "serial(s)", "openmp(s)", "speedup", "max|diff|");

    {
        ThetaVector serial, parallel;
        const double ts = timed([&] { serial = compute_theta_serial(sample, ctx); });
        const double tp = timed([&] { parallel = compute_theta(sample, ctx); });
        printf("%-22s %10.3f %10.3f %7.2fx %12.3e\n", "compute_theta", ts, tp, ts / tp,
               max_abs_diff(serial.coeffs, parallel.coeffs));
    }

    {
        BasisSet serial, parallel;
        const double ts = timed([&] { serial = build_basis_serial(ctx, 6.5, 30000); });
        const double tp = timed([&] { parallel = build_basis(ctx, 6.5, 30000); });
        printf("%-22s %10.3f %10.3f %7.2fx %12.3e\n", "build_basis (M=30000)", ts, tp, ts / tp,
               max_abs_diff(serial.columns, parallel.columns));
    }

    {
        const BasisSet basis = build_basis(ctx, 6.5, 3000);
        BootstrapConfig cfg;
        cfg.reps = 400;
        cfg.seed = 99;
        const PointEstimate point = point_estimate(raw, PreprocessSpec{}, ctx, basis);
        std::vector<double> serial, parallel;
        omp_set_num_threads(1);
        const double ts =
            timed([&] { serial = bootstrap_distribution(raw, PreprocessSpec{}, ctx, basis, cfg, point); });
        omp_set_num_threads(threads);
        const double tp =
            timed([&] { parallel = bootstrap_distribution(raw, PreprocessSpec{}, ctx, basis, cfg, point); });
        printf("%-22s %10.3f %10.3f %7.2fx %12.3e\n", "bootstrap (400 reps)", ts, tp, ts / tp,
               max_abs_diff(serial, parallel));
    }

    return 0;
}

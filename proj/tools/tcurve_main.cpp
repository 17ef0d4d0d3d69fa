// tcurve: distortion test for meta-analytic t-score distributions.
//
// Subcommands: test, simulate, power-curve, delta, basis-info.

#include <omp.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tcurve/edgeworth.hpp"
#include "tcurve/hermite.hpp"
#include "tcurve/inference.hpp"
#include "tcurve/preprocess.hpp"
#include "tcurve/projection.hpp"
#include "tcurve/simlab.hpp"
#include "tcurve/spectral.hpp"

namespace {

struct CommonFlags {
    int J = 30;
    double sigma_y2 = 1.0;
    double L = 6.5;
    int grid = 3000;
    int reps = 1000;
    double alpha = 0.05;
    double delta = 0.0;
    std::uint64_t seed = 0;
    double shift = 1.96;
    bool no_symmetrize = false;
    int threads = 0;
    std::string cache_dir;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--J", flags.J, "spectral truncation level")->check(CLI::PositiveNumber);
    cmd->add_option("--sigma-y2", flags.sigma_y2, "variance of the Y-norm weight")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--L", flags.L, "half-width of the h-grid")->check(CLI::PositiveNumber);
    cmd->add_option("--grid", flags.grid, "number of grid points M")->check(CLI::Range(2, 1000000));
    cmd->add_option("--reps", flags.reps, "bootstrap replications")->check(CLI::PositiveNumber);
    cmd->add_option("--alpha", flags.alpha, "test size")->check(CLI::Range(1e-6, 0.999999));
    cmd->add_option("--delta", flags.delta, "misspecification allowance added to the critical value")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--seed", flags.seed, "master RNG seed");
    cmd->add_option("--shift", flags.shift, "subtracted from every score after symmetrization");
    cmd->add_flag("--no-symmetrize", flags.no_symmetrize, "skip the (|t|, -|t|) symmetrization");
    cmd->add_option("--threads", flags.threads, "worker threads (default: machine parallelism)");
    cmd->add_option("--cache-dir", flags.cache_dir, "directory for cached basis sets");
}

void apply_threads(const CommonFlags& flags) {
    if (flags.threads > 0) omp_set_num_threads(flags.threads);
}

tcurve::BasisSet obtain_basis(const CommonFlags& flags, const tcurve::HermiteContext& ctx) {
    namespace fs = std::filesystem;
    if (!flags.cache_dir.empty()) {
        const fs::path dir(flags.cache_dir);
        const fs::path file =
            dir / tcurve::basis_cache_name(flags.J, flags.sigma_y2, flags.L, flags.grid);
        if (fs::exists(file)) {
            try {
                tcurve::BasisSet basis = tcurve::load_basis(file.string());
                if (basis.J == flags.J && basis.sigma_y2 == flags.sigma_y2 &&
                    basis.L == flags.L &&
                    static_cast<int>(basis.grid.size()) == flags.grid)
                    return basis;
            } catch (const std::exception& e) {
                std::cerr << "warning: ignoring unreadable basis cache: " << e.what() << "\n";
            }
        }
        tcurve::BasisSet basis = tcurve::build_basis(ctx, flags.L, flags.grid);
        std::error_code ec;
        fs::create_directories(dir, ec);
        try {
            tcurve::save_basis(basis, file.string());
        } catch (const std::exception& e) {
            std::cerr << "warning: could not write basis cache: " << e.what() << "\n";
        }
        return basis;
    }
    return tcurve::build_basis(ctx, flags.L, flags.grid);
}

tcurve::PreprocessSpec preprocess_of(const CommonFlags& flags) {
    tcurve::PreprocessSpec pre;
    pre.symmetrize = !flags.no_symmetrize;
    pre.shift = flags.shift;
    return pre;
}

tcurve::BootstrapConfig bootstrap_of(const CommonFlags& flags) {
    if (flags.reps < 100)
        std::cerr << "warning: " << flags.reps
                  << " bootstrap replications is below the recommended minimum of 100\n";
    tcurve::BootstrapConfig cfg;
    cfg.reps = flags.reps;
    cfg.seed = flags.seed;
    cfg.alpha = flags.alpha;
    cfg.delta_misspec = flags.delta;
    return cfg;
}

// effect spec: "point:H" or "mix:w:mean:var[,w:mean:var...]"
tcurve::EffectDist parse_effect(const std::string& text) {
    if (text.rfind("point:", 0) == 0)
        return tcurve::EffectDist::point(std::stod(text.substr(6)));
    if (text.rfind("mix:", 0) == 0) {
        std::vector<tcurve::MixtureComponent> components;
        std::stringstream ss(text.substr(4));
        std::string part;
        while (std::getline(ss, part, ',')) {
            tcurve::MixtureComponent c;
            if (std::sscanf(part.c_str(), "%lf:%lf:%lf", &c.weight, &c.mean, &c.variance) != 3)
                throw CLI::ValidationError("--effect", "expected w:mean:var triples");
            components.push_back(c);
        }
        return tcurve::EffectDist::mixture(std::move(components));
    }
    throw CLI::ValidationError("--effect", "expected point:H or mix:w:mean:var,...");
}

// noise spec: "normal" or "t:NU"
tcurve::NoiseDist parse_noise(const std::string& text) {
    if (text == "normal") return tcurve::NoiseDist::normal();
    if (text.rfind("t:", 0) == 0) return tcurve::NoiseDist::student(std::stoi(text.substr(2)));
    throw CLI::ValidationError("--noise", "expected normal or t:NU");
}

// selection spec: "none", "pb:Q", "threshold:PROB:RHO", "max:RHO"
tcurve::SelectionRule parse_selection(const std::string& text) {
    if (text == "none") return tcurve::SelectionRule::none();
    if (text.rfind("pb:", 0) == 0)
        return tcurve::SelectionRule::publication_bias(std::stod(text.substr(3)));
    if (text.rfind("threshold:", 0) == 0) {
        double prob = 0.0, rho = 0.0;
        if (std::sscanf(text.c_str(), "threshold:%lf:%lf", &prob, &rho) != 2)
            throw CLI::ValidationError("--selection", "expected threshold:PROB:RHO");
        return tcurve::SelectionRule::threshold_phack(prob, rho);
    }
    if (text.rfind("max:", 0) == 0)
        return tcurve::SelectionRule::maximization_phack(std::stod(text.substr(4)));
    throw CLI::ValidationError("--selection", "expected none, pb:Q, threshold:PROB:RHO or max:RHO");
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << text;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"projection test for selective reporting in meta-analytic t-scores"};
    app.require_subcommand(1);

    // --- test ---
    auto* test_cmd = app.add_subcommand("test", "run the projection test on a CSV of t-scores");
    std::string csv_path, out_path;
    std::size_t article_cap = 0;
    CommonFlags test_flags;
    test_cmd->add_option("csv", csv_path, "input CSV with columns t,article_id")->required();
    add_common_flags(test_cmd, test_flags);
    test_cmd->add_option("--article-cap", article_cap,
                         "warn when an article reports more scores than this (0 = off)");
    test_cmd->add_option("--out", out_path, "also write the JSON report to this file");

    // --- simulate ---
    auto* sim_cmd = app.add_subcommand("simulate", "draw a meta-sample from a selective-reporting DGP");
    std::string sim_out, effect_text = "point:2", noise_text = "normal", selection_text = "none";
    std::size_t sim_n = 5000;
    int scores_per_article = 1;
    std::uint64_t sim_seed = 0;
    sim_cmd->add_option("--out", sim_out, "output CSV path")->required();
    sim_cmd->add_option("--n", sim_n, "number of reported scores")->check(CLI::PositiveNumber);
    sim_cmd->add_option("--effect", effect_text, "point:H or mix:w:mean:var,...");
    sim_cmd->add_option("--noise", noise_text, "normal or t:NU");
    sim_cmd->add_option("--selection", selection_text, "none, pb:Q, threshold:PROB:RHO, max:RHO");
    sim_cmd->add_option("--scores-per-article", scores_per_article)->check(CLI::PositiveNumber);
    sim_cmd->add_option("--seed", sim_seed, "RNG seed");

    // --- power-curve ---
    auto* power_cmd = app.add_subcommand("power-curve", "rejection rate against severity");
    CommonFlags power_flags;
    std::string family_text = "pb", power_out;
    std::string power_effect = "point:2", power_noise = "normal";
    std::vector<double> severities{0.0, 0.25, 0.5, 0.75, 1.0};
    double family_rho = 0.0;
    int sims = 100;
    std::size_t power_n = 5000;
    bool reuse_cv = false;
    add_common_flags(power_cmd, power_flags);
    power_cmd->add_option("--family", family_text, "pb or threshold (severity = q or prob)");
    power_cmd->add_option("--severities", severities, "severity values to sweep")->delimiter(',');
    power_cmd->add_option("--sims", sims, "simulations per severity")->check(CLI::PositiveNumber);
    power_cmd->add_option("--n", power_n, "scores per simulated sample")->check(CLI::PositiveNumber);
    power_cmd->add_option("--effect", power_effect, "effect distribution");
    power_cmd->add_option("--noise", power_noise, "noise distribution");
    power_cmd->add_option("--rho", family_rho, "pair correlation for the threshold family");
    power_cmd->add_flag("--reuse-cv", reuse_cv,
                        "bootstrap once per severity and reuse that critical value");
    power_cmd->add_option("--out", power_out, "write the CSV here instead of stdout");

    // --- delta ---
    auto* delta_cmd = app.add_subcommand("delta", "Y-norm distance of Student-t noise from normal");
    int delta_nu = 50;
    double delta_sigma = 1.0, h_max = 8.0, h_step = 0.05;
    delta_cmd->add_option("--nu", delta_nu, "degrees of freedom")->check(CLI::Range(3, 100000000));
    delta_cmd->add_option("--sigma-y2", delta_sigma)->check(CLI::PositiveNumber);
    delta_cmd->add_option("--h-max", h_max, "location grid upper end")->check(CLI::NonNegativeNumber);
    delta_cmd->add_option("--h-step", h_step, "location grid step")->check(CLI::PositiveNumber);

    // --- basis-info ---
    auto* basis_cmd = app.add_subcommand("basis-info", "grid certificate for a basis configuration");
    CommonFlags basis_flags;
    add_common_flags(basis_cmd, basis_flags);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*test_cmd) {
            apply_threads(test_flags);
            const tcurve::MetaSample sample = tcurve::load_csv(csv_path);
            if (article_cap > 0) {
                for (const auto& id : tcurve::articles_exceeding_cap(sample, article_cap))
                    std::cerr << "warning: article '" << id << "' exceeds the score cap of "
                              << article_cap << "\n";
            }
            const tcurve::HermiteContext ctx(test_flags.sigma_y2, test_flags.J);
            const tcurve::BasisSet basis = obtain_basis(test_flags, ctx);
            const tcurve::TestReport report = tcurve::run_test(
                sample, preprocess_of(test_flags), ctx, basis, bootstrap_of(test_flags));
            const std::string json = tcurve::report_to_json(report).dump(2);
            std::cout << json << "\n";
            std::cerr << tcurve::render_summary(report);
            if (!out_path.empty()) write_text(out_path, json + "\n");
        } else if (*sim_cmd) {
            tcurve::DgpSpec dgp;
            dgp.effect = parse_effect(effect_text);
            dgp.noise = parse_noise(noise_text);
            dgp.selection = parse_selection(selection_text);
            dgp.n_target = sim_n;
            dgp.scores_per_article = scores_per_article;
            const tcurve::MetaSample sample = tcurve::simulate_sample(dgp, sim_seed);
            std::ostringstream csv;
            csv.precision(17);
            csv << "t,article_id\n";
            for (const auto& article : sample.articles)
                for (double t : article.scores) csv << t << ',' << article.id << '\n';
            write_text(sim_out, csv.str());
            std::cerr << "wrote " << sample.n << " scores over " << sample.m() << " articles to "
                      << sim_out << "\n";
        } else if (*power_cmd) {
            apply_threads(power_flags);
            tcurve::DgpSpec family;
            family.effect = parse_effect(power_effect);
            family.noise = parse_noise(power_noise);
            family.selection = (family_text == "pb")
                                   ? tcurve::SelectionRule::publication_bias(0.0)
                                   : tcurve::SelectionRule::threshold_phack(0.0, family_rho);
            if (family_text != "pb" && family_text != "threshold")
                throw CLI::ValidationError("--family", "expected pb or threshold");
            family.n_target = power_n;
            const tcurve::HermiteContext ctx(power_flags.sigma_y2, power_flags.J);
            const tcurve::BasisSet basis = obtain_basis(power_flags, ctx);
            tcurve::PowerCurveConfig cfg;
            cfg.severities = severities;
            cfg.sims = sims;
            cfg.reuse_cv = reuse_cv;
            cfg.pre = preprocess_of(power_flags);
            cfg.boot = bootstrap_of(power_flags);
            const auto points = tcurve::power_curve(family, ctx, basis, cfg);
            const std::string csv = tcurve::power_curve_csv(points);
            if (power_out.empty())
                std::cout << csv;
            else
                write_text(power_out, csv);
            // the CSV schema is fixed; echo the effective configuration aside
            nlohmann::json echo;
            echo["family"] = family_text;
            echo["severities"] = severities;
            echo["sims"] = sims;
            echo["n"] = power_n;
            echo["effect"] = power_effect;
            echo["noise"] = power_noise;
            echo["rho"] = family_rho;
            echo["reuse_cv"] = reuse_cv;
            echo["J"] = power_flags.J;
            echo["sigma_y2"] = power_flags.sigma_y2;
            echo["L"] = power_flags.L;
            echo["M"] = power_flags.grid;
            echo["reps"] = power_flags.reps;
            echo["alpha"] = power_flags.alpha;
            echo["delta"] = power_flags.delta;
            echo["seed"] = power_flags.seed;
            echo["shift"] = power_flags.shift;
            echo["symmetrize"] = !power_flags.no_symmetrize;
            echo["threads"] = omp_get_max_threads();
            std::cerr << echo.dump() << "\n";
        } else if (*delta_cmd) {
            std::vector<double> grid;
            for (double h = 0.0; h <= h_max + 1e-12; h += h_step) grid.push_back(h);
            const double delta = tcurve::delta_student_t(delta_nu, delta_sigma, grid);
            nlohmann::json j;
            j["delta"] = delta;
            j["nu"] = delta_nu;
            j["sigma_y2"] = delta_sigma;
            j["h_max"] = h_max;
            j["h_step"] = h_step;
            std::cout << j.dump(2) << "\n";
        } else if (*basis_cmd) {
            apply_threads(basis_flags);
            const tcurve::HermiteContext ctx(basis_flags.sigma_y2, basis_flags.J);
            const tcurve::BasisSet basis = obtain_basis(basis_flags, ctx);
            nlohmann::json j;
            j["J"] = basis.J;
            j["sigma_y2"] = basis.sigma_y2;
            j["L"] = basis.L;
            j["M"] = basis.grid.size();
            j["delta"] = basis.delta;
            j["epsilon"] = basis.epsilon;
            std::cout << j.dump(2) << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

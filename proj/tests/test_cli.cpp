#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#ifndef TCURVE_BIN
#error "TCURVE_BIN must point at the tcurve executable"
#endif

namespace {

namespace fs = std::filesystem;

struct RunResult {
    int exit_code;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

RunResult run_cli(const std::string& args) {
    const fs::path dir = fs::temp_directory_path();
    const fs::path out = dir / "tcurve_cli_out.txt";
    const fs::path err = dir / "tcurve_cli_err.txt";
    const std::string command = std::string(TCURVE_BIN) + " " + args + " > " + out.string() +
                                " 2> " + err.string();
    const int status = std::system(command.c_str());
    return RunResult{status == 0 ? 0 : 1, slurp(out), slurp(err)};
}

fs::path write_csv(const std::string& name, const std::string& body) {
    const fs::path path = fs::temp_directory_path() / name;
    std::ofstream out(path);
    out << body;
    return path;
}

}  // namespace

TEST_CASE("test subcommand emits a well-formed report for a toy sample") {
    const fs::path csv =
        write_csv("cli_toy.csv", "t,article_id\n2.1,a\n-0.4,a\n1.7,b\n3.2,c\n");
    const auto result =
        run_cli("test " + csv.string() + " --reps 50 --J 5 --grid 200 --seed 9");
    REQUIRE(result.exit_code == 0);
    const auto report = nlohmann::json::parse(result.out);
    for (const char* key :
         {"statistic", "epsilon", "critical_value", "p_value", "breakdown", "bsd", "reject", "n",
          "m", "J", "sigma_y2", "L", "M", "reps", "seed", "alpha", "delta"})
        CHECK(report.contains(key));
    CHECK(report["n"] == 4);
    CHECK(report["m"] == 3);
    CHECK(report["J"] == 5);
    CHECK(report["reps"] == 50);
    CHECK(report["seed"] == 9);
    CHECK(result.err.find("statistic") != std::string::npos);
}

TEST_CASE("identical invocations are byte-identical") {
    const fs::path csv = write_csv("cli_rep.csv", "t,article_id\n2.1,a\n-0.4,b\n0.9,c\n1.1,d\n");
    const std::string args = "test " + csv.string() + " --reps 40 --J 6 --grid 150 --seed 3";
    const auto first = run_cli(args);
    const auto second = run_cli(args);
    REQUIRE(first.exit_code == 0);
    CHECK(first.out == second.out);
}

TEST_CASE("I/O failures exit nonzero with a message") {
    const auto missing = run_cli("test /no/such/file.csv --reps 10");
    CHECK(missing.exit_code == 1);
    CHECK(missing.err.find("error") != std::string::npos);

    const fs::path bad = write_csv("cli_bad.csv", "t,article_id\nNaN,a\n");
    const auto malformed = run_cli("test " + bad.string() + " --reps 10");
    CHECK(malformed.exit_code == 1);
    CHECK(malformed.err.find("row 2") != std::string::npos);
}

TEST_CASE("simulate and test round-trip; a fixed null seed does not reject") {
    const fs::path csv = fs::temp_directory_path() / "cli_null.csv";
    const auto sim = run_cli("simulate --out " + csv.string() +
                             " --n 2000 --effect point:2 --noise normal --selection none --seed 4");
    REQUIRE(sim.exit_code == 0);
    const auto test = run_cli("test " + csv.string() + " --reps 200 --J 20 --grid 800 --seed 12");
    REQUIRE(test.exit_code == 0);
    const auto report = nlohmann::json::parse(test.out);
    CHECK(report["reject"] == false);
    CHECK(report["n"] == 2000);
}

TEST_CASE("smoothing-parameter sensitivity runs: J=30 and J=20 reports from one CSV") {
    const fs::path csv = fs::temp_directory_path() / "cli_nullJ.csv";
    const auto sim = run_cli("simulate --out " + csv.string() +
                             " --n 1500 --effect point:2 --selection none --seed 8");
    REQUIRE(sim.exit_code == 0);
    const auto j30 = run_cli("test " + csv.string() + " --reps 120 --J 30 --grid 600 --seed 2");
    const auto j20 = run_cli("test " + csv.string() + " --reps 120 --J 20 --grid 600 --seed 2");
    REQUIRE(j30.exit_code == 0);
    REQUIRE(j20.exit_code == 0);
    const auto r30 = nlohmann::json::parse(j30.out);
    const auto r20 = nlohmann::json::parse(j20.out);
    CHECK(r30["J"] == 30);
    CHECK(r20["J"] == 20);
    CHECK(r30["reject"] == r20["reject"]);  // same (null) conclusion at both J
}

TEST_CASE("power-curve writes the documented CSV header") {
    const auto result = run_cli(
        "power-curve --family pb --severities 0,0.5,1 --sims 3 --n 300 --reps 30 --J 8 "
        "--grid 150 --reuse-cv --seed 2");
    REQUIRE(result.exit_code == 0);
    CHECK(result.out.rfind("severity,rejection_rate,sims,n\n", 0) == 0);
    int lines = 0;
    for (char c : result.out)
        if (c == '\n') ++lines;
    CHECK(lines == 4);  // header + 3 rows
}

TEST_CASE("delta subcommand reports the Student-t allowance") {
    const auto result = run_cli("delta --nu 50");
    REQUIRE(result.exit_code == 0);
    const auto j = nlohmann::json::parse(result.out);
    CHECK(j["delta"].get<double>() == doctest::Approx(0.0022).epsilon(0.25));
    CHECK(j["nu"] == 50);
}

TEST_CASE("basis-info reports the certificate and honors the cache directory") {
    const fs::path cache = fs::temp_directory_path() / "tcurve_cache_test";
    fs::remove_all(cache);
    const std::string args =
        "basis-info --J 10 --grid 500 --cache-dir " + cache.string();
    const auto first = run_cli(args);
    REQUIRE(first.exit_code == 0);
    const auto j = nlohmann::json::parse(first.out);
    CHECK(j["epsilon"].get<double>() == doctest::Approx(0.00037).epsilon(0.15));
    CHECK(fs::exists(cache));
    bool cached_file = false;
    for (const auto& entry : fs::directory_iterator(cache))
        if (entry.path().extension() == ".json") cached_file = true;
    CHECK(cached_file);
    // second call loads the cache and reports identical numbers
    const auto second = run_cli(args);
    CHECK(second.out == first.out);
}

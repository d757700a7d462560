#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "srr/cli.hpp"

namespace fs = std::filesystem;
using srr::cli::run;

namespace {

struct Result {
    int code;
    std::string out, err;
};

Result invoke(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("srr_cli_test_" + name + "_" + std::to_string(std::random_device{}()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::vector<std::string> read_lines(const fs::path& p) {
    std::ifstream in(p);
    std::vector<std::string> lines;
    for (std::string s; std::getline(in, s);) lines.push_back(s);
    return lines;
}

std::vector<double> split_doubles(const std::string& line) {
    std::vector<double> v;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) v.push_back(std::stod(cell));
    return v;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST_CASE("calibrate") {
    const auto dir = scratch("calibrate");
    auto r = invoke({"calibrate", "--gamma", "5", "--out", dir.string()});
    CHECK(r.code == 0);
    auto lines = read_lines(dir / "calibration.csv");
    REQUIRE(lines.size() == 2);
    CHECK(lines[0] == "gamma,r_star,residual,iterations");
    auto row = split_doubles(lines[1]);
    CHECK(row[0] == 5.0);
    CHECK(std::abs(row[1] - 1.0707) <= 5e-3);
    CHECK(std::abs(row[2]) <= 1e-6);

    r = invoke({"calibrate", "--gamma", "20", "--n-quad", "1001", "--out", dir.string()});
    CHECK(r.code == 0);
    row = split_doubles(read_lines(dir / "calibration.csv")[1]);
    CHECK(std::abs(row[1] - 1.5240) <= 5e-3);

    r = invoke({"calibrate", "--paper-fig2", "--out", dir.string()});
    CHECK(r.code == 0);
    CHECK(split_doubles(read_lines(dir / "calibration.csv")[1])[0] == 20.0);
    fs::remove_all(dir);
}

TEST_CASE("calibrate errors") {
    auto r = invoke({"calibrate", "--gamma", "-1"});
    CHECK(r.code == srr::cli::kUsageError);
    CHECK(r.err.find("--gamma") != std::string::npos);
    r = invoke({"calibrate", "--gamma", "1e-9", "--out", scratch("bracket").string()});
    CHECK(r.code == srr::cli::kUsageError);
    CHECK(r.err.find("no sign change") != std::string::npos);
    r = invoke({"calibrate", "--gamma", "abc"});
    CHECK(r.code == srr::cli::kUsageError);
    CHECK(invoke({}).code == srr::cli::kUsageError);
    CHECK(invoke({"frobnicate"}).code == srr::cli::kUsageError);
    r = invoke({"--help"});
    CHECK(r.code == 0);
    CHECK(r.out.find("verify") != std::string::npos);
}

TEST_CASE("verify writes both curves and round-trips lambda = 0") {
    const auto dir = scratch("verify");
    const auto r = invoke({"verify", "--gamma", "5", "--grid-n", "601", "--lambda-count", "10", "--include-zero",
                           "--out", dir.string()});
    CHECK(r.code == 0);
    CHECK(r.out.find("PASS") != std::string::npos);
    const auto sweep = read_lines(dir / "lambda_sweep.csv");
    REQUIRE(sweep.size() == 12);
    CHECK(sweep[0] == "lambda,f_lambda_rstar");
    CHECK(split_doubles(sweep[1])[0] == 0.0);
    for (std::size_t i = 2; i < sweep.size(); ++i) CHECK(split_doubles(sweep[i])[1] < 0.0);
    CHECK(split_doubles(sweep.back())[0] == 10.0);

    invoke({"calibrate", "--gamma", "5", "--out", dir.string()});
    const double residual = split_doubles(read_lines(dir / "calibration.csv")[1])[2];
    CHECK(std::abs(split_doubles(sweep[1])[1] - residual) <= 1e-6);

    const auto scan = read_lines(dir / "f0_scan.csv");
    CHECK(scan[0] == "r,f0_r");
    CHECK(scan.size() > 100);
    CHECK(split_doubles(scan[1])[0] == 0.05);
    fs::remove_all(dir);
}

TEST_CASE("verify usage errors") {
    CHECK(invoke({"verify", "--lambda-max", "0"}).code == srr::cli::kUsageError);
    CHECK(invoke({"verify", "--grid-n", "2"}).code == srr::cli::kUsageError);
    CHECK(invoke({"verify", "--r-min", "3"}).code == srr::cli::kUsageError);
}

TEST_CASE("simulate") {
    const auto dir = scratch("simulate");
    auto r = invoke({"simulate", "--gamma", "1", "--checks", "stoptime", "--checks", "martingale", "--n-paths", "3000",
                     "--out", dir.string()});
    CHECK(r.code == 0);
    const auto first = slurp(dir / "simulate.csv");
    const auto lines = read_lines(dir / "simulate.csv");
    REQUIRE(lines.size() == 3);
    CHECK(lines[0] == "check,mean,std_err,n_paths,target,pass");
    CHECK(lines[1].rfind("stoptime,", 0) == 0);
    CHECK(lines[1].substr(lines[1].size() - 2) == ",1");

    r = invoke({"simulate", "--gamma", "1", "--checks", "stoptime", "--checks", "martingale", "--n-paths", "3000",
                "--workers", "2", "--out", dir.string()});
    CHECK(slurp(dir / "simulate.csv") == first);
    fs::remove_all(dir);
}

TEST_CASE("simulate flambda agrees in sign with verify") {
    const auto dir = scratch("flambda");
    const auto r = invoke({"simulate", "--gamma", "5", "--checks", "flambda", "--lambda", "2", "--n-paths", "10000",
                           "--out", dir.string()});
    CHECK(r.code == 0);
    const auto lines = read_lines(dir / "simulate.csv");
    REQUIRE(lines.size() == 2);
    CHECK(lines[1].rfind("flambda[lambda=2]", 0) == 0);
    std::stringstream ss(lines[1]);
    std::string name, mean, se, n, target;
    std::getline(ss, name, ',');
    std::getline(ss, mean, ',');
    std::getline(ss, se, ',');
    std::getline(ss, n, ',');
    std::getline(ss, target, ',');
    CHECK(std::stod(mean) < 0.0);
    CHECK(std::stod(target) < 0.0);
    CHECK(n == "10000");
    fs::remove_all(dir);
}

TEST_CASE("simulate reports failed checks") {
    const auto dir = scratch("fail");
    // an uncalibrated starting point breaks the equalizer at r = 0
    const auto r = invoke({"simulate", "--gamma", "5", "--r-star", "0.2", "--checks", "equalizer", "--r", "0",
                           "--n-paths", "3000", "--out", dir.string()});
    CHECK(r.code == srr::cli::kCheckFailed);
    CHECK(r.out.find("FAIL equalizer") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("simulate usage errors") {
    CHECK(invoke({"simulate", "--checks", "bogus"}).code == srr::cli::kUsageError);
    CHECK(invoke({"simulate", "--checks", "flambda"}).code == srr::cli::kUsageError);
    CHECK(invoke({"simulate", "--regime", "sideways"}).code == srr::cli::kUsageError);
    CHECK(invoke({"simulate", "--n-paths", "0"}).code == srr::cli::kUsageError);
    CHECK(invoke({"simulate", "--regime", "prior", "--lambda", "1", "--r", "2"}).code == srr::cli::kUsageError);
}

TEST_CASE("detect") {
    const auto dir = scratch("detect");
    {
        std::ofstream f(dir / "zeros.csv");
        f << "dt,dxi\n";
        for (int i = 0; i < 8000; ++i) f << "0.001,0\n";
        std::ofstream bad(dir / "bad.csv");
        bad << "dt,dxi\n0.001,0\n0.001,oops\n";
    }
    auto r = invoke({"detect", "--input", (dir / "zeros.csv").string(), "--gamma", "5", "--out", dir.string()});
    CHECK(r.code == 0);
    const auto lines = read_lines(dir / "detect.csv");
    REQUIRE(lines.size() == 2);
    CHECK(lines[0] == "stopped,stop_time,r_at_stop,threshold,r_star,gamma");
    const auto row = split_doubles(lines[1]);
    CHECK(row[0] == 1.0);
    CHECK(std::abs(row[1] - 5.0) <= 0.05);
    CHECK(std::abs(row[4] - 1.0707) <= 5e-3);

    r = invoke({"detect", "--input", (dir / "zeros.csv").string(), "--gamma", "10", "--r-star", "1.5", "--out",
                dir.string()});
    CHECK(r.code == 0);
    CHECK(r.out.find("no alarm") != std::string::npos);
    CHECK(split_doubles(read_lines(dir / "detect.csv")[1])[4] == 1.5);

    r = invoke({"detect", "--input", (dir / "bad.csv").string(), "--gamma", "5", "--out", dir.string()});
    CHECK(r.code == srr::cli::kBadInput);
    CHECK(r.err.find("line 3") != std::string::npos);
    r = invoke({"detect", "--input", (dir / "missing.csv").string(), "--gamma", "5", "--out", dir.string()});
    CHECK(r.code == srr::cli::kBadInput);
    CHECK(invoke({"detect", "--gamma", "5"}).code == srr::cli::kUsageError);
    fs::remove_all(dir);
}

TEST_CASE("output directory from the environment") {
    const auto dir = scratch("env");
    ::setenv(srr::cli::kOutDirEnv, dir.string().c_str(), 1);
    const auto r = invoke({"calibrate", "--gamma", "5"});
    ::unsetenv(srr::cli::kOutDirEnv);
    CHECK(r.code == 0);
    CHECK(fs::exists(dir / "calibration.csv"));
    fs::remove_all(dir);
}

TEST_CASE("presets") {
    const auto f1 = srr::cli::ExperimentConfig::paper_fig1();
    CHECK(f1.gamma == 5.0);
    CHECK(f1.grid_n == 2001);
    CHECK(f1.lambda_count == 100);
    CHECK(f1.lambda_max == 10.0);
    CHECK(f1.r_min == 2e-3);
    const auto f2 = srr::cli::ExperimentConfig::paper_fig2();
    CHECK(f2.gamma == 20.0);
    CHECK(f2.grid_n == 4001);
    CHECK(f2.lambda_count == 200);
    CHECK(f2.n_quad == 1001);
    CHECK_NOTHROW(f1.validate());
}

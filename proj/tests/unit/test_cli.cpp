// Command-line behaviour, through run() and through the installed binary.

#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ppp/bounds.hpp"
#include "ppp/cli.hpp"
#include "ppp/distributions.hpp"
#include "ppp/io.hpp"
#include "ppp/rng.hpp"

using namespace ppp;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result call(const std::vector<std::string>& args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

Json call_json(const std::vector<std::string>& args) {
    const auto r = call(args);
    REQUIRE(r.code == 0);
    return Json::parse(r.out);
}

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("ppp_cli_" + name)).string();
}

std::string write_values(const std::string& name, const std::vector<double>& v) {
    const auto path = temp_path(name);
    write_values_csv(path, v);
    return path;
}

std::vector<std::vector<double>> parse_csv(const std::string& text, std::vector<std::string>* header) {
    std::istringstream in(text);
    std::string line;
    std::vector<std::vector<double>> rows;
    bool first = true;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (first) {
            *header = cells;
            first = false;
            continue;
        }
        std::vector<double> row;
        for (const auto& c : cells) row.push_back(c.empty() ? std::nan("") : std::stod(c));
        rows.push_back(row);
    }
    return rows;
}

} // namespace

TEST_CASE("calibrate") {
    CHECK(call_json({"calibrate", "--p", "0.03"})["conservative_p"].get<double>() == doctest::Approx(0.06));
    CHECK(call_json({"calibrate", "--p", "0.7"})["conservative_p"].get<double>() == 1.0);
    const auto bad = call({"calibrate", "--p", "-0.1"});
    CHECK(bad.code == 1);
    CHECK(bad.out.empty());
    CHECK_FALSE(bad.err.empty());
    CHECK(call({"calibrate"}).code == 1);
    CHECK(call({"nonsense"}).code == 1);
}

TEST_CASE("fisher") {
    const auto one = write_values("one.csv", {0.05});
    const auto j = call_json({"fisher", "--pvals", one});
    CHECK(j["score"].get<double>() == doctest::Approx(5.99146).epsilon(1e-6));
    CHECK(j["m"] == 1);
    CHECK(j["nominal_p"].get<double>() == doctest::Approx(0.05));
    CHECK(j["bound_shifted_chi2"].get<double>() == doctest::Approx(0.1));

    const auto ones = write_values("ones.csv", {1.0, 1.0, 1.0});
    const auto k = call_json({"fisher", "--pvals", ones});
    CHECK(k["score"].get<double>() == 0.0);
    CHECK(k["conservative_p"].get<double>() == 1.0);

    CHECK(call({"fisher", "--pvals", temp_path("does_not_exist.csv")}).code == 2);
    const auto bad = write_values("bad.csv", {0.5, 1.5});
    CHECK(call({"fisher", "--pvals", bad}).code == 1);
    for (const auto& p : {one, ones, bad}) std::filesystem::remove(p);
}

TEST_CASE("fisher matches the library on a seeded sample") {
    RngStream rng(42, 0);
    const auto values = sample_values(p2alpha(0.1), rng, 20);
    const auto path = write_values("golden.csv", values);
    const auto j = call_json({"fisher", "--pvals", path});
    // Values pass through shortest round-trip text, so the CLI sees the same doubles.
    const auto lib = fisher_bounds(fisher_score(values));
    CHECK(j["score"].get<double>() == lib.score);
    CHECK(j["nominal_p"].get<double>() == lib.nominal_p);
    CHECK(j["bound_shifted_chi2"].get<double>() == lib.bound_shifted_chi2);
    CHECK(j["conservative_p"].get<double>() == lib.conservative_p);
    if (lib.bound_mgf.value) CHECK(j["bound_mgf"].get<double>() == *lib.bound_mgf.value);
    if (lib.bound_cantelli.value) CHECK(j["bound_cantelli"].get<double>() == *lib.bound_cantelli.value);
    std::filesystem::remove(path);
}

TEST_CASE("minp") {
    CHECK(call_json({"minp", "--min", "0.1", "--m", "2"})["conservative_p"].get<double>() ==
          doctest::Approx(0.36));
    CHECK(call_json({"minp", "--min", "0", "--m", "5"})["conservative_p"].get<double>() == 0.0);
    const auto j = call_json({"minp", "--min", "0.05", "--m", "1"});
    CHECK(j["conservative_p"].get<double>() == doctest::Approx(0.1));
    CHECK(j["conservative_p"].get<double>() == doctest::Approx(2 * j["nominal_q"].get<double>()));
    const auto path = write_values("minp.csv", {0.3, 0.1, 0.7});
    const auto f = call_json({"minp", "--pvals", path});
    CHECK(f["min"].get<double>() == 0.1);
    CHECK(f["m"] == 3);
    CHECK(call({"minp", "--min", "0.1"}).code == 1);
    CHECK(call({"minp", "--pvals", temp_path("nope.csv")}).code == 2);
    std::filesystem::remove(path);
}

TEST_CASE("simulate") {
    const auto j = call_json({"simulate", "--model", "lasso", "--alpha", "0.1", "--n", "20000", "--seed", "3"});
    CHECK(j["p_le_alpha"].get<double>() == doctest::Approx(0.2).epsilon(0.1));
    CHECK(j.contains("sub_uniform"));
    CHECK(j.contains("ks_vs_p2alpha"));

    const auto out = temp_path("rusch.csv");
    REQUIRE(call({"simulate", "--model", "ruschendorf", "--alpha", "0.25", "--n", "10", "--seed", "7", "--out", out})
                .code == 0);
    const auto first = read_values_csv(out);
    CHECK(first.size() == 10);
    REQUIRE(call({"simulate", "--model", "ruschendorf", "--alpha", "0.25", "--n", "10", "--seed", "7", "--out", out})
                .code == 0);
    CHECK(read_values_csv(out) == first);
    std::filesystem::remove(out);

    CHECK(call({"simulate", "--model", "simplex", "--alpha", "0.6"}).code == 1);
    CHECK(call({"simulate", "--model", "nope"}).code == 1);
}

TEST_CASE("simulate output is byte-identical across runs") {
    const std::vector<std::string> args{"simulate", "--model", "port", "--n", "5000", "--seed", "11",
                                        "--M", "8", "--estimator", "r_hat", "--rho", "0.5"};
    CHECK(call(args).out == call(args).out);
}

TEST_CASE("construct") {
    const auto target = temp_path("target.json");
    {
        std::ofstream f(target);
        f << R"({"kind": "uniform"})";
    }
    const auto u = call_json({"construct", "--target", target, "--n", "20000", "--seed", "1"});
    CHECK(u["method"] == "singular");
    CHECK(u["ks"].get<double>() < 0.02);

    {
        std::ofstream f(target);
        f << R"({"kind": "p2alpha", "alpha": 0.1})";
    }
    const auto model_path = temp_path("model.json");
    const auto p = call_json({"construct", "--target", target, "--n", "20000", "--seed", "1", "--model-out", model_path});
    CHECK(p["method"] == "explicit_p2alpha");
    CHECK(p["atoms"][0]["observed"].get<double>() == doctest::Approx(0.2).epsilon(0.1));
    CHECK(read_json_file(model_path) == p["model"]);

    {
        std::ofstream f(target);
        f << R"({"kind": "mixture", "atoms": [{"location": 0.9, "mass": 1.0}]})";
    }
    const auto bad = call({"construct", "--target", target});
    CHECK(bad.code == 1);
    CHECK(bad.err.find("witness") != std::string::npos);
    CHECK(call({"construct", "--target", temp_path("absent.json")}).code == 2);
    std::filesystem::remove(target);
    std::filesystem::remove(model_path);
}

TEST_CASE("idf curves meet at one half") {
    const auto r = call({"curves", "--figure", "idf"});
    REQUIRE(r.code == 0);
    std::vector<std::string> header;
    const auto rows = parse_csv(r.out, &header);
    CHECK(header == std::vector<std::string>{"x", "uniform", "beta22", "p2alpha"});
    REQUIRE(rows.size() == 512);
    CHECK(rows.back()[0] == 1.0);
    for (std::size_t c = 1; c < 4; ++c) CHECK(rows.back()[c] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(rows.front()[1] == 0.0);
    CHECK(call({"curves", "--figure", "pie"}).code == 1);
}

TEST_CASE("fisher curves reproduce the bound orderings") {
    std::vector<std::string> header;
    const auto small = parse_csv(call({"curves", "--figure", "fisher", "--m", "20"}).out, &header);
    REQUIRE(small.size() == 101);
    CHECK(small.front()[0] == doctest::Approx(1e-5));
    CHECK(small.back()[0] == 0.1);
    // At alpha = 1e-5 the MGF bound is the smallest.
    CHECK(small.front()[5] < small.front()[4]);
    CHECK(small.front()[5] < small.front()[3]);

    const auto big = parse_csv(call({"curves", "--figure", "fisher", "--m", "1000000", "--points", "11"}).out, &header);
    REQUIRE(big.size() == 11);
    for (const auto& row : big) {
        CHECK(row[3] >= row[4]);
        CHECK(row[3] >= row[5]);
    }
    CHECK(big.front()[3] == 1.0);

    const auto huge = Json::parse(
        call({"curves", "--figure", "fisher", "--m", "1000000000", "--points", "3", "--format", "json"}).out);
    for (const auto& row : huge["rows"]) {
        for (std::size_t c = 1; c < 6; ++c) CHECK(std::isfinite(row[c].get<double>()));
    }
}

TEST_CASE("the binary maps errors to exit codes") {
    const std::string bin = PPP_CLI_PATH;
    auto status = [&](const std::string& args) {
        const int s = std::system((bin + " " + args + " >/dev/null 2>&1").c_str());
        return WEXITSTATUS(s);
    };
    CHECK(status("calibrate --p 0.3") == 0);
    CHECK(status("calibrate --p 2") == 1);
    CHECK(status("fisher --pvals /nonexistent/file.csv") == 2);
    CHECK(status("--help") == 0);
}

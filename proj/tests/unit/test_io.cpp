// JSON and CSV readers and writers.

#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "ppp/io.hpp"

using namespace ppp;

namespace {

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("ppp_io_" + name)).string();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path);
    f << text;
}

} // namespace

TEST_CASE("distribution JSON round trips") {
    for (const auto& nd : builtin_sub_uniform()) {
        CAPTURE(nd.name);
        const auto back = dist_from_json(Json::parse(to_json(nd.dist).dump()));
        for (int i = 0; i <= 200; ++i) {
            const double x = i / 200.0;
            CHECK(back.cdf(x) == nd.dist.cdf(x));
            CHECK(back.cdf_left(x) == nd.dist.cdf_left(x));
        }
    }
    const auto p = dist_from_json(Json::parse(R"({"kind": "p2alpha", "alpha": 0.1})"));
    CHECK(p.cdf(0.1) == doctest::Approx(0.2));
    CHECK_THROWS_AS(dist_from_json(Json::parse(R"({"kind": "cauchy"})")), std::invalid_argument);
    CHECK_THROWS_AS(dist_from_json(Json::parse(R"({"kind": "p2alpha"})")), std::invalid_argument);
    CHECK_THROWS(dist_from_json(Json::parse(R"({"kind": "mixture", "atoms": [{"location": 0.5, "mass": 0.4}]})")));
}

TEST_CASE("IDF JSON round trips") {
    const auto a = IntegratedDF::analytic(AnalyticFamily::Beta22);
    const auto pw = idf_of(p2alpha(0.2));
    for (const auto& idf : {a, pw}) {
        const auto back = idf_from_json(Json::parse(to_json(idf).dump()));
        for (int i = 0; i <= 100; ++i) CHECK(back.evaluate(i / 100.0) == idf.evaluate(i / 100.0));
    }
}

TEST_CASE("Fisher report JSON marks inapplicable bounds") {
    const auto low = to_json(fisher_bounds(10.0, 20));
    CHECK(low["bound_cantelli"].is_null());
    CHECK(low["bound_cantelli_reason"].is_string());
    CHECK(low["bound_mgf"].is_null());
    const auto high = to_json(fisher_bounds(90.0, 20));
    CHECK(high["bound_mgf"].is_number());
    CHECK(high["bound_mgf_reason"].is_null());
}

TEST_CASE("value CSV files") {
    const auto path = temp_path("values.csv");
    write_file(path, "# header\n0.25\n\n1e-3\n  0.5  \n");
    const auto v = read_values_csv(path);
    REQUIRE(v.size() == 3);
    CHECK(v[0] == 0.25);
    CHECK(v[1] == 0.001);
    CHECK(v[2] == 0.5);

    write_file(path, "0.1\nabc\n");
    CHECK_THROWS_AS(read_values_csv(path), std::invalid_argument);
    CHECK_THROWS_AS(read_values_csv(temp_path("missing_file.csv")), IoError);

    const std::vector<double> out{0.1, 1.0 / 3.0, 1e-300, 1.0};
    write_values_csv(path, out);
    const auto back = read_values_csv(path);
    REQUIRE(back.size() == out.size());
    for (std::size_t i = 0; i < out.size(); ++i) CHECK(back[i] == out[i]);
    std::filesystem::remove(path);
}

TEST_CASE("pmf CSV files") {
    const auto path = temp_path("pmfs.csv");
    write_file(path, "0.7,0.2,0.1\n0.1, 0.2, 0.7\n");
    const auto p = read_pmf_csv(path);
    REQUIRE(p.size() == 2);
    CHECK(p[1][2] == 0.7);
    std::filesystem::remove(path);
}

TEST_CASE("JSON files") {
    const auto path = temp_path("doc.json");
    write_file(path, R"({"kind": "uniform"})");
    CHECK(read_json_file(path)["kind"] == "uniform");
    write_file(path, "{not json");
    CHECK_THROWS(read_json_file(path));
    CHECK_THROWS_AS(read_json_file(temp_path("missing.json")), IoError);
    std::filesystem::remove(path);
}

TEST_CASE("shortest round-trip formatting") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(2.0) == "2");
    for (double v : {1.0 / 3.0, 5.99146454710798, 1e-300, std::nextafter(1.0, 2.0)}) {
        CHECK(std::stod(format_double(v)) == v);
    }
}

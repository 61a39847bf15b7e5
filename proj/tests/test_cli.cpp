#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <json.hpp>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "pii/cli.hpp"

using namespace pii::cli;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result call(std::vector<const char*> args) {
    args.insert(args.begin(), "pii");
    std::ostringstream out, err;
    const int code = run(static_cast<int>(args.size()), args.data(), out, err);
    return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("parse_complex") {
    CHECK(parse_complex("1.5") == std::complex<double>(1.5, 0));
    CHECK(parse_complex("0.3i") == std::complex<double>(0, 0.3));
    CHECK(parse_complex("-i") == std::complex<double>(0, -1));
    CHECK(parse_complex("i") == std::complex<double>(0, 1));
    CHECK(parse_complex("0.1-2e-3i") == std::complex<double>(0.1, -2e-3));
    CHECK(parse_complex("-1e-2+3i") == std::complex<double>(-1e-2, 3));
    CHECK_THROWS_AS(parse_complex(""), std::invalid_argument);
    CHECK_THROWS_AS(parse_complex("abc"), std::invalid_argument);
    CHECK_THROWS_AS(parse_complex("1.5x"), std::invalid_argument);
}

TEST_CASE("format_double round-trips") {
    for (double v : {0.0, 1.0, -0.1, 1.0 / 3.0, 6.02e23, 5e-324, std::numeric_limits<double>::max()})
        CHECK(std::strtod(format_double(v).c_str(), nullptr) == v);
}

TEST_CASE("csv and json") {
    Table t;
    t.columns = {"a", "b", "c"};
    t.rows = {{1.5, 2LL, true}, {-0.25, 3LL, std::string("x")}};
    const std::string csv = to_csv(t);
    CHECK(csv.rfind("a,b,c\n", 0) == 0);
    const auto j = nlohmann::json::parse(to_json(t));
    REQUIRE(j.is_array());
    CHECK(j[0]["a"] == 1.5);
    CHECK(j[1]["c"] == "x");
    t.rows.pop_back();
    CHECK(nlohmann::json::parse(to_json(t)).is_object());
}

TEST_CASE("coeffs subcommand") {
    const Result r = call({"coeffs", "--alpha", "0.25", "--n-max", "3"});
    CHECK(r.code == kExitOk);
    std::istringstream in(r.out);
    std::string line;
    std::vector<std::string> lines;
    while (std::getline(in, line))
        lines.push_back(line);
    REQUIRE(lines.size() == 5);
    CHECK(lines[0] == "n,a_n");
    CHECK(lines[1].rfind("0,", 0) == 0);
    CHECK(std::stod(lines[2].substr(2)) == doctest::Approx(2.0 - 2.0 * 0.0625));

    CHECK(call({"coeffs", "--alpha", "0.5", "--n-max", "3"}).code == kExitUsage);
    CHECK(call({"coeffs", "--alpha", "0.1", "--n-max", "51"}).code == kExitUsage);
    CHECK(call({"coeffs", "--alpha", "0.3i", "--n-max", "5"}).code == kExitOk);
}

TEST_CASE("connect subcommand") {
    const Result r = call({"connect", "--alpha", "0", "--k", "0.5"});
    REQUIRE(r.code == kExitOk);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["d"].get<double>() == doctest::Approx(0.302609).epsilon(1e-6));
    CHECK(j["trivial"] == false);

    const Result z = call({"connect", "--alpha", "0", "--k", "0"});
    REQUIRE(z.code == kExitOk);
    CHECK(nlohmann::json::parse(z.out)["trivial"] == true);

    const Result im = call({"connect", "--family", "imag", "--alpha", "0.3i", "--k", "0.5i"});
    REQUIRE(im.code == kExitOk);
    CHECK(nlohmann::json::parse(im.out).contains("d_im"));

    const Result bad = call({"connect", "--alpha", "0.25", "--k", "0.9"});
    CHECK(bad.code == kExitUsage);
    CHECK(bad.out.empty());
    CHECK_FALSE(bad.err.empty());
    CHECK(call({"connect", "--family", "real", "--alpha", "0.3i", "--k", "0"}).code == kExitUsage);
}

TEST_CASE("integrate subcommand") {
    const Result r = call({"integrate", "--alpha", "0.1", "--k", "0.2", "--x-end", "-10", "--spacing", "1"});
    REQUIRE(r.code == kExitOk);
    CHECK(r.out.rfind("x,u,u_prime\n", 0) == 0);
    CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 20);

    const Result im = call({"integrate", "--family", "imag", "--alpha", "0.3i", "--k", "0.5i", "--x-end", "-5"});
    REQUIRE(im.code == kExitOk);
    CHECK(im.out.rfind("x,u_im,u_prime_im,v,v_prime\n", 0) == 0);

    const Result pole = call({"integrate", "--alpha", "0", "--k", "1.2", "--x-end", "-20"});
    CHECK(pole.code == kExitPole);
    CHECK(pole.out.empty());

    CHECK(call({"integrate", "--alpha", "0.1", "--k", "0.2", "--tol", "1e-3"}).code == kExitUsage);
    CHECK(call({"integrate", "--alpha", "0.1", "--k", "0.2", "--x0", "5"}).code == kExitUsage);
}

TEST_CASE("verify subcommand") {
    const Result r = call({"verify", "--alpha", "0.25", "--k", "0.3"});
    CHECK(r.code == kExitOk);
    CHECK(nlohmann::json::parse(r.out)["pass"] == true);

    const Result pole = call({"verify", "--alpha", "0", "--k", "1.2"});
    CHECK(pole.code == kExitPole);
    CHECK(pole.out.empty());
    CHECK(call({"verify", "--alpha", "0", "--k", "0"}).code == kExitUsage);
}

TEST_CASE("scan and laxcheck subcommands") {
    const Result s = call({"scan", "--grid", "real:0:0.5;real:0:1.2", "--x-end", "-30"});
    CHECK(s.code == kExitOk);  // singular rows are informational
    CHECK(s.out.find("PoleDetected") != std::string::npos);

    const Result l = call({"laxcheck", "--draws", "50", "--seed", "3"});
    CHECK(l.code == kExitOk);
    CHECK(call({"laxcheck", "--lambda", "0"}).code == kExitUsage);
}

TEST_CASE("output is deterministic") {
    const auto a = call({"connect", "--alpha", "0.1", "--k", "-0.4", "--format", "csv"});
    const auto b = call({"connect", "--alpha", "0.1", "--k", "-0.4", "--format", "csv"});
    CHECK(a.out == b.out);
    CHECK(call({"nonsense"}).code == kExitUsage);
}

TEST_CASE("executable: selftest and exit codes") {
    const std::string exe = PII_EXE;
    CHECK(std::system((exe + " selftest > /dev/null").c_str()) == 0);
    const int pole = std::system((exe + " verify --alpha 0 --k 1.2 > /dev/null 2>&1").c_str());
    CHECK(WEXITSTATUS(pole) == kExitPole);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"
#include "jetflat/errors.hpp"
#include "jetflat/serialize.hpp"
#include "oracles.hpp"

using namespace jetflat;
using doctest::Approx;
using nlohmann::json;

namespace {

struct Outcome {
    int code;
    std::string out, err;
    [[nodiscard]] json doc() const { return json::parse(out); }
};

Outcome call(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

const std::string kZero = R"({"domain":"S1","a0":0})";

}  // namespace

TEST_CASE("function documents round-trip") {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 10; ++i) {
        const FourierFunction f = random_fourier(i % 2 ? Domain::Torus2 : Domain::Circle, 1 + i % 4, rng);
        const json j = io::to_json(f);
        CHECK(io::function_from_json(json::parse(j.dump())) == f);
    }
    const IsotopyPath p = IsotopyPath::uniform({FourierFunction::circle(0.1, {1.0}, {0.0}),
                                                FourierFunction::circle(0.0, {0.0, 0.5}, {0.2, 0.0}),
                                                FourierFunction::constant(Domain::Circle, 2.0)});
    const IsotopyPath back = io::path_from_json(io::to_json(p));
    CHECK(back.times() == p.times());
    CHECK(back.knots() == p.knots());
}

TEST_CASE("function documents: layout and rejects") {
    const FourierFunction f = io::function_from_json(json::parse(R"({"a0":1,"cos":[0.5],"sin":[0,0.25]})"));
    CHECK(f.domain() == Domain::Circle);
    CHECK(f.degree() == 2);
    CHECK(f(0.125) == Approx(static_cast<double>(oracle::eval_circle(f, 0.125L))));
    CHECK(f(0.125) == Approx(1.0 + 0.5 * std::cos(M_PI / 4) + 0.25));

    const FourierFunction t = io::function_from_json(
        json::parse(R"({"domain":"T2","coeffs":{"a0":0.5,"cc":[[0,0],[0,1]],"ss":[[0,0],[0,2]]}})"));
    CHECK(t.domain() == Domain::Torus2);
    CHECK(t(0.1, 0.3) == Approx(0.5 + std::cos(0.2 * M_PI) * std::cos(0.6 * M_PI) +
                                2 * std::sin(0.2 * M_PI) * std::sin(0.6 * M_PI)));

    // q1-only function on the torus
    const FourierFunction u = io::function_from_json(json::parse(R"({"domain":"T2","cos":[0.3],"sin":[0.4]})"));
    CHECK(u.domain() == Domain::Torus2);
    CHECK(u(0.2, 0.7) == Approx(0.3 * std::cos(0.4 * M_PI) + 0.4 * std::sin(0.4 * M_PI)));

    CHECK_THROWS_AS((void)io::function_from_json(json::parse(R"({"domain":"S2"})")), ParseError);
    CHECK_THROWS_AS((void)io::function_from_json(json::parse(R"({"cos":["x"]})")), ParseError);
    CHECK_THROWS_AS((void)io::function_from_json(io::parse_document(R"({"cos":[1e400]})")), ParseError);
    CHECK_THROWS_AS((void)io::function_from_json(json::parse(R"({"domain":"T2","coeffs":{"cc":[[0,1]]}})")),
                    ParseError);
    CHECK_THROWS_AS((void)io::parse_document("{\"cos\":[1"), ParseError);
    CHECK_THROWS_AS((void)io::path_from_json(json::parse(R"({"times":[0,0.7],"knots":[{},{}]})")), MalformedPath);
    CHECK_THROWS_AS((void)io::path_from_json(json::parse(R"({"times":[0,1],"knots":[{},{"domain":"T2"}]})")),
                    DomainMismatch);
}

TEST_CASE("csv export") {
    SelectorReport r;
    r.ell_plus = 0.5;
    r.ell_minus = -0.25;
    r.d_spec = 0.5;
    r.plus_in_spectrum = r.minus_in_spectrum = true;
    CHECK(io::to_csv({{"a", r}}) == "case_id,ell_plus,ell_minus,d_spec,in_spectrum\na,0.5,-0.25,0.5,1\n");
}

TEST_CASE("run config validation") {
    cli::RunConfig c;
    CHECK_NOTHROW(c.validate());
    c.grid_size = 96;
    CHECK_THROWS_AS(c.validate(), ParseError);
    c.grid_size = 32;
    CHECK_THROWS_AS(c.validate(), ParseError);
    c.grid_size = 64;
    c.tolerance = 0.0;
    CHECK_THROWS_AS(c.validate(), ParseError);
    c.tolerance = 2e-3;
    CHECK_THROWS_AS(c.validate(), ParseError);
    c.tolerance = 1e-3;
    CHECK_NOTHROW(c.validate());
}

TEST_CASE("dist") {
    const auto same = call({"dist", R"({"cos":[0.2],"sin":[0.1]})", R"({"cos":[0.2],"sin":[0.1]})"});
    CHECK(same.code == 0);
    CHECK(same.doc()["d_spec"].get<double>() == 0.0);

    const auto shift = call({"dist", R"({"a0":0.7})", kZero});
    CHECK(shift.code == 0);
    CHECK(shift.doc()["ell_plus"].get<double>() == Approx(0.7).epsilon(1e-15));
    CHECK(shift.doc()["ell_minus"].get<double>() == Approx(0.7).epsilon(1e-15));
    CHECK(shift.doc()["d_spec"].get<double>() == Approx(0.7).epsilon(1e-15));

    const auto cs = call({"dist", R"({"cos":[0.3],"sin":[-0.1]})", kZero});
    CHECK(cs.code == 0);
    CHECK(std::abs(cs.doc()["d_spec"].get<double>() - std::hypot(0.3, 0.1)) <= 1e-12);
    CHECK(cs.doc()["ell_minus"].get<double>() == Approx(-std::hypot(0.3, 0.1)).epsilon(1e-12));
}

TEST_CASE("spectrum") {
    const auto c = call({"spectrum", R"({"cos":[1]})", kZero});
    CHECK(c.code == 0);
    const auto lengths = c.doc()["lengths"].get<std::vector<double>>();
    REQUIRE(lengths.size() == 2);
    CHECK(lengths[0] == Approx(-1.0).epsilon(1e-12));
    CHECK(lengths[1] == Approx(1.0).epsilon(1e-12));

    const auto eq = call({"spectrum", R"({"sin":[0.4]})", R"({"sin":[0.4]})"});
    CHECK(eq.doc()["plateau"].get<bool>());
    CHECK(eq.doc()["lengths"].get<std::vector<double>>() == std::vector<double>{0.0});

    const auto sh = call({"spectrum", R"({"sin":[0.4],"a0":0.3})", R"({"sin":[0.4]})"});
    REQUIRE(sh.doc()["lengths"].size() == 1);
    CHECK(sh.doc()["lengths"][0].get<double>() == Approx(0.3).epsilon(1e-12));
}

TEST_CASE("geodesic") {
    const auto straight = call({"geodesic", R"({"times":[0,1],"knots":[{},{"cos":[0.4],"sin":[0.1]}]})"});
    CHECK(straight.code == 0);
    CHECK(straight.doc()["minimizing"].get<bool>());

    // f -> f + h -> f with h = 0.3 cos - 0.4 sin: gap 2 max|h| = 1
    const auto rev = call({"geodesic",
                           R"({"times":[0,0.5,1],"knots":[{"a0":0.1},{"a0":0.1,"cos":[0.3],"sin":[-0.4]},{"a0":0.1}]})"});
    CHECK(rev.code == 0);
    CHECK(rev.doc()["gap"].get<double>() == Approx(2 * std::hypot(0.3, 0.4)).epsilon(1e-12));
    CHECK_FALSE(rev.doc()["minimizing"].get<bool>());

    const std::string ends = R"({"times":[0,1],"knots":[{"cos":[0.1,-0.2]},{"sin":[0.3],"cos":[0,0.05]}]})";
    const auto opt = call({"geodesic", ends, "--mode", "optimize", "--restarts", "4"});
    CHECK(opt.code == 0);
    const double excess = opt.doc()["excess"].get<double>();
    CHECK(excess >= -1e-9);
    CHECK(excess <= 1e-4);
    const FourierFunction d = FourierFunction::circle(0.0, {-0.1, 0.25}, {0.3, 0.0});
    CHECK(opt.doc()["lower_bound"].get<double>() == Approx(oracle::circle_sup(d)).epsilon(1e-12));
}

TEST_CASE("props") {
    const auto ok = call({"props", "--seed", "42", "--count", "20"});
    CHECK(ok.code == 0);
    CHECK(ok.doc()["all_passed"].get<bool>());
    CHECK(ok.doc()["axioms"].size() >= 7);

    const auto tr = call({"props", "--count", "2", "--translates"});
    CHECK(tr.code == 0);

    const auto neg = call({"props", "--seed", "42", "--count", "20", "--tol", "1e-20"});
    CHECK(neg.code == 1);
    bool spectrality_failed = false;
    const json neg_doc = neg.doc();
    for (const auto& a : neg_doc["axioms"])
        if (a["name"] == "spectrality") spectrality_failed = !a["passed"].get<bool>();
    CHECK(spectrality_failed);

    CHECK(call({"props", "--count", "1"}).code == 2);

    const auto csv = call({"props", "--count", "3", "--format", "csv"});
    CHECK(csv.code == 0);
    CHECK(csv.out.rfind("case_id,ell_plus,ell_minus,d_spec,in_spectrum\n", 0) == 0);
    CHECK(std::count(csv.out.begin(), csv.out.end(), '\n') == 7);
}

TEST_CASE("monotone, length, integral-criterion") {
    const std::string up = R"({"times":[0,0.5,1],"knots":[{},{"a0":1,"cos":[0.5]},{"a0":2,"cos":[0.5],"sin":[0.3]}]})";
    const auto m = call({"monotone", up});
    CHECK(m.code == 0);
    CHECK(m.doc()["monotone"].get<bool>());
    CHECK(m.doc()["order_verdict"].get<bool>());

    const auto l = call({"length", up});
    CHECK(l.code == 0);
    const double expect = 1.5 + (1.0 + 0.3);
    CHECK(l.doc()["sch_length"].get<double>() == Approx(expect).epsilon(1e-12));
    CHECK(l.doc()["metric_length"]["spec"]["value"].get<double>() == Approx(expect).epsilon(1e-12));

    // g_t = 2t - 1: integral of max|g| is 1/2, max|integral g| is 0
    json fam = {{"times", json::array()}, {"samples", json::array()}};
    for (int i = 0; i <= 64; ++i) {
        const double t = i / 64.0;
        fam["times"].push_back(t);
        fam["samples"].push_back({{"a0", 2 * t - 1}});
    }
    const auto ic = call({"integral-criterion", fam.dump()});
    CHECK(ic.code == 0);
    CHECK(ic.doc()["lhs"].get<double>() == 0.5);
    CHECK(ic.doc()["rhs"].get<double>() == 0.0);
    CHECK_FALSE(ic.doc()["condition1"].get<bool>());
}

TEST_CASE("contact") {
    const auto rot = call({"contact", "norm", R"({"displacement":{"a0":-0.3}})"});
    CHECK(rot.code == 0);
    CHECK(rot.doc()["norm"].get<double>() == Approx(0.3).epsilon(1e-15));

    const auto tp = call({"contact", "translated", R"({"displacement":{"sin":[0.1]}})"});
    CHECK(tp.code == 0);
    const auto spec = tp.doc()["chord_spectrum"].get<std::vector<double>>();
    REQUIRE(spec.size() == 2);
    CHECK(spec[0] == Approx(-0.1).epsilon(1e-12));
    CHECK(spec[1] == Approx(0.1).epsilon(1e-12));

    const auto up = call({"contact", "upper", R"({"displacement":{"sin":[0.1]}})", "--restarts", "4"});
    CHECK(up.code == 0);
    CHECK(up.doc()["gap"].get<double>() <= 1e-4);

    const auto qa = call({"contact", "qa",
                          R"({"times":[0,0.5,1],"knots":[{"displacement":{}},{"displacement":{"cos":[0.05]}},{"displacement":{"cos":[0.1]}}]})"});
    CHECK(qa.code == 0);
    CHECK(qa.doc()["translated_point_verdict"].get<bool>());

    CHECK(call({"contact", "norm", R"({"displacement":{"sin":[0.5]}})"}).code == 2);
    CHECK(call({"contact", "norm", R"({"displacement":{"domain":"T2"}})"}).code == 3);
}

TEST_CASE("exit codes and inputs") {
    CHECK(call({"dist", "{\"cos\":[1", kZero}).code == 2);
    CHECK(call({"dist", kZero, R"({"domain":"T2","coeffs":{"a0":1}})"}).code == 3);
    CHECK(call({"dist", "/nonexistent/file.json", kZero}).code == 2);
    CHECK(call({"--grid", "100", "dist", kZero, kZero}).code == 2);
    CHECK(call({"dist", kZero, kZero, "--tol", "0.5"}).code == 2);
    CHECK(call({"frobnicate"}).code == 2);
    CHECK(call({"geodesic", R"({"times":[0,1],"knots":[{}]})"}).code == 2);
    CHECK(call({"monotone", kZero, "--format", "csv"}).code == 2);

    const auto help = call({"--help"});
    CHECK(help.code == 0);
    CHECK(help.out.find("case_id,ell_plus,ell_minus,d_spec,in_spectrum") != std::string::npos);

    const std::string path = "test_cli_input.json";
    {
        std::ofstream f(path);
        f << R"({"cos":[0.3],"sin":[-0.1]})";
    }
    const auto from_file = call({"dist", path, kZero});
    const auto inline_doc = call({"dist", R"({"cos":[0.3],"sin":[-0.1]})", kZero});
    std::remove(path.c_str());
    CHECK(from_file.code == 0);
    CHECK(from_file.out == inline_doc.out);
}

TEST_CASE("identical inputs give identical bytes") {
    const std::vector<std::string> args = {"props", "--seed", "7", "--count", "6"};
    CHECK(call(args).out == call(args).out);
    const std::vector<std::string> opt = {
        "geodesic", R"({"times":[0,1],"knots":[{},{"cos":[0.2],"sin":[0.1,0.1]}]})", "--mode", "optimize",
        "--restarts", "3", "--seed", "11"};
    CHECK(call(opt).out == call(opt).out);
}

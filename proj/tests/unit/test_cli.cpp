#include "kt/cli.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using nlohmann::json;

namespace {

struct Result {
    int code = 0;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = kt::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

json run_json(std::vector<std::string> args) {
    args.insert(args.begin(), {"--format", "json"});
    const Result r = run(args);
    REQUIRE_MESSAGE(r.code == 0, r.err);
    return json::parse(r.out);
}

std::filesystem::path write_temp(const std::string& name, const std::string& body) {
    const auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream(path) << body;
    return path;
}

} // namespace

TEST_CASE("documented command lines") {
    CHECK(run({"dim", "--m", "2", "--n", "0", "--p", "2"}).out == "6\n");
    CHECK(run({"classify", "--beta", "1,0,0,0,0,1"}).out == "elliptic-hyperbolic\n");
    const Result r = run({"resultant", "--beta", "1,0,0,0,0,1", "--alpha", "1,4,0,0,-2,1"});
    CHECK(r.code == 0);
    CHECK(r.out == "{\"value\":0.0,\"vanishing\":true}\n");
}

TEST_CASE("every subcommand answers") {
    CHECK(run_json({"dim", "--m", "3", "--n", "1", "--p", "2"})["dimension"] == 60);
    CHECK(run_json({"gkt", "--m", "2", "--n", "0", "--p", "2"})["dimension"] == 6);
    CHECK(run_json({"invariants", "--beta", "1,0,0,0,0,1"})["d3"] == 1.0);
    CHECK(run_json({"invariants", "--beta", "1/2,0,0,0,0,1"})["exact"] == true);
    CHECK(run_json({"k2", "--beta", "1,0,0,0,0,1"})["k2"] == doctest::Approx(1.0));
    CHECK(run_json({"foci", "--beta", "1,0,0,0,0,1"})["f1"][0] == doctest::Approx(1.0));
    CHECK(run_json({"canonical", "--beta", "1,4,0,0,-2,1"})["p"][0] == doctest::Approx(-2.0));
    CHECK(run_json({"joint", "--beta", "1,0,0,0,0,1", "--alpha", "4,0,0,0,0,1"})["d"].size() == 10);
    CHECK(run_json({"angle", "--beta", "1,0,0,0,0,1", "--alpha", "4,0,0,0,0,1"})["cos"] == doctest::Approx(-1.0));
    CHECK(run_json({"rank", "--beta", "1,0.3,0.2,-0.4,0.5,1", "--alpha", "0.7,-1,0.3,0.6,-0.2,1.5"})["rank"] == 9);
    CHECK(std::abs(run_json({"frame", "--beta", "1,2,0,0,0,0", "--x", "0.3,0.4"})["delta1"].get<double>()) < 1e-6);
    CHECK(run_json({"bd", "--beta", "1,0,0,0,0,0", "--expr", "x1*x2", "--x", "1,2"})["residual"] == -1.0);
    CHECK(run_json({"compat-basis", "--expr", "1/sqrt(x1^2+x2^2)"})["dimension"] == 4);
    CHECK(run_json({"kepler-verify"})["passed"] == true);
    const json pde = run_json({"pde-check", "--expr", "x1^2+x2^2", "--x", "1,1"});
    CHECK(pde["residuals"][1] == 6.0);
    const json flow = run_json({"integrate", "--expr", "-1/sqrt(x1^2+x2^2)", "--x0", "1,0", "--p0", "0,1", "--step",
                                "0.01", "--horizon", "1", "--integral", "0,0,0,0,0,1"});
    CHECK(flow["steps"] == 100);
    CHECK(flow["drift_H"].get<double>() < 1e-8);
    CHECK(flow["drift_F"].size() == 1);
    const json web = run_json({"web", "--beta", "1,0,0,0,0,1", "--density", "3"});
    CHECK(web["markers"].size() == 2);
    const Result svg = run({"web", "--beta", "1,0,0,0,0,1", "--density", "3"});
    CHECK(svg.code == 0);
    CHECK(svg.out.find("<svg") != std::string::npos);
}

TEST_CASE("exit codes") {
    CHECK(run({"classify", "--beta", "1,0,0"}).code == 2);
    CHECK(run({"classify", "--beta", "1,0,0,0,0,x"}).code == 2);
    CHECK(run({"nosuch"}).code == 2);
    CHECK(run({}).code == 2);
    CHECK(run({"--format", "yaml", "classify", "--beta", "1,0,0,0,0,1"}).code == 2);
    const Result parse = run({"bd", "--beta", "1,0,0,0,0,1", "--expr", "x1 + ", "--x", "1,1"});
    CHECK(parse.code == 2);
    CHECK(parse.err.find("position 5") != std::string::npos);
    CHECK(run({"k2", "--beta", "0,0,0,0,0,1"}).code == 3);
    CHECK(run({"foci", "--beta", "1,2,0,0,0,0"}).code == 3);
    CHECK(run({"web", "--beta", "1,1,0,0,0,0"}).code == 3);
    CHECK(run({"frame", "--beta", "1,0,0,0,0,1", "--x", "1,0"}).code == 3);
    CHECK(run({"pde-check", "--expr", "1/sqrt(x1^2+x2^2)", "--x", "0,0"}).code == 4);
    CHECK(run({"integrate", "--expr", "-1/sqrt(x1^2+x2^2)", "--x0", "1,0", "--p0", "0,0", "--step", "0.001",
               "--horizon", "5", "--precision", "double"})
              .code == 4);
    const Result ok = run({"k2", "--beta", "0,0,0,0,0,1"});
    CHECK(ok.out.empty());
    CHECK_FALSE(ok.err.empty());
}

TEST_CASE("version prints the conventions") {
    const Result r = run({"--version"});
    CHECK(r.code == 0);
    CHECK(r.out.find("pushforward") != std::string::npos);
}

TEST_CASE("output is deterministic") {
    const std::vector<std::string> args{"--format", "json", "compat-basis", "--expr", "x1*x2", "--seed", "7"};
    CHECK(run(args).out == run(args).out);
    const std::vector<std::string> w{"web", "--beta", "0,0,0,1,0,0", "--density", "4"};
    CHECK(run(w).out == run(w).out);
}

TEST_CASE("json outputs re-parse and round-trip") {
    for (const auto& args : std::vector<std::vector<std::string>>{
             {"invariants", "--beta", "1,2,3,4,5,6"},
             {"foci", "--beta", "1,4,0,0,-2,1"},
             {"joint", "--beta", "1,0,0,0,0,1", "--alpha", "1,4,0,0,-2,1"},
             {"canonical", "--beta", "0.3,1,0.2,0.4,-0.5,2"}}) {
        const json a = run_json(args);
        CHECK(json::parse(a.dump()) == a);
    }
}

TEST_CASE("inputs from a json file") {
    const auto path = write_temp("kt_cli_in.json", R"({"beta":[1,0,0,0,0,1],"alpha":"1,4,0,0,-2,1"})");
    const Result r = run({"resultant", "--in", path.string()});
    CHECK(r.code == 0);
    CHECK(r.out == "{\"value\":0.0,\"vanishing\":true}\n");
    // A flag wins over the file.
    CHECK(run({"classify", "--in", path.string(), "--beta", "0,0,0,0,0,1"}).out == "polar\n");

    const auto bad = write_temp("kt_cli_bad.json", "{not json");
    CHECK(run({"classify", "--in", bad.string()}).code == 2);
    CHECK(run({"classify", "--in", "/nonexistent/kt.json"}).code == 2);
}

TEST_CASE("seed from the environment, overridden by the flag") {
    const std::vector<std::string> base{"--format", "json", "compat-basis", "--expr", "x1*x2"};
    auto with = [&](std::vector<std::string> extra) {
        auto a = base;
        a.insert(a.end(), extra.begin(), extra.end());
        return run(a);
    };
    ::setenv("KT_SEED", "5", 1);
    const Result env = with({});
    const Result flag = with({"--seed", "5"});
    ::setenv("KT_SEED", "oops", 1);
    CHECK(with({}).code == 2);
    CHECK(with({"--seed", "5"}).out == flag.out);
    ::unsetenv("KT_SEED");
    CHECK(env.code == 0);
    CHECK(env.out == flag.out);
}

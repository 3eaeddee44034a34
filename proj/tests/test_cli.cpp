#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "xorhorn/cli.hpp"

using namespace xorhorn;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "xorhorn");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string temp_file(const std::string& name, const std::string& content) {
    const auto path = std::filesystem::temp_directory_path() / ("xorhorn-test-" + name);
    std::ofstream(path) << content;
    return path.string();
}

bool contains(const std::string& hay, const std::string& needle) { return hay.find(needle) != std::string::npos; }

}  // namespace

TEST_CASE("solve finds the running-example attack") {
    const Run r = run({"solve", "corpus:nsl-xor", "--mode", "xor", "--goal", "I(m(b,a))"});
    CHECK(r.code == kExitFound);
    CHECK(contains(r.out, "found: derivation with"));
    CHECK(contains(r.out, "step 1: "));
    CHECK(contains(r.out, "I(m(b, a))"));
}

TEST_CASE("solve in syntactic mode runs on the reduced theory") {
    const Run r = run({"solve", "corpus:nsl-xor", "--mode", "syntactic"});
    CHECK(r.code == kExitFound);
    CHECK(contains(r.out, "reduced theory: "));
}

TEST_CASE("json traces") {
    const Run r = run({"solve", "corpus:nsl-xor", "--json"});
    REQUIRE(r.code == kExitFound);
    const auto j = nlohmann::json::parse(r.out.substr(r.out.find('[')));
    CHECK(j.is_array());
    CHECK(j.back()["atom"] == "I(m(b, a))");
}

TEST_CASE("saturation and bounds exit with zero") {
    const std::string path = temp_file("facts.theory", "const a. const b.\n-> I(a).\n");
    Run r = run({"solve", path, "--goal", "I(b)"});
    CHECK(r.code == kExitOk);
    CHECK(contains(r.out, "saturated"));

    const std::string grow = temp_file("grow.theory", "fun f/1. const a. const b.\n-> I(a).\nI(X) -> I(f(X)).\n");
    r = run({"solve", grow, "--goal", "I(b)", "--max-size", "5", "--eager"});
    CHECK(r.code == kExitOk);
    CHECK(contains(r.out, "no derivation within bounds"));

    r = run({"solve", grow, "--goal", "I(b)", "--max-facts", "3", "--eager"});
    CHECK(r.code == kExitInconclusive);
}

TEST_CASE("check reports the dominating set") {
    const Run r = run({"check", "corpus:nsl-xor"});
    CHECK(r.code == kExitOk);
    CHECK(contains(r.out, "C = {a, b}"));
    CHECK(contains(r.out, "closure size: 4"));
}

TEST_CASE("a theory that is not xor-linear is rejected with a witness") {
    const std::string path =
        temp_file("nonlinear.theory", "fun f/1. const a.\n-> I(a).\nI(X), I(Y) -> I(f(X + Y)).\n");
    const Run r = run({"reduce", path});
    CHECK(r.code == kExitInputError);
    CHECK(contains(r.err, "X + Y"));

    const Run c = run({"check", path});
    CHECK(contains(c.out + c.err, "X + Y"));
}

TEST_CASE("reduce writes ProVerif text") {
    Run r = run({"reduce", "corpus:nsl-xor"});
    CHECK(r.code == kExitOk);
    CHECK(contains(r.out, "reduc"));
    CHECK(contains(r.out, "xtab"));

    r = run({"reduce", "corpus:nsl-xor", "--encoding", "plain"});
    CHECK(r.code == kExitOk);
    CHECK_FALSE(contains(r.out, "xtab"));

    const auto out_path = std::filesystem::temp_directory_path() / "xorhorn-test-out.horn";
    std::filesystem::remove(out_path);
    r = run({"reduce", "corpus:nsl-xor", "-o", out_path.string(), "--header", "set ignoreTypes = true."});
    CHECK(r.code == kExitOk);
    std::ifstream in(out_path);
    std::stringstream ss;
    ss << in.rdbuf();
    CHECK(contains(ss.str(), "set ignoreTypes = true."));
    CHECK(contains(ss.str(), "query attacker:m(b(),a())."));
}

TEST_CASE("input errors exit with three") {
    CHECK(run({"solve", "corpus:missing"}).code == kExitInputError);
    CHECK(run({"solve", "/nonexistent/file"}).code == kExitInputError);
    const std::string broken = temp_file("broken.theory", "-> I(a\n");
    const Run r = run({"check", broken});
    CHECK(r.code == kExitInputError);
    CHECK(contains(r.err, "syntax"));
    CHECK(run({"solve", "corpus:nsl-xor", "--goal", "I(X)"}).code == kExitInputError);
    CHECK(run({"solve", "corpus:nsl-xor", "--mode", "sideways"}).code == kExitInputError);
    CHECK(run({"frobnicate"}).code == kExitInputError);
}

TEST_CASE("corpus subcommands") {
    Run r = run({"corpus", "list"});
    CHECK(r.code == kExitOk);
    for (const char* name : {"nsl-xor", "nsl-xor-fix", "nsl-xor-auth", "cca-0", "cca-2b", "cca-2c", "cca-2e"})
        CHECK(contains(r.out, name));

    r = run({"corpus", "show", "nsl-xor"});
    CHECK(r.code == kExitOk);
    CHECK(contains(r.out, "query secret m(b, a)."));

    r = run({"corpus", "run", "nsl-xor"});
    CHECK(r.code == kExitFound);

    CHECK(run({"corpus", "show", "nope"}).code == kExitInputError);
}

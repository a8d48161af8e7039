#include "zkt/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"

using json = nlohmann::ordered_json;

namespace {

struct CliResult {
    int code = -1;
    std::string out;
    std::string err;
    json j;
};

CliResult run(std::vector<std::string> args) {
    std::ostringstream o, e;
    CliResult r;
    r.code = zkt::run_cli(args, o, e);
    r.out = o.str();
    r.err = e.str();
    if (!r.out.empty() && r.out[0] == '{') r.j = json::parse(r.out);
    return r;
}

std::string temp_path(const char* stem) {
    return (std::filesystem::temp_directory_path() / stem).string();
}

}  // namespace

TEST_CASE("eo command emits a versioned json document") {
    CliResult r = run({"eo", "Z(8)"});
    REQUIRE(r.code == 0);
    CHECK(r.j["schema"] == "zkt/1");
    CHECK(r.j["command"] == "eo");
    CHECK(r.j["result"]["eo"] == 1);
    CHECK(r.j["config"]["seed"] == 0);
    CHECK(run({"eo", "Z(4)^w + Z(2)^w"}).j["result"]["eo"] == 4);
    CHECK(run({"eo", "Z"}).j["result"]["eo"] == 0);
}

TEST_CASE("closure of a round union covers the whole bounded group") {
    CliResult r = run({"closure", "Z(4)^w", "round(4) | 2*round(4)"});
    REQUIRE(r.code == 0);
    CHECK(r.j["result"]["closed"] == "G[4]");
    CHECK(r.j["result"]["components"] == 1);
    CHECK(r.j["result"]["isolated"].empty());
}

TEST_CASE("exit codes separate syntax, domain and verification failures") {
    CHECK(run({"closure", "Z(4)^w", "round("}).code == 1);       // syntax
    CHECK(run({"closure", "Z(4)^w or bust", "G[2]"}).code == 1); // syntax in group
    CHECK(run({"nonsense"}).code == 1);                          // unknown command
    CHECK(run({"closure", "Z(4)^w", "round(1)"}).code == 2);     // no 1-round sets
    CHECK(run({"closure", "Zp(6,inf)", "G[2]"}).code == 2);      // 6 is not prime
    CHECK(run({"curve", "Z", "{0}"}).code == 2);                 // curve test needs infinite X
    CHECK(run({"realize", "Z(4)^w", "round(4)", "--prefix", "5"}).code == 3);
    CliResult help = run({"--help"});
    CHECK(help.code == 0);
    CHECK(help.out.find("closure") != std::string::npos);
}

TEST_CASE("error reports carry a caret position") {
    CliResult r = run({"eo", "Z + Y"});
    CHECK(r.code == 1);
    CHECK(r.err.find("^") != std::string::npos);
    CHECK(r.out.empty());
}

TEST_CASE("seed precedence: flag over environment over default") {
    setenv("ZK_SEED", "99", 1);
    CHECK(run({"eo", "Z"}).j["config"]["seed"] == 99);
    CHECK(run({"--seed", "7", "eo", "Z"}).j["config"]["seed"] == 7);
    unsetenv("ZK_SEED");
    CHECK(run({"eo", "Z"}).j["config"]["seed"] == 0);
    setenv("ZK_SEED", "pony", 1);
    CHECK(run({"eo", "Z"}).code == 2);
    unsetenv("ZK_SEED");
}

TEST_CASE("session file persists named groups, sets and sequences") {
    const std::string path = temp_path("zkt_cli_session.json");
    std::remove(path.c_str());

    CHECK(run({"--session", path, "define", "group", "G4", "Z(4)^w"}).code == 0);
    CHECK(run({"--session", path, "define", "set", "S", "G4", "round(4)"}).code == 0);

    CliResult r = run({"--session", path, "closure", "G4", "S | 2S"});
    REQUIRE(r.code == 0);
    CHECK(r.j["result"]["closed"] == "G[4]");
    CHECK(r.j["result"]["components"] == 1);

    // names resolve only against their own group
    CHECK(run({"--session", path, "closure", "Z", "S"}).code == 2);
    CHECK(run({"--session", path, "closure", "G4", "T"}).code == 2);

    CHECK(run({"--session", path, "round", "make", "G4", "4", "--name", "sq"}).code == 0);
    CliResult chk = run({"--session", path, "round", "check", "--name", "sq", "--prefix", "300"});
    CHECK(chk.code == 0);
    CHECK(chk.j["result"]["certified"] == true);
    CHECK(chk.j["result"]["max_count"] == 1);

    CliResult show = run({"--session", path, "session", "show"});
    json sj = json::parse(show.out);
    CHECK(sj["schema"] == "zkt-session/1");
    CHECK(sj["groups"]["G4"] == "Z(4)^w");
    CHECK(sj["sets"]["S"]["expr"] == "round(4)");
    CHECK(sj["generators"]["sq"]["order"] == 4);

    // reserved and unit-shaped names are rejected
    CHECK(run({"--session", path, "define", "group", "G", "Z"}).code == 2);
    CHECK(run({"--session", path, "define", "group", "e2", "Z"}).code == 2);
    std::remove(path.c_str());
}

TEST_CASE("density commands agree with the multiples criterion on Z") {
    CliResult r = run({"dense", "Z", "round(0)"});
    REQUIRE(r.code == 0);
    CHECK(r.j["result"]["dense"] == true);
    CHECK(r.j["result"]["multiples_criterion"] == true);

    r = run({"dense", "Z(4)^w", "G[2]"});
    CHECK(r.j["result"]["dense"] == false);
    CHECK(r.j["result"]["multiples_criterion"].is_null());  // bounded group

    r = run({"potdense", "Z", "span(e0)"});
    CHECK(r.j["result"]["zariski_dense"] == true);
    CHECK(r.j["result"]["potentially_dense"] == true);
}

TEST_CASE("structure commands expose certificates") {
    CliResult r = run({"mval", "Z(4)^w", "round(4) | 2*round(4)"});
    CHECK(r.j["result"]["m"] == 2);

    r = run({"curve", "Z(4)^w", "round(4)"});
    CHECK(r.j["result"]["curve"] == true);
    CHECK(r.j["result"]["round_order"] == 4);

    r = run({"irreducible", "Z(4)^w", "--order", "2"});
    CHECK(r.j["result"]["irreducible"] == true);
    CHECK(r.j["result"]["leading"][0]["multiplicity"] == "w");

    r = run({"irreducible", "Z(2)^w + Z(4)", "--order", "4"});
    CHECK(r.j["result"]["irreducible"] == false);

    r = run({"dim", "Z + Z(4)^w"});
    CHECK(r.j["result"]["dim"]["value"] == 3);
    r = run({"dim", "Zp(2,inf)^w"});
    CHECK(r.j["result"]["dim"]["infinite"] == true);

    r = run({"connected", "Z(6)^w", "G[2] | G[3]"});
    CHECK(r.j["result"]["connected"] == true);
    r = run({"components", "Z(6)^w", "G[2] | G[3]"});
    CHECK(r.j["result"]["count"] == 2);

    r = run({"torsion", "Z^2 + Z(8)^w", "4"});
    CHECK(r.j["result"]["subgroup"] == "Z(4)^w");

    r = run({"trim", "Z(6)^w", "6", "--prefix", "120"});
    CHECK(r.j["result"]["max_cross_count"] <= 1);
}

TEST_CASE("print canonicalizes and is idempotent") {
    CliResult r = run({"print", "group", "Z(2)+Z(2)"});
    CHECK(r.j["result"]["canonical"] == "Z(2)^2");

    r = run({"print", "set", "Z(4)^w", "0+G[2]|{e0,e0}"});
    const std::string canon = r.j["result"]["canonical"];
    CHECK(canon == "G[2] | {e0}");
    CliResult again = run({"print", "set", "Z(4)^w", canon});
    CHECK(again.j["result"]["canonical"] == canon);

    r = run({"print", "elem", "Z^2 + Q", "e0_1 - 3/4*e1"});
    CHECK(r.j["result"]["canonical"] == "e0_1 - 3/4*e1");
}

TEST_CASE("realize reports densities and writes csv dumps") {
    const std::string csv = temp_path("zkt_cli_weyl.csv");
    std::remove(csv.c_str());
    CliResult r = run({"realize", "Z", "round(0)", "--chars", "1", "--prefix", "2000",
                       "--eps", "0.05", "--csv", csv});
    REQUIRE(r.code == 0);
    CHECK(r.j["result"]["pass"] == true);
    CHECK(r.j["result"]["targets"][0]["covering"] == 1.0);
    std::ifstream in(csv);
    REQUIRE(in.good());
    std::string header;
    std::getline(in, header);
    CHECK(header == "element,chi1");
    std::remove(csv.c_str());
}

TEST_CASE("oracle subcommand runs suites and reports") {
    CliResult r = run({"oracle", "run", "--suite", "round"});
    REQUIRE(r.code == 0);
    CHECK(r.j["result"]["ok"] == true);
    CHECK(r.j["result"]["reports"][0]["suite"] == "round-prefixes");
    CHECK(r.j["result"]["reports"][0]["mismatches"] == 0);

    r = run({"oracle", "run", "--suite", "coset", "--cap", "12"});
    CHECK(r.code == 0);
    CHECK(r.j["result"]["reports"][0]["checks"].get<std::uint64_t>() > 1000);
}

#include "support.hpp"

#include "refold/cli.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>

namespace fs = std::filesystem;
using testsupport::fixture_dir;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run cli(std::vector<std::string> args)
{
    std::ostringstream out, err;
    int code = refold::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string fx(const std::string& f)
{
    return (fixture_dir() / f).string();
}

fs::path scratch(const std::string& name)
{
    fs::path p = fs::temp_directory_path() / ("refold_cli_" + name);
    fs::remove_all(p);
    return p;
}

bool contains(const std::string& s, const std::string& part)
{
    return s.find(part) != std::string::npos;
}

} // namespace

TEST_CASE("refines a decomposed group against its root")
{
    auto r = cli({"refines", fx("lamp_net.fgroup"), fx("lamp.fspec"), "--horizon", "4"});
    CHECK(r.code == 0);
    CHECK(contains(r.out, "refold refines (horizon 4, budget 1000000)\n"));
    CHECK(contains(r.out, "HOLDS (16 input traces)"));
    CHECK(r.err.empty());
}

TEST_CASE("failed refinement dumps a counterexample")
{
    auto r = cli({"refines", fx("lamp_bad.fspec"), fx("lamp.fspec"), "--horizon", "2"});
    CHECK(r.code == 1);
    CHECK(contains(r.out, "FAILS"));
    CHECK(contains(r.out, "counterexample:\n  input:\n    t=0 btn=press\n"));
}

TEST_CASE("classify reports partition sizes")
{
    auto r = cli({"classify", fx("lamp.fspec")});
    CHECK(r.code == 0);
    CHECK(contains(r.out, "moore: 2, mealy: 0, transition: 3, local: 0"));
    CHECK(contains(r.out, "m1     MooreOutput  mode      lamp"));
    CHECK(contains(r.out, "advisory:"));
}

TEST_CASE("json and text carry the same verdict")
{
    auto text = cli({"refines", fx("lamp_bad.fspec"), fx("lamp.fspec"), "--horizon", "3"});
    auto json = cli({"refines", fx("lamp_bad.fspec"), fx("lamp.fspec"), "--horizon", "3", "--format", "json"});
    CHECK(text.code == json.code);
    auto j = nlohmann::json::parse(json.out);
    CHECK(j["command"] == "refines");
    CHECK(j["horizon"] == 3);
    CHECK(j["budget"] == 1000000);
    CHECK(j["verdict"]["holds"] == false);
    const std::uint64_t n = j["verdict"]["traces_checked"];
    CHECK(contains(text.out, "FAILS (" + std::to_string(n) + " input trace"));
    CHECK(j["verdict"]["counterexample"]["input"][0]["btn"] == "press");
}

TEST_CASE("json error documents")
{
    auto r = cli({"refines", fx("lamp.fspec"), fx("cruise.fspec"), "--format", "json"});
    CHECK(r.code == 2);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j["error"]["code"] == "E_IFACE_MISMATCH");
    CHECK(r.err.empty());
}

TEST_CASE("exit codes")
{
    CHECK(cli({}).code == 2);
    CHECK(cli({"bogus"}).code == 2);
    CHECK(cli({"check", fx("missing.fspec")}).code == 2);
    CHECK(cli({"refines", fx("lamp.fspec"), fx("lamp.fspec"), "--horizon", "0"}).code == 2);
    CHECK(cli({"refines", fx("lamp.fspec"), fx("lamp.fspec"), "--horizon", "7"}).code == 3);
    CHECK(cli({"refines", fx("lamp.fspec"), fx("lamp.fspec"), "--budget", "15"}).code == 3);
    CHECK(cli({"refines", fx("lamp.fspec"), fx("lamp.fspec"), "--budget", "16"}).code == 0);
    CHECK(cli({"refines", fx("lamp.fspec"), fx("lamp.fspec"), "--seed", "42"}).code == 0);
    CHECK(cli({"--help"}).code == 0);

    fs::path dir = scratch("contra");
    fs::create_directories(dir);
    refold::write_file(dir / "contra.fspec", "component Contra\n"
                                             "in a : {p, q}\n"
                                             "out o : {x, y}\n"
                                             "gar\n"
                                             "f: true ==> o = x\n"
                                             "g: a = q ==> o = y\n");
    auto r = cli({"causality", (dir / "contra.fspec").string(), "--weak"});
    CHECK(r.code == 4);
    CHECK(contains(r.err, "E_INCONSISTENT"));
}

TEST_CASE("budget from the environment")
{
    ::setenv("REFOLD_BUDGET", "3", 1);
    auto low = cli({"refines", fx("lamp.fspec"), fx("lamp.fspec")});
    auto flag = cli({"refines", fx("lamp.fspec"), fx("lamp.fspec"), "--budget", "100"});
    ::setenv("REFOLD_BUDGET", "x", 1);
    auto bad = cli({"refines", fx("lamp.fspec"), fx("lamp.fspec")});
    ::unsetenv("REFOLD_BUDGET");
    CHECK(low.code == 3);
    CHECK(flag.code == 0);
    CHECK(contains(flag.out, "budget 100)"));
    CHECK(bad.code == 2);
}

TEST_CASE("check reports validity and determinism")
{
    auto r = cli({"check", fx("lamp.fspec")});
    CHECK(r.code == 0);
    CHECK(contains(r.out, "component Lamp: valid"));
    CHECK(contains(r.out, "deterministic: yes"));
    auto req = cli({"check", fx("req_xle1.fspec"), "--format", "json"});
    auto j = nlohmann::json::parse(req.out);
    CHECK(j["requirement"] == true);
    CHECK(j["deterministic"] == false);
}

TEST_CASE("causality verdicts")
{
    auto lamp = cli({"causality", fx("lamp.fspec"), "--strong"});
    CHECK(lamp.code == 0);
    CHECK(contains(lamp.out, "strong causality: HOLDS (16 input traces)"));
    CHECK(!contains(lamp.out, "weak"));
    auto echo = cli({"causality", fx("lamp_echo.fspec")});
    CHECK(echo.code == 1);
    CHECK(contains(echo.out, "strong causality: FAILS"));
    CHECK(contains(echo.out, "weak causality: HOLDS"));
}

TEST_CASE("decompose writes a verifiable group")
{
    fs::path dir = scratch("decompose");
    auto r = cli({"decompose", fx("lamp.fspec"), "--schema", "mealy-moore", "--out", dir.string(), "--verify"});
    CHECK(r.code == 0);
    CHECK(contains(r.out, "equivalence: HOLDS (16 input traces)"));
    CHECK(contains(r.out, "strong: holds -> holds"));
    CHECK(fs::exists(dir / "Lamp_net.fgroup"));
    auto v = cli({"group", "verify", (dir / "Lamp_net.fgroup").string()});
    CHECK(v.code == 0);
    CHECK(contains(v.out, "layer 1: HOLDS (traces checked: 16, H=4)"));

    auto loc = cli({"decompose", fx("adder.fspec"), "--schema", "locals", "--select", "d", "--verify", "--horizon", "3",
                    "--format", "json"});
    CHECK(loc.code == 0);
    auto j = nlohmann::json::parse(loc.out);
    CHECK(j["verification"]["equivalent"] == true);
    CHECK(j["verification"]["traces_checked"] == 27);

    CHECK(cli({"decompose", fx("lamp.fspec"), "--schema", "locals", "--select", "nope"}).code == 2);
    CHECK(cli({"decompose", fx("lamp.fspec"), "--schema", "mealy-moore", "--select", "x"}).code == 2);
}

TEST_CASE("simulate prints every behavior")
{
    auto r = cli({"simulate", fx("lamp.fspec"), "--inputs", fx("lamp_press_idle.trace")});
    CHECK(r.code == 0);
    CHECK(contains(r.out, "1 behavior\nbehavior 1:\n  t=0 lamp=off\n  t=1 lamp=on\n"));
}

TEST_CASE("group extend reports shape changes")
{
    auto in_place = cli({"group", "extend", fx("lamp_net.fgroup"), "--mode", "in-place", "--delta",
                         fx("lamp_redundant.delta"), "--format", "json"});
    CHECK(in_place.code == 0);
    auto a = nlohmann::json::parse(in_place.out);
    CHECK(a["before"]["m"] == a["after"]["m"]);

    fs::path dir = scratch("extend");
    auto layer = cli({"group", "extend", fx("lamp_net.fgroup"), "--mode", "new-layer", "--delta",
                      fx("lamp_redundant.delta"), "--out", dir.string()});
    CHECK(layer.code == 0);
    CHECK(contains(layer.out, "before: m=1 N=3\nafter: m=2 N=4\n"));
    auto v = cli({"group", "verify", (dir / "Lamp_net.fgroup").string()});
    CHECK(v.code == 0);
    CHECK(contains(v.out, "m=2 N=4"));

    auto dot = cli({"group", "dot", fx("lamp_net.fgroup"), "--verify"});
    CHECK(dot.code == 0);
    CHECK(dot.out.rfind("// refold group dot", 0) == 0);
    CHECK(contains(dot.out, "[label=\"holds H=4\""));
}

TEST_CASE("requirement ledger commands")
{
    fs::path dir = scratch("ledger");
    auto add = [&](const std::string& f) { return cli({"req", "add", dir.string(), fx(f), "--horizon", "3"}); };
    CHECK(contains(add("req_xle1.fspec").out, "NewDimension (level 0)"));
    CHECK(contains(add("req_xle2.fspec").out, "PromotedToAbstract (level 1)"));
    auto replaced = add("req_xeq0.fspec");
    CHECK(contains(replaced.out, "Replaced (level 0)"));
    CHECK(contains(replaced.out, "displaced to level 1: XLe1"));
    CHECK(contains(replaced.out, "level0/XEq0.fspec"));
    auto dup = cli({"req", "add", dir.string(), fx("req_xle2.fspec"), "--id", "Again", "--horizon", "3"});
    CHECK(dup.code == 0);
    CHECK(contains(dup.out, "Duplicate"));
    CHECK(contains(cli({"req", "add", dir.string(), fx("req_xle2.fspec")}).out, "Duplicate"));
    CHECK(cli({"req", "add", dir.string(), fx("req_ylo.fspec"), "--id", "XLe2"}).code == 2);

    auto ok = cli({"req", "check", dir.string(), fx("sys_x0.fspec"), "--horizon", "3"});
    CHECK(ok.code == 0);
    auto bad = cli({"req", "check", dir.string(), fx("sys_x02.fspec"), "--horizon", "3"});
    CHECK(bad.code == 1);

    auto empty = cli({"req", "check", scratch("empty").string(), fx("sys_x0.fspec")});
    CHECK(empty.code == 0);
    CHECK(contains(empty.out, "0 requirements"));
}

TEST_CASE("identical invocations give identical reports")
{
    for (const auto& fmt : {"text", "json"}) {
        std::vector<std::string> args{"causality", fx("cruise.fspec"), "--format", fmt};
        auto a = cli(args);
        auto b = cli(args);
        CHECK(a.code == b.code);
        CHECK(a.out == b.out);
    }
}

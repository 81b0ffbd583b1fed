// Acceptance run: one PASS/FAIL line per primary criterion.

#include "random_component.hpp"
#include "support.hpp"

#include "refold/causality.hpp"
#include "refold/cli.hpp"
#include "refold/decomposer.hpp"
#include "refold/requirements.hpp"

#include <array>
#include <chrono>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <sys/wait.h>

using namespace refold;
namespace fs = std::filesystem;
using testsupport::fixture;

namespace {

// Pinned tolerances.
constexpr double decompose_seconds = 10.0;
constexpr std::size_t decompose_horizon = 4;
constexpr std::size_t adder_horizon = 3;
constexpr std::size_t law_horizon = 3;
constexpr std::size_t group_horizon = 4;
constexpr int random_components = 200;
constexpr std::size_t random_horizon = 3;
constexpr std::uint32_t random_seed = 20240601;

Bounds horizon(std::size_t h)
{
    Bounds b;
    b.horizon = h;
    return b;
}

struct Outcome {
    bool pass = true;
    std::vector<std::string> notes;  // details, failures first

    void require(bool ok, const std::string& what)
    {
        if (!ok) {
            pass = false;
            notes.insert(notes.begin(), "violated: " + what);
        }
    }
    void note(const std::string& s) { notes.push_back(s); }
};

int failures = 0;

void report(const std::string& name, const std::function<void(Outcome&)>& body)
{
    Outcome o;
    try {
        body(o);
    } catch (const std::exception& e) {
        o.pass = false;
        o.notes.insert(o.notes.begin(), std::string("exception: ") + e.what());
    }
    if (!o.pass)
        ++failures;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name;
    for (std::size_t i = 0; i < o.notes.size(); ++i)
        std::cout << (i == 0 ? ": " : "; ") << o.notes[i];
    std::cout << std::endl;
}

std::size_t count_role(const Component& c, VarKind kind)
{
    return static_cast<std::size_t>(std::count_if(c.vars.begin(), c.vars.end(), [&](const VarDecl& v) { return v.kind == kind; }));
}

std::size_t count_dir(const Component& c, Direction d)
{
    return static_cast<std::size_t>(
        std::count_if(c.channels.begin(), c.channels.end(), [&](const ChannelDecl& ch) { return ch.direction == d; }));
}

// ---------------------------------------------------------------------------

void corpus(Outcome& o)
{
    auto lamp = fixture("lamp.fspec");
    o.require(count_dir(lamp, Direction::input) == 1 && interface_of(lamp).inputs.domains[0].size() == 2,
              "Lamp has one 2-value input");
    o.require(count_role(lamp, VarKind::state) == 1 && lamp.formulas.size() == 5, "Lamp has 1 state var, 5 formulas");

    auto echo = fixture("lamp_echo.fspec");
    o.require(!classify_component(echo).mealy.empty() && classify_component(lamp).mealy.empty(),
              "LampEcho adds a Mealy output to Lamp");
    o.require(count_dir(echo, Direction::output) == count_dir(lamp, Direction::output) + 1, "LampEcho has one more output");

    auto adder = fixture("adder.fspec");
    o.require(count_role(adder, VarKind::local) == 1, "Adder has 1 local");

    auto cruise = fixture("cruise.fspec");
    o.require(count_dir(cruise, Direction::input) == 2 && count_dir(cruise, Direction::output) == 2 &&
                  count_role(cruise, VarKind::state) == 1 && count_role(cruise, VarKind::local) == 1 &&
                  cruise.formulas.size() >= 8,
              "Cruise has 2 inputs, 2 outputs, 1 state var, 1 local, >= 8 formulas");

    int reqs = 0;
    for (const char* f : {"req_xle1.fspec", "req_xle2.fspec", "req_xeq0.fspec"}) {
        auto r = fixture(f);
        const auto& outs = interface_of(r).outputs;
        auto x = outs.index_of("x");
        o.require(r.requirement && x && outs.domains[*x] == ValueDomain::integer(0, 3), std::string(f) + " is over x: int 0..3");
        ++reqs;
    }
    o.note("4 components + " + std::to_string(reqs) + " requirement specs");

    // engine against the frozen oracle output
    std::size_t checked = 0;
    auto behaviors_match = [&](const char* file, const char* golden, std::size_t h) {
        auto comp = fixture(file);
        auto fr = frames_of(comp);
        const auto cases = testsupport::golden(golden).at("cases");
        for (const auto& c : cases) {
            Trace input = testsupport::trace_from_json(fr.inputs, c.at("inputs"));
            BehaviorSet expected;
            for (const auto& b : c.at("behaviors"))
                expected.insert(testsupport::trace_from_json(fr.outputs, b));
            o.require(behaviors(comp, input, horizon(h)) == expected, std::string(golden) + " matches");
            ++checked;
        }
    };
    behaviors_match("lamp.fspec", "lamp_behaviors_h4.json", 4);
    behaviors_match("lamp_echo.fspec", "lamp_echo_behaviors_h4.json", 4);
    behaviors_match("adder.fspec", "adder_behaviors_h3.json", 3);
    behaviors_match("cruise.fspec", "cruise_behaviors_h4.json", 4);

    std::map<std::string, Component> by_name;
    for (const auto& e : fs::directory_iterator(testsupport::fixture_dir()))
        if (e.path().extension() == ".fspec") {
            auto c = fixture(e.path().filename().string());
            by_name[c.name] = c;
        }
    const auto refinement_golden = testsupport::golden("refinement.json");
    for (const auto& [key, expected] : refinement_golden.items()) {
        auto le = key.find("<=");
        auto at = key.find('@');
        const Component& a = by_name.at(key.substr(0, le));
        const Component& b = by_name.at(key.substr(le + 2, at - le - 2));
        auto v = refines(a, b, horizon(std::stoul(key.substr(at + 1))));
        bool ok = expected.is_null() ? v.holds : !v.holds && v.counterexample;
        if (ok && !expected.is_null()) {
            auto fr = frames_of(a);
            ok = v.counterexample->input == testsupport::trace_from_json(fr.inputs, expected.at("inputs")) &&
                 v.counterexample->output == testsupport::trace_from_json(fr.outputs, expected.at("output"));
        }
        o.require(ok, "refinement golden " + key);
        ++checked;
    }
    const auto classification_golden = testsupport::golden("classification.json");
    for (const auto& [name, labels] : classification_golden.items()) {
        for (const auto& row : classify_component(by_name.at(name)).rows) {
            o.require(labels.at(row.label) == std::string(class_name(row.cls)), "classification golden " + name + "." + row.label);
            ++checked;
        }
    }
    const auto causality_golden = testsupport::golden("causality.json");
    for (const auto& [name, expected] : causality_golden.items()) {
        const Component& c = by_name.at(name);
        auto v = check_strong_causality(c, horizon(3));
        bool ok = v.holds == expected.at("holds").get<bool>();
        if (ok && !v.holds) {
            auto fr = frames_of(c);
            ok = v.witness && v.witness->tick == expected.at("tick").get<std::size_t>() &&
                 v.witness->first == testsupport::trace_from_json(fr.inputs, expected.at("first")) &&
                 v.witness->second == testsupport::trace_from_json(fr.inputs, expected.at("second"));
        }
        o.require(ok, "causality golden " + name);
        ++checked;
    }
    o.note(std::to_string(checked) + " golden values reproduced");

#ifdef REFOLD_ORACLE_COMMAND
    int rc = std::system(REFOLD_ORACLE_COMMAND " >/dev/null 2>&1");
    o.require(rc == 0, "oracle regenerates identical golden files");
    o.note("oracle goldens fresh");
#endif
}

struct Applied {
    std::string label;
    Component original;
    DecompositionResult result;
    std::size_t horizon;
};

std::vector<Applied> applied_schemas()
{
    std::vector<Applied> out;
    for (const char* file : {"lamp.fspec", "lamp_echo.fspec", "adder.fspec", "cruise.fspec"}) {
        Component c = fixture(file);
        const std::size_t h = c.name == "Adder" ? adder_horizon : decompose_horizon;
        auto add = [&](const std::string& schema, auto&& make) {
            try {
                DecompositionResult r = make();
                out.push_back({c.name + "/" + schema, c, std::move(r), h});
            } catch (const Error& e) {
                // schema not applicable to this fixture
                if (e.code() != Code::nothing_to_split && e.code() != Code::out_targets_state &&
                    e.code() != Code::out_shared && e.code() != Code::local_state_dep && e.code() != Code::local_mixed)
                    throw;
            }
        };
        add("mealy-moore", [&] { return split_mealy_moore(c); });
        std::set<std::string> locals;
        for (const auto& v : c.vars)
            if (v.kind == VarKind::local)
                locals.insert(v.name);
        if (!locals.empty())
            add("locals", [&] { return extract_locals(c, locals); });
        for (const auto& ch : c.channels)
            if (ch.direction == Direction::output)
                add("outputs(" + ch.name + ")", [&] { return extract_outputs(c, {ch.name}); });
    }
    return out;
}

void soundness(Outcome& o)
{
    auto start = std::chrono::steady_clock::now();
    auto all = applied_schemas();
    std::map<std::string, std::uint64_t> expected_traces{{"Lamp", 16}, {"LampEcho", 16}, {"Adder", 27}, {"Cruise", 256}};
    for (const auto& a : all) {
        auto v = verify_decomposition(a.original, a.result, horizon(a.horizon));
        o.require(v.holds, a.label + " equivalent at H=" + std::to_string(a.horizon));
        o.require(v.traces_checked == expected_traces.at(a.original.name),
                  a.label + " checked " + std::to_string(v.traces_checked) + " input traces");
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    o.require(secs < decompose_seconds, "runtime under " + std::to_string(decompose_seconds) + " s");
    std::map<std::string, int> per_fixture;
    for (const auto& a : all)
        ++per_fixture[a.original.name];
    for (const auto& [name, n] : expected_traces)
        o.require(per_fixture[name] > 0, "some schema applies to " + name);
    std::ostringstream t;
    t.precision(3);
    t << all.size() << " fixture x schema results equivalent (";
    for (auto it = per_fixture.begin(); it != per_fixture.end(); ++it)
        t << (it == per_fixture.begin() ? "" : ", ") << it->first << " " << it->second;
    t << "), " << secs << " s";
    o.note(t.str());
}

void mutations(Outcome& o)
{
    std::size_t total = 0, caught = 0;
    for (const auto& a : applied_schemas()) {
        std::set<std::string> moore_labels;
        for (const auto& row : classify_component(a.original).rows)
            if (row.cls == FormulaClass::moore_output)
                moore_labels.insert(row.label);
        for (std::size_t p = 0; p < a.result.parts.size(); ++p) {
            const Component& part = a.result.parts[p];
            for (std::size_t f = 0; f < part.formulas.size(); ++f) {
                const Formula& formula = part.formulas[f];
                if (!moore_labels.count(formula.label) && classify_formula(part, formula) != FormulaClass::moore_output)
                    continue;
                ++total;
                DecompositionResult m = a.result;
                m.parts[p].formulas.erase(m.parts[p].formulas.begin() + static_cast<long>(f));
                m.network = compose(m.parts, m.aux_channels);
                auto v = verify_decomposition(a.original, m, horizon(a.horizon));
                const bool detected = !v.holds && v.counterexample;
                caught += detected;
                o.require(detected, a.label + " without " + part.name + "." + formula.label);
            }
        }
    }
    o.require(total > 0, "some Moore formulas to delete");
    o.note(std::to_string(caught) + "/" + std::to_string(total) + " deletions detected");
}

void laws(Outcome& o)
{
    std::vector<std::pair<std::string, Machine>> ms;
    for (const auto& e : fs::directory_iterator(testsupport::fixture_dir()))
        if (e.path().extension() == ".fspec") {
            auto c = fixture(e.path().filename().string());
            ms.emplace_back(c.name, Machine::of(c));
        }
    auto group = parse_group_manifest(read_file(testsupport::fixture_dir() / "lamp_net.fgroup"), testsupport::fixture_dir());
    if (!group)
        throw Error(Code::invalid, format_diagnostics(group.diagnostics));
    ms.emplace_back("Lamp_net", Machine::of(layer_network(*group, 1)));
    std::sort(ms.begin(), ms.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

    const std::size_t n = ms.size();
    std::vector<std::vector<int>> rel(n, std::vector<int>(n, -1));  // -1: interfaces differ
    std::size_t pairs = 0, refl = 0, triples = 0, failing = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (!(ms[i].second.interface() == ms[j].second.interface()))
                continue;
            ++pairs;
            auto v = refines(ms[i].second, ms[j].second, horizon(law_horizon));
            rel[i][j] = v.holds;
            if (i == j) {
                o.require(v.holds, "reflexivity of " + ms[i].first);
                refl += v.holds;
            }
            if (!v.holds) {
                ++failing;
                auto w = refines(ms[i].second, ms[j].second, horizon(law_horizon + 1));
                o.require(!w.holds, ms[i].first + " <= " + ms[j].first + " still fails at H=" + std::to_string(law_horizon + 1));
            }
        }
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            for (std::size_t c = 0; c < n; ++c) {
                if (rel[a][b] != 1 || rel[b][c] != 1)
                    continue;
                ++triples;
                o.require(rel[a][c] == 1, "transitivity " + ms[a].first + " <= " + ms[b].first + " <= " + ms[c].first);
            }
    o.note(std::to_string(n) + " specs, " + std::to_string(pairs) + " comparable pairs, reflexive " + std::to_string(refl) +
           "/" + std::to_string(n) + ", " + std::to_string(triples) + " chained triples, " + std::to_string(failing) +
           " failing pairs persist at H=" + std::to_string(law_horizon + 1));
}

std::vector<std::vector<std::string>> level_ids(const RequirementLedger& l)
{
    std::vector<std::vector<std::string>> out;
    for (const auto& level : l.levels) {
        out.emplace_back();
        for (const auto& r : level)
            out.back().push_back(r.id);
    }
    return out;
}

void requirement_cases(Outcome& o)
{
    const Bounds b = horizon(group_horizon);
    auto req = [](const char* f) {
        auto c = fixture(f);
        return Requirement{c.name, c};
    };
    std::size_t soundness_checks = 0;
    auto sound = [&](const RequirementLedger& l, const std::string& when) {
        for (std::size_t k = 0; k + 1 < l.levels.size(); ++k) {
            ++soundness_checks;
            o.require(check_level_soundness(l, k, b).verdict.holds, "level soundness after " + when);
        }
    };
    using Levels = std::vector<std::vector<std::string>>;
    RequirementLedger base = add_requirement({}, req("req_xle1.fspec"), b).ledger;

    auto c1 = add_requirement(base, req("req_xle2.fspec"), b);
    o.require(c1.outcome.kind == OutcomeKind::promoted_to_abstract && c1.outcome.level == 1 &&
                  c1.outcome.witness == std::string("XLe1") && level_ids(c1.ledger) == Levels{{"XLe1"}, {"XLe2"}},
              "x<=2 after x<=1 is case 1");
    sound(c1.ledger, "case 1");

    auto c2 = add_requirement(base, req("req_xeq0.fspec"), b);
    o.require(c2.outcome.kind == OutcomeKind::replaced && c2.outcome.displaced == std::vector<std::string>{"XLe1"} &&
                  level_ids(c2.ledger) == Levels{{"XEq0"}, {"XLe1"}},
              "x=0 after x<=1 is case 2 displacing x<=1");
    sound(c2.ledger, "case 2");

    auto c3 = add_requirement(base, req("req_ylo.fspec"), b);
    o.require(c3.outcome.kind == OutcomeKind::new_dimension && level_ids(c3.ledger) == Levels{{"XLe1", "YLo"}},
              "y constraint is case 3");
    sound(c3.ledger, "case 3");

    std::size_t dups = 0;
    for (const auto* l : {&c1.ledger, &c2.ledger, &c3.ledger}) {
        for (const auto& id : l->history) {
            auto again = add_requirement(*l, *l->find(id), b);
            o.require(again.outcome.kind == OutcomeKind::duplicate && level_ids(again.ledger) == level_ids(*l) &&
                          again.ledger.history == l->history,
                      "re-adding " + id + " is a duplicate");
            sound(again.ledger, "re-adding " + id);
            ++dups;
        }
    }
    o.note("cases 1/2/3 give the expected outcomes, " + std::to_string(dups) + " re-adds were duplicates, " +
           std::to_string(soundness_checks) + " level-soundness checks held");
}

void groups(Outcome& o)
{
    const Bounds b = horizon(group_horizon);
    Component lamp = fixture("lamp.fspec");
    fs::path dir = fs::temp_directory_path() / "refold_acceptance_group";
    fs::remove_all(dir);
    write_decomposition(lamp, split_mealy_moore(lamp), dir);
    auto g = parse_group_manifest(read_file(dir / "Lamp_net.fgroup"), dir);
    if (!g)
        throw Error(Code::invalid, format_diagnostics(g.diagnostics));
    auto shape = [&](const SpecificationGroup& x, const std::string& what) {
        o.require(x.spec_count() >= x.layer_count(), "N >= m for " + what);
    };
    shape(*g, "the generated group");

    auto vs = verify_group(*g, b);
    o.require(vs.size() == 1 && vs[0].verdict.holds, "generated Lamp group verifies at H=4");
    o.require(refines(Machine::of(layer_network(*g, g->layer_count())), Machine::of(g->root), b).holds,
              "top layer refines the root");

    auto delta = parse_formulas(read_file(testsupport::fixture_dir() / "lamp_redundant.delta"), g->root);
    if (!delta)
        throw Error(Code::invalid, format_diagnostics(delta.diagnostics));
    auto in_place = extend_spec(*g, 0, 0, *delta, ExtendMode::in_place, b);
    shape(in_place.group, "in-place extension");
    o.require(in_place.group.layer_count() == g->layer_count() && in_place.group.spec_count() == g->spec_count(),
              "in-place keeps m and N");
    auto ip = verify_group(in_place.group, b);
    o.require(std::all_of(ip.begin(), ip.end(), [](const LayerVerdict& v) { return v.verdict.holds; }),
              "in-place group verifies");

    auto layer = extend_spec(*g, 0, 0, *delta, ExtendMode::new_layer, b);
    shape(layer.group, "new-layer extension");
    o.require(layer.group.layer_count() == g->layer_count() + 1 && layer.group.spec_count() == g->spec_count() + 1,
              "new-layer adds exactly one layer and one spec");
    auto nl = verify_group(layer.group, b);
    o.require(std::all_of(nl.begin(), nl.end(), [](const LayerVerdict& v) { return v.verdict.holds; }),
              "new-layer group verifies");
    o.note("Lamp group m=" + std::to_string(g->layer_count()) + " N=" + std::to_string(g->spec_count()) +
           " HOLDS at H=4; in-place m=" + std::to_string(in_place.group.layer_count()) + " N=" +
           std::to_string(in_place.group.spec_count()) + "; new-layer m=" + std::to_string(layer.group.layer_count()) +
           " N=" + std::to_string(layer.group.spec_count()));
}

void causality(Outcome& o)
{
    testsupport::ComponentGenerator gen(random_seed);
    int held = 0;
    for (int i = 0; i < random_components; ++i) {
        Component c = gen.component("R" + std::to_string(i));
        bool ok = check_weak_causality(c, horizon(random_horizon)).holds;
        held += ok;
        o.require(ok, "weak causality of random component:\n" + render_component(c));
    }
    std::vector<std::string> premise;
    for (const auto& e : fs::directory_iterator(testsupport::fixture_dir())) {
        if (e.path().extension() != ".fspec")
            continue;
        auto c = fixture(e.path().filename().string());
        if (!classify_component(c).mealy.empty())
            continue;
        premise.push_back(c.name);
        o.require(check_strong_causality(c, horizon(decompose_horizon)).holds, "strong causality of " + c.name);
    }
    std::sort(premise.begin(), premise.end());
    o.require(!premise.empty(), "some fixture without Mealy formulas");
    std::string names;
    for (const auto& p : premise)
        names += (names.empty() ? "" : ",") + p;
    o.note(std::to_string(held) + "/" + std::to_string(random_components) + " random components weakly causal; strong causality on " +
           std::to_string(premise.size()) + " Mealy-free fixtures (" + names + ")");
}

// ---------------------------------------------------------------------------

struct CliRun {
    int code;
    std::string out;

    friend bool operator==(const CliRun&, const CliRun&) = default;
};

std::string quoted(const std::string& s)
{
    std::string out = "'";
    for (char c : s)
        out += c == '\'' ? std::string("'\\''") : std::string(1, c);
    return out + "'";
}

CliRun via_binary(const std::vector<std::string>& args)
{
    std::string cmd = quoted(REFOLD_CLI_PATH);
    for (const auto& a : args)
        cmd += " " + quoted(a);
    cmd += " 2>/dev/null";
    FILE* pipe = ::popen(cmd.c_str(), "r");
    if (!pipe)
        throw std::runtime_error("cannot start " + cmd);
    std::string out;
    std::array<char, 4096> buf{};
    std::size_t got;
    while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0)
        out.append(buf.data(), got);
    int status = ::pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

CliRun via_run(const std::vector<std::string>& args)
{
    std::ostringstream out, err;
    int code = cli::run(args, out, err);
    return {code, out.str()};
}

struct Invocation {
    std::vector<std::string> args;
    int expected;
};

std::vector<Invocation> session(const fs::path& scratch)
{
    auto fx = [](const char* f) { return (testsupport::fixture_dir() / f).string(); };
    auto tmp = [&](const char* d) { return (scratch / d).string(); };
    std::vector<Invocation> s{
        {{"refines", fx("lamp_net.fgroup"), fx("lamp.fspec"), "--horizon", "4"}, 0},
        {{"classify", fx("lamp.fspec")}, 0},
        {{"refines", fx("lamp_bad.fspec"), fx("lamp.fspec"), "--horizon", "2"}, 1},
        {{"decompose", fx("lamp.fspec"), "--schema", "mealy-moore", "--out", tmp("lamp"), "--verify"}, 0},
        {{"decompose", fx("lamp_echo.fspec"), "--schema", "mealy-moore", "--out", tmp("echo"), "--verify"}, 0},
        {{"decompose", fx("adder.fspec"), "--schema", "locals", "--select", "d", "--out", tmp("adder"), "--verify", "--horizon", "3"}, 0},
        {{"decompose", fx("cruise.fspec"), "--schema", "mealy-moore", "--out", tmp("cruise_mm"), "--verify"}, 0},
        {{"decompose", fx("cruise.fspec"), "--schema", "locals", "--select", "boost", "--verify", "--format", "json"}, 0},
        {{"decompose", fx("cruise.fspec"), "--schema", "outputs", "--select", "indicator", "--verify"}, 0},
        {{"group", "verify", fx("lamp_net.fgroup")}, 0},
        {{"group", "verify", fx("lamp_net.fgroup"), "--format", "json"}, 0},
        {{"group", "extend", fx("lamp_net.fgroup"), "--mode", "in-place", "--delta", fx("lamp_redundant.delta")}, 0},
        {{"group", "extend", fx("lamp_net.fgroup"), "--mode", "new-layer", "--delta", fx("lamp_redundant.delta"), "--out", tmp("ext")}, 0},
        {{"group", "dot", fx("lamp_net.fgroup"), "--verify"}, 0},
        {{"causality", fx("lamp_echo.fspec"), "--horizon", "3"}, 1},
        {{"causality", fx("cruise.fspec"), "--format", "json"}, 1},
        {{"simulate", fx("lamp.fspec"), "--inputs", fx("lamp_press_idle.trace")}, 0},
        {{"check", fx("cruise.fspec")}, 0},
        {{"req", "add", tmp("ledger"), fx("req_xle1.fspec")}, 0},
        {{"req", "add", tmp("ledger"), fx("req_xle2.fspec")}, 0},
        {{"req", "add", tmp("ledger"), fx("req_xeq0.fspec"), "--format", "json"}, 0},
        {{"req", "check", tmp("ledger"), fx("sys_x0.fspec")}, 0},
        {{"req", "add", tmp("ledger"), fx("req_ylo.fspec")}, 0},
        {{"req", "add", tmp("ledger"), fx("req_xle2.fspec")}, 0},
        {{"req", "check", tmp("ledger"), fx("sys_x02.fspec"), "--format", "json"}, 1},
        {{"refines", fx("lamp.fspec"), fx("cruise.fspec")}, 2},
        {{"refines", fx("lamp.fspec"), fx("lamp.fspec"), "--budget", "3"}, 3},
    };
    return s;
}

void determinism(Outcome& o)
{
    const fs::path scratch = fs::temp_directory_path() / "refold_acceptance_cli";
    auto sweep = [&](CliRun (*exec)(const std::vector<std::string>&)) {
        fs::remove_all(scratch);
        fs::create_directories(scratch);
        std::vector<CliRun> out;
        for (const auto& inv : session(scratch))
            out.push_back(exec(inv.args));
        return out;
    };
    const auto first = sweep(via_run);
    const auto second = sweep(via_run);
    const auto binary = sweep(via_binary);
    const auto binary2 = sweep(via_binary);
    const auto invocations = session(scratch);
    std::size_t identical = 0;
    for (std::size_t i = 0; i < invocations.size(); ++i) {
        std::string what;
        for (const auto& a : invocations[i].args)
            what += (what.empty() ? "" : " ") + fs::path(a).filename().string();
        o.require(first[i].code == invocations[i].expected,
                  "`" + what + "` exits " + std::to_string(first[i].code) + ", expected " + std::to_string(invocations[i].expected));
        const bool same = first[i] == second[i] && first[i] == binary[i] && binary[i] == binary2[i];
        o.require(same, "`" + what + "` reports differ between runs");
        identical += same;
    }
    o.require(first[0].out.find("HOLDS (16 input traces)") != std::string::npos, "lamp_net refines lamp reports 16 traces");
    o.require(first[1].out.find("moore: 2, mealy: 0, transition: 3") != std::string::npos, "classify lamp rows");
    o.require(first[2].out.find("counterexample:") != std::string::npos, "bad refinement dumps a counterexample");
    o.note(std::to_string(identical) + "/" + std::to_string(invocations.size()) +
           " invocations byte-identical across 2 in-process and 2 binary runs");
}

} // namespace

int main()
{
    report("[corpus] fixture corpus and oracle goldens", corpus);
    report("[decompose] decomposition soundness", soundness);
    report("[mutation] Moore-formula deletion detected", mutations);
    report("[laws] refinement laws", laws);
    report("[requirements] insertion cases", requirement_cases);
    report("[groups] group verification and extension", groups);
    report("[causality] weak causality and Mealy-free strong causality", causality);
    report("[cli] CLI determinism", determinism);
    std::cout << (failures == 0 ? "all criteria pass" : std::to_string(failures) + " criteria fail") << std::endl;
    return failures == 0 ? 0 : 1;
}

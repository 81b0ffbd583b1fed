#include "support.hpp"

#include <doctest.h>

#include <algorithm>

using namespace refold;
using testsupport::fixture;
using testsupport::parse;

namespace {

bool has_code(const std::vector<Diagnostic>& diags, Code code)
{
    return std::any_of(diags.begin(), diags.end(), [&](const Diagnostic& d) { return d.code == code; });
}

std::vector<Diagnostic> parse_errors(const std::string& text)
{
    auto r = parse_component(text, "<test>");
    return r.diagnostics;
}

} // namespace

TEST_CASE("lamp fixture validates")
{
    auto lamp = fixture("lamp.fspec");
    CHECK(validate_component(lamp).empty());
    CHECK(lamp.formulas.size() == 5);
}

TEST_CASE("targeting an input is rejected")
{
    auto diags = parse_errors("component C\nin a : {x, y}\nout o : {x, y}\ngar\nf: true ==> a = x\n");
    CHECK(has_code(diags, Code::target_input));
}

TEST_CASE("interval analysis flags a + a escaping the target")
{
    auto golden = testsupport::golden("intervals.json");
    auto iv = golden.at("a+a with a in 0..2");
    CHECK(iv[0] == 0);
    CHECK(iv[1] == 4);
    auto diags = parse_errors("component C\nin a : int 0..2\nout o : int 0..3\ngar\nf: true ==> o = a + a\n");
    REQUIRE(has_code(diags, Code::range));
    auto ok = parse_errors("component C\nin a : int 0..2\nout o : int 0..4\ngar\nf: true ==> o = a + a\n");
    CHECK(ok.empty());
}

TEST_CASE("interface_of splits channels by direction")
{
    auto lamp = fixture("lamp.fspec");
    auto iface = interface_of(lamp);
    CHECK(iface.inputs.names == std::vector<std::string>{"btn"});
    CHECK(iface.outputs.names == std::vector<std::string>{"lamp"});

    auto req = fixture("req_xle1.fspec");
    auto riface = interface_of(req);
    CHECK(riface.inputs.empty());
    CHECK(riface.outputs.names == std::vector<std::string>{"x", "y"});
}

TEST_CASE("symbol footprint is syntactic")
{
    auto lamp = fixture("lamp.fspec");
    auto m1 = symbol_footprint(*lamp.find_formula("m1"), lamp);
    CHECK(m1.reads_state == std::set<std::string>{"mode"});
    CHECK(m1.targets_outputs == std::set<std::string>{"lamp"});
    CHECK(m1.reads_inputs.empty());
    CHECK(m1.targets_state.empty());

    auto t1 = symbol_footprint(*lamp.find_formula("t1"), lamp);
    CHECK(t1.reads_inputs == std::set<std::string>{"btn"});
    CHECK(t1.reads_state == std::set<std::string>{"mode"});
    CHECK(t1.targets_state == std::set<std::string>{"mode"});

    auto c = parse("component C\nin a : int 0..1\nin b : int 0..1\nout o : int 0..1\ngar\n"
                   "f: true ==> o = (if a = 1 then b else 0)\n");
    auto f = symbol_footprint(c.formulas[0], c);
    CHECK(f.reads_inputs == std::set<std::string>{"a", "b"});
}

TEST_CASE("well-formedness diagnostics")
{
    SUBCASE("duplicate names")
    {
        auto diags = parse_errors("component C\nin a : {x}\nout a : {x}\ngar\nf: true ==> a = x\n");
        REQUIRE(has_code(diags, Code::dup_name));
        auto it = std::find_if(diags.begin(), diags.end(), [](const Diagnostic& d) { return d.code == Code::dup_name; });
        CHECK(it->span.has_value());
        CHECK(it->related.has_value());
    }
    SUBCASE("reserved prefix")
    {
        CHECK(has_code(parse_errors("component C\nout __x : {a}\ngar\nf: true ==> __x = a\n"), Code::reserved));
    }
    SUBCASE("no output")
    {
        CHECK(has_code(parse_errors("component C\nin a : {x}\ngar\n"), Code::no_output));
        CHECK(parse_errors("requirement R\nin a : {x}\ngar\n").empty());
    }
    SUBCASE("init outside domain")
    {
        CHECK(!parse_errors("component C\nout o : {a}\nstate s : int 0..2 init 3\ngar\n").empty());
    }
    SUBCASE("next epoch on an output")
    {
        CHECK(!parse_errors("component C\nout o : {a, b}\ngar\nf: true ==> o' = a\n").empty());
    }
    SUBCASE("duplicate target")
    {
        CHECK(has_code(parse_errors("component C\nout o : {a, b}\ngar\nf: true ==> o = a && o = b\n"), Code::dup_target));
    }
    SUBCASE("type mix")
    {
        CHECK(!parse_errors("component C\nin a : int 0..1\nout o : {p, q}\ngar\nf: a ==> o = p\n").empty());
    }
    SUBCASE("unknown symbol")
    {
        auto diags = parse_errors("component C\nout o : int 0..1\ngar\nf: true ==> o = zz + 1\n");
        CHECK(!diags.empty());
    }
}

TEST_CASE("domain helpers")
{
    auto e = ValueDomain::enumeration({"a", "b", "c"});
    CHECK(e.size() == 3);
    CHECK(e.format(2) == "c");
    CHECK(e.parse("b") == Value{1});
    CHECK(!e.parse("d"));
    auto i = ValueDomain::integer(-2, 2);
    CHECK(i.size() == 5);
    CHECK(i.position(-2) == std::size_t{0});
    CHECK(!i.contains(3));
    CHECK(render_domain(i) == "int -2..2");
}

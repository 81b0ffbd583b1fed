#include "random_component.hpp"
#include "support.hpp"

#include "refold/causality.hpp"
#include "refold/decomposer.hpp"

#include <doctest.h>

using namespace refold;

namespace {

Bounds horizon(std::size_t h)
{
    Bounds b;
    b.horizon = h;
    return b;
}

} // namespace

TEST_CASE("generated components are valid and total")
{
    testsupport::ComponentGenerator gen(7);
    for (int i = 0; i < 150; ++i) {
        Component c = gen.component();
        CAPTURE(render_component(c));
        CHECK(validate_component(c).empty());
        auto d = check_deterministic_total(c, horizon(3));
        CHECK(d.total);
    }
}

TEST_CASE("render then parse is the identity")
{
    testsupport::ComponentGenerator gen(11);
    for (int i = 0; i < 200; ++i) {
        Component c = gen.component();
        const std::string text = render_component(c);
        auto back = parse_component(text);
        REQUIRE_MESSAGE(back.ok(), text);
        CHECK(*back == c);
        CHECK(render_component(*back) == text);
    }
}

TEST_CASE("parser is total on arbitrary bytes")
{
    std::mt19937 rng(3);
    std::uniform_int_distribution<int> byte(0, 255);
    for (int i = 0; i < 500; ++i) {
        std::string junk(static_cast<std::size_t>(i % 80), '\0');
        for (auto& ch : junk)
            ch = static_cast<char>(byte(rng));
        auto r = parse_component(junk);
        CHECK((r.ok() || !r.diagnostics.empty()));
    }
}

TEST_CASE("parser is total on damaged components")
{
    testsupport::ComponentGenerator gen(5);
    std::mt19937& rng = gen.rng();
    const std::string alphabet = "abcio01'=<>!&|(){}.:, \n-";
    for (int i = 0; i < 300; ++i) {
        std::string text = gen.text();
        const int edits = 1 + i % 3;
        for (int k = 0; k < edits && !text.empty(); ++k) {
            std::size_t at = std::uniform_int_distribution<std::size_t>(0, text.size() - 1)(rng);
            switch (rng() % 3) {
            case 0: text.erase(at, 1); break;
            case 1: text.insert(at, 1, alphabet[rng() % alphabet.size()]); break;
            default: text[at] = alphabet[rng() % alphabet.size()]; break;
            }
        }
        auto r = parse_component(text);
        CHECK((r.ok() || !r.diagnostics.empty()));
        if (r.ok())
            CHECK(validate_component(*r).empty());
    }
}

TEST_CASE("breaking one invariant is always reported")
{
    testsupport::ComponentGenerator gen(13);
    for (int i = 0; i < 100; ++i) {
        const Component c = gen.component();
        CAPTURE(render_component(c));
        const std::string in = interface_of(c).inputs.names.front();

        SUBCASE("duplicate label")
        {
            Component m = c;
            m.formulas.push_back(m.formulas.front());
            CHECK(!validate_component(m).empty());
        }
        SUBCASE("input as target")
        {
            Component m = c;
            m.formulas.front().atoms.front().target = in;
            CHECK(!validate_component(m).empty());
        }
        SUBCASE("unknown symbol")
        {
            Component m = c;
            m.formulas.back().guard = ex::binary(BinaryOp::eq, ex::read("nowhere"), ex::integer(0));
            CHECK(!validate_component(m).empty());
        }
        SUBCASE("duplicate channel")
        {
            Component m = c;
            m.channels.push_back(m.channels.front());
            CHECK(!validate_component(m).empty());
        }
        SUBCASE("no outputs")
        {
            Component m = c;
            std::erase_if(m.channels, [](const ChannelDecl& ch) { return ch.direction == Direction::output; });
            CHECK(!validate_component(m).empty());
        }
    }
}

TEST_CASE("random components are weakly causal")
{
    testsupport::ComponentGenerator gen(17);
    for (int i = 0; i < 60; ++i) {
        Component c = gen.component();
        CAPTURE(render_component(c));
        CHECK(check_weak_causality(c, horizon(3)).holds);
    }
}

TEST_CASE("mealy/moore split preserves random components")
{
    testsupport::ComponentGenerator gen(19);
    int split = 0;
    for (int i = 0; i < 80; ++i) {
        Component c = gen.component();
        CAPTURE(render_component(c));
        DecompositionResult r;
        try {
            r = split_mealy_moore(c);
        } catch (const Error& e) {
            CHECK(e.code() == Code::nothing_to_split);
            continue;
        }
        ++split;
        CHECK(verify_decomposition(c, r, horizon(3)).holds);
    }
    CHECK(split > 10);
}

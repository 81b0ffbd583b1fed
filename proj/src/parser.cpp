#include "refold/parser.hpp"

#include "refold/refinement.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace refold {

namespace {

struct Token {
    enum class Kind { ident, number, punct, end };
    Kind kind = Kind::end;
    std::string text;
    int column = 0;
};

struct SyntaxError {
    int column;
    std::string message;
};

std::string_view strip_comment(std::string_view line)
{
    auto pos = line.find("--");
    return pos == std::string_view::npos ? line : line.substr(0, pos);
}

std::vector<Token> lex(std::string_view line)
{
    static constexpr std::string_view multi[] = {"==>", "&&", "||", "!=", "<=", ">=", ".."};
    static constexpr std::string_view single = "{}(),:'=<>+-!";
    std::vector<Token> out;
    std::size_t i = 0;
    auto is_alpha = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; };
    auto is_digit = [](char c) { return c >= '0' && c <= '9'; };
    while (i < line.size()) {
        char c = line[i];
        int col = static_cast<int>(i) + 1;
        if (c == ' ' || c == '\t' || c == '\r') {
            ++i;
            continue;
        }
        if (is_alpha(c)) {
            std::size_t j = i;
            while (j < line.size() && (is_alpha(line[j]) || is_digit(line[j])))
                ++j;
            out.push_back({Token::Kind::ident, std::string(line.substr(i, j - i)), col});
            i = j;
            continue;
        }
        if (is_digit(c)) {
            std::size_t j = i;
            while (j < line.size() && is_digit(line[j]))
                ++j;
            out.push_back({Token::Kind::number, std::string(line.substr(i, j - i)), col});
            i = j;
            continue;
        }
        bool matched = false;
        for (auto m : multi) {
            if (line.substr(i, m.size()) == m) {
                out.push_back({Token::Kind::punct, std::string(m), col});
                i += m.size();
                matched = true;
                break;
            }
        }
        if (matched)
            continue;
        if (single.find(c) != std::string_view::npos) {
            out.push_back({Token::Kind::punct, std::string(1, c), col});
            ++i;
            continue;
        }
        std::string shown = (static_cast<unsigned char>(c) < 0x20 || static_cast<unsigned char>(c) >= 0x7f)
                                ? "byte 0x" + [&] {
                                      std::ostringstream os;
                                      os << std::hex << static_cast<int>(static_cast<unsigned char>(c));
                                      return os.str();
                                  }()
                                : "`" + std::string(1, c) + "`";
        throw SyntaxError{col, "unexpected character " + shown};
    }
    out.push_back({Token::Kind::end, "", static_cast<int>(line.size()) + 1});
    return out;
}

class LineParser {
public:
    LineParser(std::vector<Token> tokens, const std::set<std::string>& symbols)
        : toks_(std::move(tokens)), symbols_(symbols)
    {
    }

    const Token& peek(std::size_t ahead = 0) const { return toks_[std::min(pos_ + ahead, toks_.size() - 1)]; }
    bool at_end() const { return peek().kind == Token::Kind::end; }
    int column() const { return peek().column; }

    bool is(std::string_view text) const
    {
        const auto& t = peek();
        return (t.kind == Token::Kind::punct || t.kind == Token::Kind::ident) && t.text == text;
    }

    bool accept(std::string_view text)
    {
        if (!is(text))
            return false;
        ++pos_;
        return true;
    }

    void expect(std::string_view text)
    {
        if (!accept(text))
            fail("expected `" + std::string(text) + "`");
    }

    [[noreturn]] void fail(const std::string& what) const
    {
        const auto& t = peek();
        std::string found = t.kind == Token::Kind::end ? "end of line" : "`" + t.text + "`";
        throw SyntaxError{t.column, what + ", found " + found};
    }

    std::string identifier(const char* what)
    {
        const auto& t = peek();
        if (t.kind != Token::Kind::ident || is_keyword(t.text))
            fail(std::string("expected ") + what);
        ++pos_;
        return t.text;
    }

    void finish()
    {
        if (!at_end())
            fail("unexpected trailing input");
    }

    Value number(bool negative)
    {
        const auto& t = peek();
        if (t.kind != Token::Kind::number)
            fail("expected an integer");
        std::string text = (negative ? "-" : "") + t.text;
        Value v = 0;
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
        if (ec != std::errc{} || ptr != text.data() + text.size())
            throw SyntaxError{t.column, "integer `" + text + "` is out of range"};
        ++pos_;
        return v;
    }

    Value signed_number()
    {
        bool neg = accept("-");
        return number(neg);
    }

    ValueDomain domain()
    {
        if (accept("int")) {
            Value lo = signed_number();
            expect("..");
            Value hi = signed_number();
            return ValueDomain::integer(lo, hi);
        }
        expect("{");
        std::vector<std::string> labels;
        if (!is("}")) {
            labels.push_back(identifier("a label"));
            while (accept(","))
                labels.push_back(identifier("a label"));
        }
        expect("}");
        return ValueDomain::enumeration(std::move(labels));
    }

    Literal literal()
    {
        if (accept("true"))
            return Literal::boolean(true);
        if (accept("false"))
            return Literal::boolean(false);
        if (peek().kind == Token::Kind::number || is("-"))
            return Literal::integer(signed_number());
        return Literal::label(identifier("a value"));
    }

    // expression grammar, loosest first
    ExprPtr expr() { return disjunction(); }

    ExprPtr disjunction()
    {
        auto lhs = conjunction();
        while (accept("||"))
            lhs = ex::binary(BinaryOp::logical_or, lhs, conjunction());
        return lhs;
    }

    ExprPtr conjunction()
    {
        auto lhs = comparison();
        while (accept("&&"))
            lhs = ex::binary(BinaryOp::logical_and, lhs, comparison());
        return lhs;
    }

    ExprPtr comparison()
    {
        auto lhs = additive();
        if (accept("="))
            return ex::binary(BinaryOp::eq, lhs, additive());
        if (accept("!="))
            return ex::binary(BinaryOp::neq, lhs, additive());
        if (accept("<"))
            return ex::binary(BinaryOp::lt, lhs, additive());
        if (accept("<="))
            return ex::binary(BinaryOp::le, lhs, additive());
        if (accept(">"))
            return ex::binary(BinaryOp::lt, additive(), lhs);
        if (accept(">="))
            return ex::binary(BinaryOp::le, additive(), lhs);
        return lhs;
    }

    ExprPtr additive()
    {
        auto lhs = unary();
        for (;;) {
            if (accept("+"))
                lhs = ex::binary(BinaryOp::add, lhs, unary());
            else if (accept("-"))
                lhs = ex::binary(BinaryOp::sub, lhs, unary());
            else
                return lhs;
        }
    }

    ExprPtr unary()
    {
        if (accept("!"))
            return ex::unary(UnaryOp::logical_not, unary());
        if (accept("-")) {
            if (peek().kind == Token::Kind::number)
                return ex::integer(number(true));
            return ex::unary(UnaryOp::negate, unary());
        }
        return primary();
    }

    ExprPtr primary()
    {
        const auto& t = peek();
        if (t.kind == Token::Kind::number)
            return ex::integer(number(false));
        if (accept("true"))
            return ex::boolean(true);
        if (accept("false"))
            return ex::boolean(false);
        if (accept("if")) {
            auto c = expr();
            expect("then");
            auto a = expr();
            expect("else");
            auto b = expr();
            return ex::conditional(c, a, b);
        }
        if (accept("(")) {
            auto e = expr();
            expect(")");
            return e;
        }
        std::string name = identifier("an expression");
        if (accept("'"))
            return ex::read(name, Epoch::next);
        if (symbols_.count(name))
            return ex::read(name);
        return ex::label(name);
    }

    Atom atom()
    {
        std::string target = identifier("an atom target");
        bool next = accept("'");
        if (accept("in")) {
            if (next)
                fail("membership atoms cannot target a next-state variable");
            expect("{");
            std::vector<Literal> members;
            members.push_back(literal());
            while (accept(","))
                members.push_back(literal());
            expect("}");
            return Atom::member(std::move(target), std::move(members));
        }
        expect("=");
        return Atom::equals(std::move(target), additive(), next);
    }

    Formula formula()
    {
        Formula f;
        f.label = identifier("a formula label");
        expect(":");
        f.guard = expr();
        expect("==>");
        f.atoms.push_back(atom());
        while (accept("&&"))
            f.atoms.push_back(atom());
        finish();
        return f;
    }

private:
    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    const std::set<std::string>& symbols_;
};

std::vector<std::string_view> split_lines(std::string_view text)
{
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) {
            lines.push_back(text.substr(start));
            break;
        }
        lines.push_back(text.substr(start, end - start));
        start = end + 1;
    }
    return lines;
}

bool blank(std::string_view s)
{
    return s.find_first_not_of(" \t\r") == std::string_view::npos;
}

Diagnostic syntax_diag(const std::string& file, int line, int column, std::string message)
{
    Diagnostic d{Code::syntax, std::move(message)};
    d.span = SourceSpan{file, line, column};
    return d;
}

/// Identifiers that must resolve as symbols: everything declared before `gar`.
std::set<std::string> pre_scan_symbols(const std::vector<std::string_view>& lines)
{
    std::set<std::string> names;
    for (auto raw : lines) {
        auto line = strip_comment(raw);
        try {
            auto toks = lex(line);
            if (toks.size() >= 2 && toks[0].kind == Token::Kind::ident && toks[1].kind == Token::Kind::ident &&
                (toks[0].text == "in" || toks[0].text == "out" || toks[0].text == "state" || toks[0].text == "local"))
                names.insert(toks[1].text);
            if (!toks.empty() && toks[0].kind == Token::Kind::ident && toks[0].text == "gar" && toks.size() == 2)
                break;
        } catch (const SyntaxError&) {
        }
    }
    return names;
}

} // namespace

Result<Component> parse_component(std::string_view text, const std::string& file)
{
    Result<Component> result;
    auto& diags = result.diagnostics;
    auto lines = split_lines(text);
    auto symbols = pre_scan_symbols(lines);

    Component comp;
    bool have_header = false;
    bool in_gar = false;

    for (std::size_t i = 0; i < lines.size(); ++i) {
        int lineno = static_cast<int>(i) + 1;
        auto line = strip_comment(lines[i]);
        if (blank(line))
            continue;
        try {
            LineParser p(lex(line), symbols);
            SourceSpan span{file, lineno, p.column()};
            if (!have_header) {
                if (p.accept("component")) {
                    comp.requirement = false;
                } else if (p.accept("requirement")) {
                    comp.requirement = true;
                } else {
                    p.fail("expected `component` or `requirement` header");
                }
                comp.name = p.identifier("a component name");
                if (p.accept("generated"))
                    comp.generated = true;
                p.finish();
                have_header = true;
                continue;
            }
            if (in_gar) {
                Formula f = p.formula();
                f.span = span;
                comp.formulas.push_back(std::move(f));
                continue;
            }
            if (p.accept("gar")) {
                p.finish();
                in_gar = true;
                continue;
            }
            if (p.is("in") || p.is("out")) {
                ChannelDecl c;
                c.direction = p.accept("in") ? Direction::input : (p.expect("out"), Direction::output);
                c.span = SourceSpan{file, lineno, p.column()};
                c.name = p.identifier("a channel name");
                p.expect(":");
                c.domain = p.domain();
                p.finish();
                comp.channels.push_back(std::move(c));
                continue;
            }
            if (p.is("state") || p.is("local")) {
                VarDecl v;
                v.kind = p.accept("state") ? VarKind::state : (p.expect("local"), VarKind::local);
                v.span = SourceSpan{file, lineno, p.column()};
                v.name = p.identifier("a variable name");
                p.expect(":");
                v.domain = p.domain();
                if (p.accept("init"))
                    v.init = p.literal();
                p.finish();
                comp.vars.push_back(std::move(v));
                continue;
            }
            p.fail("expected a declaration (`in`, `out`, `state`, `local`) or `gar`");
        } catch (const SyntaxError& e) {
            diags.push_back(syntax_diag(file, lineno, e.column, e.message));
        }
    }
    if (!have_header && diags.empty())
        diags.push_back(syntax_diag(file, 1, 1, "missing `component` header"));
    if (!diags.empty())
        return result;

    diags = validate_component(comp);
    if (diags.empty())
        result.value = std::move(comp);
    return result;
}

Result<std::vector<Formula>> parse_formulas(std::string_view text, const Component& context, const std::string& file)
{
    Result<std::vector<Formula>> result;
    auto symbols = context.symbol_names();
    std::vector<Formula> formulas;
    auto lines = split_lines(text);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        int lineno = static_cast<int>(i) + 1;
        auto line = strip_comment(lines[i]);
        if (blank(line))
            continue;
        try {
            LineParser p(lex(line), symbols);
            SourceSpan span{file, lineno, p.column()};
            if (p.accept("gar")) {
                p.finish();
                continue;
            }
            Formula f = p.formula();
            f.span = span;
            formulas.push_back(std::move(f));
        } catch (const SyntaxError& e) {
            result.diagnostics.push_back(syntax_diag(file, lineno, e.column, e.message));
        }
    }
    if (result.diagnostics.empty())
        result.value = std::move(formulas);
    return result;
}

// ---------------------------------------------------------------------------
// Rendering

namespace {

int precedence(const ExprPtr& e)
{
    if (const auto* b = std::get_if<Binary>(&e->node)) {
        switch (b->op) {
        case BinaryOp::logical_or: return 1;
        case BinaryOp::logical_and: return 2;
        case BinaryOp::eq:
        case BinaryOp::neq:
        case BinaryOp::lt:
        case BinaryOp::le: return 3;
        case BinaryOp::add:
        case BinaryOp::sub: return 4;
        }
    }
    if (std::holds_alternative<Unary>(e->node))
        return 5;
    return 6;
}

const char* op_text(BinaryOp op)
{
    switch (op) {
    case BinaryOp::logical_and: return "&&";
    case BinaryOp::logical_or: return "||";
    case BinaryOp::eq: return "=";
    case BinaryOp::neq: return "!=";
    case BinaryOp::lt: return "<";
    case BinaryOp::le: return "<=";
    case BinaryOp::add: return "+";
    case BinaryOp::sub: return "-";
    }
    return "?";
}

void render(std::ostream& os, const ExprPtr& e);

void render_wrapped(std::ostream& os, const ExprPtr& e, bool wrap)
{
    if (wrap)
        os << '(';
    render(os, e);
    if (wrap)
        os << ')';
}

void render(std::ostream& os, const ExprPtr& e)
{
    if (!e) {
        os << "<missing>";
        return;
    }
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Literal>) {
                os << render_literal(n);
            } else if constexpr (std::is_same_v<T, SymbolRead>) {
                os << n.name << (n.epoch == Epoch::next ? "'" : "");
            } else if constexpr (std::is_same_v<T, Unary>) {
                os << (n.op == UnaryOp::logical_not ? "!" : "-");
                render_wrapped(os, n.operand, !std::holds_alternative<SymbolRead>(n.operand->node));
            } else if constexpr (std::is_same_v<T, Binary>) {
                int p = precedence(e);
                bool non_assoc = p == 3;
                render_wrapped(os, n.lhs, precedence(n.lhs) < p || (non_assoc && precedence(n.lhs) == p));
                os << ' ' << op_text(n.op) << ' ';
                render_wrapped(os, n.rhs, precedence(n.rhs) <= p);
            } else {
                os << "(if ";
                render(os, n.condition);
                os << " then ";
                render(os, n.then_branch);
                os << " else ";
                render(os, n.else_branch);
                os << ')';
            }
        },
        e->node);
}

} // namespace

std::string render_expr(const ExprPtr& e)
{
    std::ostringstream os;
    render(os, e);
    return os.str();
}

std::string render_formula(const Formula& f)
{
    std::ostringstream os;
    os << f.label << ": ";
    render(os, f.guard);
    os << " ==> ";
    for (std::size_t i = 0; i < f.atoms.size(); ++i) {
        const Atom& a = f.atoms[i];
        if (i)
            os << " && ";
        os << a.target << (a.next ? "'" : "");
        if (a.kind == Atom::Kind::equals) {
            os << " = ";
            // atom right-hand sides are parsed at additive level
            render_wrapped(os, a.value, a.value && precedence(a.value) < 4);
        } else {
            os << " in {";
            for (std::size_t k = 0; k < a.members.size(); ++k)
                os << (k ? ", " : "") << render_literal(a.members[k]);
            os << '}';
        }
    }
    return os.str();
}

std::string render_component(const Component& comp)
{
    std::ostringstream os;
    os << (comp.requirement ? "requirement " : "component ") << comp.name << (comp.generated ? " generated" : "")
       << '\n';
    for (const auto& c : comp.channels)
        os << (c.direction == Direction::input ? "in " : "out ") << c.name << " : " << render_domain(c.domain) << '\n';
    for (const auto& v : comp.vars) {
        os << (v.kind == VarKind::state ? "state " : "local ") << v.name << " : " << render_domain(v.domain);
        if (v.init)
            os << " init " << render_literal(*v.init);
        os << '\n';
    }
    os << "gar\n";
    for (const auto& f : comp.formulas)
        os << render_formula(f) << '\n';
    return os.str();
}

// ---------------------------------------------------------------------------
// Manifests

namespace {

std::vector<std::string> words(std::string_view line)
{
    std::vector<std::string> out;
    std::istringstream is{std::string(line)};
    std::string w;
    while (is >> w)
        out.push_back(w);
    return out;
}

} // namespace

Result<GroupManifest> parse_manifest(std::string_view text, const std::string& file)
{
    Result<GroupManifest> result;
    auto& diags = result.diagnostics;
    GroupManifest m;
    bool have_group = false;
    bool have_root = false;
    std::map<long, std::pair<std::vector<std::string>, SourceSpan>> layers;
    auto lines = split_lines(text);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        int lineno = static_cast<int>(i) + 1;
        auto line = strip_comment(lines[i]);
        auto w = words(line);
        if (w.empty())
            continue;
        auto err = [&](std::string msg) { diags.push_back(syntax_diag(file, lineno, 1, std::move(msg))); };
        if (w[0] == "group") {
            if (w.size() != 2 || !is_identifier(w[1]))
                err("expected `group NAME`");
            else if (have_group)
                err("duplicate `group` line");
            else {
                m.name = w[1];
                have_group = true;
            }
        } else if (w[0] == "root") {
            if (w.size() != 2)
                err("expected `root FILE`");
            else if (have_root)
                err("duplicate `root` line");
            else {
                m.root = w[1];
                have_root = true;
            }
        } else if (w[0] == "layer") {
            // `layer J: FILE...` or `layer J : FILE...`
            std::vector<std::string> rest(w.begin() + 1, w.end());
            if (rest.empty()) {
                err("expected `layer J: FILE...`");
                continue;
            }
            std::string index = rest[0];
            std::size_t first_file = 1;
            if (!index.empty() && index.back() == ':')
                index.pop_back();
            else if (rest.size() > 1 && rest[1] == ":")
                first_file = 2;
            else {
                err("expected `:` after the layer index");
                continue;
            }
            long j = 0;
            auto [ptr, ec] = std::from_chars(index.data(), index.data() + index.size(), j);
            if (index.empty() || ec != std::errc{} || ptr != index.data() + index.size() || j < 1) {
                err("layer index must be a positive integer");
                continue;
            }
            std::vector<std::string> files(rest.begin() + static_cast<long>(first_file), rest.end());
            if (files.empty()) {
                err("layer " + std::to_string(j) + " lists no specification files");
                continue;
            }
            if (layers.count(j)) {
                err("layer " + std::to_string(j) + " is declared twice");
                continue;
            }
            layers.emplace(j, std::make_pair(std::move(files), SourceSpan{file, lineno, 1}));
        } else {
            err("expected `group`, `root` or `layer`");
        }
    }
    if (!have_group)
        diags.push_back(syntax_diag(file, 1, 1, "missing `group NAME` line"));
    if (!have_root)
        diags.push_back(syntax_diag(file, 1, 1, "missing `root FILE` line"));
    long expected = 1;
    for (auto& [j, entry] : layers) {
        if (j != expected) {
            Diagnostic d{Code::layer_gap, "layer " + std::to_string(j) + " found where layer " + std::to_string(expected) +
                                              " was expected; layers must be numbered 1..m without gaps"};
            d.span = entry.second;
            diags.push_back(std::move(d));
            break;
        }
        m.layers.push_back(std::move(entry.first));
        ++expected;
    }
    if (diags.empty())
        result.value = std::move(m);
    return result;
}

std::string render_manifest(const GroupManifest& m)
{
    std::ostringstream os;
    os << "group " << m.name << '\n' << "root " << m.root << '\n';
    for (std::size_t j = 0; j < m.layers.size(); ++j) {
        os << "layer " << j + 1 << ':';
        for (const auto& f : m.layers[j])
            os << ' ' << f;
        os << '\n';
    }
    return os.str();
}

Result<Component> load_component(const std::filesystem::path& path)
{
    std::error_code ec;
    if (!std::filesystem::is_regular_file(path, ec)) {
        Result<Component> r;
        Diagnostic d{Code::missing_file, "no such specification file `" + path.string() + "`"};
        d.span = SourceSpan{path.string(), 0, 0};
        r.diagnostics.push_back(std::move(d));
        return r;
    }
    return parse_component(read_file(path), path.string());
}

Result<SpecificationGroup> load_group(const GroupManifest& manifest, const std::filesystem::path& base_dir)
{
    Result<SpecificationGroup> result;
    SpecificationGroup g;
    g.name = manifest.name;
    auto load = [&](const std::string& f) -> std::optional<Component> {
        auto r = load_component(base_dir / f);
        result.diagnostics.insert(result.diagnostics.end(), r.diagnostics.begin(), r.diagnostics.end());
        return r.value;
    };
    if (auto root = load(manifest.root))
        g.root = std::move(*root);
    for (const auto& layer : manifest.layers) {
        std::vector<Component> specs;
        for (const auto& f : layer)
            if (auto c = load(f))
                specs.push_back(std::move(*c));
        g.layers.push_back(std::move(specs));
    }
    if (!result.diagnostics.empty())
        return result;
    result.diagnostics = validate_group_shape(g);
    if (result.diagnostics.empty())
        result.value = std::move(g);
    return result;
}

Result<SpecificationGroup> parse_group_manifest(std::string_view text, const std::filesystem::path& base_dir,
                                                const std::string& file)
{
    auto m = parse_manifest(text, file);
    if (!m) {
        Result<SpecificationGroup> r;
        r.diagnostics = std::move(m.diagnostics);
        return r;
    }
    return load_group(*m, base_dir);
}

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(Code::io, "cannot read `" + path.string() + "`");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const std::filesystem::path& path, std::string_view text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw Error(Code::io, "cannot write `" + path.string() + "`");
    out << text;
    if (!out)
        throw Error(Code::io, "write to `" + path.string() + "` failed");
}

} // namespace refold

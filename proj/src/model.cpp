#include "refold/model.hpp"

#include "typing.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <sstream>

namespace refold {

// ---------------------------------------------------------------------------
// ValueDomain

ValueDomain ValueDomain::enumeration(std::vector<std::string> labels)
{
    ValueDomain d;
    d.kind = Kind::enumeration;
    d.labels = std::move(labels);
    return d;
}

ValueDomain ValueDomain::integer(Value lo, Value hi)
{
    ValueDomain d;
    d.kind = Kind::integer;
    d.lo = lo;
    d.hi = hi;
    return d;
}

std::size_t ValueDomain::size() const
{
    if (is_enum())
        return labels.size();
    return hi < lo ? 0 : static_cast<std::size_t>(hi - lo) + 1;
}

Value ValueDomain::at(std::size_t position) const
{
    return is_enum() ? static_cast<Value>(position) : lo + static_cast<Value>(position);
}

std::optional<std::size_t> ValueDomain::position(Value v) const
{
    if (is_enum()) {
        if (v < 0 || static_cast<std::size_t>(v) >= labels.size())
            return std::nullopt;
        return static_cast<std::size_t>(v);
    }
    if (v < lo || v > hi)
        return std::nullopt;
    return static_cast<std::size_t>(v - lo);
}

std::string ValueDomain::format(Value v) const
{
    if (is_enum()) {
        if (auto p = position(v))
            return labels[*p];
        return "?" + std::to_string(v);
    }
    return std::to_string(v);
}

std::optional<Value> ValueDomain::parse(std::string_view text) const
{
    if (is_enum()) {
        auto it = std::find(labels.begin(), labels.end(), text);
        if (it == labels.end())
            return std::nullopt;
        return static_cast<Value>(it - labels.begin());
    }
    Value v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || !contains(v))
        return std::nullopt;
    return v;
}

std::string render_domain(const ValueDomain& d)
{
    if (!d.is_enum())
        return "int " + std::to_string(d.lo) + ".." + std::to_string(d.hi);
    std::string out = "{";
    for (std::size_t i = 0; i < d.labels.size(); ++i) {
        if (i)
            out += ", ";
        out += d.labels[i];
    }
    return out + "}";
}

std::string render_literal(const Literal& lit)
{
    if (const auto* b = std::get_if<bool>(&lit.value))
        return *b ? "true" : "false";
    if (const auto* v = std::get_if<Value>(&lit.value))
        return std::to_string(*v);
    return std::get<std::string>(lit.value);
}

// ---------------------------------------------------------------------------
// Expressions

bool same_expr(const ExprPtr& a, const ExprPtr& b)
{
    if (!a || !b)
        return !a && !b;
    return same_expr(*a, *b);
}

bool same_expr(const Expr& a, const Expr& b)
{
    if (a.node.index() != b.node.index())
        return false;
    return std::visit(
        [&](const auto& x) -> bool {
            using T = std::decay_t<decltype(x)>;
            const auto& y = std::get<T>(b.node);
            if constexpr (std::is_same_v<T, Literal>)
                return x == y;
            else if constexpr (std::is_same_v<T, SymbolRead>)
                return x.name == y.name && x.epoch == y.epoch;
            else if constexpr (std::is_same_v<T, Unary>)
                return x.op == y.op && same_expr(x.operand, y.operand);
            else if constexpr (std::is_same_v<T, Binary>)
                return x.op == y.op && same_expr(x.lhs, y.lhs) && same_expr(x.rhs, y.rhs);
            else
                return same_expr(x.condition, y.condition) && same_expr(x.then_branch, y.then_branch) &&
                       same_expr(x.else_branch, y.else_branch);
        },
        a.node);
}

namespace ex {
ExprPtr boolean(bool b) { return std::make_shared<Expr>(Expr{Literal::boolean(b)}); }
ExprPtr integer(Value v) { return std::make_shared<Expr>(Expr{Literal::integer(v)}); }
ExprPtr label(std::string name) { return std::make_shared<Expr>(Expr{Literal::label(std::move(name))}); }
ExprPtr read(std::string name, Epoch epoch) { return std::make_shared<Expr>(Expr{SymbolRead{std::move(name), epoch}}); }
ExprPtr unary(UnaryOp op, ExprPtr operand) { return std::make_shared<Expr>(Expr{Unary{op, std::move(operand)}}); }
ExprPtr binary(BinaryOp op, ExprPtr lhs, ExprPtr rhs)
{
    return std::make_shared<Expr>(Expr{Binary{op, std::move(lhs), std::move(rhs)}});
}
ExprPtr conditional(ExprPtr c, ExprPtr t, ExprPtr e)
{
    return std::make_shared<Expr>(Expr{Conditional{std::move(c), std::move(t), std::move(e)}});
}
} // namespace ex

void for_each_read(const ExprPtr& e, const std::function<void(const SymbolRead&)>& fn)
{
    if (!e)
        return;
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, SymbolRead>) {
                fn(n);
            } else if constexpr (std::is_same_v<T, Unary>) {
                for_each_read(n.operand, fn);
            } else if constexpr (std::is_same_v<T, Binary>) {
                for_each_read(n.lhs, fn);
                for_each_read(n.rhs, fn);
            } else if constexpr (std::is_same_v<T, Conditional>) {
                for_each_read(n.condition, fn);
                for_each_read(n.then_branch, fn);
                for_each_read(n.else_branch, fn);
            }
        },
        e->node);
}

ExprPtr rename_reads(const ExprPtr& e, const std::map<std::string, std::string>& renames)
{
    if (!e)
        return e;
    return std::visit(
        [&](const auto& n) -> ExprPtr {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, SymbolRead>) {
                auto it = renames.find(n.name);
                if (it == renames.end() || n.epoch != Epoch::current)
                    return e;
                return ex::read(it->second, n.epoch);
            } else if constexpr (std::is_same_v<T, Unary>) {
                return ex::unary(n.op, rename_reads(n.operand, renames));
            } else if constexpr (std::is_same_v<T, Binary>) {
                return ex::binary(n.op, rename_reads(n.lhs, renames), rename_reads(n.rhs, renames));
            } else if constexpr (std::is_same_v<T, Conditional>) {
                return ex::conditional(rename_reads(n.condition, renames), rename_reads(n.then_branch, renames),
                                       rename_reads(n.else_branch, renames));
            } else {
                return e;
            }
        },
        e->node);
}

std::size_t expr_size(const ExprPtr& e)
{
    if (!e)
        return 0;
    return std::visit(
        [](const auto& n) -> std::size_t {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Unary>)
                return 1 + expr_size(n.operand);
            else if constexpr (std::is_same_v<T, Binary>)
                return 1 + expr_size(n.lhs) + expr_size(n.rhs);
            else if constexpr (std::is_same_v<T, Conditional>)
                return 1 + expr_size(n.condition) + expr_size(n.then_branch) + expr_size(n.else_branch);
            else
                return 1;
        },
        e->node);
}

// ---------------------------------------------------------------------------
// Formulas and components

Atom Atom::equals(std::string target, ExprPtr value, bool next)
{
    Atom a;
    a.target = std::move(target);
    a.next = next;
    a.kind = Kind::equals;
    a.value = std::move(value);
    return a;
}

Atom Atom::member(std::string target, std::vector<Literal> members)
{
    Atom a;
    a.target = std::move(target);
    a.kind = Kind::member;
    a.members = std::move(members);
    return a;
}

bool operator==(const Atom& a, const Atom& b)
{
    return a.target == b.target && a.next == b.next && a.kind == b.kind && same_expr(a.value, b.value) &&
           a.members == b.members;
}

bool operator==(const Formula& a, const Formula& b)
{
    return a.label == b.label && same_expr(a.guard, b.guard) && a.atoms == b.atoms;
}

const ChannelDecl* Component::find_channel(std::string_view name) const
{
    auto it = std::find_if(channels.begin(), channels.end(), [&](const auto& c) { return c.name == name; });
    return it == channels.end() ? nullptr : &*it;
}

const VarDecl* Component::find_var(std::string_view name) const
{
    auto it = std::find_if(vars.begin(), vars.end(), [&](const auto& v) { return v.name == name; });
    return it == vars.end() ? nullptr : &*it;
}

const Formula* Component::find_formula(std::string_view label) const
{
    auto it = std::find_if(formulas.begin(), formulas.end(), [&](const auto& f) { return f.label == label; });
    return it == formulas.end() ? nullptr : &*it;
}

std::optional<SymbolRole> Component::role_of(std::string_view name) const
{
    if (const auto* c = find_channel(name))
        return c->direction == Direction::input ? SymbolRole::input : SymbolRole::output;
    if (const auto* v = find_var(name))
        return v->kind == VarKind::state ? SymbolRole::state : SymbolRole::local;
    return std::nullopt;
}

const ValueDomain* Component::domain_of(std::string_view name) const
{
    if (const auto* c = find_channel(name))
        return &c->domain;
    if (const auto* v = find_var(name))
        return &v->domain;
    return nullptr;
}

std::set<std::string> Component::symbol_names() const
{
    std::set<std::string> names;
    for (const auto& c : channels)
        names.insert(c.name);
    for (const auto& v : vars)
        names.insert(v.name);
    return names;
}

// ---------------------------------------------------------------------------
// Interfaces

void Signature::add(std::string name, ValueDomain domain)
{
    auto it = std::lower_bound(names.begin(), names.end(), name);
    auto at = it - names.begin();
    names.insert(it, std::move(name));
    domains.insert(domains.begin() + at, std::move(domain));
}

std::optional<std::size_t> Signature::index_of(std::string_view name) const
{
    auto it = std::lower_bound(names.begin(), names.end(), name);
    if (it == names.end() || *it != name)
        return std::nullopt;
    return static_cast<std::size_t>(it - names.begin());
}

std::string describe(const Interface& iface)
{
    std::ostringstream os;
    auto list = [&](const Signature& s) {
        os << '{';
        for (std::size_t i = 0; i < s.size(); ++i)
            os << (i ? ", " : "") << s.names[i] << " : " << render_domain(s.domains[i]);
        os << '}';
    };
    os << "in ";
    list(iface.inputs);
    os << " out ";
    list(iface.outputs);
    return os.str();
}

Interface interface_of(const Component& comp)
{
    Interface iface;
    for (const auto& c : comp.channels)
        (c.direction == Direction::input ? iface.inputs : iface.outputs).add(c.name, c.domain);
    return iface;
}

Footprint symbol_footprint(const Formula& f, const Component& comp)
{
    Footprint fp;
    auto note_read = [&](const SymbolRead& r) {
        auto role = comp.role_of(r.name);
        if (!role)
            return;
        switch (*role) {
        case SymbolRole::input: fp.reads_inputs.insert(r.name); break;
        case SymbolRole::state: fp.reads_state.insert(r.name); break;
        case SymbolRole::local: fp.reads_locals.insert(r.name); break;
        case SymbolRole::output: break;
        }
    };
    for_each_read(f.guard, note_read);
    for (const auto& a : f.atoms) {
        for_each_read(a.value, note_read);
        auto role = comp.role_of(a.target);
        if (!role)
            continue;
        switch (*role) {
        case SymbolRole::output: fp.targets_outputs.insert(a.target); break;
        case SymbolRole::state: fp.targets_state.insert(a.target); break;
        case SymbolRole::local: fp.targets_locals.insert(a.target); break;
        case SymbolRole::input: break;
        }
    }
    return fp;
}

// ---------------------------------------------------------------------------
// Validation

namespace {

constexpr std::array keywords{"component", "requirement", "generated", "in",   "out",  "state", "local", "init",
                              "gar",       "int",         "if",        "then", "else", "true",  "false"};

struct Validator {
    const Component& comp;
    std::vector<Diagnostic> diags;

    void add(Code code, std::string message, std::optional<SourceSpan> span = {}, std::optional<SourceSpan> related = {})
    {
        Diagnostic d{code, std::move(message)};
        d.span = std::move(span);
        d.related = std::move(related);
        diags.push_back(std::move(d));
    }

    void add_formula(Code code, std::string message, const Formula& f, std::size_t pos)
    {
        Diagnostic d{code, std::move(message), f.label, pos, f.span};
        diags.push_back(std::move(d));
    }

    void check_name(const std::string& name, const char* what, const std::optional<SourceSpan>& span)
    {
        if (!is_identifier(name) || is_keyword(name))
            add(Code::bad_name, std::string(what) + " name `" + name + "` is not a valid identifier", span);
        else if (is_reserved(name) && !comp.generated)
            add(Code::reserved, std::string(what) + " name `" + name + "` uses the reserved `__` prefix", span);
    }

    void check_domain(const ValueDomain& d, const std::string& owner, const std::optional<SourceSpan>& span)
    {
        if (d.is_enum()) {
            if (d.labels.empty())
                add(Code::domain, "enumeration of `" + owner + "` has no labels", span);
            if (d.labels.size() > max_domain_size)
                add(Code::domain, "enumeration of `" + owner + "` exceeds " + std::to_string(max_domain_size) + " labels", span);
            std::set<std::string> seen;
            for (const auto& l : d.labels) {
                if (!is_identifier(l) || is_keyword(l) || is_reserved(l))
                    add(Code::bad_name, "label `" + l + "` of `" + owner + "` is not a valid identifier", span);
                if (!seen.insert(l).second)
                    add(Code::domain, "label `" + l + "` repeated in domain of `" + owner + "`", span);
            }
        } else {
            if (d.lo > d.hi)
                add(Code::domain, "integer domain of `" + owner + "` has lo > hi", span);
            else if (static_cast<unsigned long long>(d.hi) - static_cast<unsigned long long>(d.lo) + 1 > max_domain_size)
                add(Code::domain, "integer domain of `" + owner + "` exceeds " + std::to_string(max_domain_size) + " values", span);
        }
    }

    void run()
    {
        if (!is_identifier(comp.name) || is_keyword(comp.name))
            add(Code::bad_name, "component name `" + comp.name + "` is not a valid identifier");

        std::map<std::string, std::optional<SourceSpan>> declared;
        auto declare = [&](const std::string& name, const std::optional<SourceSpan>& span) {
            auto [it, fresh] = declared.emplace(name, span);
            if (!fresh)
                add(Code::dup_name, "`" + name + "` is declared more than once", span, it->second);
        };
        bool has_output = false;
        for (const auto& c : comp.channels) {
            check_name(c.name, "channel", c.span);
            declare(c.name, c.span);
            check_domain(c.domain, c.name, c.span);
            has_output |= c.direction == Direction::output;
        }
        for (const auto& v : comp.vars) {
            check_name(v.name, v.kind == VarKind::state ? "state variable" : "local variable", v.span);
            declare(v.name, v.span);
            check_domain(v.domain, v.name, v.span);
            if (v.kind == VarKind::state) {
                if (!v.init)
                    add(Code::init, "state variable `" + v.name + "` has no initial value", v.span);
                else if (!detail::literal_value(*v.init, v.domain))
                    add(Code::init, "initial value `" + render_literal(*v.init) + "` of `" + v.name + "` is outside " +
                                        render_domain(v.domain),
                        v.span);
            } else if (v.init) {
                add(Code::init, "local variable `" + v.name + "` cannot carry an initial value", v.span);
            }
        }
        auto check_labels = [&](const ValueDomain& d, const std::optional<SourceSpan>& span) {
            for (const auto& l : d.labels)
                if (declared.count(l))
                    add(Code::label_clash, "label `" + l + "` collides with the symbol of the same name", span);
        };
        for (const auto& c : comp.channels)
            check_labels(c.domain, c.span);
        for (const auto& v : comp.vars)
            check_labels(v.domain, v.span);
        if (!has_output && !comp.requirement && !comp.generated)
            add(Code::no_output, "component `" + comp.name + "` declares no output channel");

        std::vector<Diagnostic> typing;
        detail::Elaborator elab(comp, [](const std::string&) { return std::size_t{0}; }, typing);
        std::map<std::string, const Formula*> labels;
        for (std::size_t i = 0; i < comp.formulas.size(); ++i) {
            const Formula& f = comp.formulas[i];
            if (!is_identifier(f.label) || is_keyword(f.label))
                add_formula(Code::bad_name, "formula label `" + f.label + "` is not a valid identifier", f, i);
            else if (is_reserved(f.label) && !comp.generated)
                add_formula(Code::reserved, "formula label `" + f.label + "` uses the reserved `__` prefix", f, i);
            if (auto [it, fresh] = labels.emplace(f.label, &f); !fresh) {
                Diagnostic d{Code::dup_label, "formula label `" + f.label + "` is used more than once", f.label, i, f.span,
                             it->second->span};
                diags.push_back(std::move(d));
            }
            elab.set_context(&f, i);
            elab.boolean(f.guard);
            if (f.atoms.empty())
                add_formula(Code::empty_consequent, "formula has no consequent atoms", f, i);
            std::set<std::string> targets;
            for (const auto& a : f.atoms)
                check_atom(f, i, a, targets, elab);
        }
        diags.insert(diags.end(), typing.begin(), typing.end());
    }

    void check_atom(const Formula& f, std::size_t i, const Atom& a, std::set<std::string>& targets, detail::Elaborator& elab)
    {
        auto role = comp.role_of(a.target);
        if (!role) {
            add_formula(Code::unknown_symbol, "unknown target `" + a.target + "`", f, i);
            return;
        }
        if (!targets.insert(a.target).second)
            add_formula(Code::dup_target, "target `" + a.target + "` appears more than once", f, i);
        switch (*role) {
        case SymbolRole::input:
            add_formula(Code::target_input, "input channel `" + a.target + "` cannot be a target", f, i);
            return;
        case SymbolRole::state:
            if (!a.next) {
                add_formula(Code::target_state, "state variable `" + a.target + "` can only be targeted as `" + a.target + "'`", f, i);
                return;
            }
            break;
        case SymbolRole::output:
        case SymbolRole::local:
            if (a.next) {
                add_formula(Code::next_epoch, "`" + a.target + "'` is not a state variable", f, i);
                return;
            }
            break;
        }
        const ValueDomain& d = *comp.domain_of(a.target);
        if (a.kind == Atom::Kind::equals) {
            elab.value(a.value, d, a.target);
            return;
        }
        if (a.members.empty())
            add_formula(Code::type, "membership set for `" + a.target + "` is empty", f, i);
        for (const auto& m : a.members) {
            if (detail::literal_value(m, d))
                continue;
            bool int_out_of_range = std::holds_alternative<Value>(m.value) && !d.is_enum();
            add_formula(int_out_of_range ? Code::range : Code::type,
                        "`" + render_literal(m) + "` is not a value of `" + a.target + "` : " + render_domain(d), f, i);
        }
    }
};

} // namespace

std::vector<Diagnostic> validate_component(const Component& comp)
{
    Validator v{comp, {}};
    v.run();
    return std::move(v.diags);
}

void require_valid(const Component& comp)
{
    auto diags = validate_component(comp);
    if (!diags.empty())
        throw Error(Code::invalid, "component `" + comp.name + "` is not well formed:\n" + format_diagnostics(diags),
                    std::move(diags));
}

bool is_identifier(std::string_view s)
{
    if (s.empty())
        return false;
    auto alpha = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; };
    auto digit = [](char c) { return c >= '0' && c <= '9'; };
    if (!alpha(s.front()))
        return false;
    return std::all_of(s.begin(), s.end(), [&](char c) { return alpha(c) || digit(c); });
}

bool is_keyword(std::string_view s)
{
    return std::find(keywords.begin(), keywords.end(), s) != keywords.end();
}

bool is_reserved(std::string_view s)
{
    return s.size() >= 2 && s[0] == '_' && s[1] == '_';
}

} // namespace refold

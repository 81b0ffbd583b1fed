#include "typing.hpp"

#include <algorithm>
#include <sstream>

namespace refold::detail {

Value Program::eval_at(std::span<const Value> env, std::size_t i) const
{
    const Node& n = nodes[i];
    switch (n.op) {
    case Op::constant: return n.value;
    case Op::load: return env[n.slot];
    case Op::logical_not: return eval_at(env, n.a) == 0 ? 1 : 0;
    case Op::negate: return -eval_at(env, n.a);
    case Op::logical_and: return (eval_at(env, n.a) != 0 && eval_at(env, n.b) != 0) ? 1 : 0;
    case Op::logical_or: return (eval_at(env, n.a) != 0 || eval_at(env, n.b) != 0) ? 1 : 0;
    case Op::eq: return eval_at(env, n.a) == eval_at(env, n.b) ? 1 : 0;
    case Op::neq: return eval_at(env, n.a) != eval_at(env, n.b) ? 1 : 0;
    case Op::lt: return eval_at(env, n.a) < eval_at(env, n.b) ? 1 : 0;
    case Op::le: return eval_at(env, n.a) <= eval_at(env, n.b) ? 1 : 0;
    case Op::add: return eval_at(env, n.a) + eval_at(env, n.b);
    case Op::sub: return eval_at(env, n.a) - eval_at(env, n.b);
    case Op::select: return eval_at(env, n.a) != 0 ? eval_at(env, n.b) : eval_at(env, n.c);
    }
    return 0;
}

std::optional<Value> literal_value(const Literal& lit, const ValueDomain& domain)
{
    if (const auto* v = std::get_if<Value>(&lit.value)) {
        if (!domain.is_enum() && domain.contains(*v))
            return *v;
        return std::nullopt;
    }
    if (const auto* s = std::get_if<std::string>(&lit.value)) {
        if (!domain.is_enum())
            return std::nullopt;
        auto it = std::find(domain.labels.begin(), domain.labels.end(), *s);
        if (it == domain.labels.end())
            return std::nullopt;
        return static_cast<Value>(it - domain.labels.begin());
    }
    return std::nullopt;
}

Elaborator::Elaborator(const Component& comp, SlotOf slot_of, std::vector<Diagnostic>& out)
    : comp_(comp), slot_of_(std::move(slot_of)), out_(out)
{
}

void Elaborator::set_context(const Formula* f, std::size_t position)
{
    formula_ = f;
    position_ = position;
}

void Elaborator::report(Code code, std::string message)
{
    Diagnostic d{code, std::move(message)};
    if (formula_) {
        d.formula = formula_->label;
        d.span = formula_->span;
    }
    d.position = position_;
    out_.push_back(std::move(d));
}

std::string Elaborator::describe(const Type& t)
{
    switch (t.kind) {
    case Kind::boolean: return "boolean";
    case Kind::integer: return "integer";
    case Kind::enumeration: return "enumeration " + render_domain(*t.domain);
    case Kind::label: return "label";
    case Kind::error: return "<error>";
    }
    return "?";
}

bool Elaborator::same_type(const Type& a, const Type& b)
{
    if (a.kind != b.kind)
        return false;
    if (a.kind == Kind::enumeration)
        return a.domain->labels == b.domain->labels;
    return true;
}

Elaborator::Type Elaborator::infer(const ExprPtr& e) const
{
    if (!e)
        return {};
    return std::visit(
        [&](const auto& n) -> Type {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Literal>) {
                if (std::holds_alternative<bool>(n.value))
                    return {Kind::boolean};
                if (std::holds_alternative<Value>(n.value))
                    return {Kind::integer};
                return {Kind::label};
            } else if constexpr (std::is_same_v<T, SymbolRead>) {
                const ValueDomain* d = comp_.domain_of(n.name);
                if (!d)
                    return {};
                if (d->is_enum())
                    return {Kind::enumeration, d};
                return {Kind::integer};
            } else if constexpr (std::is_same_v<T, Unary>) {
                return {n.op == UnaryOp::logical_not ? Kind::boolean : Kind::integer};
            } else if constexpr (std::is_same_v<T, Binary>) {
                if (n.op == BinaryOp::add || n.op == BinaryOp::sub)
                    return {Kind::integer};
                return {Kind::boolean};
            } else {
                Type t = infer(n.then_branch);
                if (t.kind == Kind::label || t.kind == Kind::error) {
                    Type other = infer(n.else_branch);
                    if (other.kind != Kind::error)
                        return other;
                }
                return t;
            }
        },
        e->node);
}

Elaborator::Lowered Elaborator::emit(Program& prog, Node n, Interval range)
{
    prog.nodes.push_back(n);
    return {true, static_cast<std::uint32_t>(prog.nodes.size() - 1), range};
}

namespace {

bool label_known(const Component& comp, const std::string& label)
{
    auto has = [&](const ValueDomain& d) {
        return std::find(d.labels.begin(), d.labels.end(), label) != d.labels.end();
    };
    for (const auto& c : comp.channels)
        if (has(c.domain))
            return true;
    for (const auto& v : comp.vars)
        if (has(v.domain))
            return true;
    return false;
}

std::optional<Value> checked_add(Value a, Value b)
{
    Value r;
    if (__builtin_add_overflow(a, b, &r))
        return std::nullopt;
    return r;
}

std::optional<Value> checked_sub(Value a, Value b)
{
    Value r;
    if (__builtin_sub_overflow(a, b, &r))
        return std::nullopt;
    return r;
}

} // namespace

Elaborator::Lowered Elaborator::check(const ExprPtr& e, const Type& expected, Program& prog)
{
    if (!e) {
        report(Code::syntax, "missing expression");
        return {};
    }
    auto mismatch = [&](const Type& found) {
        report(Code::type, "expected " + describe(expected) + ", found " + describe(found));
        return Lowered{};
    };

    if (const auto* lit = std::get_if<Literal>(&e->node)) {
        if (const auto* b = std::get_if<bool>(&lit->value)) {
            if (expected.kind != Kind::boolean)
                return mismatch({Kind::boolean});
            return emit(prog, {Op::constant, *b ? 1 : 0});
        }
        if (const auto* v = std::get_if<Value>(&lit->value)) {
            if (expected.kind != Kind::integer)
                return mismatch({Kind::integer});
            return emit(prog, {Op::constant, *v}, {*v, *v});
        }
        const auto& label = std::get<std::string>(lit->value);
        if (expected.kind == Kind::enumeration) {
            if (auto pos = literal_value(*lit, *expected.domain))
                return emit(prog, {Op::constant, *pos});
        }
        if (!label_known(comp_, label))
            report(Code::unknown_symbol, "unknown symbol or label `" + label + "`");
        else
            report(Code::type, "label `" + label + "` is not a value of " + describe(expected));
        return {};
    }

    if (const auto* rd = std::get_if<SymbolRead>(&e->node)) {
        auto role = comp_.role_of(rd->name);
        if (!role) {
            report(Code::unknown_symbol, "unknown symbol `" + rd->name + "`");
            return {};
        }
        if (rd->epoch == Epoch::next) {
            report(Code::next_epoch, "next-epoch read `" + rd->name + "'` is only allowed as an atom target");
            return {};
        }
        if (*role == SymbolRole::output) {
            report(Code::read_output, "output channel `" + rd->name + "` cannot be read");
            return {};
        }
        const ValueDomain* d = comp_.domain_of(rd->name);
        Type actual = d->is_enum() ? Type{Kind::enumeration, d} : Type{Kind::integer};
        if (!same_type(actual, expected))
            return mismatch(actual);
        Interval range = d->is_enum() ? Interval{} : Interval{d->lo, d->hi};
        Node n{Op::load};
        n.slot = slot_of_(rd->name);
        return emit(prog, n, range);
    }

    if (const auto* un = std::get_if<Unary>(&e->node)) {
        if (un->op == UnaryOp::logical_not) {
            if (expected.kind != Kind::boolean)
                return mismatch({Kind::boolean});
            auto a = check(un->operand, {Kind::boolean}, prog);
            if (!a.ok)
                return {};
            return emit(prog, {Op::logical_not, 0, 0, a.node});
        }
        if (expected.kind != Kind::integer)
            return mismatch({Kind::integer});
        auto a = check(un->operand, {Kind::integer}, prog);
        if (!a.ok)
            return {};
        return emit(prog, {Op::negate, 0, 0, a.node}, {-a.range.hi, -a.range.lo});
    }

    if (const auto* bin = std::get_if<Binary>(&e->node)) {
        switch (bin->op) {
        case BinaryOp::logical_and:
        case BinaryOp::logical_or: {
            if (expected.kind != Kind::boolean)
                return mismatch({Kind::boolean});
            auto a = check(bin->lhs, {Kind::boolean}, prog);
            auto b = check(bin->rhs, {Kind::boolean}, prog);
            if (!a.ok || !b.ok)
                return {};
            return emit(prog, {bin->op == BinaryOp::logical_and ? Op::logical_and : Op::logical_or, 0, 0, a.node, b.node});
        }
        case BinaryOp::eq:
        case BinaryOp::neq: {
            if (expected.kind != Kind::boolean)
                return mismatch({Kind::boolean});
            Type tl = infer(bin->lhs);
            Type tr = infer(bin->rhs);
            auto resolved = [](const Type& t) { return t.kind != Kind::label && t.kind != Kind::error; };
            Type ctx;
            if (resolved(tl))
                ctx = tl;
            else if (resolved(tr))
                ctx = tr;
            else {
                bool any_error = false;
                if (tl.kind == Kind::error) {
                    check(bin->lhs, {Kind::integer}, prog);
                    any_error = true;
                }
                if (tr.kind == Kind::error) {
                    check(bin->rhs, {Kind::integer}, prog);
                    any_error = true;
                }
                if (!any_error)
                    report(Code::type, "cannot determine the type of a comparison between two labels");
                return {};
            }
            auto a = check(bin->lhs, ctx, prog);
            auto b = check(bin->rhs, ctx, prog);
            if (!a.ok || !b.ok)
                return {};
            return emit(prog, {bin->op == BinaryOp::eq ? Op::eq : Op::neq, 0, 0, a.node, b.node});
        }
        case BinaryOp::lt:
        case BinaryOp::le: {
            if (expected.kind != Kind::boolean)
                return mismatch({Kind::boolean});
            auto a = check(bin->lhs, {Kind::integer}, prog);
            auto b = check(bin->rhs, {Kind::integer}, prog);
            if (!a.ok || !b.ok)
                return {};
            return emit(prog, {bin->op == BinaryOp::lt ? Op::lt : Op::le, 0, 0, a.node, b.node});
        }
        case BinaryOp::add:
        case BinaryOp::sub: {
            if (expected.kind != Kind::integer)
                return mismatch({Kind::integer});
            auto a = check(bin->lhs, {Kind::integer}, prog);
            auto b = check(bin->rhs, {Kind::integer}, prog);
            if (!a.ok || !b.ok)
                return {};
            std::optional<Value> lo, hi;
            if (bin->op == BinaryOp::add) {
                lo = checked_add(a.range.lo, b.range.lo);
                hi = checked_add(a.range.hi, b.range.hi);
            } else {
                lo = checked_sub(a.range.lo, b.range.hi);
                hi = checked_sub(a.range.hi, b.range.lo);
            }
            if (!lo || !hi) {
                report(Code::range, "integer expression overflows");
                return {};
            }
            return emit(prog, {bin->op == BinaryOp::add ? Op::add : Op::sub, 0, 0, a.node, b.node}, {*lo, *hi});
        }
        }
    }

    const auto& cond = std::get<Conditional>(e->node);
    auto c = check(cond.condition, {Kind::boolean}, prog);
    auto t = check(cond.then_branch, expected, prog);
    auto f = check(cond.else_branch, expected, prog);
    if (!c.ok || !t.ok || !f.ok)
        return {};
    Interval hull{std::min(t.range.lo, f.range.lo), std::max(t.range.hi, f.range.hi)};
    return emit(prog, {Op::select, 0, 0, c.node, t.node, f.node}, hull);
}

std::optional<Program> Elaborator::boolean(const ExprPtr& e)
{
    Program prog;
    if (!check(e, {Kind::boolean}, prog).ok)
        return std::nullopt;
    return prog;
}

std::optional<Program> Elaborator::value(const ExprPtr& e, const ValueDomain& target, const std::string& target_name)
{
    Program prog;
    Type expected = target.is_enum() ? Type{Kind::enumeration, &target} : Type{Kind::integer};
    auto r = check(e, expected, prog);
    if (!r.ok)
        return std::nullopt;
    if (!target.is_enum() && (r.range.lo < target.lo || r.range.hi > target.hi)) {
        std::ostringstream os;
        os << "value assigned to `" << target_name << "` ranges over [" << r.range.lo << ',' << r.range.hi
           << "], outside " << render_domain(target);
        report(Code::range, os.str());
        return std::nullopt;
    }
    return prog;
}

std::optional<Interval> Elaborator::interval(const ExprPtr& e)
{
    Program prog;
    auto r = check(e, {Kind::integer}, prog);
    if (!r.ok)
        return std::nullopt;
    return r.range;
}

} // namespace refold::detail

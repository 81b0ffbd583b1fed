#pragma once

#include "refold/error.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace refold {

/// Channel and variable values. Enumeration values are label positions,
/// integer values are themselves, so numeric order is domain order.
using Value = std::int64_t;

inline constexpr std::size_t max_domain_size = 64;

struct ValueDomain {
    enum class Kind { enumeration, integer };

    Kind kind = Kind::integer;
    std::vector<std::string> labels;
    Value lo = 0;
    Value hi = 0;

    static ValueDomain enumeration(std::vector<std::string> labels);
    static ValueDomain integer(Value lo, Value hi);

    [[nodiscard]] bool is_enum() const { return kind == Kind::enumeration; }
    [[nodiscard]] std::size_t size() const;
    [[nodiscard]] Value at(std::size_t position) const;
    [[nodiscard]] std::optional<std::size_t> position(Value v) const;
    [[nodiscard]] bool contains(Value v) const { return position(v).has_value(); }
    [[nodiscard]] std::string format(Value v) const;
    [[nodiscard]] std::optional<Value> parse(std::string_view text) const;

    friend bool operator==(const ValueDomain&, const ValueDomain&) = default;
};

/// `{a, b}` or `int 0..3`.
std::string render_domain(const ValueDomain& d);

// ---------------------------------------------------------------------------
// Expressions

enum class Epoch { current, next };
enum class UnaryOp { logical_not, negate };
enum class BinaryOp { logical_and, logical_or, eq, neq, lt, le, add, sub };

struct Literal {
    /// bool, integer, or an enumeration label resolved against its context.
    std::variant<bool, Value, std::string> value;

    static Literal boolean(bool b) { return {b}; }
    static Literal integer(Value v) { return {v}; }
    static Literal label(std::string s) { return {std::move(s)}; }

    [[nodiscard]] bool is_label() const { return std::holds_alternative<std::string>(value); }

    friend bool operator==(const Literal&, const Literal&) = default;
};

std::string render_literal(const Literal& lit);

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct SymbolRead {
    std::string name;
    Epoch epoch = Epoch::current;
};

struct Unary {
    UnaryOp op;
    ExprPtr operand;
};

struct Binary {
    BinaryOp op;
    ExprPtr lhs;
    ExprPtr rhs;
};

struct Conditional {
    ExprPtr condition;
    ExprPtr then_branch;
    ExprPtr else_branch;
};

struct Expr {
    std::variant<Literal, SymbolRead, Unary, Binary, Conditional> node;
};

bool same_expr(const Expr& a, const Expr& b);
bool same_expr(const ExprPtr& a, const ExprPtr& b);

namespace ex {
ExprPtr boolean(bool b);
ExprPtr integer(Value v);
ExprPtr label(std::string name);
ExprPtr read(std::string name, Epoch epoch = Epoch::current);
ExprPtr unary(UnaryOp op, ExprPtr operand);
ExprPtr binary(BinaryOp op, ExprPtr lhs, ExprPtr rhs);
ExprPtr conditional(ExprPtr c, ExprPtr t, ExprPtr e);
} // namespace ex

/// Calls `fn` for every symbol read in `e`, in syntactic order.
void for_each_read(const ExprPtr& e, const std::function<void(const SymbolRead&)>& fn);

/// Copy of `e` with current-epoch reads renamed by `renames`.
ExprPtr rename_reads(const ExprPtr& e, const std::map<std::string, std::string>& renames);

/// Number of nodes in the tree.
std::size_t expr_size(const ExprPtr& e);

// ---------------------------------------------------------------------------
// Declarations, formulas, components

enum class Direction { input, output };
enum class VarKind { state, local };
enum class SymbolRole { input, output, state, local };

struct ChannelDecl {
    std::string name;
    Direction direction = Direction::input;
    ValueDomain domain;
    std::optional<SourceSpan> span;

    friend bool operator==(const ChannelDecl& a, const ChannelDecl& b)
    {
        return a.name == b.name && a.direction == b.direction && a.domain == b.domain;
    }
};

struct VarDecl {
    std::string name;
    VarKind kind = VarKind::state;
    ValueDomain domain;
    std::optional<Literal> init;  // state variables only
    std::optional<SourceSpan> span;

    friend bool operator==(const VarDecl& a, const VarDecl& b)
    {
        return a.name == b.name && a.kind == b.kind && a.domain == b.domain && a.init == b.init;
    }
};

struct Atom {
    enum class Kind { equals, member };

    std::string target;
    bool next = false;  // `target'`, legal on state variables only
    Kind kind = Kind::equals;
    ExprPtr value;                // equals
    std::vector<Literal> members; // member

    static Atom equals(std::string target, ExprPtr value, bool next = false);
    static Atom member(std::string target, std::vector<Literal> members);

    friend bool operator==(const Atom& a, const Atom& b);
};

struct Formula {
    std::string label;
    ExprPtr guard;  // boolean; the constant true when unguarded
    std::vector<Atom> atoms;
    std::optional<SourceSpan> span;

    friend bool operator==(const Formula& a, const Formula& b);
};

struct Component {
    std::string name;
    bool requirement = false;  // pure requirement spec: may have no outputs
    bool generated = false;    // produced by a schema: may use reserved `__` names
    std::vector<ChannelDecl> channels;
    std::vector<VarDecl> vars;
    std::vector<Formula> formulas;

    [[nodiscard]] const ChannelDecl* find_channel(std::string_view name) const;
    [[nodiscard]] const VarDecl* find_var(std::string_view name) const;
    [[nodiscard]] const Formula* find_formula(std::string_view label) const;
    [[nodiscard]] std::optional<SymbolRole> role_of(std::string_view name) const;
    [[nodiscard]] const ValueDomain* domain_of(std::string_view name) const;
    [[nodiscard]] std::set<std::string> symbol_names() const;

    friend bool operator==(const Component&, const Component&) = default;
};

// ---------------------------------------------------------------------------
// Interfaces

/// Named, typed symbol list kept in alphabetical order. Frames over a
/// signature store one value per name in the same order.
struct Signature {
    std::vector<std::string> names;
    std::vector<ValueDomain> domains;

    void add(std::string name, ValueDomain domain);  // keeps order
    [[nodiscard]] std::size_t size() const { return names.size(); }
    [[nodiscard]] bool empty() const { return names.empty(); }
    [[nodiscard]] std::optional<std::size_t> index_of(std::string_view name) const;

    friend bool operator==(const Signature&, const Signature&) = default;
};

struct Interface {
    Signature inputs;
    Signature outputs;

    friend bool operator==(const Interface&, const Interface&) = default;
};

std::string describe(const Interface& iface);

Interface interface_of(const Component& comp);

struct Footprint {
    std::set<std::string> reads_inputs;
    std::set<std::string> reads_state;
    std::set<std::string> reads_locals;
    std::set<std::string> targets_outputs;
    std::set<std::string> targets_state;
    std::set<std::string> targets_locals;

    friend bool operator==(const Footprint&, const Footprint&) = default;
};

/// Syntactic scan of guard and consequent. Reads of undeclared symbols are
/// ignored.
Footprint symbol_footprint(const Formula& f, const Component& comp);

/// Every invariant violation, empty when the component is well formed.
std::vector<Diagnostic> validate_component(const Component& comp);

/// Throws Error(Code::invalid) carrying the diagnostics unless `comp` is valid.
void require_valid(const Component& comp);

bool is_identifier(std::string_view s);
bool is_keyword(std::string_view s);
bool is_reserved(std::string_view s);

} // namespace refold

#pragma once

// Type checking and lowering of expressions. Validation runs the elaborator
// for its diagnostics; the semantics module runs it again with real slots to
// obtain evaluable programs.

#include "refold/model.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace refold::detail {

enum class Op : std::uint8_t {
    constant,
    load,
    logical_not,
    negate,
    logical_and,
    logical_or,
    eq,
    neq,
    lt,
    le,
    add,
    sub,
    select,
};

struct Node {
    Op op = Op::constant;
    Value value = 0;        // constant
    std::size_t slot = 0;   // load
    std::uint32_t a = 0, b = 0, c = 0;
};

/// Flat expression tree; the root is the last node.
struct Program {
    std::vector<Node> nodes;

    [[nodiscard]] Value eval(std::span<const Value> env) const { return eval_at(env, nodes.size() - 1); }

private:
    [[nodiscard]] Value eval_at(std::span<const Value> env, std::size_t i) const;
};

struct Interval {
    Value lo = 0;
    Value hi = 0;
};

class Elaborator {
public:
    using SlotOf = std::function<std::size_t(const std::string&)>;

    Elaborator(const Component& comp, SlotOf slot_of, std::vector<Diagnostic>& out);

    /// Sets label, position and span attached to subsequent diagnostics.
    void set_context(const Formula* f, std::size_t position);

    std::optional<Program> boolean(const ExprPtr& e);
    /// Lowers `e` as a value of `target`; reports E_RANGE when an integer
    /// expression may leave the domain.
    std::optional<Program> value(const ExprPtr& e, const ValueDomain& target, const std::string& target_name);

    /// Interval of an integer expression, if it type checks.
    std::optional<Interval> interval(const ExprPtr& e);

private:
    enum class Kind { boolean, integer, enumeration, label, error };
    struct Type {
        Kind kind = Kind::error;
        const ValueDomain* domain = nullptr;  // enumeration
    };
    struct Lowered {
        bool ok = false;
        std::uint32_t node = 0;
        Interval range;  // integer
    };

    Type infer(const ExprPtr& e) const;
    Lowered check(const ExprPtr& e, const Type& expected, Program& prog);
    Lowered emit(Program& prog, Node n, Interval range = {});
    void report(Code code, std::string message);
    static std::string describe(const Type& t);
    static bool same_type(const Type& a, const Type& b);

    const Component& comp_;
    SlotOf slot_of_;
    std::vector<Diagnostic>& out_;
    const Formula* formula_ = nullptr;
    std::size_t position_ = 0;
};

/// Resolves a literal against a domain; nullopt when it does not belong.
std::optional<Value> literal_value(const Literal& lit, const ValueDomain& domain);

} // namespace refold::detail

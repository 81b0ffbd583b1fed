#pragma once

#include "refold/semantics.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace refold {

enum class FormulaClass { moore_output, mealy_output, transition, local_def };

/// "MooreOutput", "MealyOutput", "Transition", "LocalDef".
std::string_view class_name(FormulaClass c);

/// An output formula is Mealy when it reads an input, or a local whose
/// definition reads one (transitively). Throws E_MIXED_TARGET when `f`
/// targets an output and a next state.
FormulaClass classify_formula(const Component& comp, const Formula& f);

struct ClassifiedFormula {
    std::string label;
    FormulaClass cls;
    Footprint footprint;
};

struct ClassificationReport {
    std::vector<ClassifiedFormula> rows;  // formula order
    std::vector<std::string> moore;
    std::vector<std::string> mealy;
    std::vector<std::string> transition;
    std::vector<std::string> local_def;
};

ClassificationReport classify_component(const Component& comp);

/// `label class reads targets`, one row per formula.
std::string format_classification(const ClassificationReport& report);

enum class CausalityKind { weak, strong };

struct CausalityWitness {
    Trace first;
    Trace second;
    std::size_t tick = 0;
};

struct CausalityVerdict {
    CausalityKind kind = CausalityKind::strong;
    bool holds = true;
    std::size_t horizon = 0;
    std::uint64_t traces_checked = 0;
    std::optional<CausalityWitness> witness;  // earliest tick, then least pair
    Interface iface;
};

/// Output frames at tick t may not depend on the input at tick t: traces
/// that agree before t must admit the same set of frames at t.
CausalityVerdict check_strong_causality(const Machine& m, const Bounds& bounds);
CausalityVerdict check_strong_causality(const Component& comp, const Bounds& bounds);

/// Traces that agree up to and including t must admit the same frames at t.
CausalityVerdict check_weak_causality(const Machine& m, const Bounds& bounds);
CausalityVerdict check_weak_causality(const Component& comp, const Bounds& bounds);

} // namespace refold

#pragma once

// Bounded behavioral refinement: per input trace, the concrete side's output
// traces must be a subset of the abstract side's. Verdicts hold up to the
// horizon they were computed at, nothing more.

#include "refold/group.hpp"
#include "refold/semantics.hpp"

#include <optional>
#include <string>
#include <vector>

namespace refold {

struct Counterexample {
    Trace input;
    Trace output;
};

struct RefinementVerdict {
    bool holds = true;
    std::size_t horizon = 0;
    std::uint64_t traces_checked = 0;
    std::optional<Counterexample> counterexample;  // least input, then least extra output
    Interface iface;
};

/// Throws E_IFACE_MISMATCH, E_BUDGET, or E_INCONSISTENT naming the side.
RefinementVerdict refines(const Machine& concrete, const Machine& abstract, const Bounds& bounds);
RefinementVerdict refines(const Component& concrete, const Component& abstract, const Bounds& bounds);
RefinementVerdict refines(const Network& concrete, const Component& abstract, const Bounds& bounds);

struct EquivalenceVerdict {
    bool holds = true;
    std::size_t horizon = 0;
    std::uint64_t traces_checked = 0;
    std::optional<Counterexample> counterexample;  // least input, least output in the symmetric difference
    bool admitted_by_first = false;                // which side admits counterexample->output
    Interface iface;
};

EquivalenceVerdict equivalent(const Machine& a, const Machine& b, const Bounds& bounds);
EquivalenceVerdict equivalent(const Component& a, const Component& b, const Bounds& bounds);

/// Multi-line dump of a counterexample with input and output traces.
std::string format_counterexample(const Interface& iface, const Counterexample& cx);

// ---------------------------------------------------------------------------
// Specification groups

/// Outputs whose names start with `__` are hidden when a layer is composed.
bool is_aux_channel(std::string_view name);

/// E_SIZE, E_EMPTY_LAYER, E_LAYER1, E_IFACE_MISMATCH, or composition errors.
std::vector<Diagnostic> validate_group_shape(const SpecificationGroup& g);

/// Composition of layer j; layer 0 is the root on its own.
Network layer_network(const SpecificationGroup& g, std::size_t j);

struct LayerVerdict {
    std::size_t layer = 0;  // refines layer - 1
    RefinementVerdict verdict;
};

std::vector<LayerVerdict> verify_group(const SpecificationGroup& g, const Bounds& bounds);

enum class ExtendMode { in_place, new_layer };

struct ExtendResult {
    SpecificationGroup group;
    std::vector<LayerVerdict> verdicts;  // edges touching the changed layer
};

/// Appends `delta` to spec `index` of layer `layer` (0 = root). Throws
/// E_BAD_TARGET for an unknown target or a delta that does not validate.
ExtendResult extend_spec(const SpecificationGroup& g, std::size_t layer, std::size_t index,
                         const std::vector<Formula>& delta, ExtendMode mode, const Bounds& bounds);

/// Graphviz rendering; verdicts, when given, label the refinement edges.
std::string group_dot(const SpecificationGroup& g, const std::vector<LayerVerdict>& verdicts = {});

} // namespace refold

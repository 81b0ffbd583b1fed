#pragma once

// Bounded-trace semantics. One value per channel per tick; a component's
// formulas are read conjunctively, so a target no active formula constrains
// ranges over its whole domain. Behaviors are the output traces a component
// (or an acyclic zero-delay network) admits for one input trace.

#include "refold/model.hpp"

#include <compare>
#include <cstdint>
#include <functional>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace refold {

/// Values over a Signature, in signature order.
using Frame = std::vector<Value>;

struct Trace {
    std::vector<Frame> frames;

    [[nodiscard]] std::size_t horizon() const { return frames.size(); }

    friend auto operator<=>(const Trace&, const Trace&) = default;
    friend bool operator==(const Trace&, const Trace&) = default;
};

/// Ordered by tick, then channel (alphabetical), then domain order.
using BehaviorSet = std::set<Trace>;

struct Bounds {
    std::size_t horizon = 4;
    std::uint64_t budget = 1'000'000;  // input traces per exhaustive check
    std::size_t max_horizon = 6;
};

/// Throws E_USAGE for a zero horizon, E_BUDGET above the cap.
void check_horizon(const Bounds& bounds);

/// Number of input traces of length H, or nullopt on overflow.
std::optional<std::uint64_t> input_trace_count(const Signature& inputs, std::size_t horizon);

// ---------------------------------------------------------------------------
// Trace text: one line per tick, `t=K ch1=v1 ch2=v2`, channels alphabetical.

std::string format_frame(const Signature& sig, const Frame& frame);
std::string format_trace(const Signature& sig, const Trace& trace);
Result<Trace> parse_trace(std::string_view text, const Signature& sig, const std::string& file = {});

// ---------------------------------------------------------------------------
// Single components

/// Frame layouts of a component: every signature is alphabetical.
struct ComponentFrames {
    Signature inputs;
    Signature outputs;
    Signature state;
    Signature locals;
    Frame initial_state;
};

ComponentFrames frames_of(const Component& comp);

struct StepResult {
    Frame locals;
    Frame outputs;
    Frame next_state;

    friend auto operator<=>(const StepResult&, const StepResult&) = default;
    friend bool operator==(const StepResult&, const StepResult&) = default;
};

/// Every (locals, outputs, next state) consistent with all formulas at one
/// tick, sorted. Empty means the formulas contradict each other here.
std::vector<StepResult> step(const Component& comp, const Frame& state, const Frame& input);

/// Output traces admitted for `input`. Throws E_INCONSISTENT when a prefix
/// of `input` admits no run at all.
BehaviorSet behaviors(const Component& comp, const Trace& input, const Bounds& bounds = {});

/// Exhaustive input traces in lexicographic order over (tick, channel,
/// domain order). Throws E_BUDGET when there are more than `budget`.
class InputTraces {
public:
    InputTraces(Signature inputs, std::size_t horizon, std::uint64_t budget);

    [[nodiscard]] std::uint64_t size() const { return count_; }
    [[nodiscard]] Trace at(std::uint64_t index) const;
    [[nodiscard]] const Signature& signature() const { return inputs_; }
    [[nodiscard]] std::size_t horizon() const { return horizon_; }

    void for_each(const std::function<void(std::uint64_t, const Trace&)>& fn) const;

private:
    Signature inputs_;
    std::size_t horizon_;
    std::uint64_t frames_per_tick_ = 1;
    std::uint64_t count_ = 1;
};

InputTraces enumerate_input_traces(const Interface& iface, const Bounds& bounds);

// ---------------------------------------------------------------------------
// Networks

struct Wire {
    std::size_t producer;
    std::size_t consumer;
    std::string channel;

    friend bool operator==(const Wire&, const Wire&) = default;
};

/// Parts wired by channel name with zero delay. Built by compose().
class Network {
public:
    static Network of(const Component& comp);

    [[nodiscard]] const std::vector<Component>& parts() const { return parts_; }
    [[nodiscard]] const std::vector<Wire>& wires() const { return wires_; }
    [[nodiscard]] const std::set<std::string>& hidden() const { return hidden_; }
    [[nodiscard]] const Interface& interface() const { return interface_; }
    /// Part indices in evaluation (topological) order.
    [[nodiscard]] const std::vector<std::size_t>& order() const { return order_; }

private:
    friend Network compose(std::vector<Component> parts, std::set<std::string> hidden);

    std::vector<Component> parts_;
    std::vector<Wire> wires_;
    std::set<std::string> hidden_;
    Interface interface_;
    std::vector<std::size_t> order_;
};

/// Throws E_OUTPUT_CLASH, E_DOMAIN_MISMATCH, E_CYCLE, E_BAD_HIDE, or
/// E_INVALID for a malformed part.
Network compose(std::vector<Component> parts, std::set<std::string> hidden);

BehaviorSet network_behaviors(const Network& net, const Trace& input, const Bounds& bounds = {});

// ---------------------------------------------------------------------------
// Checks over reachable configurations

struct ConfigWitness {
    std::size_t tick = 0;
    Frame state;
    Frame input;
    std::size_t successors = 0;
};

struct DeterminismReport {
    bool deterministic = true;
    bool total = true;
    std::optional<ConfigWitness> nontotal;          // first configuration without successors
    std::optional<ConfigWitness> nondeterministic;  // first with more than one
};

DeterminismReport check_deterministic_total(const Component& comp, const Bounds& bounds);

// ---------------------------------------------------------------------------
// Generic exploration

struct Transition {
    Frame output;
    Frame next;

    friend auto operator<=>(const Transition&, const Transition&) = default;
    friend bool operator==(const Transition&, const Transition&) = default;
};

/// Immutable stepping view of a component or network with locals and hidden
/// channels projected away. Cheap to copy; safe to share.
class Machine {
public:
    static Machine of(const Component& comp);
    static Machine of(const Network& net);

    [[nodiscard]] const Interface& interface() const;
    [[nodiscard]] const Frame& initial_state() const;
    [[nodiscard]] std::vector<Transition> successors(const Frame& state, const Frame& input) const;
    [[nodiscard]] const std::string& name() const;

    struct Impl;

private:
    explicit Machine(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
    std::shared_ptr<const Impl> impl_;
};

/// Runs every machine over every input trace of length `bounds.horizon`, in
/// enumeration order, sharing work across common prefixes. `visit` receives
/// the trace index, the input trace and one behavior set per machine; it
/// returns false to stop. All machines must share one input signature.
/// Returns the number of traces visited.
std::uint64_t explore(std::span<const Machine> machines, std::span<const std::string> labels, const Bounds& bounds,
                      const std::function<bool(std::uint64_t, const Trace&, std::span<const BehaviorSet>)>& visit);

BehaviorSet machine_behaviors(const Machine& m, const Trace& input, const Bounds& bounds = {});

} // namespace refold

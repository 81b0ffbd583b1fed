#include "refold/semantics.hpp"

#include "typing.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <sstream>

namespace refold {

void check_horizon(const Bounds& bounds)
{
    if (bounds.horizon == 0)
        throw Error(Code::usage, "horizon must be at least 1");
    if (bounds.horizon > bounds.max_horizon)
        throw Error(Code::budget, "horizon " + std::to_string(bounds.horizon) + " exceeds the cap of " +
                                      std::to_string(bounds.max_horizon));
}

namespace {

std::optional<std::uint64_t> checked_mul(std::uint64_t a, std::uint64_t b)
{
    std::uint64_t r;
    if (__builtin_mul_overflow(a, b, &r))
        return std::nullopt;
    return r;
}

std::uint64_t frames_per_tick(const Signature& sig)
{
    std::uint64_t n = 1;
    for (const auto& d : sig.domains)
        n *= d.size();  // each domain is capped at 64 values; overflow is caught by callers via count
    return n;
}

std::vector<Frame> all_frames(const Signature& sig)
{
    std::vector<Frame> out;
    Frame f(sig.size());
    std::vector<std::size_t> pos(sig.size(), 0);
    for (;;) {
        for (std::size_t i = 0; i < sig.size(); ++i)
            f[i] = sig.domains[i].at(pos[i]);
        out.push_back(f);
        std::size_t k = sig.size();
        while (k > 0) {
            --k;
            if (++pos[k] < sig.domains[k].size())
                break;
            pos[k] = 0;
            if (k == 0)
                return out;
        }
        if (sig.size() == 0)
            return out;
    }
}

} // namespace

std::optional<std::uint64_t> input_trace_count(const Signature& inputs, std::size_t horizon)
{
    std::uint64_t per_tick = 1;
    for (const auto& d : inputs.domains) {
        auto next = checked_mul(per_tick, d.size());
        if (!next)
            return std::nullopt;
        per_tick = *next;
    }
    std::uint64_t count = 1;
    for (std::size_t t = 0; t < horizon; ++t) {
        auto next = checked_mul(count, per_tick);
        if (!next)
            return std::nullopt;
        count = *next;
    }
    return count;
}

// ---------------------------------------------------------------------------
// Trace text

std::string format_frame(const Signature& sig, const Frame& frame)
{
    std::string out;
    for (std::size_t i = 0; i < sig.size(); ++i) {
        if (i)
            out += ' ';
        out += sig.names[i] + "=" + sig.domains[i].format(frame[i]);
    }
    return out;
}

std::string format_trace(const Signature& sig, const Trace& trace)
{
    std::string out;
    for (std::size_t t = 0; t < trace.frames.size(); ++t) {
        out += "t=" + std::to_string(t);
        if (!sig.empty())
            out += ' ' + format_frame(sig, trace.frames[t]);
        out += '\n';
    }
    return out;
}

Result<Trace> parse_trace(std::string_view text, const Signature& sig, const std::string& file)
{
    Result<Trace> result;
    Trace trace;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    auto err = [&](std::string msg) {
        Diagnostic d{Code::syntax, std::move(msg)};
        d.span = SourceSpan{file, lineno, 1};
        result.diagnostics.push_back(std::move(d));
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (auto c = line.find("--"); c != std::string::npos)
            line.resize(c);
        std::istringstream words(line);
        std::string w;
        std::vector<std::string> parts;
        while (words >> w)
            parts.push_back(w);
        if (parts.empty())
            continue;
        std::string expected_tick = "t=" + std::to_string(trace.frames.size());
        if (parts[0] != expected_tick) {
            err("expected `" + expected_tick + "`");
            continue;
        }
        Frame frame(sig.size());
        std::vector<bool> seen(sig.size(), false);
        bool ok = true;
        for (std::size_t i = 1; i < parts.size(); ++i) {
            auto eq = parts[i].find('=');
            if (eq == std::string::npos) {
                err("expected `channel=value`, found `" + parts[i] + "`");
                ok = false;
                continue;
            }
            std::string name = parts[i].substr(0, eq);
            auto idx = sig.index_of(name);
            if (!idx) {
                err("unknown channel `" + name + "`");
                ok = false;
                continue;
            }
            if (seen[*idx]) {
                err("channel `" + name + "` given twice");
                ok = false;
                continue;
            }
            auto v = sig.domains[*idx].parse(parts[i].substr(eq + 1));
            if (!v) {
                err("`" + parts[i].substr(eq + 1) + "` is not a value of " + render_domain(sig.domains[*idx]));
                ok = false;
                continue;
            }
            seen[*idx] = true;
            frame[*idx] = *v;
        }
        for (std::size_t i = 0; i < sig.size(); ++i)
            if (!seen[i] && ok) {
                err("missing channel `" + sig.names[i] + "`");
                ok = false;
            }
        trace.frames.push_back(std::move(frame));
    }
    if (trace.frames.empty() && result.diagnostics.empty())
        err("trace has no ticks");
    if (result.diagnostics.empty())
        result.value = std::move(trace);
    return result;
}

// ---------------------------------------------------------------------------
// Compiled components

ComponentFrames frames_of(const Component& comp)
{
    ComponentFrames f;
    for (const auto& c : comp.channels)
        (c.direction == Direction::input ? f.inputs : f.outputs).add(c.name, c.domain);
    for (const auto& v : comp.vars)
        (v.kind == VarKind::state ? f.state : f.locals).add(v.name, v.domain);
    f.initial_state.resize(f.state.size());
    for (std::size_t i = 0; i < f.state.size(); ++i) {
        const auto* v = comp.find_var(f.state.names[i]);
        if (v && v->init)
            f.initial_state[i] = detail::literal_value(*v->init, v->domain).value_or(0);
    }
    return f;
}

namespace {

std::uint64_t full_mask(std::size_t n)
{
    return n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
}

struct CompiledAtom {
    SymbolRole role;
    std::size_t index;  // within the role's signature
    bool member;
    std::uint64_t mask;  // member
    detail::Program rhs;  // equals
};

struct CompiledFormula {
    detail::Program guard;
    std::vector<CompiledAtom> atoms;
};

struct CompiledComponent {
    std::string name;
    ComponentFrames frames;
    std::vector<CompiledFormula> formulas;
    std::size_t state_offset = 0;
    std::size_t local_offset = 0;
    std::size_t env_size = 0;
};

CompiledComponent compile(const Component& comp)
{
    require_valid(comp);
    CompiledComponent cc;
    cc.name = comp.name;
    cc.frames = frames_of(comp);
    const auto& fr = cc.frames;
    cc.state_offset = fr.inputs.size();
    cc.local_offset = cc.state_offset + fr.state.size();
    cc.env_size = cc.local_offset + fr.locals.size();

    auto slot_of = [&](const std::string& name) -> std::size_t {
        if (auto i = fr.inputs.index_of(name))
            return *i;
        if (auto i = fr.state.index_of(name))
            return cc.state_offset + *i;
        if (auto i = fr.locals.index_of(name))
            return cc.local_offset + *i;
        return 0;
    };
    std::vector<Diagnostic> diags;
    detail::Elaborator elab(comp, slot_of, diags);
    for (std::size_t i = 0; i < comp.formulas.size(); ++i) {
        const Formula& f = comp.formulas[i];
        elab.set_context(&f, i);
        CompiledFormula out;
        out.guard = *elab.boolean(f.guard);
        for (const auto& a : f.atoms) {
            CompiledAtom ca{};
            ca.role = *comp.role_of(a.target);
            const Signature& sig = ca.role == SymbolRole::output  ? fr.outputs
                                   : ca.role == SymbolRole::state ? fr.state
                                                                  : fr.locals;
            ca.index = *sig.index_of(a.target);
            const ValueDomain& d = sig.domains[ca.index];
            ca.member = a.kind == Atom::Kind::member;
            if (ca.member) {
                for (const auto& m : a.members)
                    ca.mask |= std::uint64_t{1} << *d.position(*detail::literal_value(m, d));
            } else {
                ca.rhs = *elab.value(a.value, d, a.target);
            }
            out.atoms.push_back(std::move(ca));
        }
        cc.formulas.push_back(std::move(out));
    }
    return cc;
}

/// Calls `emit(locals, outputs, next)` for every consistent step, in order.
template <class Emit>
void for_each_step(const CompiledComponent& cc, const Frame& state, const Frame& input, Emit&& emit)
{
    const auto& fr = cc.frames;
    std::vector<Value> env(cc.env_size);
    std::copy(input.begin(), input.end(), env.begin());
    std::copy(state.begin(), state.end(), env.begin() + static_cast<long>(cc.state_offset));

    const std::size_t n_loc = fr.locals.size();
    const std::size_t n_out = fr.outputs.size();
    const std::size_t n_st = fr.state.size();
    std::vector<std::size_t> lpos(n_loc, 0);
    Frame locals(n_loc);
    std::vector<std::uint64_t> masks(n_out + n_st);

    for (;;) {
        for (std::size_t i = 0; i < n_loc; ++i) {
            locals[i] = fr.locals.domains[i].at(lpos[i]);
            env[cc.local_offset + i] = locals[i];
        }
        for (std::size_t i = 0; i < n_out; ++i)
            masks[i] = full_mask(fr.outputs.domains[i].size());
        for (std::size_t i = 0; i < n_st; ++i)
            masks[n_out + i] = full_mask(fr.state.domains[i].size());

        bool ok = true;
        for (const auto& f : cc.formulas) {
            if (f.guard.eval(env) == 0)
                continue;
            for (const auto& a : f.atoms) {
                if (a.role == SymbolRole::local) {
                    Value v = locals[a.index];
                    bool holds = a.member ? ((a.mask >> *fr.locals.domains[a.index].position(v)) & 1) != 0
                                          : a.rhs.eval(env) == v;
                    if (!holds) {
                        ok = false;
                        break;
                    }
                    continue;
                }
                const bool is_out = a.role == SymbolRole::output;
                const ValueDomain& d = is_out ? fr.outputs.domains[a.index] : fr.state.domains[a.index];
                std::uint64_t allowed = a.mask;
                if (!a.member) {
                    auto p = d.position(a.rhs.eval(env));
                    allowed = p ? (std::uint64_t{1} << *p) : 0;
                }
                masks[is_out ? a.index : n_out + a.index] &= allowed;
            }
            if (!ok)
                break;
        }
        if (ok && std::all_of(masks.begin(), masks.end(), [](std::uint64_t m) { return m != 0; })) {
            // product over outputs then next state, lexicographic
            std::vector<std::vector<Value>> choices(n_out + n_st);
            for (std::size_t i = 0; i < n_out + n_st; ++i) {
                const ValueDomain& d = i < n_out ? fr.outputs.domains[i] : fr.state.domains[i - n_out];
                for (std::size_t p = 0; p < d.size(); ++p)
                    if ((masks[i] >> p) & 1)
                        choices[i].push_back(d.at(p));
            }
            std::vector<std::size_t> cpos(choices.size(), 0);
            Frame outs(n_out), next(n_st);
            for (;;) {
                for (std::size_t i = 0; i < n_out; ++i)
                    outs[i] = choices[i][cpos[i]];
                for (std::size_t i = 0; i < n_st; ++i)
                    next[i] = choices[n_out + i][cpos[n_out + i]];
                emit(locals, outs, next);
                std::size_t k = choices.size();
                bool done = true;
                while (k > 0) {
                    --k;
                    if (++cpos[k] < choices[k].size()) {
                        done = false;
                        break;
                    }
                    cpos[k] = 0;
                }
                if (done)
                    break;
            }
        }

        std::size_t k = n_loc;
        bool done = true;
        while (k > 0) {
            --k;
            if (++lpos[k] < fr.locals.domains[k].size()) {
                done = false;
                break;
            }
            lpos[k] = 0;
        }
        if (done)
            break;
    }
}

std::vector<Transition> transitions(const CompiledComponent& cc, const Frame& state, const Frame& input)
{
    std::vector<Transition> out;
    for_each_step(cc, state, input,
                  [&](const Frame&, const Frame& outs, const Frame& next) { out.push_back({outs, next}); });
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

void check_frame(const Signature& sig, const Frame& f, const char* what)
{
    if (f.size() != sig.size())
        throw Error(Code::usage, std::string(what) + " frame has " + std::to_string(f.size()) + " values, expected " +
                                     std::to_string(sig.size()));
    for (std::size_t i = 0; i < sig.size(); ++i)
        if (!sig.domains[i].contains(f[i]))
            throw Error(Code::usage, std::string(what) + " value for `" + sig.names[i] + "` is outside its domain");
}

} // namespace

std::vector<StepResult> step(const Component& comp, const Frame& state, const Frame& input)
{
    auto cc = compile(comp);
    check_frame(cc.frames.state, state, "state");
    check_frame(cc.frames.inputs, input, "input");
    std::vector<StepResult> out;
    for_each_step(cc, state, input, [&](const Frame& l, const Frame& o, const Frame& n) { out.push_back({l, o, n}); });
    return out;
}

// ---------------------------------------------------------------------------
// Machines

struct Machine::Impl {
    virtual ~Impl() = default;
    virtual std::vector<Transition> successors(const Frame& state, const Frame& input) const = 0;

    Interface iface;
    Frame initial;
    std::string name;
};

namespace {

struct ComponentMachine final : Machine::Impl {
    CompiledComponent cc;

    explicit ComponentMachine(const Component& comp) : cc(compile(comp))
    {
        iface.inputs = cc.frames.inputs;
        iface.outputs = cc.frames.outputs;
        initial = cc.frames.initial_state;
        name = comp.name;
    }

    std::vector<Transition> successors(const Frame& state, const Frame& input) const override
    {
        return transitions(cc, state, input);
    }
};

struct NetworkMachine final : Machine::Impl {
    struct Part {
        CompiledComponent cc;
        std::vector<std::size_t> in_channels;   // per input slot
        std::vector<std::size_t> out_channels;  // per output slot
        std::size_t state_offset = 0;
    };
    std::vector<Part> parts;  // evaluation order
    std::size_t channel_count = 0;
    std::vector<std::size_t> ext_in;
    std::vector<std::size_t> ext_out;

    explicit NetworkMachine(const Network& net)
    {
        iface = net.interface();
        std::map<std::string, std::size_t> channel_id;
        auto id = [&](const std::string& n) {
            auto [it, fresh] = channel_id.emplace(n, channel_id.size());
            return it->second;
        };
        for (const auto& n : iface.inputs.names)
            ext_in.push_back(id(n));
        std::size_t offset = 0;
        for (std::size_t idx : net.order()) {
            const Component& c = net.parts()[idx];
            Part p{compile(c), {}, {}, offset};
            for (const auto& n : p.cc.frames.outputs.names)
                p.out_channels.push_back(id(n));
            offset += p.cc.frames.state.size();
            initial.insert(initial.end(), p.cc.frames.initial_state.begin(), p.cc.frames.initial_state.end());
            parts.push_back(std::move(p));
        }
        for (auto& p : parts)
            for (const auto& n : p.cc.frames.inputs.names)
                p.in_channels.push_back(id(n));
        for (const auto& n : iface.outputs.names)
            ext_out.push_back(id(n));
        channel_count = channel_id.size();
        name = "network";
        for (const auto& p : parts)
            name += (name == "network" ? "(" : ", ") + p.cc.name;
        name += ")";
    }

    std::vector<Transition> successors(const Frame& state, const Frame& input) const override
    {
        std::vector<Value> values(channel_count);
        for (std::size_t i = 0; i < ext_in.size(); ++i)
            values[ext_in[i]] = input[i];
        Frame next(state.size());
        std::set<Transition> out;
        expand(0, state, values, next, out);
        return {out.begin(), out.end()};
    }

    void expand(std::size_t k, const Frame& state, std::vector<Value>& values, Frame& next, std::set<Transition>& out) const
    {
        if (k == parts.size()) {
            Frame o(ext_out.size());
            for (std::size_t i = 0; i < ext_out.size(); ++i)
                o[i] = values[ext_out[i]];
            out.insert({std::move(o), next});
            return;
        }
        const Part& p = parts[k];
        const std::size_t n_st = p.cc.frames.state.size();
        Frame part_state(state.begin() + static_cast<long>(p.state_offset),
                         state.begin() + static_cast<long>(p.state_offset + n_st));
        Frame part_input(p.in_channels.size());
        for (std::size_t i = 0; i < p.in_channels.size(); ++i)
            part_input[i] = values[p.in_channels[i]];
        for (const auto& tr : transitions(p.cc, part_state, part_input)) {
            for (std::size_t i = 0; i < p.out_channels.size(); ++i)
                values[p.out_channels[i]] = tr.output[i];
            std::copy(tr.next.begin(), tr.next.end(), next.begin() + static_cast<long>(p.state_offset));
            expand(k + 1, state, values, next, out);
        }
    }
};

} // namespace

Machine Machine::of(const Component& comp)
{
    return Machine(std::make_shared<ComponentMachine>(comp));
}

Machine Machine::of(const Network& net)
{
    return Machine(std::make_shared<NetworkMachine>(net));
}

const Interface& Machine::interface() const { return impl_->iface; }
const Frame& Machine::initial_state() const { return impl_->initial; }
const std::string& Machine::name() const { return impl_->name; }

std::vector<Transition> Machine::successors(const Frame& state, const Frame& input) const
{
    return impl_->successors(state, input);
}

// ---------------------------------------------------------------------------
// Exploration

namespace {

using Runs = std::vector<std::pair<Frame, Trace>>;  // (state, output prefix), sorted unique

class Stepper {
public:
    explicit Stepper(const Machine& m) : m_(m) {}

    const std::vector<Transition>& successors(const Frame& state, const Frame& input)
    {
        auto key = std::make_pair(state, input);
        auto it = memo_.find(key);
        if (it == memo_.end())
            it = memo_.emplace(std::move(key), m_.successors(state, input)).first;
        return it->second;
    }

    Runs advance(const Runs& runs, const Frame& input)
    {
        std::set<std::pair<Frame, Trace>> next;
        for (const auto& [state, prefix] : runs) {
            for (const auto& tr : successors(state, input)) {
                Trace extended = prefix;
                extended.frames.push_back(tr.output);
                next.emplace(tr.next, std::move(extended));
            }
        }
        return {next.begin(), next.end()};
    }

private:
    const Machine& m_;
    std::map<std::pair<Frame, Frame>, std::vector<Transition>> memo_;
};

[[noreturn]] void throw_inconsistent(const std::string& who, const Signature& inputs, const Trace& prefix)
{
    throw Error(Code::inconsistent,
                who + " admits no behavior after input prefix of " + std::to_string(prefix.horizon()) + " tick(s):\n" +
                    format_trace(inputs, prefix));
}

} // namespace

std::uint64_t explore(std::span<const Machine> machines, std::span<const std::string> labels, const Bounds& bounds,
                      const std::function<bool(std::uint64_t, const Trace&, std::span<const BehaviorSet>)>& visit)
{
    check_horizon(bounds);
    if (machines.empty())
        return 0;
    const Signature& inputs = machines[0].interface().inputs;
    for (const auto& m : machines)
        if (!(m.interface().inputs == inputs))
            throw Error(Code::iface_mismatch, "machines disagree on their inputs");
    auto count = input_trace_count(inputs, bounds.horizon);
    if (!count || *count > bounds.budget)
        throw Error(Code::budget, "exhaustive check needs " + (count ? std::to_string(*count) : std::string("more than 2^64")) +
                                      " input traces, budget is " + std::to_string(bounds.budget));

    const auto frames = all_frames(inputs);
    std::vector<Stepper> steppers;
    steppers.reserve(machines.size());
    for (const auto& m : machines)
        steppers.emplace_back(m);

    std::uint64_t index = 0;
    bool keep_going = true;
    Trace input;
    std::vector<Runs> start;
    for (const auto& m : machines)
        start.push_back(Runs{{m.initial_state(), Trace{}}});

    std::function<void(const std::vector<Runs>&)> dfs = [&](const std::vector<Runs>& runs) {
        if (input.horizon() == bounds.horizon) {
            std::vector<BehaviorSet> sets(runs.size());
            for (std::size_t i = 0; i < runs.size(); ++i)
                for (const auto& r : runs[i])
                    sets[i].insert(r.second);
            keep_going = visit(index++, input, sets);
            return;
        }
        for (const auto& f : frames) {
            input.frames.push_back(f);
            std::vector<Runs> next(runs.size());
            for (std::size_t i = 0; i < runs.size(); ++i) {
                next[i] = steppers[i].advance(runs[i], f);
                if (next[i].empty())
                    throw_inconsistent(i < labels.size() ? labels[i] : machines[i].name(), inputs, input);
            }
            dfs(next);
            input.frames.pop_back();
            if (!keep_going)
                return;
        }
    };
    dfs(start);
    return index;
}

BehaviorSet machine_behaviors(const Machine& m, const Trace& input, const Bounds& bounds)
{
    if (input.horizon() == 0)
        throw Error(Code::usage, "input trace has no ticks");
    if (input.horizon() > bounds.max_horizon)
        throw Error(Code::budget, "input trace length " + std::to_string(input.horizon()) + " exceeds the horizon cap of " +
                                      std::to_string(bounds.max_horizon));
    const Signature& inputs = m.interface().inputs;
    for (const auto& f : input.frames)
        check_frame(inputs, f, "input");
    Stepper stepper(m);
    Runs runs{{m.initial_state(), Trace{}}};
    Trace prefix;
    for (const auto& f : input.frames) {
        prefix.frames.push_back(f);
        runs = stepper.advance(runs, f);
        if (runs.empty())
            throw_inconsistent(m.name(), inputs, prefix);
    }
    BehaviorSet out;
    for (auto& r : runs)
        out.insert(std::move(r.second));
    return out;
}

BehaviorSet behaviors(const Component& comp, const Trace& input, const Bounds& bounds)
{
    return machine_behaviors(Machine::of(comp), input, bounds);
}

BehaviorSet network_behaviors(const Network& net, const Trace& input, const Bounds& bounds)
{
    return machine_behaviors(Machine::of(net), input, bounds);
}

// ---------------------------------------------------------------------------
// Input enumeration

InputTraces::InputTraces(Signature inputs, std::size_t horizon, std::uint64_t budget)
    : inputs_(std::move(inputs)), horizon_(horizon)
{
    auto count = input_trace_count(inputs_, horizon_);
    if (!count || *count > budget)
        throw Error(Code::budget, "enumeration needs " + (count ? std::to_string(*count) : std::string("more than 2^64")) +
                                      " input traces, budget is " + std::to_string(budget));
    count_ = *count;
    frames_per_tick_ = frames_per_tick(inputs_);
}

Trace InputTraces::at(std::uint64_t index) const
{
    Trace t;
    t.frames.resize(horizon_, Frame(inputs_.size()));
    for (std::size_t tick = horizon_; tick > 0; --tick) {
        std::uint64_t digit = index % frames_per_tick_;
        index /= frames_per_tick_;
        Frame& f = t.frames[tick - 1];
        for (std::size_t c = inputs_.size(); c > 0; --c) {
            const ValueDomain& d = inputs_.domains[c - 1];
            f[c - 1] = d.at(digit % d.size());
            digit /= d.size();
        }
    }
    return t;
}

void InputTraces::for_each(const std::function<void(std::uint64_t, const Trace&)>& fn) const
{
    for (std::uint64_t i = 0; i < count_; ++i)
        fn(i, at(i));
}

InputTraces enumerate_input_traces(const Interface& iface, const Bounds& bounds)
{
    check_horizon(bounds);
    return InputTraces(iface.inputs, bounds.horizon, bounds.budget);
}

// ---------------------------------------------------------------------------
// Networks

Network Network::of(const Component& comp)
{
    return compose({comp}, {});
}

Network compose(std::vector<Component> parts, std::set<std::string> hidden)
{
    if (parts.empty())
        throw Error(Code::usage, "a network needs at least one part");
    for (const auto& p : parts)
        require_valid(p);

    std::map<std::string, std::size_t> producer;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        for (const auto& c : parts[i].channels) {
            if (c.direction != Direction::output)
                continue;
            auto [it, fresh] = producer.emplace(c.name, i);
            if (!fresh)
                throw Error(Code::output_clash, "channel `" + c.name + "` is emitted by both `" + parts[it->second].name +
                                                    "` and `" + parts[i].name + "`");
        }
    }

    Network net;
    std::map<std::string, const ValueDomain*> external;
    std::vector<std::set<std::size_t>> succ(parts.size());
    std::vector<std::size_t> indegree(parts.size(), 0);
    for (std::size_t i = 0; i < parts.size(); ++i) {
        for (const auto& c : parts[i].channels) {
            if (c.direction != Direction::input)
                continue;
            auto it = producer.find(c.name);
            if (it == producer.end()) {
                auto [ext, fresh] = external.emplace(c.name, &c.domain);
                if (!fresh && !(*ext->second == c.domain))
                    throw Error(Code::domain_mismatch, "external input `" + c.name + "` is read with different domains");
                continue;
            }
            const Component& prod = parts[it->second];
            if (!(prod.find_channel(c.name)->domain == c.domain))
                throw Error(Code::domain_mismatch, "wire `" + c.name + "` from `" + prod.name + "` to `" + parts[i].name +
                                                       "` joins " + render_domain(prod.find_channel(c.name)->domain) +
                                                       " with " + render_domain(c.domain));
            if (it->second == i)
                throw Error(Code::cycle, "part `" + parts[i].name + "` reads its own output `" + c.name + "` in the same tick");
            net.wires_.push_back({it->second, i, c.name});
            if (succ[it->second].insert(i).second)
                ++indegree[i];
        }
    }
    for (const auto& h : hidden)
        if (!producer.count(h))
            throw Error(Code::bad_hide, "hidden channel `" + h + "` is not emitted by any part");

    std::set<std::size_t> ready;
    for (std::size_t i = 0; i < parts.size(); ++i)
        if (indegree[i] == 0)
            ready.insert(i);
    while (!ready.empty()) {
        std::size_t i = *ready.begin();
        ready.erase(ready.begin());
        net.order_.push_back(i);
        for (std::size_t j : succ[i])
            if (--indegree[j] == 0)
                ready.insert(j);
    }
    if (net.order_.size() != parts.size()) {
        std::string members;
        for (std::size_t i = 0; i < parts.size(); ++i)
            if (indegree[i] > 0)
                members += (members.empty() ? "" : ", ") + parts[i].name;
        throw Error(Code::cycle, "zero-delay wiring forms a cycle through " + members);
    }

    for (const auto& [name, domain] : external)
        net.interface_.inputs.add(name, *domain);
    for (const auto& [name, idx] : producer)
        if (!hidden.count(name))
            net.interface_.outputs.add(name, parts[idx].find_channel(name)->domain);
    net.parts_ = std::move(parts);
    net.hidden_ = std::move(hidden);
    return net;
}

// ---------------------------------------------------------------------------
// Determinism and totality

DeterminismReport check_deterministic_total(const Component& comp, const Bounds& bounds)
{
    check_horizon(bounds);
    auto cc = compile(comp);
    auto count = input_trace_count(cc.frames.inputs, bounds.horizon);
    if (!count || *count > bounds.budget)
        throw Error(Code::budget, "reachability check exceeds the budget of " + std::to_string(bounds.budget));
    const auto frames = all_frames(cc.frames.inputs);
    DeterminismReport report;
    std::set<Frame> level{cc.frames.initial_state};
    for (std::size_t t = 0; t < bounds.horizon; ++t) {
        std::set<Frame> next_level;
        for (const auto& s : level) {
            for (const auto& in : frames) {
                std::size_t n = 0;
                for_each_step(cc, s, in, [&](const Frame&, const Frame&, const Frame& next) {
                    ++n;
                    next_level.insert(next);
                });
                if (n == 0 && report.total) {
                    report.total = false;
                    report.nontotal = ConfigWitness{t, s, in, 0};
                }
                if (n > 1 && report.deterministic) {
                    report.deterministic = false;
                    report.nondeterministic = ConfigWitness{t, s, in, n};
                }
            }
        }
        level = std::move(next_level);
    }
    return report;
}

} // namespace refold

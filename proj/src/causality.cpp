#include "refold/causality.hpp"

#include <algorithm>
#include <array>
#include <set>
#include <sstream>

namespace refold {

std::string_view class_name(FormulaClass c)
{
    switch (c) {
    case FormulaClass::moore_output: return "MooreOutput";
    case FormulaClass::mealy_output: return "MealyOutput";
    case FormulaClass::transition: return "Transition";
    case FormulaClass::local_def: return "LocalDef";
    }
    return "?";
}

namespace {

// Locals whose value can depend on the current input, directly or through
// other locals.
std::set<std::string> input_locals(const Component& comp)
{
    std::vector<Footprint> fps;
    for (const auto& f : comp.formulas)
        fps.push_back(symbol_footprint(f, comp));
    std::set<std::string> out;
    for (bool grew = true; grew;) {
        grew = false;
        for (const auto& fp : fps) {
            bool tainted = !fp.reads_inputs.empty();
            for (const auto& l : fp.reads_locals)
                tainted = tainted || out.count(l);
            if (!tainted)
                continue;
            for (const auto& l : fp.targets_locals)
                grew = out.insert(l).second || grew;
        }
    }
    return out;
}

} // namespace

FormulaClass classify_formula(const Component& comp, const Formula& f)
{
    Footprint fp = symbol_footprint(f, comp);
    if (!fp.targets_outputs.empty() && !fp.targets_state.empty()) {
        std::string outs, states;
        for (const auto& o : fp.targets_outputs)
            outs += (outs.empty() ? "" : ", ") + o;
        for (const auto& s : fp.targets_state)
            states += (states.empty() ? "" : ", ") + s + "'";
        throw Error(Code::mixed_target,
                    "formula `" + f.label + "` targets output " + outs + " and next state " + states +
                        "; split it into one formula per kind with the same guard",
                    {Diagnostic{Code::mixed_target, "mixed targets", f.label, std::nullopt, f.span, std::nullopt}});
    }
    if (!fp.targets_outputs.empty()) {
        bool reads_input = !fp.reads_inputs.empty();
        if (!reads_input && !fp.reads_locals.empty()) {
            const auto tainted = input_locals(comp);
            for (const auto& l : fp.reads_locals)
                reads_input = reads_input || tainted.count(l);
        }
        return reads_input ? FormulaClass::mealy_output : FormulaClass::moore_output;
    }
    if (!fp.targets_state.empty())
        return FormulaClass::transition;
    return FormulaClass::local_def;
}

ClassificationReport classify_component(const Component& comp)
{
    require_valid(comp);
    ClassificationReport r;
    for (const auto& f : comp.formulas) {
        FormulaClass c = classify_formula(comp, f);
        r.rows.push_back({f.label, c, symbol_footprint(f, comp)});
        switch (c) {
        case FormulaClass::moore_output: r.moore.push_back(f.label); break;
        case FormulaClass::mealy_output: r.mealy.push_back(f.label); break;
        case FormulaClass::transition: r.transition.push_back(f.label); break;
        case FormulaClass::local_def: r.local_def.push_back(f.label); break;
        }
    }
    return r;
}

namespace {

std::string join(const std::vector<std::string>& items)
{
    if (items.empty())
        return "-";
    std::string out;
    for (const auto& s : items)
        out += (out.empty() ? "" : ",") + s;
    return out;
}

std::vector<std::string> reads_of(const Footprint& fp)
{
    std::vector<std::string> out(fp.reads_inputs.begin(), fp.reads_inputs.end());
    out.insert(out.end(), fp.reads_state.begin(), fp.reads_state.end());
    out.insert(out.end(), fp.reads_locals.begin(), fp.reads_locals.end());
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::string> targets_of(const Footprint& fp)
{
    std::vector<std::string> out(fp.targets_outputs.begin(), fp.targets_outputs.end());
    for (const auto& s : fp.targets_state)
        out.push_back(s + "'");
    out.insert(out.end(), fp.targets_locals.begin(), fp.targets_locals.end());
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace

std::string format_classification(const ClassificationReport& report)
{
    std::vector<std::array<std::string, 4>> rows{{"label", "class", "reads", "targets"}};
    for (const auto& r : report.rows)
        rows.push_back({r.label, std::string(class_name(r.cls)), join(reads_of(r.footprint)), join(targets_of(r.footprint))});
    std::array<std::size_t, 4> width{};
    for (const auto& r : rows)
        for (std::size_t i = 0; i < 4; ++i)
            width[i] = std::max(width[i], r[i].size());
    std::ostringstream os;
    for (const auto& r : rows) {
        std::string line;
        for (std::size_t i = 0; i < 4; ++i) {
            line += r[i];
            if (i < 3)
                line += std::string(width[i] - r[i].size() + 2, ' ');
        }
        while (!line.empty() && line.back() == ' ')
            line.pop_back();
        os << line << '\n';
    }
    return os.str();
}

namespace {

using FrameSet = std::set<Frame>;

// Traces sharing ticks < t + shift form contiguous blocks of F^(H - t - shift)
// in enumeration order. Within each block every trace must match the block's
// first trace.
CausalityVerdict check_causality(const Machine& m, const Bounds& bounds, CausalityKind kind)
{
    check_horizon(bounds);
    const std::size_t H = bounds.horizon;
    const std::size_t shift = kind == CausalityKind::weak ? 1 : 0;
    CausalityVerdict v;
    v.kind = kind;
    v.horizon = H;
    v.iface = m.interface();

    std::vector<std::uint64_t> block(H);
    for (std::size_t t = 0; t < H; ++t)
        block[t] = input_trace_count(m.interface().inputs, H - t - shift).value_or(1);

    std::vector<FrameSet> reference(H);
    std::vector<Trace> reference_input(H);
    std::vector<std::optional<CausalityWitness>> found(H);

    std::array<Machine, 1> machines{m};
    std::array<std::string, 1> labels{m.name()};
    v.traces_checked = explore(machines, labels, bounds, [&](std::uint64_t k, const Trace& input, std::span<const BehaviorSet> sets) {
        for (std::size_t t = 0; t < H; ++t) {
            FrameSet at;
            for (const auto& b : sets[0])
                at.insert(b.frames[t]);
            if (k % block[t] == 0) {
                reference[t] = std::move(at);
                reference_input[t] = input;
            } else if (!found[t] && at != reference[t]) {
                found[t] = CausalityWitness{reference_input[t], input, t};
            }
        }
        return !found[0];
    });
    for (std::size_t t = 0; t < H; ++t) {
        if (found[t]) {
            v.holds = false;
            v.witness = found[t];
            break;
        }
    }
    return v;
}

} // namespace

CausalityVerdict check_strong_causality(const Machine& m, const Bounds& bounds)
{
    return check_causality(m, bounds, CausalityKind::strong);
}

CausalityVerdict check_strong_causality(const Component& comp, const Bounds& bounds)
{
    return check_causality(Machine::of(comp), bounds, CausalityKind::strong);
}

CausalityVerdict check_weak_causality(const Machine& m, const Bounds& bounds)
{
    return check_causality(m, bounds, CausalityKind::weak);
}

CausalityVerdict check_weak_causality(const Component& comp, const Bounds& bounds)
{
    return check_causality(Machine::of(comp), bounds, CausalityKind::weak);
}

} // namespace refold

#include "refold/refinement.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <sstream>

namespace refold {

namespace {

void require_same_interface(const Machine& a, const Machine& b, const char* what)
{
    if (a.interface() == b.interface())
        return;
    throw Error(Code::iface_mismatch, std::string(what) + " needs identical interfaces:\n  " + a.name() + ": " +
                                          describe(a.interface()) + "\n  " + b.name() + ": " + describe(b.interface()));
}

} // namespace

RefinementVerdict refines(const Machine& concrete, const Machine& abstract, const Bounds& bounds)
{
    require_same_interface(concrete, abstract, "refinement");
    RefinementVerdict v;
    v.horizon = bounds.horizon;
    v.iface = concrete.interface();
    std::array<Machine, 2> machines{concrete, abstract};
    std::array<std::string, 2> labels{"concrete side " + concrete.name(), "abstract side " + abstract.name()};
    v.traces_checked = explore(machines, labels, bounds, [&](std::uint64_t, const Trace& input, std::span<const BehaviorSet> sets) {
        for (const auto& out : sets[0]) {
            if (!sets[1].count(out)) {
                v.holds = false;
                v.counterexample = Counterexample{input, out};
                return false;
            }
        }
        return true;
    });
    return v;
}

RefinementVerdict refines(const Component& concrete, const Component& abstract, const Bounds& bounds)
{
    return refines(Machine::of(concrete), Machine::of(abstract), bounds);
}

RefinementVerdict refines(const Network& concrete, const Component& abstract, const Bounds& bounds)
{
    return refines(Machine::of(concrete), Machine::of(abstract), bounds);
}

EquivalenceVerdict equivalent(const Machine& a, const Machine& b, const Bounds& bounds)
{
    require_same_interface(a, b, "equivalence");
    EquivalenceVerdict v;
    v.horizon = bounds.horizon;
    v.iface = a.interface();
    std::array<Machine, 2> machines{a, b};
    std::array<std::string, 2> labels{a.name(), b.name()};
    v.traces_checked = explore(machines, labels, bounds, [&](std::uint64_t, const Trace& input, std::span<const BehaviorSet> sets) {
        if (sets[0] == sets[1])
            return true;
        std::vector<Trace> only_a, only_b;
        std::set_difference(sets[0].begin(), sets[0].end(), sets[1].begin(), sets[1].end(), std::back_inserter(only_a));
        std::set_difference(sets[1].begin(), sets[1].end(), sets[0].begin(), sets[0].end(), std::back_inserter(only_b));
        v.holds = false;
        v.admitted_by_first = only_b.empty() || (!only_a.empty() && only_a.front() < only_b.front());
        v.counterexample = Counterexample{input, v.admitted_by_first ? only_a.front() : only_b.front()};
        return false;
    });
    return v;
}

EquivalenceVerdict equivalent(const Component& a, const Component& b, const Bounds& bounds)
{
    return equivalent(Machine::of(a), Machine::of(b), bounds);
}

std::string format_counterexample(const Interface& iface, const Counterexample& cx)
{
    std::string out = "input:\n";
    std::istringstream in(format_trace(iface.inputs, cx.input));
    std::string line;
    while (std::getline(in, line))
        out += "  " + line + "\n";
    out += "output:\n";
    std::istringstream outs(format_trace(iface.outputs, cx.output));
    while (std::getline(outs, line))
        out += "  " + line + "\n";
    return out;
}

// ---------------------------------------------------------------------------
// Groups

bool is_aux_channel(std::string_view name)
{
    return name.size() > 2 && name.substr(0, 2) == "__";
}

namespace {

std::set<std::string> aux_outputs(const std::vector<Component>& parts)
{
    std::set<std::string> out;
    for (const auto& p : parts)
        for (const auto& c : p.channels)
            if (c.direction == Direction::output && is_aux_channel(c.name))
                out.insert(c.name);
    return out;
}

// Parts are linked when they share a channel name, wired or external.
bool connected(const std::vector<Component>& parts)
{
    const std::size_t n = parts.size();
    std::vector<std::size_t> parent(n);
    for (std::size_t i = 0; i < n; ++i)
        parent[i] = i;
    auto find = [&](std::size_t x) {
        while (parent[x] != x)
            x = parent[x] = parent[parent[x]];
        return x;
    };
    std::map<std::string, std::size_t> first;
    for (std::size_t i = 0; i < n; ++i)
        for (const auto& c : parts[i].channels) {
            auto [it, fresh] = first.emplace(c.name, i);
            if (!fresh)
                parent[find(i)] = find(it->second);
        }
    for (std::size_t i = 1; i < n; ++i)
        if (find(i) != find(0))
            return false;
    return true;
}

} // namespace

Network layer_network(const SpecificationGroup& g, std::size_t j)
{
    if (j == 0)
        return Network::of(g.root);
    if (j > g.layers.size())
        throw Error(Code::bad_target, "group has no layer " + std::to_string(j));
    const auto& parts = g.layers[j - 1];
    return compose(parts, aux_outputs(parts));
}

std::vector<Diagnostic> validate_group_shape(const SpecificationGroup& g)
{
    std::vector<Diagnostic> out;
    const std::size_t m = g.layer_count();
    const std::size_t n = g.spec_count();
    if (n < m)
        out.push_back({Code::size, "group has " + std::to_string(n) + " specifications for " + std::to_string(m) + " layers"});
    const Interface root = interface_of(g.root);
    for (std::size_t j = 1; j <= m; ++j) {
        const auto& layer = g.layers[j - 1];
        std::string where = "layer " + std::to_string(j);
        if (layer.empty()) {
            out.push_back({Code::empty_layer, where + " has no specifications"});
            continue;
        }
        try {
            Network net = layer_network(g, j);
            if (j == 1 && layer.size() > 1 && !connected(layer))
                out.push_back({Code::layer1, "layer 1 must be a single refinement of the root; its " +
                                                 std::to_string(layer.size()) + " specifications are not linked by any channel"});
            if (!(net.interface() == root))
                out.push_back({Code::iface_mismatch, where + " composes to " + describe(net.interface()) +
                                                         ", root has " + describe(root)});
        } catch (const Error& e) {
            out.push_back({e.code(), where + ": " + e.what()});
        }
    }
    return out;
}

std::vector<LayerVerdict> verify_group(const SpecificationGroup& g, const Bounds& bounds)
{
    if (auto diags = validate_group_shape(g); !diags.empty())
        throw Error(diags.front().code, "group `" + g.name + "` is malformed", diags);
    std::vector<LayerVerdict> out;
    if (g.layer_count() == 0)
        return out;
    Machine below = Machine::of(g.root);
    for (std::size_t j = 1; j <= g.layer_count(); ++j) {
        Machine here = Machine::of(layer_network(g, j));
        out.push_back({j, refines(here, below, bounds)});
        below = here;
    }
    return out;
}

ExtendResult extend_spec(const SpecificationGroup& g, std::size_t layer, std::size_t index,
                         const std::vector<Formula>& delta, ExtendMode mode, const Bounds& bounds)
{
    if (layer > g.layer_count())
        throw Error(Code::bad_target, "group `" + g.name + "` has no layer " + std::to_string(layer));
    const std::size_t width = layer == 0 ? 1 : g.layers[layer - 1].size();
    if (index >= width)
        throw Error(Code::bad_target, "layer " + std::to_string(layer) + " has no specification " + std::to_string(index));
    if (delta.empty())
        throw Error(Code::bad_target, "delta has no formulas");

    Component target = layer == 0 ? g.root : g.layers[layer - 1][index];
    target.formulas.insert(target.formulas.end(), delta.begin(), delta.end());
    if (auto diags = validate_component(target); !diags.empty())
        throw Error(Code::bad_target, "delta does not fit `" + target.name + "`:\n" + format_diagnostics(diags), diags);

    ExtendResult r;
    r.group = g;
    std::size_t changed = layer;
    if (mode == ExtendMode::in_place) {
        (layer == 0 ? r.group.root : r.group.layers[layer - 1][index]) = std::move(target);
    } else {
        std::vector<Component> copy = layer == 0 ? std::vector<Component>{g.root} : g.layers[layer - 1];
        copy[index] = std::move(target);
        r.group.layers.insert(r.group.layers.begin() + static_cast<long>(layer), std::move(copy));
        changed = layer + 1;
    }
    if (auto diags = validate_group_shape(r.group); !diags.empty())
        throw Error(diags.front().code, "extended group is malformed", diags);

    for (std::size_t j : {changed, changed + 1}) {
        if (j == 0 || j > r.group.layer_count())
            continue;
        r.verdicts.push_back({j, refines(Machine::of(layer_network(r.group, j)),
                                         Machine::of(layer_network(r.group, j - 1)), bounds)});
    }
    return r;
}

namespace {

std::string dot_id(std::size_t layer, std::size_t i)
{
    return "\"L" + std::to_string(layer) + "_" + std::to_string(i) + "\"";
}

std::string dot_escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\')
            out += '\\';
        out += c;
    }
    return out;
}

} // namespace

std::string group_dot(const SpecificationGroup& g, const std::vector<LayerVerdict>& verdicts)
{
    std::ostringstream os;
    os << "digraph \"" << dot_escape(g.name) << "\" {\n";
    os << "  rankdir=BT;\n  compound=true;\n  node [shape=box];\n";
    os << "  " << dot_id(0, 0) << " [label=\"" << dot_escape(g.root.name) << "\\nlayer 0\"];\n";
    for (std::size_t j = 1; j <= g.layer_count(); ++j) {
        os << "  subgraph cluster_layer" << j << " {\n    label=\"layer " << j << "\";\n";
        for (std::size_t i = 0; i < g.layers[j - 1].size(); ++i)
            os << "    " << dot_id(j, i) << " [label=\"" << dot_escape(g.layers[j - 1][i].name) << "\"];\n";
        os << "  }\n";
    }
    for (std::size_t j = 1; j <= g.layer_count(); ++j) {
        std::string label = "refines";
        for (const auto& v : verdicts)
            if (v.layer == j)
                label = v.verdict.holds ? "holds H=" + std::to_string(v.verdict.horizon)
                                        : "fails H=" + std::to_string(v.verdict.horizon);
        os << "  " << dot_id(j, 0) << " -> " << dot_id(j - 1, 0) << " [label=\"" << label << "\"";
        if (g.layers[j - 1].size() > 1)
            os << ", ltail=cluster_layer" << j;
        if (j > 1 && g.layers[j - 2].size() > 1)
            os << ", lhead=cluster_layer" << (j - 1);
        os << "];\n";
    }
    os << "}\n";
    return os.str();
}

} // namespace refold

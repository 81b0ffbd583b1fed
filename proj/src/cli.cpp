#include "refold/cli.hpp"

#include "refold/causality.hpp"
#include "refold/decomposer.hpp"
#include "refold/parser.hpp"
#include "refold/refinement.hpp"
#include "refold/requirements.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <sstream>

namespace refold::cli {

namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

struct Ctx {
    std::string command;
    Bounds bounds;
    bool json = false;
    std::ostringstream text;
    Json doc = Json::object();
};

std::string plural(std::uint64_t n, const char* word)
{
    return std::to_string(n) + " " + word + (n == 1 ? "" : "s");
}

std::string verdict_line(bool holds, std::uint64_t traces)
{
    if (holds)
        return "HOLDS (" + plural(traces, "input trace") + ")";
    return "FAILS (" + plural(traces, "input trace") + " checked)";
}

std::string indent(const std::string& block, const std::string& pad)
{
    std::istringstream in(block);
    std::string line, out;
    while (std::getline(in, line))
        out += pad + line + "\n";
    return out;
}

std::string joined(const std::vector<std::string>& xs, const char* sep = ", ")
{
    std::string out;
    for (const auto& x : xs)
        out += (out.empty() ? "" : sep) + x;
    return out;
}

std::string joined(const std::set<std::string>& xs, const char* sep = ", ")
{
    return joined(std::vector<std::string>(xs.begin(), xs.end()), sep);
}

Json value_json(const ValueDomain& d, Value v)
{
    if (d.is_enum())
        return d.format(v);
    return v;
}

Json trace_json(const Signature& sig, const Trace& t)
{
    Json frames = Json::array();
    for (std::size_t k = 0; k < t.frames.size(); ++k) {
        Json f = Json::object();
        f["t"] = k;
        for (std::size_t i = 0; i < sig.size(); ++i)
            f[sig.names[i]] = value_json(sig.domains[i], t.frames[k][i]);
        frames.push_back(std::move(f));
    }
    return frames;
}

Json signature_json(const Signature& sig)
{
    Json out = Json::object();
    for (std::size_t i = 0; i < sig.size(); ++i)
        out[sig.names[i]] = render_domain(sig.domains[i]);
    return out;
}

Json interface_json(const Interface& iface)
{
    return {{"inputs", signature_json(iface.inputs)}, {"outputs", signature_json(iface.outputs)}};
}

Json diagnostic_json(const Diagnostic& d)
{
    Json j = {{"code", std::string(code_name(d.code))}, {"message", d.message}};
    if (!d.formula.empty())
        j["formula"] = d.formula;
    if (d.span)
        j["span"] = {{"file", d.span->file}, {"line", d.span->line}, {"column", d.span->column}};
    return j;
}

Json counterexample_json(const Interface& iface, const std::optional<Counterexample>& cx)
{
    if (!cx)
        return nullptr;
    return {{"input", trace_json(iface.inputs, cx->input)}, {"output", trace_json(iface.outputs, cx->output)}};
}

Json refinement_json(const RefinementVerdict& v)
{
    return {{"holds", v.holds},
            {"horizon", v.horizon},
            {"traces_checked", v.traces_checked},
            {"counterexample", counterexample_json(v.iface, v.counterexample)}};
}

std::string refinement_text(const RefinementVerdict& v)
{
    std::string out = verdict_line(v.holds, v.traces_checked) + "\n";
    if (v.counterexample)
        out += "counterexample:\n" + indent(format_counterexample(v.iface, *v.counterexample), "  ");
    return out;
}

std::string_view kind_name(CausalityKind k)
{
    return k == CausalityKind::strong ? "strong" : "weak";
}

Json causality_json(const CausalityVerdict& v)
{
    Json j = {{"kind", std::string(kind_name(v.kind))},
              {"holds", v.holds},
              {"horizon", v.horizon},
              {"traces_checked", v.traces_checked},
              {"witness", nullptr}};
    if (v.witness)
        j["witness"] = {{"tick", v.witness->tick},
                        {"first", trace_json(v.iface.inputs, v.witness->first)},
                        {"second", trace_json(v.iface.inputs, v.witness->second)}};
    return j;
}

std::string causality_text(const CausalityVerdict& v)
{
    std::string out = std::string(kind_name(v.kind)) + " causality: " + verdict_line(v.holds, v.traces_checked) + "\n";
    if (v.witness) {
        out += "  outputs at tick " + std::to_string(v.witness->tick) + " differ between\n";
        out += indent(format_trace(v.iface.inputs, v.witness->first), "    ");
        out += "  and\n";
        out += indent(format_trace(v.iface.inputs, v.witness->second), "    ");
    }
    return out;
}

Component load_spec(const std::string& path)
{
    auto r = load_component(path);
    if (!r)
        throw Error(r.diagnostics.front().code, "cannot load `" + path + "`:\n" + format_diagnostics(r.diagnostics),
                    r.diagnostics);
    return std::move(*r);
}

SpecificationGroup load_group_file(const std::string& path)
{
    auto r = parse_group_manifest(read_file(path), fs::path(path).parent_path(), path);
    if (!r)
        throw Error(r.diagnostics.front().code, "cannot load group `" + path + "`:\n" + format_diagnostics(r.diagnostics),
                    r.diagnostics);
    return std::move(*r);
}

bool is_group_path(const std::string& path)
{
    return fs::path(path).extension() == ".fgroup";
}

struct Side {
    Machine machine;
    Json info;
    std::string text;
};

// A `.fgroup` stands for the composition of its top layer.
Side load_side(const std::string& path)
{
    if (!is_group_path(path)) {
        Component c = load_spec(path);
        return {Machine::of(c), {{"file", path}, {"component", c.name}}, c.name};
    }
    SpecificationGroup g = load_group_file(path);
    const std::size_t top = g.layer_count();
    std::vector<std::string> names;
    for (const auto& c : top == 0 ? std::vector<Component>{g.root} : g.layers[top - 1])
        names.push_back(c.name);
    return {Machine::of(layer_network(g, top)),
            {{"file", path}, {"group", g.name}, {"layer", top}, {"components", names}},
            "group " + g.name + ", layer " + std::to_string(top) + " (" + joined(names) + ")"};
}

std::string domain_list(const Component& c, Direction dir)
{
    std::vector<std::string> xs;
    for (const auto& ch : c.channels)
        if (ch.direction == dir)
            xs.push_back(ch.name + " : " + render_domain(ch.domain));
    return xs.empty() ? "none" : joined(xs);
}

std::string var_list(const Component& c, VarKind kind)
{
    std::vector<std::string> xs;
    for (const auto& v : c.vars) {
        if (v.kind != kind)
            continue;
        std::string s = v.name + " : " + render_domain(v.domain);
        if (v.init)
            s += " init " + render_literal(*v.init);
        xs.push_back(s);
    }
    return xs.empty() ? "none" : joined(xs);
}

std::string frame_text(const Signature& sig, const Frame& f)
{
    std::vector<std::string> xs;
    for (std::size_t i = 0; i < sig.size(); ++i)
        xs.push_back(sig.names[i] + "=" + sig.domains[i].format(f[i]));
    return xs.empty() ? "-" : joined(xs, " ");
}

// ---------------------------------------------------------------------------
// Commands

int cmd_check(Ctx& ctx, const std::string& file)
{
    Component c = load_spec(file);
    auto& t = ctx.text;
    t << (c.requirement ? "requirement " : "component ") << c.name << ": valid\n";
    t << "  inputs: " << domain_list(c, Direction::input) << "\n";
    t << "  outputs: " << domain_list(c, Direction::output) << "\n";
    t << "  state: " << var_list(c, VarKind::state) << "\n";
    t << "  locals: " << var_list(c, VarKind::local) << "\n";
    t << "  formulas: " << c.formulas.size() << "\n";

    const ComponentFrames fr = frames_of(c);
    DeterminismReport d = check_deterministic_total(c, ctx.bounds);
    const std::string up_to = " (reachable configurations up to H=" + std::to_string(ctx.bounds.horizon) + ")";
    t << "deterministic: " << (d.deterministic ? "yes" : "no") << up_to << "\n";
    if (d.nondeterministic)
        t << "  tick " << d.nondeterministic->tick << " state " << frame_text(fr.state, d.nondeterministic->state)
          << " input " << frame_text(fr.inputs, d.nondeterministic->input) << ": "
          << plural(d.nondeterministic->successors, "successor") << "\n";
    t << "total: " << (d.total ? "yes" : "no") << up_to << "\n";
    if (d.nontotal)
        t << "  tick " << d.nontotal->tick << " state " << frame_text(fr.state, d.nontotal->state) << " input "
          << frame_text(fr.inputs, d.nontotal->input) << ": no successor\n";

    auto witness = [&](const std::optional<ConfigWitness>& w) -> Json {
        if (!w)
            return nullptr;
        Json state = Json::object(), input = Json::object();
        for (std::size_t i = 0; i < fr.state.size(); ++i)
            state[fr.state.names[i]] = value_json(fr.state.domains[i], w->state[i]);
        for (std::size_t i = 0; i < fr.inputs.size(); ++i)
            input[fr.inputs.names[i]] = value_json(fr.inputs.domains[i], w->input[i]);
        return {{"tick", w->tick}, {"state", state}, {"input", input}, {"successors", w->successors}};
    };
    ctx.doc["file"] = file;
    ctx.doc["component"] = c.name;
    ctx.doc["requirement"] = c.requirement;
    ctx.doc["valid"] = true;
    ctx.doc["interface"] = interface_json(interface_of(c));
    ctx.doc["formulas"] = c.formulas.size();
    ctx.doc["deterministic"] = d.deterministic;
    ctx.doc["total"] = d.total;
    ctx.doc["nondeterministic_at"] = witness(d.nondeterministic);
    ctx.doc["nontotal_at"] = witness(d.nontotal);
    return exit_ok;
}

std::string advisory_text(const std::vector<std::string>& candidates)
{
    return "advisory: locals with expressions of 7 or more nodes: " +
           (candidates.empty() ? std::string("none") : joined(candidates)) + "\n";
}

int cmd_classify(Ctx& ctx, const std::string& file)
{
    Component c = load_spec(file);
    ClassificationReport r = classify_component(c);
    auto candidates = extraction_candidates(c);
    auto& t = ctx.text;
    t << "component " << c.name << "\n";
    t << format_classification(r);
    t << "moore: " << r.moore.size() << ", mealy: " << r.mealy.size() << ", transition: " << r.transition.size()
      << ", local: " << r.local_def.size() << "\n";
    t << advisory_text(candidates);

    Json rows = Json::array();
    for (const auto& row : r.rows) {
        const Footprint& fp = row.footprint;
        std::set<std::string> reads = fp.reads_inputs;
        reads.insert(fp.reads_state.begin(), fp.reads_state.end());
        reads.insert(fp.reads_locals.begin(), fp.reads_locals.end());
        std::vector<std::string> targets(fp.targets_outputs.begin(), fp.targets_outputs.end());
        for (const auto& s : fp.targets_state)
            targets.push_back(s + "'");
        targets.insert(targets.end(), fp.targets_locals.begin(), fp.targets_locals.end());
        rows.push_back({{"label", row.label},
                        {"class", std::string(class_name(row.cls))},
                        {"reads", std::vector<std::string>(reads.begin(), reads.end())},
                        {"targets", targets}});
    }
    ctx.doc["file"] = file;
    ctx.doc["component"] = c.name;
    ctx.doc["rows"] = rows;
    ctx.doc["moore"] = r.moore;
    ctx.doc["mealy"] = r.mealy;
    ctx.doc["transition"] = r.transition;
    ctx.doc["local_def"] = r.local_def;
    ctx.doc["extraction_candidates"] = candidates;
    return exit_ok;
}

int cmd_causality(Ctx& ctx, const std::string& file, bool strong, bool weak)
{
    if (!strong && !weak)
        strong = weak = true;
    Side side = load_side(file);
    ctx.text << "subject: " << side.text << "\n";
    ctx.doc["subject"] = side.info;
    Json verdicts = Json::array();
    bool holds = true;
    auto report = [&](const CausalityVerdict& v) {
        ctx.text << causality_text(v);
        verdicts.push_back(causality_json(v));
        holds = holds && v.holds;
    };
    if (strong)
        report(check_strong_causality(side.machine, ctx.bounds));
    if (weak)
        report(check_weak_causality(side.machine, ctx.bounds));
    ctx.doc["holds"] = holds;
    ctx.doc["verdicts"] = verdicts;
    return holds ? exit_ok : exit_failed;
}

int cmd_decompose(Ctx& ctx, const std::string& file, const std::string& schema, const std::vector<std::string>& select,
                  const std::string& out_dir, bool verify)
{
    Component c = load_spec(file);
    const std::set<std::string> selection(select.begin(), select.end());
    if (schema == "mealy-moore" && !selection.empty())
        throw Error(Code::usage, "--select does not apply to the mealy-moore schema");
    DecompositionResult r = schema == "mealy-moore" ? split_mealy_moore(c)
                            : schema == "locals"    ? extract_locals(c, selection)
                                                    : extract_outputs(c, selection);
    auto& t = ctx.text;
    t << "component " << c.name << ", schema " << schema << "\n";
    t << "parts:\n";
    Json parts = Json::array();
    for (const auto& p : r.parts) {
        t << "  " << p.name << " (" << plural(p.formulas.size(), "formula") << ")\n";
        parts.push_back({{"name", p.name}, {"formulas", p.formulas.size()}, {"interface", interface_json(interface_of(p))}});
    }
    t << "aux channels: " << (r.aux_channels.empty() ? "none" : joined(r.aux_channels)) << "\n";
    t << "provenance:\n";
    Json prov = Json::object();
    for (const auto& f : c.formulas) {
        auto it = r.provenance.find(f.label);
        if (it == r.provenance.end())
            continue;
        t << "  " << f.label << " -> " << it->second << "\n";
        prov[f.label] = it->second;
    }
    ctx.doc["file"] = file;
    ctx.doc["component"] = c.name;
    ctx.doc["schema"] = schema;
    ctx.doc["parts"] = parts;
    ctx.doc["aux_channels"] = std::vector<std::string>(r.aux_channels.begin(), r.aux_channels.end());
    ctx.doc["provenance"] = prov;
    if (schema == "locals") {
        auto candidates = extraction_candidates(c);
        t << advisory_text(candidates);
        ctx.doc["extraction_candidates"] = candidates;
    }

    Json written = Json::array();
    if (!out_dir.empty()) {
        t << "written:\n";
        for (const auto& p : write_decomposition(c, r, out_dir)) {
            t << "  " << p.generic_string() << "\n";
            written.push_back(p.generic_string());
        }
    }
    ctx.doc["written"] = written;

    if (!verify) {
        ctx.doc["verification"] = nullptr;
        return exit_ok;
    }
    EquivalenceVerdict eq = verify_decomposition(c, r, ctx.bounds);
    t << "equivalence: " << verdict_line(eq.holds, eq.traces_checked) << "\n";
    if (eq.counterexample) {
        t << "  output admitted only by " << (eq.admitted_by_first ? "the original" : "the network") << ":\n";
        t << indent(format_counterexample(eq.iface, *eq.counterexample), "    ");
    }
    Machine before = Machine::of(c);
    Machine after = Machine::of(r.network);
    Json causality = Json::array();
    t << "causality (original -> network):\n";
    for (auto kind : {CausalityKind::strong, CausalityKind::weak}) {
        auto check = [&](const Machine& m) {
            return kind == CausalityKind::strong ? check_strong_causality(m, ctx.bounds) : check_weak_causality(m, ctx.bounds);
        };
        CausalityVerdict b = check(before), a = check(after);
        t << "  " << kind_name(kind) << ": " << (b.holds ? "holds" : "fails") << " -> " << (a.holds ? "holds" : "fails")
          << "\n";
        causality.push_back({{"kind", std::string(kind_name(kind))}, {"original", b.holds}, {"network", a.holds}});
    }
    ctx.doc["verification"] = {{"equivalent", eq.holds},
                               {"horizon", eq.horizon},
                               {"traces_checked", eq.traces_checked},
                               {"counterexample", counterexample_json(eq.iface, eq.counterexample)},
                               {"admitted_by", eq.counterexample ? Json(eq.admitted_by_first ? "original" : "network")
                                                                 : Json(nullptr)},
                               {"causality", causality}};
    return eq.holds ? exit_ok : exit_failed;
}

int cmd_refines(Ctx& ctx, const std::string& concrete, const std::string& abstract)
{
    Side c = load_side(concrete);
    Side a = load_side(abstract);
    RefinementVerdict v = refines(c.machine, a.machine, ctx.bounds);
    ctx.text << "concrete: " << c.text << "\n";
    ctx.text << "abstract: " << a.text << "\n";
    ctx.text << refinement_text(v);
    ctx.doc["concrete"] = c.info;
    ctx.doc["abstract"] = a.info;
    ctx.doc["verdict"] = refinement_json(v);
    return v.holds ? exit_ok : exit_failed;
}

int cmd_simulate(Ctx& ctx, const std::string& file, const std::string& inputs)
{
    Side side = load_side(file);
    const Interface& iface = side.machine.interface();
    auto tr = parse_trace(read_file(inputs), iface.inputs, inputs);
    if (!tr)
        throw Error(tr.diagnostics.front().code, "cannot read input trace `" + inputs + "`:\n" +
                                                     format_diagnostics(tr.diagnostics),
                    tr.diagnostics);
    ctx.bounds.horizon = tr->horizon();
    BehaviorSet set = machine_behaviors(side.machine, *tr, ctx.bounds);
    auto& t = ctx.text;
    t << "subject: " << side.text << "\n";
    t << "input:\n" << indent(format_trace(iface.inputs, *tr), "  ");
    t << plural(set.size(), "behavior") << "\n";
    Json behaviors = Json::array();
    std::size_t n = 0;
    for (const auto& b : set) {
        t << "behavior " << ++n << ":\n" << indent(format_trace(iface.outputs, b), "  ");
        behaviors.push_back(trace_json(iface.outputs, b));
    }
    ctx.doc["subject"] = side.info;
    ctx.doc["input"] = trace_json(iface.inputs, *tr);
    ctx.doc["behaviors"] = behaviors;
    return exit_ok;
}

Json layer_verdicts_json(const std::vector<LayerVerdict>& vs)
{
    Json out = Json::array();
    for (const auto& v : vs) {
        Json j = refinement_json(v.verdict);
        j["layer"] = v.layer;
        j["refines_layer"] = v.layer - 1;
        out.push_back(std::move(j));
    }
    return out;
}

std::string layer_verdicts_text(const std::vector<LayerVerdict>& vs)
{
    std::string out;
    for (const auto& v : vs) {
        out += "layer " + std::to_string(v.layer) + ": " + (v.verdict.holds ? "HOLDS" : "FAILS") +
               " (traces checked: " + std::to_string(v.verdict.traces_checked) +
               ", H=" + std::to_string(v.verdict.horizon) + ")\n";
        if (v.verdict.counterexample)
            out += indent("counterexample:\n" + format_counterexample(v.verdict.iface, *v.verdict.counterexample), "  ");
    }
    return out;
}

bool all_hold(const std::vector<LayerVerdict>& vs)
{
    return std::all_of(vs.begin(), vs.end(), [](const LayerVerdict& v) { return v.verdict.holds; });
}

std::string shape_text(const SpecificationGroup& g)
{
    return "m=" + std::to_string(g.layer_count()) + " N=" + std::to_string(g.spec_count());
}

int cmd_group_verify(Ctx& ctx, const std::string& manifest)
{
    SpecificationGroup g = load_group_file(manifest);
    auto vs = verify_group(g, ctx.bounds);
    ctx.text << "group " << g.name << ": " << shape_text(g) << "\n";
    ctx.text << layer_verdicts_text(vs);
    if (vs.empty())
        ctx.text << "no refinement layers\n";
    const bool holds = all_hold(vs);
    ctx.text << (holds ? "HOLDS" : "FAILS") << "\n";
    ctx.doc["group"] = g.name;
    ctx.doc["m"] = g.layer_count();
    ctx.doc["n"] = g.spec_count();
    ctx.doc["holds"] = holds;
    ctx.doc["layers"] = layer_verdicts_json(vs);
    return holds ? exit_ok : exit_failed;
}

// File names for a group written from memory: `<name>.fspec`, suffixed with
// the layer when a name repeats.
std::vector<fs::path> write_group(const SpecificationGroup& g, const fs::path& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw Error(Code::io, "cannot create `" + dir.string() + "`: " + ec.message());
    std::set<std::string> used;
    auto file_for = [&](const Component& c, std::size_t layer) {
        std::string f = c.name + ".fspec";
        for (std::size_t k = 0; used.count(f); ++k)
            f = c.name + "_L" + std::to_string(layer) + (k ? "_" + std::to_string(k + 1) : "") + ".fspec";
        used.insert(f);
        return f;
    };
    std::vector<fs::path> written;
    GroupManifest m;
    m.name = g.name;
    m.root = file_for(g.root, 0);
    write_file(dir / m.root, render_component(g.root));
    written.push_back(dir / m.root);
    for (std::size_t j = 0; j < g.layers.size(); ++j) {
        m.layers.emplace_back();
        for (const auto& c : g.layers[j]) {
            std::string f = file_for(c, j + 1);
            write_file(dir / f, render_component(c));
            written.push_back(dir / f);
            m.layers.back().push_back(f);
        }
    }
    fs::path group = dir / (g.name + ".fgroup");
    write_file(group, render_manifest(m));
    written.push_back(group);
    return written;
}

int cmd_group_extend(Ctx& ctx, const std::string& manifest, const std::string& mode_name, const std::string& delta_file,
                     std::size_t layer, std::size_t index, const std::string& out_dir)
{
    SpecificationGroup g = load_group_file(manifest);
    if (layer > g.layer_count())
        throw Error(Code::bad_target, "group `" + g.name + "` has no layer " + std::to_string(layer));
    const auto& row = layer == 0 ? std::vector<Component>{g.root} : g.layers[layer - 1];
    if (index >= row.size())
        throw Error(Code::bad_target, "layer " + std::to_string(layer) + " has no specification " + std::to_string(index));
    const Component& target = row[index];
    auto delta = parse_formulas(read_file(delta_file), target, delta_file);
    if (!delta)
        throw Error(Code::bad_target, "delta `" + delta_file + "` does not fit `" + target.name + "`:\n" +
                                          format_diagnostics(delta.diagnostics),
                    delta.diagnostics);
    const ExtendMode mode = mode_name == "in-place" ? ExtendMode::in_place : ExtendMode::new_layer;
    ExtendResult r = extend_spec(g, layer, index, *delta, mode, ctx.bounds);

    auto& t = ctx.text;
    t << "group " << g.name << ": extend " << target.name << " (layer " << layer << ", index " << index << ") "
      << mode_name << " with " << plural(delta->size(), "formula") << "\n";
    t << "before: " << shape_text(g) << "\n";
    t << "after: " << shape_text(r.group) << "\n";
    t << layer_verdicts_text(r.verdicts);
    Json written = Json::array();
    if (!out_dir.empty()) {
        t << "written:\n";
        for (const auto& p : write_group(r.group, out_dir)) {
            t << "  " << p.generic_string() << "\n";
            written.push_back(p.generic_string());
        }
    }
    const bool holds = all_hold(r.verdicts);
    t << (holds ? "HOLDS" : "FAILS") << "\n";
    ctx.doc["group"] = g.name;
    ctx.doc["mode"] = mode_name;
    ctx.doc["target"] = {{"layer", layer}, {"index", index}, {"component", target.name}};
    ctx.doc["delta"] = delta->size();
    ctx.doc["before"] = {{"m", g.layer_count()}, {"n", g.spec_count()}};
    ctx.doc["after"] = {{"m", r.group.layer_count()}, {"n", r.group.spec_count()}};
    ctx.doc["holds"] = holds;
    ctx.doc["layers"] = layer_verdicts_json(r.verdicts);
    ctx.doc["written"] = written;
    return holds ? exit_ok : exit_failed;
}

int cmd_group_dot(Ctx& ctx, const std::string& manifest, bool verify)
{
    SpecificationGroup g = load_group_file(manifest);
    std::vector<LayerVerdict> vs;
    if (verify)
        vs = verify_group(g, ctx.bounds);
    const std::string dot = group_dot(g, vs);
    ctx.text << dot;
    ctx.doc["group"] = g.name;
    ctx.doc["dot"] = dot;
    ctx.doc["layers"] = layer_verdicts_json(vs);
    return all_hold(vs) ? exit_ok : exit_failed;
}

int cmd_req_add(Ctx& ctx, const std::string& dir, const std::string& file, std::string id)
{
    Component spec = load_spec(file);
    if (id.empty())
        id = spec.name;
    if (!is_identifier(id))
        throw Error(Code::usage, "`" + id + "` is not a valid requirement id");
    RequirementLedger ledger = load_ledger(dir);
    AddResult r = add_requirement(ledger, Requirement{id, std::move(spec)}, ctx.bounds);
    const InsertionOutcome& oc = r.outcome;

    auto& t = ctx.text;
    t << "requirement " << id << ": " << outcome_name(oc.kind) << " (level " << oc.level << ")\n";
    if (oc.witness)
        t << "  implied by " << *oc.witness << " (level 0)\n";
    if (!oc.displaced.empty())
        t << "  displaced to level 1: " << joined(oc.displaced) << "\n";
    if (oc.duplicate_of)
        t << "  equivalent to " << *oc.duplicate_of << "; ledger unchanged\n";
    for (const auto& n : oc.notes)
        t << "  note: " << n << "\n";
    bool sound = true;
    Json soundness = Json::array();
    for (const auto& s : oc.soundness) {
        t << "level " << s.level << " => level " << s.level + 1 << ": " << refinement_text(s.verdict);
        sound = sound && s.verdict.holds;
        Json j = refinement_json(s.verdict);
        j["level"] = s.level;
        soundness.push_back(std::move(j));
    }

    Json touched = Json::array();
    if (oc.kind != OutcomeKind::duplicate) {
        save_ledger(r.ledger, dir);
        t << "touched:\n";
        auto touch = [&](const fs::path& p) {
            t << "  " << p.generic_string() << "\n";
            touched.push_back(p.generic_string());
        };
        for (std::size_t k : oc.touched_levels)
            for (const auto& req : r.ledger.levels[k])
                touch(fs::path(dir) / ("level" + std::to_string(k)) / (req.id + ".fspec"));
        touch(fs::path(dir) / "index");
    }
    t << "levels:\n";
    Json levels = Json::array();
    for (std::size_t k = 0; k < r.ledger.levels.size(); ++k) {
        std::vector<std::string> ids;
        for (const auto& req : r.ledger.levels[k])
            ids.push_back(req.id);
        t << "  " << k << ": " << (ids.empty() ? "-" : joined(ids)) << "\n";
        levels.push_back(ids);
    }

    ctx.doc["id"] = id;
    ctx.doc["outcome"] = std::string(outcome_name(oc.kind));
    ctx.doc["level"] = oc.level;
    ctx.doc["witness"] = oc.witness ? Json(*oc.witness) : Json(nullptr);
    ctx.doc["displaced"] = oc.displaced;
    ctx.doc["duplicate_of"] = oc.duplicate_of ? Json(*oc.duplicate_of) : Json(nullptr);
    ctx.doc["notes"] = oc.notes;
    ctx.doc["soundness"] = soundness;
    ctx.doc["touched"] = touched;
    ctx.doc["levels"] = levels;
    return sound ? exit_ok : exit_failed;
}

int cmd_req_check(Ctx& ctx, const std::string& dir, const std::string& system)
{
    RequirementLedger ledger = load_ledger(dir);
    Component sys = load_spec(system);
    SystemCheck sc = check_system(sys, ledger, ctx.bounds);
    auto& t = ctx.text;
    t << "system " << sys.name << " against level 0 of " << dir << "\n";
    if (sc.verdicts.empty())
        t << "0 requirements; holds vacuously\n";
    Json verdicts = Json::array();
    for (const auto& v : sc.verdicts) {
        t << v.id << ": " << refinement_text(v.verdict);
        Json j = {{"id", v.id}};
        j.update(refinement_json(v.verdict));
        verdicts.push_back(std::move(j));
    }
    t << (sc.holds ? "HOLDS" : "FAILS") << "\n";
    ctx.doc["system"] = sys.name;
    ctx.doc["requirements"] = sc.verdicts.size();
    ctx.doc["holds"] = sc.holds;
    ctx.doc["verdicts"] = verdicts;
    return sc.holds ? exit_ok : exit_failed;
}

// ---------------------------------------------------------------------------

int exit_for(Code c)
{
    switch (c) {
    case Code::budget: return exit_budget;
    case Code::inconsistent: return exit_inconsistent;
    default: return exit_usage;
    }
}

std::uint64_t default_budget()
{
    const char* env = std::getenv("REFOLD_BUDGET");
    if (!env || !*env)
        return Bounds{}.budget;
    std::uint64_t v = 0;
    const char* end = env + std::char_traits<char>::length(env);
    auto [p, ec] = std::from_chars(env, end, v);
    if (ec != std::errc() || p != end || v == 0)
        throw Error(Code::usage, std::string("REFOLD_BUDGET must be a positive integer, got `") + env + "`");
    return v;
}

bool wants_json(const std::vector<std::string>& args)
{
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--format=json")
            return true;
        if (args[i] == "--format" && i + 1 < args.size() && args[i + 1] == "json")
            return true;
    }
    return false;
}

std::string header(const Ctx& ctx)
{
    return "refold " + ctx.command + " (horizon " + std::to_string(ctx.bounds.horizon) + ", budget " +
           std::to_string(ctx.bounds.budget) + ")\n";
}

void emit(const Ctx& ctx, std::ostream& out)
{
    if (ctx.json) {
        Json report = {{"command", ctx.command}, {"horizon", ctx.bounds.horizon}, {"budget", ctx.bounds.budget}};
        for (const auto& [k, v] : ctx.doc.items())
            report[k] = v;
        out << report.dump(2) << "\n";
        return;
    }
    // DOT stays renderable: the header becomes a comment.
    out << (ctx.command == "group dot" ? "// " : "") << header(ctx) << ctx.text.str();
}

void emit_error(const Ctx& ctx, const std::string& code, std::string message, const std::vector<Diagnostic>& diags,
                std::ostream& out, std::ostream& err)
{
    if (message.rfind(code + ": ", 0) == 0)
        message.erase(0, code.size() + 2);
    if (ctx.json) {
        Json d = Json::array();
        for (const auto& x : diags)
            d.push_back(diagnostic_json(x));
        Json report = {{"command", ctx.command},
                       {"horizon", ctx.bounds.horizon},
                       {"budget", ctx.bounds.budget},
                       {"error", {{"code", code}, {"message", message}, {"diagnostics", d}}}};
        out << report.dump(2) << "\n";
        return;
    }
    err << "error: " << code << ": " << message << "\n";
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    Ctx ctx;
    ctx.json = wants_json(args);

    CLI::App app{"Bounded checks for stream-based component specifications", "refold"};
    app.fallthrough();
    app.require_subcommand(1);
    std::string format = "text";
    std::uint64_t budget = 0;
    std::string seed;
    std::size_t horizon = Bounds{}.horizon;
    app.add_option("--format", format, "report format")->check(CLI::IsMember({"text", "json"}));
    auto* budget_opt = app.add_option("--budget", budget, "input traces per exhaustive check");
    app.add_option("--seed", seed, "accepted and ignored; every check is deterministic");
    app.add_option("--horizon", horizon, "trace length (ticks)");

    std::string file, file2, schema, out_dir, inputs, mode, delta, id;
    std::vector<std::string> select;
    bool strong = false, weak = false, verify = false;
    std::size_t layer = 0, index = 0;

    auto* check = app.add_subcommand("check", "validate a component");
    check->add_option("FILE", file)->required();
    auto* classify = app.add_subcommand("classify", "classify formulas");
    classify->add_option("FILE", file)->required();
    auto* causality = app.add_subcommand("causality", "bounded causality checks");
    causality->add_option("FILE", file)->required();
    causality->add_flag("--strong", strong);
    causality->add_flag("--weak", weak);
    auto* decompose = app.add_subcommand("decompose", "apply a decomposition schema");
    decompose->add_option("FILE", file)->required();
    decompose->add_option("--schema", schema)->required()->check(CLI::IsMember({"mealy-moore", "locals", "outputs"}));
    decompose->add_option("--select", select)->delimiter(',');
    decompose->add_option("--out", out_dir, "directory for the part files and manifest");
    decompose->add_flag("--verify", verify, "check network equivalence and causality");
    auto* refines_cmd = app.add_subcommand("refines", "bounded refinement check");
    refines_cmd->add_option("CONCRETE", file)->required();
    refines_cmd->add_option("ABSTRACT", file2)->required();
    auto* simulate = app.add_subcommand("simulate", "behaviors for one input trace");
    simulate->add_option("FILE", file)->required();
    simulate->add_option("--inputs", inputs)->required();

    auto* group = app.add_subcommand("group", "specification groups");
    group->require_subcommand(1);
    auto* gverify = group->add_subcommand("verify", "check every refinement layer");
    gverify->add_option("MANIFEST", file)->required();
    auto* gextend = group->add_subcommand("extend", "add formulas to one specification");
    gextend->add_option("MANIFEST", file)->required();
    gextend->add_option("--mode", mode)->required()->check(CLI::IsMember({"in-place", "new-layer"}));
    gextend->add_option("--delta", delta)->required();
    gextend->add_option("--layer", layer, "0 is the root");
    gextend->add_option("--index", index);
    gextend->add_option("--out", out_dir, "directory for the extended group");
    auto* gdot = group->add_subcommand("dot", "Graphviz rendering");
    gdot->add_option("MANIFEST", file)->required();
    gdot->add_flag("--verify", verify, "label edges with verdicts");

    auto* req = app.add_subcommand("req", "requirement ledger");
    req->require_subcommand(1);
    auto* radd = req->add_subcommand("add", "insert a requirement");
    radd->add_option("LEDGER", file)->required();
    radd->add_option("FILE", file2)->required();
    radd->add_option("--id", id, "defaults to the component name");
    auto* rcheck = req->add_subcommand("check", "system against level 0");
    rcheck->add_option("LEDGER", file)->required();
    rcheck->add_option("SYSTEM", file2)->required();

    try {
        ctx.bounds.budget = default_budget();
    } catch (const Error& e) {
        emit_error(ctx, std::string(code_name(e.code())), e.what(), e.details(), out, err);
        return exit_usage;
    }

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        for (const auto* sub : app.get_subcommands())
            ctx.command = sub->get_name();
        emit_error(ctx, std::string(code_name(Code::usage)), e.what(), {}, out, err);
        return exit_usage;
    }

    ctx.bounds.horizon = horizon;
    if (budget_opt->count())
        ctx.bounds.budget = budget;
    for (const auto* sub : app.get_subcommands()) {
        ctx.command = sub->get_name();
        for (const auto* leaf : sub->get_subcommands())
            ctx.command += " " + leaf->get_name();
    }

    try {
        if (ctx.bounds.budget == 0)
            throw Error(Code::usage, "--budget must be positive");
        if (!simulate->parsed())
            check_horizon(ctx.bounds);
        int code = exit_ok;
        if (check->parsed())
            code = cmd_check(ctx, file);
        else if (classify->parsed())
            code = cmd_classify(ctx, file);
        else if (causality->parsed())
            code = cmd_causality(ctx, file, strong, weak);
        else if (decompose->parsed())
            code = cmd_decompose(ctx, file, schema, select, out_dir, verify);
        else if (refines_cmd->parsed())
            code = cmd_refines(ctx, file, file2);
        else if (simulate->parsed())
            code = cmd_simulate(ctx, file, inputs);
        else if (gverify->parsed())
            code = cmd_group_verify(ctx, file);
        else if (gextend->parsed())
            code = cmd_group_extend(ctx, file, mode, delta, layer, index, out_dir);
        else if (gdot->parsed())
            code = cmd_group_dot(ctx, file, verify);
        else if (radd->parsed())
            code = cmd_req_add(ctx, file, file2, id);
        else if (rcheck->parsed())
            code = cmd_req_check(ctx, file, file2);
        emit(ctx, out);
        return code;
    } catch (const Error& e) {
        emit_error(ctx, std::string(code_name(e.code())), e.what(), e.details(), out, err);
        return exit_for(e.code());
    } catch (const fs::filesystem_error& e) {
        emit_error(ctx, std::string(code_name(Code::io)), e.what(), {}, out, err);
        return exit_usage;
    }
}

} // namespace refold::cli

#include "refold/decomposer.hpp"

#include "refold/causality.hpp"
#include "refold/parser.hpp"

#include <algorithm>
#include <functional>

namespace refold {

std::string fresh_name(const std::string& base, const std::set<std::string>& taken)
{
    if (!taken.count(base))
        return base;
    for (int i = 2;; ++i) {
        std::string candidate = base + "_" + std::to_string(i);
        if (!taken.count(candidate))
            return candidate;
    }
}

namespace {

using Renames = std::map<std::string, std::string>;

std::set<std::string> taken_names(const Component& comp, const DecomposeOptions& opts)
{
    std::set<std::string> taken = comp.symbol_names();
    for (const auto& f : comp.formulas)
        taken.insert(f.label);
    taken.insert(opts.reserved.begin(), opts.reserved.end());
    return taken;
}

std::string part_name(const Component& comp, const std::string& suffix, const DecomposeOptions& opts)
{
    std::set<std::string> taken = opts.reserved;
    taken.insert(comp.name);
    return fresh_name(comp.name + suffix, taken);
}

Component generated_part(std::string name)
{
    Component c;
    c.name = std::move(name);
    c.generated = true;
    return c;
}

Formula renamed(const Formula& f, const Renames& renames)
{
    Formula out = f;
    out.span.reset();
    out.guard = rename_reads(f.guard, renames);
    for (auto& a : out.atoms)
        if (a.kind == Atom::Kind::equals)
            a.value = rename_reads(a.value, renames);
    return out;
}

Formula emit(const std::string& channel, const std::string& source)
{
    Formula f;
    f.label = channel;
    f.guard = ex::boolean(true);
    f.atoms.push_back(Atom::equals(channel, ex::read(source)));
    return f;
}

ChannelDecl channel(const std::string& name, Direction dir, const ValueDomain& domain)
{
    return ChannelDecl{name, dir, domain, std::nullopt};
}

ChannelDecl copy_channel(const ChannelDecl& c)
{
    ChannelDecl out = c;
    out.span.reset();
    return out;
}

VarDecl copy_var(const VarDecl& v)
{
    VarDecl out = v;
    out.span.reset();
    return out;
}

/// State and local reads of the given formulas, in declaration order, with
/// their aux channel names.
struct AuxPlan {
    std::vector<std::pair<std::string, std::string>> images;  // (variable, channel)
    Renames renames;
};

AuxPlan plan_images(const Component& comp, const std::vector<const Formula*>& formulas, std::set<std::string>& taken)
{
    std::set<std::string> read;
    for (const Formula* f : formulas) {
        Footprint fp = symbol_footprint(*f, comp);
        read.insert(fp.reads_state.begin(), fp.reads_state.end());
        read.insert(fp.reads_locals.begin(), fp.reads_locals.end());
    }
    AuxPlan plan;
    for (const auto& v : comp.vars) {
        if (!read.count(v.name))
            continue;
        std::string aux = fresh_name((v.kind == VarKind::state ? "__st_" : "__loc_") + v.name, taken);
        taken.insert(aux);
        plan.images.emplace_back(v.name, aux);
        plan.renames[v.name] = aux;
    }
    return plan;
}

void finish(DecompositionResult& r)
{
    for (const auto& p : r.parts) {
        if (auto diags = validate_component(p); !diags.empty())
            throw Error(Code::invalid, "generated part `" + p.name + "` is malformed:\n" + format_diagnostics(diags), diags);
    }
    r.network = compose(r.parts, r.aux_channels);
}

std::string join_names(const std::vector<std::string>& names)
{
    std::string out;
    for (const auto& n : names)
        out += (out.empty() ? "`" : ", `") + n + "`";
    return out;
}

DecompositionResult identity(const Component& comp, std::string schema)
{
    require_valid(comp);
    DecompositionResult r;
    r.schema = std::move(schema);
    r.parts = {comp};
    for (const auto& f : comp.formulas)
        r.provenance[f.label] = comp.name;
    r.network = Network::of(comp);
    return r;
}

} // namespace

// ---------------------------------------------------------------------------

DecompositionResult split_mealy_moore(const Component& comp, const DecomposeOptions& opts)
{
    ClassificationReport report = classify_component(comp);

    std::set<std::string> mealy_owned;
    std::set<std::string> stays;
    std::vector<const ClassifiedFormula*> moore;
    for (const auto& row : report.rows) {
        if (row.cls == FormulaClass::moore_output) {
            moore.push_back(&row);
            continue;
        }
        stays.insert(row.label);
        mealy_owned.insert(row.footprint.targets_outputs.begin(), row.footprint.targets_outputs.end());
    }
    for (bool changed = true; changed;) {
        changed = false;
        for (const auto* row : moore) {
            if (stays.count(row->label))
                continue;
            const auto& outs = row->footprint.targets_outputs;
            bool shared = std::any_of(outs.begin(), outs.end(), [&](const std::string& o) { return mealy_owned.count(o) > 0; });
            if (shared || !row->footprint.targets_locals.empty()) {
                stays.insert(row->label);
                mealy_owned.insert(outs.begin(), outs.end());
                changed = true;
            }
        }
    }

    std::vector<const Formula*> moved;
    std::set<std::string> moved_outputs;
    for (const auto& f : comp.formulas) {
        if (stays.count(f.label))
            continue;
        moved.push_back(&f);
        Footprint fp = symbol_footprint(f, comp);
        moved_outputs.insert(fp.targets_outputs.begin(), fp.targets_outputs.end());
    }
    if (moved.empty()) {
        if (moore.empty())
            throw Error(Code::nothing_to_split, "`" + comp.name + "` has no MooreOutput formula to move");
        std::vector<std::string> labels;
        for (const auto* row : moore)
            labels.push_back(row->label);
        throw Error(Code::nothing_to_split, "every MooreOutput formula of `" + comp.name + "` (" + join_names(labels) +
                                                ") targets a local or an output also set by a MealyOutput formula");
    }

    std::set<std::string> taken = taken_names(comp, opts);
    AuxPlan aux = plan_images(comp, moved, taken);

    DecompositionResult r;
    r.schema = "mealy-moore";
    Component mealy = generated_part(part_name(comp, "_mealy", opts));
    Component moore_part = generated_part(part_name(comp, "_moore", opts));

    for (const auto& c : comp.channels)
        if (!(c.direction == Direction::output && moved_outputs.count(c.name)))
            mealy.channels.push_back(copy_channel(c));
    for (const auto& v : comp.vars)
        mealy.vars.push_back(copy_var(v));
    for (const auto& f : comp.formulas) {
        if (!stays.count(f.label))
            continue;
        Formula copy = f;
        copy.span.reset();
        mealy.formulas.push_back(std::move(copy));
        r.provenance[f.label] = mealy.name;
    }
    for (const auto& [var, ch] : aux.images) {
        const ValueDomain& d = comp.find_var(var)->domain;
        mealy.channels.push_back(channel(ch, Direction::output, d));
        moore_part.channels.push_back(channel(ch, Direction::input, d));
        mealy.formulas.push_back(emit(ch, var));
        r.aux_channels.insert(ch);
    }

    for (const auto& c : comp.channels)
        if (c.direction == Direction::output && moved_outputs.count(c.name))
            moore_part.channels.push_back(copy_channel(c));
    for (const Formula* f : moved) {
        moore_part.formulas.push_back(renamed(*f, aux.renames));
        r.provenance[f->label] = moore_part.name;
    }

    r.parts = {std::move(mealy), std::move(moore_part)};
    finish(r);
    return r;
}

// ---------------------------------------------------------------------------

DecompositionResult extract_locals(const Component& comp, const std::set<std::string>& selection,
                                   const DecomposeOptions& opts)
{
    if (selection.empty())
        return identity(comp, "locals");
    require_valid(comp);
    for (const auto& v : selection) {
        const VarDecl* decl = comp.find_var(v);
        if (!decl || decl->kind != VarKind::local)
            throw Error(Code::unknown_local, "`" + v + "` is not a local of `" + comp.name + "`");
    }

    std::vector<const Formula*> moved;
    std::map<std::string, std::set<std::string>> depends;  // target -> selected locals it reads
    for (const auto& f : comp.formulas) {
        Footprint fp = symbol_footprint(f, comp);
        bool touches = std::any_of(fp.targets_locals.begin(), fp.targets_locals.end(),
                                   [&](const std::string& l) { return selection.count(l) > 0; });
        if (!touches)
            continue;
        if (!fp.targets_outputs.empty() || !fp.targets_state.empty())
            throw Error(Code::local_mixed, "formula `" + f.label + "` defines a selected local together with an output or next state");
        for (const auto& l : fp.targets_locals)
            if (!selection.count(l))
                throw Error(Code::local_mixed, "formula `" + f.label + "` also defines `" + l + "`, which is not selected");
        if (!fp.reads_state.empty())
            throw Error(Code::local_state_dep, "formula `" + f.label + "` reads state `" + *fp.reads_state.begin() +
                                                   "`; only locals computed from inputs can be extracted");
        for (const auto& l : fp.reads_locals)
            if (!selection.count(l))
                throw Error(Code::local_state_dep, "formula `" + f.label + "` reads local `" + l + "`, which is not selected");
        for (const auto& t : fp.targets_locals)
            depends[t].insert(fp.reads_locals.begin(), fp.reads_locals.end());
        moved.push_back(&f);
    }

    // cycle check over the selected locals
    std::map<std::string, int> mark;
    std::vector<std::string> stack;
    std::function<void(const std::string&)> visit = [&](const std::string& v) {
        mark[v] = 1;
        stack.push_back(v);
        for (const auto& u : depends[v]) {
            if (mark[u] == 1) {
                auto from = std::find(stack.begin(), stack.end(), u);
                std::string path;
                for (auto it = from; it != stack.end(); ++it)
                    path += *it + " -> ";
                throw Error(Code::local_cycle, "selected locals depend on each other: " + path + u);
            }
            if (mark[u] == 0)
                visit(u);
        }
        stack.pop_back();
        mark[v] = 2;
    };
    for (const auto& v : selection)
        if (mark[v] == 0)
            visit(v);

    std::set<std::string> taken = taken_names(comp, opts);
    DecompositionResult r;
    r.schema = "locals";
    Component loc = generated_part(part_name(comp, "_loc", opts));
    Component core = generated_part(part_name(comp, "_core", opts));

    std::set<std::string> inputs_read;
    for (const Formula* f : moved) {
        Footprint fp = symbol_footprint(*f, comp);
        inputs_read.insert(fp.reads_inputs.begin(), fp.reads_inputs.end());
    }
    for (const auto& c : comp.channels)
        if (c.direction == Direction::input && inputs_read.count(c.name))
            loc.channels.push_back(copy_channel(c));

    std::set<const Formula*> moved_set(moved.begin(), moved.end());
    std::set<std::string> core_reads;
    for (const auto& f : comp.formulas) {
        if (moved_set.count(&f))
            continue;
        Footprint fp = symbol_footprint(f, comp);
        core_reads.insert(fp.reads_locals.begin(), fp.reads_locals.end());
    }

    Renames renames;
    std::vector<std::pair<std::string, std::string>> emits;
    for (const auto& c : comp.channels)
        core.channels.push_back(copy_channel(c));
    for (const auto& v : comp.vars) {
        if (!selection.count(v.name)) {
            core.vars.push_back(copy_var(v));
            continue;
        }
        loc.vars.push_back(copy_var(v));
        std::string aux = fresh_name("__loc_" + v.name, taken);
        taken.insert(aux);
        loc.channels.push_back(channel(aux, Direction::output, v.domain));
        r.aux_channels.insert(aux);
        emits.emplace_back(v.name, aux);
        if (core_reads.count(v.name)) {
            core.channels.push_back(channel(aux, Direction::input, v.domain));
            renames[v.name] = aux;
        }
    }
    for (const Formula* f : moved) {
        Formula copy = *f;
        copy.span.reset();
        loc.formulas.push_back(std::move(copy));
        r.provenance[f->label] = loc.name;
    }
    for (const auto& [var, ch] : emits)
        loc.formulas.push_back(emit(ch, var));
    for (const auto& f : comp.formulas) {
        if (moved_set.count(&f))
            continue;
        core.formulas.push_back(renamed(f, renames));
        r.provenance[f.label] = core.name;
    }

    r.parts = {std::move(loc), std::move(core)};
    finish(r);
    return r;
}

// ---------------------------------------------------------------------------

DecompositionResult extract_outputs(const Component& comp, const std::set<std::string>& selection,
                                    const DecomposeOptions& opts)
{
    if (selection.empty())
        return identity(comp, "outputs");
    require_valid(comp);
    for (const auto& o : selection) {
        const ChannelDecl* c = comp.find_channel(o);
        if (!c || c->direction != Direction::output)
            throw Error(Code::unknown_output, "`" + o + "` is not an output of `" + comp.name + "`");
    }

    std::vector<const Formula*> moved;
    for (const auto& f : comp.formulas) {
        Footprint fp = symbol_footprint(f, comp);
        bool touches = std::any_of(fp.targets_outputs.begin(), fp.targets_outputs.end(),
                                   [&](const std::string& o) { return selection.count(o) > 0; });
        if (!touches)
            continue;
        if (!fp.targets_state.empty())
            throw Error(Code::out_targets_state, "formula `" + f.label + "` sets next state `" + *fp.targets_state.begin() +
                                                     "'`; only pure output definitions can be extracted");
        if (!fp.targets_locals.empty())
            throw Error(Code::out_targets_state, "formula `" + f.label + "` defines local `" + *fp.targets_locals.begin() +
                                                     "`; only pure output definitions can be extracted");
        for (const auto& o : fp.targets_outputs)
            if (!selection.count(o))
                throw Error(Code::out_shared, "formula `" + f.label + "` also sets `" + o + "`, which is not selected");
        moved.push_back(&f);
    }

    std::set<std::string> taken = taken_names(comp, opts);
    AuxPlan aux = plan_images(comp, moved, taken);

    DecompositionResult r;
    r.schema = "outputs";
    Component out = generated_part(part_name(comp, "_out", opts));
    Component core = generated_part(part_name(comp, "_core", opts));

    std::set<std::string> inputs_read;
    for (const Formula* f : moved) {
        Footprint fp = symbol_footprint(*f, comp);
        inputs_read.insert(fp.reads_inputs.begin(), fp.reads_inputs.end());
    }
    for (const auto& c : comp.channels) {
        if (c.direction == Direction::input && inputs_read.count(c.name))
            out.channels.push_back(copy_channel(c));
        if (!(c.direction == Direction::output && selection.count(c.name)))
            core.channels.push_back(copy_channel(c));
    }
    for (const auto& [var, ch] : aux.images) {
        const ValueDomain& d = comp.find_var(var)->domain;
        out.channels.push_back(channel(ch, Direction::input, d));
        core.channels.push_back(channel(ch, Direction::output, d));
        r.aux_channels.insert(ch);
    }
    for (const auto& c : comp.channels)
        if (c.direction == Direction::output && selection.count(c.name))
            out.channels.push_back(copy_channel(c));
    for (const auto& v : comp.vars)
        core.vars.push_back(copy_var(v));

    std::set<const Formula*> moved_set(moved.begin(), moved.end());
    for (const auto& f : comp.formulas) {
        if (moved_set.count(&f)) {
            out.formulas.push_back(renamed(f, aux.renames));
            r.provenance[f.label] = out.name;
        } else {
            Formula copy = f;
            copy.span.reset();
            core.formulas.push_back(std::move(copy));
            r.provenance[f.label] = core.name;
        }
    }
    for (const auto& [var, ch] : aux.images)
        core.formulas.push_back(emit(ch, var));

    r.parts = {std::move(core), std::move(out)};
    finish(r);
    return r;
}

// ---------------------------------------------------------------------------

EquivalenceVerdict verify_decomposition(const Component& original, const DecompositionResult& result, const Bounds& bounds)
{
    return equivalent(Machine::of(original), Machine::of(result.network), bounds);
}

std::vector<std::string> extraction_candidates(const Component& comp, std::size_t threshold)
{
    std::vector<std::string> out;
    for (const auto& v : comp.vars) {
        if (v.kind != VarKind::local)
            continue;
        std::size_t largest = 0;
        for (const auto& f : comp.formulas)
            for (const auto& a : f.atoms)
                if (a.target == v.name && a.kind == Atom::Kind::equals)
                    largest = std::max(largest, expr_size(a.value) + expr_size(f.guard));
        if (largest >= threshold)
            out.push_back(v.name);
    }
    return out;
}

std::vector<std::filesystem::path> write_decomposition(const Component& original, const DecompositionResult& result,
                                                       const std::filesystem::path& dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
        throw Error(Code::io, "cannot create `" + dir.string() + "`: " + ec.message());
    std::vector<std::filesystem::path> written;
    GroupManifest manifest;
    manifest.name = original.name + "_net";
    manifest.root = original.name + ".fspec";
    write_file(dir / manifest.root, render_component(original));
    written.push_back(dir / manifest.root);
    manifest.layers.emplace_back();
    for (const auto& p : result.parts) {
        std::string file = p.name + ".fspec";
        if (file == manifest.root)
            continue;  // identity result
        write_file(dir / file, render_component(p));
        written.push_back(dir / file);
        manifest.layers[0].push_back(file);
    }
    if (manifest.layers[0].empty())
        manifest.layers[0].push_back(manifest.root);
    std::filesystem::path group = dir / (manifest.name + ".fgroup");
    write_file(group, render_manifest(manifest));
    written.push_back(group);
    return written;
}

} // namespace refold
